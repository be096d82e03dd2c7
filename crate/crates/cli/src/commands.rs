use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use cyclepow::arborescence::{
    count_within_det, enumerate_arborescences, spectral_product, Digraph, InArcAssignments,
};
use cyclepow::decomposition::{
    count_square_cycle, verify_cube_remark, verify_partition, PartitionOptions, RemarkOptions,
};
use cyclepow::graph::{edge_name, CyclePowerGraph, EdgeSet, ExportFormat};
use cyclepow::jacobsthal::{
    closed_form_check, jacobsthal, partial_sum_identity_check, partial_sum_literal_check,
};
use cyclepow::wcsc::{
    classify, closure_trace, enumerate_wcsc, verify_classification, EnumerateOptions,
};
use cyclepow::Error;

use crate::{CountArgs, DigraphArgs, ExportArgs, Format, Method, Suite, VerifyArgs, What};

/// Tree enumeration bound on `n` for power 2 / power 3.
const ENUM_GUARD: [usize; 2] = [25, 16];
/// WCSC enumeration bound on `n` for the square cycle.
const WCSC_SQUARE_GUARD: usize = 14;
/// Tree export bound on `n` for power 2 / power 3.
const TREE_EXPORT_GUARD: [usize; 2] = [16, 10];
/// Raw subset scan bound for `--oracle` classification.
const RAW_SCAN_GUARD: usize = 12;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Counterexample(_)) {
            1
        } else {
            2
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

type CliResult = Result<bool, CliError>;

fn guard(ok: bool, force: bool, what: &str) -> Result<(), CliError> {
    if ok || force {
        Ok(())
    } else {
        Err(CliError::usage(format!("{what}; pass --force to override")))
    }
}

fn graph(n: usize, power: usize) -> Result<CyclePowerGraph, CliError> {
    Ok(CyclePowerGraph::new(n, power)?)
}

fn emit(out: Option<&Path>, file: &str, body: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file), body)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CountRow {
    n: usize,
    power: usize,
    root: usize,
    #[serde(rename = "enum")]
    enumerated: Option<String>,
    det: Option<String>,
    spectral: Option<f64>,
    formula: Option<String>,
    jacobsthal: Option<String>,
    agree: bool,
}

impl CountRow {
    fn csv(&self) -> String {
        let o = |v: &Option<String>| v.clone().unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.n,
            self.power,
            self.root,
            o(&self.enumerated),
            o(&self.det),
            self.spectral.map(|s| format!("{s:.6}")).unwrap_or_default(),
            o(&self.formula),
            o(&self.jacobsthal),
            self.agree
        )
    }
}

fn count_row(n: usize, args: &CountArgs) -> Result<CountRow, CliError> {
    let g = graph(n, args.power)?;
    if args.root >= n {
        return Err(CliError::usage(format!(
            "root {} outside 0..{n}",
            args.root
        )));
    }
    let has = |m: Method| args.method.contains(&m);
    let enumerated =
        has(Method::Enum).then(|| BigInt::from(enumerate_arborescences(&g, args.root).count()));
    let det = has(Method::Det).then(|| count_within_det(&g, &g.full_set(), args.root));
    let spectral = if has(Method::Spectral) {
        Some(spectral_product(n)?)
    } else {
        None
    };
    let formula = if has(Method::Formula) {
        Some(count_square_cycle(n)?)
    } else {
        None
    };
    let reference = (args.power == 2).then(|| jacobsthal(n));

    let exact: Vec<&BigInt> = [&enumerated, &det, &formula, &reference]
        .into_iter()
        .flatten()
        .collect();
    let mut agree = exact.windows(2).all(|w| w[0] == w[1]);
    if let (Some(s), Some(r)) = (spectral, exact.first()) {
        let r: f64 = r.to_string().parse().unwrap_or(f64::NAN);
        agree &= ((s - r) / r).abs() < 1e-6;
    }
    let s = |v: Option<BigInt>| v.map(|b| b.to_string());
    Ok(CountRow {
        n,
        power: args.power,
        root: args.root,
        enumerated: s(enumerated),
        det: s(det),
        spectral,
        formula: s(formula),
        jacobsthal: s(reference),
        agree,
    })
}

pub fn count(args: &CountArgs) -> CliResult {
    if args.power != 2
        && (args.method.contains(&Method::Spectral) || args.method.contains(&Method::Formula))
    {
        return Err(CliError::usage(
            "spectral and formula methods apply to power 2 only",
        ));
    }
    if args.method.contains(&Method::Enum) {
        let limit = ENUM_GUARD[if args.power == 2 { 0 } else { 1 }];
        guard(
            args.range.end <= limit,
            args.force,
            &format!("tree enumeration limited to n <= {limit}"),
        )?;
    }
    let rows: Vec<CountRow> = args
        .range
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| count_row(n, args))
        .collect::<Result<_, _>>()?;
    let agree = rows.iter().all(|r| r.agree);
    let (file, body) = match args.format {
        Format::Csv => {
            let mut b = String::from("n,power,root,enum,det,spectral,formula,jacobsthal,agree\n");
            rows.iter().for_each(|r| b.push_str(&r.csv()));
            ("count.csv", b)
        }
        Format::Json => ("count.jsonl", rows.iter().map(json_line).collect()),
        Format::Dot => return Err(CliError::usage("count supports --format json or csv")),
    };
    emit(args.out.as_deref(), file, &body)?;
    Ok(agree)
}

#[derive(Serialize)]
struct DigraphRow {
    n: usize,
    arcs: usize,
    root: usize,
    det: String,
    #[serde(rename = "enum")]
    enumerated: Option<String>,
    agree: bool,
}

pub fn count_digraph(args: &DigraphArgs) -> CliResult {
    let file = fs::File::open(&args.file)
        .map_err(|e| CliError::usage(format!("{}: {e}", args.file.display())))?;
    let g = Digraph::parse_edge_list(std::io::BufReader::new(file), args.vertices)?;
    if args.root >= g.n() {
        return Err(CliError::usage(format!(
            "root {} outside 0..{}",
            args.root,
            g.n()
        )));
    }
    let det = cyclepow::count_arborescences_det(&g, args.root);
    let enumerated = args
        .oracle
        .then(|| BigInt::from(InArcAssignments::new(&g, args.root).count()));
    let agree = enumerated.as_ref().is_none_or(|e| *e == det);
    let row = DigraphRow {
        n: g.n(),
        arcs: g.arcs().len(),
        root: args.root,
        det: det.to_string(),
        enumerated: enumerated.map(|e| e.to_string()),
        agree,
    };
    emit(None, "", &json_line(&row))?;
    Ok(agree)
}

#[derive(Serialize)]
struct SuiteLine<'a, T: Serialize> {
    suite: &'a str,
    #[serde(flatten)]
    report: T,
}

#[derive(Serialize)]
struct JacobsthalLine {
    m: usize,
    jacobsthal: String,
    partial_sum: bool,
    partial_sum_literal: bool,
    closed_form: bool,
    square_cycle_formula: Option<String>,
    pass: bool,
}

fn roots(arg: &str, n: usize) -> Result<Vec<usize>, CliError> {
    if arg == "all" {
        return Ok((0..n).collect());
    }
    let r: usize = arg
        .parse()
        .map_err(|_| CliError::usage(format!("--root expects a vertex or `all`, got `{arg}`")))?;
    if r >= n {
        return Err(CliError::usage(format!("root {r} outside 0..{n}")));
    }
    Ok(vec![r])
}

pub fn verify(args: &VerifyArgs) -> CliResult {
    let ns: Vec<usize> = args.range.iter().collect();
    let needs_square = matches!(args.suite, Suite::Classification | Suite::Partition);
    if needs_square && args.power != 2 {
        return Err(CliError::usage(
            "classification and partition suites apply to power 2",
        ));
    }
    if args.format == Format::Dot {
        return Err(CliError::usage("verify supports --format json or csv"));
    }
    if args.format == Format::Csv && args.suite != Suite::Partition {
        return Err(CliError::usage(
            "csv output is available for the partition suite",
        ));
    }
    match args.suite {
        Suite::Classification | Suite::Partition if args.range.start < 5 => {
            return Err(CliError::usage("square cycle requires n >= 5"));
        }
        Suite::Classification => {
            guard(
                args.range.end <= WCSC_SQUARE_GUARD,
                args.force,
                &format!("WCSC enumeration limited to n <= {WCSC_SQUARE_GUARD}"),
            )?;
        }
        Suite::Jacobsthal if args.range.start < 2 => {
            return Err(CliError::usage("identity checks need m >= 2"))
        }
        Suite::Remark => {
            if args.power != 3 {
                return Err(CliError::usage("remark suite applies to power 3"));
            }
            guard(
                ns.iter().all(|n| [9, 10].contains(n)),
                args.force,
                "remark suite runs for n in {9, 10}",
            )?;
        }
        _ => {}
    }

    let mut lines: Vec<String> = Vec::new();
    let mut csv = String::from("n,k,bucket,expected\n");
    let mut pass = true;
    match args.suite {
        Suite::Classification => {
            let opts = EnumerateOptions {
                force: args.force,
                parallel: true,
            };
            let reports = ns
                .par_iter()
                .map(|&n| verify_classification(n, args.oracle && n <= RAW_SCAN_GUARD, opts))
                .collect::<Result<Vec<_>, _>>()?;
            for r in reports {
                pass &= r.pass;
                lines.push(json_line(&SuiteLine {
                    suite: "classification",
                    report: r,
                }));
            }
        }
        Suite::Partition => {
            let mut jobs = Vec::new();
            for &n in &ns {
                for r in roots(&args.root, n)? {
                    jobs.push((n, r));
                }
            }
            if args.format == Format::Csv && args.root == "all" {
                return Err(CliError::usage("csv partition table needs a single --root"));
            }
            let opts = PartitionOptions {
                oracle: true,
                force: args.force,
                parallel: true,
            };
            let reports = jobs
                .par_iter()
                .map(|&(n, r)| verify_partition(n, r, opts))
                .collect::<Result<Vec<_>, _>>()?;
            for r in reports {
                pass &= r.pass;
                for row in r.csv_rows() {
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
                lines.push(json_line(&SuiteLine {
                    suite: "partition",
                    report: r,
                }));
            }
        }
        Suite::Jacobsthal => {
            for &m in &ns {
                let j = jacobsthal(m);
                let formula = if m >= 5 {
                    Some(count_square_cycle(m)?)
                } else {
                    None
                };
                let line = JacobsthalLine {
                    m,
                    partial_sum: partial_sum_identity_check(m),
                    partial_sum_literal: partial_sum_literal_check(m),
                    closed_form: closed_form_check(m),
                    pass: partial_sum_identity_check(m)
                        && closed_form_check(m)
                        && formula.as_ref().is_none_or(|f| *f == j),
                    square_cycle_formula: formula.map(|f| f.to_string()),
                    jacobsthal: j.to_string(),
                };
                pass &= line.pass;
                lines.push(json_line(&SuiteLine {
                    suite: "jacobsthal",
                    report: line,
                }));
            }
        }
        Suite::Remark => {
            for &n in &ns {
                let r = verify_cube_remark(n, RemarkOptions::default())?;
                pass &= r.pass;
                lines.push(json_line(&SuiteLine {
                    suite: "remark",
                    report: r,
                }));
            }
        }
    }
    match args.format {
        Format::Csv => emit(args.out.as_deref(), "verify.csv", &csv)?,
        _ => emit(args.out.as_deref(), "verify.jsonl", &lines.concat())?,
    }
    Ok(pass)
}

fn parse_edge(g: &CyclePowerGraph, tok: &str) -> Result<usize, CliError> {
    let bad = || {
        CliError::usage(format!(
            "cannot parse edge `{tok}` (use e3, f3 or tail.jump)"
        ))
    };
    let (tail, jump) = if let Some(rest) = tok.strip_prefix('e').filter(|_| g.power() == 2) {
        (rest.parse::<usize>().map_err(|_| bad())?, 1)
    } else if let Some(rest) = tok.strip_prefix('f').filter(|_| g.power() == 2) {
        (rest.parse::<usize>().map_err(|_| bad())?, 2)
    } else {
        let (t, d) = tok.split_once(['.', ':']).ok_or_else(bad)?;
        (t.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    };
    if tail >= g.n() || !(1..=g.power()).contains(&jump) {
        return Err(bad());
    }
    Ok(g.edge_index(tail as i64, jump))
}

#[derive(Serialize)]
struct ClosureTrace {
    n: usize,
    power: usize,
    start: Vec<[usize; 2]>,
    added: Vec<[usize; 2]>,
    closure: Vec<[usize; 2]>,
    class: Option<cyclepow::WcscClass>,
}

fn pairs(g: &CyclePowerGraph, idx: impl IntoIterator<Item = usize>) -> Vec<[usize; 2]> {
    idx.into_iter()
        .map(|i| g.edge(i))
        .map(|e| [e.tail, e.jump])
        .collect()
}

fn write_sets(
    g: &CyclePowerGraph,
    sets: &[EdgeSet],
    prefix: &str,
    format: ExportFormat,
    ext: &str,
    dir: &Path,
) -> Result<(), CliError> {
    let mut order: Vec<(EdgeSet, EdgeSet)> =
        sets.iter().map(|s| (g.canonical_form(s), *s)).collect();
    order.sort();
    let width = sets.len().to_string().len().max(3);
    for (k, (_, s)) in order.iter().enumerate() {
        let path = dir.join(format!("{prefix}_{k:0width$}.{ext}"));
        fs::write(&path, g.export(s, format))?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn export(args: &ExportArgs) -> CliResult {
    let g = graph(args.n, args.power)?;
    let (format, ext) = match args.format {
        Format::Dot => (ExportFormat::Dot, "dot"),
        Format::Json => (ExportFormat::Json, "json"),
        Format::Csv => return Err(CliError::usage("export supports --format dot or json")),
    };
    let dir = args.out.as_path();
    fs::create_dir_all(dir)?;
    match args.what {
        What::Graph => {
            let path = dir.join(format!("c{}_{}.{ext}", args.n, args.power));
            fs::write(&path, g.export(&g.full_set(), format))?;
            println!("{}", path.display());
        }
        What::Wcsc => {
            if args.power == 2 {
                guard(
                    args.n <= WCSC_SQUARE_GUARD,
                    args.force,
                    &format!("WCSC export limited to n <= {WCSC_SQUARE_GUARD}"),
                )?;
            }
            let all = enumerate_wcsc(
                &g,
                EnumerateOptions {
                    force: args.force,
                    parallel: true,
                },
            )?;
            write_sets(&g, &all, "wcsc", format, ext, dir)?;
        }
        What::Trees => {
            let limit = TREE_EXPORT_GUARD[if args.power == 2 { 0 } else { 1 }];
            guard(
                args.n <= limit,
                args.force,
                &format!("tree export limited to n <= {limit}"),
            )?;
            if args.root >= args.n {
                return Err(CliError::usage(format!(
                    "root {} outside 0..{}",
                    args.root, args.n
                )));
            }
            let trees: Vec<EdgeSet> = enumerate_arborescences(&g, args.root)
                .map(|t| t.edges)
                .collect();
            write_sets(
                &g,
                &trees,
                &format!("tree_r{}", args.root),
                format,
                ext,
                dir,
            )?;
        }
        What::ClosureTrace => {
            let listed = args
                .tree
                .as_deref()
                .ok_or_else(|| CliError::usage("closure-trace needs --tree"))?;
            let idx = listed
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_edge(&g, t))
                .collect::<Result<Vec<_>, _>>()?;
            let start = g.set_of(idx);
            let (hull, added) = closure_trace(&g, &start);
            let body = match format {
                ExportFormat::Json => {
                    let trace = ClosureTrace {
                        n: g.n(),
                        power: g.power(),
                        start: pairs(&g, start.indices()),
                        added: pairs(&g, added.iter().copied()),
                        closure: pairs(&g, hull.indices()),
                        class: (g.power() == 2).then(|| classify(&g, &hull)),
                    };
                    json_line(&trace)
                }
                ExportFormat::Dot => {
                    let mut b = format!("digraph closure_C{}_{} {{\n", g.n(), g.power());
                    for v in 0..g.n() {
                        b.push_str(&format!("  v{v};\n"));
                    }
                    for e in hull.indices() {
                        let name = edge_name(g.power(), g.edge(e));
                        let style = match added.iter().position(|&a| a == e) {
                            Some(step) => format!("label=\"{name} (+{})\", style=dashed", step + 1),
                            None => format!("label=\"{name}\""),
                        };
                        b.push_str(&format!("  v{} -> v{} [{style}];\n", g.tail(e), g.head(e)));
                    }
                    b.push_str("}\n");
                    b
                }
            };
            let path = dir.join(format!("closure_trace.{ext}"));
            fs::write(&path, body)?;
            println!("{}", path.display());
            for e in &added {
                println!("+ {}", edge_name(g.power(), g.edge(*e)));
            }
        }
    }
    Ok(true)
}
