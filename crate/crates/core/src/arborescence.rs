//! Rooted directed spanning trees: enumeration by in-edge assignment, exact
//! counting through the Laplacian minor, and the closed-form spectral product
//! for the directed square cycle.

use std::f64::consts::PI;
use std::io::BufRead;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CyclePowerGraph, EdgeSet};

/// A simple digraph on vertices `0..n` given by its arc list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    /// Self-loops and repeated arcs are rejected.
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(t, h) in &arcs {
            if t >= n || h >= n {
                return Err(Error::Parameter(format!("arc ({t}, {h}) outside 0..{n}")));
            }
            if t == h {
                return Err(Error::Parameter(format!("self-loop at {t}")));
            }
            if !seen.insert((t, h)) {
                return Err(Error::Parameter(format!("repeated arc ({t}, {h})")));
            }
        }
        Ok(Digraph { n, arcs })
    }

    /// The subgraph `s` of a cycle power, arcs listed by head then jump so each
    /// vertex's in-arcs come in increasing jump order.
    pub fn from_edge_set(g: &CyclePowerGraph, s: &EdgeSet) -> (Digraph, Vec<usize>) {
        let (n, p) = (g.n(), g.power());
        let mut arcs = Vec::new();
        let mut ids = Vec::new();
        for v in 0..n {
            for d in 1..=p {
                let e = g.edge_index(v as i64 - d as i64, d);
                if s.contains(e) {
                    arcs.push((g.tail(e), v));
                    ids.push(e);
                }
            }
        }
        (Digraph { n, arcs }, ids)
    }

    /// Directed strip `S_m`: vertices `0..m` (vertex `i` is the strip's `i+1`),
    /// arcs `(i, j)` with `1 <= j - i <= 2`.
    pub fn strip(m: usize) -> Digraph {
        let mut arcs = Vec::new();
        for j in 0..m {
            for d in 1..=2 {
                if j >= d {
                    arcs.push((j - d, j));
                }
            }
        }
        Digraph { n: m, arcs }
    }

    /// Parses `tail head` lines (0-based). Blank lines and `#` comments are skipped.
    /// The vertex count is `vertices` if given, else one past the largest index.
    pub fn parse_edge_list<R: BufRead>(reader: R, vertices: Option<usize>) -> Result<Digraph> {
        let mut arcs = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::EdgeList {
                line: k + 1,
                msg: e.to_string(),
            })?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut it = body.split_whitespace();
            let mut field = || -> Result<usize> {
                it.next()
                    .ok_or_else(|| Error::EdgeList {
                        line: k + 1,
                        msg: "expected `tail head`".into(),
                    })?
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::EdgeList {
                        line: k + 1,
                        msg: e.to_string(),
                    })
            };
            let (t, h) = (field()?, field()?);
            if it.next().is_some() {
                return Err(Error::EdgeList {
                    line: k + 1,
                    msg: "trailing fields".into(),
                });
            }
            arcs.push((t, h));
        }
        let n =
            vertices.unwrap_or_else(|| arcs.iter().map(|&(t, h)| t.max(h) + 1).max().unwrap_or(0));
        Digraph::new(n, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// In-arc positions per vertex, in arc-list order.
    pub fn in_arcs(&self) -> Vec<Vec<usize>> {
        let mut ins = vec![Vec::new(); self.n];
        for (k, &(_, h)) in self.arcs.iter().enumerate() {
            ins[h].push(k);
        }
        ins
    }
}

/// Exact number of spanning arborescences rooted at `root` (arcs pointing away
/// from the root): determinant of the in-degree Laplacian with the root's row
/// and column removed.
pub fn count_arborescences_det(g: &Digraph, root: usize) -> BigInt {
    let n = g.n();
    assert!(root < n, "root {root} outside 0..{n}");
    if n == 1 {
        return BigInt::one();
    }
    let pos = |v: usize| if v < root { v } else { v - 1 };
    let m = n - 1;
    let mut lap = vec![vec![BigInt::zero(); m]; m];
    for &(t, h) in g.arcs() {
        if h == root {
            continue;
        }
        lap[pos(h)][pos(h)] += 1;
        if t != root {
            lap[pos(t)][pos(h)] -= 1;
        }
    }
    bareiss_determinant(lap)
}

/// Fraction-free Gaussian elimination; every intermediate is a minor of the input.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let m = a.len();
    if m == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[m - 1][m - 1]
}

/// Stream of arborescences of a [`Digraph`], each given as the chosen arc
/// position for every non-root vertex in increasing vertex order.
///
/// Vertices are assigned in increasing index; each one's in-arcs are tried in
/// arc-list order. A candidate is rejected when following already chosen
/// parent arcs from its tail returns to the vertex being assigned.
pub struct InArcAssignments {
    root: usize,
    order: Vec<usize>,
    ins: Vec<Vec<usize>>,
    tails: Vec<usize>,
    parent: Vec<Option<usize>>,
    choice: Vec<usize>,
    level: usize,
    done: bool,
}

impl InArcAssignments {
    pub fn new(g: &Digraph, root: usize) -> Self {
        assert!(root < g.n(), "root {root} outside 0..{}", g.n());
        let order: Vec<usize> = (0..g.n()).filter(|&v| v != root).collect();
        let levels = order.len();
        InArcAssignments {
            root,
            order,
            ins: g.in_arcs(),
            tails: g.arcs().iter().map(|&(t, _)| t).collect(),
            parent: vec![None; g.n()],
            choice: vec![0; levels + 1],
            level: 0,
            done: false,
        }
    }

    fn creates_cycle(&self, v: usize, arc: usize) -> bool {
        let mut w = self.tails[arc];
        loop {
            if w == v {
                return true;
            }
            if w == self.root {
                return false;
            }
            match self.parent[w] {
                Some(a) => w = self.tails[a],
                None => return false,
            }
        }
    }
}

impl Iterator for InArcAssignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let depth = self.order.len();
        if depth == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        // On re-entry after a yield, the deepest level resumes from its next choice.
        loop {
            if self.level == depth {
                let tree = self
                    .order
                    .iter()
                    .map(|&v| self.parent[v].expect("assigned"))
                    .collect();
                self.level -= 1;
                return Some(tree);
            }
            let v = self.order[self.level];
            self.parent[v] = None;
            let mut advanced = false;
            while self.choice[self.level] < self.ins[v].len() {
                let arc = self.ins[v][self.choice[self.level]];
                self.choice[self.level] += 1;
                if !self.creates_cycle(v, arc) {
                    self.parent[v] = Some(arc);
                    advanced = true;
                    break;
                }
            }
            if advanced {
                self.level += 1;
                self.choice[self.level] = 0;
            } else {
                self.choice[self.level] = 0;
                if self.level == 0 {
                    self.done = true;
                    return None;
                }
                self.level -= 1;
            }
        }
    }
}

/// A directed spanning tree of a cycle power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arborescence {
    pub edges: EdgeSet,
    pub root: usize,
}

/// Checks every defining condition directly: `n - 1` edges, in-degree 0 at the
/// root and 1 elsewhere, and every vertex reachable from the root.
pub fn is_arborescence(g: &CyclePowerGraph, s: &EdgeSet, root: usize) -> bool {
    let n = g.n();
    if !g.belongs(s) || root >= n || s.len() != n - 1 {
        return false;
    }
    let mut indeg = vec![0usize; n];
    for e in s.indices() {
        indeg[g.head(e)] += 1;
    }
    if indeg[root] != 0 || (0..n).any(|v| v != root && indeg[v] != 1) {
        return false;
    }
    let mut reached = vec![false; n];
    reached[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for d in 1..=g.power() {
            let e = g.edge_index(v as i64, d);
            let h = g.head(e);
            if s.contains(e) && !reached[h] {
                reached[h] = true;
                stack.push(h);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Arborescences of `g` rooted at `root`, in deterministic order.
pub fn enumerate_arborescences(
    g: &CyclePowerGraph,
    root: usize,
) -> impl Iterator<Item = Arborescence> {
    enumerate_arborescences_within(g, &g.full_set(), root)
}

/// Arborescences rooted at `root` using only edges of `s`.
pub fn enumerate_arborescences_within(
    g: &CyclePowerGraph,
    s: &EdgeSet,
    root: usize,
) -> impl Iterator<Item = Arborescence> {
    let (dg, ids) = Digraph::from_edge_set(g, s);
    let (n, p) = (g.n(), g.power());
    InArcAssignments::new(&dg, root).map(move |arcs| Arborescence {
        edges: EdgeSet::from_bits_unchecked(
            n,
            p,
            arcs.iter().fold(0u128, |b, &a| b | 1u128 << ids[a]),
        ),
        root,
    })
}

/// Determinant count for the subgraph `s` of a cycle power.
pub fn count_within_det(g: &CyclePowerGraph, s: &EdgeSet, root: usize) -> BigInt {
    count_arborescences_det(&Digraph::from_edge_set(g, s).0, root)
}

/// `(1/n) prod_{k=1}^{n-1} (2 - w^k - w^{2k})` with `w = exp(2 pi i / n)`.
/// Returns the real part; errors when the imaginary residue exceeds `1e-6`
/// relative to it.
pub fn spectral_product(n: usize) -> Result<f64> {
    if n < 5 {
        return Err(Error::Parameter(format!(
            "spectral product needs n >= 5, got {n}"
        )));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        let b = 4.0 * PI * k as f64 / n as f64;
        prod *= Complex64::new(2.0 - a.cos() - b.cos(), -a.sin() - b.sin());
    }
    let value = prod / n as f64;
    if value.im.abs() > 1e-6 * value.re.abs() {
        return Err(Error::ImaginaryResidue {
            real: value.re,
            imag: value.im,
        });
    }
    Ok(value.re)
}

/// Counts of `t(C_n^p, root)` by the available methods.
#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub n: usize,
    pub power: usize,
    pub root: usize,
    #[serde(serialize_with = "crate::report::opt_big")]
    pub count_enum: Option<BigInt>,
    #[serde(serialize_with = "crate::report::opt_big")]
    pub count_det: Option<BigInt>,
    pub count_spectral: Option<f64>,
    /// Enumeration and determinant agree (when both computed).
    pub exact_agree: bool,
    /// Spectral value within `1e-6` relative of the exact count (when both computed).
    pub spectral_agree: bool,
}

impl CountReport {
    pub fn compute(
        g: &CyclePowerGraph,
        root: usize,
        enumerate: bool,
        spectral: bool,
    ) -> Result<Self> {
        let count_det = count_within_det(g, &g.full_set(), root);
        let count_enum = enumerate.then(|| BigInt::from(enumerate_arborescences(g, root).count()));
        let count_spectral = if spectral && g.power() == 2 {
            Some(spectral_product(g.n())?)
        } else {
            None
        };
        let exact_agree = count_enum.as_ref().is_none_or(|c| *c == count_det);
        let spectral_agree = count_spectral.is_none_or(|s| {
            let exact: f64 = count_det.to_string().parse().unwrap_or(f64::NAN);
            ((s - exact) / exact).abs() < 1e-6
        });
        Ok(CountReport {
            n: g.n(),
            power: g.power(),
            root,
            count_enum,
            count_det: Some(count_det),
            count_spectral,
            exact_agree,
            spectral_agree,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_cycle_power;

    /// Independent oracle: every in-edge assignment, checked with `is_arborescence`.
    fn brute_force(g: &CyclePowerGraph, root: usize) -> usize {
        let (n, p) = (g.n(), g.power());
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let total = p.pow(others.len() as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let mut s = g.empty_set();
                for &v in &others {
                    let d = c % p + 1;
                    c /= p;
                    s.insert(g.edge_index(v as i64 - d as i64, d));
                }
                is_arborescence(g, &s, root)
            })
            .count()
    }

    #[test]
    fn is_arborescence_examples() {
        let g = build_cycle_power(5, 2).unwrap();
        let path = g.set_of((0..4).map(|i| g.frame(i)));
        assert!(is_arborescence(&g, &path, 0));
        assert!(!is_arborescence(&g, &path, 1));
        assert!(!is_arborescence(&g, &g.jump_class(1), 0));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let g = build_cycle_power(5, 2).unwrap();
        assert_eq!(brute_force(&g, 0), 11);
        let trees: Vec<_> = enumerate_arborescences(&g, 0).collect();
        assert_eq!(trees.len(), 11);
        assert!(trees.iter().all(|t| is_arborescence(&g, &t.edges, 0)));
        let distinct: std::collections::HashSet<_> = trees.iter().map(|t| t.edges).collect();
        assert_eq!(distinct.len(), 11);

        let g6 = build_cycle_power(6, 2).unwrap();
        assert_eq!(brute_force(&g6, 0), 21);
        assert_eq!(enumerate_arborescences(&g6, 0).count(), 21);

        let g7 = build_cycle_power(7, 3).unwrap();
        assert_eq!(enumerate_arborescences(&g7, 3).count(), brute_force(&g7, 3));
    }

    #[test]
    fn enumeration_order_is_deterministic() {
        let g = build_cycle_power(6, 2).unwrap();
        let a: Vec<_> = enumerate_arborescences(&g, 2).collect();
        let b: Vec<_> = enumerate_arborescences(&g, 2).collect();
        assert_eq!(a, b);
        // First tree: every non-root vertex takes its jump-1 in-edge (the path from v2).
        let first = a[0].edges;
        assert!(first.indices().all(|e| g.edge(e).jump == 1));
    }

    #[test]
    fn determinant_examples() {
        let g = build_cycle_power(5, 2).unwrap();
        assert_eq!(count_within_det(&g, &g.full_set(), 0), BigInt::from(11));
        let single = Digraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(count_arborescences_det(&single, 0), BigInt::from(1));
        assert_eq!(count_arborescences_det(&single, 1), BigInt::from(0));
        let tri = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        for r in 0..3 {
            assert_eq!(count_arborescences_det(&tri, r), BigInt::from(1));
            assert_eq!(InArcAssignments::new(&tri, r).count(), 1);
        }
        let lone = Digraph::new(1, vec![]).unwrap();
        assert_eq!(count_arborescences_det(&lone, 0), BigInt::from(1));
        assert_eq!(InArcAssignments::new(&lone, 0).count(), 1);
        let empty = Digraph::new(3, vec![]).unwrap();
        assert_eq!(count_arborescences_det(&empty, 0), BigInt::from(0));
        assert_eq!(InArcAssignments::new(&empty, 0).count(), 0);
    }

    #[test]
    fn strip_graph_counts() {
        assert_eq!(InArcAssignments::new(&Digraph::strip(2), 0).count(), 1);
        assert_eq!(InArcAssignments::new(&Digraph::strip(4), 0).count(), 4);
        assert_eq!(
            count_arborescences_det(&Digraph::strip(4), 0),
            BigInt::from(4)
        );
    }

    #[test]
    fn spectral_examples() {
        for (n, expect) in [(5, 11.0), (6, 21.0), (12, 1365.0)] {
            let v = spectral_product(n).unwrap();
            assert!(((v - expect) / expect).abs() < 1e-9, "n = {n}: {v}");
        }
        assert!(spectral_product(4).is_err());
    }

    #[test]
    fn digraph_validation_and_parsing() {
        assert!(Digraph::new(2, vec![(0, 0)]).is_err());
        assert!(Digraph::new(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(Digraph::new(2, vec![(0, 2)]).is_err());
        let text = "# triangle\n0 1\n1 2\n\n2 0 # back\n";
        let g = Digraph::parse_edge_list(text.as_bytes(), None).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.arcs(), &[(0, 1), (1, 2), (2, 0)]);
        let g = Digraph::parse_edge_list("0 1\n".as_bytes(), Some(4)).unwrap();
        assert_eq!(count_arborescences_det(&g, 0), BigInt::from(0));
        assert!(matches!(
            Digraph::parse_edge_list("0 x\n".as_bytes(), None),
            Err(Error::EdgeList { line: 1, .. })
        ));
        assert!(Digraph::parse_edge_list("0 1 2\n".as_bytes(), None).is_err());
    }

    #[test]
    fn count_report() {
        let g = build_cycle_power(7, 2).unwrap();
        let r = CountReport::compute(&g, 3, true, true).unwrap();
        assert_eq!(r.count_det, Some(BigInt::from(43)));
        assert!(r.exact_agree && r.spectral_agree);
    }
}
