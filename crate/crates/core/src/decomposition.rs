//! Spanning trees of the square cycle split by the unique nontrivial WCSC
//! subgraph containing them, and the count `t(C_n^2, v_j) = J_n` assembled
//! from strip counts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arborescence::{enumerate_arborescences, Arborescence};
use crate::error::{Error, Result};
use crate::graph::{CyclePowerGraph, EdgeSet};
use crate::jacobsthal::{jacobsthal, JacobsthalTable};
use crate::wcsc::{
    classify, closure, enumerate_wcsc, homology_trivial, orbit_count, strip_with_tails,
    EnumerateOptions, StripParams, SymmetryGroup, WcscClass,
};

/// Upper bound on `n` for [`verify_partition`] without `force`.
pub const PARTITION_GUARD: usize = 16;

/// Spanning trees of the strip `S_m` rooted at its first vertex.
/// `S_1` has the empty tree.
pub fn count_strip(m: usize) -> Result<BigInt> {
    match m {
        0 => Err(Error::Parameter("strip needs at least one vertex".into())),
        1 => Ok(BigInt::one()),
        _ => {
            let t = JacobsthalTable::new(m - 1);
            Ok(t.get(m - 2) + t.get(m - 1))
        }
    }
}

/// Trees of `S(n, k, j)` rooted at `v_j`, which equals the count for `S_{n-2k}`.
pub fn count_strip_with_tails(n: usize, params: StripParams) -> Result<BigInt> {
    params.validate(n)?;
    count_strip(n - 2 * params.k)
}

/// `sum_k t(S_{n-2k})` over every admissible `k`; no enumeration.
pub fn count_square_cycle(n: usize) -> Result<BigInt> {
    if n < 5 {
        return Err(Error::Parameter(format!(
            "square cycle needs n >= 5, got {n}"
        )));
    }
    (0..=StripParams::max_k(n))
        .map(|k| count_strip(n - 2 * k))
        .sum()
}

/// Strip parameters of the closure of `tree`. Errors when the closure is not
/// a strip, does not contain the tree, or is anchored away from the root.
pub fn locate_tree(g: &CyclePowerGraph, tree: &Arborescence) -> Result<StripParams> {
    if g.power() != 2 {
        return Err(Error::Parameter(
            "tree location is defined for the square cycle".into(),
        ));
    }
    let hull = closure(g, &tree.edges);
    match classify(g, &hull) {
        WcscClass::Strip(p) => {
            let strip = strip_with_tails(g.n(), p)?;
            if !tree.edges.is_subset(&strip) || p.j != tree.root {
                return Err(Error::Counterexample(format!(
                    "tree {:?} rooted at v{} closes to S(n={}, k={}, j={})",
                    tree.edges,
                    tree.root,
                    g.n(),
                    p.k,
                    p.j
                )));
            }
            Ok(p)
        }
        other => Err(Error::Counterexample(format!(
            "closure of tree {:?} rooted at v{} classifies as {other:?}",
            tree.edges, tree.root
        ))),
    }
}

/// Every strip with tails, over the full parameter range, that contains `edges`.
pub fn containing_strips(
    n: usize,
    strips: &[(StripParams, EdgeSet)],
    edges: &EdgeSet,
) -> Vec<StripParams> {
    debug_assert_eq!(edges.n(), n);
    strips
        .iter()
        .filter(|(_, s)| edges.is_subset(s))
        .map(|(p, _)| *p)
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct UniquenessViolation {
    pub tree: Vec<[usize; 2]>,
    pub located: Option<StripParams>,
    pub containers: Vec<StripParams>,
    pub message: String,
}

#[derive(Clone, Copy, Debug)]
pub struct PartitionOptions {
    /// Run the exhaustive containment scan against every strip.
    pub oracle: bool,
    pub force: bool,
    pub parallel: bool,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            oracle: true,
            force: false,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    pub root: usize,
    #[serde(serialize_with = "crate::report::big_map")]
    pub buckets: BTreeMap<usize, BigInt>,
    #[serde(serialize_with = "crate::report::big_map")]
    pub expected_buckets: BTreeMap<usize, BigInt>,
    #[serde(serialize_with = "crate::report::big")]
    pub total: BigInt,
    #[serde(serialize_with = "crate::report::big")]
    pub expected_total: BigInt,
    pub uniqueness_violations: Vec<UniquenessViolation>,
    pub pass: bool,
}

impl PartitionReport {
    /// `(n, k, bucket, expected)` rows.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        self.expected_buckets
            .iter()
            .map(|(k, e)| {
                let got = self
                    .buckets
                    .get(k)
                    .map_or_else(|| "0".to_string(), |b| b.to_string());
                [self.n.to_string(), k.to_string(), got, e.to_string()]
            })
            .collect()
    }
}

enum TreeOutcome {
    Located(usize),
    Violation(UniquenessViolation),
}

fn pairs(s: &EdgeSet) -> Vec<[usize; 2]> {
    s.edges().iter().map(|e| [e.tail, e.jump]).collect()
}

/// Enumerates the trees rooted at `root`, locates each one's container and
/// buckets by `k`. With `oracle` set, each tree is also matched against every
/// strip with tails; it must lie in exactly one, the located one.
pub fn verify_partition(n: usize, root: usize, opts: PartitionOptions) -> Result<PartitionReport> {
    if n < 5 || root >= n {
        return Err(Error::Parameter(format!(
            "partition needs n >= 5 and root < n, got n={n}, root={root}"
        )));
    }
    if !opts.force && n > PARTITION_GUARD {
        return Err(Error::SizeGuard {
            what: "partition n",
            limit: PARTITION_GUARD,
            got: n,
        });
    }
    let g = CyclePowerGraph::new(n, 2)?;
    let strips: Vec<(StripParams, EdgeSet)> = StripParams::all(n)
        .map(|p| Ok((p, strip_with_tails(n, p)?)))
        .collect::<Result<_>>()?;
    let trees: Vec<Arborescence> = enumerate_arborescences(&g, root).collect();

    let check = |t: &Arborescence| -> TreeOutcome {
        let located = locate_tree(&g, t);
        let containers = if opts.oracle {
            containing_strips(n, &strips, &t.edges)
        } else {
            Vec::new()
        };
        match located {
            Ok(p) if !opts.oracle || containers == [p] => TreeOutcome::Located(p.k),
            Ok(p) => TreeOutcome::Violation(UniquenessViolation {
                tree: pairs(&t.edges),
                located: Some(p),
                message: format!("{} containing strips", containers.len()),
                containers,
            }),
            Err(e) => TreeOutcome::Violation(UniquenessViolation {
                tree: pairs(&t.edges),
                located: None,
                containers,
                message: e.to_string(),
            }),
        }
    };
    let outcomes: Vec<TreeOutcome> = if opts.parallel {
        trees.par_iter().map(check).collect()
    } else {
        trees.iter().map(check).collect()
    };

    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut violations = Vec::new();
    for o in outcomes {
        match o {
            TreeOutcome::Located(k) => *counts.entry(k).or_default() += 1,
            TreeOutcome::Violation(v) => violations.push(v),
        }
    }
    let buckets: BTreeMap<usize, BigInt> = counts
        .into_iter()
        .map(|(k, c)| (k, BigInt::from(c)))
        .collect();
    let expected_buckets: BTreeMap<usize, BigInt> = (0..=StripParams::max_k(n))
        .map(|k| Ok((k, count_strip_with_tails(n, StripParams::new(k, root))?)))
        .collect::<Result<_>>()?;
    let total = BigInt::from(trees.len());
    let expected_total = jacobsthal(n);
    let pass = violations.is_empty() && buckets == expected_buckets && total == expected_total;
    Ok(PartitionReport {
        n,
        root,
        buckets,
        expected_buckets,
        total,
        expected_total,
        uniqueness_violations: violations,
        pass,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct RemarkOptions {
    /// Also count orbits under the full automorphism group found by search.
    pub full_automorphisms: bool,
    pub parallel: bool,
}

impl Default for RemarkOptions {
    fn default() -> Self {
        RemarkOptions {
            full_automorphisms: true,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RemarkViolation {
    pub tree: Vec<[usize; 2]>,
    /// Containing nontrivial subgraphs, counted up to the second one.
    pub containers: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeRemarkReport {
    pub n: usize,
    pub wcsc_total: usize,
    pub nontrivial: usize,
    pub trivial: usize,
    pub nontrivial_orbits: usize,
    pub expected_orbits: Option<usize>,
    pub automorphism_group_order: Option<usize>,
    pub nontrivial_orbits_full_group: Option<usize>,
    pub trees: usize,
    pub uniqueness_violations: Vec<RemarkViolation>,
    pub pass: bool,
}

/// Orbit counts the computer experiment on the cube cycles reports.
pub fn expected_cube_orbits(n: usize) -> Option<usize> {
    match n {
        9 => Some(61),
        10 => Some(104),
        _ => None,
    }
}

/// WCSC subgraphs of `C_n^3`, nontrivial meaning the triangle-filled complex
/// has vanishing first homology, their rotation orbits, and for every tree
/// rooted at `v_0` the number of nontrivial subgraphs containing it.
pub fn verify_cube_remark(n: usize, opts: RemarkOptions) -> Result<CubeRemarkReport> {
    let g = CyclePowerGraph::new(n, 3)?;
    let all = enumerate_wcsc(
        &g,
        EnumerateOptions {
            force: true,
            parallel: opts.parallel,
        },
    )?;
    let nontrivial: Vec<EdgeSet> = if opts.parallel {
        all.par_iter()
            .copied()
            .filter(|s| homology_trivial(&g, s))
            .collect()
    } else {
        all.iter()
            .copied()
            .filter(|s| homology_trivial(&g, s))
            .collect()
    };
    let nontrivial_orbits = orbit_count(&g, &nontrivial, &SymmetryGroup::Rotations);
    let (automorphism_group_order, nontrivial_orbits_full_group) = if opts.full_automorphisms {
        let group = SymmetryGroup::full(&g);
        let order = match &group {
            SymmetryGroup::Permutations(p) => p.len(),
            SymmetryGroup::Rotations => n,
        };
        (Some(order), Some(orbit_count(&g, &nontrivial, &group)))
    } else {
        (None, None)
    };

    let masks: Vec<u128> = nontrivial.iter().map(|s| s.bits()).collect();
    let trees: Vec<Arborescence> = enumerate_arborescences(&g, 0).collect();
    let check = |t: &Arborescence| -> Option<RemarkViolation> {
        let bits = t.edges.bits();
        let mut hits = 0;
        for &m in &masks {
            if bits & !m == 0 {
                hits += 1;
                if hits == 2 {
                    break;
                }
            }
        }
        (hits != 1).then(|| RemarkViolation {
            tree: pairs(&t.edges),
            containers: hits,
        })
    };
    let uniqueness_violations: Vec<RemarkViolation> = if opts.parallel {
        trees.par_iter().filter_map(check).collect()
    } else {
        trees.iter().filter_map(check).collect()
    };

    let expected_orbits = expected_cube_orbits(n);
    let pass =
        uniqueness_violations.is_empty() && expected_orbits.is_none_or(|e| e == nontrivial_orbits);
    Ok(CubeRemarkReport {
        n,
        wcsc_total: all.len(),
        nontrivial: nontrivial.len(),
        trivial: all.len() - nontrivial.len(),
        nontrivial_orbits,
        expected_orbits,
        automorphism_group_order,
        nontrivial_orbits_full_group,
        trees: trees.len(),
        uniqueness_violations,
        pass,
    })
}
