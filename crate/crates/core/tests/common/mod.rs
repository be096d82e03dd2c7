//! Checks shared by the `properties` and `acceptance` targets. Each returns a
//! short summary on success and the first discrepancy on failure.

#![allow(dead_code)]

use cyclepow::arborescence::{count_within_det, enumerate_arborescences_within, InArcAssignments};
use cyclepow::decomposition::{expected_cube_orbits, PartitionOptions, RemarkOptions};
use cyclepow::jacobsthal::{partial_sum_identity_check, partial_sum_literal_check};
use cyclepow::wcsc::{
    self, closure_in_order, frame_forcing_check, is_wcsc, trivial_subgraphs, verify_classification,
    EnumerateOptions, NotWcscReason,
};
use cyclepow::{
    count_arborescences_det, count_square_cycle, count_strip, count_strip_with_tails,
    enumerate_arborescences, is_arborescence, jacobsthal, spectral_product, verify_cube_remark,
    verify_partition, CyclePowerGraph, Digraph, EdgeSet, StripParams, WcscClass,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub type Check = Result<String, String>;

pub fn graph(n: usize, p: usize) -> CyclePowerGraph {
    CyclePowerGraph::new(n, p).expect("valid parameters")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Enumeration, determinant and `J_n` agree for every n in the range, and every
/// yielded tree passes the direct check.
pub fn tree_counts(ns: std::ops::RangeInclusive<usize>) -> Check {
    for n in ns.clone() {
        let g = graph(n, 2);
        let mut listed = 0usize;
        for t in enumerate_arborescences(&g, 0) {
            ensure(is_arborescence(&g, &t.edges, 0), || {
                format!("n={n}: yielded non-tree {:?}", t.edges)
            })?;
            listed += 1;
        }
        let det = count_arborescences_det(&Digraph::from_edge_set(&g, &g.full_set()).0, 0);
        let j = jacobsthal(n);
        ensure(BigInt::from(listed) == det && det == j, || {
            format!("n={n}: enum {listed}, det {det}, J {j}")
        })?;
    }
    Ok(format!("n={}..{} enum = det = J_n", ns.start(), ns.end()))
}

/// Largest relative error of the spectral product against `J_n`.
pub fn spectral(ns: std::ops::RangeInclusive<usize>, tol: f64) -> Check {
    let mut worst = 0f64;
    for n in ns.clone() {
        let s = spectral_product(n).map_err(|e| format!("n={n}: {e}"))?;
        let j: f64 = jacobsthal(n).to_string().parse().expect("finite");
        let rel = ((s - j) / j).abs();
        ensure(rel < tol, || {
            format!("n={n}: spectral {s}, J {j}, rel {rel:e}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "n={}..{} max rel err {worst:.1e}",
        ns.start(),
        ns.end()
    ))
}

pub fn classification(ns: std::ops::RangeInclusive<usize>, raw_up_to: usize) -> Check {
    let mut total = 0;
    for n in ns.clone() {
        let r = verify_classification(n, n <= raw_up_to, EnumerateOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(r.pass && r.families_distinct, || {
            format!(
                "n={n}: enumerated {}, expected {}, missing {:?}, unexpected {:?}, raw {:?}",
                r.enumerated, r.expected, r.missing, r.unexpected, r.raw_oracle
            )
        })?;
        total += r.enumerated;
    }
    Ok(format!(
        "n={}..{} {total} WCSC match families, raw scan to n={raw_up_to}",
        ns.start(),
        ns.end()
    ))
}

/// Partition over every root, plus the parity form of the bucket sum.
pub fn partition(ns: std::ops::RangeInclusive<usize>) -> Check {
    let mut trees = BigInt::from(0);
    for n in ns.clone() {
        for root in 0..n {
            let r = verify_partition(n, root, PartitionOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(r.pass && r.uniqueness_violations.is_empty(), || {
                format!(
                    "n={n} root={root}: buckets {:?} expected {:?}",
                    r.buckets, r.expected_buckets
                )
            })?;
            let sum: BigInt = r.buckets.values().sum();
            let split: BigInt = if n % 2 == 0 {
                (0..n).map(jacobsthal).sum()
            } else {
                BigInt::from(1) + (1..n).map(jacobsthal).sum::<BigInt>()
            };
            ensure(sum == split && sum == jacobsthal(n), || {
                format!("n={n}: bucket sum {sum}, parity form {split}")
            })?;
            trees += r.total;
        }
    }
    Ok(format!(
        "n={}..{} all roots, {trees} trees, 0 violations",
        ns.start(),
        ns.end()
    ))
}

pub fn partition_example() -> Check {
    let r = verify_partition(5, 0, PartitionOptions::default()).map_err(|e| e.to_string())?;
    let got: Vec<String> = r.buckets.values().map(|b| b.to_string()).collect();
    ensure(got == ["8", "2", "1"], || format!("n=5 buckets {got:?}"))?;
    Ok("n=5 buckets {8, 2, 1}".into())
}

pub fn strip_counts(ms: std::ops::RangeInclusive<usize>) -> Check {
    for m in ms.clone() {
        let listed = InArcAssignments::new(&Digraph::strip(m), 0).count();
        let formula = count_strip(m).map_err(|e| e.to_string())?;
        ensure(BigInt::from(listed) == formula, || {
            format!("S_{m}: enum {listed}, formula {formula}")
        })?;
    }
    Ok(format!("S_m for m={}..{}", ms.start(), ms.end()))
}

pub fn tail_counts(ns: std::ops::RangeInclusive<usize>) -> Check {
    let mut strips = 0;
    for n in ns.clone() {
        let g = graph(n, 2);
        for p in StripParams::all(n) {
            let s = wcsc::strip_with_tails(n, p).map_err(|e| e.to_string())?;
            let listed = enumerate_arborescences_within(&g, &s, p.j).count();
            let formula = count_strip_with_tails(n, p).map_err(|e| e.to_string())?;
            ensure(BigInt::from(listed) == formula, || {
                format!(
                    "S_(n={n},k={},j={}): enum {listed}, formula {formula}",
                    p.k, p.j
                )
            })?;
            strips += 1;
        }
    }
    Ok(format!(
        "{strips} strips with tails for n={}..{}",
        ns.start(),
        ns.end()
    ))
}

pub fn partial_sums(ms: std::ops::RangeInclusive<usize>) -> Check {
    for m in ms.clone() {
        ensure(partial_sum_identity_check(m), || {
            format!("m={m}: identity fails")
        })?;
    }
    Ok(format!("m={}..{}", ms.start(), ms.end()))
}

/// Searches contiguous bounds `sum_{i=a}^{m+c} J_i = (J_{m+1} - (-1)^m) / 2`.
/// Returns the `(a, c)` pairs that hold for every m in `ms`.
pub fn partial_sum_bound_search(ms: std::ops::RangeInclusive<usize>) -> Vec<(usize, i64)> {
    let mut hits = Vec::new();
    for a in 0..=2usize {
        for c in -3..=1i64 {
            let holds = ms.clone().all(|m| {
                let hi = m as i64 + c;
                let lhs: BigInt = (a as i64..=hi).map(|i| jacobsthal(i as usize)).sum();
                let sign = if m % 2 == 0 { 1 } else { -1 };
                lhs * 2 == jacobsthal(m + 1) - sign
            });
            if holds {
                hits.push((a, c));
            }
        }
    }
    hits
}

pub fn cube_remark() -> Check {
    let mut parts = Vec::new();
    for n in [9, 10] {
        let r = verify_cube_remark(n, RemarkOptions::default()).map_err(|e| e.to_string())?;
        let expected = expected_cube_orbits(n).expect("pinned");
        ensure(
            r.pass && r.nontrivial_orbits == expected && r.uniqueness_violations.is_empty(),
            || format!("n={n}: {}", serde_json::to_string(&r).unwrap_or_default()),
        )?;
        parts.push(format!(
            "n={n}: {} orbits over {} trees",
            r.nontrivial_orbits, r.trees
        ));
    }
    Ok(parts.join(", "))
}

/// `(n, power, sets, shuffled triangle order)` with mixed edge densities.
fn random_sets() -> impl Strategy<Value = (usize, usize, u128, u128, Vec<usize>)> {
    (5usize..=12, 2usize..=3, 1usize..=3).prop_flat_map(|(n, p, density)| {
        let n = if p == 3 { n.max(7) } else { n };
        let t = graph(n, p).triangles().len();
        let mask = if n * p == 128 {
            u128::MAX
        } else {
            (1u128 << (n * p)) - 1
        };
        let word = move || {
            prop::collection::vec(any::<u128>(), density)
                .prop_map(move |w| w.into_iter().fold(mask, |a, b| a & b))
        };
        (
            Just(n),
            Just(p),
            word(),
            word(),
            Just((0..t).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())?;
    Ok(format!("{cases} cases"))
}

/// Idempotent, extensive, monotone and independent of triangle order.
pub fn closure_laws(cases: u32) -> Check {
    run(cases, random_sets(), |(n, p, a, b, order)| {
        let g = graph(n, p);
        let s = EdgeSet::from_bits(n, p, a).unwrap();
        let bigger = EdgeSet::from_bits(n, p, a | b).unwrap();
        let c = wcsc::closure(&g, &s);
        prop_assert!(wcsc::is_closed(&g, &c));
        prop_assert_eq!(wcsc::closure(&g, &c), c);
        prop_assert!(s.is_subset(&c));
        prop_assert!(c.is_subset(&wcsc::closure(&g, &bigger)));
        prop_assert_eq!(closure_in_order(&g, &s, &order), c);
        Ok(())
    })
}

/// Every predicate and the closure commute with rotation.
pub fn rotation_equivariance(cases: u32) -> Check {
    let strategy = random_sets().prop_flat_map(|v| {
        let n = v.0;
        (Just(v), 0..n, 0..n)
    });
    run(cases, strategy, |((n, p, a, _, _), shift, root)| {
        let g = graph(n, p);
        let s = EdgeSet::from_bits(n, p, a).unwrap();
        let r = g.rotate(&s, shift);
        prop_assert_eq!(wcsc::is_closed(&g, &s), wcsc::is_closed(&g, &r));
        prop_assert_eq!(g.is_weakly_connected(&s), g.is_weakly_connected(&r));
        prop_assert_eq!(g.is_spanning(&s), g.is_spanning(&r));
        prop_assert_eq!(is_wcsc(&g, &s), is_wcsc(&g, &r));
        prop_assert_eq!(
            wcsc::homology_trivial(&g, &s),
            wcsc::homology_trivial(&g, &r)
        );
        prop_assert_eq!(
            g.rotate(&wcsc::closure(&g, &s), shift),
            wcsc::closure(&g, &r)
        );
        prop_assert_eq!(g.canonical_form(&s), g.canonical_form(&r));
        prop_assert_eq!(
            is_arborescence(&g, &s, root),
            is_arborescence(&g, &r, (root + shift) % n)
        );
        if p == 2 {
            let rotated = match wcsc::classify(&g, &s) {
                WcscClass::Strip(q) => WcscClass::Strip(StripParams::new(q.k, (q.j + shift) % n)),
                other => other,
            };
            prop_assert_eq!(rotated, wcsc::classify(&g, &r));
        }
        Ok(())
    })
}

/// Rotation equivariance on sampled trees, which random sets almost never hit.
pub fn tree_rotation(n: usize) -> Check {
    let g = graph(n, 2);
    for (i, t) in enumerate_arborescences(&g, 0).enumerate().step_by(7) {
        for shift in 0..n {
            ensure(
                is_arborescence(&g, &g.rotate(&t.edges, shift), shift),
                || format!("tree {i} rotated by {shift}"),
            )?;
        }
    }
    Ok(format!("trees of C_{n} under all rotations"))
}

/// The determinant over a random sub-edge-set equals the number of trees inside it.
pub fn restriction_consistency(cases: u32) -> Check {
    let strategy = (5usize..=8).prop_flat_map(|n| (Just(n), 0..n, any::<u32>(), any::<u32>()));
    run(cases, strategy, |(n, root, a, b)| {
        let g = graph(n, 2);
        let bits = (a as u128 | b as u128) & ((1u128 << (2 * n)) - 1);
        let s = EdgeSet::from_bits(n, 2, bits).unwrap();
        let filtered = enumerate_arborescences(&g, root)
            .filter(|t| t.edges.is_subset(&s))
            .count();
        prop_assert_eq!(BigInt::from(filtered), count_within_det(&g, &s, root));
        prop_assert_eq!(
            filtered,
            enumerate_arborescences_within(&g, &s, root).count()
        );
        Ok(())
    })
}

pub fn root_independence(ns: std::ops::RangeInclusive<usize>) -> Check {
    for n in ns.clone() {
        let g = graph(n, 2);
        let dg = Digraph::from_edge_set(&g, &g.full_set()).0;
        let first = count_arborescences_det(&dg, 0);
        for root in 1..n {
            let c = count_arborescences_det(&dg, root);
            ensure(c == first, || {
                format!("n={n}: root 0 gives {first}, root {root} gives {c}")
            })?;
        }
        if n <= 9 {
            let listed: Vec<usize> = (0..n)
                .map(|r| enumerate_arborescences(&g, r).count())
                .collect();
            ensure(listed.iter().all(|&c| BigInt::from(c) == first), || {
                format!("n={n}: {listed:?}")
            })?;
        }
    }
    Ok(format!("n={}..{}", ns.start(), ns.end()))
}

pub fn frame_forcing(ns: std::ops::RangeInclusive<usize>) -> Check {
    let mut checked = 0;
    for n in ns.clone() {
        let g = graph(n, 2);
        for s in wcsc::enumerate_wcsc(&g, EnumerateOptions::default()).map_err(|e| e.to_string())? {
            for k in 0..n as i64 {
                for p in 0..n {
                    ensure(frame_forcing_check(&g, &s, k, p), || {
                        format!("n={n} k={k} p={p}: {s:?}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} (S, k, p) triples for n={}..{}",
        ns.start(),
        ns.end()
    ))
}

/// WCSC subgraphs without frames exist only for odd n and are the all-windows
/// cycle or a strip with the largest k.
pub fn frameless(ns: std::ops::RangeInclusive<usize>) -> Check {
    for n in ns.clone() {
        let g = graph(n, 2);
        let frames = g.jump_class(1);
        for s in wcsc::enumerate_wcsc(&g, EnumerateOptions::default()).map_err(|e| e.to_string())? {
            if !s.intersection(&frames).is_empty() {
                continue;
            }
            ensure(n % 2 == 1, || {
                format!("n={n} even but frameless WCSC {s:?}")
            })?;
            let ok = match wcsc::classify(&g, &s) {
                WcscClass::TrivialAllWindows => true,
                WcscClass::Strip(p) => p.k == StripParams::max_k(n),
                _ => false,
            };
            ensure(ok, || {
                format!("n={n}: frameless {s:?} is neither all-windows nor a widest strip")
            })?;
        }
    }
    Ok(format!("n={}..{}", ns.start(), ns.end()))
}

/// Strips are closed, connected, spanning and homology trivial; the trivial
/// subgraphs are WCSC but not homology trivial.
pub fn family_properties(ns: std::ops::RangeInclusive<usize>) -> Check {
    for n in ns.clone() {
        let g = graph(n, 2);
        for p in StripParams::all(n) {
            let s = wcsc::strip_with_tails(n, p).map_err(|e| e.to_string())?;
            ensure(
                is_wcsc(&g, &s) && g.is_spanning(&s) && wcsc::homology_trivial(&g, &s),
                || format!("n={n} k={} j={}", p.k, p.j),
            )?;
            ensure(wcsc::classify(&g, &s) == WcscClass::Strip(p), || {
                format!("n={n}: classify {p:?}")
            })?;
        }
        for s in trivial_subgraphs(&g) {
            ensure(
                is_wcsc(&g, &s) && g.is_spanning(&s) && !wcsc::homology_trivial(&g, &s),
                || format!("n={n}: trivial {s:?}"),
            )?;
        }
        let mut broken = g.full_set();
        broken.remove(g.frame(0));
        ensure(
            wcsc::classify(&g, &broken)
                == WcscClass::NotWcsc {
                    reason: NotWcscReason::NotClosed,
                },
            || format!("n={n}: full minus e0"),
        )?;
    }
    Ok(format!("n={}..{}", ns.start(), ns.end()))
}

pub fn square_cycle_formula(ns: std::ops::RangeInclusive<usize>) -> Check {
    for n in ns.clone() {
        let g = graph(n, 2);
        let det = count_arborescences_det(&Digraph::from_edge_set(&g, &g.full_set()).0, 0);
        let f = count_square_cycle(n).map_err(|e| e.to_string())?;
        ensure(f == jacobsthal(n) && f == det, || {
            format!("n={n}: formula {f}, det {det}")
        })?;
    }
    Ok(format!("n={}..{}", ns.start(), ns.end()))
}

/// Literal identity holds for even m and fails for odd m.
pub fn literal_identity_parity(ms: std::ops::RangeInclusive<usize>) -> Check {
    for m in ms.clone() {
        ensure(partial_sum_literal_check(m) == (m % 2 == 0), || {
            format!("m={m}")
        })?;
    }
    Ok(format!("m={}..{}", ms.start(), ms.end()))
}
