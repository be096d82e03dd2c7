//! Weakly connected spanning closed (WCSC) subgraphs.
//!
//! A subgraph is closed when every triangle meets it in at most one edge or lies
//! inside it. For the square cycle the nontrivial WCSC subgraphs are the strips
//! with tails `S(n,k,j)`: the full edge set minus the escape route
//! `{f_{j-2}, f_{j+2k-1}} ∪ {e_{j-1}, .., e_{j+2k-1}}`.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CyclePowerGraph, EdgeSet};

/// Default bound on `n * power` for [`enumerate_wcsc`].
pub const WCSC_EDGE_GUARD: usize = 36;

/// Parameters `(k, j)` of a strip with tails: tail half-length and anchor vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StripParams {
    pub k: usize,
    pub j: usize,
}

impl StripParams {
    pub fn new(k: usize, j: usize) -> Self {
        StripParams { k, j }
    }

    /// Largest admissible `k`, `ceil((n - 2) / 2)`.
    pub fn max_k(n: usize) -> usize {
        (n - 1) / 2
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 5 {
            return Err(Error::Parameter(format!(
                "strips with tails need n >= 5, got {n}"
            )));
        }
        if self.j >= n || self.k > Self::max_k(n) {
            return Err(Error::Parameter(format!(
                "strip params (k={}, j={}) out of range for n={n} (k <= {}, j < {n})",
                self.k,
                self.j,
                Self::max_k(n)
            )));
        }
        Ok(())
    }

    /// Every admissible pair for `n`, ordered by `k` then `j`.
    pub fn all(n: usize) -> impl Iterator<Item = StripParams> {
        (0..=Self::max_k(n)).flat_map(move |k| (0..n).map(move |j| StripParams { k, j }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotWcscReason {
    NotClosed,
    NotWeaklyConnected,
    /// Closed and weakly connected but matches no known family.
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum WcscClass {
    TrivialFull,
    TrivialAllWindows,
    Strip(StripParams),
    NotWcsc { reason: NotWcscReason },
}

fn square_index(n: usize, i: i64, jump: usize) -> usize {
    (i.rem_euclid(n as i64) as usize) * 2 + jump - 1
}

/// Escape route `ES(n, k, j)` as an edge set of `C_n^2`. Listed edges that
/// coincide mod `n` collapse.
pub fn escape_route(n: usize, params: StripParams) -> Result<EdgeSet> {
    params.validate(n)?;
    let (j, k) = (params.j as i64, params.k as i64);
    let mut idx = vec![square_index(n, j - 2, 2), square_index(n, j + 2 * k - 1, 2)];
    idx.extend((j - 1..=j + 2 * k - 1).map(|i| square_index(n, i, 1)));
    EdgeSet::from_indices(n, 2, idx)
}

/// The strip with tails `S(n, k, j)`.
pub fn strip_with_tails(n: usize, params: StripParams) -> Result<EdgeSet> {
    Ok(escape_route(n, params)?.complement())
}

/// Number of edges the escape route lists before duplicates collapse.
pub fn escape_route_listed_len(params: StripParams) -> usize {
    2 * params.k + 3
}

pub fn is_closed(g: &CyclePowerGraph, s: &EdgeSet) -> bool {
    assert!(g.belongs(s));
    closed_bits(g, s.bits())
}

fn closed_bits(g: &CyclePowerGraph, bits: u128) -> bool {
    g.triangles().iter().all(|t| {
        let c = (t.mask() & bits).count_ones();
        c <= 1 || c == 3
    })
}

/// Least closed superset of `s`.
pub fn closure(g: &CyclePowerGraph, s: &EdgeSet) -> EdgeSet {
    closure_trace(g, s).0
}

/// Closure together with the edges it added, in order. Triangles are scanned
/// in id order, repeating until no triangle meets the set in exactly two edges.
pub fn closure_trace(g: &CyclePowerGraph, s: &EdgeSet) -> (EdgeSet, Vec<usize>) {
    assert!(g.belongs(s));
    let mut bits = s.bits();
    let mut added = Vec::new();
    loop {
        let mut changed = false;
        for t in g.triangles() {
            let m = t.mask();
            if (m & bits).count_ones() == 2 {
                let missing = (m & !bits).trailing_zeros() as usize;
                bits |= 1u128 << missing;
                added.push(missing);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (EdgeSet::from_bits_unchecked(g.n(), g.power(), bits), added)
}

/// Closure applying triangles in the given order of ids; used to check that
/// the result does not depend on the order.
pub fn closure_in_order(g: &CyclePowerGraph, s: &EdgeSet, order: &[usize]) -> EdgeSet {
    let mut bits = s.bits();
    loop {
        let mut changed = false;
        for &id in order {
            let m = g.triangles()[id].mask();
            if (m & bits).count_ones() == 2 {
                bits |= m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    EdgeSet::from_bits_unchecked(g.n(), g.power(), bits)
}

pub fn is_wcsc(g: &CyclePowerGraph, s: &EdgeSet) -> bool {
    is_closed(g, s) && g.is_weakly_connected(s)
}

/// Options for [`enumerate_wcsc`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Bypass [`WCSC_EDGE_GUARD`].
    pub force: bool,
    /// Run the branches of the search tree on the rayon pool.
    pub parallel: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            force: false,
            parallel: true,
        }
    }
}

struct Search<'a> {
    g: &'a CyclePowerGraph,
    full: u128,
    /// Triangle masks containing each edge.
    edge_tris: Vec<Vec<u128>>,
}

#[derive(Clone, Copy)]
struct State {
    inside: u128,
    outside: u128,
}

impl<'a> Search<'a> {
    fn new(g: &'a CyclePowerGraph) -> Self {
        let edge_tris = (0..g.edge_count())
            .map(|e| {
                g.triangles_of_edge(e)
                    .iter()
                    .map(|&t| g.triangles()[t].mask())
                    .collect()
            })
            .collect();
        Search {
            g,
            full: g.full_set().bits(),
            edge_tris,
        }
    }

    /// Decides `edge` and propagates triangle constraints. `None` on conflict or
    /// when the undecided-or-inside edges can no longer connect every vertex.
    fn assign(&self, mut st: State, edge: usize, include: bool) -> Option<State> {
        let mut queue = [0usize; 128];
        let (mut head, mut tail) = (0, 0);
        let bit = 1u128 << edge;
        if include {
            st.inside |= bit;
        } else {
            st.outside |= bit;
        }
        queue[tail] = edge;
        tail += 1;
        while head < tail {
            let e = queue[head];
            head += 1;
            for &m in &self.edge_tris[e] {
                let ins = (m & st.inside).count_ones();
                let outs = (m & st.outside).count_ones();
                let free = m & !st.inside & !st.outside;
                if outs > 0 {
                    if ins >= 2 {
                        return None;
                    }
                    if ins == 1 && free != 0 {
                        st.outside |= free;
                        let mut f = free;
                        while f != 0 {
                            queue[tail] = f.trailing_zeros() as usize;
                            tail += 1;
                            f &= f - 1;
                        }
                    }
                } else if ins == 2 && free != 0 {
                    st.inside |= free;
                    queue[tail] = free.trailing_zeros() as usize;
                    tail += 1;
                }
            }
        }
        if self.g.weakly_connected_bits(self.full & !st.outside) {
            Some(st)
        } else {
            None
        }
    }

    fn next_free(&self, st: &State) -> Option<usize> {
        let free = self.full & !st.inside & !st.outside;
        (free != 0).then(|| free.trailing_zeros() as usize)
    }

    fn run(&self, st: State, out: &mut Vec<u128>) {
        match self.next_free(&st) {
            None => {
                if self.g.weakly_connected_bits(st.inside) {
                    out.push(st.inside);
                }
            }
            Some(e) => {
                if let Some(s) = self.assign(st, e, true) {
                    self.run(s, out);
                }
                if let Some(s) = self.assign(st, e, false) {
                    self.run(s, out);
                }
            }
        }
    }

    /// Open states after `depth` branching decisions, plus completed leaves.
    fn frontier(&self, st: State, depth: usize, open: &mut Vec<State>, done: &mut Vec<u128>) {
        if depth == 0 {
            open.push(st);
            return;
        }
        match self.next_free(&st) {
            None => {
                if self.g.weakly_connected_bits(st.inside) {
                    done.push(st.inside);
                }
            }
            Some(e) => {
                for include in [true, false] {
                    if let Some(s) = self.assign(st, e, include) {
                        self.frontier(s, depth - 1, open, done);
                    }
                }
            }
        }
    }
}

/// Every WCSC subgraph of `g`, sorted by bit pattern.
///
/// Depth-first in/out decisions over edge indices with triangle propagation:
/// two edges in and one out is a conflict, two in forces the third in, and one
/// in plus one out forces the third out. Branches whose remaining edges cannot
/// connect all vertices are cut; leaves get a final weak-connectivity test.
pub fn enumerate_wcsc(g: &CyclePowerGraph, opts: EnumerateOptions) -> Result<Vec<EdgeSet>> {
    if !opts.force && g.edge_count() > WCSC_EDGE_GUARD {
        return Err(Error::SizeGuard {
            what: "WCSC enumeration edges",
            limit: WCSC_EDGE_GUARD,
            got: g.edge_count(),
        });
    }
    let search = Search::new(g);
    let start = State {
        inside: 0,
        outside: 0,
    };
    let mut found = Vec::new();
    if opts.parallel && g.edge_count() > 16 {
        let mut open = Vec::new();
        search.frontier(start, 12, &mut open, &mut found);
        let rest: Vec<u128> = open
            .into_par_iter()
            .flat_map_iter(|st| {
                let mut local = Vec::new();
                search.run(st, &mut local);
                local
            })
            .collect();
        found.extend(rest);
    } else {
        search.run(start, &mut found);
    }
    found.sort_unstable();
    found.dedup();
    Ok(found
        .into_iter()
        .map(|b| EdgeSet::from_bits_unchecked(g.n(), g.power(), b))
        .collect())
}

/// The trivial WCSC subgraphs of the square cycle: the full graph, and for odd
/// `n` the all-windows cycle.
pub fn trivial_subgraphs(g: &CyclePowerGraph) -> Vec<EdgeSet> {
    let mut v = vec![g.full_set()];
    if g.power() == 2 && g.n() % 2 == 1 {
        v.push(g.jump_class(2));
    }
    v
}

/// Classifies a subgraph of the square cycle. `(k, j)` is read off the run of
/// missing frames (or the single missing window when no frame is present) and
/// then confirmed by rebuilding the strip.
pub fn classify(g: &CyclePowerGraph, s: &EdgeSet) -> WcscClass {
    assert_eq!(
        g.power(),
        2,
        "classification is defined for the square cycle"
    );
    let n = g.n();
    if *s == g.full_set() {
        return WcscClass::TrivialFull;
    }
    if !is_closed(g, s) {
        return WcscClass::NotWcsc {
            reason: NotWcscReason::NotClosed,
        };
    }
    if !g.is_weakly_connected(s) {
        return WcscClass::NotWcsc {
            reason: NotWcscReason::NotWeaklyConnected,
        };
    }
    let windows = g.jump_class(2);
    if n % 2 == 1 && *s == windows {
        return WcscClass::TrivialAllWindows;
    }
    let unclassified = WcscClass::NotWcsc {
        reason: NotWcscReason::Unclassified,
    };
    let has_frame = |i: i64| s.contains(g.frame(i));
    let candidate = if (0..n as i64).all(|i| !has_frame(i)) {
        if n.is_multiple_of(2) {
            return unclassified;
        }
        let missing: Vec<usize> = windows.difference(s).indices().map(|e| g.tail(e)).collect();
        match missing[..] {
            [m] => StripParams::new(StripParams::max_k(n), (m + 2) % n),
            _ => return unclassified,
        }
    } else {
        let Some(start) = (0..n as i64).find(|&a| !has_frame(a) && has_frame(a - 1)) else {
            return unclassified;
        };
        let run = (0..n as i64).take_while(|&d| !has_frame(start + d)).count();
        if run % 2 == 0 {
            return unclassified;
        }
        StripParams::new((run - 1) / 2, ((start + 1) as usize) % n)
    };
    match strip_with_tails(n, candidate) {
        Ok(strip) if strip == *s => WcscClass::Strip(candidate),
        _ => unclassified,
    }
}

/// Which 3-cycles fill the 2-complex used by [`homology_trivial_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleFill {
    /// The graph's composable triangles (two short edges and their composite).
    Composable,
    /// Every 3-cycle of the underlying undirected graph, whatever its orientation.
    AllThreeCycles,
}

/// Signed boundary columns of the filling triangles contained in `s`.
fn filling_cycles(g: &CyclePowerGraph, s: &EdgeSet, fill: TriangleFill) -> Vec<[(usize, i64); 3]> {
    let mut cols = Vec::new();
    match fill {
        TriangleFill::Composable => {
            for t in g.triangles() {
                if t.mask() & !s.bits() == 0 {
                    let [a, b, l] = t.members;
                    cols.push([(a, 1), (b, 1), (l, -1)]);
                }
            }
        }
        TriangleFill::AllThreeCycles => {
            // Walk u -> v -> w -> u in the undirected sense, orienting each arc as traversed.
            let n = g.n();
            let arc = |x: usize, y: usize| -> Option<(usize, i64)> {
                let d = (y + n - x) % n;
                if (1..=g.power()).contains(&d) {
                    let e = g.edge_index(x as i64, d);
                    s.contains(e).then_some((e, 1))
                } else {
                    let d = (x + n - y) % n;
                    if (1..=g.power()).contains(&d) {
                        let e = g.edge_index(y as i64, d);
                        s.contains(e).then_some((e, -1))
                    } else {
                        None
                    }
                }
            };
            for u in 0..n {
                for v in u + 1..n {
                    for w in v + 1..n {
                        if let (Some(a), Some(b), Some(c)) = (arc(u, v), arc(v, w), arc(w, u)) {
                            cols.push([a, b, c]);
                        }
                    }
                }
            }
        }
    }
    cols
}

/// Rank over the rationals of an integer matrix, by fraction-free elimination.
pub fn integer_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&a[r][cc] * &a[rank][c] - &a[r][c] * &a[rank][cc]) / &prev;
                a[r][cc] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank of the triangle boundary map and the cyclomatic number of `s`.
pub fn homology_ranks(g: &CyclePowerGraph, s: &EdgeSet, fill: TriangleFill) -> (usize, usize) {
    assert!(g.belongs(s));
    let cyclomatic = s.len() + components(g, s) - g.n();
    let cols = filling_cycles(g, s, fill);
    if cols.is_empty() {
        return (0, cyclomatic);
    }
    let edges: Vec<usize> = s.indices().collect();
    let row_of = |e: usize| edges.binary_search(&e).expect("edge in set");
    let mut m = vec![vec![BigInt::zero(); cols.len()]; edges.len()];
    for (c, col) in cols.iter().enumerate() {
        for &(e, sign) in col {
            m[row_of(e)][c] += sign;
        }
    }
    (integer_rank(m), cyclomatic)
}

fn components(g: &CyclePowerGraph, s: &EdgeSet) -> usize {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for e in s.indices() {
        let (a, b) = (find(&mut parent, g.tail(e)), find(&mut parent, g.head(e)));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// First homology of the triangle-filled complex vanishes: the boundaries of
/// the contained triangles span the whole cycle space of `s`.
pub fn homology_trivial(g: &CyclePowerGraph, s: &EdgeSet) -> bool {
    homology_trivial_with(g, s, TriangleFill::Composable)
}

pub fn homology_trivial_with(g: &CyclePowerGraph, s: &EdgeSet, fill: TriangleFill) -> bool {
    let (rank, cyclomatic) = homology_ranks(g, s, fill);
    rank == cyclomatic
}

/// If `{e_{k-1}, f_k, f_{k+2}, .., f_{k+2p-2}, e_{k+2p}}` lies in `s`, then so
/// do the frames `e_k, .., e_{k+2p-1}`.
pub fn frame_forcing_check(g: &CyclePowerGraph, s: &EdgeSet, k: i64, p: usize) -> bool {
    assert_eq!(g.power(), 2);
    let p = p as i64;
    let premise = s.contains(g.frame(k - 1))
        && s.contains(g.frame(k + 2 * p))
        && (0..p).all(|q| s.contains(g.window(k + 2 * q)));
    !premise || (k..k + 2 * p).all(|i| s.contains(g.frame(i)))
}

/// Symmetry group used when counting orbits.
#[derive(Clone, Debug)]
pub enum SymmetryGroup {
    Rotations,
    /// Edge permutations, e.g. from [`CyclePowerGraph::automorphisms`].
    Permutations(Vec<Vec<usize>>),
}

impl SymmetryGroup {
    pub fn full(g: &CyclePowerGraph) -> Self {
        SymmetryGroup::Permutations(g.automorphisms())
    }

    pub fn canonical(&self, g: &CyclePowerGraph, s: &EdgeSet) -> EdgeSet {
        match self {
            SymmetryGroup::Rotations => g.canonical_form(s),
            SymmetryGroup::Permutations(perms) => perms
                .iter()
                .map(|p| g.apply_edge_permutation(s, p))
                .min()
                .unwrap_or(*s),
        }
    }
}

/// Canonical orbit representatives of `sets`, sorted.
pub fn orbit_representatives(
    g: &CyclePowerGraph,
    sets: &[EdgeSet],
    group: &SymmetryGroup,
) -> Vec<EdgeSet> {
    let mut reps: Vec<EdgeSet> = sets.iter().map(|s| group.canonical(g, s)).collect();
    reps.sort_unstable();
    reps.dedup();
    reps
}

pub fn orbit_count(g: &CyclePowerGraph, sets: &[EdgeSet], group: &SymmetryGroup) -> usize {
    orbit_representatives(g, sets, group).len()
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyEntry {
    pub k: usize,
    pub j: usize,
    pub edges: Vec<[usize; 2]>,
}

/// JSON report of a WCSC enumeration.
#[derive(Clone, Debug, Serialize)]
pub struct WcscReport {
    pub n: usize,
    pub power: usize,
    pub trivial: Vec<Vec<[usize; 2]>>,
    pub nontrivial_count: usize,
    pub orbits: usize,
    pub families: Vec<FamilyEntry>,
}

fn pairs(s: &EdgeSet) -> Vec<[usize; 2]> {
    s.edges().iter().map(|e| [e.tail, e.jump]).collect()
}

/// Splits an enumeration into trivial and nontrivial parts. For the square
/// cycle nontrivial members are labelled by their strip parameters; for other
/// powers triviality is decided by [`homology_trivial`].
pub fn wcsc_report(g: &CyclePowerGraph, all: &[EdgeSet]) -> WcscReport {
    let mut trivial = Vec::new();
    let mut nontrivial = Vec::new();
    let mut families = Vec::new();
    for s in all {
        if g.power() == 2 {
            match classify(g, s) {
                WcscClass::Strip(p) => {
                    nontrivial.push(*s);
                    families.push(FamilyEntry {
                        k: p.k,
                        j: p.j,
                        edges: pairs(s),
                    });
                }
                _ => trivial.push(pairs(s)),
            }
        } else if homology_trivial(g, s) {
            nontrivial.push(*s);
        } else {
            trivial.push(pairs(s));
        }
    }
    families.sort_by_key(|f| (f.k, f.j));
    WcscReport {
        n: g.n(),
        power: g.power(),
        trivial,
        nontrivial_count: nontrivial.len(),
        orbits: orbit_count(g, &nontrivial, &SymmetryGroup::Rotations),
        families,
    }
}

/// Exhaustive scan of all `2^|E|` subsets; the oracle for [`enumerate_wcsc`].
pub fn enumerate_wcsc_raw(g: &CyclePowerGraph) -> Result<Vec<EdgeSet>> {
    const RAW_GUARD: usize = 24;
    let m = g.edge_count();
    if m > RAW_GUARD {
        return Err(Error::SizeGuard {
            what: "raw subset scan edges",
            limit: RAW_GUARD,
            got: m,
        });
    }
    let found: Vec<u128> = (0u64..1 << m)
        .into_par_iter()
        .map(|b| b as u128)
        .filter(|&b| closed_bits(g, b) && g.weakly_connected_bits(b))
        .collect();
    Ok(found
        .into_iter()
        .map(|b| EdgeSet::from_bits_unchecked(g.n(), g.power(), b))
        .collect())
}

/// Enumerated WCSC subgraphs of the square cycle against the classified families.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub enumerated: usize,
    pub expected: usize,
    pub missing: Vec<Vec<[usize; 2]>>,
    pub unexpected: Vec<Vec<[usize; 2]>>,
    /// Size of the raw subset scan, when run.
    pub raw_oracle: Option<usize>,
    pub raw_oracle_agrees: Option<bool>,
    pub families_distinct: bool,
    pub report: WcscReport,
    pub pass: bool,
}

/// Compares [`enumerate_wcsc`] on `C_n^2` with the trivial subgraphs plus every
/// strip with tails, and optionally with the raw scan.
pub fn verify_classification(
    n: usize,
    raw_oracle: bool,
    opts: EnumerateOptions,
) -> Result<ClassificationReport> {
    let g = CyclePowerGraph::new(n, 2)?;
    let found = enumerate_wcsc(&g, opts)?;
    let strips: Vec<EdgeSet> = StripParams::all(n)
        .map(|p| strip_with_tails(n, p))
        .collect::<Result<_>>()?;
    let mut expected: Vec<EdgeSet> = trivial_subgraphs(&g)
        .into_iter()
        .chain(strips.iter().copied())
        .collect();
    expected.sort_unstable();
    expected.dedup();
    let families_distinct = {
        let mut s = strips.clone();
        s.sort_unstable();
        s.dedup();
        s.len() == strips.len()
    };
    let missing: Vec<_> = expected
        .iter()
        .filter(|s| found.binary_search(s).is_err())
        .map(pairs)
        .collect();
    let unexpected: Vec<_> = found
        .iter()
        .filter(|s| expected.binary_search(s).is_err())
        .map(pairs)
        .collect();
    let (raw_count, raw_agrees) = if raw_oracle {
        let raw = enumerate_wcsc_raw(&g)?;
        (Some(raw.len()), Some(raw == found))
    } else {
        (None, None)
    };
    let pass = missing.is_empty() && unexpected.is_empty() && raw_agrees != Some(false);
    Ok(ClassificationReport {
        n,
        enumerated: found.len(),
        expected: expected.len(),
        missing,
        unexpected,
        raw_oracle: raw_count,
        raw_oracle_agrees: raw_agrees,
        families_distinct,
        report: wcsc_report(&g, &found),
        pass,
    })
}
