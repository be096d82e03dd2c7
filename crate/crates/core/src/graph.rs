//! Directed cycle powers `Cay(Z_n, {1..p})`, their edge bit sets, triangles,
//! rotation symmetry and text export.
//!
//! Edge `(i, d)` runs from `v_i` to `v_{i+d mod n}` and has index `i*p + (d-1)`.
//! For the square (`p = 2`) the jump-1 edges are the frames `e_i` and the
//! jump-2 edges are the windows `f_i`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Edge sets are stored in one `u128`, so `n * power` may not exceed this.
pub const MAX_EDGES: usize = 128;

/// A directed edge `(tail, jump)` of a cycle power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub jump: usize,
}

/// A subgraph of a cycle power, as a bit vector over edge indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: usize,
    power: usize,
    bits: u128,
}

impl EdgeSet {
    pub fn empty(n: usize, power: usize) -> Self {
        EdgeSet { n, power, bits: 0 }
    }

    pub fn full(n: usize, power: usize) -> Self {
        EdgeSet {
            n,
            power,
            bits: width_mask(n * power),
        }
    }

    /// Builds a set from raw bits; bits at or above `n * power` are rejected.
    pub fn from_bits(n: usize, power: usize, bits: u128) -> Result<Self> {
        if bits & !width_mask(n * power) != 0 {
            return Err(Error::Parameter(format!(
                "bit pattern {bits:#x} exceeds {} edges",
                n * power
            )));
        }
        Ok(EdgeSet { n, power, bits })
    }

    pub(crate) fn from_bits_unchecked(n: usize, power: usize, bits: u128) -> Self {
        debug_assert_eq!(bits & !width_mask(n * power), 0);
        EdgeSet { n, power, bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        n: usize,
        power: usize,
        idx: I,
    ) -> Result<Self> {
        let mut s = EdgeSet::empty(n, power);
        for i in idx {
            if i >= n * power {
                return Err(Error::Parameter(format!(
                    "edge index {i} out of range for {} edges",
                    n * power
                )));
            }
            s.bits |= 1u128 << i;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx < self.n * self.power && self.bits >> idx & 1 == 1
    }

    pub fn insert(&mut self, idx: usize) {
        assert!(idx < self.n * self.power, "edge index {idx} out of range");
        self.bits |= 1u128 << idx;
    }

    pub fn remove(&mut self, idx: usize) {
        if idx < self.n * self.power {
            self.bits &= !(1u128 << idx);
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    fn check_compatible(&self, other: &EdgeSet) {
        assert!(
            self.n == other.n && self.power == other.power,
            "edge sets over different graphs: ({}, {}) vs ({}, {})",
            self.n,
            self.power,
            other.n,
            other.power
        );
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.check_compatible(other);
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.check_compatible(other);
        EdgeSet {
            bits: self.bits | other.bits,
            ..*self
        }
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.check_compatible(other);
        EdgeSet {
            bits: self.bits & other.bits,
            ..*self
        }
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.check_compatible(other);
        EdgeSet {
            bits: self.bits & !other.bits,
            ..*self
        }
    }

    pub fn complement(&self) -> EdgeSet {
        EdgeSet {
            bits: !self.bits & width_mask(self.n * self.power),
            ..*self
        }
    }

    /// `(tail, jump)` pairs of the set, in index order.
    pub fn edges(&self) -> Vec<Edge> {
        self.indices()
            .map(|i| Edge {
                tail: i / self.power,
                jump: i % self.power + 1,
            })
            .collect()
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSet(n={}, p={}, [", self.n, self.power)?;
        for (k, e) in self.edges().iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", edge_name(self.power, *e))?;
        }
        write!(f, "])")
    }
}

/// Canonical ordering used for deterministic output.
impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.power, self.bits).cmp(&(other.n, other.power, other.bits))
    }
}

/// `e3` / `f3` for the square, `3.2` style otherwise.
pub fn edge_name(power: usize, e: Edge) -> String {
    match (power, e.jump) {
        (2, 1) => format!("e{}", e.tail),
        (2, 2) => format!("f{}", e.tail),
        _ => format!("{}.{}", e.tail, e.jump),
    }
}

fn width_mask(w: usize) -> u128 {
    if w >= 128 {
        u128::MAX
    } else {
        (1u128 << w) - 1
    }
}

/// Triangle: two consecutive short edges and the long edge they compose to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub id: usize,
    /// `[first, second, long]`: `tail(long) = tail(first)`,
    /// `head(first) = tail(second)`, `head(second) = head(long)`.
    pub members: [usize; 3],
}

impl Triangle {
    pub fn mask(&self) -> u128 {
        self.members.iter().fold(0, |m, &i| m | 1u128 << i)
    }
}

/// Output format for [`CyclePowerGraph::export`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Serialize)]
struct JsonEdges<'a> {
    n: usize,
    power: usize,
    edges: &'a [[usize; 2]],
}

/// The directed graph `Cay(Z_n, {1, .., power})`.
#[derive(Clone, Debug)]
pub struct CyclePowerGraph {
    n: usize,
    power: usize,
    triangles: Vec<Triangle>,
    /// Triangle ids containing each edge.
    edge_triangles: Vec<Vec<usize>>,
    /// Undirected incidence mask of each vertex.
    incident: Vec<u128>,
}

impl CyclePowerGraph {
    /// Minimum vertex count for `power`, or `None` if the power is unsupported.
    pub fn min_vertices(power: usize) -> Option<usize> {
        match power {
            2 => Some(5),
            3 => Some(7),
            _ => None,
        }
    }

    pub fn new(n: usize, power: usize) -> Result<Self> {
        let min = Self::min_vertices(power).ok_or_else(|| {
            Error::Parameter(format!("power {power} unsupported (expected 2 or 3)"))
        })?;
        if n < min {
            return Err(Error::Parameter(format!(
                "power {power} requires n >= {min}, got {n}"
            )));
        }
        if n * power > MAX_EDGES {
            return Err(Error::Parameter(format!(
                "n * power = {} exceeds the {MAX_EDGES}-edge limit",
                n * power
            )));
        }

        let idx = |i: usize, d: usize| (i % n) * power + d - 1;
        let mut triangles = Vec::with_capacity(n * (2 * power - 3));
        for i in 0..n {
            let mut push = |members: [usize; 3]| {
                let id = triangles.len();
                triangles.push(Triangle { id, members });
            };
            push([idx(i, 1), idx(i + 1, 1), idx(i, 2)]);
            if power == 3 {
                push([idx(i, 1), idx(i + 1, 2), idx(i, 3)]);
                push([idx(i, 2), idx(i + 2, 1), idx(i, 3)]);
            }
        }

        let mut edge_triangles = vec![Vec::new(); n * power];
        for t in &triangles {
            for &m in &t.members {
                edge_triangles[m].push(t.id);
            }
        }

        let mut incident = vec![0u128; n];
        for i in 0..n {
            for d in 1..=power {
                let bit = 1u128 << idx(i, d);
                incident[i] |= bit;
                incident[(i + d) % n] |= bit;
            }
        }

        Ok(CyclePowerGraph {
            n,
            power,
            triangles,
            edge_triangles,
            incident,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.power
    }

    /// Index of edge `(i mod n, jump)`. Accepts any integer tail.
    pub fn edge_index(&self, tail: i64, jump: usize) -> usize {
        assert!((1..=self.power).contains(&jump), "jump {jump} out of range");
        (tail.rem_euclid(self.n as i64) as usize) * self.power + jump - 1
    }

    pub fn edge(&self, idx: usize) -> Edge {
        Edge {
            tail: idx / self.power,
            jump: idx % self.power + 1,
        }
    }

    pub fn tail(&self, idx: usize) -> usize {
        idx / self.power
    }

    pub fn head(&self, idx: usize) -> usize {
        (idx / self.power + idx % self.power + 1) % self.n
    }

    /// Frame `e_i`, the jump-1 edge.
    pub fn frame(&self, i: i64) -> usize {
        self.edge_index(i, 1)
    }

    /// Window `f_i`, the jump-2 edge.
    pub fn window(&self, i: i64) -> usize {
        self.edge_index(i, 2)
    }

    pub fn empty_set(&self) -> EdgeSet {
        EdgeSet::empty(self.n, self.power)
    }

    pub fn full_set(&self) -> EdgeSet {
        EdgeSet::full(self.n, self.power)
    }

    pub fn set_of<I: IntoIterator<Item = usize>>(&self, idx: I) -> EdgeSet {
        EdgeSet::from_indices(self.n, self.power, idx).expect("edge index out of range")
    }

    /// All edges of the given jump length.
    pub fn jump_class(&self, jump: usize) -> EdgeSet {
        self.set_of((0..self.n).map(|i| self.edge_index(i as i64, jump)))
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangles_of_edge(&self, idx: usize) -> &[usize] {
        &self.edge_triangles[idx]
    }

    pub fn belongs(&self, s: &EdgeSet) -> bool {
        s.n == self.n && s.power == self.power
    }

    fn check(&self, s: &EdgeSet) {
        assert!(
            self.belongs(s),
            "edge set {s:?} does not belong to C_{}^{}",
            self.n,
            self.power
        );
    }

    /// Connectivity of the underlying undirected graph on all `n` vertices.
    pub fn is_weakly_connected(&self, s: &EdgeSet) -> bool {
        self.check(s);
        self.weakly_connected_bits(s.bits)
    }

    pub(crate) fn weakly_connected_bits(&self, bits: u128) -> bool {
        let mut seen: u128 = 1;
        let mut stack = [0usize; MAX_EDGES];
        let mut top = 1;
        stack[0] = 0;
        while top > 0 {
            top -= 1;
            let v = stack[top];
            let mut adj = self.incident[v] & bits;
            while adj != 0 {
                let e = adj.trailing_zeros() as usize;
                adj &= adj - 1;
                let t = e / self.power;
                let h = (t + e % self.power + 1) % self.n;
                let w = if t == v { h } else { t };
                if seen >> w & 1 == 0 {
                    seen |= 1u128 << w;
                    stack[top] = w;
                    top += 1;
                }
            }
        }
        seen.count_ones() as usize == self.n
    }

    /// Every vertex touches at least one edge of `s`.
    pub fn is_spanning(&self, s: &EdgeSet) -> bool {
        self.check(s);
        self.incident.iter().all(|&m| m & s.bits != 0)
    }

    /// Maps edge `(i, d)` to `(i + shift, d)`.
    pub fn rotate(&self, s: &EdgeSet, shift: usize) -> EdgeSet {
        self.check(s);
        EdgeSet {
            bits: self.rotate_bits(s.bits, shift),
            ..*s
        }
    }

    pub(crate) fn rotate_bits(&self, bits: u128, shift: usize) -> u128 {
        let w = self.n * self.power;
        let k = (shift % self.n) * self.power;
        if k == 0 {
            return bits;
        }
        ((bits << k) | (bits >> (w - k))) & width_mask(w)
    }

    /// Least rotation of `s`, comparing bit vectors as integers with edge 0 lowest.
    pub fn canonical_form(&self, s: &EdgeSet) -> EdgeSet {
        self.check(s);
        let best = (0..self.n)
            .map(|k| self.rotate_bits(s.bits, k))
            .min()
            .unwrap_or(s.bits);
        EdgeSet { bits: best, ..*s }
    }

    /// Serializes `s` as Graphviz DOT or compact JSON. Output is byte-stable.
    pub fn export(&self, s: &EdgeSet, format: ExportFormat) -> String {
        self.check(s);
        match format {
            ExportFormat::Dot => {
                let mut out = format!("digraph C{}_{} {{\n", self.n, self.power);
                for v in 0..self.n {
                    out.push_str(&format!("  v{v};\n"));
                }
                for i in s.indices() {
                    let e = self.edge(i);
                    out.push_str(&format!(
                        "  v{} -> v{} [label=\"{}\"];\n",
                        e.tail,
                        self.head(i),
                        edge_name(self.power, e)
                    ));
                }
                out.push_str("}\n");
                out
            }
            ExportFormat::Json => {
                let edges: Vec<[usize; 2]> = s.edges().iter().map(|e| [e.tail, e.jump]).collect();
                serde_json::to_string(&JsonEdges {
                    n: self.n,
                    power: self.power,
                    edges: &edges,
                })
                .expect("plain struct serializes")
            }
        }
    }

    /// Vertex permutations preserving the arc set, found by backtracking.
    /// Returned as edge-index permutations; the identity comes first.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let out_nb: Vec<u128> = (0..n)
            .map(|i| (1..=self.power).fold(0, |m, d| m | 1u128 << ((i + d) % n)))
            .collect();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut found = Vec::new();
        self.extend_automorphism(0, &out_nb, &mut perm, &mut used, &mut found);
        found.sort();
        found
            .into_iter()
            .map(|vp| {
                (0..self.edge_count())
                    .map(|e| {
                        let (t, h) = (self.tail(e), self.head(e));
                        let (t2, h2) = (vp[t], vp[h]);
                        let d = (h2 + n - t2) % n;
                        t2 * self.power + d - 1
                    })
                    .collect()
            })
            .collect()
    }

    fn extend_automorphism(
        &self,
        v: usize,
        out_nb: &[u128],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        found: &mut Vec<Vec<usize>>,
    ) {
        let n = self.n;
        if v == n {
            found.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] {
                continue;
            }
            // Arcs between v and already mapped vertices must be preserved both ways.
            let ok = (0..v).all(|u| {
                let pu = perm[u];
                (out_nb[u] >> v & 1) == (out_nb[pu] >> img & 1)
                    && (out_nb[v] >> u & 1) == (out_nb[img] >> pu & 1)
            });
            if ok {
                perm[v] = img;
                used[img] = true;
                self.extend_automorphism(v + 1, out_nb, perm, used, found);
                used[img] = false;
                perm[v] = usize::MAX;
            }
        }
    }

    /// Applies an edge permutation from [`Self::automorphisms`].
    pub fn apply_edge_permutation(&self, s: &EdgeSet, perm: &[usize]) -> EdgeSet {
        self.check(s);
        let bits = s.indices().fold(0u128, |b, i| b | 1u128 << perm[i]);
        EdgeSet { bits, ..*s }
    }
}

/// Convenience wrapper for [`CyclePowerGraph::new`].
pub fn build_cycle_power(n: usize, power: usize) -> Result<CyclePowerGraph> {
    CyclePowerGraph::new(n, power)
}
