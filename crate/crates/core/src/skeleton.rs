//! Vertex sets and polytope skeleton graphs.
//!
//! Three adjacency routes live here: the exact LP test, the subcube
//! criterion (an empty enclosing subcube certifies an edge) and the two
//! non-edge filters. Graphs built by the subcube criterion at distance `d`
//! are the `G_d(V)` graphs used by the flow constructions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{binomial, BitIter, MasksOfWeight, Submasks, Vertex};
use crate::error::{Error, Result};
use crate::lp::{rat, simplex_solve, LpProblem, Rational, Sense};
use crate::rng::KeyedUniforms;

/// Largest dimension for which sampling enumerates the whole cube.
pub const SAMPLE_MAX_DIM: u32 = 20;
/// Solver budget for the exact skeleton.
pub const EXACT_MAX_VERTICES: usize = 300;
/// Dense membership bitmaps are kept up to this dimension.
const DENSE_MAX_DIM: u32 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Explicit,
    Sampled { p: f64, seed: u64 },
}

/// A subset of `{0,1}^n`, sorted by bitmask.
#[derive(Clone, Debug)]
pub struct VertexSet {
    n: u32,
    members: Vec<Vertex>,
    provenance: Provenance,
    dense: Option<Vec<u64>>,
}

impl PartialEq for VertexSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members && self.provenance == other.provenance
    }
}

impl VertexSet {
    pub fn new(n: u32, members: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        Vertex::zero(n)?;
        let mut members: Vec<Vertex> = members.into_iter().collect();
        if let Some(v) = members.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch { left: n, right: v.dim() });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(n, members, Provenance::Explicit))
    }

    pub fn from_masks(n: u32, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let members = masks.into_iter().map(|b| Vertex::new(b, n)).collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    /// The whole cube.
    pub fn full(n: u32) -> Result<Self> {
        check_sample_dim(n)?;
        Self::from_masks(n, 0..1u64 << n)
    }

    fn from_sorted(n: u32, members: Vec<Vertex>, provenance: Provenance) -> Self {
        let dense = (n <= DENSE_MAX_DIM).then(|| {
            let mut bits = vec![0u64; (1usize << n).div_ceil(64)];
            for v in &members {
                let b = v.bits() as usize;
                bits[b >> 6] |= 1 << (b & 63);
            }
            bits
        });
        Self { n, members, provenance, dense }
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, i: usize) -> Vertex {
        self.members[i]
    }

    #[inline]
    pub fn contains_bits(&self, bits: u64) -> bool {
        match &self.dense {
            Some(d) => {
                let b = bits as usize;
                b < d.len() * 64 && (d[b >> 6] >> (b & 63)) & 1 == 1
            }
            None => self.members.binary_search_by_key(&bits, |v| v.bits()).is_ok(),
        }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v.dim() == self.n && self.contains_bits(v.bits())
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        if v.dim() != self.n {
            return None;
        }
        self.members.binary_search(&v).ok()
    }

    fn require(&self, v: Vertex) -> Result<usize> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: v.dim() });
        }
        self.index_of(v).ok_or_else(|| Error::NotAMember(v.to_string()))
    }

    pub(crate) fn require_pair(&self, u: Vertex, v: Vertex) -> Result<(usize, usize)> {
        let i = self.require(u)?;
        let j = self.require(v)?;
        if i == j {
            return Err(Error::SameVertex);
        }
        Ok((i, j))
    }

    /// `|S_1(x) ∩ V|`.
    pub fn unit_neighbours_in(&self, x: Vertex) -> u32 {
        (0..self.n).filter(|&b| self.contains_bits(x.bits() ^ (1 << b))).count() as u32
    }

    /// Text form: a header `n=<dim> p=<prob> seed=<seed>` followed by one
    /// hex bitmask per line. Explicit sets write `p=explicit seed=none`.
    pub fn to_text(&self) -> String {
        let mut out = match self.provenance {
            Provenance::Sampled { p, seed } => format!("n={} p={} seed={}\n", self.n, p, seed),
            Provenance::Explicit => format!("n={} p=explicit seed=none\n", self.n),
        };
        for v in &self.members {
            out.push_str(&v.to_hex());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let mut n = None;
        let mut p = None;
        let mut seed = None;
        for field in header.split_whitespace() {
            let (k, val) =
                field.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            match k {
                "n" => n = Some(val.parse::<u32>().map_err(|e| Error::Parse(format!("n: {e}")))?),
                "p" => p = Some(val.to_string()),
                "seed" => seed = Some(val.to_string()),
                _ => return Err(Error::Parse(format!("unknown header field {k:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("header lacks n".into()))?;
        let provenance = match (p.as_deref(), seed.as_deref()) {
            (Some("explicit") | None, _) => Provenance::Explicit,
            (Some(p), Some(s)) => Provenance::Sampled {
                p: p.parse().map_err(|e| Error::Parse(format!("p: {e}")))?,
                seed: s.parse().map_err(|e| Error::Parse(format!("seed: {e}")))?,
            },
            (Some(_), None) => return Err(Error::Parse("sampled set without seed".into())),
        };
        let members = lines.map(|l| Vertex::from_hex(l, n)).collect::<Result<Vec<_>>>()?;
        let mut set = Self::new(n, members)?;
        set.provenance = provenance;
        Ok(set)
    }
}

fn check_sample_dim(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    if n > SAMPLE_MAX_DIM {
        return Err(Error::SizeCap { what: "cube dimension for enumeration", size: n as u64, cap: SAMPLE_MAX_DIM as u64 });
    }
    Ok(())
}

/// Includes each of the `2^n` points independently with probability `p`.
///
/// Point `b` is kept iff the deviate keyed by `(seed, b)` is below `p`.
pub fn sample_vertex_set(n: u32, p: f64, seed: u64) -> Result<VertexSet> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    check_sample_dim(n)?;
    let mut u = KeyedUniforms::new(seed);
    let members: Vec<Vertex> = (0..1u64 << n)
        .filter(|&b| u.get(b) < p)
        .map(|b| Vertex::new(b, n).expect("mask below 2^n"))
        .collect();
    Ok(VertexSet::from_sorted(n, members, Provenance::Sampled { p, seed }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    CubeCriterion(u32),
    Union(Vec<Method>),
}

impl Method {
    /// Distance of the cube-criterion component, if this is one.
    pub fn cube_distance(&self) -> Option<u32> {
        match self {
            Method::CubeCriterion(d) => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exact => f.write_str("exact"),
            Method::CubeCriterion(d) => write!(f, "cube_criterion({d})"),
            Method::Union(parts) => {
                f.write_str("union(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exact" {
            return Ok(Method::Exact);
        }
        if let Some(inner) = s.strip_prefix("cube_criterion(").and_then(|r| r.strip_suffix(')')) {
            return inner.parse().map(Method::CubeCriterion).map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        }
        if let Some(inner) = s.strip_prefix("union(").and_then(|r| r.strip_suffix(')')) {
            // split on top-level commas
            let mut parts = Vec::new();
            let (mut depth, mut start) = (0i32, 0usize);
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        parts.push(inner[start..i].parse()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if !inner[start..].is_empty() {
                parts.push(inner[start..].parse()?);
            }
            return Ok(Method::Union(parts));
        }
        Err(Error::Parse(format!("unknown method tag {s:?}")))
    }
}

/// Undirected graph on a [`VertexSet`], neighbours stored as sorted member
/// indices.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    vertices: VertexSet,
    adj: Vec<Vec<u32>>,
    method: Method,
}

impl SkeletonGraph {
    /// Builds from index pairs; duplicates collapse, self-loops are rejected.
    pub fn from_edges(
        vertices: VertexSet,
        edges: impl IntoIterator<Item = (usize, usize)>,
        method: Method,
    ) -> Result<Self> {
        let k = vertices.len();
        let mut adj = vec![Vec::new(); k];
        for (i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::Config(format!("edge ({i}, {j}) outside {k} vertices")));
            }
            if i == j {
                return Err(Error::SameVertex);
            }
            adj[i].push(j as u32);
            adj[j].push(i as u32);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Self { vertices, adj, method })
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn method(&self) -> &Method {
        &self.method
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn has_vertex_edge(&self, u: Vertex, v: Vertex) -> bool {
        match (self.vertices.index_of(u), self.vertices.index_of(v)) {
            (Some(i), Some(j)) => self.has_edge(i, j),
            _ => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, a)| a.iter().filter(move |&&j| j as usize > i).map(move |&j| (i, j as usize)))
    }

    pub fn vertex_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges().map(|(i, j)| (self.vertices.get(i), self.vertices.get(j)))
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &SkeletonGraph) -> Result<SkeletonGraph> {
        if self.vertices.members() != other.vertices.members() || self.vertices.dim() != other.vertices.dim() {
            return Err(Error::Config("union of graphs on different vertex sets".into()));
        }
        let mut parts = Vec::new();
        for m in [&self.method, &other.method] {
            match m {
                Method::Union(ps) => parts.extend(ps.iter().cloned()),
                other => parts.push(other.clone()),
            }
        }
        SkeletonGraph::from_edges(self.vertices.clone(), self.edges().chain(other.edges()), Method::Union(parts))
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).max()
    }

    /// Header `# method=<tag> n=<dim> vertices=<k> edges=<m>`, then one
    /// `<hex u> <hex v>` line per edge with `u < v`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# method={} n={} vertices={} edges={}\n",
            self.method,
            self.vertices.dim(),
            self.len(),
            self.edge_count()
        );
        for (u, v) in self.vertex_edges() {
            out.push_str(&format!("{} {}\n", u.to_hex(), v.to_hex()));
        }
        out
    }

    /// Reads the edge list back against a known vertex set.
    pub fn from_text(text: &str, vertices: VertexSet) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let tag = header
            .trim_start_matches('#')
            .split_whitespace()
            .find_map(|f| f.strip_prefix("method="))
            .ok_or_else(|| Error::Parse("header lacks method".into()))?;
        let method: Method = tag.parse()?;
        let n = vertices.dim();
        let mut edges = Vec::new();
        for l in lines {
            let mut it = l.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!("bad edge line {l:?}")));
            };
            let (u, v) = (Vertex::from_hex(a, n)?, Vertex::from_hex(b, n)?);
            edges.push((vertices.require(u)?, vertices.require(v)?));
        }
        Self::from_edges(vertices, edges, method)
    }
}

/// Exact adjacency: `[u, v]` is an edge of `conv(V)` iff the LP
/// `max sum_{w not in {u,v}} l_w  s.t.  sum_w l_w w = (u+v)/2, sum_w l_w = 1, l >= 0`
/// has optimum zero.
pub fn is_edge_exact(u: Vertex, v: Vertex, set: &VertexSet) -> Result<bool> {
    let (iu, iv) = set.require_pair(u, v)?;
    Ok(midpoint_lp_is_edge(set, iu, iv))
}

fn midpoint_lp_is_edge(set: &VertexSet, iu: usize, iv: usize) -> bool {
    let members = set.members();
    let k = members.len();
    let (u, v) = (members[iu], members[iv]);
    let objective: Vec<Rational> =
        (0..k).map(|w| if w == iu || w == iv { Rational::zero() } else { Rational::one() }).collect();
    let mut lp = LpProblem::new(objective);
    for i in 1..=set.dim() {
        let row = members.iter().map(|w| if w.coord(i) { Rational::one() } else { Rational::zero() }).collect();
        let twice = u.coord(i) as i64 + v.coord(i) as i64;
        lp.add_constraint(row, Sense::Eq, rat(twice, 2));
    }
    lp.add_constraint(vec![Rational::one(); k], Sense::Eq, Rational::one());
    let out = simplex_solve(&lp).expect("well-formed adjacency LP");
    // the midpoint is always feasible and the objective is bounded by one
    out.value.expect("adjacency LP is feasible and bounded").is_zero()
}

/// Edge certificate: no third member of `V` inside `cube(u, v)`.
pub fn cube_criterion_edge(u: Vertex, v: Vertex, set: &VertexSet) -> Result<bool> {
    set.require_pair(u, v)?;
    Ok(cube_is_empty(set, u.bits(), v.bits()))
}

#[inline]
fn cube_is_empty(set: &VertexSet, a: u64, b: u64) -> bool {
    let diff = a ^ b;
    let base = a & b;
    let (ea, eb) = (a & diff, b & diff);
    Submasks::new(diff).all(|s| s == ea || s == eb || !set.contains_bits(base | s))
}

/// Non-edge certificate: every unit neighbour of `u` is in `V` and `v` is
/// not one of them.
pub fn nonedge_filter_a(u: Vertex, v: Vertex, set: &VertexSet) -> Result<bool> {
    set.require_pair(u, v)?;
    Ok(filter_a(set, u, v))
}

fn filter_a(set: &VertexSet, u: Vertex, v: Vertex) -> bool {
    (u.bits() ^ v.bits()).count_ones() != 1 && set.unit_neighbours_in(u) == set.dim()
}

/// Non-edge certificate: interior points `s, t` of `cube(u, v)` in `V` with
/// `s ^ t = u ^ v`. Returns the pair ordered so that `s` precedes `t` as
/// coordinate strings, choosing the lexicographically first such `s`.
pub fn nonedge_filter_b(u: Vertex, v: Vertex, set: &VertexSet) -> Result<Option<(Vertex, Vertex)>> {
    set.require_pair(u, v)?;
    Ok(filter_b(set, u, v))
}

fn filter_b(set: &VertexSet, u: Vertex, v: Vertex) -> Option<(Vertex, Vertex)> {
    let diff = u.bits() ^ v.bits();
    let mut best: Option<(Vertex, Vertex)> = None;
    for a in Submasks::new(diff) {
        if a == 0 || a == diff {
            continue;
        }
        let s = u.flip(a);
        let t = u.flip(diff ^ a);
        if !(set.contains(s) && set.contains(t)) {
            continue;
        }
        let (s, t) = if s.lex_key() < t.lex_key() { (s, t) } else { (t, s) };
        if best.is_none_or(|(bs, _)| s.lex_key() < bs.lex_key()) {
            best = Some((s, t));
        }
    }
    best
}

/// `G_d(V)`: members at distance `d` whose enclosing subcube holds no other
/// member.
pub fn build_gd(set: &VertexSet, d: u32) -> Result<SkeletonGraph> {
    let n = set.dim();
    if d == 0 || d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    let members = set.members();
    let sphere_size = binomial(n as u64, d as u64);
    let scan_sphere = sphere_size <= members.len() as u64;
    let per_vertex = |i: usize| -> Vec<(usize, usize)> {
        let x = members[i];
        let mut out = Vec::new();
        if scan_sphere {
            for m in MasksOfWeight::new(n, d) {
                let y = x.bits() ^ m;
                if y > x.bits() && set.contains_bits(y) && cube_is_empty(set, x.bits(), y) {
                    out.push((i, set.index_of(x.with_bits(y)).expect("member")));
                }
            }
        } else {
            for (j, y) in members.iter().enumerate().skip(i + 1) {
                if (x.bits() ^ y.bits()).count_ones() == d && cube_is_empty(set, x.bits(), y.bits()) {
                    out.push((i, j));
                }
            }
        }
        out
    };
    #[cfg(feature = "parallel")]
    let edges: Vec<(usize, usize)> = (0..members.len()).into_par_iter().flat_map_iter(per_vertex).collect();
    #[cfg(not(feature = "parallel"))]
    let edges: Vec<(usize, usize)> = (0..members.len()).flat_map(per_vertex).collect();
    SkeletonGraph::from_edges(set.clone(), edges, Method::CubeCriterion(d))
}

/// Runs the LP test on every pair.
pub fn build_exact_skeleton(set: &VertexSet) -> Result<SkeletonGraph> {
    let k = set.len();
    if k > EXACT_MAX_VERTICES {
        return Err(Error::SizeCap { what: "exact skeleton vertices", size: k as u64, cap: EXACT_MAX_VERTICES as u64 });
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    #[cfg(feature = "parallel")]
    let it = pairs.into_par_iter();
    #[cfg(not(feature = "parallel"))]
    let it = pairs.into_iter();
    let edges: Vec<(usize, usize)> = it.filter(|&(i, j)| midpoint_lp_is_edge(set, i, j)).collect();
    SkeletonGraph::from_edges(set.clone(), edges, Method::Exact)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Tolerance for comparing a neighbour count with `(1 - alpha) n`.
const ALPHA_SLACK: f64 = 1e-9;

pub(crate) fn is_alpha_full(set: &VertexSet, x: Vertex, alpha: f64) -> bool {
    set.unit_neighbours_in(x) as f64 >= (1.0 - alpha) * set.dim() as f64 - ALPHA_SLACK
}

/// Members with `|S_1(x) ∩ V| >= (1 - alpha) n`.
pub fn alpha_full_vertices(set: &VertexSet, alpha: f64) -> Result<Vec<Vertex>> {
    check_alpha(alpha)?;
    Ok(set.members().iter().copied().filter(|&x| is_alpha_full(set, x, alpha)).collect())
}

/// Members whose whole unit ball lies in `V`; each has skeleton degree `n`.
pub fn full_degree_vertices(set: &VertexSet) -> Vec<Vertex> {
    set.members().iter().copied().filter(|&x| set.unit_neighbours_in(x) == set.dim()).collect()
}

/// Edge count per Hamming length.
pub fn edge_length_histogram(graph: &SkeletonGraph) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for (u, v) in graph.vertex_edges() {
        *h.entry((u.bits() ^ v.bits()).count_ones()).or_insert(0) += 1;
    }
    h
}

/// The hypercube graph `Q_n` on the full cube.
pub fn hypercube_graph(n: u32) -> Result<SkeletonGraph> {
    let set = VertexSet::full(n)?;
    let edges: Vec<(usize, usize)> = (0..1usize << n)
        .flat_map(|i| BitIter(!(i as u64) & crate::cube::full_mask(n)).map(move |b| (i, i | 1 << b)))
        .collect();
    SkeletonGraph::from_edges(set, edges, Method::CubeCriterion(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{ball, sphere};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn vs(xs: &[&str]) -> VertexSet {
        let n = xs[0].len() as u32;
        VertexSet::new(n, xs.iter().map(|s| v(s))).unwrap()
    }

    fn even_weight_3() -> VertexSet {
        VertexSet::from_masks(3, (0..8u64).filter(|b| b.count_ones() % 2 == 0)).unwrap()
    }

    fn edge_set(g: &SkeletonGraph) -> Vec<(String, String)> {
        g.vertex_edges().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn sampling_extremes_and_determinism() {
        assert_eq!(sample_vertex_set(3, 1.0, 99).unwrap().len(), 8);
        assert!(sample_vertex_set(3, 0.0, 99).unwrap().is_empty());
        assert_eq!(sample_vertex_set(10, 0.5, 7).unwrap(), sample_vertex_set(10, 0.5, 7).unwrap());
        assert!(matches!(sample_vertex_set(3, 1.5, 0), Err(Error::InvalidProbability(_))));
        assert!(matches!(sample_vertex_set(3, -0.1, 0), Err(Error::InvalidProbability(_))));
        assert!(sample_vertex_set(21, 0.5, 0).unwrap_err().is_resource_cap());
    }

    #[test]
    fn sampling_golden_n3() {
        // frozen from the reference stream at first implementation
        let s = sample_vertex_set(3, 0.5, 42).unwrap();
        let got: Vec<u64> = s.members().iter().map(|v| v.bits()).collect();
        assert_eq!(got, GOLDEN_N3_P05_SEED42);
    }

    const GOLDEN_N3_P05_SEED42: &[u64] = &[0b010, 0b100, 0b101, 0b110];

    #[test]
    fn exact_edge_examples() {
        assert!(is_edge_exact(v("00"), v("11"), &vs(&["00", "11"])).unwrap());
        assert!(!is_edge_exact(v("00"), v("11"), &vs(&["00", "01", "10", "11"])).unwrap());
        assert!(is_edge_exact(v("000"), v("011"), &even_weight_3()).unwrap());
        let set = vs(&["00", "11"]);
        assert!(matches!(is_edge_exact(v("00"), v("00"), &set), Err(Error::SameVertex)));
        assert!(matches!(is_edge_exact(v("00"), v("01"), &set), Err(Error::NotAMember(_))));
    }

    #[test]
    fn cube_criterion_examples() {
        assert!(cube_criterion_edge(v("00"), v("11"), &vs(&["00", "11"])).unwrap());
        assert!(!cube_criterion_edge(v("00"), v("11"), &vs(&["00", "01", "11"])).unwrap());
        assert!(cube_criterion_edge(v("000"), v("110"), &vs(&["000", "110", "101"])).unwrap());
        assert!(cube_criterion_edge(v("00"), v("00"), &vs(&["00", "11"])).is_err());
    }

    #[test]
    fn filter_a_examples() {
        let mut b1 = ball(v("000"), 1).unwrap();
        b1.push(v("011"));
        let set = VertexSet::new(3, b1).unwrap();
        assert!(nonedge_filter_a(v("000"), v("011"), &set).unwrap());
        assert!(!nonedge_filter_a(v("000"), v("011"), &vs(&["000", "011"])).unwrap());
        let b1 = VertexSet::new(3, ball(v("000"), 1).unwrap()).unwrap();
        assert!(!nonedge_filter_a(v("000"), v("001"), &b1).unwrap());
    }

    #[test]
    fn filter_b_examples() {
        let sq = vs(&["00", "11", "01", "10"]);
        assert_eq!(nonedge_filter_b(v("00"), v("11"), &sq).unwrap(), Some((v("01"), v("10"))));
        assert_eq!(nonedge_filter_b(v("00"), v("01"), &sq).unwrap(), None);
        // brute force over the 2^(d-1) - 1 = 3 complementary interior pairs
        let set = vs(&["000", "111", "100", "011"]);
        assert_eq!(nonedge_filter_b(v("000"), v("111"), &set).unwrap(), Some((v("011"), v("100"))));
    }

    #[test]
    fn gd_examples() {
        for n in 2..=5 {
            let full = VertexSet::full(n).unwrap();
            let g1 = build_gd(&full, 1).unwrap();
            assert_eq!(g1.edge_count(), (n as usize) << (n - 1));
            assert!(g1.vertex_edges().all(|(a, b)| (a.bits() ^ b.bits()).count_ones() == 1));
            assert_eq!(build_gd(&full, 2).unwrap().edge_count(), 0);
        }
        let k4 = build_gd(&even_weight_3(), 2).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(k4.method(), &Method::CubeCriterion(2));
        assert!(matches!(build_gd(&even_weight_3(), 4), Err(Error::DistanceOutOfRange { .. })));
        assert!(build_gd(&even_weight_3(), 0).is_err());
    }

    #[test]
    fn gd_strategies_agree() {
        // dense sets scan spheres, sparse sets scan member pairs
        let sparse = sample_vertex_set(9, 0.05, 3).unwrap();
        let dense = sample_vertex_set(9, 0.9, 3).unwrap();
        for set in [&sparse, &dense] {
            for d in 1..=4 {
                let g = build_gd(set, d).unwrap();
                let k = set.len();
                let mut brute = Vec::new();
                for i in 0..k {
                    for j in i + 1..k {
                        let (a, b) = (set.get(i), set.get(j));
                        let inside = crate::cube::cube_points(a, b).unwrap().into_iter().filter(|w| set.contains(*w)).count();
                        if (a.bits() ^ b.bits()).count_ones() == d && inside == 2 {
                            brute.push((i, j));
                        }
                    }
                }
                assert_eq!(g.edges().collect::<Vec<_>>(), brute);
            }
        }
    }

    #[test]
    fn exact_skeleton_examples() {
        let sq = build_exact_skeleton(&VertexSet::full(2).unwrap()).unwrap();
        assert_eq!(edge_set(&sq), vec![
            ("00".into(), "10".into()),
            ("00".into(), "01".into()),
            ("10".into(), "11".into()),
            ("01".into(), "11".into()),
        ]);
        assert_eq!(edge_length_histogram(&sq), BTreeMap::from([(1, 4)]));
        let seg = build_exact_skeleton(&vs(&["00", "11"])).unwrap();
        assert_eq!(seg.edge_count(), 1);
        assert_eq!(edge_length_histogram(&seg), BTreeMap::from([(2, 1)]));
        let single = build_exact_skeleton(&vs(&["101"])).unwrap();
        assert_eq!(single.edge_count(), 0);
        assert!(edge_length_histogram(&single).is_empty());
    }

    #[test]
    fn exact_skeleton_of_full_cube_is_hypercube() {
        for n in 2..=4 {
            let g = build_exact_skeleton(&VertexSet::full(n).unwrap()).unwrap();
            let q = hypercube_graph(n).unwrap();
            assert_eq!(g.edges().collect::<Vec<_>>(), q.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn alpha_full_examples() {
        let b1 = VertexSet::new(3, ball(v("000"), 1).unwrap()).unwrap();
        assert!(alpha_full_vertices(&b1, 0.5).unwrap().contains(&v("000")));
        assert!(alpha_full_vertices(&vs(&["000"]), 0.5).unwrap().is_empty());
        assert_eq!(alpha_full_vertices(&VertexSet::full(4).unwrap(), 0.01).unwrap().len(), 16);
        assert!(matches!(alpha_full_vertices(&b1, 0.0), Err(Error::InvalidAlpha(_))));
        assert!(alpha_full_vertices(&b1, 1.5).is_err());
    }

    #[test]
    fn full_degree_examples() {
        let b1 = VertexSet::new(3, ball(v("000"), 1).unwrap()).unwrap();
        assert_eq!(full_degree_vertices(&b1), vec![v("000")]);
        assert_eq!(full_degree_vertices(&VertexSet::full(3).unwrap()).len(), 8);
        assert!(full_degree_vertices(&vs(&["000", "100", "010"])).is_empty());
    }

    #[test]
    fn text_round_trips() {
        let s = sample_vertex_set(6, 0.4, 11).unwrap();
        assert_eq!(VertexSet::from_text(&s.to_text()).unwrap(), s);
        let e = vs(&["010", "111"]);
        assert_eq!(VertexSet::from_text(&e.to_text()).unwrap(), e);
        let g = build_gd(&s, 1).unwrap().union(&build_gd(&s, 3).unwrap()).unwrap();
        let back = SkeletonGraph::from_text(&g.to_text(), s.clone()).unwrap();
        assert_eq!(back.method(), g.method());
        assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert!(VertexSet::from_text("").is_err());
        assert!(VertexSet::from_text("n=3 p=explicit seed=none\nzz\n").is_err());
    }

    #[test]
    fn method_tags_parse() {
        let m = Method::Union(vec![Method::CubeCriterion(1), Method::CubeCriterion(3), Method::Exact]);
        assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn sphere_helper_matches_unit_neighbour_count() {
        let s = sample_vertex_set(7, 0.6, 5).unwrap();
        for &x in s.members() {
            let direct = sphere(x, 1).unwrap().into_iter().filter(|y| s.contains(*y)).count() as u32;
            assert_eq!(s.unit_neighbours_in(x), direct);
        }
    }
}
