//! Edge expansion `h(G) = min |∂U| / |U|` over `1 <= |U| <= |V|/2`.

use num_bigint::BigInt;
use rand::Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::Vertex;
use crate::error::{Error, Result};
use crate::lp::Rational;
use crate::rng::stream;
use crate::skeleton::SkeletonGraph;

/// Subset enumeration limit for [`exact_cheeger`].
pub const EXACT_CHEEGER_MAX_VERTICES: usize = 26;
const RESTARTS: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheegerMethod {
    Exact,
    DegreeUpperBound,
    LocalSearchUpperBound,
}

impl std::fmt::Display for CheegerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheegerMethod::Exact => "exact",
            CheegerMethod::DegreeUpperBound => "degree_upper_bound",
            CheegerMethod::LocalSearchUpperBound => "local_search_upper_bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheegerResult {
    pub value: Rational,
    /// Sorted members of the minimizing set `U`.
    pub witness: Vec<Vertex>,
    pub method: CheegerMethod,
}

fn ratio(b: u64, m: u64) -> Rational {
    Rational::new(BigInt::from(b), BigInt::from(m))
}

/// Number of edges with exactly one endpoint in `inside`.
pub fn edge_boundary(g: &SkeletonGraph, inside: &[bool]) -> u64 {
    g.edges().filter(|&(i, j)| inside[i] != inside[j]).count() as u64
}

/// Recomputes `|∂U| / |U|` for a witness given as vertices.
pub fn quotient_of(g: &SkeletonGraph, witness: &[Vertex]) -> Result<Rational> {
    let mut inside = vec![false; g.len()];
    for &w in witness {
        let i = g.vertices().index_of(w).ok_or_else(|| Error::NotAMember(w.to_string()))?;
        inside[i] = true;
    }
    let size = inside.iter().filter(|&&b| b).count() as u64;
    if size == 0 || 2 * size > g.len() as u64 {
        return Err(Error::Config(format!("witness size {size} outside 1..=|V|/2")));
    }
    Ok(ratio(edge_boundary(g, &inside), size))
}

fn check_size(g: &SkeletonGraph) -> Result<usize> {
    let k = g.len();
    if k < 2 {
        return Err(Error::TooFewVertices);
    }
    Ok(k)
}

/// Best `(boundary, size, witness mask)` in a Gray-code range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Best {
    b: u64,
    m: u64,
    mask: u32,
}

impl Best {
    fn better_than(&self, o: &Best) -> bool {
        let (l, r) = (self.b * o.m, o.b * self.m);
        l < r || (l == r && self.mask < o.mask)
    }
}

/// Exhaustive minimum over all subsets, by Gray code over the subsets that
/// avoid the last vertex; each set is scored through its smaller side.
pub fn exact_cheeger(g: &SkeletonGraph) -> Result<CheegerResult> {
    let k = check_size(g)?;
    if k > EXACT_CHEEGER_MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "exact Cheeger vertices",
            size: k as u64,
            cap: EXACT_CHEEGER_MAX_VERTICES as u64,
        });
    }
    let adj: Vec<u32> = (0..k).map(|i| g.neighbours(i).iter().fold(0u32, |m, &j| m | 1 << j)).collect();
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let total: u64 = 1 << (k - 1);

    let scan = |lo: u64, hi: u64| -> Option<Best> {
        let gray = |i: u64| (i ^ (i >> 1)) as u32;
        let mut s = gray(lo);
        let mut b: u64 = (0..k)
            .filter(|&v| s >> v & 1 == 1)
            .map(|v| (adj[v] & !s).count_ones() as u64)
            .sum();
        let mut size = s.count_ones() as u64;
        let mut best: Option<Best> = None;
        let consider = |s: u32, b: u64, size: u64, best: &mut Option<Best>| {
            if size == 0 {
                return;
            }
            let comp = full & !s;
            let cand = if 2 * size <= k as u64 {
                Best { b, m: size, mask: s }
            } else {
                Best { b, m: k as u64 - size, mask: comp }
            };
            if best.is_none_or(|o| cand.better_than(&o)) {
                *best = Some(cand);
            }
        };
        consider(s, b, size, &mut best);
        for i in lo + 1..hi {
            let v = i.trailing_zeros();
            let bit = 1u32 << v;
            let deg = adj[v as usize].count_ones() as u64;
            let inner = (adj[v as usize] & s & !bit).count_ones() as u64;
            if s & bit == 0 {
                s |= bit;
                b = b + deg - 2 * inner;
                size += 1;
            } else {
                s &= !bit;
                b = b + 2 * inner - deg;
                size -= 1;
            }
            consider(s, b, size, &mut best);
        }
        best
    };

    let chunks: u64 = total.min(64);
    let step = total / chunks;
    let ranges: Vec<(u64, u64)> =
        (0..chunks).map(|c| (c * step, if c + 1 == chunks { total } else { (c + 1) * step })).collect();
    #[cfg(feature = "parallel")]
    let partial: Vec<Option<Best>> = ranges.into_par_iter().map(|(lo, hi)| scan(lo, hi)).collect();
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<Option<Best>> = ranges.into_iter().map(|(lo, hi)| scan(lo, hi)).collect();
    let best = partial
        .into_iter()
        .flatten()
        .reduce(|a, c| if c.better_than(&a) { c } else { a })
        .expect("k >= 2 gives a nonempty proper subset");
    Ok(CheegerResult {
        value: ratio(best.b, best.m),
        witness: (0..k).filter(|&i| best.mask >> i & 1 == 1).map(|i| g.vertices().get(i)).collect(),
        method: CheegerMethod::Exact,
    })
}

/// `h(G) <= min degree`, witnessed by a singleton.
pub fn degree_upper_bound(g: &SkeletonGraph) -> Result<CheegerResult> {
    let k = check_size(g)?;
    let i = (0..k).min_by_key(|&i| (g.degree(i), i)).expect("nonempty");
    Ok(CheegerResult {
        value: ratio(g.degree(i) as u64, 1),
        witness: vec![g.vertices().get(i)],
        method: CheegerMethod::DegreeUpperBound,
    })
}

struct Search<'a> {
    g: &'a SkeletonGraph,
    inside: Vec<bool>,
    /// Neighbours of each vertex inside the current set.
    inner: Vec<u64>,
    size: u64,
    b: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a SkeletonGraph) -> Self {
        let k = g.len();
        Self { g, inside: vec![false; k], inner: vec![0; k], size: 0, b: 0 }
    }

    /// Boundary after toggling `v`.
    fn delta(&self, v: usize) -> i64 {
        let deg = self.g.degree(v) as i64;
        let inner = self.inner[v] as i64;
        if self.inside[v] {
            2 * inner - deg
        } else {
            deg - 2 * inner
        }
    }

    fn toggle(&mut self, v: usize) {
        self.b = (self.b as i64 + self.delta(v)) as u64;
        let add = !self.inside[v];
        self.inside[v] = add;
        if add {
            self.size += 1;
        } else {
            self.size -= 1;
        }
        for &j in self.g.neighbours(v) {
            if add {
                self.inner[j as usize] += 1;
            } else {
                self.inner[j as usize] -= 1;
            }
        }
    }

    fn set(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&i| self.inside[i]).collect()
    }
}

fn better(b: u64, m: u64, than: Option<(u64, u64)>) -> bool {
    than.is_none_or(|(ob, om)| b * om < ob * m)
}

/// Smallest connected component when the graph is disconnected.
fn smallest_component(g: &SkeletonGraph) -> Option<Vec<usize>> {
    let k = g.len();
    let mut comp = vec![usize::MAX; k];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut stack = vec![s];
        let mut part = Vec::new();
        comp[s] = id;
        while let Some(v) = stack.pop() {
            part.push(v);
            for &j in g.neighbours(v) {
                if comp[j as usize] == usize::MAX {
                    comp[j as usize] = id;
                    stack.push(j as usize);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    if parts.len() < 2 {
        return None;
    }
    parts.into_iter().min_by_key(|p| (p.len(), p[0]))
}

/// Randomized greedy growth plus single-vertex add/remove descent, 32
/// restarts. Always an upper bound on `h(G)`.
pub fn local_search_upper_bound(g: &SkeletonGraph, seed: u64) -> Result<CheegerResult> {
    let k = check_size(g)?;
    let finish = |set: Vec<usize>, b: u64| CheegerResult {
        value: ratio(b, set.len() as u64),
        witness: set.iter().map(|&i| g.vertices().get(i)).collect(),
        method: CheegerMethod::LocalSearchUpperBound,
    };
    if let Some(part) = smallest_component(g) {
        return Ok(finish(part, 0));
    }
    let half = (k / 2) as u64;
    let mut best: Option<(u64, u64, Vec<usize>)> = None;
    for r in 0..RESTARTS {
        let mut rng = stream(seed, r);
        let mut s = Search::new(g);
        s.toggle(rng.gen_range(0..k));
        let mut local = (s.b, s.size, s.set());
        while s.size < half {
            // cheapest frontier vertex, ties to the lowest index
            let pick = (0..k)
                .filter(|&v| !s.inside[v] && s.inner[v] > 0)
                .min_by_key(|&v| (s.delta(v), v));
            let Some(v) = pick else { break };
            s.toggle(v);
            if better(s.b, s.size, Some((local.0, local.1))) {
                local = (s.b, s.size, s.set());
            }
        }
        // descend from the best prefix
        let mut s = Search::new(g);
        for &v in &local.2 {
            s.toggle(v);
        }
        loop {
            let mut step: Option<(u64, u64, usize)> = None;
            for v in 0..k {
                let m = if s.inside[v] { s.size - 1 } else { s.size + 1 };
                if m == 0 || m > half {
                    continue;
                }
                let nb = (s.b as i64 + s.delta(v)) as u64;
                let cur = step.map(|(b, m, _)| (b, m)).unwrap_or((s.b, s.size));
                if better(nb, m, Some(cur)) {
                    step = Some((nb, m, v));
                }
            }
            let Some((_, _, v)) = step else { break };
            s.toggle(v);
        }
        let cand = (s.b, s.size, s.set());
        if better(cand.0, cand.1, best.as_ref().map(|b| (b.0, b.1))) {
            best = Some(cand);
        }
    }
    let (b, _, set) = best.expect("at least one restart");
    Ok(finish(set, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{build_exact_skeleton, build_gd, hypercube_graph, sample_vertex_set, Method, VertexSet};
    use proptest::prelude::*;

    fn graph(k: usize, edges: &[(usize, usize)]) -> SkeletonGraph {
        let set = VertexSet::from_masks(5, 0..k as u64).unwrap();
        SkeletonGraph::from_edges(set, edges.iter().copied(), Method::Exact).unwrap()
    }

    /// Plain enumeration of every subset of size at most k/2.
    fn brute(g: &SkeletonGraph) -> Rational {
        let k = g.len();
        let mut best: Option<Rational> = None;
        for mask in 1u32..1 << k {
            let size = mask.count_ones() as usize;
            if 2 * size > k {
                continue;
            }
            let inside: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            let q = ratio(edge_boundary(g, &inside), size as u64);
            if best.as_ref().is_none_or(|b| q < *b) {
                best = Some(q);
            }
        }
        best.unwrap()
    }

    #[test]
    fn small_examples() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(exact_cheeger(&c4).unwrap().value, ratio(1, 1));
        assert_eq!(degree_upper_bound(&c4).unwrap().value, ratio(2, 1));
        assert_eq!(local_search_upper_bound(&c4, 0).unwrap().value, ratio(1, 1));
        let edge = graph(2, &[(0, 1)]);
        assert_eq!(exact_cheeger(&edge).unwrap().value, ratio(1, 1));
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let r = exact_cheeger(&p3).unwrap();
        assert_eq!(r.value, ratio(1, 1));
        assert_eq!(r.witness.len(), 1);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(degree_upper_bound(&star).unwrap().value, ratio(1, 1));
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(degree_upper_bound(&k4).unwrap().value, ratio(3, 1));
        let split = graph(4, &[(0, 1), (2, 3)]);
        assert_eq!(local_search_upper_bound(&split, 1).unwrap().value, ratio(0, 1));
        assert_eq!(exact_cheeger(&split).unwrap().value, ratio(0, 1));
    }

    #[test]
    fn errors() {
        let one = graph(1, &[]);
        assert!(matches!(exact_cheeger(&one), Err(Error::TooFewVertices)));
        assert!(degree_upper_bound(&one).is_err());
        assert!(local_search_upper_bound(&one, 0).is_err());
        let big = build_gd(&VertexSet::full(5).unwrap(), 1).unwrap();
        assert!(exact_cheeger(&big).unwrap_err().is_resource_cap());
    }

    #[test]
    fn hypercubes_have_expansion_one() {
        for n in 2..=4 {
            let r = exact_cheeger(&hypercube_graph(n).unwrap()).unwrap();
            assert_eq!(r.value, ratio(1, 1));
            assert_eq!(quotient_of(&hypercube_graph(n).unwrap(), &r.witness).unwrap(), r.value);
        }
    }

    #[test]
    fn random_graphs_match_brute_force_and_order_holds() {
        for seed in 0..40u64 {
            let set = sample_vertex_set(5, 0.4, seed).unwrap();
            if set.len() < 2 || set.len() > 14 {
                continue;
            }
            let g = build_exact_skeleton(&set).unwrap();
            let e = exact_cheeger(&g).unwrap();
            assert_eq!(e.value, brute(&g), "seed {seed}");
            assert_eq!(quotient_of(&g, &e.witness).unwrap(), e.value);
            let l = local_search_upper_bound(&g, seed).unwrap();
            let d = degree_upper_bound(&g).unwrap();
            assert_eq!(quotient_of(&g, &l.witness).unwrap(), l.value);
            assert!(e.value <= l.value && l.value <= d.value, "seed {seed}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn exact_matches_brute_on_random_graphs(k in 2usize..11, edges in proptest::collection::vec((0usize..11, 0usize..11), 0..30)) {
            let es: Vec<(usize, usize)> = edges.into_iter().filter(|&(a, b)| a < k && b < k && a != b).collect();
            let g = graph(k, &es);
            let e = exact_cheeger(&g).unwrap();
            prop_assert_eq!(&e.value, &brute(&g));
            prop_assert_eq!(quotient_of(&g, &e.witness).unwrap(), e.value.clone());
            prop_assert!(local_search_upper_bound(&g, 3).unwrap().value >= e.value);
        }
    }
}
