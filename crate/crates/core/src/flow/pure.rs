//! Pure paths: 7-edge detours between points at distance `3d`.

use serde::{Deserialize, Serialize};

use crate::cube::{binomial, full_mask, submasks_of_weight, BitIter, MasksOfWeight, Vertex};
use crate::error::{Error, Result};
use crate::skeleton::{Method, SkeletonGraph, VertexSet};

/// Cap on `binom(n, d)^4` and on the number of pure paths scanned by
/// [`count_pure_paths_through_edge`].
pub const PURE_COUNT_CAP: u128 = 1_000_000_000;

/// The path `x, x+t, x+t+u, x+t+u+f1, x+t+u+f1+f2, y+t+u, y+u, y` (sums
/// are XOR), where `f1, f2, f3` split the sorted support of `x + y` into
/// thirds and `t`, `u` are weight-`d` detours off that support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PurePath {
    pub x: Vertex,
    pub y: Vertex,
    pub t: Vertex,
    pub u: Vertex,
    pub f1: Vertex,
    pub f2: Vertex,
    pub f3: Vertex,
    pub vertices: [Vertex; 8],
}

/// Splits the support of `diff` into its first, middle and last thirds.
pub(crate) fn thirds(diff: u64) -> [u64; 3] {
    let bits: Vec<u32> = BitIter(diff).collect();
    let d = bits.len() / 3;
    let mut out = [0u64; 3];
    for (i, b) in bits.iter().enumerate() {
        out[i / d] |= 1 << b;
    }
    out
}

impl PurePath {
    pub fn new(x: Vertex, y: Vertex, t: Vertex, u: Vertex) -> Result<Self> {
        let n = x.dim();
        for w in [y, t, u] {
            if w.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: w.dim() });
            }
        }
        let d = t.weight();
        if d == 0 {
            return Err(Error::DistanceOutOfRange { d, n });
        }
        let diff = x.bits() ^ y.bits();
        if diff.count_ones() != 3 * d {
            return Err(Error::DistanceMismatch { expected: 3 * d, found: diff.count_ones() });
        }
        if u.weight() != d {
            return Err(Error::DistanceMismatch { expected: d, found: u.weight() });
        }
        if t.bits() & u.bits() != 0 || (t.bits() | u.bits()) & diff != 0 {
            return Err(Error::Config("detour supports must be disjoint from each other and from x+y".into()));
        }
        Ok(Self::build(x, y, t.bits(), u.bits()))
    }

    fn build(x: Vertex, y: Vertex, t: u64, u: u64) -> Self {
        let [f1, f2, f3] = thirds(x.bits() ^ y.bits());
        let x2 = x.flip(t | u);
        let vertices = [x, x.flip(t), x2, x2.flip(f1), x2.flip(f1 | f2), y.flip(t | u), y.flip(u), y];
        let w = |b| x.with_bits(b);
        Self { x, y, t: w(t), u: w(u), f1: w(f1), f2: w(f2), f3: w(f3), vertices }
    }

    pub fn d(&self) -> u32 {
        self.t.weight()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

fn check_fit(n: u32, d: u32) -> Result<()> {
    if d == 0 || 5 * d > n {
        return Err(Error::PurePathsDoNotFit { d, n });
    }
    Ok(())
}

/// All pure paths from `x` to `y` accepted by `keep`, in ascending `(t, u)`.
pub(crate) fn pure_paths_where(x: Vertex, y: Vertex, d: u32, mut keep: impl FnMut(&PurePath) -> bool) -> Vec<PurePath> {
    let diff = x.bits() ^ y.bits();
    let free = full_mask(x.dim()) & !diff;
    let mut out = Vec::new();
    for t in submasks_of_weight(free, d) {
        for u in submasks_of_weight(free & !t, d) {
            let p = PurePath::build(x, y, t, u);
            if keep(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Pure paths between `x` and `y` whose vertices lie in `V` and whose edges
/// are edges of `G`, which must be a `G_d(V)` graph.
pub fn enumerate_pure_paths(x: Vertex, y: Vertex, set: &VertexSet, g: &SkeletonGraph) -> Result<Vec<PurePath>> {
    let Method::CubeCriterion(d) = *g.method() else {
        return Err(Error::Config(format!("pure paths need a cube_criterion graph, got {}", g.method())));
    };
    let n = set.dim();
    if g.vertices().members() != set.members() {
        return Err(Error::Config("graph is not built on this vertex set".into()));
    }
    for w in [x, y] {
        if w.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: w.dim() });
        }
        if !set.contains(w) {
            return Err(Error::NotAMember(w.to_string()));
        }
    }
    let h = (x.bits() ^ y.bits()).count_ones();
    if h != 3 * d {
        return Err(Error::DistanceMismatch { expected: 3 * d, found: h });
    }
    // with 5d > n no detours fit and the list is empty
    Ok(pure_paths_where(x, y, d, |p| {
        p.vertices.iter().all(|&w| set.contains(w)) && p.edges().all(|(a, b)| g.has_vertex_edge(a, b))
    }))
}

/// Number of pure paths of the ambient `Q_n^d` (ordered endpoint pairs)
/// that use the edge `e`, by exhaustive enumeration.
pub fn count_pure_paths_through_edge(e: (Vertex, Vertex), n: u32, d: u32) -> Result<u64> {
    let (a, b) = e;
    for w in [a, b] {
        if w.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: w.dim() });
        }
    }
    let h = (a.bits() ^ b.bits()).count_ones();
    if h != d {
        return Err(Error::DistanceMismatch { expected: d, found: h });
    }
    check_fit(n, d)?;
    let dd = binomial(n as u64, d as u64) as u128;
    let work = (1u128 << n)
        * binomial(n as u64, 3 * d as u64) as u128
        * binomial((n - 3 * d) as u64, d as u64) as u128
        * binomial((n - 4 * d) as u64, d as u64) as u128;
    let size = dd.saturating_pow(4).max(work);
    if size > PURE_COUNT_CAP {
        return Err(Error::SizeCap { what: "pure-path enumeration", size: size.min(u64::MAX as u128) as u64, cap: PURE_COUNT_CAP as u64 });
    }
    let key = (a.bits().min(b.bits()), a.bits().max(b.bits()));
    let mut count = 0u64;
    for xb in 0..1u64 << n {
        let x = Vertex::new(xb, n)?;
        for diff in MasksOfWeight::new(n, 3 * d) {
            let y = x.flip(diff);
            count += pure_paths_where(x, y, d, |p| {
                p.edges().any(|(s, t)| (s.bits().min(t.bits()), s.bits().max(t.bits())) == key)
            })
            .len() as u64;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{build_gd, sample_vertex_set};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn pure_path_shape() {
        let p = PurePath::new(v("1110000"), v("0000000"), v("0001000"), v("0000100")).unwrap();
        assert_eq!(p.f1, v("1000000"));
        assert_eq!(p.f2, v("0100000"));
        assert_eq!(p.f3, v("0010000"));
        assert_eq!(p.vertices[0], p.x);
        assert_eq!(p.vertices[7], p.y);
        assert!(p.edges().all(|(a, b)| (a.bits() ^ b.bits()).count_ones() == 1));
        assert_eq!(p.f1.bits() ^ p.f2.bits() ^ p.f3.bits(), p.x.bits() ^ p.y.bits());
        let mut seen = p.vertices.to_vec();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 8);
        assert!(PurePath::new(v("1110000"), v("0000000"), v("1000000"), v("0000100")).is_err());
        assert!(PurePath::new(v("1100000"), v("0000000"), v("0001000"), v("0000100")).is_err());
    }

    #[test]
    fn full_cube_count_at_d1() {
        for n in 5..=8 {
            let full = VertexSet::full(n).unwrap();
            let g = build_gd(&full, 1).unwrap();
            let x = Vertex::zero(n).unwrap();
            let y = Vertex::new(0b10101, n).unwrap();
            let got = enumerate_pure_paths(x, y, &full, &g).unwrap().len() as u32;
            assert_eq!(got, (n - 3) * (n - 4));
        }
    }

    #[test]
    fn no_pure_paths_in_full_g3() {
        let full = VertexSet::full(9).unwrap();
        let g = build_gd(&full, 3).unwrap();
        assert_eq!(g.edge_count(), 0);
        let x = Vertex::zero(9).unwrap();
        let y = Vertex::new(0b111111111, 9).unwrap();
        assert!(enumerate_pure_paths(x, y, &full, &g).unwrap().is_empty());
    }

    #[test]
    fn missing_interior_vertices_block_everything() {
        let n = 6;
        let x = Vertex::zero(n).unwrap();
        let y = Vertex::new(0b111, n).unwrap();
        let set = VertexSet::new(n, [x, y]).unwrap();
        let g = build_gd(&set, 1).unwrap();
        assert!(enumerate_pure_paths(x, y, &set, &g).unwrap().is_empty());
    }

    #[test]
    fn enumerate_rejects_bad_inputs() {
        let full = VertexSet::full(5).unwrap();
        let g = build_gd(&full, 1).unwrap();
        let x = Vertex::zero(5).unwrap();
        assert!(matches!(
            enumerate_pure_paths(x, Vertex::new(0b11, 5).unwrap(), &full, &g),
            Err(Error::DistanceMismatch { expected: 3, found: 2 })
        ));
        let exact = crate::skeleton::build_exact_skeleton(&VertexSet::full(3).unwrap()).unwrap();
        assert!(enumerate_pure_paths(
            Vertex::zero(3).unwrap(),
            Vertex::new(7, 3).unwrap(),
            &VertexSet::full(3).unwrap(),
            &exact
        )
        .is_err());
    }

    #[test]
    fn sampled_paths_respect_graph() {
        let set = sample_vertex_set(9, 0.7, 4).unwrap();
        let g = build_gd(&set, 1).unwrap();
        let ms = set.members();
        let mut checked = 0;
        for &x in ms.iter().take(40) {
            for &y in ms {
                if (x.bits() ^ y.bits()).count_ones() == 3 {
                    for p in enumerate_pure_paths(x, y, &set, &g).unwrap() {
                        assert!(p.edges().all(|(a, b)| g.has_vertex_edge(a, b)));
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 0);
    }

    /// Closed form at `d = 1`: an edge sits at one of the seven positions of
    /// a path, counted by choosing the remaining coordinates.
    fn closed_form_d1(n: u64) -> u64 {
        2 * (4 * binomial(n - 1, 3) * (n - 4) + binomial(n - 1, 2) * (n - 3) * (n - 4))
    }

    /// Double counting: every pure path has seven edges, and `Q_n^d` has
    /// `N D / 2` edges, so an edge-transitive count is `7 P / (N D / 2)`.
    fn double_count(n: u32, d: u32) -> u64 {
        let big_n = 1u64 << n;
        let paths = big_n
            * binomial(n as u64, 3 * d as u64)
            * binomial((n - 3 * d) as u64, d as u64)
            * binomial((n - 4 * d) as u64, d as u64);
        7 * paths / (big_n * binomial(n as u64, d as u64) / 2)
    }

    #[test]
    fn edge_counts_match_closed_form() {
        for n in 5..=6u32 {
            let e = (Vertex::zero(n).unwrap(), Vertex::new(1, n).unwrap());
            let c = count_pure_paths_through_edge(e, n, 1).unwrap();
            assert_eq!(c, closed_form_d1(n as u64));
            assert_eq!(c, double_count(n, 1));
        }
        assert_eq!(closed_form_d1(5), 56);
    }

    #[test]
    fn count_errors() {
        let e = (Vertex::zero(4).unwrap(), Vertex::new(1, 4).unwrap());
        assert!(matches!(count_pure_paths_through_edge(e, 4, 1), Err(Error::PurePathsDoNotFit { .. })));
        let e = (Vertex::zero(6).unwrap(), Vertex::new(3, 6).unwrap());
        assert!(matches!(count_pure_paths_through_edge(e, 6, 1), Err(Error::DistanceMismatch { .. })));
        let e = (Vertex::zero(40).unwrap(), Vertex::new(1, 40).unwrap());
        assert!(count_pure_paths_through_edge(e, 40, 1).unwrap_err().is_resource_cap());
    }
}
