//! Multicommodity flows on `Q_n^d` and on sampled vertex sets.
//!
//! Loads are unit-demand over unordered pairs: a flow between every pair of
//! vertices, each pair carrying total weight one.

mod pure;
mod reroute;

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{binomial, full_mask, BitIter, MasksOfWeight, Vertex};
use crate::error::{Error, Result};
use crate::lp::Rational;
use crate::rng::stream;
use crate::skeleton::SkeletonGraph;

pub use pure::{count_pure_paths_through_edge, enumerate_pure_paths, PurePath, PURE_COUNT_CAP};
pub use reroute::{edges_outside_gd, loop_erase, reroute_flow, route_pair, FailureStage, PairBudget, RerouteConfig, RerouteReport, RouteFailure};

/// Full-cube BFS is limited to this dimension.
pub const BFS_MAX_DIM: u32 = 20;

fn check_odd(n: u32, d: u32) -> Result<()> {
    if n == 0 || n > crate::cube::MAX_DIM {
        return Err(Error::InvalidDimension(n));
    }
    if d == 0 || d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    if d.is_multiple_of(2) {
        return Err(Error::EvenDistance(d));
    }
    Ok(())
}

/// A path in `Q_n^d`: consecutive vertices at Hamming distance exactly `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QndPath {
    n: u32,
    d: u32,
    vertices: Vec<Vertex>,
}

impl QndPath {
    pub fn new(n: u32, d: u32, vertices: Vec<Vertex>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Config("empty path".into()));
        };
        if first.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: first.dim() });
        }
        for w in vertices.windows(2) {
            if w[1].dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: w[1].dim() });
            }
            let h = (w[0].bits() ^ w[1].bits()).count_ones();
            if h != d {
                return Err(Error::DistanceMismatch { expected: d, found: h });
            }
        }
        Ok(Self { n, d, vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn step(&self) -> u32 {
        self.d
    }
}

/// BFS distances from `0` in `Q_n^d`, grouped as `(distance, count)`.
/// Runs over all `2^n` points; see [`weight_class_distances`] for the
/// quotient version.
pub fn qnd_distance_profile(n: u32, d: u32) -> Result<Vec<(u32, u64)>> {
    check_odd(n, d)?;
    if n > BFS_MAX_DIM {
        return Err(Error::SizeCap { what: "BFS dimension", size: n as u64, cap: BFS_MAX_DIM as u64 });
    }
    let steps: Vec<u64> = MasksOfWeight::new(n, d).collect();
    let size = 1usize << n;
    let mut dist = vec![u32::MAX; size];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u64]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x as usize];
        for &s in &steps {
            let y = (x ^ s) as usize;
            if dist[y] == u32::MAX {
                dist[y] = dx + 1;
                queue.push_back(y as u64);
            }
        }
    }
    let unreached = dist.iter().filter(|&&v| v == u32::MAX).count() as u64;
    if unreached > 0 {
        return Err(Error::Disconnected { n, d, unreached });
    }
    let mut profile: BTreeMap<u32, u64> = BTreeMap::new();
    for v in dist {
        *profile.entry(v).or_insert(0) += 1;
    }
    Ok(profile.into_iter().collect())
}

/// Distance from `0` to any point of weight `w`, for `w = 0..=n`.
///
/// Distances in `Q_n^d` depend only on the weight of the difference, so BFS
/// over the `n + 1` weight classes suffices: a step flipping `j` ones and
/// `d - j` zeros moves weight `w` to `w + d - 2j`.
pub fn weight_class_distances(n: u32, d: u32) -> Result<Vec<u32>> {
    check_odd(n, d)?;
    let mut dist = vec![u32::MAX; n as usize + 1];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(w) = queue.pop_front() {
        for j in d.saturating_sub(n - w)..=w.min(d) {
            let nw = (w + d - 2 * j) as usize;
            if dist[nw] == u32::MAX {
                dist[nw] = dist[w as usize] + 1;
                queue.push_back(nw as u32);
            }
        }
    }
    let unreached: u64 =
        (0..=n).filter(|&w| dist[w as usize] == u32::MAX).map(|w| binomial(n as u64, w as u64)).sum();
    if unreached > 0 {
        return Err(Error::Disconnected { n, d, unreached });
    }
    Ok(dist)
}

/// `S = sum_y dist(0, y)` over `{0,1}^n`.
pub fn total_distance(n: u32, d: u32) -> Result<u128> {
    let dist = weight_class_distances(n, d)?;
    Ok((0..=n).map(|w| binomial(n as u64, w as u64) as u128 * dist[w as usize] as u128).sum())
}

/// Per-edge congestion `S / D` of any automorphism-invariant A-flow on
/// `Q_n^d` supported on shortest paths.
pub fn symmetric_flow_congestion(n: u32, d: u32) -> Result<Rational> {
    let s = total_distance(n, d)?;
    Ok(Rational::new(BigInt::from(s), BigInt::from(binomial(n as u64, d as u64))))
}

/// The generic bound `nN/D`.
pub fn generic_congestion_bound(n: u32, d: u32) -> Rational {
    Rational::new(BigInt::from(n as u128) << n, BigInt::from(binomial(n as u64, d as u64)))
}

/// Samples shortest paths in `Q_n^d`.
///
/// For `d = 1` paths are uniform over geodesics. For larger `d` each step
/// is uniform among the neighbours strictly closer to the target.
#[derive(Clone, Debug)]
pub struct BackboneSampler {
    n: u32,
    d: u32,
    dist: Vec<u32>,
}

impl BackboneSampler {
    pub fn new(n: u32, d: u32) -> Result<Self> {
        Ok(Self { n, d, dist: weight_class_distances(n, d)? })
    }

    /// Shortest-path distance between points whose difference has weight `w`.
    pub fn distance(&self, w: u32) -> u32 {
        self.dist[w as usize]
    }

    pub fn sample(&self, x: Vertex, y: Vertex, rng: &mut ChaCha8Rng) -> Result<QndPath> {
        for v in [x, y] {
            if v.dim() != self.n {
                return Err(Error::DimensionMismatch { left: self.n, right: v.dim() });
            }
        }
        if x == y {
            return Err(Error::SameVertex);
        }
        let mut path = vec![x];
        if self.d == 1 {
            let mut bits: Vec<u32> = BitIter(x.bits() ^ y.bits()).collect();
            bits.shuffle(rng);
            let mut cur = x;
            for b in bits {
                cur = cur.flip(1 << b);
                path.push(cur);
            }
        } else {
            let all = full_mask(self.n);
            let mut cur = x;
            while cur != y {
                let diff = cur.bits() ^ y.bits();
                let w = diff.count_ones();
                let target = self.dist[w as usize] - 1;
                let mut options: Vec<(u32, u128)> = Vec::new();
                for j in self.d.saturating_sub(self.n - w)..=w.min(self.d) {
                    if self.dist[(w + self.d - 2 * j) as usize] == target {
                        let c = binomial(w as u64, j as u64) as u128
                            * binomial((self.n - w) as u64, (self.d - j) as u64) as u128;
                        options.push((j, c));
                    }
                }
                let total: u128 = options.iter().map(|o| o.1).sum();
                let mut r = rng.gen_range(0..total);
                let mut j = options[0].0;
                for &(jj, c) in &options {
                    if r < c {
                        j = jj;
                        break;
                    }
                    r -= c;
                }
                let inside: Vec<u32> = BitIter(diff).collect();
                let outside: Vec<u32> = BitIter(!diff & all).collect();
                let mut step = 0u64;
                for i in index::sample(rng, inside.len(), j as usize) {
                    step |= 1 << inside[i];
                }
                for i in index::sample(rng, outside.len(), (self.d - j) as usize) {
                    step |= 1 << outside[i];
                }
                cur = cur.flip(step);
                path.push(cur);
            }
        }
        QndPath::new(self.n, self.d, path)
    }
}

/// One shortest `x`-`y` path in `Q_n^d`.
pub fn sample_backbone_path(x: Vertex, y: Vertex, n: u32, d: u32, rng: &mut ChaCha8Rng) -> Result<QndPath> {
    BackboneSampler::new(n, d)?.sample(x, y, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LedgerMode {
    /// Every unordered pair was routed.
    ExactAllPairs,
    /// A sample of this many pairs; loads are scaled to the whole population.
    Sampled { pairs: u64 },
}

impl std::fmt::Display for LedgerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LedgerMode::ExactAllPairs => f.write_str("exact_all_pairs"),
            LedgerMode::Sampled { pairs } => write!(f, "sampled({pairs})"),
        }
    }
}

/// Per-edge accumulated flow plus pair coverage.
#[derive(Clone, Debug)]
pub struct CongestionLedger {
    n: u32,
    loads: BTreeMap<(u64, u64), Rational>,
    routed: u64,
    attempted: u64,
    mode: LedgerMode,
    population: u64,
}

impl CongestionLedger {
    /// `population` is the number of unordered pairs the flow must serve.
    pub fn new(n: u32, mode: LedgerMode, population: u64) -> Self {
        Self { n, loads: BTreeMap::new(), routed: 0, attempted: 0, mode, population }
    }

    fn key(a: Vertex, b: Vertex) -> (u64, u64) {
        let (a, b) = (a.bits(), b.bits());
        (a.min(b), a.max(b))
    }

    /// Adds `weight` to every edge of the path.
    pub fn add_path(&mut self, path: &[Vertex], weight: &Rational) {
        for w in path.windows(2) {
            *self.loads.entry(Self::key(w[0], w[1])).or_insert_with(Rational::zero) += weight;
        }
    }

    pub fn add_edge_load(&mut self, a: Vertex, b: Vertex, weight: &Rational) {
        *self.loads.entry(Self::key(a, b)).or_insert_with(Rational::zero) += weight;
    }

    pub fn record_pair(&mut self, routed: bool) {
        self.attempted += 1;
        if routed {
            self.routed += 1;
        }
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn routed(&self) -> u64 {
        self.routed
    }

    pub fn attempted(&self) -> u64 {
        self.attempted
    }

    pub fn failures(&self) -> u64 {
        self.attempted - self.routed
    }

    pub fn mode(&self) -> LedgerMode {
        self.mode
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.loads.len()
    }

    /// Factor from recorded loads to population loads.
    pub fn scale(&self) -> Rational {
        match self.mode {
            LedgerMode::ExactAllPairs => Rational::one(),
            LedgerMode::Sampled { pairs } => {
                Rational::new(BigInt::from(self.population), BigInt::from(pairs.max(1)))
            }
        }
    }

    /// Raw recorded loads keyed by `(min, max)` bitmask.
    pub fn raw_loads(&self) -> &BTreeMap<(u64, u64), Rational> {
        &self.loads
    }

    /// Loads scaled to the population, with endpoints as vertices.
    pub fn loads(&self) -> impl Iterator<Item = (Vertex, Vertex, Rational)> + '_ {
        let s = self.scale();
        let n = self.n;
        self.loads.iter().map(move |(&(a, b), l)| {
            (Vertex::new(a, n).expect("ledger vertex"), Vertex::new(b, n).expect("ledger vertex"), l * &s)
        })
    }

    pub fn load(&self, a: Vertex, b: Vertex) -> Rational {
        self.loads.get(&Self::key(a, b)).map(|l| l * self.scale()).unwrap_or_else(Rational::zero)
    }

    /// Largest population-scaled edge load.
    pub fn max_load(&self) -> Option<Rational> {
        self.loads.values().max().map(|m| m * self.scale())
    }

    /// Combines ledgers built over disjoint pair sets.
    pub fn merge(&mut self, other: &CongestionLedger) -> Result<()> {
        if self.n != other.n || self.mode != other.mode || self.population != other.population {
            return Err(Error::Config("merging incompatible ledgers".into()));
        }
        for (k, l) in &other.loads {
            *self.loads.entry(*k).or_insert_with(Rational::zero) += l;
        }
        self.routed += other.routed;
        self.attempted += other.attempted;
        Ok(())
    }

    /// CSV with a `schema=1` line, then `edge_u_hex,edge_v_hex,load_numerator,load_denominator`
    /// with population-scaled loads.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(["schema=1"]).expect("in-memory csv");
        w.write_record(["edge_u_hex", "edge_v_hex", "load_numerator", "load_denominator"]).expect("in-memory csv");
        for (a, b, l) in self.loads() {
            w.write_record([a.to_hex(), b.to_hex(), l.numer().to_string(), l.denom().to_string()])
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }

    pub fn summary(&self, vertex_count: usize) -> LedgerSummary {
        let bound = expansion_lower_bound(self, vertex_count).ok();
        LedgerSummary {
            schema: 1,
            mode: self.mode.to_string(),
            max_load: self.max_load().map(|m| m.to_string()),
            routed: self.routed,
            attempted: self.attempted,
            edges: self.loads.len() as u64,
            bound: bound.as_ref().map(|b| b.value.to_string()),
            bound_decimal: bound.as_ref().map(|b| rational_to_f64(&b.value)),
            bound_kind: bound.map(|b| if b.certified { "certified" } else { "estimate" }.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub schema: u32,
    pub mode: String,
    pub max_load: Option<String>,
    pub routed: u64,
    pub attempted: u64,
    pub edges: u64,
    pub bound: Option<String>,
    pub bound_decimal: Option<f64>,
    pub bound_kind: Option<String>,
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Lower bound `|V| / (2 max_load)` on edge expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowBound {
    pub value: Rational,
    /// True only for an exact all-pairs ledger with every pair routed.
    pub certified: bool,
}

pub fn expansion_lower_bound(ledger: &CongestionLedger, vertex_count: usize) -> Result<FlowBound> {
    let Some(max) = ledger.max_load() else {
        return Err(Error::EmptyLedger);
    };
    if max.is_zero() {
        return Err(Error::EmptyLedger);
    }
    let value = Rational::from_integer(BigInt::from(vertex_count)) / (max * BigInt::from(2));
    let certified = ledger.mode == LedgerMode::ExactAllPairs
        && ledger.failures() == 0
        && ledger.attempted == ledger.population;
    Ok(FlowBound { value, certified })
}

/// All unordered pairs of `{0,1}^n`, lexicographic by bitmask.
pub fn all_cube_pairs(n: u32) -> Result<Vec<(Vertex, Vertex)>> {
    if n > 16 {
        return Err(Error::SizeCap { what: "all-pairs dimension", size: n as u64, cap: 16 });
    }
    let size = 1u64 << n;
    let v = |b| Vertex::new(b, n).expect("mask below 2^n");
    Ok((0..size).flat_map(|a| (a + 1..size).map(move |b| (v(a), v(b)))).collect())
}

/// Routes each pair along one sampled backbone path, weight one per pair.
/// Pair `i` uses stream `(seed, i)`.
pub fn select_paths_randomized(
    n: u32,
    d: u32,
    pairs: &[(Vertex, Vertex)],
    seed: u64,
    mode: LedgerMode,
) -> Result<CongestionLedger> {
    let sampler = BackboneSampler::new(n, d)?;
    let population = if n < 32 { let s = 1u64 << n; s * (s - 1) / 2 } else { u64::MAX };
    let route = |(i, &(x, y)): (usize, &(Vertex, Vertex))| -> Result<QndPath> {
        sampler.sample(x, y, &mut stream(seed, i as u64))
    };
    #[cfg(feature = "parallel")]
    let paths: Vec<Result<QndPath>> = pairs.par_iter().enumerate().map(route).collect();
    #[cfg(not(feature = "parallel"))]
    let paths: Vec<Result<QndPath>> = pairs.iter().enumerate().map(route).collect();
    let mut ledger = CongestionLedger::new(n, mode, population);
    let one = Rational::one();
    for p in paths {
        ledger.add_path(p?.vertices(), &one);
        ledger.record_pair(true);
    }
    Ok(ledger)
}

/// Exact uniform shortest-path flow on `Q_n`: each pair spreads its unit
/// evenly over all its geodesics. An edge taken at step `j` of a geodesic
/// between points at distance `k` lies on `j! (k-1-j)!` of the `k!`
/// geodesics.
pub fn uniform_hypercube_flow(n: u32) -> Result<CongestionLedger> {
    if n == 0 || n > 8 {
        return Err(Error::SizeCap { what: "uniform flow dimension", size: n as u64, cap: 8 });
    }
    let size = 1u64 << n;
    let mut ledger = CongestionLedger::new(n, LedgerMode::ExactAllPairs, size * (size - 1) / 2);
    let mut shares: Vec<Vec<Rational>> = Vec::new();
    for k in 0..=n as u64 {
        shares.push(
            (0..k)
                .map(|j| Rational::new(BigInt::one(), BigInt::from(k * binomial(k - 1, j))))
                .collect(),
        );
    }
    for a in 0..size {
        for b in a + 1..size {
            let diff = a ^ b;
            let k = diff.count_ones() as usize;
            let base = a & !diff;
            // every point of the subcube, every bit it can still flip toward b
            for s in crate::cube::Submasks::new(diff) {
                let from = base | s;
                let progressed = (from ^ a).count_ones() as usize;
                for bit in BitIter(from ^ b) {
                    let to = from ^ (1 << bit);
                    ledger.add_edge_load(
                        Vertex::new(from, n)?,
                        Vertex::new(to, n)?,
                        &shares[k][progressed],
                    );
                }
            }
            ledger.record_pair(true);
        }
    }
    Ok(ledger)
}

/// Exact all-pairs flow on a graph: each pair sends its unit along one BFS
/// shortest path, parents chosen as the lowest-index vertex that reaches
/// them first. Unreachable pairs are recorded as failures.
pub fn shortest_path_flow(g: &SkeletonGraph) -> CongestionLedger {
    let k = g.len();
    let members = g.vertices().members();
    let population = (k as u64) * (k as u64).saturating_sub(1) / 2;
    let mut ledger = CongestionLedger::new(g.vertices().dim(), LedgerMode::ExactAllPairs, population);
    let one = Rational::one();
    for s in 0..k {
        let mut parent = vec![usize::MAX; k];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbours(v) {
                let w = w as usize;
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        for t in s + 1..k {
            if parent[t] == usize::MAX {
                ledger.record_pair(false);
                continue;
            }
            let mut v = t;
            while v != s {
                ledger.add_edge_load(members[v], members[parent[v]], &one);
                v = parent[v];
            }
            ledger.record_pair(true);
        }
    }
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(qnd_distance_profile(3, 1).unwrap(), vec![(0, 1), (1, 3), (2, 3), (3, 1)]);
        assert_eq!(qnd_distance_profile(2, 1).unwrap(), vec![(0, 1), (1, 2), (2, 1)]);
        let p = qnd_distance_profile(4, 3).unwrap();
        assert_eq!(p.iter().map(|x| x.1).sum::<u64>(), 16);
        assert!(matches!(qnd_distance_profile(4, 2), Err(Error::EvenDistance(2))));
        assert!(matches!(qnd_distance_profile(3, 3), Err(Error::Disconnected { unreached: 6, .. })));
    }

    #[test]
    fn weight_classes_match_full_bfs() {
        for n in 1..=12u32 {
            for d in (1..=n).step_by(2) {
                let full = qnd_distance_profile(n, d);
                let quotient = weight_class_distances(n, d);
                match (full, quotient) {
                    (Ok(p), Ok(dist)) => {
                        let mut grouped: BTreeMap<u32, u64> = BTreeMap::new();
                        for w in 0..=n {
                            *grouped.entry(dist[w as usize]).or_insert(0) += binomial(n as u64, w as u64);
                        }
                        assert_eq!(grouped.into_iter().collect::<Vec<_>>(), p, "n={n} d={d}");
                    }
                    (Err(a), Err(b)) => assert_eq!(a, b),
                    (a, b) => panic!("n={n} d={d}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn symmetric_congestion_examples() {
        assert_eq!(symmetric_flow_congestion(3, 1).unwrap(), Rational::from_integer(4.into()));
        assert_eq!(symmetric_flow_congestion(1, 1).unwrap(), Rational::one());
        assert_eq!(generic_congestion_bound(3, 1), Rational::from_integer(8.into()));
        let c = symmetric_flow_congestion(5, 3).unwrap();
        assert!(c <= generic_congestion_bound(5, 3));
        assert_eq!(generic_congestion_bound(5, 3), Rational::from_integer(16.into()));
    }

    #[test]
    fn backbone_lengths_match_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, d) in [(6, 1), (7, 3), (9, 3), (9, 5), (10, 7)] {
            let s = BackboneSampler::new(n, d).unwrap();
            for _ in 0..200 {
                let x = Vertex::new(rng.gen_range(0..1u64 << n), n).unwrap();
                let y = Vertex::new(rng.gen_range(0..1u64 << n), n).unwrap();
                if x == y {
                    continue;
                }
                let p = s.sample(x, y, &mut rng).unwrap();
                assert_eq!(p.vertices()[0], x);
                assert_eq!(*p.vertices().last().unwrap(), y);
                assert_eq!(p.len() as u32, s.distance((x.bits() ^ y.bits()).count_ones()));
                if d == 1 {
                    assert_eq!(p.len() as u32, (x.bits() ^ y.bits()).count_ones());
                }
            }
        }
    }

    #[test]
    fn backbone_single_edge_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = sample_backbone_path(v("00000"), v("11100"), 5, 3, &mut rng).unwrap();
        assert_eq!(p.vertices(), &[v("00000"), v("11100")]);
        assert!(sample_backbone_path(v("000"), v("000"), 3, 1, &mut rng).is_err());
        assert!(matches!(sample_backbone_path(v("000"), v("011"), 3, 2, &mut rng), Err(Error::EvenDistance(2))));
    }

    #[test]
    fn uniform_flow_is_edge_uniform_for_small_n() {
        for n in 1..=5 {
            let ledger = uniform_hypercube_flow(n).unwrap();
            assert_eq!(ledger.edge_count(), (n as usize) << (n - 1));
            let c = symmetric_flow_congestion(n, 1).unwrap();
            assert!(ledger.loads().all(|(_, _, l)| l == c), "n={n}");
        }
    }

    #[test]
    fn single_pair_loads_at_most_one() {
        let pairs = [(v("000000"), v("111111"))];
        let l = select_paths_randomized(6, 1, &pairs, 1, LedgerMode::Sampled { pairs: 1 }).unwrap();
        assert!(l.raw_loads().values().all(|x| *x <= Rational::one()));
        assert_eq!(l.raw_loads().len(), 6);
    }

    #[test]
    fn bound_formula_and_modes() {
        let mut l = CongestionLedger::new(2, LedgerMode::ExactAllPairs, 1);
        assert!(matches!(expansion_lower_bound(&l, 2), Err(Error::EmptyLedger)));
        l.add_path(&[v("00"), v("01")], &Rational::one());
        l.record_pair(true);
        let b = expansion_lower_bound(&l, 2).unwrap();
        assert_eq!(b, FlowBound { value: Rational::one(), certified: true });
        let mut s = CongestionLedger::new(2, LedgerMode::Sampled { pairs: 1 }, 1);
        s.add_path(&[v("00"), v("01")], &Rational::one());
        s.record_pair(true);
        assert!(!expansion_lower_bound(&s, 2).unwrap().certified);
    }

    #[test]
    fn full_cube_uniform_flow_certifies_one() {
        // Harper: h(Q_n) = 1, and the symmetric flow attains it
        for n in 2..=5 {
            let l = uniform_hypercube_flow(n).unwrap();
            let b = expansion_lower_bound(&l, 1 << n).unwrap();
            assert!(b.certified);
            assert_eq!(b.value, Rational::one());
        }
    }

    #[test]
    fn ledger_csv_has_schema_and_columns() {
        let l = uniform_hypercube_flow(2).unwrap();
        let csv = l.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("schema=1"));
        assert_eq!(lines.next(), Some("edge_u_hex,edge_v_hex,load_numerator,load_denominator"));
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn shortest_path_flow_on_square() {
        // antipodal pairs take the lowest-index parent, loading edge 0-1 three times
        let g = crate::skeleton::hypercube_graph(2).unwrap();
        let l = shortest_path_flow(&g);
        let v = |b| Vertex::new(b, 2).unwrap();
        assert_eq!(l.load(v(0), v(1)), Rational::from_integer(3.into()));
        assert_eq!(l.load(v(0), v(2)), Rational::from_integer(2.into()));
        assert_eq!(l.load(v(2), v(3)), Rational::one());
        let b = expansion_lower_bound(&l, 4).unwrap();
        assert!(b.certified);
        assert_eq!(b.value, Rational::new(2.into(), 3.into()));
    }

    #[test]
    fn shortest_path_flow_reports_unreachable_pairs() {
        let set = crate::skeleton::VertexSet::from_masks(3, [0b000, 0b001, 0b110, 0b111]).unwrap();
        let g = crate::skeleton::build_gd(&set, 1).unwrap();
        let l = shortest_path_flow(&g);
        assert_eq!((l.routed(), l.failures()), (2, 4));
        assert!(!expansion_lower_bound(&l, 4).unwrap().certified);
    }
}
