//! Property suites run by `polylab verify`. Each suite counts trials and
//! violations; a suite passes iff it has no violations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::seq::index;
use rand::Rng;

use crate::cube::{binomial, grid_partition, hamming, project, Vertex};
use crate::error::{Error, Result};
use crate::expansion::exact_cheeger;
use crate::flow::{
    count_pure_paths_through_edge, edges_outside_gd, enumerate_pure_paths, expansion_lower_bound,
    generic_congestion_bound, qnd_distance_profile, reroute_flow, select_paths_randomized, shortest_path_flow,
    symmetric_flow_congestion, uniform_hypercube_flow, weight_class_distances, all_cube_pairs, LedgerMode, PairBudget,
    RerouteConfig,
};
use crate::lab::{Field, Table};
use crate::lp::Rational;
use crate::rng::stream;
use crate::skeleton::{
    build_exact_skeleton, build_gd, cube_criterion_edge, full_degree_vertices, nonedge_filter_a, nonedge_filter_b,
    sample_vertex_set, SkeletonGraph, VertexSet,
};

/// Identifier of a property suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Randomized backbone selection on `Q_6^1` stays within twice the
    /// symmetric congestion.
    PathSelection,
    /// Cyclic-shift grid partition.
    GridPartition,
    /// Cube-criterion edges are skeleton edges.
    EdgeCriterion,
    /// Non-edge certificates never fire on skeleton edges.
    NonEdgeFilters,
    /// Boundaries shrink under projection.
    Projection,
    /// Symmetric `Q_n^d` congestion against `nN/D`.
    SymmetricFlow,
    /// Per-edge pure-path counts.
    PurePathCount,
    /// Pure-path counts in sampled `G_1(V)` against their expectation.
    PurePathEmpirical,
    /// Full-degree vertices and their certified degree.
    FullDegree,
    /// Certified flow bounds never exceed the exact Cheeger constant.
    FlowSoundness,
}

pub const SUITES: [Suite; 10] = [
    Suite::PathSelection,
    Suite::GridPartition,
    Suite::EdgeCriterion,
    Suite::NonEdgeFilters,
    Suite::Projection,
    Suite::SymmetricFlow,
    Suite::PurePathCount,
    Suite::PurePathEmpirical,
    Suite::FullDegree,
    Suite::FlowSoundness,
];

impl Suite {
    pub fn id(self) -> &'static str {
        match self {
            Suite::PathSelection => "2.3",
            Suite::GridPartition => "2.4-partition",
            Suite::EdgeCriterion => "2.6",
            Suite::NonEdgeFilters => "2.7",
            Suite::Projection => "2.9",
            Suite::SymmetricFlow => "3.1",
            Suite::PurePathCount => "3.3",
            Suite::PurePathEmpirical => "3.4-empirical",
            Suite::FullDegree => "2.8a",
            Suite::FlowSoundness => "2.2",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SUITES
            .into_iter()
            .find(|x| x.id() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown lemma id {s:?}")))
    }
}

/// Outcome of one suite. Monte Carlo suites count failed trials separately
/// from violations; a violation there means the suite threshold was missed.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub trials: u64,
    pub trial_failures: u64,
    pub violations: u64,
    pub notes: Vec<(String, Field)>,
}

impl VerifyReport {
    fn new(suite: Suite) -> Self {
        Self { suite, trials: 0, trial_failures: 0, violations: 0, notes: Vec::new() }
    }

    fn note(&mut self, key: impl Into<String>, value: impl Into<Field>) {
        self.notes.push((key.into(), value.into()));
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// `key,value` rows: the counters first, then the suite notes.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["lemma", "key", "value"]);
        let mut rows: Vec<(String, Field)> = vec![
            ("trials".into(), self.trials.into()),
            ("trial_failures".into(), self.trial_failures.into()),
            ("violations".into(), self.violations.into()),
            ("passed".into(), self.passed().into()),
        ];
        rows.extend(self.notes.iter().cloned());
        for (k, v) in rows {
            t.push(vec![self.suite.id().into(), k.into(), v]);
        }
        t
    }
}

/// Seed and optional trial count shared by all suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: Option<u32>,
}

pub fn run(suite: Suite, opts: VerifyOptions) -> Result<VerifyReport> {
    match suite {
        Suite::PathSelection => path_selection(opts),
        Suite::GridPartition => grid_partition_suite(),
        Suite::EdgeCriterion | Suite::NonEdgeFilters => {
            let (edge, filters) = criterion_soundness(opts)?;
            Ok(if suite == Suite::EdgeCriterion { edge } else { filters })
        }
        Suite::Projection => projection(opts),
        Suite::SymmetricFlow => symmetric_flow(),
        Suite::PurePathCount => pure_path_count(opts),
        Suite::PurePathEmpirical => pure_path_empirical(opts),
        Suite::FullDegree => full_degree(opts),
        Suite::FlowSoundness => flow_soundness(opts),
    }
}

/// At least `need` of `trials` must succeed.
fn threshold(report: &mut VerifyReport, need_per_20: u64) {
    let ok = report.trials - report.trial_failures;
    if ok * 20 < need_per_20 * report.trials {
        report.violations += 1;
    }
}

const PROBS: [f64; 3] = [0.3, 0.5, 0.8];

/// Instance `i` of the shared soundness sweep.
pub fn sweep_instance(i: u64, base_seed: u64) -> (u32, f64, u64) {
    (3 + (i % 4) as u32, PROBS[((i / 4) % 3) as usize], base_seed.wrapping_add(i))
}

fn path_selection(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::PathSelection);
    let (n, d) = (6, 1);
    let c = symmetric_flow_congestion(n, d)?;
    let limit = &c * BigInt::from(2);
    let pairs = all_cube_pairs(n)?;
    let mut worst = Rational::from_integer(BigInt::from(0));
    for t in 0..opts.trials.unwrap_or(20) as u64 {
        let ledger = select_paths_randomized(n, d, &pairs, opts.seed.wrapping_add(t), LedgerMode::ExactAllPairs)?;
        let max = ledger.max_load().unwrap_or_default();
        r.trials += 1;
        if max > limit {
            r.trial_failures += 1;
        }
        worst = worst.max(max);
    }
    threshold(&mut r, 19);
    r.note("C", &c);
    r.note("two_C", &limit);
    r.note("worst_max_load", &worst);
    Ok(r)
}

fn grid_partition_suite() -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::GridPartition);
    for n in 1..=50u32 {
        for m in 1..=n {
            r.trials += 1;
            let classes = grid_partition(m, n)?;
            let mut seen = BTreeSet::new();
            let mut ok = classes.len() == n as usize;
            for class in &classes {
                let rows: BTreeSet<u32> = class.iter().map(|c| c.0).collect();
                let cols: BTreeSet<u32> = class.iter().map(|c| c.1).collect();
                ok &= class.len() == m as usize && rows.len() == class.len() && cols.len() == class.len();
                for &(a, b) in class {
                    ok &= (1..=m).contains(&a) && (1..=n).contains(&b) && seen.insert((a, b));
                }
            }
            ok &= seen.len() == (m * n) as usize;
            if !ok {
                r.violations += 1;
            }
        }
    }
    Ok(r)
}

/// Runs the edge-criterion and non-edge-filter checks over the same 200
/// exact skeletons.
pub fn criterion_soundness(opts: VerifyOptions) -> Result<(VerifyReport, VerifyReport)> {
    let mut edge = VerifyReport::new(Suite::EdgeCriterion);
    let mut filt = VerifyReport::new(Suite::NonEdgeFilters);
    let (mut criterion_edges, mut skeleton_edges, mut certified_nonedges, mut nonedges) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..opts.trials.unwrap_or(200) as u64 {
        let (n, p, seed) = sweep_instance(i, opts.seed);
        let set = sample_vertex_set(n, p, seed)?;
        edge.trials += 1;
        filt.trials += 1;
        if set.len() < 2 {
            continue;
        }
        let g = build_exact_skeleton(&set)?;
        let m = set.members();
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                let (u, v) = (m[a], m[b]);
                let is_edge = g.has_edge(a, b);
                if cube_criterion_edge(u, v, &set)? {
                    criterion_edges += 1;
                    if !is_edge {
                        edge.violations += 1;
                    }
                }
                let certified =
                    nonedge_filter_a(u, v, &set)? || nonedge_filter_a(v, u, &set)? || nonedge_filter_b(u, v, &set)?.is_some();
                if is_edge {
                    skeleton_edges += 1;
                    if certified {
                        filt.violations += 1;
                    }
                } else {
                    nonedges += 1;
                    certified_nonedges += certified as u64;
                }
            }
        }
    }
    edge.note("criterion_edges", criterion_edges);
    edge.note("skeleton_edges", skeleton_edges);
    filt.note("skeleton_edges", skeleton_edges);
    filt.note("nonedges", nonedges);
    filt.note("certified_nonedges", certified_nonedges);
    Ok((edge, filt))
}

fn boundary_of(g: &SkeletonGraph, inside: &BTreeSet<u64>) -> u64 {
    g.vertex_edges().filter(|(a, b)| inside.contains(&a.bits()) != inside.contains(&b.bits())).count() as u64
}

fn projection(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::Projection);
    let mut tight = 0u64;
    let mut i = 0u64;
    while r.trials < opts.trials.unwrap_or(50) as u64 {
        let n = 4 + (i % 3) as u32;
        let d = 1 + ((i / 3) % 2) as u32;
        let p = PROBS[((i / 6) % 3) as usize];
        let seed = opts.seed.wrapping_add(i);
        i += 1;
        let set = sample_vertex_set(n, p, seed)?;
        if set.len() < 2 {
            continue;
        }
        let mut rng = stream(seed, 0);
        let a: BTreeSet<u64> = set.members().iter().filter(|_| rng.gen_bool(0.5)).map(|v| v.bits()).collect();
        let proj = |bits: u64| -> Result<u64> { Ok(project(Vertex::new(bits, n)?, d)?.bits()) };
        let w = VertexSet::from_masks(n - d, set.members().iter().map(|v| proj(v.bits())).collect::<Result<Vec<_>>>()?)?;
        let b: BTreeSet<u64> = a.iter().map(|&x| proj(x)).collect::<Result<_>>()?;
        let g = build_exact_skeleton(&set)?;
        let h = build_exact_skeleton(&w)?;
        let (lhs, rhs) = (boundary_of(&g, &a), boundary_of(&h, &b));
        r.trials += 1;
        if lhs < rhs {
            r.violations += 1;
        }
        tight += (lhs == rhs) as u64;
    }
    r.note("tight_instances", tight);
    Ok(r)
}

fn symmetric_flow() -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::SymmetricFlow);
    let mut max_ratio = 0.0f64;
    for n in 2..=10u32 {
        for d in (1..n).step_by(2) {
            r.trials += 1;
            let profile = qnd_distance_profile(n, d)?;
            let sd = symmetric_flow_congestion(n, d)?;
            let bound = generic_congestion_bound(n, d);
            let max_dist = profile.last().map(|x| x.0).unwrap_or(0);
            let from_classes: u128 = weight_class_distances(n, d)?
                .iter()
                .enumerate()
                .map(|(w, &dist)| binomial(n as u64, w as u64) as u128 * dist as u128)
                .sum();
            let from_bfs: u128 = profile.iter().map(|&(k, c)| k as u128 * c as u128).sum();
            if sd > bound || max_dist > n || from_classes != from_bfs {
                r.violations += 1;
            }
            max_ratio = max_ratio.max((sd / bound).to_f64().unwrap_or(f64::NAN));
        }
    }
    r.note("max_ratio_SD_over_nN_D", max_ratio);
    // every edge of Q_n carries S/D under the uniform geodesic flow
    for n in 1..=6u32 {
        r.trials += 1;
        let ledger = uniform_hypercube_flow(n)?;
        let sd = symmetric_flow_congestion(n, 1)?;
        let edges = n as usize * (1usize << (n - 1));
        if ledger.edge_count() != edges || ledger.loads().any(|(_, _, l)| l != sd) {
            r.violations += 1;
        }
    }
    let c31 = symmetric_flow_congestion(3, 1)?;
    r.trials += 1;
    if c31 != Rational::from_integer(BigInt::from(4)) {
        r.violations += 1;
    }
    r.note("S_over_D_n3_d1", &c31);
    Ok(r)
}

/// Per-edge pure-path counts at `d = 1` in closed form, counting ordered
/// endpoint pairs.
pub fn pure_path_count_closed_form(n: u64) -> u64 {
    2 * (4 * binomial(n - 1, 3) * (n - 4) + binomial(n - 1, 2) * (n - 3) * (n - 4))
}

fn random_edge(n: u32, d: u32, rng: &mut impl Rng) -> Result<(Vertex, Vertex)> {
    let x = Vertex::new(rng.gen_range(0..1u64 << n), n)?;
    let dir: u64 = index::sample(rng, n as usize, d as usize).iter().map(|b| 1u64 << b).sum();
    Ok((x, x.flip(dir)))
}

fn pure_path_count(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::PurePathCount);
    let mut points = Vec::new();
    for (n, d) in [(5u32, 1u32), (6, 1), (7, 1)] {
        let mut rng = stream(opts.seed, n as u64);
        let big_d = binomial(n as u64, d as u64);
        let cap = 14u128 * 3u128.pow(3 * d) * (big_d as u128).pow(4);
        let mut counts = BTreeSet::new();
        for _ in 0..5 {
            r.trials += 1;
            let c = count_pure_paths_through_edge(random_edge(n, d, &mut rng)?, n, d)?;
            if c as u128 > cap {
                r.violations += 1;
            }
            counts.insert(c);
        }
        if counts.len() != 1 {
            r.violations += 1;
        }
        let c = *counts.iter().next().expect("five samples");
        r.note(format!("count_n{n}_d{d}"), c);
        r.note(format!("closed_form_n{n}_d{d}"), pure_path_count_closed_form(n as u64));
        r.note(format!("cap_n{n}_d{d}"), cap.to_string());
        points.push((big_d as f64, c as f64));
    }
    for w in points.windows(2) {
        let e = (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln();
        r.note(format!("exponent_D{}_to_D{}", w[0].0, w[1].0), e);
    }
    r.note("exponent_fit", log_log_slope(&points));
    Ok(r)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean number of pure paths in `G_1(V)` over the given pairs.
fn mean_pure_paths(set: &VertexSet, pairs: &[(Vertex, Vertex)]) -> Result<f64> {
    let g = build_gd(set, 1)?;
    let mut total = 0usize;
    for &(x, y) in pairs {
        total += enumerate_pure_paths(x, y, set, &g)?.len();
    }
    Ok(total as f64 / pairs.len().max(1) as f64)
}

fn distance3_pairs(set: &VertexSet) -> Vec<(Vertex, Vertex)> {
    let m = set.members();
    let mut out = Vec::new();
    for (i, &x) in m.iter().enumerate() {
        for &y in &m[i + 1..] {
            if (x.bits() ^ y.bits()).count_ones() == 3 {
                out.push((x, y));
            }
        }
    }
    out
}

fn within(mean: f64, expected: f64, tol: f64) -> bool {
    (mean - expected).abs() <= tol * expected
}

/// Sampled sets in the `n = 6` expectation check.
pub const N6_SETS: u64 = 400;

fn pure_path_empirical(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::PurePathEmpirical);
    for n in 5..=8u32 {
        let set = VertexSet::full(n)?;
        let g = build_gd(&set, 1)?;
        let expected = ((n - 3) * (n - 4)) as usize;
        let mut mismatched = 0u64;
        for (x, y) in distance3_pairs(&set) {
            r.trials += 1;
            if enumerate_pure_paths(x, y, &set, &g)?.len() != expected {
                mismatched += 1;
            }
        }
        r.violations += mismatched;
        r.note(format!("full_n{n}_expected"), expected);
    }

    let (n, p) = (16u32, 0.7f64);
    let set = sample_vertex_set(n, p, opts.seed)?;
    let mut rng = stream(opts.seed, 0);
    let m = set.members();
    let mut pairs = Vec::new();
    while pairs.len() < opts.trials.unwrap_or(100) as usize {
        let x = m[rng.gen_range(0..m.len())];
        let dir: u64 = index::sample(&mut rng, n as usize, 3).iter().map(|b| 1u64 << b).sum();
        let y = x.flip(dir);
        if set.contains(y) {
            pairs.push((x, y));
        }
    }
    let expected = ((n - 3) * (n - 4)) as f64 * p.powi(6);
    let mean = mean_pure_paths(&set, &pairs)?;
    r.trials += 1;
    if !within(mean, expected, 0.2) {
        r.violations += 1;
    }
    r.note("sampled_n16_pairs", pairs.len());
    r.note("sampled_n16_mean_Y", mean);
    r.note("sampled_n16_expected", expected);

    // exhaustive over all distance-3 pairs of sampled sets at n = 6; pairs
    // within one set are strongly correlated, hence the set count
    let (n, p) = (6u32, 0.7f64);
    let (mut total, mut count) = (0.0, 0usize);
    for s in 0..N6_SETS {
        let set = sample_vertex_set(n, p, opts.seed.wrapping_add(s))?;
        let pairs = distance3_pairs(&set);
        total += mean_pure_paths(&set, &pairs)? * pairs.len() as f64;
        count += pairs.len();
    }
    let expected = ((n - 3) * (n - 4)) as f64 * p.powi(6);
    let mean = total / count.max(1) as f64;
    r.trials += 1;
    if !within(mean, expected, 0.1) {
        r.violations += 1;
    }
    r.note("sampled_n6_sets", N6_SETS);
    r.note("sampled_n6_pairs", count);
    r.note("sampled_n6_mean_Y", mean);
    r.note("sampled_n6_expected", expected);
    Ok(r)
}

/// Certified degree of a full-degree vertex: unit neighbours pass the cube
/// criterion and every other member is a filter-(a) non-edge. `None` when
/// some pair is left uncertified.
pub fn certified_full_degree(set: &VertexSet, x: Vertex) -> Result<Option<u32>> {
    let mut degree = 0;
    for &v in set.members() {
        if v == x {
            continue;
        }
        if hamming(x, v)? == 1 {
            if !cube_criterion_edge(x, v, set)? {
                return Ok(None);
            }
            degree += 1;
        } else if !nonedge_filter_a(x, v, set)? {
            return Ok(None);
        }
    }
    Ok(Some(degree))
}

fn full_degree(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::FullDegree);
    let (n, p) = (12u32, 0.8);
    let mut found = Vec::new();
    for t in 0..opts.trials.unwrap_or(10) as u64 {
        let set = sample_vertex_set(n, p, opts.seed.wrapping_add(t))?;
        let full = full_degree_vertices(&set);
        r.trials += 1;
        if full.is_empty() {
            r.trial_failures += 1;
        }
        for &x in &full {
            if certified_full_degree(&set, x)? != Some(n) {
                r.violations += 1;
            }
        }
        found.push(full.len().to_string());
    }
    threshold(&mut r, 18);
    r.note("full_degree_counts", found.join(";"));
    Ok(r)
}

/// Instances for the flow-soundness suite: full cubes of dimension 2..4
/// and `random` sampled sets with `2 <= |V| <= 16`.
pub fn soundness_instances(seed: u64, random: usize) -> Result<Vec<VertexSet>> {
    let mut out: Vec<VertexSet> = (2..=4).map(VertexSet::full).collect::<Result<_>>()?;
    let mut i = 0u64;
    let mut taken = 0;
    while taken < random {
        let n = 3 + (i % 2) as u32;
        let p = PROBS[((i / 2) % 3) as usize];
        let set = sample_vertex_set(n, p, seed.wrapping_add(i))?;
        i += 1;
        if (2..=16).contains(&set.len()) {
            out.push(set);
            taken += 1;
        }
    }
    Ok(out)
}

fn flow_soundness(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(Suite::FlowSoundness);
    let mut reroute_certificates = 0u64;
    let mut bfs_certificates = 0u64;
    let mut tightest = f64::INFINITY;
    for set in soundness_instances(opts.seed, opts.trials.unwrap_or(50) as usize)? {
        r.trials += 1;
        let g = build_exact_skeleton(&set)?;
        let h = exact_cheeger(&g)?.value;
        let config =
            RerouteConfig { d: 1, repair_with_g1: false, alpha: 0.1, budget: PairBudget::AllPairs, seed: opts.seed };
        let routed = reroute_flow(&set, &config)?;
        if !edges_outside_gd(&routed.ledger, &set, 1).is_empty() {
            r.violations += 1;
        }
        if let Ok(b) = expansion_lower_bound(&routed.ledger, set.len()) {
            if b.certified {
                reroute_certificates += 1;
                if b.value > h {
                    r.violations += 1;
                }
            }
        }
        let ledger = shortest_path_flow(&g);
        let b = expansion_lower_bound(&ledger, set.len())?;
        if b.certified {
            bfs_certificates += 1;
            if b.value > h {
                r.violations += 1;
            }
            tightest = tightest.min((&h - &b.value).to_f64().unwrap_or(f64::NAN));
        }
    }
    // the full 5-cube is the smallest where pure paths exist; its expansion is 1
    let full5 = VertexSet::full(5)?;
    let config = RerouteConfig { d: 1, repair_with_g1: false, alpha: 0.1, budget: PairBudget::AllPairs, seed: opts.seed };
    let routed = reroute_flow(&full5, &config)?;
    let b = expansion_lower_bound(&routed.ledger, full5.len())?;
    r.trials += 1;
    if !b.certified || b.value > Rational::one() || !edges_outside_gd(&routed.ledger, &full5, 1).is_empty() {
        r.violations += 1;
    }
    r.note("reroute_certificates", reroute_certificates);
    r.note("bfs_flow_certificates", bfs_certificates);
    r.note("min_gap_cheeger_minus_bfs_bound", tightest);
    r.note("full_n5_reroute_bound", &b.value);
    Ok(r)
}
