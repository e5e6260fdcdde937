//! Rerouting backbone paths of `Q_n^d` through sampled vertices.
//!
//! Each backbone vertex `x_i` is replaced by a nearby sampled `z_i`, and
//! consecutive `z`s are joined by a uniformly chosen pure path in
//! `G_d(V)`. The endpoints are attached by one `G_d(V)` edge, or, with
//! repair enabled and an alpha-full endpoint, by a 3-step `G_1(V)` path.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pure::pure_paths_where;
use super::{BackboneSampler, CongestionLedger, LedgerMode};
use crate::cube::{full_mask, submasks_of_weight, Submasks, Vertex};
use crate::error::{Error, Result};
use crate::lp::Rational;
use crate::rng::stream;
use crate::skeleton::{is_alpha_full, VertexSet};

/// Largest `|V|` routed over all pairs.
pub const EXACT_ROUTE_MAX_VERTICES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairBudget {
    AllPairs,
    Sampled(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RerouteConfig {
    pub d: u32,
    pub repair_with_g1: bool,
    pub alpha: f64,
    pub budget: PairBudget,
    pub seed: u64,
}

impl RerouteConfig {
    pub fn validate(&self, n: u32) -> Result<()> {
        if self.d == 0 || self.d > n {
            return Err(Error::DistanceOutOfRange { d: self.d, n });
        }
        if self.d.is_multiple_of(2) {
            return Err(Error::EvenDistance(self.d));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.repair_with_g1 && self.d != 3 {
            return Err(Error::Config("repair paths in G_1 pair only with d = 3".into()));
        }
        if self.budget == PairBudget::Sampled(0) {
            return Err(Error::Config("sampled budget needs at least one pair".into()));
        }
        Ok(())
    }

    /// Backbone load budget `T = 2nN/D`.
    pub fn backbone_budget(&self, n: u32) -> Rational {
        super::generic_congestion_bound(n, self.d) * BigInt::from(2)
    }
}

/// Where routing of a pair stopped; `i` indexes backbone vertices for
/// candidate sets and links `z_{i-1} z_i` for pure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureStage {
    Endpoint { i: usize },
    Interior { i: usize },
    PurePath { i: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteFailure {
    pub x: Vertex,
    pub y: Vertex,
    pub stage: FailureStage,
}

#[derive(Clone, Debug)]
pub struct RerouteReport {
    pub ledger: CongestionLedger,
    pub failures: Vec<RouteFailure>,
}

struct Router<'a> {
    set: &'a VertexSet,
    d: u32,
    alpha: f64,
    repair: bool,
    sampler: BackboneSampler,
}

/// Outcome of routing one pair: the loop-erased path or the failing stage.
type PairRoute = std::result::Result<Vec<Vertex>, FailureStage>;

impl Router<'_> {
    fn blocked(&self, z: Vertex) -> bool {
        // alpha-fullness only matters when the repair case is in play
        self.repair && is_alpha_full(self.set, z, self.alpha)
    }

    fn gd_edge(&self, a: u64, b: u64) -> bool {
        let diff = a ^ b;
        let base = a & b;
        let (ea, eb) = (a & diff, b & diff);
        Submasks::new(diff).all(|s| s == ea || s == eb || !self.set.contains_bits(base | s))
    }

    fn pick<T: Copy>(items: &[T], rng: &mut ChaCha8Rng) -> Option<T> {
        (!items.is_empty()).then(|| items[rng.gen_range(0..items.len())])
    }

    /// Sampled points `x + m`, `|m| = d`, `m` off `forbidden`, ascending.
    fn sphere_candidates(&self, x: Vertex, forbidden: u64, need_edge: bool) -> Vec<Vertex> {
        let free = full_mask(x.dim()) & !forbidden;
        let mut out: Vec<Vertex> = submasks_of_weight(free, self.d)
            .map(|m| x.flip(m))
            .filter(|&z| self.set.contains(z) && !self.blocked(z))
            .filter(|&z| !need_edge || self.gd_edge(x.bits(), z.bits()))
            .collect();
        out.sort_unstable();
        out
    }

    /// Points at distance 3 reachable by a 3-step `G_1(V)` path, each with
    /// the first such path found in ascending order.
    fn three_step_paths(&self, x: Vertex) -> Vec<(Vertex, [Vertex; 4])> {
        let n = x.dim();
        let mut layer: Vec<(Vertex, Vec<Vertex>)> = vec![(x, vec![x])];
        for _ in 0..3 {
            let mut next: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
            let mut seen: HashMap<u64, ()> = HashMap::new();
            for (w, path) in &layer {
                for b in 0..n {
                    let m = 1u64 << b;
                    if (w.bits() ^ x.bits()) & m != 0 {
                        continue;
                    }
                    let z = w.flip(m);
                    if self.set.contains(z) && seen.insert(z.bits(), ()).is_none() {
                        let mut p = path.clone();
                        p.push(z);
                        next.push((z, p));
                    }
                }
            }
            next.sort_unstable_by_key(|e| e.0);
            layer = next;
        }
        layer.into_iter().map(|(z, p)| (z, [p[0], p[1], p[2], p[3]])).collect()
    }

    /// Picks `z` for an endpoint and the path from the endpoint to it.
    fn endpoint(&self, x: Vertex, forbidden: u64, rng: &mut ChaCha8Rng) -> Option<(Vertex, Vec<Vertex>)> {
        if self.repair && is_alpha_full(self.set, x, self.alpha) {
            let options: Vec<(Vertex, [Vertex; 4])> = self
                .three_step_paths(x)
                .into_iter()
                .filter(|(z, _)| (z.bits() ^ x.bits()) & forbidden == 0 && !self.blocked(*z))
                .collect();
            Self::pick(&options, rng).map(|(z, p)| (z, p.to_vec()))
        } else {
            let options = self.sphere_candidates(x, forbidden, true);
            Self::pick(&options, rng).map(|z| (z, vec![x, z]))
        }
    }

    fn route(&self, x: Vertex, y: Vertex, rng: &mut ChaCha8Rng) -> PairRoute {
        let backbone = self.sampler.sample(x, y, rng).expect("distinct members of one cube");
        let xs = backbone.vertices();
        let k = xs.len() - 1;
        let supp = |a: Vertex, b: Vertex| a.bits() ^ b.bits();
        let mut z = vec![x; k + 1];

        let (zk, rk) = self.endpoint(xs[k], supp(xs[k - 1], xs[k]), rng).ok_or(FailureStage::Endpoint { i: k })?;
        z[k] = zk;
        let mut f0 = supp(xs[0], xs[1]);
        if k == 1 {
            f0 |= supp(xs[k], zk);
        }
        let (z0, r0) = self.endpoint(xs[0], f0, rng).ok_or(FailureStage::Endpoint { i: 0 })?;
        z[0] = z0;

        for i in 1..k {
            let mut forbidden = supp(xs[i - 1], xs[i]) | supp(xs[i], xs[i + 1]) | supp(xs[i - 1], z[i - 1]);
            if i == k - 1 {
                forbidden |= supp(xs[k], z[k]);
            }
            let options = self.sphere_candidates(xs[i], forbidden, false);
            z[i] = Self::pick(&options, rng).ok_or(FailureStage::Interior { i })?;
        }

        let mut walk = r0;
        for i in 1..=k {
            let options = pure_paths_where(z[i - 1], z[i], self.d, |p| {
                p.vertices.iter().all(|&w| self.set.contains(w))
                    && p.edges().all(|(a, b)| self.gd_edge(a.bits(), b.bits()))
            });
            let p = Self::pick(&options, rng).ok_or(FailureStage::PurePath { i })?;
            walk.extend_from_slice(&p.vertices[1..]);
        }
        walk.extend(rk.iter().rev().skip(1));
        Ok(loop_erase(&walk))
    }
}

/// Removes cycles at first revisit.
pub fn loop_erase(walk: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<u64, usize> = HashMap::new();
    for &v in walk {
        if let Some(&p) = pos.get(&v.bits()) {
            for w in out.drain(p + 1..) {
                pos.remove(&w.bits());
            }
        } else {
            pos.insert(v.bits(), out.len());
            out.push(v);
        }
    }
    out
}

/// Routes one pair with the generator of work item `index`; the inner
/// error names the stage where routing stopped.
pub fn route_pair(
    set: &VertexSet,
    config: &RerouteConfig,
    x: Vertex,
    y: Vertex,
    index: u64,
) -> Result<std::result::Result<Vec<Vertex>, FailureStage>> {
    config.validate(set.dim())?;
    set.require_pair(x, y)?;
    let router = Router {
        set,
        d: config.d,
        alpha: config.alpha,
        repair: config.repair_with_g1,
        sampler: BackboneSampler::new(set.dim(), config.d)?,
    };
    Ok(router.route(x, y, &mut stream(config.seed, index)))
}

fn unordered_pairs(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

/// Routes pairs of `V` through `G_1(V) ∪ G_d(V)`.
///
/// With [`PairBudget::AllPairs`] every unordered pair is routed in
/// lexicographic index order. With [`PairBudget::Sampled`] pair `i` is drawn
/// uniformly from stream `(seed, i)`, which then also drives its routing.
pub fn reroute_flow(set: &VertexSet, config: &RerouteConfig) -> Result<RerouteReport> {
    let n = set.dim();
    config.validate(n)?;
    let k = set.len();
    if k < 2 {
        return Err(Error::TooFewVertices);
    }
    let population = unordered_pairs(k);
    let (mode, count) = match config.budget {
        PairBudget::AllPairs => {
            if k > EXACT_ROUTE_MAX_VERTICES {
                return Err(Error::SizeCap {
                    what: "all-pairs routing vertices",
                    size: k as u64,
                    cap: EXACT_ROUTE_MAX_VERTICES as u64,
                });
            }
            (LedgerMode::ExactAllPairs, population)
        }
        PairBudget::Sampled(m) => (LedgerMode::Sampled { pairs: m }, m),
    };
    let router = Router {
        set,
        d: config.d,
        alpha: config.alpha,
        repair: config.repair_with_g1,
        sampler: BackboneSampler::new(n, config.d)?,
    };
    let members = set.members();
    let exact_pairs: Vec<(usize, usize)> = match config.budget {
        PairBudget::AllPairs => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
        PairBudget::Sampled(_) => Vec::new(),
    };
    let job = |idx: u64| -> (Vertex, Vertex, PairRoute) {
        let mut rng = stream(config.seed, idx);
        let (i, j) = match config.budget {
            PairBudget::AllPairs => exact_pairs[idx as usize],
            PairBudget::Sampled(_) => {
                let a = rng.gen_range(0..k);
                let mut b = rng.gen_range(0..k - 1);
                if b >= a {
                    b += 1;
                }
                (a, b)
            }
        };
        let (x, y) = (members[i], members[j]);
        (x, y, router.route(x, y, &mut rng))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = (0..count).into_par_iter().map(job).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..count).map(job).collect();

    let mut ledger = CongestionLedger::new(n, mode, population);
    let mut failures = Vec::new();
    let one = Rational::one();
    for (x, y, r) in results {
        match r {
            Ok(path) => {
                ledger.add_path(&path, &one);
                ledger.record_pair(true);
            }
            Err(stage) => {
                ledger.record_pair(false);
                failures.push(RouteFailure { x, y, stage });
            }
        }
    }
    Ok(RerouteReport { ledger, failures })
}

/// Ledger edges that are neither `G_1(V)` nor `G_d(V)` edges, checked with
/// the cube criterion directly.
pub fn edges_outside_gd(ledger: &CongestionLedger, set: &VertexSet, d: u32) -> Vec<(Vertex, Vertex)> {
    ledger
        .loads()
        .map(|(a, b, _)| (a, b))
        .filter(|&(a, b)| {
            let h = (a.bits() ^ b.bits()).count_ones();
            let ok = (h == 1 || h == d)
                && set.contains(a)
                && set.contains(b)
                && crate::skeleton::cube_criterion_edge(a, b, set).unwrap_or(false);
            !ok
        })
        .collect()
}
