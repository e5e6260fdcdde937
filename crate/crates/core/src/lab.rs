//! Experiment driver: parameters, reports and the subcommand bodies.
//!
//! Every command is a pure function of its parameters, including the seed,
//! and renders to CSV or JSON through [`Table`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cube::binomial;
use crate::error::{Error, Result};
use crate::expansion::{degree_upper_bound, exact_cheeger, EXACT_CHEEGER_MAX_VERTICES};
use crate::flow::{
    expansion_lower_bound, generic_congestion_bound, reroute_flow, CongestionLedger, FailureStage, PairBudget,
    RerouteConfig, RerouteReport, RouteFailure,
};
use crate::lp::Rational;
use crate::skeleton::{
    alpha_full_vertices, build_exact_skeleton, build_gd, edge_length_histogram, full_degree_vertices,
    sample_vertex_set, SkeletonGraph, VertexSet,
};

/// Alpha values reported by every bound report.
pub const ALPHA_SWEEP: [f64; 4] = [0.1, 0.2, 0.3, 0.5];
/// `2^d - 2` above this is not expanded exactly.
const Q_EXPONENT_CAP: u64 = 4096;

/// A probability kept both as typed text, as an exact rational and as the
/// `f64` used for sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct Probability {
    text: String,
    exact: Rational,
    value: f64,
}

impl Probability {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(digits * Pow::pow(&ten, scale as u32))
    } else {
        Rational::new(digits, Pow::pow(&ten, (-scale) as u32))
    })
}

impl FromStr for Probability {
    type Err = Error;

    /// Accepts decimals (`0.7`, `1e-3`) and fractions (`7/10`).
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim().to_string();
        let bad = || Error::Parse(format!("probability {text:?}"));
        let exact = match text.split_once('/') {
            Some((a, b)) => {
                let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                if b.is_zero() {
                    return Err(bad());
                }
                Rational::new(a, b)
            }
            None => parse_decimal(&text).ok_or_else(bad)?,
        };
        let value = if text.contains('/') { exact.to_f64().ok_or_else(bad)? } else { text.parse().map_err(|_| bad())? };
        if exact > Rational::one() || exact < Rational::zero() {
            return Err(Error::InvalidProbability(value));
        }
        Ok(Self { text, exact, value })
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteMode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkeletonMethod {
    Exact,
    Gd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

/// Everything an experiment depends on. There is no wall-clock default:
/// the seed is always explicit.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentParams {
    pub n: u32,
    pub p: Probability,
    pub d: u32,
    pub alpha: f64,
    pub seed: u64,
    pub pairs: u64,
    pub trials: u32,
    pub mode: RouteMode,
    pub method: SkeletonMethod,
    pub format: Format,
    pub c0: f64,
    pub repair: bool,
    pub out: Option<String>,
}

impl ExperimentParams {
    /// Defaults for everything but `n`, `p` and `seed`.
    pub fn new(n: u32, p: &str, seed: u64) -> Result<Self> {
        Ok(Self::with_probability(n, p.parse()?, seed))
    }

    pub fn with_probability(n: u32, p: Probability, seed: u64) -> Self {
        Self {
            n,
            p,
            d: 1,
            alpha: 0.1,
            seed,
            pairs: 2000,
            trials: 20,
            mode: RouteMode::Sampled,
            method: SkeletonMethod::Gd,
            format: Format::Csv,
            c0: 0.5,
            repair: false,
            out: None,
        }
    }

    pub fn reroute_config(&self) -> RerouteConfig {
        RerouteConfig {
            d: self.d,
            repair_with_g1: self.repair,
            alpha: self.alpha,
            budget: match self.mode {
                RouteMode::Exact => PairBudget::AllPairs,
                RouteMode::Sampled => PairBudget::Sampled(self.pairs),
            },
            seed: self.seed,
        }
    }
}

/// One output cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Field {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Int(v) => write!(f, "{v}"),
            Field::Float(v) => write!(f, "{v}"),
            Field::Text(s) => f.write_str(s),
            Field::Bool(b) => write!(f, "{b}"),
            Field::Null => Ok(()),
        }
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v as i128)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i128)
    }
}

impl From<u32> for Field {
    fn from(v: u32) -> Self {
        Field::Int(v as i128)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<&Rational> for Field {
    fn from(v: &Rational) -> Self {
        Field::Text(v.to_string())
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Field::Null)
    }
}

/// Rows of named fields. CSV output starts with a `schema=1` line; JSON is
/// `{"schema": 1, "rows": [...]}` with the same keys in the same order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Single-row table from ordered pairs.
    pub fn record(fields: Vec<(String, Field)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Field>) = fields.into_iter().unzip();
        Self { columns, rows: vec![row] }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Field>] {
        &self.rows
    }

    pub fn get(&self, row: usize, column: &str) -> Option<&Field> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row)?.get(c)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(["schema=1"]).expect("in-memory csv");
        w.write_record(&self.columns).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r.iter().map(|f| f.to_string())).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (c, f) in self.columns.iter().zip(r) {
                    let v = match f {
                        Field::Float(x) if !x.is_finite() => serde_json::Value::Null,
                        other => serde_json::to_value(other).expect("field to json"),
                    };
                    m.insert(c.clone(), v);
                }
                serde_json::Value::Object(m)
            })
            .collect();
        let doc = serde_json::json!({ "schema": 1, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("json");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// `q = p (1 - p)^(2^d - 2)`, exactly.
pub fn q_exact(p: &Rational, d: u32) -> Result<Rational> {
    if d == 0 || d >= 63 || (1u64 << d) - 2 > Q_EXPONENT_CAP {
        return Err(Error::SizeCap { what: "exponent 2^d - 2 of q", size: 1u64 << d.min(63), cap: Q_EXPONENT_CAP });
    }
    let e = ((1u64 << d) - 2) as u32;
    Ok(p * Pow::pow(&(Rational::one() - p), e))
}

/// The distance parameter `floor(log2(ln n) / 2 + c0 log2(1/p))`, moved
/// down to an odd value and kept at least one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DSelection {
    pub n: u32,
    pub p: f64,
    pub c0: f64,
    pub raw: f64,
    pub floor: i64,
    pub d: u32,
}

pub fn select_d(n: u32, p: f64, c0: f64) -> Result<DSelection> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let raw = 0.5 * (n as f64).ln().log2() + c0 * (1.0 / p).log2();
    let floor = raw.floor() as i64;
    let mut d = floor.max(1);
    if d % 2 == 0 {
        d -= 1;
    }
    Ok(DSelection { n, p, c0, raw, floor, d: d.max(1) as u32 })
}

pub fn d_selection_table(sel: &DSelection) -> Table {
    Table::record(vec![
        ("n".into(), sel.n.into()),
        ("p".into(), sel.p.into()),
        ("c0".into(), sel.c0.into()),
        ("raw".into(), sel.raw.into()),
        ("floor".into(), Field::Int(sel.floor as i128)),
        ("d".into(), sel.d.into()),
    ])
}

/// Everything derived about one instance. Quantities that were not
/// computed are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: u32,
    pub p: String,
    pub d: u32,
    pub seed: u64,
    pub big_n: BigInt,
    pub big_d: u64,
    pub q: Option<Rational>,
    pub n_big_n_over_d: Rational,
    pub backbone_budget: Rational,
    pub vertices: usize,
    pub method: Option<String>,
    pub edges: Option<usize>,
    pub min_degree: Option<usize>,
    pub max_degree: Option<usize>,
    pub edge_lengths: Option<BTreeMap<u32, usize>>,
    pub full_degree: usize,
    pub alpha_full: Vec<(f64, usize)>,
    pub mode: Option<String>,
    pub routed: Option<u64>,
    pub attempted: Option<u64>,
    /// Failed pairs by the stage where routing stopped.
    pub failure_stages: Option<BTreeMap<&'static str, u64>>,
    pub max_load: Option<Rational>,
    pub bound: Option<Rational>,
    pub certified: Option<bool>,
    pub exact_cheeger: Option<Rational>,
    pub degree_upper_bound: Option<Rational>,
}

impl BoundReport {
    pub fn new(params: &ExperimentParams, set: &VertexSet) -> Result<Self> {
        let (n, d) = (set.dim(), params.d);
        if d == 0 || d > n {
            return Err(Error::DistanceOutOfRange { d, n });
        }
        let q = match q_exact(params.p.exact(), d) {
            Ok(q) => Some(q),
            Err(e) if e.is_resource_cap() => None,
            Err(e) => return Err(e),
        };
        let n_big_n_over_d = generic_congestion_bound(n, d);
        let mut alpha_full = Vec::new();
        for a in ALPHA_SWEEP {
            alpha_full.push((a, alpha_full_vertices(set, a)?.len()));
        }
        Ok(Self {
            n,
            p: params.p.text().to_string(),
            d,
            seed: params.seed,
            big_n: BigInt::one() << n,
            big_d: binomial(n as u64, d as u64),
            q,
            backbone_budget: &n_big_n_over_d * BigInt::from(2),
            n_big_n_over_d,
            vertices: set.len(),
            method: None,
            edges: None,
            min_degree: None,
            max_degree: None,
            edge_lengths: None,
            full_degree: full_degree_vertices(set).len(),
            alpha_full,
            mode: None,
            routed: None,
            attempted: None,
            failure_stages: None,
            max_load: None,
            bound: None,
            certified: None,
            exact_cheeger: None,
            degree_upper_bound: None,
        })
    }

    /// Degree statistics and, when small enough, the exact Cheeger constant.
    pub fn with_graph(mut self, g: &SkeletonGraph) -> Result<Self> {
        self.method = Some(g.method().to_string());
        self.edges = Some(g.edge_count());
        self.min_degree = g.min_degree();
        self.max_degree = g.max_degree();
        self.edge_lengths = Some(edge_length_histogram(g));
        if g.len() >= 2 {
            self.degree_upper_bound = Some(degree_upper_bound(g)?.value);
        }
        if (2..=EXACT_CHEEGER_MAX_VERTICES).contains(&g.len()) {
            self.exact_cheeger = Some(exact_cheeger(g)?.value);
        }
        Ok(self)
    }

    pub fn with_flow(mut self, ledger: &CongestionLedger) -> Self {
        self.mode = Some(ledger.mode().to_string());
        self.routed = Some(ledger.routed());
        self.attempted = Some(ledger.attempted());
        self.max_load = ledger.max_load();
        if let Ok(b) = expansion_lower_bound(ledger, self.vertices) {
            self.bound = Some(b.value);
            self.certified = Some(b.certified);
        }
        self
    }

    pub fn with_failures(mut self, failures: &[RouteFailure]) -> Self {
        let mut m: BTreeMap<&'static str, u64> = ["endpoint", "interior", "pure_path"].map(|k| (k, 0)).into();
        for f in failures {
            let k = match f.stage {
                FailureStage::Endpoint { .. } => "endpoint",
                FailureStage::Interior { .. } => "interior",
                FailureStage::PurePath { .. } => "pure_path",
            };
            *m.get_mut(k).expect("stage key") += 1;
        }
        self.failure_stages = Some(m);
        self
    }

    pub fn bound_kind(&self) -> &'static str {
        match self.certified {
            Some(true) => "certified",
            Some(false) => "estimate",
            None => "none",
        }
    }

    pub fn to_table(&self) -> Table {
        let dec = |r: &Option<Rational>| r.as_ref().and_then(|x| x.to_f64());
        let hist = self.edge_lengths.as_ref().map(|h| {
            h.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";")
        });
        let stages = self.failure_stages.as_ref().map(|m| {
            m.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";")
        });
        let mut f: Vec<(String, Field)> = vec![
            ("n".into(), self.n.into()),
            ("p".into(), self.p.as_str().into()),
            ("d".into(), self.d.into()),
            ("seed".into(), self.seed.into()),
            ("cube_size_N".into(), self.big_n.to_string().into()),
            ("binom_n_d_D".into(), self.big_d.into()),
            ("q".into(), self.q.as_ref().into()),
            ("q_decimal".into(), dec(&self.q).into()),
            ("n_N_over_D".into(), (&self.n_big_n_over_d).into()),
            ("backbone_budget_T".into(), (&self.backbone_budget).into()),
            ("vertices".into(), self.vertices.into()),
            ("method".into(), self.method.clone().into()),
            ("edges".into(), self.edges.into()),
            ("min_degree".into(), self.min_degree.into()),
            ("max_degree".into(), self.max_degree.into()),
            ("edge_lengths".into(), hist.into()),
            ("full_degree_vertices".into(), self.full_degree.into()),
        ];
        for (a, c) in &self.alpha_full {
            f.push((format!("alpha_full_{a}"), (*c).into()));
        }
        f.extend([
            ("mode".into(), self.mode.clone().into()),
            ("routed".into(), self.routed.into()),
            ("attempted".into(), self.attempted.into()),
            ("failures_by_stage".into(), stages.into()),
            ("max_load".into(), self.max_load.as_ref().into()),
            ("bound".into(), self.bound.as_ref().into()),
            ("bound_decimal".into(), dec(&self.bound).into()),
            ("bound_kind".into(), self.bound_kind().into()),
            ("exact_cheeger".into(), self.exact_cheeger.as_ref().into()),
            ("degree_upper_bound".into(), self.degree_upper_bound.as_ref().into()),
        ]);
        Table::record(f)
    }
}

fn check_probability(params: &ExperimentParams) -> Result<()> {
    if params.p.exact() > &Rational::one() || params.p.exact() < &Rational::zero() {
        return Err(Error::InvalidProbability(params.p.value()));
    }
    Ok(())
}

/// Samples `V` from `(n, p, seed)`.
pub fn cmd_sample(params: &ExperimentParams) -> Result<VertexSet> {
    check_probability(params)?;
    sample_vertex_set(params.n, params.p.value(), params.seed)
}

/// Builds the exact skeleton or `G_d(V)` and reports on it.
pub fn cmd_skeleton(params: &ExperimentParams, set: &VertexSet) -> Result<(SkeletonGraph, BoundReport)> {
    let g = match params.method {
        SkeletonMethod::Exact => build_exact_skeleton(set)?,
        SkeletonMethod::Gd => build_gd(set, params.d)?,
    };
    let report = BoundReport::new(params, set)?.with_graph(&g)?;
    Ok((g, report))
}

/// The routed graph `G_1(V) ∪ G_d(V)`.
pub fn routing_graph(set: &VertexSet, d: u32) -> Result<SkeletonGraph> {
    let g1 = build_gd(set, 1)?;
    if d == 1 {
        Ok(g1)
    } else {
        g1.union(&build_gd(set, d)?)
    }
}

/// Reroutes pairs of `V` and converts the ledger into a bound.
pub fn cmd_flowbound(params: &ExperimentParams, set: &VertexSet) -> Result<(BoundReport, RerouteReport)> {
    let config = params.reroute_config();
    config.validate(set.dim())?;
    let routed = reroute_flow(set, &config)?;
    let g = routing_graph(set, params.d)?;
    let report = BoundReport::new(params, set)?.with_graph(&g)?.with_flow(&routed.ledger).with_failures(&routed.failures);
    Ok((report, routed))
}

fn median(mut xs: Vec<Rational>) -> Option<Rational> {
    if xs.is_empty() {
        return None;
    }
    xs.sort();
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m].clone() } else { (&xs[m - 1] + &xs[m]) / BigInt::from(2) })
}

pub const TREND_COLUMNS: [&str; 14] = [
    "n",
    "seed",
    "vertices",
    "bound",
    "bound_decimal",
    "bound_kind",
    "degree_upper_bound",
    "routed",
    "attempted",
    "full_degree_vertices",
    "alpha_full_0.1",
    "alpha_full_0.2",
    "alpha_full_0.3",
    "alpha_full_0.5",
];

/// One row per `(n, seed)` over `trials` seeds starting at `params.seed`,
/// followed by one `median` row per `n`.
pub fn cmd_trend(params: &ExperimentParams, ns: &[u32]) -> Result<Table> {
    if params.trials == 0 {
        return Err(Error::Config("trend needs at least one trial".into()));
    }
    let mut table = Table::new(&TREND_COLUMNS);
    let mut medians = Vec::new();
    for &n in ns {
        let mut bounds = Vec::new();
        let mut uppers = Vec::new();
        for t in 0..params.trials as u64 {
            let mut p = params.clone();
            p.n = n;
            p.seed = params.seed + t;
            let set = cmd_sample(&p)?;
            let (r, _) = cmd_flowbound(&p, &set)?;
            let mut row: Vec<Field> = vec![
                n.into(),
                p.seed.into(),
                r.vertices.into(),
                r.bound.as_ref().into(),
                r.bound.as_ref().and_then(|b| b.to_f64()).into(),
                r.bound_kind().into(),
                r.degree_upper_bound.as_ref().into(),
                r.routed.into(),
                r.attempted.into(),
                r.full_degree.into(),
            ];
            row.extend(r.alpha_full.iter().map(|&(_, c)| Field::from(c)));
            table.push(row);
            bounds.extend(r.bound.clone());
            uppers.extend(r.degree_upper_bound.clone());
        }
        medians.push((n, median(bounds), median(uppers)));
    }
    for (n, b, u) in medians {
        let mut row: Vec<Field> = vec![
            n.into(),
            "median".into(),
            Field::Null,
            b.as_ref().into(),
            b.as_ref().and_then(|x| x.to_f64()).into(),
            "median".into(),
            u.as_ref().into(),
        ];
        row.resize(TREND_COLUMNS.len(), Field::Null);
        table.push(row);
    }
    Ok(table)
}

/// Median bounds per `n` read back from a trend table.
pub fn trend_medians(table: &Table) -> Vec<(u32, Option<f64>)> {
    (0..table.rows().len())
        .filter(|&r| table.get(r, "seed") == Some(&Field::Text("median".into())))
        .map(|r| {
            let n = match table.get(r, "n") {
                Some(Field::Int(n)) => *n as u32,
                _ => 0,
            };
            let b = match table.get(r, "bound_decimal") {
                Some(Field::Float(x)) => Some(*x),
                _ => None,
            };
            (n, b)
        })
        .collect()
}
