//! `polylab`: sampling, skeletons, flow bounds and property suites for
//! random 0/1-polytopes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource cap exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polylab_core::lab::{
    cmd_flowbound, cmd_sample, cmd_skeleton, cmd_trend, d_selection_table, select_d, ExperimentParams, Format,
    Probability, RouteMode, SkeletonMethod,
};
use polylab_core::skeleton::Provenance;
use polylab_core::verify::{self, Suite, VerifyOptions};
use polylab_core::{Error, VertexSet};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

const SKELETON_COLUMNS: &str = "\
Report columns (one row): n, p, d, seed, cube_size_N, binom_n_d_D, q, q_decimal,
n_N_over_D, backbone_budget_T, vertices, method, edges, min_degree, max_degree,
edge_lengths (length:count;...), full_degree_vertices, alpha_full_0.1 .. alpha_full_0.5,
mode, routed, attempted, failures_by_stage, max_load, bound, bound_decimal,
bound_kind (certified|estimate|none), exact_cheeger, degree_upper_bound.
CSV output starts with a `schema=1` line; JSON is {\"schema\": 1, \"rows\": [...]}.";

const FLOW_COLUMNS: &str = "\
Report columns as for `skeleton`, computed on G_1(V) ∪ G_d(V).
Ledger CSV (--ledger): schema=1 line, then edge_u_hex, edge_v_hex, load_numerator,
load_denominator. Sampled-mode loads are scaled to all pairs of V.";

const VERIFY_COLUMNS: &str = "\
Output columns: lemma, key, value. Keys trials, trial_failures, violations and
passed come first, followed by suite-specific counters.
Suites: 2.2, 2.3, 2.4-partition, 2.6, 2.7, 2.8a, 2.9, 3.1, 3.3, 3.4-empirical.
Exit status is 0 iff the suite has zero violations.";

const TREND_COLUMNS: &str = "\
Output columns: n, seed, vertices, bound, bound_decimal, bound_kind, degree_upper_bound,
routed, attempted, full_degree_vertices, alpha_full_0.1 .. alpha_full_0.5.
Each n gets --trials rows (seeds seed, seed+1, ...) and one row with seed=median.
degree_upper_bound is the minimum degree of G_1(V) ∪ G_d(V), an upper bound on the
expansion of that routed graph.";

#[derive(Parser)]
#[command(name = "polylab", version, about = "Skeletons and edge expansion of random 0/1-polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample V from {0,1}^n, keeping each point with probability p.
    #[command(after_help = "Output: header `n=.. p=.. seed=..` then one lowercase hex bitmask per line; \
                            coordinate i is bit i-1.")]
    Sample(SampleArgs),
    /// Build the exact skeleton or G_d(V) and report on it.
    #[command(after_help = SKELETON_COLUMNS)]
    Skeleton(SkeletonArgs),
    /// Reroute pairs of V through G_1(V) and G_d(V) and bound the edge expansion.
    #[command(after_help = FLOW_COLUMNS)]
    Flowbound(FlowArgs),
    /// Run a property suite.
    #[command(after_help = VERIFY_COLUMNS)]
    Verify(VerifyArgs),
    /// Flow bounds over a range of n and several seeds.
    #[command(after_help = TREND_COLUMNS)]
    Trend(TrendArgs),
    /// Preview the distance parameter floor(log2(ln n)/2 + c0 log2(1/p)), made odd.
    #[command(after_help = "Output columns: n, p, c0, raw, floor, d.")]
    Dselect(DselectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Gd,
}

#[derive(Args)]
struct Common {
    /// Random seed; every output is a function of the flags including this.
    #[arg(long)]
    seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SetArgs {
    /// Cube dimension (ignored with --input).
    #[arg(long, required_unless_present = "input")]
    n: Option<u32>,
    /// Sampling probability: decimal or fraction such as 7/10.
    #[arg(long)]
    p: Option<Probability>,
    /// Vertex-set file written by `sample`; sampled from --n/--p/--seed when absent.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: Probability,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SkeletonArgs {
    #[command(flatten)]
    set: SetArgs,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "gd")]
    method: MethodArg,
    /// Hamming distance for --method gd.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Write the edge list here (header then one `u v` hex pair per line).
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    set: SetArgs,
    #[command(flatten)]
    common: Common,
    /// Odd distance parameter.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Fullness threshold used with --repair.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "sampled")]
    mode: ModeArg,
    /// Pairs routed in sampled mode.
    #[arg(long, default_value_t = 2000)]
    pairs: u64,
    /// Reroute around alpha-full endpoints through G_1(V) (needs d = 3).
    #[arg(long)]
    repair: bool,
    /// Write the per-edge ledger CSV here.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite id, e.g. 3.1 or 3.4-empirical.
    #[arg(long)]
    lemma: Suite,
    #[command(flatten)]
    common: Common,
    /// Override the suite's trial or instance count.
    #[arg(long)]
    trials: Option<u32>,
}

#[derive(Args)]
struct TrendArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    #[arg(long)]
    p: Probability,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "sampled")]
    mode: ModeArg,
    #[arg(long, default_value_t = 2000)]
    pairs: u64,
    /// Seeds per n.
    #[arg(long, default_value_t = 5)]
    trials: u32,
}

#[derive(Args)]
struct DselectArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: Probability,
    #[arg(long, default_value_t = 0.5)]
    c0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

enum Failure {
    Lib(Error),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Parameters plus the vertex set, read from --input or sampled.
fn load_set(set: &SetArgs, seed: u64) -> Result<(ExperimentParams, VertexSet), Failure> {
    match &set.input {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let vs = VertexSet::from_text(&text)?;
            let p = match (&set.p, vs.provenance()) {
                (Some(p), _) => p.clone(),
                (None, Provenance::Sampled { p, .. }) => p.to_string().parse()?,
                (None, Provenance::Explicit) => {
                    return Err(Error::Config("--p is required for an explicit vertex set".into()).into())
                }
            };
            Ok((ExperimentParams::with_probability(vs.dim(), p, seed), vs))
        }
        None => {
            let n = set.n.expect("clap enforces --n without --input");
            let p = set.p.clone().ok_or_else(|| Error::Config("--p is required when sampling".into()))?;
            let params = ExperimentParams::with_probability(n, p, seed);
            let vs = cmd_sample(&params)?;
            Ok((params, vs))
        }
    }
}

fn mode_of(m: ModeArg) -> RouteMode {
    match m {
        ModeArg::Exact => RouteMode::Exact,
        ModeArg::Sampled => RouteMode::Sampled,
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sample(a) => {
            let params = ExperimentParams::with_probability(a.n, a.p, a.seed);
            emit(&a.out, &cmd_sample(&params)?.to_text())
        }
        Command::Skeleton(a) => {
            let (mut params, set) = load_set(&a.set, a.common.seed)?;
            params.d = a.d;
            params.method = match a.method {
                MethodArg::Exact => SkeletonMethod::Exact,
                MethodArg::Gd => SkeletonMethod::Gd,
            };
            let (g, report) = cmd_skeleton(&params, &set)?;
            if let Some(path) = &a.graph {
                write_file(path, &g.to_text())?;
            }
            emit(&a.common.out, &report.to_table().render(format_of(a.common.format)))
        }
        Command::Flowbound(a) => {
            let (mut params, set) = load_set(&a.set, a.common.seed)?;
            params.d = a.d;
            params.alpha = a.alpha;
            params.mode = mode_of(a.mode);
            params.pairs = a.pairs;
            params.repair = a.repair;
            let (report, routed) = cmd_flowbound(&params, &set)?;
            if let Some(path) = &a.ledger {
                write_file(path, &routed.ledger.to_csv())?;
            }
            emit(&a.common.out, &report.to_table().render(format_of(a.common.format)))
        }
        Command::Verify(a) => {
            let report = verify::run(a.lemma, VerifyOptions { seed: a.common.seed, trials: a.trials })?;
            emit(&a.common.out, &report.to_table().render(format_of(a.common.format)))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
        Command::Trend(a) => {
            let mut params = ExperimentParams::with_probability(a.n[0], a.p, a.common.seed);
            params.d = a.d;
            params.alpha = a.alpha;
            params.mode = mode_of(a.mode);
            params.pairs = a.pairs;
            params.trials = a.trials;
            emit(&a.common.out, &cmd_trend(&params, &a.n)?.render(format_of(a.common.format)))
        }
        Command::Dselect(a) => {
            let sel = select_d(a.n, a.p.value(), a.c0)?;
            emit(&a.out, &d_selection_table(&sel).render(format_of(a.format)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_cap() { EXIT_CAP } else { EXIT_USAGE })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
