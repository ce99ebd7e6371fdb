//! `recolour`: generate graphs, build schedules, sample colourings and run
//! the verification suites from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recolour_core::graph::generate_gnp;
use recolour_core::pipeline::{bench, colouring_file, sample_many, schedule_for};
use recolour_core::rng::{RandomStream, StreamLabel};
use recolour_core::schedule::audit_schedule;
use recolour_core::{Graph, RunConfig, StepMode};
use recolour_lab::decay::path_decay_sim;
use recolour_lab::{run_suite, LabError, Suite};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "recolour", version, about = "Sample proper colourings of sparse random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Shared {
    /// Master seed for every random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs or trials.
    #[arg(long, default_value_t = 1)]
    workers: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Faithful,
    Retry,
}

impl From<Mode> for StepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Faithful => StepMode::Faithful,
            Mode::Retry => StepMode::Retry,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a G(n, d/n) random graph.
    Gen {
        #[arg(long)]
        n: usize,
        /// Expected average degree.
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[command(flatten)]
        shared: Shared,
    },
    /// Build and audit the edge-deletion schedule of a graph.
    Schedule {
        #[arg(long = "in")]
        input: PathBuf,
        /// Cycle-length threshold; derived from n and the average degree when omitted.
        #[arg(long = "L")]
        threshold: Option<usize>,
        /// Also write the audit report to this path.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Sample colourings of a graph.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Number of independent samples.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value = "retry")]
        mode: Mode,
        #[arg(long = "L")]
        threshold: Option<usize>,
        /// Largest cyclomatic number accepted per base component.
        #[arg(long, default_value_t = 2)]
        c_max: usize,
        /// Run log path (one JSON line per step plus a summary per run).
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run an exact verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        max_n: Option<usize>,
        /// Palette sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value = "default")]
        fixtures: String,
        #[command(flatten)]
        shared: Shared,
    },
    /// Monte Carlo counts of disagreement paths; writes CSV.
    Analyze {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        lmax: usize,
        #[command(flatten)]
        shared: Shared,
    },
    /// Time the sampler across graph sizes and fit the scaling exponent.
    Bench {
        /// Strictly ascending vertex counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long, value_enum, default_value = "retry")]
        mode: Mode,
        #[command(flatten)]
        shared: Shared,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn exit_code(e: &recolour_core::Error) -> u8 {
    use recolour_core::Error as E;
    match e {
        E::InvalidParameter { .. } => EXIT_USAGE,
        E::Io(_) | E::Format(_) => EXIT_IO,
        E::Run { source, .. } => exit_code(source),
        _ => EXIT_CHECK,
    }
}

impl From<recolour_core::Error> for Failure {
    fn from(e: recolour_core::Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Core(inner) => inner.into(),
            LabError::GuardExceeded { .. } => Failure {
                code: EXIT_USAGE,
                message: e.to_string(),
            },
            other => Failure {
                code: EXIT_CHECK,
                message: other.to_string(),
            },
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Graph::from_json(&text).map_err(|e| io_failure(path, e))
}

fn check_degree(d: f64) -> Result<(), Failure> {
    if !d.is_finite() || d < 0.0 {
        return Err(usage(format!("invalid value for --d: {d} (must be a non-negative number)")));
    }
    Ok(())
}

fn check_workers(workers: u32) -> Result<(), Failure> {
    if workers == 0 {
        return Err(usage("invalid value for --workers: must be at least 1"));
    }
    Ok(())
}

fn cmd_gen(n: usize, d: f64, shared: &Shared) -> Result<(), Failure> {
    if n == 0 {
        return Err(usage("invalid value for --n: must be at least 1"));
    }
    check_degree(d)?;
    if d > n as f64 {
        return Err(usage(format!("invalid value for --d: {d} exceeds --n {n}")));
    }
    let g = generate_gnp(n, d, &mut RandomStream::new(shared.seed, StreamLabel::Generation))?;
    write_output(shared.out.as_deref(), &(g.to_json() + "\n"))
}

fn cmd_schedule(input: &Path, threshold: Option<usize>, audit: Option<&Path>, shared: &Shared) -> Result<(), Failure> {
    if threshold.is_some_and(|l| l < 3) {
        return Err(usage("invalid value for --L: must be at least 3"));
    }
    let g = read_graph(input)?;
    let schedule = schedule_for(&g, threshold)?;
    write_output(shared.out.as_deref(), &(schedule.to_json() + "\n"))?;
    let report = audit_schedule(&schedule);
    let text = serde_json::to_string(&report).expect("reports serialise") + "\n";
    match audit {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e))?,
        None => eprint!("{text}"),
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CHECK,
            message: "schedule audit found violations".into(),
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    input: &Path,
    k: usize,
    m: usize,
    mode: Mode,
    threshold: Option<usize>,
    c_max: usize,
    log_path: Option<&Path>,
    shared: &Shared,
) -> Result<(), Failure> {
    if k < 3 {
        return Err(usage("invalid value for --k: must be at least 3"));
    }
    if m == 0 {
        return Err(usage("invalid value for --m: must be at least 1"));
    }
    if threshold.is_some_and(|l| l < 3) {
        return Err(usage("invalid value for --L: must be at least 3"));
    }
    check_workers(shared.workers)?;
    let g = read_graph(input)?;
    let cfg = RunConfig {
        k,
        seed: shared.seed,
        mode: mode.into(),
        threshold,
        c_max,
    };
    let runs = sample_many(&g, &cfg, m, shared.workers as usize)?;
    let colourings: Vec<_> = runs.iter().map(|(c, _)| c.clone()).collect();
    write_output(shared.out.as_deref(), &colouring_file(g.n(), k, shared.seed, &colourings))?;
    if let Some(p) = log_path {
        let text: String = runs
            .iter()
            .enumerate()
            .map(|(i, (_, log))| log.to_jsonl(Some(i as u64)))
            .collect();
        fs::write(p, text).map_err(|e| io_failure(p, e))?;
    }
    let improper = colourings.iter().filter(|c| !c.is_proper(&g)).count();
    if improper > 0 {
        log::warn!("{improper} of {m} colourings are improper");
        if matches!(mode, Mode::Retry) {
            return Err(Failure {
                code: EXIT_CHECK,
                message: format!("{improper} of {m} colourings are improper"),
            });
        }
    }
    Ok(())
}

fn cmd_verify(suite: &str, max_n: Option<usize>, ks: &[usize], fixtures: &str, shared: &Shared) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(|e: String| usage(format!("invalid value for --suite: {e}")))?;
    if fixtures != "default" {
        return Err(usage(format!("invalid value for --fixtures: unknown fixture set {fixtures:?}")));
    }
    check_workers(shared.workers)?;
    let mut opts = suite.default_options();
    if let Some(n) = max_n {
        opts.max_n = n;
    }
    if !ks.is_empty() {
        if let Some(&bad) = ks.iter().find(|&&k| k < 2) {
            return Err(usage(format!("invalid value for --k: {bad} (must be at least 2)")));
        }
        opts.ks = ks.to_vec();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(shared.workers as usize)
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let report = pool.install(|| run_suite(suite, &opts))?;
    write_output(shared.out.as_deref(), &report.to_jsonl())?;
    eprintln!(
        "{}: {} passed, {} failed, {} not applicable",
        suite.name(),
        report.passed(),
        report.failed(),
        report.skipped()
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CHECK,
            message: format!("{} check(s) failed", report.failed()),
        })
    }
}

fn cmd_analyze(n: usize, d: f64, k: usize, trials: usize, lmax: usize, shared: &Shared) -> Result<(), Failure> {
    if n == 0 {
        return Err(usage("invalid value for --n: must be at least 1"));
    }
    check_degree(d)?;
    if trials == 0 {
        return Err(usage("invalid value for --trials: must be at least 1"));
    }
    if k == 0 {
        return Err(usage("invalid value for --k: must be at least 1"));
    }
    check_workers(shared.workers)?;
    let rep = path_decay_sim(n, d, k, trials, lmax, shared.seed, shared.workers as usize)?;
    write_output(shared.out.as_deref(), &rep.to_csv())?;
    match (rep.ratio, rep.ci) {
        (Some(r), Some((lo, hi))) => eprintln!("fitted ratio {r:.6} (95% CI {lo:.6} to {hi:.6})"),
        (Some(r), None) => eprintln!("fitted ratio {r:.6}"),
        _ => eprintln!("fitted ratio: n/a"),
    }
    Ok(())
}

fn cmd_bench(sizes: &[usize], d: f64, k: usize, seeds: usize, mode: Mode, shared: &Shared) -> Result<(), Failure> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("invalid value for --sizes: sizes must be strictly ascending"));
    }
    if sizes.contains(&0) {
        return Err(usage("invalid value for --sizes: sizes must be positive"));
    }
    check_degree(d)?;
    if k < 3 {
        return Err(usage("invalid value for --k: must be at least 3"));
    }
    if seeds == 0 {
        return Err(usage("invalid value for --seeds: must be at least 1"));
    }
    let rep = bench(sizes, d, k, seeds, shared.seed, mode.into())?;
    write_output(shared.out.as_deref(), &rep.to_text())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { n, d, shared } => cmd_gen(n, d, &shared),
        Command::Schedule {
            input,
            threshold,
            audit,
            shared,
        } => cmd_schedule(&input, threshold, audit.as_deref(), &shared),
        Command::Sample {
            input,
            k,
            m,
            mode,
            threshold,
            c_max,
            log,
            shared,
        } => cmd_sample(&input, k, m, mode, threshold, c_max, log.as_deref(), &shared),
        Command::Verify {
            suite,
            max_n,
            k,
            fixtures,
            shared,
        } => cmd_verify(&suite, max_n, &k, &fixtures, &shared),
        Command::Analyze {
            n,
            d,
            k,
            trials,
            lmax,
            shared,
        } => cmd_analyze(n, d, k, trials, lmax, &shared),
        Command::Bench {
            sizes,
            d,
            k,
            seeds,
            mode,
            shared,
        } => cmd_bench(&sizes, d, k, seeds, mode, &shared),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
