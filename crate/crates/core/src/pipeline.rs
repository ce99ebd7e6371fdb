//! End-to-end sampler: deletion schedule, exact base colouring, then one
//! update step per re-inserted edge.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{sample_base, Colouring, ColouringStatus};
use crate::error::{Error, Result};
use crate::graph::{generate_gnp, Graph, Vertex};
use crate::rng::{run_seed, RandomStream, StreamLabel};
use crate::schedule::{build_schedule, default_threshold, DeletionSchedule};
use crate::switching::{StepEngine, StepMode};
use crate::Colour;

/// Component vertex lists are kept in the log only below this size.
pub const COMPONENT_LIST_CAP: usize = 10_000;

/// `k` below `(2 + WARN_MARGIN) * d` triggers a warning.
pub const WARN_MARGIN: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub k: usize,
    pub seed: u64,
    pub mode: StepMode,
    /// Schedule threshold `L`; `None` derives it from `n` and the average degree.
    pub threshold: Option<usize>,
    /// Largest cyclomatic number the base sampler accepts per component.
    pub c_max: usize,
}

impl RunConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        RunConfig {
            k,
            seed,
            mode: StepMode::Retry,
            threshold: None,
            c_max: 2,
        }
    }

    pub fn with_mode(mut self, mode: StepMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_threshold(mut self, threshold: usize) -> Self {
        self.threshold = Some(threshold);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::param("k", format!("needs at least 3 colours, got {}", self.k)));
        }
        Ok(())
    }
}

/// Average degree `2m/n`.
pub fn average_degree(g: &Graph) -> f64 {
    if g.n() == 0 {
        0.0
    } else {
        2.0 * g.m() as f64 / g.n() as f64
    }
}

/// Threshold used when none is configured. Graphs with average degree at
/// most 1 fall back to the minimum of 3.
pub fn auto_threshold(g: &Graph) -> usize {
    default_threshold(g.n(), average_degree(g)).unwrap_or(3)
}

/// Builds the schedule `run` would use for `g`.
pub fn schedule_for(g: &Graph, threshold: Option<usize>) -> Result<DeletionSchedule> {
    let threshold = threshold.unwrap_or_else(|| auto_threshold(g));
    let mut s = build_schedule(g, threshold)?;
    s.set_source_d(average_degree(g));
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: usize,
    pub bad: bool,
    pub q: Option<Colour>,
    pub component_size: usize,
    pub resolved: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub retries: usize,
    #[serde(skip)]
    pub component: Option<Vec<Vertex>>,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub schedule_secs: f64,
    pub base_secs: f64,
    pub steps_secs: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.schedule_secs + self.base_secs + self.steps_secs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub mode: StepMode,
    pub threshold: usize,
    pub r: usize,
    pub bad_count: usize,
    pub unresolved_count: usize,
    pub retries_total: usize,
    pub steps: Vec<StepRecord>,
    pub base_bits: u64,
    pub random_bits_consumed: u64,
    /// Adjacency entries inspected by all switching explorations.
    pub edges_scanned: u64,
    /// `k/d - 2` for the input's average degree `d`; `None` on edgeless input.
    pub epsilon: Option<f64>,
    pub warnings: Vec<String>,
    pub status: ColouringStatus,
    pub times: PhaseTimes,
}

#[derive(Serialize)]
struct Footer<'a> {
    summary: Summary<'a>,
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<u64>,
    n: usize,
    k: usize,
    seed: u64,
    mode: StepMode,
    #[serde(rename = "L")]
    threshold: usize,
    r: usize,
    bad_count: usize,
    unresolved_count: usize,
    retries_total: usize,
    random_bits_consumed: u64,
    base_bits: u64,
    edges_scanned: u64,
    epsilon: Option<f64>,
    proper: bool,
    witness: Option<[Vertex; 2]>,
    warnings: &'a [String],
    times: PhaseTimes,
}

#[derive(Serialize)]
struct TaggedStep<'a> {
    run: u64,
    #[serde(flatten)]
    step: &'a StepRecord,
}

impl RunLog {
    /// One JSON line per step followed by a summary line. With `run` set,
    /// every line carries the run index.
    pub fn to_jsonl(&self, run: Option<u64>) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let line = match run {
                Some(r) => serde_json::to_string(&TaggedStep { run: r, step: s }),
                None => serde_json::to_string(s),
            };
            out.push_str(&line.expect("step records serialise"));
            out.push('\n');
        }
        let witness = match self.status {
            ColouringStatus::Proper => None,
            ColouringStatus::Improper(e) => Some([e.lo(), e.hi()]),
        };
        let footer = Footer {
            summary: Summary {
                run,
                n: self.n,
                k: self.k,
                seed: self.seed,
                mode: self.mode,
                threshold: self.threshold,
                r: self.r,
                bad_count: self.bad_count,
                unresolved_count: self.unresolved_count,
                retries_total: self.retries_total,
                random_bits_consumed: self.random_bits_consumed,
                base_bits: self.base_bits,
                edges_scanned: self.edges_scanned,
                epsilon: self.epsilon,
                proper: witness.is_none(),
                witness,
                warnings: &self.warnings,
                times: self.times,
            },
        };
        out.push_str(&serde_json::to_string(&footer).expect("summaries serialise"));
        out.push('\n');
        out
    }
}

/// Samples a colouring of `g`.
pub fn run(g: &Graph, cfg: &RunConfig) -> Result<(Colouring, RunLog)> {
    cfg.validate()?;
    let start = Instant::now();
    let schedule = schedule_for(g, cfg.threshold)?;
    let schedule_secs = start.elapsed().as_secs_f64();
    let (colouring, mut log) = run_with_schedule(&schedule, cfg)?;
    log.times.schedule_secs = schedule_secs;
    Ok((colouring, log))
}

/// Samples a colouring of the schedule's full graph using a prebuilt schedule.
pub fn run_with_schedule(schedule: &DeletionSchedule, cfg: &RunConfig) -> Result<(Colouring, RunLog)> {
    cfg.validate()?;
    let n = schedule.source_n();
    let k = cfg.k;
    let m_total = schedule.base().m() + schedule.r();
    let d = if n == 0 { 0.0 } else { 2.0 * m_total as f64 / n as f64 };
    let epsilon = (d > 0.0).then(|| k as f64 / d - 2.0);
    let mut warnings = Vec::new();
    if (k as f64) < (2.0 + WARN_MARGIN) * d {
        let msg = format!("k = {k} is below (2 + {WARN_MARGIN}) * d = {:.3}; accuracy guarantees do not apply", (2.0 + WARN_MARGIN) * d);
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let t = Instant::now();
    let base = sample_base(schedule.base(), k, cfg.seed, cfg.c_max)?;
    let base_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut g = schedule.base().clone();
    let mut y = base.colouring;
    let mut engine = StepEngine::new(n);
    let mut steps = Vec::with_capacity(schedule.r());
    let mut step_bits = 0;
    let (mut bad_count, mut unresolved_count, mut retries_total, mut scanned) = (0, 0, 0, 0u64);
    for (i, e) in schedule.deletions().iter().enumerate() {
        g.add_edge(e.lo(), e.hi())?;
        let (v, u) = (e.lo(), e.hi());
        if y.colour(v) != y.colour(u) {
            steps.push(StepRecord {
                i,
                bad: false,
                q: None,
                component_size: 0,
                resolved: true,
                retries: 0,
                component: None,
            });
            continue;
        }
        let mut stream = RandomStream::new(cfg.seed, StreamLabel::Step(i));
        let out = engine.step(&g, v, u, y, &mut stream, cfg.mode)?;
        step_bits += stream.bits_consumed();
        bad_count += 1;
        if !out.resolved {
            unresolved_count += 1;
        }
        retries_total += out.retries_used;
        let component = out.component.as_ref();
        scanned += component.map_or(0, |c| c.edges_scanned as u64);
        let size = out.component_size();
        steps.push(StepRecord {
            i,
            bad: true,
            q: out.chosen_q,
            component_size: size,
            resolved: out.resolved,
            retries: out.retries_used,
            component: component.filter(|_| size < COMPONENT_LIST_CAP).map(|c| c.vertices()),
        });
        y = out.colouring;
    }
    let steps_secs = t.elapsed().as_secs_f64();

    if cfg.mode == StepMode::Retry && unresolved_count > 0 {
        let msg = format!("{unresolved_count} step(s) exhausted the palette without resolving");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let status = y.status(&g);
    let log = RunLog {
        n,
        k,
        seed: cfg.seed,
        mode: cfg.mode,
        threshold: schedule.threshold(),
        r: schedule.r(),
        bad_count,
        unresolved_count,
        retries_total,
        steps,
        base_bits: base.bits,
        random_bits_consumed: base.bits + step_bits,
        edges_scanned: scanned,
        epsilon,
        warnings,
        status,
        times: PhaseTimes {
            schedule_secs: 0.0,
            base_secs,
            steps_secs,
        },
    };
    Ok((y, log))
}

/// `m` independent runs; run `i` uses seed `run_seed(cfg.seed, i)`, so the
/// first run equals [`run`] with the same configuration. Results come back
/// in run order whatever the worker count.
pub fn sample_many(g: &Graph, cfg: &RunConfig, m: usize, workers: usize) -> Result<Vec<(Colouring, RunLog)>> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::param("m", "needs at least one sample"));
    }
    let start = Instant::now();
    let schedule = schedule_for(g, cfg.threshold)?;
    let schedule_secs = start.elapsed().as_secs_f64();
    let one = |i: usize| {
        let mut c = cfg.clone();
        c.seed = run_seed(cfg.seed, i as u64);
        run_with_schedule(&schedule, &c)
            .map(|(col, mut log)| {
                log.times.schedule_secs = schedule_secs;
                (col, log)
            })
            .map_err(|e| Error::Run {
                index: i as u64,
                source: Box::new(e),
            })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    pool.install(|| (0..m).into_par_iter().map(one).collect())
}

/// Header line of a colouring file.
pub fn colouring_header(n: usize, k: usize, seed: u64) -> String {
    format!("# n={n} k={k} seed={seed}")
}

/// Colouring file text: header plus one line per colouring.
pub fn colouring_file(n: usize, k: usize, seed: u64, colourings: &[Colouring]) -> String {
    let mut out = colouring_header(n, k, seed);
    out.push('\n');
    for c in colourings {
        out.push_str(&c.to_line());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouringFile {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub colourings: Vec<Colouring>,
}

pub fn parse_colouring_file(text: &str) -> Result<ColouringFile> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty colouring file".into()))?;
    let fields = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let (mut n, mut k, mut seed) = (None, None, None);
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field {field:?}")))?;
        let bad = |_| Error::Format(format!("bad header value {field:?}"));
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(bad)?),
            "k" => k = Some(value.parse::<usize>().map_err(bad)?),
            "seed" => seed = Some(value.parse::<u64>().map_err(bad)?),
            _ => {}
        }
    }
    let (Some(n), Some(k), Some(seed)) = (n, k, seed) else {
        return Err(Error::Format("header must record n, k and seed".into()));
    };
    let mut colourings = Vec::new();
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let colours = if n == 0 {
            Vec::new()
        } else {
            line.split(',')
                .map(|s| s.trim().parse::<Colour>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Format(format!("line {}: {e}", row + 2)))?
        };
        if colours.len() != n {
            return Err(Error::Format(format!("line {}: expected {n} colours, got {}", row + 2, colours.len())));
        }
        colourings.push(Colouring::new(colours, k)?);
    }
    Ok(ColouringFile { n, k, seed, colourings })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchPoint {
    pub n: usize,
    pub times: Vec<f64>,
    pub median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub d: f64,
    pub k: usize,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of log median time against log n; absent for a
    /// single size.
    pub exponent: Option<f64>,
}

impl BenchReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let _ = writeln!(s, "n={} median_secs={:.6} runs={}", p.n, p.median, p.times.len());
        }
        match self.exponent {
            Some(e) => {
                let _ = writeln!(s, "fitted exponent p={e:.4}");
            }
            None => s.push_str("fitted exponent: n/a (single size)\n"),
        }
        s
    }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Times graph generation plus a full run for each size and seed, runs
/// executed one after another.
pub fn bench(sizes: &[usize], d: f64, k: usize, seeds: usize, seed: u64, mode: StepMode) -> Result<BenchReport> {
    if sizes.is_empty() {
        return Err(Error::param("sizes", "needs at least one size"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("sizes", "must be strictly ascending"));
    }
    if seeds == 0 {
        return Err(Error::param("seeds", "needs at least one seed"));
    }
    let mut points = Vec::new();
    for &n in sizes {
        let mut times = Vec::with_capacity(seeds);
        for s in 0..seeds {
            let run_s = run_seed(seed, s as u64);
            let start = Instant::now();
            let g = generate_gnp(n, d, &mut RandomStream::new(run_s, StreamLabel::Generation))?;
            let cfg = RunConfig::new(k, run_s).with_mode(mode);
            run(&g, &cfg)?;
            times.push(start.elapsed().as_secs_f64());
        }
        points.push(BenchPoint {
            n,
            median: median(&times),
            times,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.median.max(1e-9).ln()).collect();
    Ok(BenchReport {
        d,
        k,
        exponent: ols_slope(&xs, &ys),
        points,
    })
}
