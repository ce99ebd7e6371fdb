//! Monte Carlo counts of disagreement paths under the product measure.

use rayon::prelude::*;
use recolour_core::graph::generate_gnp;
use recolour_core::pipeline::ols_slope;
use recolour_core::rng::{RandomStream, StreamLabel};
use recolour_core::Graph;
use serde::Serialize;

use crate::error::{LabError, LabResult};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub l: usize,
    /// Mean number of marked simple paths with `l` edges from the root.
    pub gamma: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathDecayReport {
    pub n: usize,
    pub d: f64,
    pub k: usize,
    pub trials: usize,
    pub rows: Vec<DecayRow>,
    /// `exp` of the least-squares slope of `ln gamma(l)` over `l >= 1`
    /// with positive means.
    pub ratio: Option<f64>,
    /// Bootstrap percentile 95% interval for `ratio`.
    pub ci: Option<(f64, f64)>,
}

impl PathDecayReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,gamma,stderr\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.l, r.gamma, r.stderr));
        }
        s
    }
}

/// Marks of one trial: the root is always marked, every other vertex with
/// probability `1/(k - deg)` (1 when `k <= deg`).
fn sample_marks(g: &Graph, k: usize, root: usize, stream: &mut RandomStream) -> Vec<bool> {
    (0..g.n())
        .map(|w| {
            if w == root {
                return true;
            }
            let deg = g.degree(w);
            if k <= deg {
                true
            } else {
                stream.bernoulli(1.0 / (k - deg) as f64)
            }
        })
        .collect()
}

/// Number of simple paths from `root` through marked vertices, by length.
pub fn count_marked_paths(g: &Graph, marks: &[bool], root: usize, l_max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; l_max + 1];
    let mut on_path = vec![false; g.n()];
    fn dfs(g: &Graph, marks: &[bool], w: usize, depth: usize, l_max: usize, on_path: &mut [bool], counts: &mut [u64]) {
        counts[depth] += 1;
        if depth == l_max {
            return;
        }
        on_path[w] = true;
        for &x in g.neighbours(w) {
            if marks[x] && !on_path[x] {
                dfs(g, marks, x, depth + 1, l_max, on_path, counts);
            }
        }
        on_path[w] = false;
    }
    if marks[root] {
        dfs(g, marks, root, 0, l_max, &mut on_path, &mut counts);
    }
    counts
}

fn fitted_ratio(means: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = means
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &m)| m > 0.0)
        .map(|(l, &m)| (l as f64, m.ln()))
        .unzip();
    ols_slope(&xs, &ys).map(f64::exp)
}

fn means(per_trial: &[Vec<u64>], pick: impl Iterator<Item = usize>, l_max: usize) -> Vec<f64> {
    let mut sums = vec![0f64; l_max + 1];
    let mut count = 0usize;
    for t in pick {
        for (s, &c) in sums.iter_mut().zip(&per_trial[t]) {
            *s += c as f64;
        }
        count += 1;
    }
    sums.iter().map(|s| s / count as f64).collect()
}

/// Per trial: a fresh `G(n, d/n)`, product-measure marks, and path counts
/// from vertex 0 up to `l_max` edges. Trial `t` draws from its own stream,
/// so results do not depend on `workers`.
pub fn path_decay_sim(n: usize, d: f64, k: usize, trials: usize, l_max: usize, seed: u64, workers: usize) -> LabResult<PathDecayReport> {
    if trials == 0 {
        return Err(LabError::Invalid("trials must be positive".into()));
    }
    if n == 0 {
        return Err(LabError::Invalid("n must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Invalid(e.to_string()))?;
    let per_trial: Vec<Vec<u64>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut stream = RandomStream::new(seed, StreamLabel::Trial(t as u64));
                let g = generate_gnp(n, d, &mut stream)?;
                let marks = sample_marks(&g, k, 0, &mut stream);
                Ok(count_marked_paths(&g, &marks, 0, l_max))
            })
            .collect::<LabResult<Vec<_>>>()
    })?;
    let mean = means(&per_trial, 0..trials, l_max);
    let rows = (0..=l_max)
        .map(|l| {
            let var = if trials > 1 {
                per_trial.iter().map(|c| (c[l] as f64 - mean[l]).powi(2)).sum::<f64>() / (trials - 1) as f64
            } else {
                0.0
            };
            DecayRow {
                l,
                gamma: mean[l],
                stderr: (var / trials as f64).sqrt(),
            }
        })
        .collect();
    let ratio = fitted_ratio(&mean);
    let ci = ratio.and_then(|_| {
        let mut boot = RandomStream::new(seed, StreamLabel::Bootstrap);
        let mut ratios: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
            .filter_map(|_| {
                let picks: Vec<usize> = (0..trials).map(|_| boot.uniform_below(trials as u64) as usize).collect();
                fitted_ratio(&means(&per_trial, picks.into_iter(), l_max))
            })
            .collect();
        if ratios.len() < BOOTSTRAP_RESAMPLES / 2 {
            return None;
        }
        ratios.sort_by(f64::total_cmp);
        let at = |q: f64| ratios[((ratios.len() - 1) as f64 * q).round() as usize];
        Some((at(0.025), at(0.975)))
    });
    Ok(PathDecayReport {
        n,
        d,
        k,
        trials,
        rows,
        ratio,
        ci,
    })
}
