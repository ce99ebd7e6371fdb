//! How far `σ_u` is from uniform once `σ_v` is fixed.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use recolour_core::graph::distance;
use recolour_core::pipeline::sample_many;
use recolour_core::{Graph, RunConfig, StepMode};
use serde::Serialize;

use crate::enumerate::{proper_colour_vectors, ENUMERATION_LIMIT};
use crate::error::{LabError, LabResult};

/// Conditional counts below this are reported as insufficient.
pub const MIN_CONDITIONAL_SAMPLES: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationProbe {
    /// `max_{c,q} |P[σ_u = c | σ_v = q] - 1/k|`.
    pub deviation: f64,
    /// Exact value as `"num/den"` when computed by enumeration.
    pub exact: Option<String>,
    /// Largest standard error over the conditional estimates, when sampled.
    pub stderr: Option<f64>,
    pub insufficient: bool,
    pub distance: Option<usize>,
}

/// Exact under the enumeration limit, otherwise estimated from `samples`
/// retry-mode runs of the sampler.
pub fn correlation_decay_probe(g: &Graph, v: usize, u: usize, k: usize, samples: usize, seed: u64) -> LabResult<CorrelationProbe> {
    g.check_vertex(v)?;
    g.check_vertex(u)?;
    let dist = distance(g, v, u, g.n())?;
    let mut joint = vec![vec![0usize; k]; k];
    let exact = (k as f64).powi(g.n() as i32) <= ENUMERATION_LIMIT;
    if exact {
        for cs in proper_colour_vectors(g, k)? {
            joint[cs[v] as usize][cs[u] as usize] += 1;
        }
        let mut worst = BigRational::zero();
        let inv_k = BigRational::new(1.into(), (k as i64).into());
        for row in &joint {
            let total: usize = row.iter().sum();
            if total == 0 {
                continue;
            }
            for &x in row {
                let p = BigRational::new((x as i64).into(), (total as i64).into());
                let dev = (p - &inv_k).abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        return Ok(CorrelationProbe {
            deviation: worst.to_f64().unwrap_or(f64::NAN),
            exact: Some(crate::dist::ratio_string(&worst)),
            stderr: None,
            insufficient: false,
            distance: dist,
        });
    }
    if samples == 0 {
        return Err(LabError::Invalid("sampling needs at least one sample".into()));
    }
    let cfg = RunConfig::new(k, seed).with_mode(StepMode::Retry);
    for (c, _) in sample_many(g, &cfg, samples, 1)? {
        joint[c.colour(v) as usize][c.colour(u) as usize] += 1;
    }
    let (mut worst, mut se, mut insufficient) = (0f64, 0f64, false);
    for row in &joint {
        let total: usize = row.iter().sum();
        if total == 0 {
            continue;
        }
        if total < MIN_CONDITIONAL_SAMPLES {
            insufficient = true;
        }
        for &x in row {
            let p = x as f64 / total as f64;
            worst = worst.max((p - 1.0 / k as f64).abs());
            // Floor the variance at that of a 1/k proportion so empty cells
            // still carry an error bar.
            let var = (p * (1.0 - p)).max((1.0 / k as f64) * (1.0 - 1.0 / k as f64) / total as f64);
            se = se.max((var / total as f64).sqrt());
        }
    }
    Ok(CorrelationProbe {
        deviation: worst,
        exact: None,
        stderr: Some(se),
        insufficient,
        distance: dist,
    })
}
