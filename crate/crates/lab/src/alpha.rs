//! Pathological-event fractions and the single-step accuracy check.

use num_rational::BigRational;
use num_traits::Zero;
use recolour_core::switching::StepEngine;
use recolour_core::{Colour, Colouring, Edge, Graph};
use serde::Serialize;

use crate::dist::{tv_distance, ColouringDistribution};
use crate::enumerate::{encode, proper_colour_vectors};
use crate::error::{LabError, LabResult};
use crate::exact::{step_pushforward, uniform_proper};

/// Fractions for one ordered colour pair `(c, q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairAlpha {
    pub c: Colour,
    pub q: Colour,
    /// Size of Ω(c,c): `σ_v = σ_u = c`.
    pub same_size: usize,
    /// Fraction of Ω(c,c) whose `Q_{c,q}` contains `u`.
    #[serde(skip)]
    pub same: BigRational,
    /// Size of Ω(q,c): `σ_v = q, σ_u = c`.
    pub swapped_size: usize,
    /// Fraction of Ω(q,c) whose `Q_{q,c}` contains `u`.
    #[serde(skip)]
    pub swapped: BigRational,
}

impl PairAlpha {
    pub fn beta(&self) -> BigRational {
        self.same.clone().max(self.swapped.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaReport {
    pub pairs: Vec<PairAlpha>,
    /// Largest per-pair fraction; zero when the report is degenerate.
    pub alpha: BigRational,
    /// True when every Ω(c,c) is empty.
    pub degenerate: bool,
}

fn fraction(hits: usize, size: usize) -> BigRational {
    if size == 0 {
        BigRational::zero()
    } else {
        BigRational::new((hits as i64).into(), (size as i64).into())
    }
}

/// Exact fractions for the pair `(v, u)` in `g_next` with the edge `{v, u}`
/// removed (if present).
pub fn alpha_exact(g_next: &Graph, v: usize, u: usize, k: usize) -> LabResult<AlphaReport> {
    if v == u {
        return Err(LabError::Invalid("v and u must differ".into()));
    }
    g_next.check_vertex(v)?;
    g_next.check_vertex(u)?;
    let g = g_next.without_edge(Edge::new(v, u));
    let mut engine = StepEngine::new(g.n());
    // hits[c][q] and sizes, indexed by colour.
    let mut same_hits = vec![vec![0usize; k]; k];
    let mut same_size = vec![0usize; k];
    let mut swapped_hits = vec![vec![0usize; k]; k];
    let mut swapped_size = vec![vec![0usize; k]; k];
    for cs in proper_colour_vectors(&g, k)? {
        let (cv, cu) = (cs[v], cs[u]);
        let x = Colouring::new(cs, k)?;
        if cv == cu {
            let c = cv as usize;
            same_size[c] += 1;
            for q in (0..k as Colour).filter(|&q| q != cv) {
                if engine.component(&g, &x, v, q, u, None)?.contains_u {
                    same_hits[c][q as usize] += 1;
                }
            }
        } else {
            // σ ∈ Ω(q, c) with q = σ_v, c = σ_u; explore Q_{q,c}.
            let (c, q) = (cu as usize, cv as usize);
            swapped_size[c][q] += 1;
            if engine.component(&g, &x, v, cu, u, None)?.contains_u {
                swapped_hits[c][q] += 1;
            }
        }
    }
    let mut pairs = Vec::new();
    for c in 0..k {
        for q in (0..k).filter(|&q| q != c) {
            pairs.push(PairAlpha {
                c: c as Colour,
                q: q as Colour,
                same_size: same_size[c],
                same: fraction(same_hits[c][q], same_size[c]),
                swapped_size: swapped_size[c][q],
                swapped: fraction(swapped_hits[c][q], swapped_size[c][q]),
            });
        }
    }
    let degenerate = same_size.iter().all(|&s| s == 0);
    // Without bad colourings the step never switches, whatever Ω(q,c) holds.
    let alpha = if degenerate {
        BigRational::zero()
    } else {
        pairs.iter().map(PairAlpha::beta).max().unwrap_or_else(BigRational::zero)
    };
    Ok(AlphaReport { pairs, alpha, degenerate })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepAccuracy {
    pub tv: Option<BigRational>,
    pub alpha: BigRational,
    /// `None` when `g_next` (or `g_next` minus the edge) has no proper colouring.
    pub pass: Option<bool>,
}

/// Compares the uniform law on proper colourings of `g_next` with the law
/// of one faithful step applied to a uniform colouring of `g_next` minus
/// `{v, u}`.
pub fn verify_step_accuracy(g_next: &Graph, v: usize, u: usize, k: usize) -> LabResult<StepAccuracy> {
    if !g_next.has_edge(v, u) {
        return Err(LabError::Invalid(format!("{{{v}, {u}}} is not an edge of g_next")));
    }
    let alpha = alpha_exact(g_next, v, u, k)?.alpha;
    let nu = uniform_proper(g_next, k)?;
    let nu_step = step_pushforward(g_next, v, u, k)?;
    match (nu, nu_step) {
        (Some(nu), Some(nu_step)) => {
            let tv = tv_distance(&nu, &nu_step)?;
            let pass = tv <= alpha;
            Ok(StepAccuracy {
                tv: Some(tv),
                alpha,
                pass: Some(pass),
            })
        }
        _ => Ok(StepAccuracy {
            tv: None,
            alpha,
            pass: None,
        }),
    }
}

/// Uniform law on the proper colourings of `g` with `σ_v = c`.
pub fn conditioned_uniform(g: &Graph, v: usize, c: Colour, k: usize) -> LabResult<Option<ColouringDistribution>> {
    let codes: Vec<u64> = proper_colour_vectors(g, k)?
        .into_iter()
        .filter(|cs| cs[v] == c)
        .map(|cs| encode(&cs, k))
        .collect();
    if codes.is_empty() {
        return Ok(None);
    }
    Ok(Some(ColouringDistribution::uniform(g.n(), k, codes)?))
}
