//! Disagreement paths versus the independent product measure.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use recolour_core::switching::StepEngine;
use recolour_core::{Colour, Colouring, Graph, Vertex};
use serde::Serialize;

use crate::enumerate::proper_colour_vectors;
use crate::error::{LabError, LabResult};
use crate::graphs::{connected_graphs_up_to_isomorphism, simple_paths_from};

/// Mark probability `q_w = 1/(k - deg(w))` of the product measure, or 1 when
/// `k <= deg(w)`.
pub fn mark_probability(g: &Graph, w: Vertex, k: usize) -> BigRational {
    let deg = g.degree(w);
    if k <= deg + 1 {
        BigRational::one()
    } else {
        BigRational::new(1.into(), ((k - deg) as i64).into())
    }
}

/// Product-measure probability that every vertex of `path` is marked; the
/// root is always marked.
pub fn product_bound(g: &Graph, path: &[Vertex], k: usize) -> BigRational {
    path.iter()
        .skip(1)
        .fold(BigRational::one(), |acc, &w| acc * mark_probability(g, w, k))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationCheck {
    pub p_l: BigRational,
    pub p_p: BigRational,
    pub pass: bool,
}

fn check_path(g: &Graph, v: Vertex, path: &[Vertex]) -> LabResult<()> {
    if path.first() != Some(&v) {
        return Err(LabError::Invalid("path must start at v".into()));
    }
    for (i, w) in path.iter().enumerate() {
        g.check_vertex(*w)?;
        if path[..i].contains(w) {
            return Err(LabError::Invalid("path repeats a vertex".into()));
        }
    }
    if path.windows(2).any(|p| !g.has_edge(p[0], p[1])) {
        return Err(LabError::Invalid("consecutive path vertices must be adjacent".into()));
    }
    Ok(())
}

/// Bitmasks of `Q_{c,q}` for every proper colouring with `σ_v = c` and
/// every `q ≠ c`. The total number of `(σ, q)` draws is `masks.len()`.
fn disagreement_masks(g: &Graph, v: Vertex, k: usize, c: Colour) -> LabResult<Vec<u64>> {
    let mut engine = StepEngine::new(g.n());
    let mut masks = Vec::new();
    for cs in proper_colour_vectors(g, k)?.into_iter().filter(|cs| cs[v] == c) {
        let x = Colouring::new(cs, k)?;
        for q in (0..k as Colour).filter(|&q| q != c) {
            let comp = engine.component(g, &x, v, q, v, None)?;
            masks.push(comp.vertices().iter().fold(0u64, |m, &w| m | 1 << w));
        }
    }
    Ok(masks)
}

fn path_mask(path: &[Vertex]) -> u64 {
    path.iter().fold(0u64, |m, &w| m | 1 << w)
}

fn fraction_covering(masks: &[u64], target: u64) -> BigRational {
    if masks.is_empty() {
        return BigRational::zero();
    }
    let hits = masks.iter().filter(|&&m| m & target == target).count();
    BigRational::new((hits as i64).into(), (masks.len() as i64).into())
}

/// Exact probability that `path` lies in `Q_{c,q}` for a uniform proper
/// colouring with `σ_v = c` and a uniform `q ≠ c`, against the product
/// measure. With no such colouring the event is empty and `p_l = 0`.
pub fn verify_domination(g: &Graph, v: Vertex, path: &[Vertex], k: usize, c: Colour) -> LabResult<DominationCheck> {
    if g.n() > 64 {
        return Err(LabError::Invalid("at most 64 vertices".into()));
    }
    check_path(g, v, path)?;
    let masks = disagreement_masks(g, v, k, c)?;
    let p_l = fraction_covering(&masks, path_mask(path));
    let p_p = product_bound(g, path, k);
    let pass = p_l <= p_p;
    Ok(DominationCheck { p_l, p_p, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationViolation {
    pub edges: Vec<[Vertex; 2]>,
    pub n: usize,
    pub path: Vec<Vertex>,
    pub c: Colour,
    pub p_l: String,
    pub p_p: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepSummary {
    pub graphs: usize,
    pub instances: usize,
    pub violations: Vec<DominationViolation>,
}

/// Every connected graph up to isomorphism with `n <= max_n`, every root,
/// every colour and every simple path of at most `max_len` edges.
pub fn domination_sweep(max_n: usize, k: usize, max_len: usize) -> LabResult<SweepSummary> {
    let graphs: Vec<Graph> = (1..=max_n).flat_map(connected_graphs_up_to_isomorphism).collect();
    let per_graph: Vec<LabResult<(usize, Vec<DominationViolation>)>> = graphs
        .par_iter()
        .map(|g| {
            let mut instances = 0;
            let mut violations = Vec::new();
            for v in 0..g.n() {
                let paths = simple_paths_from(g, v, max_len);
                for c in 0..k as Colour {
                    let masks = disagreement_masks(g, v, k, c)?;
                    for path in &paths {
                        instances += 1;
                        let p_l = fraction_covering(&masks, path_mask(path));
                        let p_p = product_bound(g, path, k);
                        if p_l > p_p {
                            violations.push(DominationViolation {
                                edges: g.edges().map(|e| [e.lo(), e.hi()]).collect(),
                                n: g.n(),
                                path: path.clone(),
                                c,
                                p_l: crate::dist::ratio_string(&p_l),
                                p_p: crate::dist::ratio_string(&p_p),
                            });
                        }
                    }
                }
            }
            Ok((instances, violations))
        })
        .collect();
    let mut summary = SweepSummary {
        graphs: graphs.len(),
        ..SweepSummary::default()
    };
    for r in per_graph {
        let (i, v) = r?;
        summary.instances += i;
        summary.violations.extend(v);
    }
    Ok(summary)
}
