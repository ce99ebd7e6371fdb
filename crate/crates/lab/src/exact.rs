//! Exact output laws of the sampler, obtained by enumerating every random
//! branch of the production code.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use recolour_core::base::ComponentSampler;
use recolour_core::graph::components;
use recolour_core::pipeline::schedule_for;
use recolour_core::switching::StepEngine;
use recolour_core::{Chooser, Colour, Colouring, DeletionSchedule, Graph, RunConfig, StepMode};

use crate::dist::ColouringDistribution;
use crate::enumerate::{decode, encode, proper_colour_vectors};
use crate::error::{guard, LabError, LabResult};
use crate::replay::enumerate_branches;

/// Cap on `|Ω_0| * (k-1)^r` for exact pipeline laws.
pub const BRANCH_LIMIT: f64 = 1e7;

/// Uniform distribution over the proper colourings of `g`; `None` when
/// there are none.
pub fn uniform_proper(g: &Graph, k: usize) -> LabResult<Option<ColouringDistribution>> {
    let all = proper_colour_vectors(g, k)?;
    if all.is_empty() {
        return Ok(None);
    }
    Ok(Some(ColouringDistribution::uniform(g.n(), k, all.iter().map(|c| encode(c, k)))?))
}

/// Exact law of the base sampler on `g0`, as `(code, probability)` pairs.
fn base_law(g0: &Graph, k: usize, c_max: usize, limit: f64) -> LabResult<BTreeMap<u64, BigRational>> {
    let n = g0.n();
    let mut partial: Vec<(Vec<Colour>, BigRational)> = vec![(vec![0; n], BigRational::one())];
    let mut size = 1f64;
    for comp in components(g0) {
        let branches: Vec<(Vec<Colour>, BigRational)> = if comp.vertices.len() == 1 {
            enumerate_branches(|ch| Ok(vec![ch.pick_uniform(k) as Colour]), k)?
        } else {
            let local = g0.induced(&comp.vertices);
            let sampler = ComponentSampler::new(&local, k, c_max)?;
            size *= sampler.count().to_f64().unwrap_or(f64::INFINITY);
            guard("base colourings", size, limit)?;
            enumerate_branches(|ch| Ok(sampler.sample(ch)?), limit as usize)?
        };
        if comp.vertices.len() == 1 {
            size *= k as f64;
            guard("base colourings", size, limit)?;
        }
        let mut next = Vec::with_capacity(partial.len() * branches.len());
        for (cs, p) in &partial {
            for (local, q) in &branches {
                let mut full = cs.clone();
                for (i, &v) in comp.vertices.iter().enumerate() {
                    full[v] = local[i];
                }
                next.push((full, p * q));
            }
        }
        partial = next;
    }
    let mut law = BTreeMap::new();
    for (cs, p) in partial {
        *law.entry(encode(&cs, k)).or_insert_with(BigRational::zero) += p;
    }
    Ok(law)
}

/// Exact law of the base sampler on `g0`.
pub fn base_distribution(g0: &Graph, k: usize, c_max: usize) -> LabResult<ColouringDistribution> {
    let law = base_law(g0, k, c_max, BRANCH_LIMIT)?;
    ColouringDistribution::from_probabilities(g0.n(), k, law)
}

/// Pushes `law` (colourings of `g_next` minus `{v, u}`) through one
/// faithful step.
fn push_through_step(
    law: BTreeMap<u64, BigRational>,
    g_next: &Graph,
    v: usize,
    u: usize,
    k: usize,
    engine: &mut StepEngine,
) -> LabResult<BTreeMap<u64, BigRational>> {
    let n = g_next.n();
    let mut out = BTreeMap::new();
    for (code, p) in law {
        let cs = decode(code, n, k);
        if cs[v] != cs[u] {
            *out.entry(code).or_insert_with(BigRational::zero) += p;
            continue;
        }
        let x = Colouring::new(cs, k)?;
        let branches = enumerate_branches(
            |ch| Ok(engine.step(g_next, v, u, x.clone(), ch, StepMode::Faithful)?.colouring),
            k,
        )?;
        for (y, q) in branches {
            *out.entry(encode(y.colours(), k)).or_insert_with(BigRational::zero) += &p * q;
        }
    }
    Ok(out)
}

/// Exact law of the faithful-mode pipeline output for a given schedule.
pub fn exact_schedule_distribution(schedule: &DeletionSchedule, k: usize, c_max: usize) -> LabResult<ColouringDistribution> {
    if k < 2 {
        return Err(LabError::Invalid("k must be at least 2".into()));
    }
    let branching = ((k - 1) as f64).powi(schedule.r() as i32);
    let mut law = base_law(schedule.base(), k, c_max, BRANCH_LIMIT / branching)?;
    let mut g = schedule.base().clone();
    let mut engine = StepEngine::new(g.n());
    for e in schedule.deletions() {
        g.add_edge(e.lo(), e.hi())?;
        law = push_through_step(law, &g, e.lo(), e.hi(), k, &mut engine)?;
    }
    ColouringDistribution::from_probabilities(g.n(), k, law)
}

/// Exact law of `run(g, cfg)` in faithful mode.
pub fn exact_output_distribution(g: &Graph, cfg: &RunConfig) -> LabResult<ColouringDistribution> {
    if cfg.mode != StepMode::Faithful {
        return Err(LabError::Invalid("exact output laws are defined for faithful mode".into()));
    }
    let schedule = schedule_for(g, cfg.threshold)?;
    exact_schedule_distribution(&schedule, cfg.k, cfg.c_max)
}

/// Exact law of one faithful step applied to a uniform proper colouring of
/// `g_next` minus `{v, u}`, as integer masses over `|Ω| * (k-1)`. `None`
/// when that graph has no proper colouring.
pub fn step_pushforward(g_next: &Graph, v: usize, u: usize, k: usize) -> LabResult<Option<ColouringDistribution>> {
    let g = g_next.without_edge(recolour_core::Edge::new(v, u));
    let omega = proper_colour_vectors(&g, k)?;
    if omega.is_empty() {
        return Ok(None);
    }
    let mut engine = StepEngine::new(g.n());
    let scale = BigRational::from_integer((k as i64 - 1).into());
    let mut masses: BTreeMap<u64, BigUint> = BTreeMap::new();
    for cs in omega {
        if cs[v] != cs[u] {
            *masses.entry(encode(&cs, k)).or_insert_with(BigUint::zero) += (k - 1) as u64;
            continue;
        }
        let x = Colouring::new(cs, k)?;
        let branches = enumerate_branches(
            |ch| Ok(engine.step(g_next, v, u, x.clone(), ch, StepMode::Faithful)?.colouring),
            k,
        )?;
        for (y, p) in branches {
            let m = &p * &scale;
            if !m.is_integer() {
                return Err(LabError::Invalid(format!("branch probability {p} is not a multiple of 1/(k-1)")));
            }
            *masses.entry(encode(y.colours(), k)).or_insert_with(BigUint::zero) +=
                m.to_integer().to_biguint().expect("non-negative");
        }
    }
    Ok(Some(ColouringDistribution::from_masses(g_next.n(), k, masses)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv_distance;
    use num_traits::Zero;

    #[test]
    fn tree_output_is_uniform() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let cfg = RunConfig::new(3, 0).with_mode(StepMode::Faithful);
        let out = exact_output_distribution(&g, &cfg).unwrap();
        let uni = uniform_proper(&g, 3).unwrap().unwrap();
        assert!(tv_distance(&out, &uni).unwrap().is_zero());
        assert_eq!(out.support_len(), 48);
    }

    #[test]
    fn forest_with_isolated_vertices() {
        let g = Graph::from_edges(5, [(0, 2), (3, 4)]).unwrap();
        let out = base_distribution(&g, 3, 2).unwrap();
        let uni = uniform_proper(&g, 3).unwrap().unwrap();
        assert_eq!(out, uni);
    }

    #[test]
    fn retry_mode_rejected() {
        let cfg = RunConfig::new(3, 0);
        assert!(exact_output_distribution(&Graph::path(3), &cfg).is_err());
    }

    #[test]
    fn six_cycle_single_step_law() {
        let g = Graph::cycle(6);
        let cfg = RunConfig::new(3, 0).with_mode(StepMode::Faithful).with_threshold(4);
        let out = exact_output_distribution(&g, &cfg).unwrap();
        // Total mass is 1 and some mass may sit on improper colourings.
        let total: BigRational = out.iter().map(|(_, p)| p).sum();
        assert!(total.is_one());
        let uni = uniform_proper(&g, 3).unwrap().unwrap();
        let tv = tv_distance(&out, &uni).unwrap();
        assert!(tv < BigRational::one());
    }
}
