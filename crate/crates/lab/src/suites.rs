//! Named groups of exact checks over the fixture sets.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use recolour_core::pipeline::schedule_for;
use recolour_core::{Edge, Graph, RunConfig, StepMode};
use serde_json::json;

use crate::alpha::{alpha_exact, verify_step_accuracy};
use crate::bijection::check_bijection;
use crate::dist::{ratio_string, tv_distance};
use crate::domination::domination_sweep;
use crate::error::{LabError, LabResult};
use crate::exact::{exact_output_distribution, uniform_proper};
use crate::fixtures::{base_fixtures, corpus, non_adjacent_pairs, pipeline_fixtures};
use crate::report::{CheckRecord, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    StepAlpha,
    PipelineTv,
    Bijection,
    Domination,
    BaseExact,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::StepAlpha, Suite::PipelineTv, Suite::Bijection, Suite::Domination, Suite::BaseExact];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StepAlpha => "step-alpha",
            Suite::PipelineTv => "pipeline-tv",
            Suite::Bijection => "bijection",
            Suite::Domination => "domination",
            Suite::BaseExact => "base-exact",
        }
    }

    pub fn default_options(self) -> SuiteOptions {
        match self {
            Suite::Domination => SuiteOptions { max_n: 6, ks: vec![4] },
            _ => SuiteOptions {
                max_n: 8,
                ks: vec![3, 4, 5],
            },
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of step-alpha, pipeline-tv, bijection, domination, base-exact"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Largest vertex count included.
    pub max_n: usize,
    pub ks: Vec<usize>,
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> LabResult<SuiteReport> {
    if opts.ks.is_empty() {
        return Err(LabError::Invalid("at least one k is required".into()));
    }
    let records = match suite {
        Suite::StepAlpha => step_alpha(opts)?,
        Suite::PipelineTv => pipeline_tv(opts)?,
        Suite::Bijection => bijection(opts)?,
        Suite::Domination => domination(opts)?,
        Suite::BaseExact => base_exact(opts)?,
    };
    Ok(SuiteReport { records })
}

fn edges_json(g: &Graph) -> serde_json::Value {
    json!(g.edges().map(|e| [e.lo(), e.hi()]).collect::<Vec<_>>())
}

fn corpus_instances(opts: &SuiteOptions) -> Vec<(&'static str, Graph, usize, usize, usize)> {
    let mut out = Vec::new();
    for f in corpus().into_iter().filter(|f| f.graph.n() <= opts.max_n) {
        for &(v, u) in &non_adjacent_pairs(&f.graph) {
            for &k in &opts.ks {
                out.push((f.name, f.graph.clone(), v, u, k));
            }
        }
    }
    out
}

fn step_alpha(opts: &SuiteOptions) -> LabResult<Vec<CheckRecord>> {
    corpus_instances(opts)
        .into_par_iter()
        .map(|(name, g, v, u, k)| {
            let g_next = g.with_edge(Edge::new(v, u))?;
            let res = verify_step_accuracy(&g_next, v, u, k)?;
            let mut rec = CheckRecord::new("step-alpha", json!({"graph": name, "v": v, "u": u, "k": k}))
                .value("alpha", ratio_string(&res.alpha));
            if let Some(tv) = &res.tv {
                rec = rec.value("tv", ratio_string(tv));
            }
            Ok(rec.verdict(res.pass))
        })
        .collect()
}

fn pipeline_tv(opts: &SuiteOptions) -> LabResult<Vec<CheckRecord>> {
    let mut jobs = Vec::new();
    for (f, l) in pipeline_fixtures().into_iter().filter(|(f, _)| f.graph.n() <= opts.max_n) {
        for &k in &opts.ks {
            jobs.push((f.clone(), l, k));
        }
    }
    jobs.into_par_iter()
        .map(|(f, l, k)| {
            let cfg = RunConfig::new(k, 0).with_mode(StepMode::Faithful).with_threshold(l);
            let schedule = schedule_for(&f.graph, Some(l))?;
            let inputs = json!({"graph": f.name, "L": l, "k": k, "r": schedule.r()});
            let Some(uniform) = uniform_proper(&f.graph, k)? else {
                return Ok(CheckRecord::new("pipeline-tv", inputs).value("note", "no proper colouring"));
            };
            let out = exact_output_distribution(&f.graph, &cfg)?;
            let tv = tv_distance(&out, &uniform)?;
            let mut g = schedule.base().clone();
            let mut alphas = Vec::new();
            for e in schedule.deletions() {
                g.add_edge(e.lo(), e.hi())?;
                alphas.push(alpha_exact(&g, e.lo(), e.hi(), k)?.alpha);
            }
            let bound: BigRational = alphas.iter().sum();
            Ok(CheckRecord::new("pipeline-tv", inputs)
                .value("tv", ratio_string(&tv))
                .value("alpha_sum", ratio_string(&bound))
                .value("alphas", alphas.iter().map(ratio_string).collect::<Vec<_>>())
                .verdict(Some(tv <= bound)))
        })
        .collect()
}

fn bijection(opts: &SuiteOptions) -> LabResult<Vec<CheckRecord>> {
    corpus_instances(opts)
        .into_par_iter()
        .map(|(name, g, v, u, k)| {
            let checks = check_bijection(&g, v, u, k)?;
            let violations: usize = checks.iter().map(|c| c.violations()).sum();
            let worst_tv = checks
                .iter()
                .map(|c| c.pushforward_tv.clone())
                .max()
                .unwrap_or_else(BigRational::zero);
            let pass = checks.iter().all(|c| c.pass());
            Ok(CheckRecord::new("bijection", json!({"graph": name, "v": v, "u": u, "k": k}))
                .value("pairs", checks.len())
                .value("violations", violations)
                .value("sizes", checks.iter().map(|c| [c.domain, c.codomain]).collect::<Vec<_>>())
                .value("pushforward_tv", ratio_string(&worst_tv))
                .verdict(Some(pass)))
        })
        .collect()
}

fn domination(opts: &SuiteOptions) -> LabResult<Vec<CheckRecord>> {
    if opts.max_n > 7 {
        return Err(LabError::Invalid("the domination sweep supports at most 7 vertices".into()));
    }
    let mut out = Vec::new();
    for &k in &opts.ks {
        let s = domination_sweep(opts.max_n, k, 3)?;
        let mut rec = CheckRecord::new("domination", json!({"max_n": opts.max_n, "k": k, "max_path_len": 3}))
            .value("graphs", s.graphs)
            .value("instances", s.instances)
            .value("violations", s.violations.len());
        if let Some(first) = s.violations.first() {
            rec = rec.value("first_violation", serde_json::to_value(first).expect("serialisable"));
        }
        out.push(rec.verdict(Some(s.violations.is_empty())));
    }
    Ok(out)
}

fn base_exact(opts: &SuiteOptions) -> LabResult<Vec<CheckRecord>> {
    let mut jobs = Vec::new();
    for f in base_fixtures().into_iter().filter(|f| f.graph.n() <= opts.max_n) {
        for &k in &opts.ks {
            jobs.push((f.clone(), k));
        }
    }
    jobs.into_par_iter()
        .map(|(f, k)| {
            let l = f.graph.n() + 1;
            let cfg = RunConfig::new(k, 0).with_mode(StepMode::Faithful).with_threshold(l);
            let inputs = json!({"graph": f.name, "edges": edges_json(&f.graph), "k": k});
            let Some(uniform) = uniform_proper(&f.graph, k)? else {
                return Ok(CheckRecord::new("base-exact", inputs).value("note", "no proper colouring"));
            };
            let out = exact_output_distribution(&f.graph, &cfg)?;
            let tv = tv_distance(&out, &uniform)?;
            Ok(CheckRecord::new("base-exact", inputs)
                .value("support", out.support_len())
                .value("tv", ratio_string(&tv))
                .verdict(Some(tv.is_zero())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_base_exact_suite() {
        let rep = run_suite(Suite::BaseExact, &SuiteOptions { max_n: 5, ks: vec![3] }).unwrap();
        assert!(rep.records.len() >= 5);
        assert!(rep.all_passed(), "{}", rep.to_jsonl());
        let line = rep.records[0].to_json_line();
        assert!(line.contains("\"tv\":\"0/1\""));
    }
}
