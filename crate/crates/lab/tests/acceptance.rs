//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use recolour_core::graph::generate_gnp;
use recolour_core::pipeline::{bench, run};
use recolour_core::rng::{RandomStream, StreamLabel};
use recolour_core::schedule::{audit_schedule, build_schedule, default_threshold};
use recolour_core::{RunConfig, StepMode};
use recolour_lab::decay::path_decay_sim;
use recolour_lab::report::SuiteReport;
use recolour_lab::{run_suite, Suite, SuiteOptions};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite_outcome(rep: SuiteReport) -> Outcome {
    let first_failure = rep.records.iter().find(|r| r.failed()).map(|r| r.to_json_line());
    Outcome {
        pass: rep.all_passed() && rep.passed() > 0,
        detail: format!(
            "{} passed, {} failed, {} not applicable{}",
            rep.passed(),
            rep.failed(),
            rep.skipped(),
            first_failure.map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    }
}

fn ks() -> Vec<usize> {
    vec![3, 4, 5]
}

fn base_exact() -> Outcome {
    suite_outcome(run_suite(Suite::BaseExact, &SuiteOptions { max_n: 10, ks: ks() }).unwrap())
}

fn step_accuracy() -> Outcome {
    suite_outcome(run_suite(Suite::StepAlpha, &SuiteOptions { max_n: 8, ks: ks() }).unwrap())
}

fn pipeline_tv() -> Outcome {
    suite_outcome(run_suite(Suite::PipelineTv, &SuiteOptions { max_n: 8, ks: ks() }).unwrap())
}

fn bijection() -> Outcome {
    suite_outcome(run_suite(Suite::Bijection, &SuiteOptions { max_n: 8, ks: ks() }).unwrap())
}

fn domination() -> Outcome {
    suite_outcome(run_suite(Suite::Domination, &SuiteOptions { max_n: 6, ks: vec![4] }).unwrap())
}

fn schedule_structure() -> Outcome {
    let (n, d) = (2000, 4.0);
    let l = default_threshold(n, d).unwrap();
    let (mut within_r, mut low_cyclomatic, mut far_apart) = (0, 0, 0);
    let seeds = 20;
    for seed in 0..seeds {
        let g = generate_gnp(n, d, &mut RandomStream::new(seed, StreamLabel::Generation)).unwrap();
        let mut s = build_schedule(&g, l).unwrap();
        s.set_source_d(d);
        let rep = audit_schedule(&s);
        within_r += usize::from(rep.within_r_bound == Some(true));
        low_cyclomatic += usize::from(rep.max_component_cyclomatic <= 1);
        far_apart += usize::from(rep.min_pair_distance.is_none_or(|m| m + 1 >= l));
    }
    Outcome {
        pass: within_r == seeds as usize && low_cyclomatic >= 19 && far_apart == seeds as usize,
        detail: format!("L={l}; r within bound {within_r}/{seeds}, cyclomatic <= 1 {low_cyclomatic}/{seeds}, distance >= L-1 {far_apart}/{seeds}"),
    }
}

fn runtime_scaling() -> Outcome {
    let rep = bench(&[20_000, 40_000, 80_000], 5.0, 12, 3, 0, StepMode::Retry).unwrap();
    let p = rep.exponent.unwrap();
    let medians: Vec<String> = rep.points.iter().map(|pt| format!("n={}: {:.3}s", pt.n, pt.median)).collect();
    Outcome {
        pass: p <= 2.3,
        detail: format!("fitted exponent {p:.3}; medians {}", medians.join(", ")),
    }
}

fn path_decay() -> Outcome {
    let decay = path_decay_sim(5000, 20.0, 50, 2000, 12, 1, 8).unwrap();
    let contrast = path_decay_sim(5000, 20.0, 10, 1000, 4, 2, 8).unwrap();
    let (Some(r), Some((lo, hi))) = (decay.ratio, decay.ci) else {
        return Outcome {
            pass: false,
            detail: "no fit for k=50".into(),
        };
    };
    let (Some(rc), Some((clo, chi))) = (contrast.ratio, contrast.ci) else {
        return Outcome {
            pass: false,
            detail: "no fit for k=10".into(),
        };
    };
    Outcome {
        pass: hi < 1.0 && clo > 1.0,
        detail: format!("k=50 ratio {r:.4} CI [{lo:.4}, {hi:.4}]; k=10 ratio {rc:.3} CI [{clo:.3}, {chi:.3}]"),
    }
}

fn bad_frequency() -> Outcome {
    let (n, d, k) = (3000, 4.0, 12);
    let (mut steps, mut bad, mut seed) = (0usize, 0usize, 0u64);
    while steps < 10_000 {
        let g = generate_gnp(n, d, &mut RandomStream::new(seed, StreamLabel::Generation)).unwrap();
        let (_, log) = run(&g, &RunConfig::new(k, seed)).unwrap();
        steps += log.r;
        bad += log.bad_count;
        seed += 1;
    }
    let p = 1.0 / k as f64;
    let sd = (p * (1.0 - p) / steps as f64).sqrt();
    let freq = bad as f64 / steps as f64;
    let z = (freq - p) / sd;
    Outcome {
        pass: z.abs() <= 5.0,
        detail: format!("{bad} bad of {steps} steps over {seed} graphs: {freq:.5} vs 1/k = {p:.5} ({z:+.2} sd)"),
    }
}

fn random_bits() -> Outcome {
    let (d, k) = (5.0, 12);
    let mut per_vertex = Vec::new();
    for n in [1_000, 10_000, 100_000] {
        let seeds = 3;
        let mut total = 0f64;
        for seed in 0..seeds {
            let g = generate_gnp(n, d, &mut RandomStream::new(seed, StreamLabel::Generation)).unwrap();
            let (_, log) = run(&g, &RunConfig::new(k, seed)).unwrap();
            total += log.random_bits_consumed as f64 / n as f64;
        }
        per_vertex.push((n, total / seeds as f64));
    }
    let first = per_vertex[0].1;
    let last = per_vertex[per_vertex.len() - 1].1;
    let max = per_vertex.iter().map(|p| p.1).fold(0.0, f64::max);
    let shown: Vec<String> = per_vertex.iter().map(|(n, b)| format!("n={n}: {b:.3}")).collect();
    Outcome {
        pass: last / first <= 1.1 && max <= 16.0,
        detail: format!("bits per vertex {}; growth {:.3}", shown.join(", "), last / first),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("base sampler exactness", base_exact),
        ("single-step accuracy", step_accuracy),
        ("cumulative pipeline accuracy", pipeline_tv),
        ("switching bijection", bijection),
        ("product-measure domination", domination),
        ("schedule structure at scale", schedule_structure),
        ("runtime scaling", runtime_scaling),
        ("disagreement path decay", path_decay),
        ("bad-step frequency", bad_frequency),
        ("random bits per vertex", random_bits),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{label}: {verdict} ({:.1}s) {}", start.elapsed().as_secs_f64(), out.detail);
        if !out.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
