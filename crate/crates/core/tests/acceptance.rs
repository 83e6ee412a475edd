//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;

use hpsim::cavity::{
    principal_arg, reflection_coefficient, solve_params_for_phase, steady_state_oracle, AtomLevel,
    CavityParams, ReflectionPair,
};
use hpsim::homodyne::{
    outcome_cdf, rng_from_seed, Coherence, OutcomeSampler, ProjectionModel, Scenario,
};
use hpsim::hybrid_state::{closed_form_final_state, init_plus_state, make_target, TargetKind};
use hpsim::metrics::{
    closed_form_two_qubit, fidelity, monte_carlo_estimate, prepare, success_probability,
    w_class_success, w_state_success,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn phase_settings() -> Outcome {
    let p2 = solve_params_for_phase(2).map_err(fail)?;
    let p3 = solve_params_for_phase(3).map_err(fail)?;
    let mut ok = (p2.delta1 - 0.5).abs() < 1e-12
        && (p2.delta2 - 0.5).abs() < 1e-12
        && (p2.g - 0.5f64.sqrt()).abs() < 1e-12
        && (p3.delta1 - 3f64.sqrt() / 2.0).abs() < 1e-12
        && (p3.g * p3.g - 1.5).abs() < 1e-12;
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let params = solve_params_for_phase(n).map_err(fail)?;
        let phi0 = principal_arg(reflection_coefficient(&params, AtomLevel::Zero).map_err(fail)?);
        let phi1 = principal_arg(reflection_coefficient(&params, AtomLevel::One).map_err(fail)?);
        let target = PI / n as f64;
        worst = worst.max((phi0 - target).abs()).max((phi1 + target).abs());
    }
    ok &= worst < 1e-9;
    check(ok, format!("max phase error over n=2..10: {worst:.2e}"))
}

fn reflection_vs_oracle() -> Outcome {
    let mut rng = rng_from_seed(20_240_601);
    let gammas = [0.0, 0.2, 0.5];
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let params = CavityParams::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.05..2.0),
            gammas[i % 3],
        )
        .map_err(fail)?;
        for level in [AtomLevel::Zero, AtomLevel::One] {
            let exact = reflection_coefficient(&params, level).map_err(fail)?;
            let oracle = steady_state_oracle(&params, level).map_err(fail)?;
            worst = worst.max((exact - oracle).norm());
        }
    }
    check(
        worst < 1e-8,
        format!("max |r - r_oracle| over 100 points: {worst:.2e}"),
    )
}

fn two_qubit_closed_form() -> Outcome {
    let mut half_exact = true;
    for alpha in [0.0, 0.3, 1.0, 2.5, 6.0] {
        for eta in [0.0, 0.4, 1.0] {
            let (ps, _) = closed_form_two_qubit(alpha, eta).map_err(fail)?;
            half_exact &= ps == 0.5;
        }
    }
    let (_, f) = closed_form_two_qubit(3f64.sqrt(), (2.0f64 / 3.0).sqrt()).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for eta_sq in [1.0, 2.0 / 3.0, 1.0 / 3.0] {
        for i in 0..=12 {
            let alpha = 0.5 * i as f64;
            let p = prepare(Scenario::TwoQubitX, alpha, eta_sq, 0.0).map_err(fail)?;
            let (ps, fc) = closed_form_two_qubit(alpha, eta_sq.sqrt()).map_err(fail)?;
            for class in 0..2 {
                let q = success_probability(&p.state, &p.rule, class).map_err(fail)?;
                let fq =
                    fidelity(&p.state, &p.rule, class, ProjectionModel::default()).map_err(fail)?;
                worst = worst.max((q - ps).abs()).max((fq - fc).abs());
            }
        }
    }
    check(
        half_exact && (f - 0.997661).abs() <= 1e-5 && worst < 1e-8,
        format!("Ps == 1/2: {half_exact}; F(sqrt3, 2/3) = {f:.6}; quadrature vs closed form: {worst:.2e}"),
    )
}

fn three_qubit() -> Outcome {
    let p = prepare(Scenario::ThreeQubitP, 5.0, 2.0 / 3.0, 0.0).map_err(fail)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, c) in p.rule.classes.iter().enumerate() {
        let ps = success_probability(&p.state, &p.rule, i).map_err(fail)?;
        let f = fidelity(&p.state, &p.rule, i, ProjectionModel::default()).map_err(fail)?;
        let expected = if c.target_name() == "GHZ(3)" {
            0.25
        } else {
            0.375
        };
        ok &= (ps - expected).abs() <= 1e-3 && f >= 0.999;
        parts.push(format!("{} Ps={ps:.5} F={f:.5}", c.target_name()));
    }
    check(ok, parts.join(", "))
}

fn sum_of_dicke() -> Outcome {
    let p = prepare(Scenario::GsumX { n: 3 }, 5f64.sqrt(), 2.0 / 3.0, 0.0).map_err(fail)?;
    let ghz = success_probability(&p.state, &p.rule, 0).map_err(fail)?;
    let gp = success_probability(&p.state, &p.rule, 1).map_err(fail)?;
    let f = fidelity(&p.state, &p.rule, 1, ProjectionModel::default()).map_err(fail)?;
    let f_pure = fidelity(
        &p.state,
        &p.rule,
        1,
        ProjectionModel {
            coherence: Coherence::Ignored,
            ..Default::default()
        },
    )
    .map_err(fail)?;
    check(
        (gp - 0.75).abs() <= 0.01 && (ghz - 0.25).abs() <= 0.01 && f >= 0.99,
        format!(
            "P(G'3,1)={gp:.5} P(GHZ3)={ghz:.5} F(G'3,1)={f:.5} (with environment coherence ignored: {f_pure:.5})"
        ),
    )
}

fn n_qubit_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let pair =
            ReflectionPair::from_params(&solve_params_for_phase(n).map_err(fail)?).map_err(fail)?;
        let mut s = init_plus_state(n, 1.7).map_err(fail)?;
        for q in 0..n {
            s = s.apply_cps(q, &pair).map_err(fail)?;
        }
        let closed = closed_form_final_state(n, 1.7).map_err(fail)?;
        worst = worst.max(s.max_branch_deviation(&closed));
    }
    let s = closed_form_final_state(3, 1.7).map_err(fail)?;
    let coeffs: Vec<f64> = [
        TargetKind::Ghz { n: 3 },
        TargetKind::W { n: 3 },
        TargetKind::Dicke { n: 3, k: 2 },
    ]
    .into_iter()
    .map(|k| {
        s.target_component(&make_target(k).unwrap())
            .map(|c| c.norm())
    })
    .collect::<Result<_, _>>()
    .map_err(fail)?;
    let expected = [0.5, 6f64.sqrt() / 4.0, 6f64.sqrt() / 4.0];
    let coeff_err = coeffs
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        worst < 1e-12 && coeff_err < 1e-12,
        format!("max branch deviation n=2..8: {worst:.2e}; weight-class coefficients {coeffs:.6?}"),
    )
}

fn w_scaling() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3, 4, 5] {
        let p = prepare(Scenario::NQubitP { n }, 6.0, 1.0, 0.0).map_err(fail)?;
        let q = w_class_success(&p.state, &p.rule).map_err(fail)?;
        let formula = w_state_success(n).map_err(fail)?;
        let good = (q - formula).abs() <= 1e-3;
        ok &= good;
        parts.push(format!(
            "n={n}: {q:.5} vs {formula:.5}{}",
            if good { "" } else { " (off)" }
        ));
    }
    check(ok, parts.join(", "))
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn monte_carlo() -> Outcome {
    const TRIALS: u64 = 100_000;
    let cases = [
        (Scenario::TwoQubitX, 3f64.sqrt()),
        (Scenario::ThreeQubitP, 2.0),
        (Scenario::GsumX { n: 3 }, 5f64.sqrt()),
        (Scenario::NQubitP { n: 5 }, 3.0),
    ];
    let mut ok = true;
    let mut worst_z: f64 = 0.0;
    let mut worst_ks: f64 = 0.0;
    // 1% critical value of the one-sample KS statistic.
    let ks_crit = 1.6276 / (TRIALS as f64).sqrt();
    for (i, (scenario, alpha)) in cases.into_iter().enumerate() {
        let p = prepare(scenario, alpha, 2.0 / 3.0, 0.0).map_err(fail)?;
        let mc = monte_carlo_estimate(
            &p.state,
            &p.rule,
            TRIALS,
            1000 + i as u64,
            ProjectionModel::default(),
        )
        .map_err(fail)?;
        for (class, r) in mc.iter().enumerate() {
            let q = success_probability(&p.state, &p.rule, class).map_err(fail)?;
            let sigma = (q * (1.0 - q) / TRIALS as f64).sqrt();
            let z = (r.success_prob - q).abs() / sigma;
            worst_z = worst_z.max(z);
            ok &= z <= 4.0;
        }
        let sampler = OutcomeSampler::new(&p.state, p.rule.quadrature).map_err(fail)?;
        let mut rng = rng_from_seed(2000 + i as u64);
        let samples: Vec<f64> = (0..TRIALS).map(|_| sampler.sample(&mut rng)).collect();
        let d = ks_statistic(samples, |v| outcome_cdf(&p.state, p.rule.quadrature, v));
        worst_ks = worst_ks.max(d);
        ok &= d < ks_crit;
    }
    check(
        ok,
        format!(
            "max |z| = {worst_z:.2} (limit 4); max KS D = {worst_ks:.5} (1% critical {ks_crit:.5})"
        ),
    )
}

fn two_qubit_fidelity(nbar: f64, gamma: f64, coherence: Coherence) -> Result<f64, String> {
    let p = prepare(Scenario::TwoQubitX, nbar.sqrt(), 2.0 / 3.0, gamma).map_err(fail)?;
    let model = ProjectionModel {
        coherence,
        ..Default::default()
    };
    fidelity(&p.state, &p.rule, 1, model).map_err(fail)
}

fn gamma_robustness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_at = 0.0;
    let mut worst_pure: f64 = 0.0;
    let mut monotone = true;
    for i in 0..=18 {
        let nbar = 1.0 + 0.5 * i as f64;
        let f0 = two_qubit_fidelity(nbar, 0.0, Coherence::Traced)?;
        let f2 = two_qubit_fidelity(nbar, 0.2, Coherence::Traced)?;
        let f5 = two_qubit_fidelity(nbar, 0.5, Coherence::Traced)?;
        monotone &= f0 >= f2 && f2 >= f5;
        if (f0 - f2).abs() > worst {
            worst = (f0 - f2).abs();
            worst_at = nbar;
        }
        let p2 = two_qubit_fidelity(nbar, 0.2, Coherence::Ignored)?;
        worst_pure = worst_pure.max((f0 - p2).abs());
    }
    check(
        worst <= 0.05 && monotone,
        format!(
            "max |F(0.2) - F(0)| = {worst:.4} at nbar {worst_at} (limit 0.05); monotone in gamma: {monotone}; \
             with environment coherence ignored: {worst_pure:.4}"
        ),
    )
}

fn run_cli(args: &[&str], seed_env: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hpsim"));
    cmd.args(args).env_remove("HPSIM_DEFAULT_SEED");
    if let Some(s) = seed_env {
        cmd.env("HPSIM_DEFAULT_SEED", s);
    }
    let out = cmd.output().map_err(fail)?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let simulate = [
        "simulate",
        "--scenario",
        "three_qubit",
        "--alpha",
        "2",
        "--eta-sq",
        "0.6667",
        "--trials",
        "20000",
        "--seed",
        "17",
    ];
    let a = run_cli(&simulate, None)?;
    let b = run_cli(&simulate, None)?;
    let env_seeded = run_cli(&simulate[..simulate.len() - 2], Some("17"))?;
    let sweep = |jobs: &'static str| {
        [
            "sweep",
            "--scenario",
            "two_qubit",
            "--nbar",
            "0:4:0.5",
            "--gamma",
            "0,0.2",
            "--eta-sq",
            "0.6667",
            "--trials",
            "2000",
            "--seed",
            "5",
            "--jobs",
            jobs,
        ]
    };
    let s1 = run_cli(&sweep("1"), None)?;
    let s4 = run_cli(&sweep("4"), None)?;
    let s4b = run_cli(&sweep("4"), None)?;
    check(
        a == b && a == env_seeded && s1 == s4 && s4 == s4b && !a.is_empty() && !s1.is_empty(),
        format!(
            "simulate {} bytes, sweep {} bytes; repeat, env-seed and job-count runs identical: {}",
            a.len(),
            s1.len(),
            a == b && a == env_seeded && s1 == s4 && s4 == s4b
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 phase settings", phase_settings),
        ("2 reflection vs steady-state oracle", reflection_vs_oracle),
        ("3 two-qubit closed form", two_qubit_closed_form),
        ("4 three-qubit GHZ/W/D", three_qubit),
        ("5 sum of Dicke states", sum_of_dicke),
        ("6 n-qubit closed-form state", n_qubit_oracle),
        ("7 W-state scaling", w_scaling),
        ("8 Monte Carlo consistency", monte_carlo),
        ("9 spontaneous emission robustness", gamma_robustness),
        ("10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<38} {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<38} {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
