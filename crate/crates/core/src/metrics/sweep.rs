//! Parameter sweeps and the CSV curves written from them.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_classes, monte_carlo_estimate, prepare, ClassResult};
use crate::error::{Error, Result};
use crate::homodyne::{
    component_density, outcome_density, DecisionRule, ProjectionModel, Scenario,
};
use crate::hybrid_state::HybridState;

pub const CSV_COLUMNS: [&str; 11] = [
    "scenario",
    "mean_photon_number",
    "alpha",
    "gamma_over_kappa",
    "eta_sq",
    "class_parity",
    "target_name",
    "success_prob",
    "fidelity",
    "method",
    "mc_stderr",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Mean photon numbers `alpha^2` of the input pulse.
    pub nbar: Vec<f64>,
    pub gammas: Vec<f64>,
    pub eta_sq: f64,
    /// Monte Carlo trials per point; 0 disables sampling.
    pub trials: u64,
    pub seed: u64,
    pub model: ProjectionModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub mean_photon_number: f64,
    pub alpha: f64,
    pub gamma_over_kappa: f64,
    pub eta_sq: f64,
    pub results: Vec<ClassResult>,
}

/// Seed of the Monte Carlo stream for the `index`-th point.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Parses `start:stop:step` (stop inclusive) or a single value.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || {
        Error::InvalidParameter(format!(
            "malformed range {text:?}, expected start:stop:step"
        ))
    };
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    match parts[..] {
        [x] => Ok(vec![x]),
        [start, stop, step] => {
            if !(step > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "range step must be positive, got {step}"
                )));
            }
            if stop < start {
                return Err(Error::InvalidParameter(format!("empty range {text:?}")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

fn run_point(cfg: &SweepConfig, index: usize, nbar: f64, gamma: f64) -> Result<SweepPoint> {
    if !(nbar >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mean photon number must be nonnegative, got {nbar}"
        )));
    }
    let alpha = nbar.sqrt();
    let p = prepare(cfg.scenario, alpha, cfg.eta_sq, gamma)?;
    let mut results = evaluate_classes(&p.state, &p.rule, cfg.model)?;
    if cfg.trials > 0 {
        results.extend(monte_carlo_estimate(
            &p.state,
            &p.rule,
            cfg.trials,
            point_seed(cfg.seed, index),
            cfg.model,
        )?);
    }
    Ok(SweepPoint {
        mean_photon_number: nbar,
        alpha,
        gamma_over_kappa: gamma,
        eta_sq: cfg.eta_sq,
        results,
    })
}

/// Evaluates every `(gamma, nbar)` pair, gamma-major. `jobs = 0` uses all
/// cores; the output does not depend on `jobs`.
pub fn sweep(cfg: &SweepConfig, jobs: usize) -> Result<Vec<SweepPoint>> {
    if cfg.nbar.is_empty() || cfg.gammas.is_empty() {
        return Err(Error::InvalidParameter("sweep range is empty".into()));
    }
    let grid: Vec<(f64, f64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| cfg.nbar.iter().map(move |&nb| (nb, g)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, &(nb, g))| run_point(cfg, i, nb, g))
            .collect()
    })
}

/// Shortest round-trip text, switching to exponent form far from 1.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn lf_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_sweep_csv<W: Write>(w: W, scenario: Scenario, points: &[SweepPoint]) -> Result<()> {
    let mut out = lf_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for p in points {
        for r in &p.results {
            out.write_record([
                scenario.name().to_string(),
                format_float(p.mean_photon_number),
                format_float(p.alpha),
                format_float(p.gamma_over_kappa),
                format_float(p.eta_sq),
                r.parity.clone(),
                r.target.clone(),
                format_float(r.success_prob),
                opt(r.fidelity),
                r.method.as_str().to_string(),
                opt(r.mc_stderr),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub v: f64,
    pub density: f64,
    /// Contribution of each class's branches, in rule order.
    pub components: Vec<f64>,
}

impl DensityRow {
    /// `points` evenly spaced outcomes over `[lo, hi]`.
    pub fn curve(
        state: &HybridState,
        rule: &DecisionRule,
        lo: f64,
        hi: f64,
        points: usize,
    ) -> Result<Vec<Self>> {
        if points < 2 || !(hi > lo) {
            return Err(Error::InvalidParameter(
                "a density curve needs at least 2 points on a nonempty interval".into(),
            ));
        }
        let q = rule.quadrature;
        Ok((0..points)
            .map(|i| {
                let v = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                DensityRow {
                    v,
                    density: outcome_density(state, q, v),
                    components: rule
                        .classes
                        .iter()
                        .map(|c| component_density(state, q, v, &c.weights))
                        .collect(),
                }
            })
            .collect())
    }
}

/// Columns `v`, `density`, then one per class named after its target.
pub fn write_density_csv<W: Write>(w: W, rule: &DecisionRule, rows: &[DensityRow]) -> Result<()> {
    let mut out = lf_writer(w);
    let mut header = vec!["v".to_string(), "density".to_string()];
    header.extend(rule.classes.iter().map(|c| c.target_name()));
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![format_float(r.v), format_float(r.density)];
        rec.extend(r.components.iter().map(|&c| format_float(c)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
