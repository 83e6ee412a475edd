//! Success probabilities and fidelities of the projected atomic states.

mod monte_carlo;
mod sweep;

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::cavity::{solve_params_for_phase, CavityParams, ReflectionPair};
use crate::error::{Error, Result};
use crate::homodyne::{
    build_decision_rule, integration_window, outcome_density, ClassTarget, DecisionRule,
    OutcomeClass, ProjectionModel, Quadrature, Scenario, TargetProjector,
};
use crate::hybrid_state::{dicke_support, init_plus_state, HybridState, TargetState};
use crate::quadrature::Simpson;
use crate::special::erfc;

pub use monte_carlo::monte_carlo_estimate;
pub use sweep::{
    format_float, parse_range, sweep, write_density_csv, write_sweep_csv, DensityRow, SweepConfig,
    SweepPoint, CSV_COLUMNS,
};

/// Absolute tolerance of the outcome integrals.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Below this class probability the fidelity is not reported.
pub const MIN_SUCCESS_PROB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassResult {
    /// Parity values of the class, e.g. `"1|2"`.
    pub parity: String,
    pub target: String,
    pub success_prob: f64,
    /// `None` when the class has no single target or too little weight.
    pub fidelity: Option<f64>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
    /// Set when fewer than 5 trials landed in or out of the class.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub mc_unreliable: bool,
}

fn class_at(rule: &DecisionRule, class: usize) -> Result<&OutcomeClass> {
    rule.classes.get(class).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "class index {class} out of range for a rule with {} classes",
            rule.classes.len()
        ))
    })
}

fn check_rule(state: &HybridState, rule: &DecisionRule) -> Result<()> {
    if state.n() != rule.n() {
        return Err(Error::InvalidParameter(format!(
            "state has {} qubits but the rule expects {}",
            state.n(),
            rule.n()
        )));
    }
    Ok(())
}

/// Class interval clipped to the region where the outcome density is
/// numerically nonzero.
fn clipped_interval(state: &HybridState, q: Quadrature, class: &OutcomeClass) -> (f64, f64) {
    let (lo, hi) = integration_window(state, q);
    (class.lower.max(lo), class.upper.min(hi))
}

/// `P_s = int_class p(v) dv` by adaptive quadrature.
pub fn success_probability(state: &HybridState, rule: &DecisionRule, class: usize) -> Result<f64> {
    check_rule(state, rule)?;
    let c = class_at(rule, class)?;
    let q = rule.quadrature;
    let (a, b) = clipped_interval(state, q, c);
    let p =
        Simpson::with_tolerance(QUADRATURE_TOL).integrate(|v| outcome_density(state, q, v), a, b);
    Ok(p.clamp(0.0, 1.0))
}

/// Bitstrings the class target can occupy.
fn class_support(n: usize, class: &OutcomeClass) -> Vec<usize> {
    let mut support: Vec<usize> = class
        .weights
        .iter()
        .flat_map(|&k| dicke_support(n, k))
        .collect();
    support.sort_unstable();
    support
}

/// Average fidelity `(1/P_s) int_class <T(v)| rho~(v) |T(v)> dv`, where
/// `rho~` is the conditional atomic state weighted by the outcome density.
pub fn fidelity(
    state: &HybridState,
    rule: &DecisionRule,
    class: usize,
    model: ProjectionModel,
) -> Result<f64> {
    check_rule(state, rule)?;
    let c = class_at(rule, class)?;
    if c.target == ClassTarget::Undetermined {
        return Err(Error::NoTarget { class });
    }
    let ps = success_probability(state, rule, class)?;
    if ps < MIN_SUCCESS_PROB {
        return Err(Error::UndefinedFidelity { success_prob: ps });
    }
    let q = rule.quadrature;
    let projector = TargetProjector::new(state, q, class_support(state.n(), c), model)?;
    let (a, b) = clipped_interval(state, q, c);
    let simpson = Simpson::with_tolerance(QUADRATURE_TOL);
    let overlap = match &c.target {
        ClassTarget::Fixed(t) => simpson.integrate(|v| projector.weight(t, v), a, b),
        tracked => simpson.integrate(
            |v| {
                let t = tracked.at(q, v, model.phase).expect("phase-tracked target");
                projector.weight(&t, v)
            },
            a,
            b,
        ),
    };
    Ok((overlap / ps).clamp(0.0, 1.0))
}

/// Target of `class` at outcome `v`, if it has one.
pub fn class_target(
    rule: &DecisionRule,
    class: usize,
    v: f64,
    model: ProjectionModel,
) -> Option<TargetState> {
    rule.classes
        .get(class)
        .and_then(|c| c.target.at(rule.quadrature, v, model.phase))
}

/// Quadrature success probability and fidelity for every class of `rule`.
pub fn evaluate_classes(
    state: &HybridState,
    rule: &DecisionRule,
    model: ProjectionModel,
) -> Result<Vec<ClassResult>> {
    (0..rule.classes.len())
        .map(|i| {
            let c = &rule.classes[i];
            let success_prob = success_probability(state, rule, i)?;
            let fidelity = match fidelity(state, rule, i, model) {
                Ok(f) => Some(f),
                Err(Error::NoTarget { .. } | Error::UndefinedFidelity { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(ClassResult {
                parity: c.parity.to_string(),
                target: c.target_name(),
                success_prob,
                fidelity,
                method: Method::Quadrature,
                mc_stderr: None,
                mc_unreliable: false,
            })
        })
        .collect()
}

/// Two-qubit `(P_s, F)` for either class with lossless cavities and
/// channel amplitude transmission `eta`.
pub fn closed_form_two_qubit(alpha: f64, eta: f64) -> Result<(f64, f64)> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in [0, 1], got {eta}"
        )));
    }
    let x = SQRT_2 * eta * alpha;
    let (lo, hi) = (erfc(x), erfc(-x));
    Ok(((lo + hi) / 4.0, hi / (lo + hi)))
}

/// `n / 2^{n-1}`: probability of landing in either W-type class
/// (`k = 1` or `k = n - 1`). For `n = 2` both coincide with the single
/// `psi+` class, whose probability is 1/2 rather than the formula's 1.
pub fn w_state_success(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "W states need n >= 2, got {n}"
        )));
    }
    Ok(n as f64 / 2f64.powi(n as i32 - 1))
}

/// Quadrature probability of the classes holding Hamming weight 1 or
/// `n - 1`.
pub fn w_class_success(state: &HybridState, rule: &DecisionRule) -> Result<f64> {
    let n = rule.n();
    let mut total = 0.0;
    for (i, c) in rule.classes.iter().enumerate() {
        if c.weights.iter().any(|&k| k == 1 || k == n - 1) {
            total += success_probability(state, rule, i)?;
        }
    }
    Ok(total)
}

/// Everything derived from one parameter point before measurement.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub params: CavityParams,
    pub pair: ReflectionPair,
    pub state: HybridState,
    pub rule: DecisionRule,
}

/// `|+>^n |alpha>` through `n` CPS gates tuned for `(pi/n, -pi/n)` with
/// spontaneous emission rate `gamma`, then a channel of energy transmission
/// `eta_sq`.
pub fn prepare(scenario: Scenario, alpha: f64, eta_sq: f64, gamma: f64) -> Result<Prepared> {
    if !(0.0..=1.0).contains(&eta_sq) {
        return Err(Error::InvalidParameter(format!(
            "eta_sq must lie in [0, 1], got {eta_sq}"
        )));
    }
    let eta = eta_sq.sqrt();
    let n = scenario.n();
    let params = solve_params_for_phase(n)?.with_gamma(gamma)?;
    let pair = ReflectionPair::from_params(&params)?;
    let mut state = init_plus_state(n, alpha)?;
    for q in 0..n {
        state = state.apply_cps(q, &pair)?;
    }
    let state = state.apply_channel_loss(eta)?;
    let rule = build_decision_rule(scenario, alpha, eta)?;
    Ok(Prepared {
        params,
        pair,
        state,
        rule,
    })
}
