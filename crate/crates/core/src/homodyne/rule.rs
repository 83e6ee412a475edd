//! Threshold rules that turn a homodyne outcome into a parity class.
//!
//! After `n` CPS gates with phases `(pi/n, -pi/n)` a weight-`k` branch carries
//! the pulse `eta alpha e^{i(1-2k/n) pi}`. Weights whose outcome means
//! coincide on the measured quadrature cannot be told apart and form one
//! class; thresholds sit halfway between neighbouring class means.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{quadrature_phase, PhaseConvention, Quadrature};
use crate::error::{Error, Result};
use crate::hybrid_state::{check_qubit_count, make_target, TargetKind, TargetState};

/// Relative tolerance for treating two unit-amplitude means as equal.
const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Two nodes, position quadrature: `phi+` vs `psi+`.
    TwoQubitX,
    /// Three nodes, momentum quadrature: `D(3,2)`, `GHZ(3)`, `W(3)`.
    ThreeQubitP,
    /// `n` nodes, position quadrature: GHZ vs sums of Dicke states.
    GsumX { n: usize },
    /// `n` nodes, momentum quadrature: GHZ vs individual Dicke states.
    NQubitP { n: usize },
}

impl Scenario {
    pub fn n(&self) -> usize {
        match *self {
            Scenario::TwoQubitX => 2,
            Scenario::ThreeQubitP => 3,
            Scenario::GsumX { n } | Scenario::NQubitP { n } => n,
        }
    }

    pub fn quadrature(&self) -> Quadrature {
        match self {
            Scenario::TwoQubitX | Scenario::GsumX { .. } => Quadrature::X,
            Scenario::ThreeQubitP | Scenario::NQubitP { .. } => Quadrature::P,
        }
    }

    /// Short name used on the command line and in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TwoQubitX => "two_qubit",
            Scenario::ThreeQubitP => "three_qubit",
            Scenario::GsumX { .. } => "gsum",
            Scenario::NQubitP { .. } => "n_qubit",
        }
    }

    /// Parses `two_qubit[_X]`, `three_qubit[_P]`, `gsum[_X]` or `n_qubit[_P]`.
    /// `n` is used by the last two and ignored otherwise.
    pub fn parse(name: &str, n: usize) -> Result<Self> {
        match name {
            "two_qubit" | "two_qubit_X" => Ok(Scenario::TwoQubitX),
            "three_qubit" | "three_qubit_P" => Ok(Scenario::ThreeQubitP),
            "gsum" | "gsum_X" => Ok(Scenario::GsumX { n }),
            "n_qubit" | "n_qubit_P" => Ok(Scenario::NQubitP { n }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown scenario {name:?}"
            ))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parity values `p = sum x_i mod n` collected in one outcome class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parity(pub Vec<usize>);

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join("|"))
    }
}

/// State the atoms are projected onto when an outcome lands in a class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassTarget {
    Fixed(TargetState),
    /// `G'(n,k)` whose relative phase `zeta(v)` is the wavefunction phase of
    /// `reference`, the ideal weight-`k` pulse label `eta alpha e^{i theta_k}`.
    PhaseTracked {
        n: usize,
        k: usize,
        reference: Complex64,
    },
    /// GHZ and `D(2k,k)` share a momentum peak; a second gate on the
    /// position quadrature is needed to separate them.
    Undetermined,
}

impl ClassTarget {
    pub fn name(&self) -> String {
        match self {
            ClassTarget::Fixed(t) => t.name(),
            ClassTarget::PhaseTracked { n, k, .. } => format!("G'({n},{k})"),
            ClassTarget::Undetermined => "undetermined".to_string(),
        }
    }

    /// Target state at outcome `v`.
    pub fn at(
        &self,
        quadrature: Quadrature,
        v: f64,
        convention: PhaseConvention,
    ) -> Option<TargetState> {
        match self {
            ClassTarget::Fixed(t) => Some(t.clone()),
            ClassTarget::PhaseTracked { n, k, reference } => {
                let zeta = quadrature_phase(*reference, quadrature, v, convention);
                make_target(TargetKind::Gprime { n: *n, k: *k, zeta }).ok()
            }
            ClassTarget::Undetermined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeClass {
    /// Inclusive lower edge (`-inf` for the first class).
    pub lower: f64,
    /// Exclusive upper edge (`+inf` for the last class).
    pub upper: f64,
    pub parity: Parity,
    /// Hamming weights whose pulses land in this class.
    pub weights: Vec<usize>,
    /// Ideal outcome mean of the class.
    pub mean: f64,
    pub target: ClassTarget,
    pub needs_second_gate: bool,
}

impl OutcomeClass {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v < self.upper
    }

    pub fn target_name(&self) -> String {
        self.target.name()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRule {
    pub scenario: Scenario,
    pub quadrature: Quadrature,
    /// Strictly increasing cut points.
    pub thresholds: Vec<f64>,
    /// One class per interval, in ascending order of outcome.
    pub classes: Vec<OutcomeClass>,
}

impl DecisionRule {
    pub fn n(&self) -> usize {
        self.scenario.n()
    }

    /// Index of the class containing `v`. Outcomes on a threshold go to the
    /// class above it.
    pub fn class_index(&self, v: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= v)
    }
}

pub fn classify(v: f64, rule: &DecisionRule) -> &OutcomeClass {
    &rule.classes[rule.class_index(v)]
}

fn unit_mean(n: usize, k: usize, quadrature: Quadrature) -> f64 {
    let theta = (1.0 - 2.0 * k as f64 / n as f64) * PI;
    match quadrature {
        Quadrature::X => SQRT_2 * theta.cos(),
        Quadrature::P => SQRT_2 * theta.sin(),
    }
}

fn group_target(
    n: usize,
    weights: &[usize],
    quadrature: Quadrature,
    scale: f64,
) -> Result<(ClassTarget, bool)> {
    let fixed = |kind| make_target(kind).map(|t| (ClassTarget::Fixed(t), false));
    match *weights {
        [k] if n == 2 && k == 1 => fixed(TargetKind::BellPsiPlus),
        [1] => fixed(TargetKind::W { n }),
        [k] => fixed(TargetKind::Dicke { n, k }),
        [0, m] if m == n => {
            if n == 2 {
                fixed(TargetKind::BellPhiPlus)
            } else {
                fixed(TargetKind::Ghz { n })
            }
        }
        [k, m] if quadrature == Quadrature::X && k + m == n => Ok((
            ClassTarget::PhaseTracked {
                n,
                k,
                reference: Complex64::from_polar(scale, (1.0 - 2.0 * k as f64 / n as f64) * PI),
            },
            false,
        )),
        [0, h, m] if quadrature == Quadrature::P && m == n && 2 * h == n => {
            Ok((ClassTarget::Undetermined, true))
        }
        _ => Err(Error::DegenerateRule(format!(
            "Hamming weights {weights:?} of {n} qubits share one outcome mean"
        ))),
    }
}

/// Threshold rule for `scenario` with input amplitude `alpha` and channel
/// amplitude transmission `eta`. Class means are the ideal lossless means
/// scaled by `eta alpha`.
pub fn build_decision_rule(scenario: Scenario, alpha: f64, eta: f64) -> Result<DecisionRule> {
    let n = scenario.n();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "a parity rule needs at least 2 qubits, got {n}"
        )));
    }
    check_qubit_count(n)?;
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
    let quadrature = scenario.quadrature();

    // Group weights by their unit-amplitude mean.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for k in 0..=n {
        let m = unit_mean(n, k, quadrature);
        match groups
            .iter_mut()
            .find(|(gm, _)| (gm - m).abs() <= COINCIDENCE_TOL)
        {
            Some((_, ws)) => ws.push(k),
            None => groups.push((m, vec![k])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = eta * alpha;
    if groups.len() > 2 && scale == 0.0 {
        return Err(Error::DegenerateRule(
            "zero pulse amplitude collapses every class onto one outcome".into(),
        ));
    }
    let thresholds: Vec<f64> = groups
        .windows(2)
        .map(|w| 0.5 * (w[0].0 + w[1].0) * scale)
        .collect();

    let mut classes = Vec::with_capacity(groups.len());
    for (i, (m, weights)) in groups.iter().enumerate() {
        let (target, needs_second_gate) = group_target(n, weights, quadrature, scale)?;
        let mut parity: Vec<usize> = weights.iter().map(|k| k % n).collect();
        parity.sort_unstable();
        parity.dedup();
        classes.push(OutcomeClass {
            lower: if i == 0 {
                f64::NEG_INFINITY
            } else {
                thresholds[i - 1]
            },
            upper: thresholds.get(i).copied().unwrap_or(f64::INFINITY),
            parity: Parity(parity),
            weights: weights.clone(),
            mean: m * scale,
            target,
            needs_second_gate,
        });
    }
    Ok(DecisionRule {
        scenario,
        quadrature,
        thresholds,
        classes,
    })
}
