//! Homodyne detection of the probe pulse.
//!
//! A coherent state `|beta>` measured along the position quadrature
//! `X = (a + a^dag)/sqrt 2` gives a Gaussian outcome of variance 1/2 centred on
//! `sqrt 2 Re beta`; along the momentum quadrature `P = (a - a^dag)/(sqrt 2 i)`
//! the centre is `sqrt 2 Im beta`. Because the atomic branches are orthogonal,
//! the outcome density is the branch-weighted sum of these Gaussians, and the
//! post-measurement atomic state keeps the wavefunction phases and the
//! environment decoherence factors between branches.

mod rule;
mod sampling;

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hybrid_state::{env_overlap_labels, HybridState, TargetState};
use crate::special::shot_noise_cdf;

pub use rule::{
    build_decision_rule, classify, ClassTarget, DecisionRule, OutcomeClass, Parity, Scenario,
};
pub use sampling::{rng_from_seed, sample_outcome, OutcomeSampler, SimRng};

/// Standard deviation of a single homodyne shot.
pub const SHOT_NOISE_SIGMA: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Half-width of the integration window around the outermost peaks, in
/// units of [`SHOT_NOISE_SIGMA`].
pub const WINDOW_SIGMAS: f64 = 8.0;

/// Largest register for which dense conditional density matrices are built.
pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    /// Position quadrature `(a + a^dag)/sqrt 2`.
    X,
    /// Momentum quadrature `(a - a^dag)/(sqrt 2 i)`.
    P,
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quadrature::X => f.write_str("X"),
            Quadrature::P => f.write_str("P"),
        }
    }
}

impl std::str::FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Quadrature::X),
            "P" | "p" => Ok(Quadrature::P),
            _ => Err(Error::InvalidParameter(format!("unknown quadrature {s:?}"))),
        }
    }
}

/// How the outcome-dependent phase of a quadrature wavefunction is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// Phase of `<v|beta>` for `|beta> = D(beta)|0>`:
    /// `sqrt2 Im(beta) v - Re(beta) Im(beta)` on X and
    /// `-sqrt2 Re(beta) v + Re(beta) Im(beta)` on P.
    #[default]
    Exact,
    /// `alpha sin(theta) (v - 2 alpha cos(theta))` on X and
    /// `-2 alpha cos(theta) (sqrt2 v - alpha sin(theta))` on P, with
    /// `beta = alpha e^{i theta}`.
    Literal,
    /// All phases set to zero.
    Suppressed,
}

/// Centre of the outcome distribution of `|label>`.
pub fn outcome_mean(label: Complex64, quadrature: Quadrature) -> f64 {
    match quadrature {
        Quadrature::X => SQRT_2 * label.re,
        Quadrature::P => SQRT_2 * label.im,
    }
}

/// Outcome-dependent phase of `<v|label>`, not reduced modulo `2 pi`.
pub fn quadrature_phase(
    label: Complex64,
    quadrature: Quadrature,
    v: f64,
    convention: PhaseConvention,
) -> f64 {
    match convention {
        PhaseConvention::Suppressed => 0.0,
        PhaseConvention::Exact => {
            let (a, b) = (label.re, label.im);
            match quadrature {
                Quadrature::X => SQRT_2 * b * v - a * b,
                Quadrature::P => -SQRT_2 * a * v + a * b,
            }
        }
        PhaseConvention::Literal => {
            let alpha = label.norm();
            let theta = label.arg();
            match quadrature {
                Quadrature::X => alpha * theta.sin() * (v - 2.0 * alpha * theta.cos()),
                Quadrature::P => -2.0 * alpha * theta.cos() * (SQRT_2 * v - alpha * theta.sin()),
            }
        }
    }
}

/// Phase reduced onto `[0, 2 pi)` for display.
pub fn reduce_phase(zeta: f64) -> f64 {
    zeta.rem_euclid(2.0 * PI)
}

/// `<v|label>` on the chosen quadrature.
pub fn quadrature_wavefunction(
    label: Complex64,
    quadrature: Quadrature,
    v: f64,
    convention: PhaseConvention,
) -> Complex64 {
    let d = v - outcome_mean(label, quadrature);
    let magnitude = PI.powf(-0.25) * (-0.5 * d * d).exp();
    Complex64::from_polar(
        magnitude,
        quadrature_phase(label, quadrature, v, convention),
    )
}

/// Gaussian `|<v|label>|^2`.
#[inline]
pub fn shot_noise_pdf(v: f64, mean: f64) -> f64 {
    let d = v - mean;
    (-d * d).exp() / PI.sqrt()
}

/// Probability density of homodyne outcome `v`. Environment labels do not
/// enter since the atomic branches are orthogonal.
pub fn outcome_density(state: &HybridState, quadrature: Quadrature, v: f64) -> f64 {
    state
        .branches()
        .iter()
        .map(|b| b.amp.norm_sqr() * shot_noise_pdf(v, outcome_mean(b.field, quadrature)))
        .sum()
}

/// Outcome density restricted to branches whose Hamming weight is listed.
pub fn component_density(
    state: &HybridState,
    quadrature: Quadrature,
    v: f64,
    weights: &[usize],
) -> f64 {
    state
        .branches()
        .iter()
        .enumerate()
        .filter(|(x, _)| weights.contains(&(x.count_ones() as usize)))
        .map(|(_, b)| b.amp.norm_sqr() * shot_noise_pdf(v, outcome_mean(b.field, quadrature)))
        .sum()
}

/// Cumulative distribution of the homodyne outcome.
pub fn outcome_cdf(state: &HybridState, quadrature: Quadrature, v: f64) -> f64 {
    state
        .branches()
        .iter()
        .map(|b| b.amp.norm_sqr() * shot_noise_cdf(v, outcome_mean(b.field, quadrature)))
        .sum()
}

/// `[lowest peak - 8 sigma, highest peak + 8 sigma]` over branches with
/// nonzero weight.
pub fn integration_window(state: &HybridState, quadrature: Quadrature) -> (f64, f64) {
    let (lo, hi) = state
        .branches()
        .iter()
        .filter(|b| b.amp.norm_sqr() > 0.0)
        .map(|b| outcome_mean(b.field, quadrature))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            (lo.min(m), hi.max(m))
        });
    let pad = WINDOW_SIGMAS * SHOT_NOISE_SIGMA;
    (lo - pad, hi + pad)
}

/// Atomic density matrix in the bitstring basis conditioned on outcome `v`:
/// `rho_xy = c_x conj(c_y) psi_x(v) conj(psi_y(v)) Gamma_xy / trace`.
pub fn conditional_atomic_state(
    state: &HybridState,
    quadrature: Quadrature,
    v: f64,
    convention: PhaseConvention,
) -> Result<DMatrix<Complex64>> {
    if state.n() > MAX_DENSE_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "dense conditional states are limited to {MAX_DENSE_QUBITS} qubits"
        )));
    }
    let dim = state.branches().len();
    let psi: Vec<Complex64> = state
        .branches()
        .iter()
        .map(|b| b.amp * quadrature_wavefunction(b.field, quadrature, v, convention))
        .collect();
    let trace: f64 = psi.iter().map(|p| p.norm_sqr()).sum();
    if !(trace > 0.0) {
        return Err(Error::DegenerateOutcome { v });
    }
    let branches = state.branches();
    let mut rho = DMatrix::from_element(dim, dim, Complex64::default());
    for x in 0..dim {
        for y in x..dim {
            let gamma = env_overlap_labels(&branches[x].env, &branches[y].env)?;
            let value = psi[x] * psi[y].conj() * gamma / trace;
            rho[(x, y)] = value;
            rho[(y, x)] = value.conj();
        }
    }
    Ok(rho)
}

/// Whether environment decoherence factors enter the conditional state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coherence {
    /// Trace out the environment modes (`Gamma_xy` from coherent overlaps).
    #[default]
    Traced,
    /// Treat the environment as if it carried no which-branch information
    /// (`Gamma_xy = 1`); only the pulse amplitudes feel the loss.
    Ignored,
}

/// Model switches shared by the conditional-state computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ProjectionModel {
    pub phase: PhaseConvention,
    pub coherence: Coherence,
}

/// Precomputed pieces for evaluating `<T| rho~(v) |T>` over the support of a
/// target family, where `rho~` is the conditional state before trace
/// normalization (its trace is the outcome density).
#[derive(Debug, Clone)]
pub struct TargetProjector {
    support: Vec<usize>,
    amps: Vec<Complex64>,
    fields: Vec<Complex64>,
    /// Row-major `Gamma_xy` over `support x support`.
    gammas: Vec<Complex64>,
    quadrature: Quadrature,
    model: ProjectionModel,
}

impl TargetProjector {
    /// `support` lists the bitstrings a target of this class may occupy.
    pub fn new(
        state: &HybridState,
        quadrature: Quadrature,
        support: Vec<usize>,
        model: ProjectionModel,
    ) -> Result<Self> {
        let mut amps = Vec::with_capacity(support.len());
        let mut fields = Vec::with_capacity(support.len());
        for &x in &support {
            let b = state.branch(x)?;
            amps.push(b.amp);
            fields.push(b.field);
        }
        let m = support.len();
        let mut gammas = vec![Complex64::new(1.0, 0.0); m * m];
        if model.coherence == Coherence::Traced {
            for i in 0..m {
                for j in 0..m {
                    gammas[i * m + j] = state.env_overlap(support[i], support[j])?;
                }
            }
        }
        Ok(TargetProjector {
            support,
            amps,
            fields,
            gammas,
            quadrature,
            model,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `<T| rho~(v) |T>` for a target whose amplitudes vanish off the support.
    pub fn weight(&self, target: &TargetState, v: f64) -> f64 {
        let m = self.support.len();
        let terms: Vec<Complex64> = self
            .support
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                target.amplitude(x).conj()
                    * self.amps[i]
                    * quadrature_wavefunction(self.fields[i], self.quadrature, v, self.model.phase)
            })
            .collect();
        let mut total = Complex64::default();
        for i in 0..m {
            if terms[i] == Complex64::default() {
                continue;
            }
            for j in 0..m {
                total += terms[i] * terms[j].conj() * self.gammas[i * m + j];
            }
        }
        total.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::ReflectionPair;
    use crate::hybrid_state::{closed_form_final_state, init_plus_state, make_target, TargetKind};
    use crate::quadrature::Simpson;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn two_qubit(alpha: f64, eta: f64) -> HybridState {
        let pair = ReflectionPair::new(I, -I);
        init_plus_state(2, alpha)
            .unwrap()
            .apply_cps(0, &pair)
            .unwrap()
            .apply_cps(1, &pair)
            .unwrap()
            .apply_channel_loss(eta)
            .unwrap()
    }

    fn integrate_density(state: &HybridState, q: Quadrature) -> f64 {
        let (lo, hi) = integration_window(state, q);
        Simpson::with_tolerance(1e-12).integrate(|v| outcome_density(state, q, v), lo, hi)
    }

    #[test]
    fn vacuum_wavefunction() {
        let zero = Complex64::default();
        for v in [-2.0, 0.0, 0.7] {
            let psi = quadrature_wavefunction(zero, Quadrature::X, v, PhaseConvention::Exact);
            assert_abs_diff_eq!(
                psi.re,
                PI.powf(-0.25) * (-v * v / 2.0).exp(),
                epsilon = 1e-16
            );
            assert_abs_diff_eq!(psi.im, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn real_label_peaks_at_sqrt2_alpha() {
        let label = Complex64::new(1.3, 0.0);
        let at_peak =
            quadrature_wavefunction(label, Quadrature::X, SQRT_2 * 1.3, PhaseConvention::Exact);
        let off = quadrature_wavefunction(
            label,
            Quadrature::X,
            SQRT_2 * 1.3 + 0.1,
            PhaseConvention::Exact,
        );
        assert!(at_peak.norm() > off.norm());
        assert_abs_diff_eq!(at_peak.norm(), PI.powf(-0.25), epsilon = 1e-16);
    }

    #[test]
    fn exact_phase_reproduces_coherent_overlap() {
        // <beta|gamma> = exp(-|b|^2/2 - |g|^2/2 + conj(b) g), on either quadrature.
        let beta = Complex64::new(0.8, -0.4);
        let gamma = Complex64::new(-0.3, 1.1);
        let expected = (-(beta.norm_sqr() + gamma.norm_sqr()) / 2.0 + beta.conj() * gamma).exp();
        for q in [Quadrature::X, Quadrature::P] {
            let f = |v: f64, part: fn(Complex64) -> f64| {
                part(
                    quadrature_wavefunction(beta, q, v, PhaseConvention::Exact).conj()
                        * quadrature_wavefunction(gamma, q, v, PhaseConvention::Exact),
                )
            };
            let simpson = Simpson::with_tolerance(1e-13);
            let re = simpson.integrate(|v| f(v, |z| z.re), -12.0, 12.0);
            let im = simpson.integrate(|v| f(v, |z| z.im), -12.0, 12.0);
            assert_abs_diff_eq!(re, expected.re, epsilon = 1e-10);
            assert_abs_diff_eq!(im, expected.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn literal_phase_matches_printed_form() {
        let alpha = 2.0;
        let theta = PI / 3.0;
        let label = Complex64::from_polar(alpha, theta);
        let v = 0.37;
        let zx = quadrature_phase(label, Quadrature::X, v, PhaseConvention::Literal);
        assert_abs_diff_eq!(
            zx,
            alpha * theta.sin() * (v - 2.0 * alpha * theta.cos()),
            epsilon = 1e-14
        );
        let zp = quadrature_phase(label, Quadrature::P, v, PhaseConvention::Literal);
        assert_abs_diff_eq!(
            zp,
            -2.0 * alpha * theta.cos() * (SQRT_2 * v - alpha * theta.sin()),
            epsilon = 1e-14
        );
        assert!(reduce_phase(-0.5) > 0.0 && reduce_phase(7.0) < 2.0 * PI);
    }

    #[test]
    fn two_qubit_density_is_gaussian_mixture() {
        let eta = (2.0f64 / 3.0).sqrt();
        let alpha = 3.0;
        let s = two_qubit(alpha, eta);
        for v in [-4.0, -1.0, 0.0, 0.5, 4.2] {
            let f = |beta: f64| PI.powf(-0.25) * (-(v - SQRT_2 * beta).powi(2) / 2.0).exp();
            let expected = 0.5 * (f(eta * alpha).powi(2) + f(-eta * alpha).powi(2));
            assert_abs_diff_eq!(
                outcome_density(&s, Quadrature::X, v),
                expected,
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(integrate_density(&s, Quadrature::X), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn three_qubit_momentum_peaks() {
        let eta = (2.0f64 / 3.0).sqrt();
        let s = closed_form_final_state(3, 5.0)
            .unwrap()
            .apply_channel_loss(eta)
            .unwrap();
        let peak = SQRT_2 * eta * 3f64.sqrt() * 5.0 / 2.0;
        let weight = |mean: f64| -> f64 {
            s.branches()
                .iter()
                .filter(|b| (outcome_mean(b.field, Quadrature::P) - mean).abs() < 1e-9)
                .map(|b| b.amp.norm_sqr())
                .sum()
        };
        assert_abs_diff_eq!(weight(0.0), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(weight(peak), 0.375, epsilon = 1e-12);
        assert_abs_diff_eq!(weight(-peak), 0.375, epsilon = 1e-12);
    }

    #[test]
    fn cdf_is_integral_of_density() {
        let s = closed_form_final_state(3, 1.2).unwrap();
        let (lo, _) = integration_window(&s, Quadrature::P);
        let v = 0.4;
        let numeric = Simpson::with_tolerance(1e-12).integrate(
            |t| outcome_density(&s, Quadrature::P, t),
            lo,
            v,
        );
        assert_abs_diff_eq!(outcome_cdf(&s, Quadrature::P, v), numeric, epsilon = 1e-11);
    }

    #[test]
    fn dominant_gaussian_limit_projects_onto_psi_plus() {
        let alpha = 2.5;
        let s = two_qubit(alpha, 1.0);
        let v = SQRT_2 * alpha + 6.0;
        let rho = conditional_atomic_state(&s, Quadrature::X, v, PhaseConvention::Exact).unwrap();
        let psi = make_target(TargetKind::BellPsiPlus).unwrap();
        let f: Complex64 = psi
            .amps()
            .iter()
            .flat_map(|&(x, a)| psi.amps().iter().map(move |&(y, b)| (x, a, y, b)))
            .map(|(x, a, y, b)| a.conj() * rho[(x, y)] * b)
            .sum();
        assert!((1.0 - f.re).abs() < 1e-9, "{}", f.re);
    }

    #[test]
    fn zero_trace_outcome_is_degenerate() {
        let s = two_qubit(1.0, 1.0);
        assert!(matches!(
            conditional_atomic_state(&s, Quadrature::X, 1e4, PhaseConvention::Exact),
            Err(Error::DegenerateOutcome { .. })
        ));
    }

    #[test]
    fn projector_matches_dense_matrix() {
        let eta = 0.8;
        let pair = ReflectionPair::new(
            Complex64::from_polar(1.0, PI / 3.0),
            Complex64::from_polar(0.7, -PI / 3.0),
        );
        let mut s = init_plus_state(3, 1.4).unwrap();
        for q in 0..3 {
            s = s.apply_cps(q, &pair).unwrap();
        }
        let s = s.apply_channel_loss(eta).unwrap();
        let target = make_target(TargetKind::Gprime {
            n: 3,
            k: 1,
            zeta: 0.4,
        })
        .unwrap();
        let support: Vec<usize> = (0..8).collect();
        let proj =
            TargetProjector::new(&s, Quadrature::X, support, ProjectionModel::default()).unwrap();
        let v = 0.3;
        let rho = conditional_atomic_state(&s, Quadrature::X, v, PhaseConvention::Exact).unwrap();
        let dense: Complex64 = target
            .amps()
            .iter()
            .flat_map(|&(x, a)| target.amps().iter().map(move |&(y, b)| (x, a, y, b)))
            .map(|(x, a, y, b)| a.conj() * rho[(x, y)] * b)
            .sum();
        let density = outcome_density(&s, Quadrature::X, v);
        assert_abs_diff_eq!(proj.weight(&target, v), dense.re * density, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn wavefunction_is_normalized(re in -4.0f64..4.0, im in -4.0f64..4.0, px in any::<bool>()) {
            let q = if px { Quadrature::P } else { Quadrature::X };
            let label = Complex64::new(re, im);
            let m = outcome_mean(label, q);
            let total = Simpson::with_tolerance(1e-12).integrate(
                |v| quadrature_wavefunction(label, q, v, PhaseConvention::Exact).norm_sqr(),
                m - 8.0, m + 8.0);
            prop_assert!((total - 1.0).abs() < 1e-10);
        }

        #[test]
        fn density_integrates_to_one(n in 1usize..5, alpha in 0.0f64..5.0, eta in 0.0f64..=1.0,
                                     r1 in 0.3f64..=1.0, phi in -3.1f64..3.1, px in any::<bool>()) {
            let q = if px { Quadrature::P } else { Quadrature::X };
            let pair = ReflectionPair::new(Complex64::from_polar(1.0, phi), Complex64::from_polar(r1, -phi));
            let mut s = init_plus_state(n, alpha).unwrap();
            for i in 0..n {
                s = s.apply_cps(i, &pair).unwrap();
            }
            let s = s.apply_channel_loss(eta).unwrap();
            prop_assert!((integrate_density(&s, q) - 1.0).abs() < 1e-10);
        }

        #[test]
        fn conditional_state_is_a_density_matrix(alpha in 0.2f64..3.0, eta in 0.3f64..=1.0,
                                                 r1 in 0.3f64..=1.0, v in -3.0f64..3.0) {
            let pair = ReflectionPair::new(Complex64::from_polar(1.0, PI / 3.0), Complex64::from_polar(r1, -PI / 3.0));
            let mut s = init_plus_state(3, alpha).unwrap();
            for i in 0..3 {
                s = s.apply_cps(i, &pair).unwrap();
            }
            let s = s.apply_channel_loss(eta).unwrap();
            let rho = conditional_atomic_state(&s, Quadrature::X, v, PhaseConvention::Exact).unwrap();
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!((&rho - rho.adjoint()).norm() < 1e-14);
            let eig = SymmetricEigen::new(rho);
            prop_assert!(eig.eigenvalues.min() >= -1e-10);
        }

        #[test]
        fn equal_env_lists_give_pure_states(n in 1usize..5, alpha in 0.0f64..3.0,
                                            lossless_channel in any::<bool>(), v in -3.0f64..3.0) {
            // Lossless gates leave no env labels; an eta = 1 channel appends zeros everywhere.
            let pair = ReflectionPair::new(Complex64::from_polar(1.0, 0.9), Complex64::from_polar(1.0, -0.9));
            let mut s = init_plus_state(n, alpha).unwrap();
            for i in 0..n {
                s = s.apply_cps(i, &pair).unwrap();
            }
            let s = if lossless_channel { s.apply_channel_loss(1.0).unwrap() } else { s };
            let rho = conditional_atomic_state(&s, Quadrature::P, v, PhaseConvention::Exact).unwrap();
            let purity = (&rho * &rho).trace().re;
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
            prop_assert!((purity - 1.0).abs() < 1e-9);
        }
    }
}
