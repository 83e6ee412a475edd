//! Single-sided cavity with one trapped three-level atom.
//!
//! In the weak-excitation limit the reflected field is `a_out = r a_in`, where
//! `r` depends on whether the atom sits in the coupled level `|1>` or the
//! decoupled level `|0>`. All rates are measured in units of the cavity decay
//! rate, so the default `kappa` is 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance on `|denominator| / kappa^2` below which `r` is singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Ground level of the atomic qubit seen by the reflected pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLevel {
    /// `|0>`, decoupled from the cavity mode (population `P1 = 0`).
    Zero,
    /// `|1>`, driven on the `|1> <-> |e>` transition (population `P1 = 1`).
    One,
}

impl AtomLevel {
    pub fn population(self) -> f64 {
        match self {
            AtomLevel::Zero => 0.0,
            AtomLevel::One => 1.0,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            AtomLevel::One
        } else {
            AtomLevel::Zero
        }
    }
}

/// Detunings, coupling and decay rates of one atom-cavity node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Atom-pulse detuning `w0 - wp`.
    pub delta1: f64,
    /// Cavity-pulse detuning `wc - wp`.
    pub delta2: f64,
    /// Atom-cavity coupling rate.
    pub g: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Spontaneous emission rate of the excited level.
    pub gamma: f64,
}

impl CavityParams {
    pub fn new(delta1: f64, delta2: f64, g: f64, gamma: f64) -> Result<Self> {
        let params = CavityParams {
            delta1,
            delta2,
            g,
            kappa: 1.0,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        let params = CavityParams { gamma, ..self };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.delta1, self.delta2, self.g, self.kappa, self.gamma]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter(
                "cavity parameters must be finite".into(),
            ));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling g must be nonnegative, got {}",
                self.g
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Reflection coefficients for both atomic levels together with their phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPair {
    pub r0: Complex64,
    pub r1: Complex64,
    /// `arg(r0)` in `(-pi, pi]`.
    pub phi0: f64,
    /// `arg(r1)` in `(-pi, pi]`.
    pub phi1: f64,
}

impl ReflectionPair {
    pub fn new(r0: Complex64, r1: Complex64) -> Self {
        ReflectionPair {
            r0,
            r1,
            phi0: principal_arg(r0),
            phi1: principal_arg(r1),
        }
    }

    pub fn from_params(params: &CavityParams) -> Result<Self> {
        Ok(ReflectionPair::new(
            reflection_coefficient(params, AtomLevel::Zero)?,
            reflection_coefficient(params, AtomLevel::One)?,
        ))
    }

    /// Lossless pair `(e^{i phi0}, e^{i phi1})`.
    pub fn from_phases(phi0: f64, phi1: f64) -> Self {
        ReflectionPair::new(
            Complex64::from_polar(1.0, phi0),
            Complex64::from_polar(1.0, phi1),
        )
    }

    pub fn get(&self, level: AtomLevel) -> Complex64 {
        match level {
            AtomLevel::Zero => self.r0,
            AtomLevel::One => self.r1,
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.r0.norm() >= 1.0 && self.r1.norm() >= 1.0
    }
}

/// `arg(z)` mapped onto `(-pi, pi]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let phi = z.arg();
    if phi <= -PI {
        phi + 2.0 * PI
    } else {
        phi
    }
}

/// Weak-excitation reflection coefficient
///
/// ```text
///     (i d1 + g/2)(i d2 - k/2) + P1 g^2
/// r = ---------------------------------
///     (i d1 + g/2)(i d2 + k/2) + P1 g^2
/// ```
///
/// with `g/2` standing for `gamma/2`. At `gamma = 0` this is the ideal
/// lossless CPS coefficient.
pub fn reflection_coefficient(params: &CavityParams, level: AtomLevel) -> Result<Complex64> {
    params.validate()?;
    let atom = Complex64::new(params.gamma / 2.0, params.delta1);
    let coupling = level.population() * params.g * params.g;
    let half_kappa = params.kappa / 2.0;
    let numerator = atom * Complex64::new(-half_kappa, params.delta2) + coupling;
    let denominator = atom * Complex64::new(half_kappa, params.delta2) + coupling;
    let magnitude = denominator.norm();
    if !(magnitude >= SINGULAR_TOLERANCE * params.kappa * params.kappa) {
        return Err(Error::SingularParameters { magnitude });
    }
    Ok(numerator / denominator)
}

/// Cavity settings with `phi0 = pi/n`, `phi1 = -pi/n` and `delta1 = delta2`,
/// at `gamma = 0`:
/// `delta = (kappa/2) cot(pi/2n)` and `g^2 = (kappa^2/2) cot^2(pi/2n)`.
pub fn solve_params_for_phase(n: usize) -> Result<CavityParams> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "phase solver needs n >= 2, got {n}"
        )));
    }
    let kappa = 1.0;
    let cot = 1.0 / (PI / (2.0 * n as f64)).tan();
    let delta = kappa / 2.0 * cot;
    let params = CavityParams {
        delta1: delta,
        delta2: delta,
        g: std::f64::consts::SQRT_2 * delta,
        kappa,
        gamma: 0.0,
    };

    let pair = ReflectionPair::from_params(&params)?;
    let target = PI / n as f64;
    let err = (pair.phi0 - target).abs().max((pair.phi1 + target).abs());
    if err >= 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "closed-form cavity settings miss the target phase pi/{n} by {err:e} rad"
        )));
    }
    Ok(params)
}

/// Integration controls for [`steady_state_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Maximum integration time in units of `1/kappa`.
    pub horizon: f64,
    /// Convergence threshold on the norm of the time derivative.
    pub residual: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            horizon: 1e6,
            residual: 1e-13,
        }
    }
}

/// Reflection coefficient obtained by integrating the linearized
/// Heisenberg-Langevin equations for the cavity field `a` and the atomic
/// coherence `s` under unit constant drive until they stop moving:
///
/// ```text
/// a' = -(i d2 + k/2) a - i g s - sqrt(k)
/// s' = -(i d1 + gamma/2) s - i g P1 a
/// ```
///
/// The returned value is `a_out / a_in = 1 + sqrt(k) a`.
pub fn steady_state_oracle(params: &CavityParams, level: AtomLevel) -> Result<Complex64> {
    steady_state_oracle_with(params, level, OracleConfig::default())
}

pub fn steady_state_oracle_with(
    params: &CavityParams,
    level: AtomLevel,
    config: OracleConfig,
) -> Result<Complex64> {
    params.validate()?;
    let cavity_rate = Complex64::new(params.kappa / 2.0, params.delta2);
    let atom_rate = Complex64::new(params.gamma / 2.0, params.delta1);
    let g = params.g;
    let p1 = level.population();
    let drive = params.kappa.sqrt();

    let rhs = |a: Complex64, s: Complex64| -> (Complex64, Complex64) {
        (
            -cavity_rate * a - I * g * s - drive,
            -atom_rate * s - I * g * p1 * a,
        )
    };

    // RK4 stability needs |h lambda| well inside 2.8 for every eigenvalue.
    let spectral_bound = cavity_rate.norm() + atom_rate.norm() + g;
    let h = 0.5 / spectral_bound;
    let steps = (config.horizon / h).ceil() as u64;

    let mut a = Complex64::new(0.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;
    for _ in 0..steps {
        let (ka1, ks1) = rhs(a, s);
        residual = (ka1.norm_sqr() + ks1.norm_sqr()).sqrt();
        if residual < config.residual {
            return Ok(1.0 + drive * a);
        }
        let (ka2, ks2) = rhs(a + 0.5 * h * ka1, s + 0.5 * h * ks1);
        let (ka3, ks3) = rhs(a + 0.5 * h * ka2, s + 0.5 * h * ks2);
        let (ka4, ks4) = rhs(a + h * ka3, s + h * ks3);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        s += h / 6.0 * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4);
    }
    Err(Error::OracleFailure {
        horizon: config.horizon,
        residual,
    })
}

/// Position-dependent coupling `g0 cos(kc z) exp(-r_perp^2 / wc^2)` of a
/// Fabry-Perot standing-wave mode with Gaussian waist `wc`.
pub fn coupling_at_position(g0: f64, kc: f64, wc: f64, z: f64, r_perp: f64) -> Result<f64> {
    if !(wc > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mode waist must be positive, got {wc}"
        )));
    }
    Ok(g0 * (kc * z).cos() * (-(r_perp * r_perp) / (wc * wc)).exp())
}
