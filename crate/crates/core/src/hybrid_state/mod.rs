//! Joint state of `n` atomic qubits, one coherent probe pulse, and the
//! environment modes that have absorbed part of the pulse.
//!
//! Every operation in the hybrid parity scheme is diagonal in the atomic
//! computational basis, so the state stays of the form
//!
//! ```text
//! sum_x c_x |x>_atoms |alpha_x>_pulse |e_x1>|e_x2>... _env
//! ```
//!
//! and is stored densely as one [`BranchRecord`] per bitstring `x`. Qubit 0
//! is the leftmost character of a bitstring, i.e. the most significant bit of
//! the branch index.

mod serde_repr;
mod target;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cavity::{AtomLevel, ReflectionPair};
use crate::error::{Error, Result};

pub use serde_repr::{BranchJson, HybridStateJson};
pub use target::{binomial, dicke_support, make_target, TargetKind, TargetState};

/// Upper bound on the qubit count of a dense branch table.
pub const MAX_QUBITS: usize = 20;

/// Reflection magnitudes within this distance of 1 count as lossless.
const LOSSLESS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub amp: Complex64,
    /// Coherent amplitude of the probe pulse in this branch.
    pub field: Complex64,
    /// Coherent amplitudes deposited in environment modes, one per loss event.
    pub env: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    n: usize,
    alpha0: f64,
    branches: Vec<BranchRecord>,
}

/// Value of qubit `qubit` in the `n`-qubit bitstring `x`.
#[inline]
pub fn qubit_bit(x: usize, qubit: usize, n: usize) -> bool {
    (x >> (n - 1 - qubit)) & 1 == 1
}

pub fn format_bits(x: usize, n: usize) -> String {
    (0..n)
        .map(|q| if qubit_bit(x, q, n) { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "bitstring {bits:?} must have 1..={MAX_QUBITS} characters"
        )));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidParameter(format!(
            "bitstring {bits:?} contains {c:?}"
        ))),
    })
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coherent amplitude must be real, finite and nonnegative, got {alpha}"
        )));
    }
    Ok(())
}

/// Atoms in `|+>^n`, pulse in `|alpha>`.
pub fn init_plus_state(n: usize, alpha: f64) -> Result<HybridState> {
    check_qubit_count(n)?;
    check_alpha(alpha)?;
    let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    let field = Complex64::new(alpha, 0.0);
    Ok(HybridState {
        n,
        alpha0: alpha,
        branches: vec![
            BranchRecord {
                amp,
                field,
                env: Vec::new(),
            };
            1 << n
        ],
    })
}

/// Output of `n` CPS gates with phases `(pi/n, -pi/n)` acting on
/// `|+>^n |alpha>`, written down directly: a weight-`k` branch carries
/// amplitude `2^{-n/2}` and pulse `alpha e^{i(n-2k)pi/n}`.
pub fn closed_form_final_state(n: usize, alpha: f64) -> Result<HybridState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "closed-form final state needs n >= 2, got {n}"
        )));
    }
    check_qubit_count(n)?;
    check_alpha(alpha)?;
    let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    let branches = (0..1usize << n)
        .map(|x| {
            let k = x.count_ones() as f64;
            BranchRecord {
                amp,
                field: Complex64::from_polar(alpha, (n as f64 - 2.0 * k) * PI / n as f64),
                env: Vec::new(),
            }
        })
        .collect();
    Ok(HybridState {
        n,
        alpha0: alpha,
        branches,
    })
}

impl HybridState {
    /// Builds a state from explicit branches, checking every invariant.
    pub fn from_branches(n: usize, alpha0: f64, branches: Vec<BranchRecord>) -> Result<Self> {
        check_qubit_count(n)?;
        check_alpha(alpha0)?;
        if branches.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "{n} qubits need {} branches, got {}",
                1usize << n,
                branches.len()
            )));
        }
        let env_len = branches[0].env.len();
        for b in &branches {
            if b.env.len() != env_len {
                return Err(Error::EnvironmentMismatch {
                    left: env_len,
                    right: b.env.len(),
                });
            }
            if b.field.norm() > alpha0 + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "pulse amplitude {} exceeds the initial amplitude {alpha0}",
                    b.field.norm()
                )));
            }
        }
        let state = HybridState {
            n,
            alpha0,
            branches,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "branch amplitudes are not normalized (sum |c|^2 = {norm})"
            )));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn branches(&self) -> &[BranchRecord] {
        &self.branches
    }

    pub fn branch(&self, x: usize) -> Result<&BranchRecord> {
        self.branches
            .get(x)
            .ok_or(Error::BitstringOutOfRange { bits: x, n: self.n })
    }

    /// Number of loss events recorded so far.
    pub fn env_len(&self) -> usize {
        self.branches[0].env.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|b| b.amp.norm_sqr()).sum()
    }

    /// Reflects the pulse off the cavity holding qubit `qubit`.
    ///
    /// Each branch picks up `r0` or `r1` according to the qubit value. When
    /// either coefficient has `|r| < 1` the missing amplitude
    /// `sqrt(1 - |r|^2) * field` is recorded as a new environment mode in
    /// every branch (zero for branches that lost nothing).
    pub fn apply_cps(&self, qubit: usize, pair: &ReflectionPair) -> Result<HybridState> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n: self.n,
            });
        }
        for r in [pair.r0, pair.r1] {
            if !(r.norm() <= 1.0 + LOSSLESS_SLACK) {
                return Err(Error::InvalidParameter(format!(
                    "reflection coefficient {r} is not passive"
                )));
            }
        }
        let lossy = [pair.r0, pair.r1]
            .iter()
            .any(|r| r.norm() < 1.0 - LOSSLESS_SLACK);

        let branches = self
            .branches
            .iter()
            .enumerate()
            .map(|(x, b)| {
                let r = pair.get(AtomLevel::from_bit(qubit_bit(x, qubit, self.n)));
                let mut env = b.env.clone();
                if lossy {
                    let leaked = (1.0 - r.norm_sqr()).max(0.0).sqrt();
                    env.push(leaked * b.field);
                }
                BranchRecord {
                    amp: b.amp,
                    field: r * b.field,
                    env,
                }
            })
            .collect();
        Ok(HybridState {
            n: self.n,
            alpha0: self.alpha0,
            branches,
        })
    }

    /// Sends the pulse through a channel of amplitude transmission `eta`
    /// (energy transmission `eta^2`), as one beam-splitter loss event.
    pub fn apply_channel_loss(&self, eta: f64) -> Result<HybridState> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "channel transmission eta must lie in [0, 1], got {eta}"
            )));
        }
        let leak = (1.0 - eta * eta).sqrt();
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let mut env = b.env.clone();
                env.push(leak * b.field);
                BranchRecord {
                    amp: b.amp,
                    field: eta * b.field,
                    env,
                }
            })
            .collect();
        Ok(HybridState {
            n: self.n,
            alpha0: self.alpha0,
            branches,
        })
    }

    /// Decoherence factor `prod_j <e_yj|e_xj>` between branches `x` and `y`
    /// left behind when the environment modes are traced out.
    pub fn env_overlap(&self, x: usize, y: usize) -> Result<Complex64> {
        let ex = &self.branch(x)?.env;
        let ey = &self.branch(y)?.env;
        env_overlap_labels(ex, ey)
    }

    /// `sum_x conj(T_x) c_x` over the target support. Only meaningful when
    /// every branch in that support carries the same pulse and environment
    /// labels, as in the ideal closed-form expansion.
    pub fn target_component(&self, target: &TargetState) -> Result<Complex64> {
        if target.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "target on {} qubits applied to a {}-qubit state",
                target.n(),
                self.n
            )));
        }
        Ok(target
            .amps()
            .iter()
            .map(|&(x, t)| t.conj() * self.branches[x].amp)
            .sum())
    }

    /// Largest deviation in amplitude or pulse label between two states.
    pub fn max_branch_deviation(&self, other: &HybridState) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.branches
            .iter()
            .zip(&other.branches)
            .map(|(a, b)| (a.amp - b.amp).norm().max((a.field - b.field).norm()))
            .fold(0.0, f64::max)
    }
}

/// Coherent-state overlap `prod_j <f_j|e_j>` of two environment records.
pub fn env_overlap_labels(e: &[Complex64], f: &[Complex64]) -> Result<Complex64> {
    if e.len() != f.len() {
        return Err(Error::EnvironmentMismatch {
            left: e.len(),
            right: f.len(),
        });
    }
    let exponent: Complex64 = e
        .iter()
        .zip(f)
        .map(|(&ex, &ey)| -(ex.norm_sqr() + ey.norm_sqr()) / 2.0 + ey.conj() * ex)
        .sum();
    Ok(exponent.exp())
}
