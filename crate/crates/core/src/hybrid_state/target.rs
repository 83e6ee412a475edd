use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_qubit_count, format_bits};
use crate::error::{Error, Result};

/// Named pure atomic states produced by the parity projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetKind {
    Ghz {
        n: usize,
    },
    /// `W(n) = Dicke(n, 1)`.
    W {
        n: usize,
    },
    Dicke {
        n: usize,
        k: usize,
    },
    /// `(D(n,k) + X^n D(n,k)) / sqrt 2`, or `D(2k,k)` when `n = 2k`.
    Gsum {
        n: usize,
        k: usize,
    },
    /// `(|00> + |11>) / sqrt 2`.
    BellPhiPlus,
    /// `(|01> + |10>) / sqrt 2`.
    BellPsiPlus,
    /// `(e^{i zeta} D(n,k) + e^{-i zeta} D(n,n-k)) / sqrt 2`, the phase-carrying
    /// form of `Gsum` left behind by a position-quadrature measurement.
    Gprime {
        n: usize,
        k: usize,
        zeta: f64,
    },
}

impl TargetKind {
    pub fn n(&self) -> usize {
        match *self {
            TargetKind::Ghz { n }
            | TargetKind::W { n }
            | TargetKind::Dicke { n, .. }
            | TargetKind::Gsum { n, .. }
            | TargetKind::Gprime { n, .. } => n,
            TargetKind::BellPhiPlus | TargetKind::BellPsiPlus => 2,
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TargetKind::Ghz { n } => write!(f, "GHZ({n})"),
            TargetKind::W { n } => write!(f, "W({n})"),
            TargetKind::Dicke { n, k } => write!(f, "D({n},{k})"),
            TargetKind::Gsum { n, k } => write!(f, "G({n},{k})"),
            TargetKind::BellPhiPlus => write!(f, "phi+"),
            TargetKind::BellPsiPlus => write!(f, "psi+"),
            TargetKind::Gprime { n, k, .. } => write!(f, "G'({n},{k})"),
        }
    }
}

/// Normalized sparse amplitude table over bitstrings, sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    kind: TargetKind,
    amps: Vec<(usize, Complex64)>,
}

impl TargetState {
    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn n(&self) -> usize {
        self.kind.n()
    }

    pub fn amps(&self) -> &[(usize, Complex64)] {
        &self.amps
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        self.amps
            .binary_search_by_key(&x, |&(i, _)| i)
            .map(|i| self.amps[i].1)
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `(bitstring, amplitude)` pairs with bitstrings rendered as text.
    pub fn labelled_amps(&self) -> Vec<(String, Complex64)> {
        let n = self.n();
        self.amps
            .iter()
            .map(|&(x, a)| (format_bits(x, n), a))
            .collect()
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All `n`-bit strings of Hamming weight `k`, ascending.
pub fn dicke_support(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|x| x.count_ones() as usize == k)
        .collect()
}

fn dicke_amps(n: usize, k: usize, phase: Complex64, scale: f64) -> Vec<(usize, Complex64)> {
    let a = phase * (scale / binomial(n, k).sqrt());
    dicke_support(n, k).into_iter().map(|x| (x, a)).collect()
}

fn check_weight(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "weight k = {k} exceeds qubit count n = {n}"
        )));
    }
    Ok(())
}

pub fn make_target(kind: TargetKind) -> Result<TargetState> {
    let n = kind.n();
    check_qubit_count(n)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one = Complex64::new(1.0, 0.0);
    let mut amps = match kind {
        TargetKind::Ghz { n } => vec![(0, one * s), ((1 << n) - 1, one * s)],
        TargetKind::BellPhiPlus => vec![(0b00, one * s), (0b11, one * s)],
        TargetKind::BellPsiPlus => vec![(0b01, one * s), (0b10, one * s)],
        TargetKind::W { n } => dicke_amps(n, 1, one, 1.0),
        TargetKind::Dicke { n, k } => {
            check_weight(n, k)?;
            dicke_amps(n, k, one, 1.0)
        }
        TargetKind::Gsum { n, k } => {
            check_weight(n, k)?;
            if n == 2 * k {
                dicke_amps(n, k, one, 1.0)
            } else {
                let mut a = dicke_amps(n, k, one, s);
                a.extend(dicke_amps(n, n - k, one, s));
                a
            }
        }
        TargetKind::Gprime { n, k, zeta } => {
            check_weight(n, k)?;
            if !zeta.is_finite() {
                return Err(Error::InvalidParameter("G' phase must be finite".into()));
            }
            if n == 2 * k {
                dicke_amps(n, k, one, 1.0)
            } else {
                let mut a = dicke_amps(n, k, Complex64::from_polar(1.0, zeta), s);
                a.extend(dicke_amps(n, n - k, Complex64::from_polar(1.0, -zeta), s));
                a
            }
        }
    };
    amps.sort_by_key(|&(x, _)| x);
    Ok(TargetState { kind, amps })
}
