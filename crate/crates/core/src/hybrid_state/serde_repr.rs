//! JSON form of [`HybridState`] and [`TargetState`].
//!
//! ```json
//! {"n": 2, "alpha0": 3.0,
//!  "branches": [{"bits": "00", "amp_re": 0.5, "amp_im": 0.0,
//!                "field_re": -3.0, "field_im": 0.0, "env": [[0.0, 0.0]]}, ...]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{format_bits, parse_bits, BranchRecord, HybridState, TargetState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchJson {
    pub bits: String,
    pub amp_re: f64,
    pub amp_im: f64,
    pub field_re: f64,
    pub field_im: f64,
    /// Environment labels as `[re, im]` pairs.
    pub env: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridStateJson {
    pub n: usize,
    pub alpha0: f64,
    pub branches: Vec<BranchJson>,
}

impl From<&HybridState> for HybridStateJson {
    fn from(state: &HybridState) -> Self {
        HybridStateJson {
            n: state.n,
            alpha0: state.alpha0,
            branches: state
                .branches
                .iter()
                .enumerate()
                .map(|(x, b)| BranchJson {
                    bits: format_bits(x, state.n),
                    amp_re: b.amp.re,
                    amp_im: b.amp.im,
                    field_re: b.field.re,
                    field_im: b.field.im,
                    env: b.env.iter().map(|e| [e.re, e.im]).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<HybridStateJson> for HybridState {
    type Error = Error;

    fn try_from(json: HybridStateJson) -> Result<Self> {
        let n = json.n;
        super::check_qubit_count(n)?;
        let mut slots: Vec<Option<BranchRecord>> = vec![None; 1 << n];
        for b in json.branches {
            if b.bits.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "branch {:?} does not have {n} bits",
                    b.bits
                )));
            }
            let x = parse_bits(&b.bits)?;
            if slots[x].is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate branch {:?}",
                    b.bits
                )));
            }
            slots[x] = Some(BranchRecord {
                amp: Complex64::new(b.amp_re, b.amp_im),
                field: Complex64::new(b.field_re, b.field_im),
                env: b
                    .env
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            });
        }
        let branches = slots
            .into_iter()
            .enumerate()
            .map(|(x, b)| {
                b.ok_or_else(|| {
                    Error::InvalidParameter(format!("missing branch {:?}", format_bits(x, n)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        HybridState::from_branches(n, json.alpha0, branches)
    }
}

impl Serialize for HybridState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        HybridStateJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HybridState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let json = HybridStateJson::deserialize(deserializer)?;
        HybridState::try_from(json).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct TargetAmpJson {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct TargetJson {
    name: String,
    n: usize,
    amps: Vec<TargetAmpJson>,
}

impl Serialize for TargetState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TargetJson {
            name: self.name(),
            n: self.n(),
            amps: self
                .labelled_amps()
                .into_iter()
                .map(|(bits, a)| TargetAmpJson {
                    bits,
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}
