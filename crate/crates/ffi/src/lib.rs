//! C ABI for the hpsim simulator.
//!
//! Every fallible function returns an [`HpsimStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`hpsim_last_error`] on the same thread until the next failing call.
//! States and rules are opaque heap handles released with their `_free`
//! functions; strings handed out by the library are released with
//! [`hpsim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hpsim::cavity::{
    reflection_coefficient, solve_params_for_phase, AtomLevel, CavityParams, ReflectionPair,
};
use hpsim::error::Error;
use hpsim::homodyne::{
    build_decision_rule, outcome_density, rng_from_seed, Coherence, DecisionRule, OutcomeSampler,
    PhaseConvention, ProjectionModel, Quadrature, Scenario,
};
use hpsim::hybrid_state::{closed_form_final_state, init_plus_state, HybridState};
use hpsim::metrics;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    DegenerateRule = 4,
    NoTarget = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpsimComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for HpsimComplex {
    fn from(z: Complex64) -> Self {
        HpsimComplex { re: z.re, im: z.im }
    }
}

impl From<HpsimComplex> for Complex64 {
    fn from(z: HpsimComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Detunings, coupling and decay rates in units of the cavity decay rate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpsimCavityParams {
    pub delta1: f64,
    pub delta2: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl From<CavityParams> for HpsimCavityParams {
    fn from(p: CavityParams) -> Self {
        HpsimCavityParams {
            delta1: p.delta1,
            delta2: p.delta2,
            g: p.g,
            kappa: p.kappa,
            gamma: p.gamma,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpsimScenario {
    TwoQubitX = 0,
    ThreeQubitP = 1,
    /// Uses the `n` argument.
    GsumX = 2,
    /// Uses the `n` argument.
    NQubitP = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpsimQuadrature {
    X = 0,
    P = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpsimPhase {
    Exact = 0,
    Literal = 1,
    Suppressed = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpsimCoherence {
    Traced = 0,
    Ignored = 1,
}

/// Opaque atom-pulse-environment state.
pub struct HpsimState(HybridState);

/// Opaque homodyne decision rule.
pub struct HpsimRule(DecisionRule);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HpsimStatus {
    match e {
        Error::InvalidParameter(_)
        | Error::QubitOutOfRange { .. }
        | Error::BitstringOutOfRange { .. }
        | Error::EnvironmentMismatch { .. } => HpsimStatus::InvalidArgument,
        Error::DegenerateRule(_) => HpsimStatus::DegenerateRule,
        Error::NoTarget { .. } => HpsimStatus::NoTarget,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => HpsimStatus::Io,
        _ => HpsimStatus::Numerical,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> HpsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HpsimStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("{name} is null"));
            HpsimStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            HpsimStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::Null(name))
    } else {
        Ok(())
    }
}

fn scenario(s: HpsimScenario, n: usize) -> Scenario {
    match s {
        HpsimScenario::TwoQubitX => Scenario::TwoQubitX,
        HpsimScenario::ThreeQubitP => Scenario::ThreeQubitP,
        HpsimScenario::GsumX => Scenario::GsumX { n },
        HpsimScenario::NQubitP => Scenario::NQubitP { n },
    }
}

fn quadrature(q: HpsimQuadrature) -> Quadrature {
    match q {
        HpsimQuadrature::X => Quadrature::X,
        HpsimQuadrature::P => Quadrature::P,
    }
}

fn model(phase: HpsimPhase, coherence: HpsimCoherence) -> ProjectionModel {
    ProjectionModel {
        phase: match phase {
            HpsimPhase::Exact => PhaseConvention::Exact,
            HpsimPhase::Literal => PhaseConvention::Literal,
            HpsimPhase::Suppressed => PhaseConvention::Suppressed,
        },
        coherence: match coherence {
            HpsimCoherence::Traced => Coherence::Traced,
            HpsimCoherence::Ignored => Coherence::Ignored,
        },
    }
}

/// Library version, statically allocated. Do not free.
#[no_mangle]
pub extern "C" fn hpsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn hpsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hpsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reflection coefficient for atomic level `level` (0 or 1).
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_reflection_coefficient(
    params: *const HpsimCavityParams,
    level: u32,
    out: *mut HpsimComplex,
) -> HpsimStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = &*params;
        let level = match level {
            0 => AtomLevel::Zero,
            1 => AtomLevel::One,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "atomic level must be 0 or 1, got {level}"
                ))
                .into())
            }
        };
        let params = CavityParams {
            delta1: p.delta1,
            delta2: p.delta2,
            g: p.g,
            kappa: p.kappa,
            gamma: p.gamma,
        };
        params.validate()?;
        *out = reflection_coefficient(&params, level)?.into();
        Ok(())
    })
}

/// Lossless parameters giving reflection phases `(pi/n, -pi/n)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hpsim_solve_params(n: usize, out: *mut HpsimCavityParams) -> HpsimStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = solve_params_for_phase(n)?.into();
        Ok(())
    })
}

unsafe fn put_state(out: *mut *mut HpsimState, s: HybridState) {
    *out = Box::into_raw(Box::new(HpsimState(s)));
}

/// Atoms in `|+>^n`, pulse in `|alpha>`.
///
/// # Safety
/// `out` must be a valid pointer; the handle it receives is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_init(
    n: usize,
    alpha: f64,
    out: *mut *mut HpsimState,
) -> HpsimStatus {
    guard(|| {
        non_null(out, "out")?;
        put_state(out, init_plus_state(n, alpha)?);
        Ok(())
    })
}

/// Ideal output of `n` CPS gates with phases `(pi/n, -pi/n)`.
///
/// # Safety
/// `out` must be a valid pointer; the handle it receives is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_closed_form(
    n: usize,
    alpha: f64,
    out: *mut *mut HpsimState,
) -> HpsimStatus {
    guard(|| {
        non_null(out, "out")?;
        put_state(out, closed_form_final_state(n, alpha)?);
        Ok(())
    })
}

/// Full pipeline: initial state, `n` CPS gates tuned for `(pi/n, -pi/n)`
/// at emission rate `gamma`, channel loss `eta_sq`, and the matching
/// decision rule. Either output may be null if not wanted.
///
/// # Safety
/// Non-null out-pointers must be valid; received handles are owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn hpsim_prepare(
    kind: HpsimScenario,
    n: usize,
    alpha: f64,
    eta_sq: f64,
    gamma: f64,
    out_state: *mut *mut HpsimState,
    out_rule: *mut *mut HpsimRule,
) -> HpsimStatus {
    guard(|| {
        let p = metrics::prepare(scenario(kind, n), alpha, eta_sq, gamma)?;
        if !out_state.is_null() {
            put_state(out_state, p.state);
        }
        if !out_rule.is_null() {
            *out_rule = Box::into_raw(Box::new(HpsimRule(p.rule)));
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_free(state: *mut HpsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Reflects the pulse off the cavity of `qubit`, in place.
///
/// # Safety
/// `state` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_apply_cps(
    state: *mut HpsimState,
    qubit: usize,
    r0: HpsimComplex,
    r1: HpsimComplex,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        let s = &mut (*state).0;
        *s = s.apply_cps(qubit, &ReflectionPair::new(r0.into(), r1.into()))?;
        Ok(())
    })
}

/// Channel of amplitude transmission `eta`, in place.
///
/// # Safety
/// `state` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_apply_loss(state: *mut HpsimState, eta: f64) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        let s = &mut (*state).0;
        *s = s.apply_channel_loss(eta)?;
        Ok(())
    })
}

/// Qubit count of the state.
///
/// # Safety
/// `state` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_qubits(
    state: *const HpsimState,
    out: *mut usize,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        *out = (*state).0.n();
        Ok(())
    })
}

/// JSON rendering of the branch table. Free with [`hpsim_string_free`].
///
/// # Safety
/// `state` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_to_json(
    state: *const HpsimState,
    out: *mut *mut c_char,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        let text = serde_json::to_string(&(*state).0).map_err(Error::from)?;
        *out = CString::new(text)
            .expect("JSON has no nul bytes")
            .into_raw();
        Ok(())
    })
}

/// Parses a branch table written by [`hpsim_state_to_json`].
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hpsim_state_from_json(
    json: *const c_char,
    out: *mut *mut HpsimState,
) -> HpsimStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::InvalidParameter("JSON is not UTF-8".into()))?;
        let state: HybridState = serde_json::from_str(text).map_err(Error::from)?;
        put_state(out, state);
        Ok(())
    })
}

/// Homodyne outcome density at `v`.
///
/// # Safety
/// `state` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_outcome_density(
    state: *const HpsimState,
    q: HpsimQuadrature,
    v: f64,
    out: *mut f64,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        *out = outcome_density(&(*state).0, quadrature(q), v);
        Ok(())
    })
}

/// Draws `count` outcomes into `buf` from a generator seeded by `seed`.
///
/// # Safety
/// `state` must be valid and `buf` must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn hpsim_sample_outcomes(
    state: *const HpsimState,
    q: HpsimQuadrature,
    seed: u64,
    count: usize,
    buf: *mut f64,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        if count == 0 {
            return Ok(());
        }
        non_null(buf, "buf")?;
        let sampler = OutcomeSampler::new(&(*state).0, quadrature(q))?;
        let mut rng = rng_from_seed(seed);
        let out = std::slice::from_raw_parts_mut(buf, count);
        for v in out {
            *v = sampler.sample(&mut rng);
        }
        Ok(())
    })
}

/// Decision rule for `kind` (`n` is read by the n-qubit scenarios) with
/// input amplitude `alpha` and channel amplitude transmission `eta`.
///
/// # Safety
/// `out` must be a valid pointer; the handle it receives is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn hpsim_rule_build(
    kind: HpsimScenario,
    n: usize,
    alpha: f64,
    eta: f64,
    out: *mut *mut HpsimRule,
) -> HpsimStatus {
    guard(|| {
        non_null(out, "out")?;
        let rule = build_decision_rule(scenario(kind, n), alpha, eta)?;
        *out = Box::into_raw(Box::new(HpsimRule(rule)));
        Ok(())
    })
}

/// # Safety
/// `rule` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hpsim_rule_free(rule: *mut HpsimRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Number of outcome classes.
///
/// # Safety
/// `rule` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_rule_class_count(
    rule: *const HpsimRule,
    out: *mut usize,
) -> HpsimStatus {
    guard(|| {
        non_null(rule, "rule")?;
        non_null(out, "out")?;
        *out = (*rule).0.classes.len();
        Ok(())
    })
}

/// Index of the class containing outcome `v`.
///
/// # Safety
/// `rule` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_rule_classify(
    rule: *const HpsimRule,
    v: f64,
    out: *mut usize,
) -> HpsimStatus {
    guard(|| {
        non_null(rule, "rule")?;
        non_null(out, "out")?;
        *out = (*rule).0.class_index(v);
        Ok(())
    })
}

/// Target name of a class, e.g. `GHZ(3)`. Free with [`hpsim_string_free`].
///
/// # Safety
/// `rule` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_rule_class_name(
    rule: *const HpsimRule,
    class: usize,
    out: *mut *mut c_char,
) -> HpsimStatus {
    guard(|| {
        non_null(rule, "rule")?;
        non_null(out, "out")?;
        let rule = &(*rule).0;
        let c = rule
            .classes
            .get(class)
            .ok_or_else(|| Error::InvalidParameter(format!("class index {class} out of range")))?;
        *out = CString::new(c.target_name())
            .expect("names have no nul bytes")
            .into_raw();
        Ok(())
    })
}

/// Probability that the outcome lands in `class`.
///
/// # Safety
/// `state`, `rule` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_success_probability(
    state: *const HpsimState,
    rule: *const HpsimRule,
    class: usize,
    out: *mut f64,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(rule, "rule")?;
        non_null(out, "out")?;
        *out = metrics::success_probability(&(*state).0, &(*rule).0, class)?;
        Ok(())
    })
}

/// Average fidelity of the atoms with the class target.
///
/// # Safety
/// `state`, `rule` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_fidelity(
    state: *const HpsimState,
    rule: *const HpsimRule,
    class: usize,
    phase: HpsimPhase,
    coherence: HpsimCoherence,
    out: *mut f64,
) -> HpsimStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(rule, "rule")?;
        non_null(out, "out")?;
        *out = metrics::fidelity(&(*state).0, &(*rule).0, class, model(phase, coherence))?;
        Ok(())
    })
}

/// Two-qubit success probability and fidelity per class, lossless cavities.
///
/// # Safety
/// `success_prob` and `fidelity` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hpsim_closed_form_two_qubit(
    alpha: f64,
    eta: f64,
    success_prob: *mut f64,
    fidelity: *mut f64,
) -> HpsimStatus {
    guard(|| {
        non_null(success_prob, "success_prob")?;
        non_null(fidelity, "fidelity")?;
        let (ps, f) = metrics::closed_form_two_qubit(alpha, eta)?;
        *success_prob = ps;
        *fidelity = f;
        Ok(())
    })
}

/// `n / 2^{n-1}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hpsim_w_state_success(n: usize, out: *mut f64) -> HpsimStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = metrics::w_state_success(n)?;
        Ok(())
    })
}
