//! C interface to the pairlaser simulator.
//!
//! Every function returns a [`PlStatus`]. On failure a message is stored per
//! thread and can be copied out with [`pl_last_error_message`]. Objects are
//! opaque handles created by `*_new` functions and released by the matching
//! `*_free`. Undefined ratios (e.g. g2 of an empty mode) are reported as NaN.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pairlaser::fluctuations::{
    build_fluctuation_model, intensity_difference_spectrum, number_statistics, output_spectrum, FluctuationModel,
    ModeLabel,
};
use pairlaser::fock::{build_liouvillian, observables, steady_state};
use pairlaser::params::DEFAULT_DIM_CAP;
use pairlaser::rate_eq::{build_rate_generator, moments, rate_steady_state, JointDistribution, RateParams};
use pairlaser::semiclassical::{steady_branch, threshold, Branch};
use pairlaser::{Error, ModelParams, Truncation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionCap = 3,
    DegenerateNullspace = 4,
    NoConvergence = 5,
    NotPositive = 6,
    StepSize = 7,
    Drift = 8,
    TailMass = 9,
    CouplingTooWeak = 10,
    BelowThreshold = 11,
    NotHurwitz = 12,
    Singular = 13,
    Quadrature = 14,
    Divergence = 15,
    Config = 16,
    Io = 17,
    Panic = 99,
}

impl From<&Error> for PlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => PlStatus::InvalidParameter,
            Error::DimensionCap { .. } => PlStatus::DimensionCap,
            Error::DegenerateNullspace { .. } => PlStatus::DegenerateNullspace,
            Error::NoConvergence(_) => PlStatus::NoConvergence,
            Error::NotPositive { .. } => PlStatus::NotPositive,
            Error::StepSize { .. } => PlStatus::StepSize,
            Error::TraceDrift { .. } | Error::NormalizationDrift { .. } => PlStatus::Drift,
            Error::TailMass { .. } => PlStatus::TailMass,
            Error::CouplingTooWeak { .. } => PlStatus::CouplingTooWeak,
            Error::BelowThreshold(_) => PlStatus::BelowThreshold,
            Error::NotHurwitz { .. } => PlStatus::NotHurwitz,
            Error::Singular { .. } => PlStatus::Singular,
            Error::Quadrature(_) => PlStatus::Quadrature,
            Error::Divergence { .. } => PlStatus::Divergence,
            Error::Config(_) => PlStatus::Config,
            Error::Io(_) => PlStatus::Io,
        }
    }
}

/// Which cavity mode a spectrum refers to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlMode {
    A = 0,
    B = 1,
    C = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PlStatus::Ok
        }
        Ok(Err(e)) => {
            let s = PlStatus::from(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            PlStatus::Panic
        }
    }
}

fn null() -> Error {
    Error::InvalidParameter {
        field: "pointer".into(),
        reason: "null".into(),
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(null)
}

fn guard_ptr<F: FnOnce() -> Result<(), Error>>(ok: bool, f: F) -> PlStatus {
    if !ok {
        set_error("null pointer argument".into());
        return PlStatus::NullPointer;
    }
    guard(f)
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, or 0 when
/// the last call succeeded.
#[no_mangle]
pub unsafe extern "C" fn pl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Model parameters.
pub struct PlModel(ModelParams);

fn boxed_model(p: ModelParams, out: *mut *mut PlModel) -> Result<(), Error> {
    p.validate()?;
    unsafe { *out = Box::into_raw(Box::new(PlModel(p))) };
    Ok(())
}

/// Incoherently pumped model (source mode fed at mu_in, drained at mu_out).
#[no_mangle]
pub unsafe extern "C" fn pl_model_new_incoherent(
    eta: f64,
    kappa_a: f64,
    kappa_b: f64,
    mu_in: f64,
    mu_out: f64,
    out: *mut *mut PlModel,
) -> PlStatus {
    guard_ptr(!out.is_null(), || {
        boxed_model(ModelParams::incoherent(eta, kappa_a, kappa_b, mu_in, mu_out), out)
    })
}

/// Coherently pumped model with source loss kappa_c and heating kappa_bc.
#[no_mangle]
pub unsafe extern "C" fn pl_model_new_coherent(
    eta: f64,
    kappa_a: f64,
    kappa_b: f64,
    kappa_c: f64,
    kappa_bc: f64,
    mu: f64,
    out: *mut *mut PlModel,
) -> PlStatus {
    guard_ptr(!out.is_null(), || {
        boxed_model(ModelParams::coherent(eta, kappa_a, kappa_b, kappa_c, kappa_bc, mu), out)
    })
}

/// Set the source-mode loss kappa_c and the c -> b decay kappa_cb.
#[no_mangle]
pub unsafe extern "C" fn pl_model_set_source_rates(model: *mut PlModel, kappa_c: f64, kappa_cb: f64) -> PlStatus {
    guard_ptr(!model.is_null(), || {
        let m = &mut *model;
        let mut p = m.0;
        p.kappa_c = kappa_c;
        p.kappa_cb = kappa_cb;
        p.validate()?;
        m.0 = p;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_model_free(model: *mut PlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Stationary observables of the truncated master equation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlObservables {
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
    pub photon_rate: f64,
    pub atom_rate: f64,
    pub g2_a: f64,
    pub g2_b: f64,
    pub g2_c: f64,
    pub g_ab: f64,
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub truncation_flag: bool,
}

/// Steady state of the master equation truncated at (n_a, n_b, n_c).
#[no_mangle]
pub unsafe extern "C" fn pl_master_steady_state(
    model: *const PlModel,
    n_a: usize,
    n_b: usize,
    n_c: usize,
    out: *mut PlObservables,
) -> PlStatus {
    guard_ptr(!model.is_null() && !out.is_null(), || {
        let p = &deref(model)?.0;
        let l = build_liouvillian(p, &Truncation::new(n_a, n_b, n_c), DEFAULT_DIM_CAP)?;
        let ss = steady_state(&l)?;
        let o = observables(&ss.rho, p);
        *out = PlObservables {
            n_a: o.n_a,
            n_b: o.n_b,
            n_c: o.n_c,
            photon_rate: o.photon_rate,
            atom_rate: o.atom_rate,
            g2_a: o.g2_a.unwrap_or(f64::NAN),
            g2_b: o.g2_b.unwrap_or(f64::NAN),
            g2_c: o.g2_c.unwrap_or(f64::NAN),
            g_ab: o.g_ab.unwrap_or(f64::NAN),
            residual: ss.residual,
            min_eigenvalue: ss.min_eigenvalue,
            truncation_flag: o.truncation_flag,
        };
        Ok(())
    })
}

/// Joint photon/atom number distribution P(n, m).
pub struct PlJoint(JointDistribution);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlMoments {
    pub mean_n: f64,
    pub mean_m: f64,
    pub g2_n: f64,
    pub g2_m: f64,
    pub g_nm: f64,
    pub var_diff: f64,
}

/// Stationary solution of the joint rate equation on an (n_max+1) x
/// (m_max+1) grid. Needs an incoherently pumped model.
#[no_mangle]
pub unsafe extern "C" fn pl_rate_steady_state(
    model: *const PlModel,
    n_max: usize,
    m_max: usize,
    out: *mut *mut PlJoint,
) -> PlStatus {
    guard_ptr(!model.is_null() && !out.is_null(), || {
        let rp = RateParams::from_model(&deref(model)?.0)?;
        let cap = (n_max + 1) * (m_max + 1);
        let gen = build_rate_generator(&rp, n_max, m_max, cap.max(DEFAULT_DIM_CAP))?;
        let ss = rate_steady_state(&gen)?;
        *out = Box::into_raw(Box::new(PlJoint(ss.dist)));
        Ok(())
    })
}

/// P(n, m); out-of-range indices give 0.
#[no_mangle]
pub unsafe extern "C" fn pl_joint_get(joint: *const PlJoint, n: usize, m: usize, out: *mut f64) -> PlStatus {
    guard_ptr(!joint.is_null() && !out.is_null(), || {
        *out = deref(joint)?.0.get(n, m);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_joint_shape(joint: *const PlJoint, n_max: *mut usize, m_max: *mut usize) -> PlStatus {
    guard_ptr(!joint.is_null() && !n_max.is_null() && !m_max.is_null(), || {
        let j = &deref(joint)?.0;
        *n_max = j.n_max();
        *m_max = j.m_max();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_joint_moments(joint: *const PlJoint, out: *mut PlMoments) -> PlStatus {
    guard_ptr(!joint.is_null() && !out.is_null(), || {
        let m = moments(&deref(joint)?.0);
        *out = PlMoments {
            mean_n: m.mean_n,
            mean_m: m.mean_m,
            g2_n: m.g2_n.unwrap_or(f64::NAN),
            g2_m: m.g2_m.unwrap_or(f64::NAN),
            g_nm: m.g_nm.unwrap_or(f64::NAN),
            var_diff: m.var_diff,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_joint_free(joint: *mut PlJoint) {
    if !joint.is_null() {
        drop(Box::from_raw(joint));
    }
}

/// Mean-field steady state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlBranch {
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
    pub mu_th: f64,
    pub epsilon: f64,
    pub above: bool,
}

/// Lasing threshold of the coherent pump amplitude.
#[no_mangle]
pub unsafe extern "C" fn pl_threshold(model: *const PlModel, out: *mut f64) -> PlStatus {
    guard_ptr(!model.is_null() && !out.is_null(), || {
        *out = threshold(&deref(model)?.0)?;
        Ok(())
    })
}

/// Mean-field steady state at the model's pump amplitude.
#[no_mangle]
pub unsafe extern "C" fn pl_steady_branch(model: *const PlModel, out: *mut PlBranch) -> PlStatus {
    guard_ptr(!model.is_null() && !out.is_null(), || {
        let p = &deref(model)?.0;
        let s = steady_branch(p, p.mu()?)?;
        *out = PlBranch {
            alpha0: s.alpha0,
            beta0: s.beta0,
            gamma0: s.gamma0,
            mu_th: s.mu_th,
            epsilon: s.epsilon,
            above: s.branch == Branch::Above,
        };
        Ok(())
    })
}

/// Linearized fluctuations around the mean-field state.
pub struct PlFluctuations(FluctuationModel);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlNumberStatistics {
    pub g2_a: f64,
    pub g2_b: f64,
    pub g2_c: f64,
    pub g_ab: f64,
    /// <da+ da>, <db+ db>, <dg+ dg>.
    pub correction_a: f64,
    pub correction_b: f64,
    pub correction_c: f64,
    pub linearization_ratio: f64,
    pub linearization_ok: bool,
}

/// Fluctuation model at the model's pump amplitude.
#[no_mangle]
pub unsafe extern "C" fn pl_fluctuations_new(model: *const PlModel, out: *mut *mut PlFluctuations) -> PlStatus {
    guard_ptr(!model.is_null() && !out.is_null(), || {
        let p = &deref(model)?.0;
        let ss = steady_branch(p, p.mu()?)?;
        let fm = build_fluctuation_model(p, &ss)?;
        *out = Box::into_raw(Box::new(PlFluctuations(fm)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_fluctuations_free(fm: *mut PlFluctuations) {
    if !fm.is_null() {
        drop(Box::from_raw(fm));
    }
}

unsafe fn slices<'a>(omega: *const f64, out: *mut f64, n: usize) -> (&'a [f64], &'a mut [f64]) {
    if n == 0 {
        (&[], &mut [])
    } else {
        (std::slice::from_raw_parts(omega, n), std::slice::from_raw_parts_mut(out, n))
    }
}

/// V_x(omega) for `n` frequencies.
#[no_mangle]
pub unsafe extern "C" fn pl_output_spectrum(
    fm: *const PlFluctuations,
    mode: PlMode,
    omega: *const f64,
    n: usize,
    out: *mut f64,
) -> PlStatus {
    guard_ptr(!fm.is_null() && (n == 0 || (!omega.is_null() && !out.is_null())), || {
        let label = match mode {
            PlMode::A => ModeLabel::A,
            PlMode::B => ModeLabel::B,
            PlMode::C => ModeLabel::C,
        };
        let (w, o) = slices(omega, out, n);
        o.copy_from_slice(&output_spectrum(&deref(fm)?.0, label, w)?);
        Ok(())
    })
}

/// Intensity-difference spectrum divided by its shot-noise level.
#[no_mangle]
pub unsafe extern "C" fn pl_intensity_difference(
    fm: *const PlFluctuations,
    omega: *const f64,
    n: usize,
    out: *mut f64,
) -> PlStatus {
    guard_ptr(!fm.is_null() && (n == 0 || (!omega.is_null() && !out.is_null())), || {
        let (w, o) = slices(omega, out, n);
        o.copy_from_slice(&intensity_difference_spectrum(&deref(fm)?.0, w)?.normalized);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_number_statistics(fm: *const PlFluctuations, out: *mut PlNumberStatistics) -> PlStatus {
    guard_ptr(!fm.is_null() && !out.is_null(), || {
        let s = number_statistics(&deref(fm)?.0)?;
        *out = PlNumberStatistics {
            g2_a: s.g2[0],
            g2_b: s.g2[1],
            g2_c: s.g2[2],
            g_ab: s.g_ab,
            correction_a: s.corrections[0],
            correction_b: s.corrections[1],
            correction_c: s.corrections[2],
            linearization_ratio: s.linearization_ratio,
            linearization_ok: s.linearization_ok,
        };
        Ok(())
    })
}
