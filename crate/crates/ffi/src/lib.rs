//! C ABI over `nv_cycle`.
//!
//! Models and point results are opaque heap handles released with their
//! `_free` function. Every call returns an [`NvStatus`]; on failure the
//! message is available from [`nv_last_error`] on the same thread until the
//! next failing call. Panics are caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::Vector3;
use nv_cycle::cli::config::RunConfig;
use nv_cycle::cycle::MwTarget;
use nv_cycle::frames::{compose_mixture, Frame, StressTensor};
use nv_cycle::pipeline::{Model, PointResult};
use nv_cycle::presets::Preset;
use nv_cycle::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    /// Argument outside its physical domain.
    Domain = 3,
    Config = 4,
    Io = 5,
    /// Solver or integrator failure.
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvPreset {
    Calibrated = 0,
    Experimental = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvFrame {
    Crystal = 0,
    Local = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvMwTarget {
    Minus = 0,
    Plus = 1,
}

/// Opaque simulator handle.
pub struct NvModel {
    model: Model,
}

/// Opaque result of one stress point.
pub struct NvPointResult {
    result: PointResult,
}

/// Rates of one stress point, MHz (τ in seconds).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NvRates {
    pub gamma_a1: f64,
    pub gamma_e12: f64,
    pub gamma_ave: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_z: f64,
    pub lower_z: f64,
    pub lower_plus: f64,
    pub lower_minus: f64,
    pub rad_x: f64,
    pub rad_y: f64,
    pub tau: f64,
    /// 1 when the symmetry-breaking formulas were used.
    pub broken: i32,
}

/// Cycle observables of one stress point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NvContrast {
    pub intensity: f64,
    pub intensity_mw: f64,
    pub contrast: f64,
    /// Ground-spin fractions `[0, +, −]` after initialisation.
    pub polarization: [f64; 3],
    pub steady_reached: i32,
    pub metastable: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NvStatus {
    match e {
        Error::Config(_) | Error::Spectral(_) => NvStatus::Config,
        Error::Io { .. } => NvStatus::Io,
        Error::Eigensolver(_)
        | Error::TruncationTooSmall { .. }
        | Error::IrrepMismatch(_)
        | Error::StabilityGuard { .. }
        | Error::Structural(_) => NvStatus::Numerical,
        _ => NvStatus::Domain,
    }
}

enum Fail {
    Null(&'static str),
    Str(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NvStatus::Ok,
        Ok(Err(Fail::Null(arg))) => {
            set_error(format!("null pointer passed as {arg}"));
            NvStatus::NullPointer
        }
        Ok(Err(Fail::Str(arg))) => {
            set_error(format!("{arg} is not valid UTF-8"));
            NvStatus::InvalidString
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            NvStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn inp<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn string<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Str(name))
}

fn boxed<T>(slot: &mut *mut T, v: T) {
    *slot = Box::into_raw(Box::new(v));
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Model with bundled data at 300 K.
///
/// # Safety
/// `model` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn nv_model_new(preset: NvPreset, model: *mut *mut NvModel) -> NvStatus {
    guard(|| {
        let slot = out(model, "model")?;
        let p = match preset {
            NvPreset::Calibrated => Preset::Calibrated,
            NvPreset::Experimental => Preset::Experimental,
        };
        boxed(
            slot,
            NvModel {
                model: Model::preset(p)?,
            },
        );
        Ok(())
    })
}

/// Model built from a TOML run configuration.
///
/// # Safety
/// `path` must be NUL-terminated; `model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nv_model_from_config(
    path: *const c_char,
    model: *mut *mut NvModel,
) -> NvStatus {
    guard(|| {
        let slot = out(model, "model")?;
        let cfg = RunConfig::load(string(path, "path")?)?;
        boxed(
            slot,
            NvModel {
                model: cfg.model()?,
            },
        );
        Ok(())
    })
}

/// # Safety
/// `model` must come from `nv_model_new`/`nv_model_from_config` (or be NULL)
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nv_model_free(model: *mut NvModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Excitation and microwave rates in MHz.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nv_model_set_drive(
    model: *mut NvModel,
    gamma_exc: f64,
    gamma_mw: f64,
    target: NvMwTarget,
) -> NvStatus {
    guard(|| {
        let m = out(model, "model")?;
        for (field, v) in [("gamma_exc", gamma_exc), ("gamma_mw", gamma_mw)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain {
                    field,
                    value: v,
                    reason: "rate must be finite and nonnegative",
                }
                .into());
            }
        }
        m.model.drive.gamma_exc = gamma_exc;
        m.model.drive.gamma_mw = gamma_mw;
        m.model.drive.mw_target = match target {
            NvMwTarget::Minus => MwTarget::Minus,
            NvMwTarget::Plus => MwTarget::Plus,
        };
        Ok(())
    })
}

/// Crystal-frame tensor `[xx, yy, zz, xy, xz, yz]` of the mixture
/// `α·hydrostatic + (1−α)·uniaxial(axis)` at `magnitude` GPa.
///
/// # Safety
/// `axis` must point to 3 doubles and `stress` to 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nv_compose_stress(
    alpha: f64,
    magnitude: f64,
    axis: *const f64,
    stress: *mut f64,
) -> NvStatus {
    guard(|| {
        let a = std::slice::from_raw_parts(inp(axis, "axis")?, 3);
        let out6 = std::slice::from_raw_parts_mut(out(stress, "stress")?, 6);
        let v = Vector3::new(a[0], a[1], a[2]);
        if !(v.norm() > 0.0) {
            return Err(Error::Domain {
                field: "axis",
                value: v.norm(),
                reason: "load axis must be nonzero",
            }
            .into());
        }
        let t = compose_mixture(alpha, magnitude, v.normalize())?;
        out6.copy_from_slice(&t.components());
        Ok(())
    })
}

/// Full pipeline at one stress tensor `[xx, yy, zz, xy, xz, yz]` in GPa.
///
/// # Safety
/// `model` must be a live handle, `stress` must point to 6 doubles and
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nv_model_evaluate(
    model: *const NvModel,
    stress: *const f64,
    frame: NvFrame,
    result: *mut *mut NvPointResult,
) -> NvStatus {
    guard(|| {
        let m = inp(model, "model")?;
        let s = std::slice::from_raw_parts(inp(stress, "stress")?, 6);
        let slot = out(result, "result")?;
        let frame = match frame {
            NvFrame::Crystal => Frame::Crystal,
            NvFrame::Local => Frame::Local,
        };
        let c: [f64; 6] = s.try_into().expect("six components");
        let r = m.model.evaluate(&StressTensor::new(c, frame))?;
        boxed(slot, NvPointResult { result: r });
        Ok(())
    })
}

/// # Safety
/// `result` must come from `nv_model_evaluate` (or be NULL) and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nv_point_free(result: *mut NvPointResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle and `rates` writable.
#[no_mangle]
pub unsafe extern "C" fn nv_point_rates(
    result: *const NvPointResult,
    rates: *mut NvRates,
) -> NvStatus {
    guard(|| {
        let r = &inp(result, "result")?.result.rates;
        let o = out(rates, "rates")?;
        *o = NvRates {
            gamma_a1: r.upper.gamma_a1,
            gamma_e12: r.upper.gamma_e12,
            gamma_ave: r.upper.gamma_ave,
            gamma_plus: r.upper.gamma_plus,
            gamma_minus: r.upper.gamma_minus,
            gamma_z: r.upper.gamma_z,
            lower_z: r.lower.gamma_z,
            lower_plus: r.lower.gamma_plus,
            lower_minus: r.lower.gamma_minus,
            rad_x: r.rad_x,
            rad_y: r.rad_y,
            tau: r.relaxation.tau,
            broken: i32::from(r.regime == nv_cycle::rates::Regime::Broken),
        };
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `contrast` writable.
#[no_mangle]
pub unsafe extern "C" fn nv_point_contrast(
    result: *const NvPointResult,
    contrast: *mut NvContrast,
) -> NvStatus {
    guard(|| {
        let c = &inp(result, "result")?.result.contrast;
        let o = out(contrast, "contrast")?;
        *o = NvContrast {
            intensity: c.intensity,
            intensity_mw: c.intensity_mw,
            contrast: c.contrast,
            polarization: c.polarization,
            steady_reached: i32::from(c.steady_reached),
            metastable: i32::from(c.metastable),
        };
        Ok(())
    })
}
