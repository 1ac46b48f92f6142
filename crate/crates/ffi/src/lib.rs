//! C ABI over `negbudget`.
//!
//! Every fallible function returns an [`NbStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`nb_last_error`]. Handles are opaque; each has a matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use negbudget::budget::{chain_trajectory_with, two_body_trajectory, Trajectory};
use negbudget::dwigner::{discrete_sum_negativity, discrete_wigner};
use negbudget::dynamics::{concurrence_closed_form, concurrence_from_purity, evolve_seed, ExchangeParams};
use negbudget::fock::{coherent_state, fock_state, odd_cat_state, squeezed_fock_state, DensityOperator, StateVector, C64};
use negbudget::phase_space::{mixture_negativity_closed_form, single_mode_negativity, single_photon_negativity, PhaseGrid};
use negbudget::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    Truncation = 3,
    DegenerateState = 4,
    InvalidArgument = 5,
    DimensionMismatch = 6,
    ContractViolation = 7,
    GridTooSmall = 8,
    ResourceLimit = 9,
    StepSize = 10,
    NoBudget = 11,
    Panic = 12,
}

impl From<&Error> for NbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::OutOfRange { .. } => NbStatus::OutOfRange,
            Error::Truncation { .. } => NbStatus::Truncation,
            Error::DegenerateState(_) => NbStatus::DegenerateState,
            Error::Argument(_) => NbStatus::InvalidArgument,
            Error::DimensionMismatch(_) => NbStatus::DimensionMismatch,
            Error::ContractViolation(_) => NbStatus::ContractViolation,
            Error::GridTooSmall { .. } => NbStatus::GridTooSmall,
            Error::ResourceLimit(_) => NbStatus::ResourceLimit,
            Error::StepSize { .. } => NbStatus::StepSize,
            Error::NoBudget { .. } => NbStatus::NoBudget,
        }
    }
}

/// A pure state vector.
pub struct NbState(StateVector);

/// A density operator.
pub struct NbDensity(DensityOperator);

/// A sampled negativity trajectory.
pub struct NbTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), NbStatus>) -> NbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            NbStatus::Panic
        }
    }
}

fn check<T>(r: negbudget::Result<T>) -> Result<T, NbStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        NbStatus::from(&e)
    })
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, NbStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null pointer argument".into());
        NbStatus::NullPointer
    })
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), NbStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(NbStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length plus one, or 0 if
/// there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// `2e^{−1/2} − 1`, the negativity of `|1⟩`.
#[no_mangle]
pub extern "C" fn nb_single_photon_negativity() -> f64 {
    single_photon_negativity()
}

/// Negativity of `p|1⟩⟨1| + (1−p)|0⟩⟨0|` in closed form.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_mixture_negativity_closed_form(p: f64, out: *mut f64) -> NbStatus {
    guard(|| put(out, check(mixture_negativity_closed_form(p))?))
}

/// `|sin(2gt)|`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_concurrence_closed_form(g: f64, t: f64, out: *mut f64) -> NbStatus {
    guard(|| {
        let params = check(ExchangeParams::new(g))?;
        put(out, concurrence_closed_form(params, t))
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_fock(n: usize, dim: usize, out: *mut *mut NbState) -> NbStatus {
    guard(|| put(out, boxed(NbState(check(fock_state(n, dim))?))))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_coherent(re: f64, im: f64, dim: usize, out: *mut *mut NbState) -> NbStatus {
    guard(|| put(out, boxed(NbState(check(coherent_state(C64::new(re, im), dim))?))))
}

/// Odd cat state `∝ |α⟩ − |−α⟩`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_odd_cat(re: f64, im: f64, dim: usize, out: *mut *mut NbState) -> NbStatus {
    guard(|| put(out, boxed(NbState(check(odd_cat_state(C64::new(re, im), dim))?))))
}

/// `S(r)|n⟩`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_squeezed_fock(r: f64, n: usize, dim: usize, out: *mut *mut NbState) -> NbStatus {
    guard(|| put(out, boxed(NbState(check(squeezed_fock_state(r, n, dim))?))))
}

/// Total Hilbert-space dimension, or 0 for null.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nb_state_dim(state: *const NbState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim_total())
}

/// # Safety
/// `state` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_amplitude(state: *const NbState, index: usize, re: *mut f64, im: *mut f64) -> NbStatus {
    guard(|| {
        let s = &get(state)?.0;
        let a = *s.amplitudes().get(index).ok_or_else(|| {
            set_error(format!("amplitude index {index} out of range for dimension {}", s.dim_total()));
            NbStatus::OutOfRange
        })?;
        put(re, a.re)?;
        put(im, a.im)
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nb_state_free(state: *mut NbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `|ψ⟩⟨ψ|`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_density(state: *const NbState, out: *mut *mut NbDensity) -> NbStatus {
    guard(|| {
        let rho = get(state)?.0.density();
        put(out, boxed(NbDensity(rho)))
    })
}

/// Reduced state of a multi-mode vector on the subsystems listed in `keep`.
///
/// # Safety
/// `state` must be a live handle, `keep` valid for `n_keep` reads and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_state_reduced(
    state: *const NbState,
    keep: *const usize,
    n_keep: usize,
    out: *mut *mut NbDensity,
) -> NbStatus {
    guard(|| {
        let s = &get(state)?.0;
        let keep = if n_keep == 0 { &[][..] } else { std::slice::from_raw_parts(get(keep)?, n_keep) };
        put(out, boxed(NbDensity(check(s.reduced(keep))?)))
    })
}

/// `p|1⟩⟨1| + (1−p)|0⟩⟨0|` padded to `dim`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_density_excitation_mixture(p: f64, dim: usize, out: *mut *mut NbDensity) -> NbStatus {
    guard(|| put(out, boxed(NbDensity(check(DensityOperator::excitation_mixture(p, dim))?))))
}

/// Total dimension, or 0 for null.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nb_density_dim(rho: *const NbDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_density_purity(rho: *const NbDensity, out: *mut f64) -> NbStatus {
    guard(|| put(out, get(rho)?.0.purity()))
}

/// Concurrence `√(2(1 − Tr ρ²))` of a qubit reduced from a pure two-qubit state.
///
/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_density_concurrence(rho: *const NbDensity, out: *mut f64) -> NbStatus {
    guard(|| put(out, check(concurrence_from_purity(&get(rho)?.0))?))
}

/// Single-mode Wigner negativity on a square grid of half-width `extent`
/// with `points` nodes per axis.
///
/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_density_negativity(
    rho: *const NbDensity,
    extent: f64,
    points: usize,
    out: *mut f64,
) -> NbStatus {
    guard(|| {
        let grid = check(PhaseGrid::new(extent, points))?;
        put(out, check(single_mode_negativity(&get(rho)?.0, &grid))?)
    })
}

/// Discrete sum negativity for a single qudit of odd prime dimension 3, 5 or 7.
///
/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_density_discrete_sum_negativity(rho: *const NbDensity, out: *mut f64) -> NbStatus {
    guard(|| {
        let r = &get(rho)?.0;
        put(out, discrete_sum_negativity(&check(discrete_wigner(r, r.dim()))?))
    })
}

/// # Safety
/// `rho` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nb_density_free(rho: *mut NbDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Propagates `|0⟩_A ⊗ seed_B` through the beam splitter at rate `g` for time
/// `t` and returns both reduced modes. `leakage` (may be null) receives the
/// population reaching the top Fock level.
///
/// # Safety
/// `seed` must be a live handle; `out_a` and `out_b` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_evolve_seed(
    seed: *const NbState,
    g: f64,
    t: f64,
    out_a: *mut *mut NbDensity,
    out_b: *mut *mut NbDensity,
    leakage: *mut f64,
) -> NbStatus {
    guard(|| {
        let s = &get(seed)?.0;
        if s.dims().len() != 1 {
            set_error(format!("seed must be single-mode, got dims {:?}", s.dims()));
            return Err(NbStatus::DimensionMismatch);
        }
        if out_a.is_null() || out_b.is_null() {
            set_error("null output pointer".into());
            return Err(NbStatus::NullPointer);
        }
        let ev = check(evolve_seed(s, g, t, s.dims()[0]))?;
        if !leakage.is_null() {
            leakage.write(ev.leakage);
        }
        out_a.write(boxed(NbDensity(ev.rho_a)));
        out_b.write(boxed(NbDensity(ev.rho_b)));
        Ok(())
    })
}

/// Two-qubit exchange trajectory over one period at `n_times` samples.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_two_body_trajectory(
    g: f64,
    extent: f64,
    points: usize,
    n_times: usize,
    out: *mut *mut NbTrajectory,
) -> NbStatus {
    guard(|| {
        let params = check(ExchangeParams::new(g))?;
        let grid = check(PhaseGrid::new(extent, points))?;
        put(out, boxed(NbTrajectory(check(two_body_trajectory(params, &grid, n_times))?)))
    })
}

/// Perfect-transfer chain trajectory over `[0, π/(2g)]` without block samples.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_chain_trajectory(
    sites: usize,
    g: f64,
    extent: f64,
    points: usize,
    n_times: usize,
    out: *mut *mut NbTrajectory,
) -> NbStatus {
    guard(|| {
        let params = check(ExchangeParams::new(g))?;
        let grid = check(PhaseGrid::new(extent, points))?;
        put(out, boxed(NbTrajectory(check(chain_trajectory_with(sites, params, &grid, None, n_times))?)))
    })
}

/// Number of samples, or 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_len(traj: *const NbTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of sites, or 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_sites(traj: *const NbTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.sites())
}

/// The seed budget, or NaN for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_budget(traj: *const NbTrajectory) -> f64 {
    traj.as_ref().map_or(f64::NAN, |t| t.0.budget)
}

/// Time and summed local negativity of sample `index`.
///
/// # Safety
/// `traj` must be a live handle; `t` and `total` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_sample(
    traj: *const NbTrajectory,
    index: usize,
    t: *mut f64,
    total: *mut f64,
) -> NbStatus {
    guard(|| {
        let tr = &get(traj)?.0;
        sample_index(tr, index)?;
        put(t, tr.times[index])?;
        put(total, tr.total[index])
    })
}

/// Local negativity of `site` at sample `index`.
///
/// # Safety
/// `traj` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_site_negativity(
    traj: *const NbTrajectory,
    index: usize,
    site: usize,
    out: *mut f64,
) -> NbStatus {
    guard(|| {
        let tr = &get(traj)?.0;
        sample_index(tr, index)?;
        let row = &tr.site_negativities[index];
        let v = *row.get(site).ok_or_else(|| {
            set_error(format!("site {site} out of range for {} sites", row.len()));
            NbStatus::OutOfRange
        })?;
        put(out, v)
    })
}

fn sample_index(tr: &Trajectory, index: usize) -> Result<(), NbStatus> {
    if index < tr.len() {
        Ok(())
    } else {
        set_error(format!("sample {index} out of range for {} samples", tr.len()));
        Err(NbStatus::OutOfRange)
    }
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nb_trajectory_free(traj: *mut NbTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
