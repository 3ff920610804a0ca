//! C ABI for building cable blocks, running the oracles and the VQE.
//!
//! Every fallible function returns a [`CvStatus`]. On failure a message is
//! kept per thread and can be read with [`cv_last_error_message`]. Handles
//! are opaque and owned by the caller until passed to the matching
//! `*_free` function. Bitstrings cross the boundary as one byte per
//! variable (0 or 1).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cablevqe::bits::Bitstring;
use cablevqe::error::Error;
use cablevqe::instance::{bundled_layout, parse_instance, Instance};
use cablevqe::oracle::brute_force_min;
use cablevqe::qubo::{build_cable_qubo, default_penalties, scale_penalties, CableQubo, ExportDocument};
use cablevqe::vqe::{solve_decomposed, vqe_solve, GlobalAssignment, SolveResult, ThetaInit, VqeConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NotFound = 5,
    InvalidArgument = 6,
    DimensionOverCap = 7,
    BufferSize = 8,
    Io = 9,
    Panic = 10,
}

/// A parsed and validated routing instance.
pub struct CvInstance(Instance);

/// One cable's QUBO block.
pub struct CvQubo(CableQubo);

/// Outcome of one VQE solve.
pub struct CvSolveResult(SolveResult);

/// Outcome of a decomposed solve over all cables.
pub struct CvAssignment {
    total: GlobalAssignment,
    results: Vec<CvSolveResult>,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CvVqeConfig {
    /// Shots per evaluation; 0 uses exact probabilities.
    pub shots: u64,
    pub reps: usize,
    /// Objective-evaluation budget, at least 1.
    pub maxiter: usize,
    pub seed: u64,
    pub ftol: f64,
    /// Start from all-zero angles instead of random ones.
    pub zero_init: bool,
}

impl From<CvVqeConfig> for VqeConfig {
    fn from(c: CvVqeConfig) -> Self {
        VqeConfig {
            shots: c.shots,
            reps: c.reps,
            maxiter: c.maxiter,
            seed: c.seed,
            ftol: c.ftol,
            theta_init: if c.zero_init {
                ThetaInit::Zeros
            } else {
                ThetaInit::Random
            },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(CvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) | Error::Schema(_) => CvStatus::Parse,
            Error::Validation { .. } => CvStatus::Validation,
            Error::UnknownNode(_) | Error::UnknownCable(_) => CvStatus::NotFound,
            Error::LengthMismatch { .. } => CvStatus::BufferSize,
            Error::DimensionOverCap { .. } => CvStatus::DimensionOverCap,
            Error::Io(_) => CvStatus::Io,
            _ => CvStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: CvStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CvStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CvStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(CvStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(CvStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(CvStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CvStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn bits_from(bytes: &[u8]) -> Result<Bitstring, Failure> {
    bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(fail(CvStatus::InvalidArgument, format!("bit value {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Bitstring::from_bits)
}

fn write_bits(z: &Bitstring, out: *mut u8, len: usize) -> Result<(), Failure> {
    if len != z.len() {
        return Err(fail(
            CvStatus::BufferSize,
            format!("buffer holds {len} bits, need {}", z.len()),
        ));
    }
    if out.is_null() {
        return Err(fail(CvStatus::NullPointer, "bit buffer is null"));
    }
    // SAFETY: the caller provides `len` writable bytes.
    let buf = unsafe { std::slice::from_raw_parts_mut(out, len) };
    for (dst, &b) in buf.iter_mut().zip(z.bits()) {
        *dst = u8::from(b);
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an instance from a NUL-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv_instance_from_json(json: *const c_char, out: *mut *mut CvInstance) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inst = parse_instance(text(json, "json")?)?;
        *out = Box::into_raw(Box::new(CvInstance(inst)));
        Ok(())
    })
}

/// Loads a bundled layout by name (`layout-1`, `layout-2`).
///
/// # Safety
/// `name` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv_instance_bundled(name: *const c_char, out: *mut *mut CvInstance) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let name = text(name, "name")?;
        let inst = bundled_layout(name)
            .ok_or_else(|| fail(CvStatus::NotFound, format!("unknown bundled layout '{name}'")))?;
        *out = Box::into_raw(Box::new(CvInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_instance_free(inst: *mut CvInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Counts of nodes, segments and cables, and the per-cable block size.
///
/// # Safety
/// `inst` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv_instance_counts(
    inst: *const CvInstance,
    nodes: *mut usize,
    segments: *mut usize,
    cables: *mut usize,
    block_dim: *mut usize,
) -> CvStatus {
    guard(|| {
        let i = &borrow(inst, "instance")?.0;
        for (p, v) in [
            (nodes, i.nodes().len()),
            (segments, i.segments().len()),
            (cables, i.cables().len()),
            (block_dim, i.block_dim()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Builds the block of `cable_id` with baseline weights scaled by `kappa`.
///
/// # Safety
/// `inst` must be a live handle, `cable_id` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_build(
    inst: *const CvInstance,
    cable_id: *const c_char,
    kappa: f64,
    out: *mut *mut CvQubo,
) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let i = &borrow(inst, "instance")?.0;
        let cable = i.cable(text(cable_id, "cable_id")?)?;
        let p = scale_penalties(&default_penalties(i, cable), kappa)?;
        *out = Box::into_raw(Box::new(CvQubo(build_cable_qubo(i, cable, &p)?)));
        Ok(())
    })
}

/// # Safety
/// `q` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_free(q: *mut CvQubo) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// `q` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_dim(q: *const CvQubo, out: *mut usize) -> CvStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(q, "qubo")?.0.dim();
        Ok(())
    })
}

/// # Safety
/// `q` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_offset(q: *const CvQubo, out: *mut f64) -> CvStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(q, "qubo")?.0.offset;
        Ok(())
    })
}

/// Writes `eta1..eta4` into `out[0..4]`.
///
/// # Safety
/// `q` must be a live handle; `out` must hold four doubles.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_penalties(q: *const CvQubo, out: *mut f64) -> CvStatus {
    guard(|| {
        let etas = borrow(q, "qubo")?.0.penalties.etas();
        if out.is_null() {
            return Err(fail(CvStatus::NullPointer, "out is null"));
        }
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&etas);
        Ok(())
    })
}

/// Copies the row-major matrix; `len` must equal `dim * dim`.
///
/// # Safety
/// `q` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_matrix(q: *const CvQubo, out: *mut f64, len: usize) -> CvStatus {
    guard(|| {
        let m = borrow(q, "qubo")?.0.matrix();
        if len != m.len() {
            return Err(fail(
                CvStatus::BufferSize,
                format!("buffer holds {len} entries, need {}", m.len()),
            ));
        }
        if out.is_null() {
            return Err(fail(CvStatus::NullPointer, "out is null"));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(m);
        Ok(())
    })
}

/// Energy `zᵀQz + offset` of a bitstring of `len` bytes.
///
/// # Safety
/// `q` must be a live handle; `bits` must hold `len` bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_energy(q: *const CvQubo, bits: *const u8, len: usize, out: *mut f64) -> CvStatus {
    guard(|| {
        let q = &borrow(q, "qubo")?.0;
        let out = out_ptr(out, "out")?;
        if bits.is_null() {
            return Err(fail(CvStatus::NullPointer, "bits is null"));
        }
        let z = bits_from(std::slice::from_raw_parts(bits, len))?;
        *out = q.energy(&z)?;
        Ok(())
    })
}

/// Export document as JSON; release it with [`cv_string_free`].
///
/// # Safety
/// `q` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_export_json(q: *const CvQubo, ising: bool, out: *mut *mut c_char) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let q = &borrow(q, "qubo")?.0;
        let doc = if ising {
            ExportDocument::ising(q)
        } else {
            ExportDocument::qubo(q)
        };
        let s = CString::new(doc.to_json()).map_err(|e| fail(CvStatus::Panic, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exhaustive block minimum; writes the argmin into `bits` (`len = dim`).
///
/// # Safety
/// `q` must be a live handle; `bits` must hold `len` bytes; `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_qubo_brute_force(q: *const CvQubo, bits: *mut u8, len: usize, energy: *mut f64) -> CvStatus {
    guard(|| {
        let q = &borrow(q, "qubo")?.0;
        let energy = out_ptr(energy, "energy")?;
        let best = brute_force_min(q)?;
        write_bits(&best.bitstring, bits, len)?;
        *energy = best.energy;
        Ok(())
    })
}

/// Default solver settings: 1000 shots, one layer, 100 evaluations.
#[no_mangle]
pub extern "C" fn cv_vqe_config_default() -> CvVqeConfig {
    let d = VqeConfig::default();
    CvVqeConfig {
        shots: d.shots,
        reps: d.reps,
        maxiter: d.maxiter,
        seed: d.seed,
        ftol: d.ftol,
        zero_init: d.theta_init == ThetaInit::Zeros,
    }
}

/// # Safety
/// `q` and `config` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_vqe_solve(
    q: *const CvQubo,
    config: *const CvVqeConfig,
    out: *mut *mut CvSolveResult,
) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let q = &borrow(q, "qubo")?.0;
        let config = VqeConfig::from(*borrow(config, "config")?);
        *out = Box::into_raw(Box::new(CvSolveResult(vqe_solve(q, &config)?)));
        Ok(())
    })
}

/// # Safety
/// `r` must come from [`cv_vqe_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_solve_result_free(r: *mut CvSolveResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Energy, feasibility and evaluation count of a result. `objective` is
/// written only when the result is a feasible path.
///
/// # Safety
/// `r` must be a live result; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv_solve_result_summary(
    r: *const CvSolveResult,
    energy: *mut f64,
    feasible: *mut bool,
    objective: *mut f64,
    evaluations: *mut usize,
) -> CvStatus {
    guard(|| {
        let r = &borrow(r, "result")?.0;
        if let Some(p) = energy.as_mut() {
            *p = r.energy;
        }
        if let Some(p) = feasible.as_mut() {
            *p = r.feasible();
        }
        if let (Some(p), Some(o)) = (objective.as_mut(), r.objective) {
            *p = o;
        }
        if let Some(p) = evaluations.as_mut() {
            *p = r.evaluations_used;
        }
        Ok(())
    })
}

/// Copies the returned bitstring; `len` must equal the block dimension.
///
/// # Safety
/// `r` must be a live result; `bits` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cv_solve_result_bits(r: *const CvSolveResult, bits: *mut u8, len: usize) -> CvStatus {
    guard(|| write_bits(&borrow(r, "result")?.0.bitstring, bits, len))
}

/// Solves every cable of `inst` with per-cable derived seeds.
///
/// # Safety
/// `inst` and `config` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_solve_decomposed(
    inst: *const CvInstance,
    kappa: f64,
    config: *const CvVqeConfig,
    out: *mut *mut CvAssignment,
) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let i = &borrow(inst, "instance")?.0;
        let config = VqeConfig::from(*borrow(config, "config")?);
        let total = solve_decomposed(i, kappa, &config)?;
        let results = total.results.iter().cloned().map(CvSolveResult).collect();
        *out = Box::into_raw(Box::new(CvAssignment { total, results }));
        Ok(())
    })
}

/// # Safety
/// `a` must come from [`cv_solve_decomposed`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_assignment_free(a: *mut CvAssignment) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live assignment; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv_assignment_summary(
    a: *const CvAssignment,
    cables: *mut usize,
    total_energy: *mut f64,
    all_feasible: *mut bool,
) -> CvStatus {
    guard(|| {
        let a = &borrow(a, "assignment")?.total;
        if let Some(p) = cables.as_mut() {
            *p = a.results.len();
        }
        if let Some(p) = total_energy.as_mut() {
            *p = a.total_energy;
        }
        if let Some(p) = all_feasible.as_mut() {
            *p = a.all_feasible;
        }
        Ok(())
    })
}

/// Borrowed view of the result for cable number `index`, valid while the
/// assignment lives; do not free it.
///
/// # Safety
/// `a` must be a live assignment; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cv_assignment_result(
    a: *const CvAssignment,
    index: usize,
    out: *mut *const CvSolveResult,
) -> CvStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let a = borrow(a, "assignment")?;
        let r = a.results.get(index).ok_or_else(|| {
            fail(
                CvStatus::NotFound,
                format!("cable index {index} out of {}", a.results.len()),
            )
        })?;
        *out = ptr::from_ref(r);
        Ok(())
    })
}
