//! C ABI for the supercavity library.
//!
//! Every function returns an [`ScStatus`]; results come back through out
//! pointers. A system is an opaque handle created by `sc_system_new` and
//! released by `sc_system_free`. After a non-OK status the message of the
//! failure is available on the calling thread through `sc_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use supercavity::boundstates::find_edge_bound_states;
use supercavity::model::{dressed_energies, AtomPair, IdenticalAtoms, Parity, WaveguideParams};
use supercavity::resonance::{resonant_state, Expansion};
use supercavity::scattering::solve_scattering;
use supercavity::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutOfBand = 3,
    WaveNumberOutOfRange = 4,
    SingularSystem = 5,
    NoConvergence = 6,
    ModeIndexOutOfRange = 7,
    ZeroDetuning = 8,
    ZeroCoupling = 9,
    SingularMatching = 10,
    WrongMode = 11,
    InconsistentAmplitudes = 12,
    NotIdentical = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScParity {
    Odd = 0,
    Even = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScExpansion {
    Corrected = 0,
    Printed = 1,
    PatternConsistent = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScComplex {
    pub re: f64,
    pub im: f64,
}

/// Scattering amplitudes at one real wave number.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScScattering {
    pub r: ScComplex,
    pub a: ScComplex,
    pub b: ScComplex,
    pub t: ScComplex,
    pub transmission: f64,
    pub reflection: f64,
    /// Nonzero when the point was flagged as a band edge or resonant atom.
    pub flagged: i32,
}

/// One out-of-band edge bound state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScEdgeState {
    pub kappa: f64,
    pub n_edge: i64,
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    /// Nonzero for the `kappa = 0` solution, whose field vanishes.
    pub degenerate: i32,
}

/// Opaque waveguide plus atom pair.
pub struct ScSystem {
    wg: WaveguideParams,
    atoms: AtomPair,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::InvalidParameter { .. } => ScStatus::InvalidParameter,
        Error::OutOfBand { .. } => ScStatus::OutOfBand,
        Error::WaveNumberOutOfRange { .. } => ScStatus::WaveNumberOutOfRange,
        Error::SingularSystem { .. } => ScStatus::SingularSystem,
        Error::NoConvergence { .. } => ScStatus::NoConvergence,
        Error::ModeIndexOutOfRange { .. } => ScStatus::ModeIndexOutOfRange,
        Error::ZeroDetuning { .. } => ScStatus::ZeroDetuning,
        Error::ZeroCoupling { .. } => ScStatus::ZeroCoupling,
        Error::SingularMatching { .. } => ScStatus::SingularMatching,
        Error::WrongMode { .. } => ScStatus::WrongMode,
        Error::InconsistentAmplitudes { .. } => ScStatus::InconsistentAmplitudes,
    }
}

struct Failure(ScStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ScStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ScStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            ScStatus::Panic
        }
    }
}

fn c(z: num_complex::Complex64) -> ScComplex {
    ScComplex { re: z.re, im: z.im }
}

unsafe fn system<'a>(sys: *const ScSystem) -> Result<&'a ScSystem, Failure> {
    // SAFETY: the caller passes a handle from `sc_system_new` or null.
    unsafe { sys.as_ref() }.ok_or_else(|| null("system"))
}

fn identical(sys: &ScSystem) -> Result<IdenticalAtoms, Failure> {
    sys.atoms.as_identical().ok_or_else(|| {
        Failure(
            ScStatus::NotIdentical,
            "resonances and edge states need identical atoms".into(),
        )
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length, or 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: `buf` has `len > n` writable bytes.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Creates a system handle. Free it with `sc_system_free`.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_system_new(
    omega: f64,
    xi: f64,
    omega1: f64,
    omega2: f64,
    j1: f64,
    j2: f64,
    d: usize,
    out: *mut *mut ScSystem,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let wg = WaveguideParams::new(omega, xi)?;
        let atoms = AtomPair::new(omega1, omega2, j1, j2, d)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(ScSystem { wg, atoms })) };
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sys` must be null or a handle from `sc_system_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_system_free(sys: *mut ScSystem) {
    if !sys.is_null() {
        // SAFETY: ownership returns from `Box::into_raw` in `sc_system_new`.
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// Scattering amplitudes at real wave number `k`.
///
/// # Safety
/// `sys` must be a live handle and `out` writable, or null.
#[no_mangle]
pub unsafe extern "C" fn sc_scatter(sys: *const ScSystem, k: f64, out: *mut ScScattering) -> ScStatus {
    guard(|| {
        let sys = unsafe { system(sys) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = solve_scattering(k, &sys.wg, &sys.atoms)?;
        let result = ScScattering {
            r: c(s.r),
            a: c(s.a),
            b: c(s.b),
            t: c(s.t),
            transmission: s.transmission(),
            reflection: s.reflection(),
            flagged: i32::from(s.flags.any()),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = result };
        Ok(())
    })
}

/// Transmission `|t|^2` at each of the `n` wave numbers in `ks`.
///
/// # Safety
/// `ks` must hold `n` readable values and `transmission` `n` writable ones.
#[no_mangle]
pub unsafe extern "C" fn sc_spectrum(
    sys: *const ScSystem,
    ks: *const f64,
    n: usize,
    transmission: *mut f64,
) -> ScStatus {
    guard(|| {
        let sys = unsafe { system(sys) }?;
        if n == 0 {
            return Ok(());
        }
        if ks.is_null() {
            return Err(null("ks"));
        }
        if transmission.is_null() {
            return Err(null("transmission"));
        }
        // SAFETY: the caller guarantees `n` elements behind each pointer.
        let (ks, out) = unsafe {
            (
                std::slice::from_raw_parts(ks, n),
                std::slice::from_raw_parts_mut(transmission, n),
            )
        };
        for (k, t) in ks.iter().zip(out.iter_mut()) {
            *t = solve_scattering(*k, &sys.wg, &sys.atoms)?.transmission();
        }
        Ok(())
    })
}

/// Complex wave number of the quasi-bound state `(n, parity)`; the
/// expansion used as the Newton seed goes to `k_pert` when non-null.
///
/// # Safety
/// `sys` must be a live handle; `k` writable; `k_pert` writable or null.
#[no_mangle]
pub unsafe extern "C" fn sc_resonance(
    sys: *const ScSystem,
    n: i64,
    parity: ScParity,
    expansion: ScExpansion,
    k: *mut ScComplex,
    k_pert: *mut ScComplex,
) -> ScStatus {
    guard(|| {
        let sys = unsafe { system(sys) }?;
        if k.is_null() {
            return Err(null("k"));
        }
        let atoms = identical(sys)?;
        let parity = match parity {
            ScParity::Odd => Parity::Odd,
            ScParity::Even => Parity::Even,
        };
        let expansion = match expansion {
            ScExpansion::Corrected => Expansion::Corrected,
            ScExpansion::Printed => Expansion::Printed,
            ScExpansion::PatternConsistent => Expansion::PatternConsistent,
        };
        let st = resonant_state(n, parity, &sys.wg, &atoms, expansion)?;
        // SAFETY: `k` checked non-null; `k_pert` written only when non-null.
        unsafe {
            *k = c(st.k);
            if let Some(p) = k_pert.as_mut() {
                *p = c(st.k_perturbative);
            }
        }
        Ok(())
    })
}

/// Edge bound states, the two `kappa = 0` solutions first. `count` receives
/// the number found; if it exceeds `capacity` nothing is written to `states`
/// and `SC_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `states` must hold `capacity` writable entries (or be null with capacity
/// 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_edge_states(
    sys: *const ScSystem,
    states: *mut ScEdgeState,
    capacity: usize,
    count: *mut usize,
) -> ScStatus {
    guard(|| {
        let sys = unsafe { system(sys) }?;
        if count.is_null() {
            return Err(null("count"));
        }
        let atoms = identical(sys)?;
        let found = find_edge_bound_states(&sys.wg, &atoms)?;
        // SAFETY: checked non-null above.
        unsafe { *count = found.len() };
        if found.len() > capacity {
            return Err(Failure(
                ScStatus::BufferTooSmall,
                format!("{} states found, capacity {capacity}", found.len()),
            ));
        }
        if states.is_null() && !found.is_empty() {
            return Err(null("states"));
        }
        for (i, s) in found.iter().enumerate() {
            let entry = ScEdgeState {
                kappa: s.kappa,
                n_edge: s.n_edge,
                energy: s.energy,
                a: s.a,
                b: s.b,
                degenerate: i32::from(s.degenerate),
            };
            // SAFETY: `i < found.len() <= capacity`.
            unsafe { *states.add(i) = entry };
        }
        Ok(())
    })
}

/// Eigenvalues of `[[omega, J], [J, Omega]]`.
///
/// # Safety
/// `eps_plus` and `eps_minus` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_dressed_energies(
    omega: f64,
    big_omega: f64,
    j: f64,
    eps_plus: *mut f64,
    eps_minus: *mut f64,
) -> ScStatus {
    guard(|| {
        if eps_plus.is_null() || eps_minus.is_null() {
            return Err(null("eps_plus/eps_minus"));
        }
        let p = dressed_energies(omega, big_omega, j);
        // SAFETY: both checked non-null above.
        unsafe {
            *eps_plus = p.eps_plus;
            *eps_minus = p.eps_minus;
        }
        Ok(())
    })
}
