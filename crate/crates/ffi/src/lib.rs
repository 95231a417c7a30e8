//! C ABI for the pairing-optimization library.
//!
//! Matrices and pairings are opaque handles created and destroyed through
//! this interface; every entry point returns a [`PoStatus`] and writes its
//! result through out-pointers. Element indices are 1-based, matching the
//! library convention. The header `include/pairopt.h` is generated from
//! this file at build time.
//!
//! Ownership: any handle returned through a `*mut *mut` out-pointer belongs
//! to the caller and must be released with the matching `_free` function.
//! Passing null where a non-null pointer is expected yields
//! `NullArgument`; no entry point panics.

use std::ffi::{c_char, CStr};
use std::path::PathBuf;

use pairopt::equivalence;
use pairopt::exact;
use pairopt::harness::{self, Distribution};
use pairopt::heuristics::{self, CombineConfig};
use pairopt::observe;
use pairopt::{CompatibilityMatrix, PairError, Pairing};

/// Opaque handle to a compatibility matrix.
pub struct PoMatrix {
    inner: CompatibilityMatrix,
}

/// Opaque handle to a pairing (perfect matching).
pub struct PoPairing {
    inner: Pairing,
}

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    OddElementCount = 3,
    TooSmall = 4,
    TooLarge = 5,
    NotSymmetric = 6,
    NonZeroDiagonal = 7,
    NonFinite = 8,
    DimensionMismatch = 9,
    IndexOutOfRange = 10,
    InvalidPairing = 11,
    ParseError = 12,
    IoError = 13,
    Utf8Error = 14,
}

impl From<&PairError> for PoStatus {
    fn from(e: &PairError) -> Self {
        match e {
            PairError::OddN { .. } => PoStatus::OddElementCount,
            PairError::TooSmall { .. } => PoStatus::TooSmall,
            PairError::TooLarge { .. } => PoStatus::TooLarge,
            PairError::NotSymmetric { .. } => PoStatus::NotSymmetric,
            PairError::NonZeroDiagonal { .. } => PoStatus::NonZeroDiagonal,
            PairError::NonFinite { .. } => PoStatus::NonFinite,
            PairError::DimensionMismatch { .. } => PoStatus::DimensionMismatch,
            PairError::IndexOutOfRange { .. } => PoStatus::IndexOutOfRange,
            PairError::InvalidPairing { .. } => PoStatus::InvalidPairing,
            PairError::UnknownDistribution { .. } => PoStatus::InvalidArgument,
            PairError::Parse { .. } => PoStatus::ParseError,
            PairError::Io(_) => PoStatus::IoError,
        }
    }
}

/// Matrix statistics, mirrored as a plain C struct.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PoStats {
    pub mu_element: f64,
    pub mu_sum: f64,
    pub sigma2_element: f64,
    pub sigma2_sum: f64,
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn po_status_message(status: PoStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        PoStatus::Ok => b"ok\0",
        PoStatus::NullArgument => b"null argument\0",
        PoStatus::InvalidArgument => b"invalid argument\0",
        PoStatus::OddElementCount => b"element count must be even\0",
        PoStatus::TooSmall => b"element count too small\0",
        PoStatus::TooLarge => b"element count exceeds exhaustive-search cap\0",
        PoStatus::NotSymmetric => b"matrix is not symmetric\0",
        PoStatus::NonZeroDiagonal => b"matrix diagonal must be zero\0",
        PoStatus::NonFinite => b"matrix entry is not finite\0",
        PoStatus::DimensionMismatch => b"dimension mismatch\0",
        PoStatus::IndexOutOfRange => b"element index out of range\0",
        PoStatus::InvalidPairing => b"invalid pairing\0",
        PoStatus::ParseError => b"parse error\0",
        PoStatus::IoError => b"i/o error\0",
        PoStatus::Utf8Error => b"invalid utf-8 in string argument\0",
    };
    msg.as_ptr().cast()
}

fn path_from(ptr: *const c_char) -> Result<PathBuf, PoStatus> {
    if ptr.is_null() {
        return Err(PoStatus::NullArgument);
    }
    let s = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| PoStatus::Utf8Error)?;
    Ok(PathBuf::from(s))
}

fn emit_matrix(matrix: CompatibilityMatrix, out: *mut *mut PoMatrix) -> PoStatus {
    if out.is_null() {
        return PoStatus::NullArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(PoMatrix { inner: matrix })) };
    PoStatus::Ok
}

fn emit_pairing(pairing: Pairing, out: *mut *mut PoPairing) -> PoStatus {
    if out.is_null() {
        return PoStatus::NullArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(PoPairing { inner: pairing })) };
    PoStatus::Ok
}

macro_rules! deref_or {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => return PoStatus::NullArgument,
        }
    };
}

macro_rules! write_out {
    ($ptr:expr, $value:expr) => {
        if $ptr.is_null() {
            return PoStatus::NullArgument;
        } else {
            unsafe { *$ptr = $value };
        }
    };
}

/// Generates a seeded random matrix. `dist` is one of "uniform01",
/// "poisson1", "gaussian", "binary", "constant".
///
/// # Safety
/// `dist` must be a valid NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_generate(
    n: usize,
    dist: *const c_char,
    seed: u64,
    out: *mut *mut PoMatrix,
) -> PoStatus {
    if dist.is_null() {
        return PoStatus::NullArgument;
    }
    let Ok(tag) = unsafe { CStr::from_ptr(dist) }.to_str() else {
        return PoStatus::Utf8Error;
    };
    let Ok(distribution) = tag.parse::<Distribution>() else {
        return PoStatus::InvalidArgument;
    };
    match harness::generate(n, distribution, seed) {
        Ok(m) => emit_matrix(m, out),
        Err(e) => (&e).into(),
    }
}

/// Builds a matrix from a dense row-major `n x n` array, validating
/// symmetry and a zero diagonal.
///
/// # Safety
/// `values` must point to `n * n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_from_dense(
    n: usize,
    values: *const f64,
    out: *mut *mut PoMatrix,
) -> PoStatus {
    if values.is_null() {
        return PoStatus::NullArgument;
    }
    if n == 0 {
        return PoStatus::TooSmall;
    }
    let flat = unsafe { std::slice::from_raw_parts(values, n * n) };
    let rows: Vec<Vec<f64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
    match CompatibilityMatrix::from_rows(&rows) {
        Ok(m) => emit_matrix(m, out),
        Err(e) => (&e).into(),
    }
}

/// Reads a matrix file in the text format.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_read(path: *const c_char, out: *mut *mut PoMatrix) -> PoStatus {
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match CompatibilityMatrix::read_from_path(path) {
        Ok(m) => emit_matrix(m, out),
        Err(e) => (&e).into(),
    }
}

/// Writes a matrix file in the text format.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_write(matrix: *const PoMatrix, path: *const c_char) -> PoStatus {
    let m = deref_or!(matrix);
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match m.inner.write_to_path(path) {
        Ok(()) => PoStatus::Ok,
        Err(e) => (&e).into(),
    }
}

/// Releases a matrix handle. Null is a no-op.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_free(matrix: *mut PoMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Element count, or 0 for null.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_n(matrix: *const PoMatrix) -> usize {
    unsafe { matrix.as_ref() }.map_or(0, |m| m.inner.n())
}

/// Entry at 1-based `(i, j)`.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_get(
    matrix: *const PoMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> PoStatus {
    let m = deref_or!(matrix);
    let n = m.inner.n();
    if i == 0 || i > n || j == 0 || j > n {
        return PoStatus::IndexOutOfRange;
    }
    write_out!(out, m.inner.get(i, j));
    PoStatus::Ok
}

/// Row sum for 1-based element `i`.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_adjacent_sum(
    matrix: *const PoMatrix,
    i: usize,
    out: *mut f64,
) -> PoStatus {
    let m = deref_or!(matrix);
    match m.inner.adjacent_sum(i) {
        Ok(v) => {
            write_out!(out, v);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// All four matrix statistics.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_matrix_stats(matrix: *const PoMatrix, out: *mut PoStats) -> PoStatus {
    let m = deref_or!(matrix);
    let s = m.inner.stats();
    write_out!(
        out,
        PoStats {
            mu_element: s.mu_element,
            mu_sum: s.mu_sum,
            sigma2_element: s.sigma2_element,
            sigma2_sum: s.sigma2_sum,
        }
    );
    PoStatus::Ok
}

/// The zero-first-row observation representative of the matrix's class.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_observe_transform(
    matrix: *const PoMatrix,
    out: *mut *mut PoMatrix,
) -> PoStatus {
    let m = deref_or!(matrix);
    emit_matrix(observe::observe_transform(&m.inner), out)
}

/// The minimum-element-variance member of the matrix's class.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_variance_optimize(
    matrix: *const PoMatrix,
    out: *mut *mut PoMatrix,
) -> PoStatus {
    let m = deref_or!(matrix);
    emit_matrix(equivalence::variance_optimize(&m.inner), out)
}

/// Whether two matrices yield identical totals for every pairing, decided
/// by the conserved class invariant. Writes 1 for equivalent, 0 otherwise.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_equivalent(
    a: *const PoMatrix,
    b: *const PoMatrix,
    tol: f64,
    out: *mut i32,
) -> PoStatus {
    let a = deref_or!(a);
    let b = deref_or!(b);
    match equivalence::equivalent(&a.inner, &b.inner, tol) {
        Ok(eq) => {
            write_out!(out, eq as i32);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Minimum number of total-compatibility observations identifying a class:
/// `(n-1)(n-2)/2`.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_min_observations(n: usize, out: *mut u64) -> PoStatus {
    match observe::min_observations(n) {
        Ok(v) => {
            write_out!(out, v);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Number of distinct pairings of `n` elements: `(n-1)!!`.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_count(n: usize, out: *mut u64) -> PoStatus {
    match exact::pairing_count(n) {
        Ok(v) => {
            write_out!(out, v);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Runs the PNN+P2-opt combining pipeline.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_combine(
    matrix: *const PoMatrix,
    exchange_limit: usize,
    seed: u64,
    maximize: i32,
    out: *mut *mut PoPairing,
) -> PoStatus {
    let m = deref_or!(matrix);
    if exchange_limit == 0 {
        return PoStatus::InvalidArgument;
    }
    let config = CombineConfig {
        exchange_limit,
        rng_seed: seed,
        maximize: maximize != 0,
    };
    emit_pairing(heuristics::combine(&m.inner, &config), out)
}

/// Exact optimum by exhaustion (n <= 14). Writes the optimal pairing and
/// its total.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_brute_force_optimum(
    matrix: *const PoMatrix,
    out_pairing: *mut *mut PoPairing,
    out_total: *mut f64,
) -> PoStatus {
    let m = deref_or!(matrix);
    match exact::brute_force_optimum(&m.inner) {
        Ok((p, total)) => {
            write_out!(out_total, total);
            emit_pairing(p, out_pairing)
        }
        Err(e) => (&e).into(),
    }
}

/// Releases a pairing handle. Null is a no-op.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_free(pairing: *mut PoPairing) {
    if !pairing.is_null() {
        drop(unsafe { Box::from_raw(pairing) });
    }
}

/// Element count of a pairing, or 0 for null.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_n(pairing: *const PoPairing) -> usize {
    unsafe { pairing.as_ref() }.map_or(0, |p| p.inner.n())
}

/// Partner of 1-based element `i`.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_partner(
    pairing: *const PoPairing,
    i: usize,
    out: *mut usize,
) -> PoStatus {
    let p = deref_or!(pairing);
    match p.inner.partner_of(i) {
        Ok(v) => {
            write_out!(out, v);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Total compatibility of a pairing under a matrix.
///
/// # Safety
/// Handle arguments must be live handles from this API (or null); out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_total(
    pairing: *const PoPairing,
    matrix: *const PoMatrix,
    out: *mut f64,
) -> PoStatus {
    let p = deref_or!(pairing);
    let m = deref_or!(matrix);
    match p.inner.total_compatibility(&m.inner) {
        Ok(v) => {
            write_out!(out, v);
            PoStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Writes a pairing as one `i-j` line per pair.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_write(
    pairing: *const PoPairing,
    path: *const c_char,
) -> PoStatus {
    let p = deref_or!(pairing);
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match p.inner.write_to_path(path) {
        Ok(()) => PoStatus::Ok,
        Err(e) => (&e).into(),
    }
}

/// Reads a pairing from the `i-j` line format.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn po_pairing_read(
    path: *const c_char,
    out: *mut *mut PoPairing,
) -> PoStatus {
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match Pairing::read_from_path(path) {
        Ok(p) => emit_pairing(p, out),
        Err(e) => (&e).into(),
    }
}
