//! C ABI over `isc-core`.
//!
//! Every fallible call returns an [`IscStatus`]. On failure the message is
//! kept per thread and read back with [`isc_last_error`]. Strings handed out
//! by the library are released with [`isc_string_free`], complexes with
//! [`isc_complex_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use isc_core::analysis::{
    is_pure, pseudomanifold, reconstruction_injective, strongly_connected, FacetGraph,
};
use isc_core::enumeration::count_facets;
use isc_core::{Complex, Error, Limits, ProcessSet, RoundCounter, StructureClass, WitnessPrestructure};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    LimitExceeded = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Classification of a pair sequence, strictest first satisfied.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IscClass {
    Invalid = 0,
    Prestructure = 1,
    StablePrestructure = 2,
    WitnessStructure = 3,
}

/// Properties decidable by [`isc_complex_check`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IscProperty {
    Pure = 0,
    StronglyConnected = 1,
    Pseudomanifold = 2,
    EulerOne = 3,
    ReconstructionInjective = 4,
}

/// Opaque handle to a built complex.
pub struct IscComplex {
    inner: Complex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(IscStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::Json(_) => IscStatus::Parse,
            Error::LimitExceeded { .. } => IscStatus::LimitExceeded,
            _ => IscStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IscStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IscStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IscStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IscStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(IscStatus::InvalidUtf8, e.to_string()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(IscStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn complex<'a>(c: *const IscComplex) -> Result<&'a Complex, Failure> {
    c.as_ref()
        .map(|c| &c.inner)
        .ok_or_else(|| Failure(IscStatus::NullPointer, "null complex handle".into()))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(IscStatus::InvalidArgument, e.to_string()))
}

fn parse_counter(text: &str) -> Result<RoundCounter, Failure> {
    let counter = RoundCounter::parse(text)?;
    if counter.budgets().is_empty() {
        return Err(Error::EmptySupport.into());
    }
    Ok(counter)
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn isc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `P(counter)`. `counter` is `"2,1,1"`, a JSON list or a JSON object
/// `{"pid": budget}`. Zero caps mean no cap.
///
/// # Safety
/// `counter` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_build(
    counter: *const c_char,
    max_cardinality: u64,
    max_processes: u32,
    out: *mut *mut IscComplex,
) -> IscStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(IscStatus::NullPointer, "null output pointer".into()));
        }
        let counter = parse_counter(read_str(counter)?)?;
        let unbounded = Limits::unbounded();
        let limits = Limits {
            max_cardinality: if max_cardinality == 0 { unbounded.max_cardinality } else { max_cardinality },
            max_processes: if max_processes == 0 { unbounded.max_processes } else { max_processes as usize },
        };
        let inner = Complex::build_with(&counter, &limits)?;
        write_out(out, Box::into_raw(Box::new(IscComplex { inner })))
    })
}

/// Releases a complex. Null is ignored.
///
/// # Safety
/// `c` must come from [`isc_complex_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_free(c: *mut IscComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Dimension of the complex (−1 if only the empty simplex).
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_dimension(c: *const IscComplex, out: *mut i64) -> IscStatus {
    guard(|| write_out(out, complex(c)?.dimension()))
}

/// Number of simplices, the empty simplex included.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_len(c: *const IscComplex, out: *mut u64) -> IscStatus {
    guard(|| write_out(out, complex(c)?.len() as u64))
}

/// Writes `f_{-1}, f_0, …, f_d` into `buf`. `len` receives the number of
/// entries needed; [`IscStatus::BufferTooSmall`] is returned if `cap` is short.
///
/// # Safety
/// `c` must be a live handle, `len` writable and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_f_vector(
    c: *const IscComplex,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> IscStatus {
    guard(|| {
        let f = complex(c)?.f_vector();
        let values: Vec<u64> = std::iter::once(f.empty).chain(f.counts).collect();
        write_out(len, values.len())?;
        if cap < values.len() {
            return Err(Failure(
                IscStatus::BufferTooSmall,
                format!("f-vector needs {} entries, got {cap}", values.len()),
            ));
        }
        if buf.is_null() {
            return Err(Failure(IscStatus::NullPointer, "null buffer".into()));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Euler characteristic `Σ_{d≥0} (−1)^d f_d`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_euler(c: *const IscComplex, out: *mut i64) -> IscStatus {
    guard(|| write_out(out, complex(c)?.euler_characteristic()))
}

/// JSON export; free the result with [`isc_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_to_json(c: *const IscComplex, out: *mut *mut c_char) -> IscStatus {
    guard(|| {
        let json = complex(c)?.to_json()?;
        write_out(out, into_c_string(json)?)
    })
}

/// Graphviz facet adjacency graph; free the result with [`isc_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_to_dot(c: *const IscComplex, out: *mut *mut c_char) -> IscStatus {
    guard(|| {
        let c = complex(c)?;
        let dot = FacetGraph::new(c).to_dot(&format!("P{}", c.counter()));
        write_out(out, into_c_string(dot)?)
    })
}

/// Decides `property` on the complex.
///
/// # Safety
/// `c` must be a live handle and `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_complex_check(
    c: *const IscComplex,
    property: IscProperty,
    holds: *mut bool,
) -> IscStatus {
    guard(|| {
        let c = complex(c)?;
        let value = match property {
            IscProperty::Pure => is_pure(c),
            IscProperty::StronglyConnected => strongly_connected(c),
            IscProperty::Pseudomanifold => {
                let report = pseudomanifold(c);
                report.is_pseudomanifold && report.boundary_matches
            }
            IscProperty::EulerOne => c.euler_characteristic() == 1,
            IscProperty::ReconstructionInjective => reconstruction_injective(c),
        };
        write_out(holds, value)
    })
}

/// Facet count of `P(counter)` as a decimal string, computed without
/// building the complex. Free the result with [`isc_string_free`].
///
/// # Safety
/// `counter` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_count_facets(counter: *const c_char, out: *mut *mut c_char) -> IscStatus {
    guard(|| {
        let counter = parse_counter(read_str(counter)?)?;
        write_out(out, into_c_string(count_facets(&counter).to_string())?)
    })
}

/// Classifies a pair sequence written `w|g;w|g;…`.
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_classify(key: *const c_char, out: *mut IscClass) -> IscStatus {
    guard(|| {
        let s: WitnessPrestructure = read_str(key)?.parse()?;
        let class = match s.classify() {
            StructureClass::Invalid => IscClass::Invalid,
            StructureClass::Prestructure => IscClass::Prestructure,
            StructureClass::StablePrestructure => IscClass::StablePrestructure,
            StructureClass::WitnessStructure => IscClass::WitnessStructure,
        };
        write_out(out, class)
    })
}

/// Face of the witness structure `key` with the processes in `set` removed.
/// Free the result with [`isc_string_free`].
///
/// # Safety
/// `key` must be a NUL-terminated string, `set` valid for `set_len` reads
/// (or null with `set_len == 0`) and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isc_ghost(
    key: *const c_char,
    set: *const u32,
    set_len: usize,
    out: *mut *mut c_char,
) -> IscStatus {
    guard(|| {
        let s: WitnessPrestructure = read_str(key)?.parse()?;
        let set: ProcessSet = if set_len == 0 {
            ProcessSet::new()
        } else if set.is_null() {
            return Err(Failure(IscStatus::NullPointer, "null process set".into()));
        } else {
            std::slice::from_raw_parts(set, set_len).iter().copied().collect()
        };
        write_out(out, into_c_string(s.ghost(&set)?.to_string())?)
    })
}
