//! C ABI for the chsh-share library.
//!
//! Simulation and synthesis results are returned through opaque handles;
//! every call reports a [`CssStatus`]. Handles must be released with the
//! matching `*_free` function. Handles are immutable once created and safe
//! to read from multiple threads.

use chsh_share::chsh::{closed_form_general, concurrence_threshold, critical_eta, TradeoffCurve};
use chsh_share::engine::{run_protocol, ProtocolConfig};
use chsh_share::protocol::{Scheme, SchemeFamily};
use chsh_share::synthesis::{synthesize_t1, synthesize_t2, SynthesisResult};
use chsh_share::Error;
use std::os::raw::c_char;

/// Status codes mirroring the CLI exit codes: 0 ok, 2 domain error,
/// 3 infeasible, 4 null pointer or index out of range.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CssStatus {
    Ok = 0,
    Domain = 2,
    Infeasible = 3,
    NullPointer = 4,
}

/// Measurement-realization scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CssScheme {
    Ppm3 = 0,
    FourKraus = 1,
    TwoKraus = 2,
}

impl CssScheme {
    fn family(self) -> SchemeFamily {
        match self {
            CssScheme::Ppm3 => SchemeFamily::Ppm3,
            CssScheme::FourKraus => SchemeFamily::FourKraus,
            CssScheme::TwoKraus => SchemeFamily::TwoKraus,
        }
    }
}

/// Critical-unsharpness curve selector: both observables equally unsharp,
/// or the first sharp.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CssCurve {
    EqualUnsharpness = 0,
    OneSharp = 1,
}

/// Opaque simulation result: per-Bob closed-form and brute-force CHSH
/// values.
pub struct CssSimulation {
    closed: Vec<f64>,
    brute: Vec<f64>,
}

/// Opaque synthesis result.
pub struct CssSynthesis {
    inner: SynthesisResult,
}

fn status_of(_err: &Error) -> CssStatus {
    CssStatus::Domain
}

/// Version string of the underlying library; static storage, do not free.
#[no_mangle]
pub extern "C" fn css_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Run a sequential chain: one scheme family with per-Bob weights
/// `alphas[0..k]` and identity bias `v` (ignored for `Ppm3`). On success
/// `*out` owns a new handle carrying both the closed-form and brute-force
/// value per Bob.
///
/// # Safety
/// `alphas` must point to `k` readable doubles; `out` must be a valid
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn css_simulate_new(
    scheme: CssScheme,
    k: usize,
    delta: f64,
    theta: f64,
    v: f64,
    alphas: *const f64,
    out: *mut *mut CssSimulation,
) -> CssStatus {
    if alphas.is_null() || out.is_null() || k == 0 {
        return CssStatus::NullPointer;
    }
    let alphas = std::slice::from_raw_parts(alphas, k);
    let family = scheme.family();
    let v = if family == SchemeFamily::Ppm3 { 1.0 } else { v };

    let schemes: Result<Vec<Scheme>, Error> = alphas
        .iter()
        .map(|&a| Scheme::from_family(family, a, v))
        .collect();
    let schemes = match schemes {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let config = match ProtocolConfig::new(delta, theta, schemes) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    let trace = match run_protocol(&config) {
        Ok(t) => t,
        Err(e) => return status_of(&e),
    };
    let mut closed = Vec::with_capacity(k);
    for j in 1..=k {
        match closed_form_general(family, j, delta, theta, v, &alphas[..j]) {
            Ok(value) => closed.push(value),
            Err(e) => return status_of(&e),
        }
    }
    *out = Box::into_raw(Box::new(CssSimulation {
        closed,
        brute: trace.chsh_values,
    }));
    CssStatus::Ok
}

/// Number of Bobs in the simulation; 0 on null input.
///
/// # Safety
/// `sim` must be null or a live handle from [`css_simulate_new`].
#[no_mangle]
pub unsafe extern "C" fn css_simulate_len(sim: *const CssSimulation) -> usize {
    if sim.is_null() {
        return 0;
    }
    (*sim).closed.len()
}

/// Closed-form CHSH value of Bob `index` (0-based).
///
/// # Safety
/// `sim` must be a live handle from [`css_simulate_new`]; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_simulate_closed_form(
    sim: *const CssSimulation,
    index: usize,
    out: *mut f64,
) -> CssStatus {
    if sim.is_null() || out.is_null() {
        return CssStatus::NullPointer;
    }
    let sim = &*sim;
    match sim.closed.get(index) {
        Some(&x) => {
            *out = x;
            CssStatus::Ok
        }
        None => CssStatus::NullPointer,
    }
}

/// Brute-force CHSH value of Bob `index` (0-based).
///
/// # Safety
/// `sim` must be a live handle from [`css_simulate_new`]; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_simulate_bruteforce(
    sim: *const CssSimulation,
    index: usize,
    out: *mut f64,
) -> CssStatus {
    if sim.is_null() || out.is_null() {
        return CssStatus::NullPointer;
    }
    let sim = &*sim;
    match sim.brute.get(index) {
        Some(&x) => {
            *out = x;
            CssStatus::Ok
        }
        None => CssStatus::NullPointer,
    }
}

/// Release a simulation handle. Null is ignored.
///
/// # Safety
/// `sim` must be a handle from [`css_simulate_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn css_simulate_free(sim: *mut CssSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Build a three-Kraus sharing sequence. Returns `Infeasible` when the
/// construction cannot reach k Bobs; a handle is still produced so the
/// caller can inspect how far it got.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn css_synthesize_t1(
    k: usize,
    delta: f64,
    epsilon: f64,
    alpha1: f64,
    out: *mut *mut CssSynthesis,
) -> CssStatus {
    if out.is_null() {
        return CssStatus::NullPointer;
    }
    match synthesize_t1(k, delta, epsilon, alpha1) {
        Ok(r) => {
            let feasible = r.feasible;
            *out = Box::into_raw(Box::new(CssSynthesis { inner: r }));
            if feasible {
                CssStatus::Ok
            } else {
                CssStatus::Infeasible
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Build a two-Kraus sharing sequence.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn css_synthesize_t2(
    k: usize,
    delta: f64,
    epsilon: f64,
    v: f64,
    out: *mut *mut CssSynthesis,
) -> CssStatus {
    if out.is_null() {
        return CssStatus::NullPointer;
    }
    match synthesize_t2(k, delta, epsilon, v) {
        Ok(r) => {
            let feasible = r.feasible;
            *out = Box::into_raw(Box::new(CssSynthesis { inner: r }));
            if feasible {
                CssStatus::Ok
            } else {
                CssStatus::Infeasible
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Number of computed sequence terms; 0 on null input.
///
/// # Safety
/// `syn` must be null or a live handle from a `css_synthesize_*` call.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_len(syn: *const CssSynthesis) -> usize {
    if syn.is_null() {
        return 0;
    }
    (*syn).inner.sequence.len()
}

/// Whether every Bob in the requested chain violates CHSH.
///
/// # Safety
/// `syn` must be null or a live handle from a `css_synthesize_*` call.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_feasible(syn: *const CssSynthesis) -> bool {
    if syn.is_null() {
        return false;
    }
    (*syn).inner.feasible
}

/// 1-based index of the first escaping term, or 0 when none.
///
/// # Safety
/// `syn` must be null or a live handle from a `css_synthesize_*` call.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_infeasible_at(syn: *const CssSynthesis) -> usize {
    if syn.is_null() {
        return 0;
    }
    (*syn).inner.infeasible_at.unwrap_or(0)
}

/// Sequence term `index` (0-based).
///
/// # Safety
/// `syn` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_term(
    syn: *const CssSynthesis,
    index: usize,
    out: *mut f64,
) -> CssStatus {
    if syn.is_null() || out.is_null() {
        return CssStatus::NullPointer;
    }
    let syn = &*syn;
    match syn.inner.sequence.get(index) {
        Some(&x) => {
            *out = x;
            CssStatus::Ok
        }
        None => CssStatus::NullPointer,
    }
}

/// CHSH value of Bob `index` under the synthesized sequence.
///
/// # Safety
/// `syn` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_chsh(
    syn: *const CssSynthesis,
    index: usize,
    out: *mut f64,
) -> CssStatus {
    if syn.is_null() || out.is_null() {
        return CssStatus::NullPointer;
    }
    let syn = &*syn;
    match syn.inner.per_bob_chsh.get(index) {
        Some(&x) => {
            *out = x;
            CssStatus::Ok
        }
        None => CssStatus::NullPointer,
    }
}

/// Violation margin I − 2 of Bob `index`; exact rearrangement of the closed
/// form, meaningful even far below machine epsilon on the CHSH value.
///
/// # Safety
/// `syn` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_margin(
    syn: *const CssSynthesis,
    index: usize,
    out: *mut f64,
) -> CssStatus {
    if syn.is_null() || out.is_null() {
        return CssStatus::NullPointer;
    }
    let syn = &*syn;
    match syn.inner.per_bob_margin.get(index) {
        Some(&x) => {
            *out = x;
            CssStatus::Ok
        }
        None => CssStatus::NullPointer,
    }
}

/// Release a synthesis handle. Null is ignored.
///
/// # Safety
/// `syn` must be a handle from a `css_synthesize_*` call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn css_synthesis_free(syn: *mut CssSynthesis) {
    if !syn.is_null() {
        drop(Box::from_raw(syn));
    }
}

/// Critical unsharpness at anticommutator expectation `x` on [0, 2].
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn css_critical_eta(curve: CssCurve, x: f64, out: *mut f64) -> CssStatus {
    if out.is_null() {
        return CssStatus::NullPointer;
    }
    let curve = match curve {
        CssCurve::EqualUnsharpness => TradeoffCurve::EqualUnsharpness,
        CssCurve::OneSharp => TradeoffCurve::OneSharp,
    };
    match critical_eta(curve, x) {
        Ok(value) => {
            *out = value;
            CssStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form CHSH value between Alice and Bob `k` for the given family.
///
/// # Safety
/// `alphas` must point to `k` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn css_closed_form_chsh(
    scheme: CssScheme,
    k: usize,
    delta: f64,
    theta: f64,
    v: f64,
    alphas: *const f64,
    out: *mut f64,
) -> CssStatus {
    if alphas.is_null() || out.is_null() || k == 0 {
        return CssStatus::NullPointer;
    }
    let alphas = std::slice::from_raw_parts(alphas, k);
    let family = scheme.family();
    let v = if family == SchemeFamily::Ppm3 { 1.0 } else { v };
    match closed_form_general(family, k, delta, theta, v, alphas) {
        Ok(value) => {
            *out = value;
            CssStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Lower edge of the concurrence band admitting k sequential violations.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn css_concurrence_threshold(k: usize, out: *mut f64) -> CssStatus {
    if out.is_null() {
        return CssStatus::NullPointer;
    }
    match concurrence_threshold(k) {
        Ok(value) => {
            *out = value;
            CssStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
