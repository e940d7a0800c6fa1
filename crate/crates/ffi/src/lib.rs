//! C ABI over the trace generators, simulators and GPR.
//!
//! Every fallible function returns a [`ForgeStatus`]; on failure
//! [`forge_last_error`] describes the cause. Objects are opaque handles
//! released with their matching `_free` function. Unless stated otherwise,
//! pointer arguments must be non-null and valid for the duration of the call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use forge_core::binpack::{make_bin_heuristic, pack, BinHeuristic};
use forge_core::cache::{capacity_for_trace, make_baseline_policy, simulate, BaselineName, PolicyParams};
use forge_core::gpr::{Feature, GprModel};
use forge_core::trace::{gen_bin_items, gen_zipf, read_bin_trace, read_cache_trace, write_cache_trace, BinTrace, ItemDistribution, Trace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForgeStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    /// The policy made an illegal move or raised.
    Simulation = 4,
    Numeric = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ForgeCacheMetrics {
    pub hits: u64,
    pub misses: u64,
    pub accesses: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ForgePackMetrics {
    pub bins_used: u64,
    pub lower_bound: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForgeItemDistribution {
    /// `a` is the shape, `b` the scale in absolute units.
    Weibull = 0,
    /// `a` is the mean, `b` the standard deviation, as capacity fractions.
    Gaussian = 1,
}

/// A cache request trace.
pub struct ForgeCacheTrace(Trace);

/// A bin packing item sequence.
pub struct ForgeBinTrace(BinTrace);

/// A fitted Gaussian process regressor.
pub struct ForgeGpr(GprModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ForgeStatus, String);

impl Failure {
    fn invalid(e: impl ToString) -> Self {
        Failure(ForgeStatus::InvalidArgument, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> ForgeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ForgeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            ForgeStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(ForgeStatus::NullArgument, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(ForgeStatus::NullArgument, format!("{name} is null")))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(ForgeStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{name} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(ForgeStatus::NullArgument, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn params(p: *const c_char) -> Result<PolicyParams, Failure> {
    if p.is_null() {
        return Ok(PolicyParams::default());
    }
    PolicyParams::parse(string(p, "params")?).map_err(Failure::invalid)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn forge_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Zipf(`skew`) requests over `objects` unit-size keys.
///
/// # Safety
/// `out_trace` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_trace_zipf(
    objects: usize,
    requests: usize,
    skew: f64,
    seed: u64,
    out_trace: *mut *mut ForgeCacheTrace,
) -> ForgeStatus {
    guard(|| {
        let o = out(out_trace, "out_trace")?;
        let t = gen_zipf(objects, requests, skew, seed).map_err(Failure::invalid)?;
        *o = boxed(ForgeCacheTrace(t));
        Ok(())
    })
}

/// Reads a `key,size` CSV trace.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_trace` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_trace_read(path: *const c_char, out_trace: *mut *mut ForgeCacheTrace) -> ForgeStatus {
    guard(|| {
        let o = out(out_trace, "out_trace")?;
        let t = read_cache_trace(Path::new(string(path, "path")?)).map_err(|e| Failure(ForgeStatus::Io, e.to_string()))?;
        *o = boxed(ForgeCacheTrace(t));
        Ok(())
    })
}

/// # Safety
/// `trace` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_trace_write(trace: *const ForgeCacheTrace, path: *const c_char) -> ForgeStatus {
    guard(|| {
        let t = arg(trace, "trace")?;
        write_cache_trace(Path::new(string(path, "path")?), &t.0).map_err(|e| Failure(ForgeStatus::Io, e.to_string()))
    })
}

/// Number of requests; 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_trace_len(trace: *const ForgeCacheTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `trace` must be NULL or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_trace_free(trace: *mut ForgeCacheTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Cache size in bytes: `fraction` of the trace's footprint, at least 1.
///
/// # Safety
/// `trace` must come from this library and `out_capacity` be valid.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_capacity(
    trace: *const ForgeCacheTrace,
    fraction: f64,
    out_capacity: *mut u64,
) -> ForgeStatus {
    guard(|| {
        let t = arg(trace, "trace")?;
        let o = out(out_capacity, "out_capacity")?;
        *o = capacity_for_trace(&t.0, fraction).map_err(Failure::invalid)?;
        Ok(())
    })
}

/// Replays `trace` through a named baseline (`"lru"`, `"s3fifo"`, ...).
/// `params` may be NULL or hold `name=value` pairs.
///
/// # Safety
/// `trace` must come from this library; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn forge_cache_simulate(
    trace: *const ForgeCacheTrace,
    policy: *const c_char,
    params_text: *const c_char,
    capacity: u64,
    out_metrics: *mut ForgeCacheMetrics,
) -> ForgeStatus {
    guard(|| {
        let t = arg(trace, "trace")?;
        let o = out(out_metrics, "out_metrics")?;
        let name: BaselineName = string(policy, "policy")?.parse().map_err(Failure::invalid)?;
        let mut p = make_baseline_policy(name, &params(params_text)?).map_err(Failure::invalid)?;
        let m = simulate(&t.0, capacity, &mut p).map_err(|e| Failure(ForgeStatus::Simulation, e.to_string()))?;
        *o = ForgeCacheMetrics {
            hits: m.hits,
            misses: m.misses,
            accesses: m.accesses,
        };
        Ok(())
    })
}

/// `count` items from the given distribution for bins of `capacity`.
///
/// # Safety
/// `out_trace` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_trace_generate(
    count: usize,
    dist: ForgeItemDistribution,
    a: f64,
    b: f64,
    capacity: u64,
    seed: u64,
    out_trace: *mut *mut ForgeBinTrace,
) -> ForgeStatus {
    guard(|| {
        let o = out(out_trace, "out_trace")?;
        let d = match dist {
            ForgeItemDistribution::Weibull => ItemDistribution::Weibull { shape: a, scale: b },
            ForgeItemDistribution::Gaussian => ItemDistribution::Gaussian { mean: a, std: b },
        };
        let t = gen_bin_items(count, d, capacity, seed).map_err(Failure::invalid)?;
        *o = boxed(ForgeBinTrace(t));
        Ok(())
    })
}

/// # Safety
/// `items` must point to `len` values; `out_trace` must be valid.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_trace_from_items(
    items: *const u64,
    len: usize,
    capacity: u64,
    out_trace: *mut *mut ForgeBinTrace,
) -> ForgeStatus {
    guard(|| {
        let o = out(out_trace, "out_trace")?;
        let t = BinTrace::new("ffi", capacity, slice(items, len, "items")?.to_vec()).map_err(Failure::invalid)?;
        *o = boxed(ForgeBinTrace(t));
        Ok(())
    })
}

/// Reads a bin trace file.
///
/// # Safety
/// `path` must be NUL-terminated and `out_trace` valid.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_trace_read(path: *const c_char, out_trace: *mut *mut ForgeBinTrace) -> ForgeStatus {
    guard(|| {
        let o = out(out_trace, "out_trace")?;
        let t = read_bin_trace(Path::new(string(path, "path")?)).map_err(|e| Failure(ForgeStatus::Io, e.to_string()))?;
        *o = boxed(ForgeBinTrace(t));
        Ok(())
    })
}

/// Number of items; 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_trace_len(trace: *const ForgeBinTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.items.len())
}

/// # Safety
/// `trace` must be NULL or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_trace_free(trace: *mut ForgeBinTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Packs `trace` online with a named heuristic (`"first_fit"`, ...).
///
/// # Safety
/// `trace` must come from this library; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn forge_bin_pack(
    trace: *const ForgeBinTrace,
    heuristic: *const c_char,
    params_text: *const c_char,
    out_metrics: *mut ForgePackMetrics,
) -> ForgeStatus {
    guard(|| {
        let t = arg(trace, "trace")?;
        let o = out(out_metrics, "out_metrics")?;
        let h: BinHeuristic = string(heuristic, "heuristic")?.parse().map_err(Failure::invalid)?;
        let mut p = make_bin_heuristic(h, &params(params_text)?).map_err(Failure::invalid)?;
        let m = pack(&t.0, &mut p).map_err(|e| Failure(ForgeStatus::Simulation, e.to_string()))?;
        *o = ForgePackMetrics {
            bins_used: m.bins_used,
            lower_bound: m.lower_bound,
        };
        Ok(())
    })
}

/// Fits on `m` features of dimension `d` (row-major) against `m` targets
/// of dimension `n` (row-major).
///
/// # Safety
/// `features` must hold `m * d` values, `targets` `m * n`; `out_model` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn forge_gpr_fit(
    features: *const f64,
    m: usize,
    d: usize,
    targets: *const f64,
    n: usize,
    sigma0: f64,
    noise: f64,
    out_model: *mut *mut ForgeGpr,
) -> ForgeStatus {
    guard(|| {
        let o = out(out_model, "out_model")?;
        let rows = |p, w, name| -> Result<Vec<&[f64]>, Failure> {
            let total = m.checked_mul(w).ok_or_else(|| Failure::invalid("size overflow"))?;
            let s = slice(p, total, name)?;
            Ok(if w == 0 { vec![&[][..]; m] } else { s.chunks(w).collect() })
        };
        let feats: Vec<Feature> = rows(features, d, "features")?.into_iter().map(Feature::from_f64).collect();
        let ys: Vec<Vec<f64>> = rows(targets, n, "targets")?.into_iter().map(<[f64]>::to_vec).collect();
        let model = GprModel::fit(&feats, &ys, sigma0, noise).map_err(|e| Failure(ForgeStatus::Numeric, e.to_string()))?;
        *o = boxed(ForgeGpr(model));
        Ok(())
    })
}

/// Posterior mean at `x` (length `d`), clipped to [0, 1], written to
/// `out_mean` (length `n`).
///
/// # Safety
/// `model` must come from this library; buffers must have the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn forge_gpr_predict(
    model: *const ForgeGpr,
    x: *const f64,
    d: usize,
    out_mean: *mut f64,
    n: usize,
) -> ForgeStatus {
    guard(|| {
        let g = arg(model, "model")?;
        if n != g.0.n_targets() {
            return Err(Failure::invalid(format!("output length {n}, model has {} targets", g.0.n_targets())));
        }
        let mean = g
            .0
            .predict(&Feature::from_f64(slice(x, d, "x")?))
            .map_err(|e| Failure(ForgeStatus::InvalidArgument, e.to_string()))?;
        if n > 0 {
            if out_mean.is_null() {
                return Err(Failure(ForgeStatus::NullArgument, "out_mean is null".into()));
            }
            std::slice::from_raw_parts_mut(out_mean, n).copy_from_slice(&mean);
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn forge_gpr_free(model: *mut ForgeGpr) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
