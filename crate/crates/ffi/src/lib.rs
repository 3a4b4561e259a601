//! C interface to `dictgreedy`.
//!
//! Every function returns a [`DgStatus`]; on failure the message is available
//! from [`dg_last_error`] on the same thread. Objects cross the boundary as
//! opaque handles that the caller frees with the matching `*_free` function.
//! Functions never unwind into C: a Rust panic becomes [`DgStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use dictgreedy::experiment::{run_experiment, ExperimentConfig};
use dictgreedy::greedy::{
    ega_c_run, egafr_run, make_coefficients_cs, rega_run, wgafr_run, wrga_run, GreedyOptions, GreedyTrace,
    WeaknessSchedule,
};
use dictgreedy::linesearch::UnivariateSearch;
use dictgreedy::objective::{FnObjective, PowerDistance, Quadratic};
use dictgreedy::{Dictionary, Error, NormOrder, Oracle, Vector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Unsupported = 3,
    Budget = 4,
    NonCoercive = 5,
    InsufficientData = 6,
    Io = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgAlgorithm {
    Rega = 0,
    Egafr = 1,
    EgaC = 2,
    Wrga = 3,
    Wgafr = 4,
}

impl DgAlgorithm {
    fn from_raw(v: u32) -> Option<Self> {
        Some(match v {
            0 => DgAlgorithm::Rega,
            1 => DgAlgorithm::Egafr,
            2 => DgAlgorithm::EgaC,
            3 => DgAlgorithm::Wrga,
            4 => DgAlgorithm::Wgafr,
            _ => return None,
        })
    }
}

/// Options for [`dg_run`]. Start from [`dg_run_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgRunOptions {
    pub iterations: u64,
    pub ls_depth: u32,
    /// Corruption bound; 0 for exact values.
    pub delta: f64,
    pub seed: u64,
    pub half_width: f64,
    /// Weakness parameter of WRGA and WGAFR.
    pub weakness: f64,
    /// Smoothness order for EGA(C); 0 takes it from the objective.
    pub q: f64,
    /// Smoothness constant for EGA(C); 0 takes it from the objective.
    pub gamma: f64,
}

/// One trace row. Parameters an algorithm does not use are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgRecord {
    pub iteration: u64,
    pub atom: u64,
    pub objective: f64,
    pub observed: f64,
    pub lambda: f64,
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l1_mass: f64,
    pub support: u64,
    pub evals: u64,
    pub delta_eff: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgLineSearchResult {
    pub x_best: f64,
    pub f_best: f64,
    pub eval_count: u64,
    pub certified_gap: f64,
}

/// Objective callback: value at `x[0..dim]`.
pub type DgObjectiveFn = Option<extern "C" fn(user_data: *mut c_void, x: *const f64, dim: usize) -> f64>;

/// Univariate callback for [`dg_line_search`].
pub type DgScalarFn = Option<extern "C" fn(user_data: *mut c_void, x: f64) -> f64>;

pub struct DgDictionary(Dictionary);

pub struct DgOracle(Oracle);

pub struct DgTrace(GreedyTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> DgStatus {
    match e {
        Error::Input(_) | Error::Config { .. } | Error::Json(_) => DgStatus::InvalidInput,
        Error::Unsupported(_) => DgStatus::Unsupported,
        Error::Budget(_) => DgStatus::Budget,
        Error::NonCoercive(_) => DgStatus::NonCoercive,
        Error::InsufficientData { .. } => DgStatus::InsufficientData,
        Error::Io(_) => DgStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DgStatus>) -> DgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            DgStatus::Internal
        }
    }
}

fn fail(e: Error) -> DgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> DgStatus {
    set_error(format!("{what} is null"));
    DgStatus::NullPointer
}

unsafe fn read_slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], DgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Error::Input(format!("{what} is not valid UTF-8"))))
}

fn norm_order(p: f64) -> Result<NormOrder, DgStatus> {
    NormOrder::new(p).map_err(fail)
}

fn publish<T>(out: *mut *mut T, value: T) -> Result<(), DgStatus> {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn dg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `{+e_1, -e_1, ..., +e_dim, -e_dim}` in the `p` norm (`INFINITY` allowed).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dg_dictionary_canonical(dim: usize, p: f64, out: *mut *mut DgDictionary) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = Dictionary::canonical(dim, norm_order(p)?).map_err(fail)?;
        publish(out, DgDictionary(d))
    })
}

/// Symmetric dictionary from `count` row-major atoms of length `dim`. Atoms
/// are normalized in the `p` norm and missing negations are added.
///
/// # Safety
/// `atoms` must hold `count * dim` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_dictionary_from_atoms(
    atoms: *const f64,
    count: usize,
    dim: usize,
    p: f64,
    out: *mut *mut DgDictionary,
) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let flat = read_slice(atoms, count * dim, "atoms")?;
        if dim == 0 {
            return Err(fail(Error::Input("dimension must be positive".into())));
        }
        let raw = flat
            .chunks(dim)
            .map(|a| Vector::new(a.to_vec()))
            .collect::<dictgreedy::Result<Vec<_>>>()
            .map_err(fail)?;
        let d = Dictionary::symmetric(&raw, norm_order(p)?).map_err(fail)?;
        publish(out, DgDictionary(d))
    })
}

/// Number of atoms, 0 for null.
///
/// # Safety
/// `dict` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dg_dictionary_len(dict: *const DgDictionary) -> usize {
    dict.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `dict` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_dictionary_free(dict: *mut DgDictionary) {
    if !dict.is_null() {
        drop(Box::from_raw(dict));
    }
}

/// `||x - center||_2^2`.
///
/// # Safety
/// `center` must hold `dim` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_quadratic(center: *const f64, dim: usize, out: *mut *mut DgOracle) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = read_slice(center, dim, "center")?.to_vec();
        let o = Quadratic::new(c).map_err(fail)?;
        publish(out, DgOracle(Oracle::new(o)))
    })
}

/// `sum |x_i - center_i|^q` for `q` in `(1, 2]`.
///
/// # Safety
/// `center` must hold `dim` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_power(
    center: *const f64,
    dim: usize,
    q: f64,
    out: *mut *mut DgOracle,
) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = read_slice(center, dim, "center")?.to_vec();
        let o = PowerDistance::new(c, q).map_err(fail)?;
        publish(out, DgOracle(Oracle::new(o)))
    })
}

struct Callback {
    f: extern "C" fn(*mut c_void, *const f64, usize) -> f64,
    user_data: *mut c_void,
}

// The caller promises the callback and its data may be used from several
// threads at once.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

/// Objective given by a C callback, without gradient or smoothness data, so
/// only REGA and EGAFR run on it. Algorithms call `f` from several threads
/// concurrently; it must be thread-safe and `user_data` must outlive the
/// oracle.
///
/// # Safety
/// `out` must be valid; `f` must be safe to call with any `dim`-vector.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_callback(
    dim: usize,
    f: DgObjectiveFn,
    user_data: *mut c_void,
    out: *mut *mut DgOracle,
) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let Some(f) = f else { return Err(null("f")) };
        if dim == 0 {
            return Err(fail(Error::Input("dimension must be positive".into())));
        }
        let cb = Callback { f, user_data };
        let obj = FnObjective::new("callback", dim, move |x: &[f64]| {
            let cb = &cb;
            (cb.f)(cb.user_data, x.as_ptr(), x.len())
        });
        publish(out, DgOracle(Oracle::new(obj)))
    })
}

/// Exact value at `x`; counts one evaluation.
///
/// # Safety
/// `x` must hold the oracle's dimension of values; `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_evaluate(oracle: *const DgOracle, x: *const f64, value: *mut f64) -> DgStatus {
    guard(|| {
        let Some(o) = oracle.as_ref() else { return Err(null("oracle")) };
        if value.is_null() {
            return Err(null("value"));
        }
        let x = read_slice(x, o.0.dim(), "x")?;
        *value = o.0.evaluate(x).map_err(fail)?;
        Ok(())
    })
}

/// Evaluations counted so far, 0 for null.
///
/// # Safety
/// `oracle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_eval_count(oracle: *const DgOracle) -> u64 {
    oracle.as_ref().map_or(0, |o| o.0.eval_count())
}

/// # Safety
/// `oracle` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_oracle_free(oracle: *mut DgOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

#[no_mangle]
pub extern "C" fn dg_run_options_default() -> DgRunOptions {
    DgRunOptions {
        iterations: 100,
        ls_depth: 30,
        delta: 0.0,
        seed: 0,
        half_width: 1.0,
        weakness: 1.0,
        q: 0.0,
        gamma: 0.0,
    }
}

fn run(oracle: &Oracle, dict: &Dictionary, alg: DgAlgorithm, o: &DgRunOptions) -> dictgreedy::Result<GreedyTrace> {
    let iterations = usize::try_from(o.iterations).map_err(|_| Error::Input("too many iterations".into()))?;
    let mut opts = GreedyOptions::new(iterations).with_depth(o.ls_depth).with_half_width(o.half_width);
    if o.delta > 0.0 {
        opts = opts.with_delta(o.delta, o.seed);
    }
    let t = WeaknessSchedule::new(o.weakness)?;
    match alg {
        DgAlgorithm::Rega => rega_run(oracle, dict, &opts),
        DgAlgorithm::Egafr => egafr_run(oracle, dict, &opts),
        DgAlgorithm::Wrga => wrga_run(oracle, dict, t, &opts),
        DgAlgorithm::Wgafr => wgafr_run(oracle, dict, t, &opts),
        DgAlgorithm::EgaC => {
            let s = oracle.smoothness();
            let q = if o.q > 0.0 { Some(o.q) } else { s.map(|s| s.q) };
            let gamma = if o.gamma > 0.0 { Some(o.gamma) } else { s.map(|s| s.gamma) };
            let (Some(q), Some(gamma)) = (q, gamma) else {
                return Err(Error::Input("q and gamma are required for this objective".into()));
            };
            ega_c_run(oracle, dict, &make_coefficients_cs(q, gamma, iterations)?, &opts)
        }
    }
}

/// Runs one algorithm, given as a [`DgAlgorithm`] value. `options` may be
/// null for the defaults.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_run(
    oracle: *const DgOracle,
    dict: *const DgDictionary,
    algorithm: u32,
    options: *const DgRunOptions,
    out: *mut *mut DgTrace,
) -> DgStatus {
    guard(|| {
        let Some(o) = oracle.as_ref() else { return Err(null("oracle")) };
        let Some(d) = dict.as_ref() else { return Err(null("dict")) };
        if out.is_null() {
            return Err(null("out"));
        }
        let algorithm = DgAlgorithm::from_raw(algorithm)
            .ok_or_else(|| fail(Error::Input(format!("unknown algorithm {algorithm}"))))?;
        let opts = options.as_ref().copied().unwrap_or_else(|| dg_run_options_default());
        let trace = run(&o.0, &d.0, algorithm, &opts).map_err(fail)?;
        publish(out, DgTrace(trace))
    })
}

/// Number of recorded iterations, 0 for null.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_len(trace: *const DgTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// Objective value at the origin.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_initial_objective(trace: *const DgTrace) -> f64 {
    trace.as_ref().map_or(f64::NAN, |t| t.0.initial_objective)
}

/// Row `index` (0-based) of the trace.
///
/// # Safety
/// `trace` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_record(trace: *const DgTrace, index: usize, out: *mut DgRecord) -> DgStatus {
    guard(|| {
        let Some(t) = trace.as_ref() else { return Err(null("trace")) };
        if out.is_null() {
            return Err(null("out"));
        }
        let Some(r) = t.0.records.get(index) else {
            return Err(fail(Error::Input(format!("index {index} out of range ({} records)", t.0.len()))));
        };
        *out = DgRecord {
            iteration: r.iteration as u64,
            atom: r.atom as u64,
            objective: r.objective,
            observed: r.observed,
            lambda: r.lambda.unwrap_or(f64::NAN),
            w: r.w.unwrap_or(f64::NAN),
            alpha: r.alpha.unwrap_or(f64::NAN),
            beta: r.beta.unwrap_or(f64::NAN),
            l1_mass: r.l1_mass,
            support: r.support as u64,
            evals: r.evals,
            delta_eff: r.delta_eff,
        };
        Ok(())
    })
}

/// Dense coefficients of row `index` over the dictionary, written into
/// `buffer[0..len]`; `len` must equal the dictionary size.
///
/// # Safety
/// `buffer` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_coefficients(
    trace: *const DgTrace,
    index: usize,
    buffer: *mut f64,
    len: usize,
) -> DgStatus {
    guard(|| {
        let Some(t) = trace.as_ref() else { return Err(null("trace")) };
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let Some(r) = t.0.records.get(index) else {
            return Err(fail(Error::Input(format!("index {index} out of range"))));
        };
        if len != t.0.config.dictionary_size {
            return Err(fail(Error::Input(format!(
                "buffer holds {len} values, dictionary has {}",
                t.0.config.dictionary_size
            ))));
        }
        let out = slice::from_raw_parts_mut(buffer, len);
        out.fill(0.0);
        for (i, c) in r.coefficients.iter() {
            out[i] = c;
        }
        Ok(())
    })
}

/// The trace as JSON; free with [`dg_string_free`].
///
/// # Safety
/// `trace` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_to_json(trace: *const DgTrace, out: *mut *mut c_char) -> DgStatus {
    guard(|| {
        let Some(t) = trace.as_ref() else { return Err(null("trace")) };
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&t.0).map_err(|e| fail(e.into()))?;
        *out = CString::new(text).map_err(|_| fail(Error::Input("NUL in JSON".into())))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_trace_free(trace: *mut DgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Minimizes a convex `f` on `[lo, hi]` with `depth` halvings. Values may be
/// off by up to `delta`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_line_search(
    f: DgScalarFn,
    user_data: *mut c_void,
    lo: f64,
    hi: f64,
    depth: u32,
    delta: f64,
    out: *mut DgLineSearchResult,
) -> DgStatus {
    guard(|| {
        let Some(f) = f else { return Err(null("f")) };
        if out.is_null() {
            return Err(null("out"));
        }
        let r = UnivariateSearch::new(lo, hi, depth)
            .with_delta(delta)
            .minimize(|x| f(user_data, x))
            .map_err(fail)?;
        *out = DgLineSearchResult {
            x_best: r.x_best,
            f_best: r.f_best,
            eval_count: r.eval_count as u64,
            certified_gap: r.certified_gap,
        };
        Ok(())
    })
}

/// Runs a JSON experiment config and writes its outputs to `out_dir` (or
/// the config's own directory when null). Returns `Internal` when a run
/// failed or an invariant was violated; outputs are still written.
///
/// # Safety
/// Strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dg_run_experiment(config_path: *const c_char, out_dir: *const c_char) -> DgStatus {
    guard(|| {
        let cfg_path = read_str(config_path, "config_path")?;
        let cfg = ExperimentConfig::load(Path::new(cfg_path)).map_err(fail)?;
        let dir = if out_dir.is_null() {
            cfg.outputs.dir.clone()
        } else {
            read_str(out_dir, "out_dir")?.into()
        };
        let report = run_experiment(&cfg, &dir).map_err(fail)?;
        if report.exit_code() != 0 {
            set_error("a run failed or violated an invariant; see summary.txt");
            return Err(DgStatus::Internal);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_status() {
        assert_eq!(status_of(&Error::NonCoercive("x".into())), DgStatus::NonCoercive);
        assert_eq!(status_of(&Error::Budget("x".into())), DgStatus::Budget);
        assert_eq!(
            status_of(&Error::InsufficientData { usable: 0, excluded: 0, required: 10 }),
            DgStatus::InsufficientData
        );
    }
}
