//! C ABI for `rwbandit`.
//!
//! Objects are opaque handles created by `rw_*_new` and released by the
//! matching `rw_*_free`. Every fallible call returns an [`RwStatus`]; on
//! failure [`rw_last_error`] describes the cause. Output arrays are
//! caller-allocated with the length stated on each function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use rwbandit::exp3::{Estimator, Exp3State};
use rwbandit::markov::{b_param, expected_hitting_times, hitting_centrality, kappa, ChainFile};
use rwbandit::ucb::{SampleSource, UcbState};
use rwbandit::walk::{sample_trajectory, stream_rng, SimRng};
use rwbandit::{ChainInstance, EdgeLengths, Error, Policy, Trajectory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidChain = 2,
    Dimension = 3,
    Parameter = 4,
    Singular = 5,
    Sequencing = 6,
    Io = 7,
    /// Output buffer too short; the needed length is reported.
    BufferTooSmall = 8,
    Other = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwEstimator {
    /// Shifted trajectory estimator with implicit exploration.
    Shifted = 0,
    /// Trajectory estimator without shift.
    Covered = 1,
    /// Played node only.
    Standard = 2,
}

pub struct RwChain {
    chain: ChainInstance,
}

/// Random walk simulator: a chain plus its own random stream.
pub struct RwSim {
    chain: ChainInstance,
    rng: SimRng,
}

pub struct RwUcb {
    state: UcbState,
}

pub struct RwExp3 {
    state: Exp3State,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> RwStatus {
    match err {
        Error::InvalidChain(_) => RwStatus::InvalidChain,
        Error::Dimension { .. } => RwStatus::Dimension,
        Error::Parameter { .. } | Error::Domain { .. } => RwStatus::Parameter,
        Error::Singular => RwStatus::Singular,
        Error::Sequencing { .. } => RwStatus::Sequencing,
        Error::Io(_) => RwStatus::Io,
        _ => RwStatus::Other,
    }
}

struct Fail(RwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RwStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RwStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            RwStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    let slot = as_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `lengths` is `K * (K + 1)` row-major with the absorbing edge last, or
/// null for unit lengths.
unsafe fn lengths_or_unit(k: usize, lengths: *const f64) -> Result<EdgeLengths, Fail> {
    if lengths.is_null() {
        Ok(EdgeLengths::unit(k))
    } else {
        Ok(EdgeLengths::new(
            k,
            slice::from_raw_parts(lengths, k * (k + 1)).to_vec(),
        )?)
    }
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a validated chain from a row-major `k * k` transition matrix.
///
/// # Safety
/// `m` must point to `k * k` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_new(
    k: usize,
    m: *const f64,
    rho: f64,
    out: *mut *mut RwChain,
) -> RwStatus {
    guard(|| {
        let m = input(m, k * k, "m")?.to_vec();
        put(
            out,
            RwChain {
                chain: ChainInstance::new(k, m, rho)?,
            },
        )
    })
}

/// Load a chain from a TOML chain file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_load(path: *const c_char, out: *mut *mut RwChain) -> RwStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|e| Fail(RwStatus::Parameter, format!("path is not UTF-8: {e}")))?;
        let (chain, _) = ChainFile::load(path)?.build()?;
        put(out, RwChain { chain })
    })
}

/// # Safety
/// `chain` must come from `rw_chain_new`/`rw_chain_load` or be null.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_free(chain: *mut RwChain) {
    free(chain);
}

/// Number of transient nodes, or 0 for a null handle.
///
/// # Safety
/// `chain` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_k(chain: *const RwChain) -> usize {
    chain.as_ref().map_or(0, |c| c.chain.k())
}

/// Expected hitting times into `out[0..K]`.
///
/// # Safety
/// `lengths` as in the module docs; `out` must hold `K` doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_hitting_times(
    chain: *const RwChain,
    lengths: *const f64,
    out: *mut f64,
) -> RwStatus {
    guard(|| {
        let c = &as_ref(chain, "chain")?.chain;
        let l = lengths_or_unit(c.k(), lengths)?;
        let mu = expected_hitting_times(c, &l)?;
        output(out, c.k(), "out")?.copy_from_slice(&mu);
        Ok(())
    })
}

/// Per-node hitting centrality into `alpha[0..K]` and the coverage factor
/// into `kappa_out`. Either output may be null.
///
/// # Safety
/// Non-null outputs must be writable with the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_centrality(
    chain: *const RwChain,
    alpha: *mut f64,
    kappa_out: *mut f64,
) -> RwStatus {
    guard(|| {
        let c = &as_ref(chain, "chain")?.chain;
        if !alpha.is_null() {
            output(alpha, c.k(), "alpha")?.copy_from_slice(&hitting_centrality(c)?.per_node);
        }
        if let Some(k) = kappa_out.as_mut() {
            *k = kappa(c)?;
        }
        Ok(())
    })
}

/// Smallest truncation level `B` with `K T rho^B / (1 - rho) <= eps`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_chain_b_param(
    chain: *const RwChain,
    horizon: usize,
    eps: f64,
    out: *mut u32,
) -> RwStatus {
    guard(|| {
        let c = &as_ref(chain, "chain")?.chain;
        *as_mut(out, "out")? = b_param(c.k(), horizon, c.rho(), eps)?;
        Ok(())
    })
}

/// Simulator over a copy of `chain`, seeded with `(seed, stream)`.
///
/// # Safety
/// `chain` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_sim_new(
    chain: *const RwChain,
    seed: u64,
    stream: u64,
    out: *mut *mut RwSim,
) -> RwStatus {
    guard(|| {
        let c = as_ref(chain, "chain")?.chain.clone();
        put(
            out,
            RwSim {
                chain: c,
                rng: stream_rng(seed, stream, 0),
            },
        )
    })
}

/// # Safety
/// `sim` must come from `rw_sim_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn rw_sim_free(sim: *mut RwSim) {
    free(sim);
}

/// Walk from `start` until absorption.
///
/// Writes the visited transient nodes to `visits` and the length of the
/// edge leaving each to `edge_lengths`, both of capacity `cap`, and the
/// visit count to `hops`. When `cap` is too short, `hops` receives the
/// required length and nothing else is written.
///
/// # Safety
/// `lengths` as in the module docs; buffers must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn rw_sim_walk(
    sim: *mut RwSim,
    lengths: *const f64,
    start: usize,
    visits: *mut usize,
    edge_lengths: *mut f64,
    cap: usize,
    hops: *mut usize,
) -> RwStatus {
    guard(|| {
        let s = as_mut(sim, "sim")?;
        let hops = as_mut(hops, "hops")?;
        let l = lengths_or_unit(s.chain.k(), lengths)?;
        let t = sample_trajectory(&s.chain, &l, start, 1, &mut s.rng)?;
        *hops = t.hops();
        if t.hops() > cap {
            return Err(Fail(
                RwStatus::BufferTooSmall,
                format!("walk has {} visits, buffer holds {cap}", t.hops()),
            ));
        }
        output(visits, t.hops(), "visits")?.copy_from_slice(t.visits());
        output(edge_lengths, t.hops(), "edge_lengths")?.copy_from_slice(t.lengths());
        Ok(())
    })
}

unsafe fn trajectory(
    epoch: usize,
    visits: *const usize,
    edge_lengths: *const f64,
    hops: usize,
) -> Result<Trajectory, Fail> {
    let v = input(visits, hops, "visits")?.to_vec();
    let l = input(edge_lengths, hops, "edge_lengths")?.to_vec();
    Ok(Trajectory::from_parts(epoch, v, l)?)
}

/// Trajectory-feedback UCB for `chain`; `played_only` restricts samples to
/// the played node.
///
/// # Safety
/// `chain` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_ucb_new(
    chain: *const RwChain,
    played_only: bool,
    out: *mut *mut RwUcb,
) -> RwStatus {
    guard(|| {
        let c = &as_ref(chain, "chain")?.chain;
        let source = if played_only {
            SampleSource::PlayedOnly
        } else {
            SampleSource::Trajectory
        };
        put(
            out,
            RwUcb {
                state: UcbState::new(c.k(), c.rho(), source),
            },
        )
    })
}

/// # Safety
/// `ucb` must come from `rw_ucb_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn rw_ucb_free(ucb: *mut RwUcb) {
    free(ucb);
}

/// Node to play this epoch.
///
/// # Safety
/// `ucb` must be live; `node` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_ucb_select(ucb: *const RwUcb, node: *mut usize) -> RwStatus {
    guard(|| {
        *as_mut(node, "node")? = as_ref(ucb, "ucb")?.state.select();
        Ok(())
    })
}

/// Record this epoch's trajectory (layout as produced by `rw_sim_walk`).
///
/// # Safety
/// `visits` and `edge_lengths` must hold `hops` elements.
#[no_mangle]
pub unsafe extern "C" fn rw_ucb_observe(
    ucb: *mut RwUcb,
    visits: *const usize,
    edge_lengths: *const f64,
    hops: usize,
) -> RwStatus {
    guard(|| {
        let u = as_mut(ucb, "ucb")?;
        let t = trajectory(u.state.epoch(), visits, edge_lengths, hops)?;
        Ok(u.state.step(&t)?)
    })
}

/// Current hitting-time estimates into `estimates[0..K]` and indices into
/// `indices[0..K]`; either may be null.
///
/// # Safety
/// Non-null outputs must hold `K` doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_ucb_state(
    ucb: *const RwUcb,
    estimates: *mut f64,
    indices: *mut f64,
) -> RwStatus {
    guard(|| {
        let s = &as_ref(ucb, "ucb")?.state;
        let k = s.ledger().k();
        if !estimates.is_null() {
            output(estimates, k, "estimates")?.copy_from_slice(&s.raw_estimates());
        }
        if !indices.is_null() {
            output(indices, k, "indices")?.copy_from_slice(&s.indices());
        }
        Ok(())
    })
}

/// EXP3 over `k` nodes. `b` and `beta` are used by the shifted estimator
/// only.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_new(
    k: usize,
    eta: f64,
    estimator: RwEstimator,
    b: f64,
    beta: f64,
    out: *mut *mut RwExp3,
) -> RwStatus {
    guard(|| {
        if k == 0 || !(eta >= 0.0 && eta.is_finite()) {
            return Err(Fail(
                RwStatus::Parameter,
                format!("need k >= 1 and finite eta >= 0, got k={k}, eta={eta}"),
            ));
        }
        let est = match estimator {
            RwEstimator::Shifted => {
                if b.is_nan() || b <= 0.0 {
                    return Err(Fail(
                        RwStatus::Parameter,
                        format!("b = {b} must be positive"),
                    ));
                }
                Estimator::Shifted { b, beta }
            }
            RwEstimator::Covered => Estimator::Covered,
            RwEstimator::Standard => Estimator::PlayedOnly,
        };
        put(
            out,
            RwExp3 {
                state: Exp3State::new(k, eta, est),
            },
        )
    })
}

/// Shifted-estimator EXP3 with default parameters for `chain`, `horizon`
/// and truncation target `eps`.
///
/// # Safety
/// `chain` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_with_defaults(
    chain: *const RwChain,
    horizon: usize,
    eps: f64,
    out: *mut *mut RwExp3,
) -> RwStatus {
    guard(|| {
        let c = &as_ref(chain, "chain")?.chain;
        put(
            out,
            RwExp3 {
                state: Exp3State::with_defaults(c, horizon, eps)?,
            },
        )
    })
}

/// # Safety
/// `exp3` must come from an `rw_exp3_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_free(exp3: *mut RwExp3) {
    free(exp3);
}

/// Current sampling distribution into `probs[0..K]`.
///
/// # Safety
/// `probs` must hold `K` doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_probs(exp3: *const RwExp3, probs: *mut f64) -> RwStatus {
    guard(|| {
        let s = &as_ref(exp3, "exp3")?.state;
        output(probs, s.probs().len(), "probs")?.copy_from_slice(s.probs());
        Ok(())
    })
}

/// Draw the node to play using the simulator's random stream.
///
/// # Safety
/// Handles must be live; `node` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_select(
    exp3: *mut RwExp3,
    sim: *mut RwSim,
    node: *mut usize,
) -> RwStatus {
    guard(|| {
        let s = as_mut(exp3, "exp3")?;
        let rng = &mut as_mut(sim, "sim")?.rng;
        *as_mut(node, "node")? = s.state.select(rng);
        Ok(())
    })
}

/// Record this epoch's trajectory (layout as produced by `rw_sim_walk`).
///
/// # Safety
/// `visits` and `edge_lengths` must hold `hops` elements.
#[no_mangle]
pub unsafe extern "C" fn rw_exp3_observe(
    exp3: *mut RwExp3,
    visits: *const usize,
    edge_lengths: *const f64,
    hops: usize,
) -> RwStatus {
    guard(|| {
        let s = as_mut(exp3, "exp3")?;
        let t = trajectory(s.state.epoch(), visits, edge_lengths, hops)?;
        Ok(s.state.update(&t)?)
    })
}
