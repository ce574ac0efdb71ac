//! C ABI over `qsink`.
//!
//! Every entry point returns a [`QsinkStatus`]. On failure the message is
//! available from [`qsink_last_error_message`] on the same thread until the
//! next call. Channels are opaque handles created by [`qsink_channel_new`]
//! and released with [`qsink_channel_free`].
//!
//! Matrices cross the boundary as row-major `double` arrays; complex
//! matrices as separate real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use qsink::entanglement::{max_lifetime, negativity, optimal_state, TwoQubitState};
use qsink::pdl::ptm_at;
use qsink::sinkhorn::decompose;
use qsink::{ChannelParams, ComplexMatrix, Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsinkStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// The lines keep some entanglement up to the search limit.
    NoFiniteLifetime = 2,
    NumericalFailure = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Opaque channel handle: the rates of one line.
pub struct QsinkChannel {
    params: ChannelParams,
}

/// Sinkhorn normal form of one line at one time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QsinkSinkhorn {
    pub s: f64,
    /// Diagonal of `A` in the (H, V) basis.
    pub a_diagonal: [f64; 2],
    /// Diagonal of `B` in the (H, V) basis.
    pub b_diagonal: [f64; 2],
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
    /// Row-major Pauli transfer matrix of the unital part.
    pub upsilon: [f64; 16],
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QsinkLifetime {
    /// NaN when there is no finite lifetime.
    pub tau: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub residual: f64,
    pub iterations: usize,
    pub lhs_at_zero: f64,
    pub sign_reversal: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QsinkOptimalState {
    pub tau: f64,
    /// Amplitudes on |HH>, |HV>, |VH>, |VV>.
    pub psi_re: [f64; 4],
    pub psi_im: [f64; 4],
    /// Descending.
    pub schmidt_coefficients: [f64; 2],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> QsinkStatus {
    match err {
        Error::InvalidParams(_)
        | Error::InvalidTime(_)
        | Error::InvalidStep(_)
        | Error::InvalidState(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::NotHermitian { .. } => QsinkStatus::InvalidArgument,
        _ => QsinkStatus::NumericalFailure,
    }
}

/// Runs `f`, recording any error or panic for [`qsink_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), (QsinkStatus, String)> + UnwindSafe) -> QsinkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => QsinkStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QsinkStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (QsinkStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QsinkStatus, String) {
    (QsinkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn channel<'a>(h: *const QsinkChannel, what: &str) -> Result<&'a QsinkChannel, (QsinkStatus, String)> {
    h.as_ref().ok_or_else(|| null(what))
}

/// Creates a channel with attenuation rates `gamma_h`, `gamma_v` and
/// depolarization rate `gamma`, all finite and non-negative.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qsink_channel_new(
    gamma_h: f64,
    gamma_v: f64,
    gamma: f64,
    out: *mut *mut QsinkChannel,
) -> QsinkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = ChannelParams::new(gamma_h, gamma_v, gamma).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QsinkChannel { params }));
        Ok(())
    })
}

/// Releases a handle from [`qsink_channel_new`]. Null is a no-op.
///
/// # Safety
/// `channel` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qsink_channel_free(channel: *mut QsinkChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Writes the 16 row-major entries of the Pauli transfer matrix at time `t`.
///
/// # Safety
/// `channel` must be a live handle and `out` valid for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn qsink_channel_ptm(channel: *const QsinkChannel, t: f64, out: *mut f64) -> QsinkStatus {
    guard(|| {
        let ch = self::channel(channel, "channel")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = ptm_at(&ch.params, t).map_err(lib_err)?;
        let dst = std::slice::from_raw_parts_mut(out, 16);
        for (i, row) in m.0.iter().enumerate() {
            dst[4 * i..4 * i + 4].copy_from_slice(row);
        }
        Ok(())
    })
}

/// Sinkhorn normal form of `channel` at time `t`.
///
/// # Safety
/// `channel` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qsink_sinkhorn_decompose(
    channel: *const QsinkChannel,
    t: f64,
    out: *mut QsinkSinkhorn,
) -> QsinkStatus {
    guard(|| {
        let ch = self::channel(channel, "channel")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = decompose(&ch.params, t).map_err(lib_err)?;
        let mut upsilon = [0.0; 16];
        for (i, row) in d.upsilon.0.iter().enumerate() {
            upsilon[4 * i..4 * i + 4].copy_from_slice(row);
        }
        let [lambda_x, lambda_y, lambda_z] = d.lambdas();
        *out = QsinkSinkhorn {
            s: d.s,
            a_diagonal: d.a_diagonal(),
            b_diagonal: d.b_diagonal(),
            lambda_x,
            lambda_y,
            lambda_z,
            upsilon,
            residual: d.residual,
        };
        Ok(())
    })
}

/// Maximal entanglement lifetime of two lines. `t_max <= 0` selects the
/// default search limit. Returns [`QsinkStatus::NoFiniteLifetime`] with
/// `out->tau = NaN` when no root is found; the rest of `out` is still filled.
///
/// # Safety
/// Both handles must be live and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qsink_max_lifetime(
    first: *const QsinkChannel,
    second: *const QsinkChannel,
    t_max: f64,
    out: *mut QsinkLifetime,
) -> QsinkStatus {
    guard(|| {
        let (a, b) = (channel(first, "first")?, channel(second, "second")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let limit = (t_max > 0.0).then_some(t_max);
        let r = max_lifetime(&a.params, &b.params, limit).map_err(lib_err)?;
        *out = QsinkLifetime {
            tau: r.tau.unwrap_or(f64::NAN),
            bracket_low: r.bracket.0,
            bracket_high: r.bracket.1,
            residual: r.residual,
            iterations: r.iterations,
            lhs_at_zero: r.lhs_at_zero,
            sign_reversal: r.sign_reversal,
        };
        match r.tau {
            Some(_) => Ok(()),
            None => Err((QsinkStatus::NoFiniteLifetime, format!("no finite lifetime up to t = {}", r.bracket.1))),
        }
    })
}

/// Initial state reaching the maximal lifetime of the two lines.
///
/// # Safety
/// Both handles must be live and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qsink_optimal_state(
    first: *const QsinkChannel,
    second: *const QsinkChannel,
    out: *mut QsinkOptimalState,
) -> QsinkStatus {
    guard(|| {
        let (a, b) = (channel(first, "first")?, channel(second, "second")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = max_lifetime(&a.params, &b.params, None).map_err(lib_err)?;
        let tau = r.tau.ok_or((QsinkStatus::NoFiniteLifetime, "no finite lifetime".to_string()))?;
        let opt = optimal_state(&a.params, &b.params, tau).map_err(lib_err)?;
        *out = QsinkOptimalState {
            tau,
            psi_re: opt.psi.map(|z| z.re),
            psi_im: opt.psi.map(|z| z.im),
            schmidt_coefficients: opt.schmidt_coefficients,
        };
        Ok(())
    })
}

/// Negativity of a two-qubit density matrix given as 16 row-major real
/// parts and 16 imaginary parts. Unnormalized input is normalized first.
///
/// # Safety
/// `re` and `im` must be valid for 16 doubles each, `out` for one.
#[no_mangle]
pub unsafe extern "C" fn qsink_negativity(re: *const f64, im: *const f64, out: *mut f64) -> QsinkStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("input"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (re, im) = (std::slice::from_raw_parts(re, 16), std::slice::from_raw_parts(im, 16));
        let data = re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect();
        let rho = ComplexMatrix::from_row_major(4, data).map_err(lib_err)?;
        let state = TwoQubitState::new(rho).map_err(lib_err)?;
        *out = negativity(&state).map_err(lib_err)?;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qsink_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version, NUL-terminated, static.
#[no_mangle]
pub extern "C" fn qsink_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
