//! Two-qubit entanglement under local trace-decreasing dynamics.
//!
//! Entanglement is decided by the partial transpose, which is exact for two
//! qubits. States are postselected on survival of both carriers, so the
//! relevant object is the conditional state `Λ₁⊗Λ₂[ρ] / tr[Λ₁⊗Λ₂[ρ]]`.
//!
//! The longest lifetime over all initial states is the first root of
//! `g(t) = λ_x λ'_x + λ_y λ'_y + λ_z λ'_z − 1`, built from the Sinkhorn
//! normal forms of both lines, and it is reached by
//! `ψ ∝ B(τ̃) ⊗ B'(τ̃) (|HH⟩ + |VV⟩)`.

use serde::{Deserialize, Serialize};

use crate::channel::{apply_two_qubit, PauliTransferMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    check_density_operator, hermitian_eigen, kron, partial_transpose_second, trace_norm, ComplexMatrix, C64,
};
use crate::pdl::{abcd, ChannelParams};
use crate::sinkhorn::{decompose, unital_parameters};

/// Negativities at or below this are treated as zero.
pub const NEGATIVITY_TOL: f64 = 1e-10;
/// Root tolerance on `g(τ̃)`.
pub const ROOT_TOL: f64 = 1e-10;
/// Bisection stops once the bracket is this narrow.
pub const ROOT_INTERVAL: f64 = 1e-12;
/// Detection probabilities below this count as total loss.
pub const MIN_DETECTION: f64 = 1e-14;

const MAX_BISECTIONS: usize = 200;
const REVERSAL_SCAN_POINTS: usize = 64;

/// A (possibly subnormalized) two-qubit density operator.
#[derive(Debug, Clone)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
    normalized: bool,
}

impl TwoQubitState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        rho.expect_dim(4)?;
        let rho = check_density_operator(&rho, false)?;
        let normalized = (rho.trace().re - 1.0).abs() <= 1e-10;
        Ok(Self { rho, normalized })
    }

    /// `|ψ⟩⟨ψ|` for a nonzero amplitude vector, normalized.
    pub fn from_pure(psi: &[C64; 4]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || norm.is_infinite() {
            return Err(Error::InvalidState(format!("state vector norm {norm}")));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self { rho: ComplexMatrix::outer(&v), normalized: true })
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn psi_plus() -> Self {
        Self::from_pure(&psi_plus_vector()).expect("valid state")
    }

    /// `p |ψ₊⟩⟨ψ₊| + (1 − p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        let mix = &Self::psi_plus().rho.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        Self::new(mix)
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn normalize(&self) -> Self {
        if self.normalized {
            return self.clone();
        }
        Self { rho: self.rho.scale_real(1.0 / self.trace()), normalized: true }
    }
}

pub fn psi_plus_vector() -> [C64; 4] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    [h, z, z, h]
}

/// `N(ρ) = ½(‖ρ^{T₂}‖₁ − 1)` of the normalized state.
pub fn negativity(state: &TwoQubitState) -> Result<f64> {
    let rho = state.normalize();
    let n = 0.5 * (trace_norm(&partial_transpose_second(&rho.rho)?)? - 1.0);
    // trace norm ≥ trace, so anything negative is rounding
    Ok(n.max(0.0))
}

/// Smallest eigenvalue of the partial transpose of the normalized state;
/// negative exactly when the state is entangled.
pub fn pt_min_eigenvalue(state: &TwoQubitState) -> Result<f64> {
    let rho = state.normalize();
    Ok(hermitian_eigen(&partial_transpose_second(&rho.rho)?)?.min_eigenvalue())
}

pub fn is_entangled(state: &TwoQubitState) -> Result<bool> {
    Ok(negativity(state)? > NEGATIVITY_TOL)
}

/// Postselected output state and the joint detection probability.
pub fn conditional_state(
    first: &PauliTransferMatrix,
    second: &PauliTransferMatrix,
    initial: &TwoQubitState,
) -> Result<(TwoQubitState, f64)> {
    if !initial.normalized {
        return Err(Error::InvalidState("initial state must have unit trace".into()));
    }
    let out = apply_two_qubit(first, second, &initial.rho)?;
    let p = out.trace().re;
    if p.is_nan() || p <= MIN_DETECTION {
        return Err(Error::VanishingDetection(p));
    }
    let state = TwoQubitState::new(out.scale_real(1.0 / p).hermitize()?)?;
    Ok((state, p))
}

/// `g(t) = Σ_k λ_k(t) λ'_k(t) − 1` for two lines; `g(0) = 2`.
pub fn lifetime_lhs(first: &ChannelParams, second: &ChannelParams, t: f64) -> Result<f64> {
    let l1 = unital_parameters(&abcd(first, t)?)?;
    let l2 = unital_parameters(&abcd(second, t)?)?;
    Ok(l1[0] * l2[0] + l1[1] * l2[1] + l1[2] * l2[2] - 1.0)
}

/// Outcome of the lifetime root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeResult {
    /// `None` when `g` stays positive up to the search limit.
    pub tau: Option<f64>,
    pub bracket: (f64, f64),
    /// `g(tau)`, or `g` at the search limit when no root was found.
    pub residual: f64,
    pub iterations: usize,
    pub lhs_at_zero: f64,
    /// `g` turned positive again somewhere in `[tau, 4 tau]`.
    pub sign_reversal: bool,
}

impl LifetimeResult {
    pub fn is_finite(&self) -> bool {
        self.tau.is_some()
    }
}

/// Initial expansion step `1/(sum of all six rates)`, or `None` without dynamics.
pub fn initial_step(first: &ChannelParams, second: &ChannelParams) -> Option<f64> {
    let total = first.total_rate() + second.total_rate();
    (total > 0.0).then(|| 1.0 / total)
}

/// Default search limit, `10³` initial steps.
pub fn default_search_limit(first: &ChannelParams, second: &ChannelParams) -> Option<f64> {
    initial_step(first, second).map(|t0| 1e3 * t0)
}

/// Maximal entanglement lifetime: bracket the first sign change of
/// [`lifetime_lhs`] by doubling, then bisect.
///
/// `t_max` bounds the search; `None` uses [`default_search_limit`].
pub fn max_lifetime(first: &ChannelParams, second: &ChannelParams, t_max: Option<f64>) -> Result<LifetimeResult> {
    first.validate()?;
    second.validate()?;
    let lhs_at_zero = lifetime_lhs(first, second, 0.0)?;
    let Some(t0) = initial_step(first, second) else {
        // nothing ever happens to the state
        return Ok(LifetimeResult {
            tau: None,
            bracket: (0.0, t_max.unwrap_or(0.0)),
            residual: lhs_at_zero,
            iterations: 0,
            lhs_at_zero,
            sign_reversal: false,
        });
    };
    let t_max = t_max.unwrap_or(1e3 * t0);
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be finite and positive")));
    }

    let mut lo = 0.0;
    let mut t = t0.min(t_max);
    let mut iterations = 0;
    let hi = loop {
        iterations += 1;
        let g = lifetime_lhs(first, second, t)?;
        if g <= 0.0 {
            break t;
        }
        if t >= t_max {
            return Ok(LifetimeResult {
                tau: None,
                bracket: (lo, t),
                residual: g,
                iterations,
                lhs_at_zero,
                sign_reversal: false,
            });
        }
        lo = t;
        t = (2.0 * t).min(t_max);
    };

    let (mut a, mut b) = (lo, hi);
    let mut g_b = lifetime_lhs(first, second, b)?;
    let (mut tau, mut residual) = (b, g_b);
    for _ in 0..MAX_BISECTIONS {
        if residual.abs() <= ROOT_TOL || b - a <= ROOT_INTERVAL {
            break;
        }
        iterations += 1;
        let mid = 0.5 * (a + b);
        let g_mid = lifetime_lhs(first, second, mid)?;
        if g_mid > 0.0 {
            a = mid;
        } else {
            b = mid;
            g_b = g_mid;
        }
        (tau, residual) = if g_mid.abs() <= g_b.abs() { (mid, g_mid) } else { (b, g_b) };
    }

    let mut sign_reversal = false;
    for k in 1..=REVERSAL_SCAN_POINTS {
        let s = tau * (1.0 + 3.0 * k as f64 / REVERSAL_SCAN_POINTS as f64);
        if lifetime_lhs(first, second, s)? > ROOT_TOL {
            sign_reversal = true;
            break;
        }
    }

    Ok(LifetimeResult { tau: Some(tau), bracket: (a, b), residual, iterations, lhs_at_zero, sign_reversal })
}

/// The most robust initial state and its Schmidt data.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalState {
    pub psi: [C64; 4],
    pub rho: ComplexMatrix,
    /// Descending.
    pub schmidt_coefficients: [f64; 2],
    /// `B(τ̃)` and `B'(τ̃)` diagonals, `(H, V)`.
    pub b_first: [f64; 2],
    pub b_second: [f64; 2],
}

impl OptimalState {
    pub fn state(&self) -> TwoQubitState {
        TwoQubitState::from_pure(&self.psi).expect("normalized vector")
    }
}

/// Most robust state against Pauli-diagonal unital noise with ordered
/// parameters `λ_x ≥ λ_y ≥ λ_z ≥ 0` on both sides, which is `|ψ₊⟩`.
pub fn robust_state_unital(first: [f64; 3], second: [f64; 3]) -> Result<[C64; 4]> {
    const SLACK: f64 = 1e-12;
    for lam in [first, second] {
        let ordered = lam[0] + SLACK >= lam[1] && lam[1] + SLACK >= lam[2] && lam[2] >= -SLACK;
        if !ordered || lam.iter().any(|x| !x.is_finite()) {
            return Err(Error::UnorderedLambdas(lam));
        }
    }
    Ok(psi_plus_vector())
}

/// Schmidt coefficients of a two-qubit pure state, descending.
pub fn schmidt_coefficients(psi: &[C64; 4]) -> Result<[f64; 2]> {
    let coeffs = ComplexMatrix::from_row_major(2, psi.to_vec())?;
    let gram = &coeffs * &coeffs.adjoint();
    let eig = hermitian_eigen(&gram)?;
    Ok([eig.eigenvalues[0].max(0.0).sqrt(), eig.eigenvalues[1].max(0.0).sqrt()])
}

/// `ψ ∝ B(τ) ⊗ B'(τ) ψ_seed`, the seed coming from [`robust_state_unital`].
pub fn optimal_state(first: &ChannelParams, second: &ChannelParams, tau: f64) -> Result<OptimalState> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidTime(tau));
    }
    let d1 = decompose(first, tau)?;
    let d2 = decompose(second, tau)?;
    let seed = robust_state_unital(d1.lambdas(), d2.lambdas())?;
    let v = kron(&d1.b_op, &d2.b_op).mul_vec(&seed)?;
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: [C64; 4] = std::array::from_fn(|i| v[i] / norm);
    Ok(OptimalState {
        psi,
        rho: ComplexMatrix::outer(&psi),
        schmidt_coefficients: schmidt_coefficients(&psi)?,
        b_first: d1.b_diagonal(),
        b_second: d2.b_diagonal(),
    })
}

/// Conditional state of `initial` after both lines have acted for time `t`.
pub fn evolve_conditional(
    first: &ChannelParams,
    second: &ChannelParams,
    initial: &TwoQubitState,
    t: f64,
) -> Result<(TwoQubitState, f64)> {
    let m1 = crate::pdl::ptm_at(first, t)?;
    let m2 = crate::pdl::ptm_at(second, t)?;
    conditional_state(&m1, &m2, initial)
}

/// First time at which the conditional state of `initial` turns separable,
/// located by scanning `samples` equally spaced points of `(0, t_max]` and
/// bisecting the smallest partial-transpose eigenvalue. `None` when it is
/// still entangled at `t_max`.
pub fn disentangling_time(
    first: &ChannelParams,
    second: &ChannelParams,
    initial: &TwoQubitState,
    t_max: f64,
    samples: usize,
) -> Result<Option<f64>> {
    if !t_max.is_finite() || t_max <= 0.0 || samples == 0 {
        return Err(Error::InvalidArgument(format!("t_max = {t_max}, samples = {samples}")));
    }
    let pt_min = |t: f64| -> Result<f64> { pt_min_eigenvalue(&evolve_conditional(first, second, initial, t)?.0) };
    if pt_min(0.0)? >= 0.0 {
        return Ok(Some(0.0));
    }
    let mut lo = 0.0;
    for k in 1..=samples {
        let t = t_max * k as f64 / samples as f64;
        if pt_min(t)? >= 0.0 {
            let (mut a, mut b) = (lo, t);
            for _ in 0..MAX_BISECTIONS {
                if b - a <= ROOT_INTERVAL {
                    break;
                }
                let mid = 0.5 * (a + b);
                if pt_min(mid)? < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(Some(0.5 * (a + b)));
        }
        lo = t;
    }
    Ok(None)
}
