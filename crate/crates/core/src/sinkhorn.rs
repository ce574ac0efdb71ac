//! Quantum Sinkhorn normal form of positivity-improving qubit maps.
//!
//! For such a map `Λ` there are positive definite `A`, `B` with
//! `Υ = Φ_A ∘ Λ ∘ Φ_B` trace preserving and unital, where
//! `Φ_X[ρ] = XρX†`. With `S` a fixed point of
//! `F[S] = (Λ[(Λ†[S])⁻¹])⁻¹` one can take `A = √S`, `B = (Λ†[S])^{-1/2}`.
//!
//! [`fixed_point_iterate`] finds `S` for any qubit map. For the loss and
//! noise family of [`crate::pdl`] the ansatz `S = I + s σ_z` solves the
//! fixed-point equation in closed form ([`closed_form_s`]) and [`decompose`]
//! builds the whole normal form from it.

use crate::channel::PauliTransferMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, pd_inverse, pd_inverse_sqrt, pd_sqrt, ComplexMatrix, C64};
use crate::pdl::{abcd, AbcdCoefficients, ChannelParams};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Allowed distance between the composed `Υ` and `diag(1, λ_x, λ_y, λ_z)`.
pub const NORMAL_FORM_TOL: f64 = 1e-9;

const PROBE_MIN_EIGENVALUE: f64 = 1e-12;

/// The six Pauli eigenstates and the maximally mixed state.
fn probe_states() -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    let kets = [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(h, 0.0), c(h, 0.0)],
        [c(h, 0.0), c(-h, 0.0)],
        [c(h, 0.0), c(0.0, h)],
        [c(h, 0.0), c(0.0, -h)],
    ];
    let mut states: Vec<ComplexMatrix> = kets.iter().map(|k| ComplexMatrix::outer(k)).collect();
    states.push(ComplexMatrix::identity(2).scale_real(0.5));
    states
}

/// Smallest output eigenvalue of `Λ` over the probe states.
pub fn probe_min_eigenvalue(ptm: &PauliTransferMatrix) -> Result<f64> {
    let mut min = f64::INFINITY;
    for rho in probe_states() {
        min = min.min(hermitian_eigen(&ptm.apply(&rho)?)?.min_eigenvalue());
    }
    Ok(min)
}

/// Finite-probe test for strict positivity: every probe state is mapped to a
/// positive definite operator.
pub fn is_positivity_improving(ptm: &PauliTransferMatrix) -> Result<bool> {
    Ok(probe_min_eigenvalue(ptm)? > PROBE_MIN_EIGENVALUE)
}

/// One application of `F[S] = (Λ[(Λ†[S])⁻¹])⁻¹`.
pub fn fixed_point_map(ptm: &PauliTransferMatrix, s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let inner = pd_inverse(&ptm.dual().apply(s)?)?;
    pd_inverse(&ptm.apply(&inner)?)
}

fn require_pd_image(ptm: &PauliTransferMatrix, which: &str) -> Result<()> {
    let min = hermitian_eigen(&ptm.apply(&ComplexMatrix::identity(2))?)?.min_eigenvalue();
    if !(min > PROBE_MIN_EIGENVALUE) {
        return Err(Error::NotPositivityImproving(format!("{which}[I] has smallest eigenvalue {min:e}")));
    }
    Ok(())
}

/// Iterates `S ← F[S]` from `S₀ = I`, rescaling to `tr S = 2` after every
/// step, until `‖F[S] − S‖_max ≤ tol`.
///
/// The map only has to send positive definite operators to positive
/// definite ones (checked through `Λ[I]` and `Λ†[I]`), so invertible
/// single-Kraus maps are accepted; they fix every `S`.
pub fn fixed_point_iterate(ptm: &PauliTransferMatrix, tol: f64, max_iter: usize) -> Result<ComplexMatrix> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    require_pd_image(ptm, "Λ")?;
    require_pd_image(&ptm.dual(), "Λ†")?;

    let mut s = ComplexMatrix::identity(2);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = fixed_point_map(ptm, &s)?;
        let next = next.scale_real(2.0 / next.trace().re);
        residual = next.max_abs_diff(&s);
        s = next;
        if residual <= tol {
            return Ok(s);
        }
    }
    Err(Error::FixedPointNoConvergence { iterations: max_iter, residual })
}

/// Ansatz coefficient `s` in `S = I + s σ_z`:
/// `s = −(a + d − √((a+d)² − 4b²)) / (2b)`, evaluated in the rationalized
/// form `−2b / (a + d + √((a+d)² − 4b²))`, which has no cancellation at
/// small `b`.
pub fn closed_form_s(co: &AbcdCoefficients) -> Result<f64> {
    let sum = co.a + co.d;
    let twice_b = 2.0 * co.b.abs();
    if !(sum > 0.0) || sum < twice_b * (1.0 - 1e-12) {
        return Err(Error::ModelViolation { sum, twice_b });
    }
    if co.b.abs() < 1e-14 * sum {
        return Ok(0.0);
    }
    let s = -2.0 * co.b / (sum + co.sqrt_disc);
    if !(s.abs() < 1.0) {
        return Err(Error::DegenerateScaling(1.0 - s.abs()));
    }
    Ok(s)
}

/// `[λ_x, λ_y, λ_z]` of the unital normal form:
/// `λ_x = λ_y = 2c / (a − d + √((a+d)² − 4b²))`,
/// `λ_z = 4(ad − b²) / (a − d + √((a+d)² − 4b²))²`.
pub fn unital_parameters(co: &AbcdCoefficients) -> Result<[f64; 3]> {
    let den = co.a - co.d + co.sqrt_disc;
    if !(den > 0.0) {
        return Err(Error::DegenerateScaling(den));
    }
    let lx = 2.0 * co.c / den;
    let ratio = 2.0 * co.sqrt_det / den;
    Ok([lx, lx, ratio * ratio])
}

/// Diagonal of `B = (Λ†[I + sσ_z])^{-1/2}`, i.e. the reciprocal square roots
/// of `a + b + s(b + d)` and `a − b + s(b − d)`.
pub fn scaling_b_diagonal(co: &AbcdCoefficients, s: f64) -> Result<[f64; 2]> {
    let h = co.a + co.b + s * (co.b + co.d);
    let v = co.a - co.b + s * (co.b - co.d);
    for r in [h, v] {
        if !(r > 0.0) {
            return Err(Error::DegenerateScaling(r));
        }
    }
    Ok([1.0 / h.sqrt(), 1.0 / v.sqrt()])
}

/// Sinkhorn normal form of one loss-and-noise line at a fixed time.
#[derive(Debug, Clone)]
pub struct SinkhornDecomposition {
    pub coefficients: AbcdCoefficients,
    pub s: f64,
    pub a_op: ComplexMatrix,
    pub b_op: ComplexMatrix,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
    /// `Φ_A ∘ Λ ∘ Φ_B`, composed numerically.
    pub upsilon: PauliTransferMatrix,
    /// `max |Υ − diag(1, λ_x, λ_y, λ_z)|` over PTM entries.
    pub residual: f64,
}

impl SinkhornDecomposition {
    pub fn lambdas(&self) -> [f64; 3] {
        [self.lambda_x, self.lambda_y, self.lambda_z]
    }

    pub fn a_diagonal(&self) -> [f64; 2] {
        [self.a_op[(0, 0)].re, self.a_op[(1, 1)].re]
    }

    pub fn b_diagonal(&self) -> [f64; 2] {
        [self.b_op[(0, 0)].re, self.b_op[(1, 1)].re]
    }

    pub fn original(&self) -> PauliTransferMatrix {
        self.coefficients.ptm()
    }

    /// `Φ_{A⁻¹} ∘ Υ ∘ Φ_{B⁻¹}`, which should give back `Λ`.
    pub fn reconstruct(&self) -> Result<PauliTransferMatrix> {
        let a_inv = PauliTransferMatrix::sandwich(&pd_inverse(&self.a_op)?)?;
        let b_inv = PauliTransferMatrix::sandwich(&pd_inverse(&self.b_op)?)?;
        Ok(a_inv.compose(&self.upsilon.compose(&b_inv)))
    }
}

fn normal_form(ptm: &PauliTransferMatrix, a_op: &ComplexMatrix, b_op: &ComplexMatrix) -> Result<PauliTransferMatrix> {
    let phi_a = PauliTransferMatrix::sandwich(a_op)?;
    let phi_b = PauliTransferMatrix::sandwich(b_op)?;
    Ok(phi_a.compose(&ptm.compose(&phi_b)))
}

/// Closed-form Sinkhorn normal form of the loss-and-noise line at time `t`.
///
/// At `t = 0` the map is the identity and the decomposition is trivial.
pub fn decompose(params: &ChannelParams, t: f64) -> Result<SinkhornDecomposition> {
    let co = abcd(params, t)?;
    let ptm = co.ptm();
    if t == 0.0 {
        let id = ComplexMatrix::identity(2);
        return Ok(SinkhornDecomposition {
            coefficients: co,
            s: 0.0,
            a_op: id.clone(),
            b_op: id,
            lambda_x: 1.0,
            lambda_y: 1.0,
            lambda_z: 1.0,
            upsilon: ptm,
            residual: 0.0,
        });
    }

    let s = closed_form_s(&co)?;
    let a_op = ComplexMatrix::real_diag(&[(1.0 + s).sqrt(), (1.0 - s).sqrt()]);
    let b_op = ComplexMatrix::real_diag(&scaling_b_diagonal(&co, s)?);
    let [lambda_x, lambda_y, lambda_z] = unital_parameters(&co)?;
    let upsilon = normal_form(&ptm, &a_op, &b_op)?;
    let residual = upsilon.max_abs_diff(&PauliTransferMatrix::diagonal([1.0, lambda_x, lambda_y, lambda_z]));
    if !(residual <= NORMAL_FORM_TOL) {
        return Err(Error::SinkhornResidual(residual));
    }
    Ok(SinkhornDecomposition { coefficients: co, s, a_op, b_op, lambda_x, lambda_y, lambda_z, upsilon, residual })
}

/// Normal form of an arbitrary qubit map, through the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct IterativeDecomposition {
    /// Fixed point of `F`, in the `tr S = 2` gauge.
    pub s_op: ComplexMatrix,
    pub a_op: ComplexMatrix,
    pub b_op: ComplexMatrix,
    pub upsilon: PauliTransferMatrix,
}

pub fn decompose_iterative(ptm: &PauliTransferMatrix, tol: f64, max_iter: usize) -> Result<IterativeDecomposition> {
    let s_op = fixed_point_iterate(ptm, tol, max_iter)?;
    let a_op = pd_sqrt(&s_op)?;
    let b_op = pd_inverse_sqrt(&ptm.dual().apply(&s_op)?)?;
    let upsilon = normal_form(ptm, &a_op, &b_op)?;
    Ok(IterativeDecomposition { s_op, a_op, b_op, upsilon })
}
