//! Dense complex linear algebra for the small Hermitian problems of the crate.
//!
//! Everything here works on square matrices stored row-major. States and
//! operators are 2×2 or 4×4; the Kronecker product happily builds larger
//! matrices, and the Jacobi eigensolver has no hard size limit, but nothing
//! is tuned for anything beyond a few dozen rows.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute Hermiticity tolerance, scaled by `max(1, ‖M‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted by the positive-definite spectral functions.
pub const PD_MIN_EIGENVALUE: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect();
        Self { dim: N, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&e)
    }

    /// The projector-like outer product `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::outer2(v, v)
    }

    /// `|u⟩⟨v|`.
    pub fn outer2(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of vectors of different length");
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on matrices of different dimension");
        self.data.iter().zip(&other.data).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
    }

    /// `‖M - M†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Returns `(M + M†)/2`, or an error when `M` is further from Hermitian
    /// than [`HERMITIAN_TOL`] allows.
    pub fn hermitize(&self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let n = self.dim;
        let mut m = self.clone();
        for i in 0..n {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Ok(m)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let n = self.dim;
        Ok((0..n).map(|i| (0..n).map(|j| self[(i, j)] * v[j]).sum()).collect())
    }

    /// Errors unless the matrix is `dim × dim`.
    pub fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim });
        }
        Ok(())
    }

    fn same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// The operator impls panic on dimension mismatch; use the `checked_*`
// methods where the dimensions are not known statically.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix dimensions differ")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix dimensions differ")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix dimensions differ")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product: `(a ⊗ b)[(i·n_b + k, j·n_b + l)] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial transpose on the second qubit of a 4×4 two-qubit operator:
/// each 2×2 block is transposed in place.
pub fn partial_transpose_second(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    rho.expect_dim(4)?;
    let mut out = ComplexMatrix::zeros(4);
    for bi in 0..2 {
        for bj in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * bi + k, 2 * bj + l)] = rho[(2 * bi + l, 2 * bj + k)];
                }
            }
        }
    }
    Ok(out)
}

/// Spectrum of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl HermitianEigen {
    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// Rebuilds `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized first; inputs further than [`HERMITIAN_TOL`]
/// from Hermitian are rejected.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut a = m.hermitize()?;
    let n = a.dim;
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        if scale == 0.0 || off_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off_norm: off_norm(&a) });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = order.iter().map(|&k| (0..n).map(|i| v[(i, k)]).collect()).collect();
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// One Jacobi rotation annihilating `a[p,q]`: `a ← U† a U`, `v ← v U`, with
/// `U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() { 0.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = a.dim;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// `‖M‖₁ = Σ|λ_k|` for Hermitian `M`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

fn pd_spectral(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    let min = eig.min_eigenvalue();
    if !(min > PD_MIN_EIGENVALUE) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.reconstruct_with(f))
}

pub fn pd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    pd_spectral(m, f64::sqrt)
}

pub fn pd_inverse_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    pd_spectral(m, |x| 1.0 / x.sqrt())
}

pub fn pd_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    pd_spectral(m, |x| 1.0 / x)
}

/// Checks that `rho` is a (sub)normalized density operator: Hermitian,
/// positive semidefinite to `-1e-9`, trace in `(0, 1 + 1e-12]`, and trace
/// `1 ± 1e-10` when `unit_trace` is set. Returns the symmetrized matrix.
pub fn check_density_operator(rho: &ComplexMatrix, unit_trace: bool) -> Result<ComplexMatrix> {
    let rho = rho.hermitize().map_err(|e| Error::InvalidState(e.to_string()))?;
    let tr = rho.trace().re;
    if unit_trace && (tr - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    if !(tr > 0.0 && tr <= 1.0 + 1e-12) {
        return Err(Error::InvalidState(format!("trace {tr} outside (0, 1]")));
    }
    let min = hermitian_eigen(&rho)?.min_eigenvalue();
    if min < -1e-9 {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
    }

    fn sz() -> ComplexMatrix {
        ComplexMatrix::real_diag(&[1.0, -1.0])
    }

    fn psi_plus() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(kron(&sz(), &sz()), ComplexMatrix::real_diag(&[1.0, -1.0, -1.0, 1.0]));

        let xx = kron(&sx(), &sx());
        let ket00 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = xx.mul_vec(&ket00).unwrap();
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(partial_transpose_second(&mixed).unwrap(), mixed);

        let pt = partial_transpose_second(&psi_plus()).unwrap();
        let eig = hermitian_eigen(&pt).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-14);

        assert!(partial_transpose_second(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn pauli_spectra() {
        let e = hermitian_eigen(&sz()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, -1.0]);

        let e = hermitian_eigen(&sx()).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // eigenvectors are fixed up to a global phase
        let plus = &e.eigenvectors[0];
        let overlap = (plus[0] * h + plus[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
        let minus = &e.eigenvectors[1];
        let overlap = (minus[0] * h - minus[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // σ_y has eigenvalues ±1 with complex eigenvectors
        let mut sy = ComplexMatrix::zeros(2);
        sy[(0, 1)] = c(0.0, -1.0);
        sy[(1, 0)] = c(0.0, 1.0);
        let e = hermitian_eigen(&sy).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        for (lam, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
            let mv = sy.mul_vec(v).unwrap();
            for i in 0..2 {
                assert!((mv[i] - v[i] * lam).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
        assert!(trace_norm(&m).is_err());
    }

    #[test]
    fn small_drift_is_symmetrized() {
        let mut m = sz();
        m[(0, 1)] = c(1e-12, 0.0);
        assert!(hermitian_eigen(&m).is_ok());
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(4)).unwrap() - 4.0).abs() < 1e-15);
        assert!((trace_norm(&sz()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pd_functions_on_diagonal_inputs() {
        let i2 = ComplexMatrix::identity(2);
        assert!(pd_sqrt(&i2).unwrap().max_abs_diff(&i2) < 1e-15);

        let m = ComplexMatrix::real_diag(&[4.0, 9.0]);
        let want = ComplexMatrix::real_diag(&[0.5, 1.0 / 3.0]);
        assert!(pd_inverse_sqrt(&m).unwrap().max_abs_diff(&want) < 1e-15);

        let s = &i2 + &sz().scale_real(0.5);
        let want = ComplexMatrix::real_diag(&[1.5f64.sqrt(), 0.5f64.sqrt()]);
        assert!(pd_sqrt(&s).unwrap().max_abs_diff(&want) < 1e-15);

        let inv = pd_inverse(&m).unwrap();
        assert!(inv.max_abs_diff(&ComplexMatrix::real_diag(&[0.25, 1.0 / 9.0])) < 1e-15);
    }

    #[test]
    fn pd_functions_reject_indefinite() {
        assert!(matches!(pd_sqrt(&sz()), Err(Error::NotPositiveDefinite { .. })));
        assert!(pd_inverse(&ComplexMatrix::real_diag(&[1.0, 0.0])).is_err());
        assert!(pd_inverse_sqrt(&ComplexMatrix::real_diag(&[1.0, 1e-13])).is_err());
    }

    #[test]
    fn arithmetic_dimension_mismatch() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(4);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
        assert!(a.checked_sub(&b).is_err());
        assert!(ComplexMatrix::from_row_major(2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
