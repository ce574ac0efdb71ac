//! Qubit linear maps in the Pauli transfer matrix representation.
//!
//! A map `Λ` is stored as the real 4×4 matrix `M_ij = ½ tr[σ_i Λ[σ_j]]`
//! with indices ordered `(0, x, y, z)` and `σ_0 = I`. Composition is matrix
//! multiplication, the dual map is the transpose, and a two-qubit product
//! map `Λ₁ ⊗ Λ₂` acts on the Pauli coefficient matrix as `M₁ R M₂ᵀ`.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{hermitian_eigen, kron, ComplexMatrix, C64};

/// Tolerance used by every channel predicate.
pub const PREDICATE_TOL: f64 = 1e-9;

/// `σ_k` for `k = 0, 1, 2, 3` (identity, x, y, z).
pub fn pauli(k: usize) -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let entries = match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => panic!("Pauli index {k} out of range"),
    };
    ComplexMatrix::from_row_major(2, entries.to_vec()).expect("2x2")
}

fn pauli_basis() -> [ComplexMatrix; 4] {
    [pauli(0), pauli(1), pauli(2), pauli(3)]
}

/// `tr[a b]` without forming the product.
fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Real 4×4 Pauli transfer matrix of a qubit map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliTransferMatrix(pub [[f64; 4]; 4]);

impl Index<(usize, usize)> for PauliTransferMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl PauliTransferMatrix {
    pub fn identity() -> Self {
        Self::diagonal([1.0; 4])
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for k in 0..4 {
            m[k][k] = d[k];
        }
        Self(m)
    }

    /// PTM of `ρ ↦ X ρ X†`.
    pub fn sandwich(x: &ComplexMatrix) -> Result<Self> {
        x.expect_dim(2)?;
        let basis = pauli_basis();
        let xd = x.adjoint();
        let mut m = [[0.0; 4]; 4];
        for j in 0..4 {
            let image = &(x * &basis[j]) * &xd;
            for i in 0..4 {
                m[i][j] = 0.5 * trace_of_product(&basis[i], &image).re;
            }
        }
        Ok(Self(m))
    }

    /// `outer ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (0..4).map(|k| self.0[i][k] * inner.0[k][j]).sum();
            }
        }
        Self(m)
    }

    /// The dual map with respect to the Hilbert–Schmidt inner product.
    pub fn dual(&self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.0[j][i];
            }
        }
        Self(m)
    }

    pub fn scaled(&self, p: f64) -> Self {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|x| *x *= p);
        Self(m)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Applies the map to a 2×2 operator (linear extension, so non-Hermitian
    /// inputs are fine too).
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        rho.expect_dim(2)?;
        let basis = pauli_basis();
        let r: Vec<C64> = basis.iter().map(|s| trace_of_product(s, rho)).collect();
        let mut out = ComplexMatrix::zeros(2);
        for i in 0..4 {
            let coeff: C64 = (0..4).map(|j| r[j] * self.0[i][j]).sum::<C64>() * 0.5;
            out = &out + &basis[i].scale(coeff);
        }
        Ok(out)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ[|i⟩⟨j|]`.
    pub fn choi(&self) -> Result<ComplexMatrix> {
        let mut c = ComplexMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = ComplexMatrix::zeros(2);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let block = self.apply(&unit)?;
                for k in 0..2 {
                    for l in 0..2 {
                        c[(2 * i + k, 2 * j + l)] = block[(k, l)];
                    }
                }
            }
        }
        Ok(c)
    }

    /// Complete positivity: Choi spectrum bounded below by `-1e-9`.
    pub fn is_cp(&self) -> Result<bool> {
        Ok(hermitian_eigen(&self.choi()?)?.min_eigenvalue() >= -PREDICATE_TOL)
    }

    /// `I - Λ†[I] ⪰ 0`. With `Λ†[I] = m00 I + Σ_k m0k σ_k`, the smallest
    /// eigenvalue of the difference is `1 - m00 - |(m01, m02, m03)|`.
    pub fn is_trace_nonincreasing(&self) -> bool {
        let row = self.0[0];
        let bloch = (row[1] * row[1] + row[2] * row[2] + row[3] * row[3]).sqrt();
        1.0 - row[0] - bloch >= -PREDICATE_TOL
    }

    pub fn is_trace_preserving(&self) -> bool {
        let row = self.0[0];
        (row[0] - 1.0).abs() <= PREDICATE_TOL && row[1..].iter().all(|x| x.abs() <= PREDICATE_TOL)
    }

    pub fn is_unital(&self) -> bool {
        (self.0[0][0] - 1.0).abs() <= PREDICATE_TOL && (1..4).all(|i| self.0[i][0].abs() <= PREDICATE_TOL)
    }

    /// Residual `max(|Λ†[I] - I|, |Λ[I] - I|)` in PTM entries.
    pub fn unital_tp_residual(&self) -> f64 {
        let mut r = (self.0[0][0] - 1.0).abs();
        for k in 1..4 {
            r = r.max(self.0[0][k].abs()).max(self.0[k][0].abs());
        }
        r
    }
}

/// Real coefficients `R_ij = tr[(σ_i ⊗ σ_j) ρ]` of a two-qubit operator.
pub fn two_qubit_coefficients(rho: &ComplexMatrix) -> Result<[[C64; 4]; 4]> {
    rho.expect_dim(4)?;
    let basis = pauli_basis();
    let mut r = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = trace_of_product(&kron(&basis[i], &basis[j]), rho);
        }
    }
    Ok(r)
}

/// Inverse of [`two_qubit_coefficients`]: `¼ Σ_ij R_ij σ_i ⊗ σ_j`.
pub fn from_two_qubit_coefficients(r: &[[C64; 4]; 4]) -> ComplexMatrix {
    let basis = pauli_basis();
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            if r[i][j] == C64::new(0.0, 0.0) {
                continue;
            }
            out = &out + &kron(&basis[i], &basis[j]).scale(r[i][j] * 0.25);
        }
    }
    out
}

/// `(Λ₁ ⊗ Λ₂)[ρ₁₂]` through the coefficient sandwich `R' = M₁ R M₂ᵀ`.
pub fn apply_two_qubit(
    first: &PauliTransferMatrix,
    second: &PauliTransferMatrix,
    rho12: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let r = two_qubit_coefficients(rho12)?;
    let mut left = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            left[i][j] = (0..4).map(|k| r[k][j] * first.0[i][k]).sum();
        }
    }
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| left[i][k] * second.0[j][k]).sum();
        }
    }
    Ok(from_two_qubit_coefficients(&out))
}
