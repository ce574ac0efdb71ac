//! Test-side oracles and random samplers, kept independent of the library's
//! own numerics.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C64;
use qsink::linalg::ComplexMatrix;
use qsink::PauliTransferMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Haar-random unit vector in C^n.
pub fn haar_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gauss(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// `G G† / tr` with a complex Ginibre `G`.
pub fn ginibre_state(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_row_major(n, (0..n * n).map(|_| gauss(rng)).collect()).unwrap();
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_row_major(n, (0..n * n).map(|_| gauss(rng)).collect()).unwrap();
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random separable state: a convex mixture of up to 6 products of random
/// single-qubit states, mixed or pure.
pub fn separable_mixture(rng: &mut impl Rng) -> ComplexMatrix {
    let terms = rng.random_range(1..=6);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = ComplexMatrix::zeros(4);
    for w in weights {
        let local = |rng: &mut ChaCha8Rng| {
            if rng.random::<bool>() {
                ComplexMatrix::outer(&haar_vector(rng, 2))
            } else {
                ginibre_state(rng, 2)
            }
        };
        let mut sub = ChaCha8Rng::seed_from_u64(rng.random());
        let a = local(&mut sub);
        let b = local(&mut sub);
        rho = &rho + &naive_kron(&a, &b).scale_real(w / total);
    }
    rho
}

pub fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.dim(), b.dim());
    let mut data = vec![c(0.0); n * n * m * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    data[(i * m + k) * n * m + j * m + l] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    ComplexMatrix::from_row_major(n * m, data).unwrap()
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]` and classical two-sided Jacobi. Each eigenvalue
/// of the input appears twice in the embedding; this returns one copy of
/// each, ascending.
pub fn oracle_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Partial transpose on the second qubit by explicit index swap.
pub fn oracle_partial_transpose(rho: &ComplexMatrix) -> ComplexMatrix {
    let mut data = vec![c(0.0); 16];
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    data[(2 * a + b) * 4 + 2 * cc + d] = rho[(2 * a + d, 2 * cc + b)];
                }
            }
        }
    }
    ComplexMatrix::from_row_major(4, data).unwrap()
}

/// Negativity of a normalized two-qubit state from the oracle spectrum.
pub fn oracle_negativity(rho: &ComplexMatrix) -> f64 {
    let tr = rho.trace().re;
    let pt = oracle_partial_transpose(&rho.scale_real(1.0 / tr));
    -oracle_eigenvalues(&pt).into_iter().filter(|&x| x < 0.0).sum::<f64>()
}

fn pauli_entries(k: usize) -> [[C64; 2]; 2] {
    let (z, o, i) = (c(0.0), c(1.0), C64::new(0.0, 1.0));
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// `S[(a,c),(a',c')] = (Λ[|a'⟩⟨c'|])_{ac}` rebuilt from the Pauli expansion.
pub fn superoperator(m: &PauliTransferMatrix) -> [[C64; 4]; 4] {
    let mut s = [[c(0.0); 4]; 4];
    for a in 0..2 {
        for cc in 0..2 {
            for a2 in 0..2 {
                for c2 in 0..2 {
                    let mut acc = c(0.0);
                    for i in 0..4 {
                        for j in 0..4 {
                            acc += 0.5 * m.0[i][j] * pauli_entries(i)[a][cc] * pauli_entries(j)[c2][a2];
                        }
                    }
                    s[2 * a + cc][2 * a2 + c2] = acc;
                }
            }
        }
    }
    s
}

/// `(Λ₁ ⊗ Λ₂)[ρ]` through the full 16×16 product superoperator.
pub fn superoperator_apply(m1: &PauliTransferMatrix, m2: &PauliTransferMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let (s1, s2) = (superoperator(m1), superoperator(m2));
    let mut out = vec![c(0.0); 16];
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    let mut acc = c(0.0);
                    for a2 in 0..2 {
                        for b2 in 0..2 {
                            for c2 in 0..2 {
                                for d2 in 0..2 {
                                    acc += s1[2 * a + cc][2 * a2 + c2]
                                        * s2[2 * b + d][2 * b2 + d2]
                                        * rho[(2 * a2 + b2, 2 * c2 + d2)];
                                }
                            }
                        }
                    }
                    out[(2 * a + b) * 4 + 2 * cc + d] = acc;
                }
            }
        }
    }
    ComplexMatrix::from_row_major(4, out).unwrap()
}

type M2 = [[C64; 2]; 2];

fn mm(a: &M2, b: &M2) -> M2 {
    let mut r = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// Generator of the loss + depolarization semigroup in the Pauli basis.
pub fn pauli_generator(gamma_h: f64, gamma_v: f64, gamma: f64) -> [[f64; 4]; 4] {
    let k: M2 = [[c(gamma_h), c(0.0)], [c(0.0), c(gamma_v)]];
    let mut g = [[0.0; 4]; 4];
    for j in 0..4 {
        let x = pauli_entries(j);
        let kx = mm(&k, &x);
        let xk = mm(&x, &k);
        let mut l = [[c(0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                l[r][s] = -0.5 * (kx[r][s] + xk[r][s]) - 0.75 * gamma * x[r][s];
            }
        }
        for q in 1..4 {
            let sq = pauli_entries(q);
            let t = mm(&mm(&sq, &x), &sq);
            for r in 0..2 {
                for s in 0..2 {
                    l[r][s] += 0.25 * gamma * t[r][s];
                }
            }
        }
        for i in 0..4 {
            let si = pauli_entries(i);
            let tr = mm(&si, &l);
            g[i][j] = 0.5 * (tr[0][0] + tr[1][1]).re;
        }
    }
    g
}

fn mat4_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

/// `exp(G t)` by scaling and squaring a 30-term Taylor series.
pub fn expm_ptm(gamma_h: f64, gamma_v: f64, gamma: f64, t: f64) -> PauliTransferMatrix {
    let g = pauli_generator(gamma_h, gamma_v, gamma);
    let norm: f64 = g.iter().flat_map(|r| r.iter()).map(|x| x.abs()).sum::<f64>() * t;
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let h = t / 2f64.powi(squarings);
    let mut term = [[0.0; 4]; 4];
    let mut sum = [[0.0; 4]; 4];
    for i in 0..4 {
        term[i][i] = 1.0;
        sum[i][i] = 1.0;
    }
    let gh: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] * h));
    for k in 1..30 {
        term = mat4_mul(&term, &gh);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mat4_mul(&sum, &sum);
    }
    PauliTransferMatrix(sum)
}
