//! Depolarization combined with polarization-dependent loss.
//!
//! One polarization qubit (`|H⟩ ≡ |0⟩`, `|V⟩ ≡ |1⟩`) evolves under
//!
//! ```text
//! dρ/dt = -½ {γ_H |H⟩⟨H| + γ_V |V⟩⟨V|, ρ} + (γ/4) Σ_k (σ_k ρ σ_k - ρ)
//! ```
//!
//! whose Pauli transfer matrix has the closed form
//!
//! ```text
//!        ⎡ a 0 0 b ⎤
//! M(t) = ⎢ 0 c 0 0 ⎥
//!        ⎢ 0 0 c 0 ⎥
//!        ⎣ b 0 0 d ⎦
//! ```
//!
//! [`abcd`] evaluates the entries, [`ptm_via_integration`] integrates the
//! master equation directly with RK4 and is kept as an independent check.

use serde::{Deserialize, Serialize};

use crate::channel::PauliTransferMatrix;
use crate::error::{Error, Result};
use crate::linalg::{check_density_operator, ComplexMatrix, C64};

/// Loss and noise rates of one communication line, in reciprocal time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub gamma_h: f64,
    pub gamma_v: f64,
    pub gamma: f64,
}

impl ChannelParams {
    pub fn new(gamma_h: f64, gamma_v: f64, gamma: f64) -> Result<Self> {
        let p = Self { gamma_h, gamma_v, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Pure depolarization at rate `gamma`.
    pub fn depolarizing(gamma: f64) -> Result<Self> {
        Self::new(0.0, 0.0, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma_h", self.gamma_h), ("gamma_v", self.gamma_v), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }

    pub fn total_rate(&self) -> f64 {
        self.gamma + self.gamma_h + self.gamma_v
    }

    pub fn max_rate(&self) -> f64 {
        self.gamma.max(self.gamma_h).max(self.gamma_v)
    }

    /// `Γ = √(γ² + (γ_H − γ_V)²)`.
    pub fn gamma_eff(&self) -> f64 {
        self.gamma.hypot(self.gamma_h - self.gamma_v)
    }
}

/// Nonzero entries of the transfer matrix at time `t`.
///
/// `sqrt_det` and `sqrt_disc` hold `√(ad − b²)` and `√((a+d)² − 4b²)`.
/// [`abcd`] fills them from their closed forms (`e^{-(γ+γ_H+γ_V)t/2}` and
/// `2√(E² + γ²E²sinh²(Γt/2)/Γ²)`), which stay accurate at long times where
/// forming them from `a`, `b`, `d` cancels catastrophically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcdCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub t: f64,
    pub sqrt_det: f64,
    pub sqrt_disc: f64,
}

impl AbcdCoefficients {
    /// Wraps raw entries; the derived roots are formed directly from them.
    pub fn from_entries(a: f64, b: f64, c: f64, d: f64, t: f64) -> Self {
        let det = a * d - b * b;
        let disc = (a + d + 2.0 * b) * (a + d - 2.0 * b);
        Self { a, b, c, d, t, sqrt_det: det.max(0.0).sqrt(), sqrt_disc: disc.max(0.0).sqrt() }
    }

    pub fn ptm(&self) -> PauliTransferMatrix {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        PauliTransferMatrix([[a, 0.0, 0.0, b], [0.0, c, 0.0, 0.0], [0.0, 0.0, c, 0.0], [b, 0.0, 0.0, d]])
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

/// `sinh(x)/x`, exact at the origin.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Closed-form transfer matrix entries.
pub fn abcd(params: &ChannelParams, t: f64) -> Result<AbcdCoefficients> {
    params.validate()?;
    check_time(t)?;
    let ChannelParams { gamma_h, gamma_v, gamma } = *params;
    let delta = gamma_h - gamma_v;
    let big_gamma = params.gamma_eff();
    let x = 0.5 * big_gamma * t;
    let k = 0.5 * params.total_rate() * t;
    let e = (-k).exp();
    let c = (-(2.0 * gamma + gamma_h + gamma_v) * t / 2.0).exp();

    // es = E·sinh(x)/Γ, well defined as Γ → 0
    let (a, b, d, es) = if x < 0.5 {
        let es = e * 0.5 * t * sinhc(x);
        let ec = e * x.cosh();
        (ec + gamma * es, -delta * es, ec - gamma * es, es)
    } else {
        // E·e^{±x} without overflow; 1 − γ/Γ = Δ²/(Γ(Γ+γ)) avoids cancellation in d
        let ep = (x - k).exp();
        let em = (-x - k).exp();
        let g = gamma / big_gamma;
        let one_minus_g = delta * delta / (big_gamma * (big_gamma + gamma));
        let a = 0.5 * (ep * (1.0 + g) + em * one_minus_g);
        let d = 0.5 * (ep * one_minus_g + em * (1.0 + g));
        let es = 0.5 * (ep - em) / big_gamma;
        (a, -delta * es, d, es)
    };
    let sqrt_disc = 2.0 * e.hypot(gamma * es);
    Ok(AbcdCoefficients { a, b, c, d, t, sqrt_det: e, sqrt_disc })
}

/// Closed-form transfer matrix `M(t)`.
pub fn ptm_at(params: &ChannelParams, t: f64) -> Result<PauliTransferMatrix> {
    Ok(abcd(params, t)?.ptm())
}

/// Step size used by the integration oracle: `1e-4` of the fastest
/// timescale, coarsened only if `t` would need more than `10⁷` steps.
pub fn default_dt(params: &ChannelParams, t: f64) -> f64 {
    let rate = params.max_rate();
    let dt = if rate > 0.0 { 1e-4 / rate } else { 1e-4 };
    dt.max(t / 1e7)
}

type Op2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };
const SIGMAS: [Op2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64 { re: 0.0, im: -1.0 }], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64 { re: -1.0, im: 0.0 }]],
];

fn mm(a: &Op2, b: &Op2) -> Op2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn axpy(y: &Op2, h: f64, x: &Op2) -> Op2 {
    let mut out = *y;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += x[i][j] * h;
        }
    }
    out
}

/// Right-hand side of the master equation, written out term by term.
fn lindblad_rhs(params: &ChannelParams, rho: &Op2) -> Op2 {
    let loss: Op2 = [[C64::new(params.gamma_h, 0.0), ZERO], [ZERO, C64::new(params.gamma_v, 0.0)]];
    let lr = mm(&loss, rho);
    let rl = mm(rho, &loss);
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = -(lr[i][j] + rl[i][j]) * 0.5;
        }
    }
    let w = params.gamma / 4.0;
    for s in &SIGMAS {
        let srs = mm(&mm(s, rho), s);
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += (srs[i][j] - rho[i][j]) * w;
            }
        }
    }
    out
}

fn rk4_evolve(params: &ChannelParams, rho0: Op2, t: f64, dt: f64) -> Op2 {
    let steps = (t / dt - 1e-9).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    let mut rho = rho0;
    for _ in 0..steps {
        let k1 = lindblad_rhs(params, &rho);
        let k2 = lindblad_rhs(params, &axpy(&rho, 0.5 * h, &k1));
        let k3 = lindblad_rhs(params, &axpy(&rho, 0.5 * h, &k2));
        let k4 = lindblad_rhs(params, &axpy(&rho, h, &k3));
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += (k1[i][j] + (k2[i][j] + k3[i][j]) * 2.0 + k4[i][j]) * (h / 6.0);
            }
        }
    }
    rho
}

/// Transfer matrix obtained by integrating the master equation with
/// classical RK4 from each Pauli operator and reading off
/// `M_ij = ½ tr[σ_i Λ[σ_j]]`.
pub fn ptm_via_integration(params: &ChannelParams, t: f64, dt: f64) -> Result<PauliTransferMatrix> {
    params.validate()?;
    check_time(t)?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStep(dt));
    }
    if t == 0.0 {
        return Ok(PauliTransferMatrix::identity());
    }
    let identity: Op2 = [[ONE, ZERO], [ZERO, ONE]];
    let basis = [identity, SIGMAS[0], SIGMAS[1], SIGMAS[2]];
    let mut m = [[0.0; 4]; 4];
    for (j, sj) in basis.iter().enumerate() {
        let out = rk4_evolve(params, *sj, t, dt);
        for (i, si) in basis.iter().enumerate() {
            let p = mm(si, &out);
            m[i][j] = 0.5 * (p[0][0] + p[1][1]).re;
        }
    }
    Ok(PauliTransferMatrix(m))
}

/// Survival probability `tr[Λ[ρ]]` of a normalized qubit state.
pub fn detection_probability(ptm: &PauliTransferMatrix, rho: &ComplexMatrix) -> Result<f64> {
    rho.expect_dim(2)?;
    let rho = check_density_operator(rho, true)?;
    Ok(ptm.apply(&rho)?.trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(gh: f64, gv: f64, g: f64) -> ChannelParams {
        ChannelParams::new(gh, gv, g).unwrap()
    }

    #[test]
    fn identity_at_time_zero() {
        for params in [p(1.0, 5.0, 1.0), p(0.0, 0.0, 0.0), p(3.0, 0.5, 0.0)] {
            let co = abcd(&params, 0.0).unwrap();
            assert_eq!((co.a, co.b, co.c, co.d), (1.0, 0.0, 1.0, 1.0));
            assert_eq!(ptm_at(&params, 0.0).unwrap(), PauliTransferMatrix::identity());
            assert_eq!(ptm_via_integration(&params, 0.0, 1e-3).unwrap(), PauliTransferMatrix::identity());
        }
    }

    #[test]
    fn uniform_attenuation() {
        let g = 0.7;
        for t in [0.1, 1.0, 3.0] {
            let co = abcd(&p(g, g, 0.0), t).unwrap();
            let e = (-g * t).exp();
            assert!((co.a - e).abs() < 1e-15 && co.b == 0.0);
            assert!((co.c - e).abs() < 1e-15 && (co.d - e).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_direct_expression() {
        // the textbook cosh/sinh expressions, fine at moderate Γt
        for &(gh, gv, g) in &[(1.0, 5.0, 1.0), (0.5, 0.0, 5.0), (5.0, 1.0, 0.0), (2.0, 2.0, 1.0)] {
            let params = p(gh, gv, g);
            for t in [1e-9, 1e-4, 0.05, 0.3, 1.0, 2.5] {
                let co = abcd(&params, t).unwrap();
                let big = params.gamma_eff();
                let e = (-(g + gh + gv) * t / 2.0).exp();
                let (ch, sh) = ((big * t / 2.0).cosh(), (big * t / 2.0).sinh());
                let a = e * (ch + g / big * sh);
                let b = -(gh - gv) / big * e * sh;
                let d = e * (ch - g / big * sh);
                let tol = 1e-14;
                assert!((co.a - a).abs() < tol, "a {params:?} {t}");
                assert!((co.b - b).abs() < tol, "b {params:?} {t}");
                assert!((co.d - d).abs() < tol, "d {params:?} {t}");
                assert!((co.sqrt_det - (a * d - b * b).sqrt()).abs() < 1e-12);
                assert!((co.sqrt_disc - ((a + d).powi(2) - 4.0 * b * b).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_rk4_at_reference_point() {
        let params = p(1.0, 5.0, 1.0);
        let analytic = ptm_at(&params, 0.3).unwrap();
        let oracle = ptm_via_integration(&params, 0.3, 1e-4).unwrap();
        assert!(analytic.max_abs_diff(&oracle) < 1e-8);
        // numbers from an independent matrix-exponential evaluation of the generator
        assert!((analytic[(0, 0)] - 0.4749255081391005).abs() < 1e-12);
        assert!((analytic[(0, 3)] - 0.22360610253878083).abs() < 1e-12);
        assert!((analytic[(1, 1)] - 0.3011942119122021).abs() < 1e-12);
        assert!((analytic[(3, 3)] - 0.36312245686971).abs() < 1e-12);
    }

    #[test]
    fn pure_depolarization_both_paths() {
        let params = p(0.0, 0.0, 0.8);
        for t in [0.1, 0.5, 1.0] {
            let e = (-0.8_f64 * t).exp();
            let want = PauliTransferMatrix::diagonal([1.0, e, e, e]);
            assert!(ptm_at(&params, t).unwrap().max_abs_diff(&want) < 1e-15);
            assert!(ptm_via_integration(&params, t, 1e-4).unwrap().max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn sparsity_and_sign_of_b() {
        for t in [0.1, 1.0, 4.0] {
            let m = ptm_at(&p(3.0, 1.0, 0.5), t).unwrap();
            assert!(m[(0, 3)] < 0.0);
            for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (1, 3), (2, 0), (2, 1), (2, 3), (3, 1), (3, 2)] {
                assert_eq!(m[(i, j)], 0.0);
            }
            let m = ptm_at(&p(1.0, 3.0, 0.5), t).unwrap();
            assert!(m[(0, 3)] > 0.0);
            let m = ptm_at(&p(2.0, 2.0, 0.5), t).unwrap();
            assert_eq!(m[(0, 3)], 0.0);
        }
    }

    #[test]
    fn long_times_stay_finite() {
        let co = abcd(&p(0.0, 5.0, 0.01), 300.0).unwrap();
        for v in [co.a, co.b, co.c, co.d, co.sqrt_det, co.sqrt_disc] {
            assert!(v.is_finite());
        }
        assert!(co.a + co.d >= 2.0 * co.b.abs());
    }

    #[test]
    fn detection_probabilities() {
        let params = p(0.6, 2.0, 0.0);
        let t = 0.9;
        let m = ptm_at(&params, t).unwrap();
        let h = ComplexMatrix::real_diag(&[1.0, 0.0]);
        assert!((detection_probability(&m, &h).unwrap() - (-0.6 * t).exp()).abs() < 1e-15);
        let oracle = ptm_via_integration(&params, t, 1e-4).unwrap();
        assert!((detection_probability(&oracle, &h).unwrap() - (-0.6 * t).exp()).abs() < 1e-12);

        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((detection_probability(&m, &mixed).unwrap() - m[(0, 0)]).abs() < 1e-15);
        assert_eq!(detection_probability(&ptm_at(&params, 0.0).unwrap(), &mixed).unwrap(), 1.0);

        assert!(detection_probability(&m, &ComplexMatrix::identity(2)).is_err());
        assert!(detection_probability(&m, &ComplexMatrix::real_diag(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(ChannelParams::new(-1.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, f64::NAN, 0.0).is_err());
        assert!(abcd(&p(1.0, 1.0, 1.0), -0.1).is_err());
        assert!(ptm_via_integration(&p(1.0, 1.0, 1.0), 1.0, 0.0).is_err());
        assert!(ptm_via_integration(&p(1.0, 1.0, 1.0), 1.0, -1e-3).is_err());
    }
}
