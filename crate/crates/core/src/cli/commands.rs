use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::config::{JobConfig, OutputFormat};
use super::{emit, SinkhornArgs, EXIT_NO_LIFETIME, EXIT_OK, EXIT_USAGE};
use crate::channel::PauliTransferMatrix;
use crate::entanglement::{
    default_search_limit, disentangling_time, evolve_conditional, max_lifetime, negativity, optimal_state,
    LifetimeResult, OptimalState, TwoQubitState,
};
use crate::error::Result;
use crate::linalg::C64;
use crate::pdl::{abcd, ChannelParams};
use crate::sinkhorn::{decompose, fixed_point_iterate, unital_parameters, DEFAULT_MAX_ITER, DEFAULT_TOL};

const DISENTANGLING_SCAN_POINTS: usize = 200;

fn complex_pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn fail(stderr: &mut dyn Write, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    EXIT_USAGE
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct LineLambdas {
    pub line1: [f64; 3],
    pub line2: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct LifetimeReport {
    pub line1: ChannelParams,
    pub line2: ChannelParams,
    /// Search limit actually used.
    pub t_max: f64,
    #[serde(flatten)]
    pub result: LifetimeResult,
    pub lambdas_at_tau: Option<LineLambdas>,
    /// When `|ψ₊⟩` itself stops being entangled, for comparison.
    pub psi_plus_disentangling_time: Option<f64>,
}

fn search_limit(cfg: &JobConfig) -> f64 {
    cfg.t_max.or_else(|| default_search_limit(&cfg.line1, &cfg.line2)).unwrap_or(0.0)
}

pub fn lifetime_report(cfg: &JobConfig) -> Result<LifetimeReport> {
    let result = max_lifetime(&cfg.line1, &cfg.line2, cfg.t_max)?;
    let (lambdas_at_tau, psi_plus_disentangling_time) = match result.tau {
        Some(tau) => {
            let lambdas = LineLambdas {
                line1: unital_parameters(&abcd(&cfg.line1, tau)?)?,
                line2: unital_parameters(&abcd(&cfg.line2, tau)?)?,
            };
            let t =
                disentangling_time(&cfg.line1, &cfg.line2, &TwoQubitState::psi_plus(), tau, DISENTANGLING_SCAN_POINTS)?;
            (Some(lambdas), t)
        }
        None => (None, None),
    };
    Ok(LifetimeReport {
        line1: cfg.line1,
        line2: cfg.line2,
        t_max: search_limit(cfg),
        result,
        lambdas_at_tau,
        psi_plus_disentangling_time,
    })
}

fn no_lifetime(stderr: &mut dyn Write, t_max: f64) -> i32 {
    let _ = writeln!(stderr, "no finite lifetime up to t_max = {t_max}");
    EXIT_NO_LIFETIME
}

/// Prints the lifetime report as JSON; exit 2 when no root exists up to `t_max`.
pub fn cmd_lifetime(cfg: &JobConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let report = match lifetime_report(cfg) {
        Ok(r) => r,
        Err(e) => return fail(stderr, e),
    };
    if let Err(e) = emit(&to_json(&report), cfg.output_path.as_ref(), stdout) {
        return fail(stderr, e);
    }
    if report.result.tau.is_none() {
        return no_lifetime(stderr, report.t_max);
    }
    EXIT_OK
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalStateReport {
    pub tau: f64,
    /// Amplitudes on `|HH⟩, |HV⟩, |VH⟩, |VV⟩` as `[re, im]`.
    pub psi: Vec<[f64; 2]>,
    /// Row-major `|ψ⟩⟨ψ|` as `[re, im]`.
    pub rho: Vec<[f64; 2]>,
    pub schmidt_coefficients: [f64; 2],
    pub b_first: [f64; 2],
    pub b_second: [f64; 2],
}

impl OptimalStateReport {
    fn new(tau: f64, opt: &OptimalState) -> Self {
        Self {
            tau,
            psi: complex_pairs(&opt.psi),
            rho: complex_pairs(opt.rho.as_slice()),
            schmidt_coefficients: opt.schmidt_coefficients,
            b_first: opt.b_first,
            b_second: opt.b_second,
        }
    }
}

pub fn cmd_optimal_state(cfg: &JobConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match max_lifetime(&cfg.line1, &cfg.line2, cfg.t_max) {
        Ok(r) => r,
        Err(e) => return fail(stderr, e),
    };
    let Some(tau) = result.tau else {
        return no_lifetime(stderr, search_limit(cfg));
    };
    let report = match optimal_state(&cfg.line1, &cfg.line2, tau) {
        Ok(opt) => OptimalStateReport::new(tau, &opt),
        Err(e) => return fail(stderr, e),
    };
    match emit(&to_json(&report), cfg.output_path.as_ref(), stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(stderr, e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveRow {
    pub t: f64,
    pub negativity_psi_plus: f64,
    pub negativity_optimal: f64,
    pub detection_prob_psi_plus: f64,
    pub detection_prob_optimal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativity_custom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection_prob_custom: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveTable {
    pub line1: ChannelParams,
    pub line2: ChannelParams,
    pub tau: f64,
    pub t_max: f64,
    pub rows: Vec<EvolveRow>,
}

/// Trajectories over `steps` equally spaced times in `[0, t_max]`
/// (`t_max` defaults to `2τ̃`). `None` when the lines have no finite lifetime,
/// since the optimal state is then undefined.
pub fn evolve_table(cfg: &JobConfig) -> Result<Option<EvolveTable>> {
    let (l1, l2) = (&cfg.line1, &cfg.line2);
    let Some(tau) = max_lifetime(l1, l2, None)?.tau else {
        return Ok(None);
    };
    let t_max = cfg.t_max.unwrap_or(2.0 * tau);
    let psi_plus = TwoQubitState::psi_plus();
    let optimal = optimal_state(l1, l2, tau)?.state();
    let custom = cfg.initial_state.custom_state()?;

    let point = |state: &TwoQubitState, t: f64| -> Result<(f64, f64)> {
        let (out, p) = evolve_conditional(l1, l2, state, t)?;
        Ok((negativity(&out)?, p))
    };
    let last = (cfg.steps - 1) as f64;
    let rows = (0..cfg.steps)
        .map(|k| {
            let t = if k + 1 == cfg.steps { t_max } else { t_max * k as f64 / last };
            let (n_plus, p_plus) = point(&psi_plus, t)?;
            let (n_opt, p_opt) = point(&optimal, t)?;
            let custom = custom.as_ref().map(|s| point(s, t)).transpose()?;
            Ok(EvolveRow {
                t,
                negativity_psi_plus: n_plus,
                negativity_optimal: n_opt,
                detection_prob_psi_plus: p_plus,
                detection_prob_optimal: p_opt,
                negativity_custom: custom.map(|c| c.0),
                detection_prob_custom: custom.map(|c| c.1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(EvolveTable { line1: *l1, line2: *l2, tau, t_max, rows }))
}

/// CSV with a header row; every number printed with 17 significant digits.
pub fn format_csv(table: &EvolveTable) -> String {
    let has_custom = table.rows.first().is_some_and(|r| r.negativity_custom.is_some());
    let mut out =
        String::from("t,negativity_psi_plus,negativity_optimal,detection_prob_psi_plus,detection_prob_optimal");
    if has_custom {
        out.push_str(",negativity_custom,detection_prob_custom");
    }
    out.push('\n');
    for r in &table.rows {
        let mut fields =
            vec![r.t, r.negativity_psi_plus, r.negativity_optimal, r.detection_prob_psi_plus, r.detection_prob_optimal];
        if has_custom {
            fields.push(r.negativity_custom.unwrap_or(f64::NAN));
            fields.push(r.detection_prob_custom.unwrap_or(f64::NAN));
        }
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn cmd_evolve(cfg: &JobConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let table = match evolve_table(cfg) {
        Ok(Some(t)) => t,
        Ok(None) => {
            let limit = default_search_limit(&cfg.line1, &cfg.line2).unwrap_or(0.0);
            return no_lifetime(stderr, limit);
        }
        Err(e) => return fail(stderr, e),
    };
    let text = match cfg.format {
        OutputFormat::Csv => format_csv(&table),
        OutputFormat::Json => to_json(&table),
    };
    match emit(&text, cfg.output_path.as_ref(), stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(stderr, e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SinkhornResiduals {
    /// `max |Υ − diag(1, λ_x, λ_y, λ_z)|`.
    pub normal_form: f64,
    /// Distance of `Υ` from unital and trace preserving.
    pub unital_tp: f64,
    /// `max |Φ_{A⁻¹} ∘ Υ ∘ Φ_{B⁻¹} − Λ|`.
    pub reconstruction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SinkhornReport {
    pub params: ChannelParams,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub s: f64,
    pub a_diagonal: [f64; 2],
    pub b_diagonal: [f64; 2],
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
    pub upsilon: PauliTransferMatrix,
    pub residuals: SinkhornResiduals,
    /// `s` from the fixed-point iteration, when it converges.
    pub iterated_s: Option<f64>,
}

pub fn sinkhorn_report(params: &ChannelParams, t: f64) -> Result<SinkhornReport> {
    let dec = decompose(params, t)?;
    let ptm = dec.original();
    let iterated_s =
        fixed_point_iterate(&ptm, DEFAULT_TOL, DEFAULT_MAX_ITER).ok().map(|s| 0.5 * (s[(0, 0)].re - s[(1, 1)].re));
    let co = dec.coefficients;
    Ok(SinkhornReport {
        params: *params,
        t,
        a: co.a,
        b: co.b,
        c: co.c,
        d: co.d,
        s: dec.s,
        a_diagonal: dec.a_diagonal(),
        b_diagonal: dec.b_diagonal(),
        lambda_x: dec.lambda_x,
        lambda_y: dec.lambda_y,
        lambda_z: dec.lambda_z,
        upsilon: dec.upsilon,
        residuals: SinkhornResiduals {
            normal_form: dec.residual,
            unital_tp: dec.upsilon.unital_tp_residual(),
            reconstruction: dec.reconstruct()?.max_abs_diff(&ptm),
        },
        iterated_s,
    })
}

pub fn cmd_sinkhorn(args: &SinkhornArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let report = ChannelParams::new(args.gh, args.gv, args.g).and_then(|p| sinkhorn_report(&p, args.t));
    match report {
        Ok(r) => match emit(&to_json(&r), args.out.as_ref(), stdout) {
            Ok(()) => EXIT_OK,
            Err(e) => fail(stderr, e),
        },
        Err(e) => fail(stderr, e),
    }
}
