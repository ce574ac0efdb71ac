//! Built-in oracle cross-checks behind `qsink validate`.

use std::io::Write;

use rayon::prelude::*;

use super::{EXIT_OK, EXIT_VALIDATION};
use crate::entanglement::max_lifetime;
use crate::error::Result;
use crate::linalg::hermitian_eigen;
use crate::pdl::{abcd, ptm_at, ptm_via_integration, ChannelParams};
use crate::sinkhorn::{closed_form_s, decompose, fixed_point_iterate, DEFAULT_MAX_ITER, DEFAULT_TOL};

pub const PTM_ORACLE_TOL: f64 = 1e-8;
pub const PTM_ORACLE_DT: f64 = 1e-4;
pub const SEMIGROUP_TOL: f64 = 1e-10;
pub const SINKHORN_TOL: f64 = 1e-9;
pub const LIFETIME_REL_TOL: f64 = 1e-9;
pub const PREDICATE_TOL: f64 = 1e-9;
/// Relative slack on λz ≤ λy; equal in exact arithmetic for pure depolarization.
const ORDER_SLACK: f64 = 1e-12;

/// Parameter grid the suites sweep.
#[derive(Debug, Clone)]
pub struct Grid {
    pub rates: Vec<f64>,
    pub times: Vec<f64>,
}

impl Grid {
    pub fn standard() -> Self {
        Self { rates: vec![0.0, 0.5, 1.0, 5.0], times: vec![0.1, 0.25, 0.5, 1.0, 2.0] }
    }

    pub fn dense() -> Self {
        Self { rates: vec![0.0, 0.25, 0.5, 1.0, 2.0, 5.0], times: vec![0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] }
    }

    /// `QSINK_VALIDATE_GRID=dense` selects [`Grid::dense`].
    pub fn from_env() -> Self {
        match std::env::var("QSINK_VALIDATE_GRID").as_deref() {
            Ok("dense") => Self::dense(),
            _ => Self::standard(),
        }
    }

    /// All rate triples except the all-zero one.
    pub fn params(&self) -> Vec<ChannelParams> {
        let mut out = Vec::new();
        for &gh in &self.rates {
            for &gv in &self.rates {
                for &g in &self.rates {
                    if gh == 0.0 && gv == 0.0 && g == 0.0 {
                        continue;
                    }
                    out.push(ChannelParams { gamma_h: gh, gamma_v: gv, gamma: g });
                }
            }
        }
        out
    }

    fn params_times(&self, depolarizing_only: bool) -> Vec<(ChannelParams, f64)> {
        self.params()
            .into_iter()
            .filter(|p| !depolarizing_only || p.gamma > 0.0)
            .flat_map(|p| self.times.iter().map(move |&t| (p, t)))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Case {
    label: String,
    deviation: f64,
    ok: bool,
}

impl Case {
    fn within(label: String, deviation: f64, tol: f64) -> Self {
        Self { label, deviation, ok: deviation <= tol }
    }

    fn failed(label: String, why: String) -> Self {
        Self { label: format!("{label}: {why}"), deviation: f64::INFINITY, ok: false }
    }
}

fn label(p: &ChannelParams, t: f64) -> String {
    format!("(gamma_h, gamma_v, gamma) = ({}, {}, {}), t = {}", p.gamma_h, p.gamma_v, p.gamma, t)
}

fn run_case(label: String, tol: f64, f: impl FnOnce() -> Result<f64>) -> Case {
    match f() {
        Ok(dev) => Case::within(label, dev, tol),
        Err(e) => Case::failed(label, e.to_string()),
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub worst_case: String,
    /// First failing case, if any.
    pub failure: Option<String>,
}

impl SuiteReport {
    fn from_cases(name: &'static str, tolerance: f64, cases: Vec<Case>) -> Self {
        let worst = cases.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation));
        Self {
            name,
            cases: cases.len(),
            tolerance,
            max_deviation: worst.map_or(0.0, |c| c.deviation),
            worst_case: worst.map_or_else(String::new, |c| c.label.clone()),
            failure: cases.iter().find(|c| !c.ok).map(|c| c.label.clone()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn ptm_oracle(grid: &Grid) -> SuiteReport {
    let cases = grid
        .params_times(false)
        .par_iter()
        .map(|&(p, t)| {
            run_case(label(&p, t), PTM_ORACLE_TOL, || {
                Ok(ptm_at(&p, t)?.max_abs_diff(&ptm_via_integration(&p, t, PTM_ORACLE_DT)?))
            })
        })
        .collect();
    SuiteReport::from_cases("ptm_oracle", PTM_ORACLE_TOL, cases)
}

fn semigroup(grid: &Grid) -> SuiteReport {
    let mut jobs = Vec::new();
    for p in grid.params() {
        for &t1 in &grid.times {
            for &t2 in &grid.times {
                jobs.push((p, t1, t2));
            }
        }
    }
    let cases = jobs
        .par_iter()
        .map(|&(p, t1, t2)| {
            run_case(format!("{}, t2 = {t2}", label(&p, t1)), SEMIGROUP_TOL, || {
                let joint = ptm_at(&p, t1 + t2)?;
                Ok(joint.max_abs_diff(&ptm_at(&p, t1)?.compose(&ptm_at(&p, t2)?)))
            })
        })
        .collect();
    SuiteReport::from_cases("semigroup", SEMIGROUP_TOL, cases)
}

/// Largest violation of complete positivity or trace non-increase.
fn predicates(grid: &Grid) -> SuiteReport {
    let cases = grid
        .params_times(false)
        .par_iter()
        .map(|&(p, t)| {
            run_case(label(&p, t), PREDICATE_TOL, || {
                let m = ptm_at(&p, t)?;
                let choi_min = hermitian_eigen(&m.choi()?)?.min_eigenvalue();
                let row = m.0[0];
                let tni = 1.0 - row[0] - (row[1] * row[1] + row[2] * row[2] + row[3] * row[3]).sqrt();
                Ok((-choi_min).max(-tni).max(0.0))
            })
        })
        .collect();
    SuiteReport::from_cases("cp_trace_nonincreasing", PREDICATE_TOL, cases)
}

fn sinkhorn_roundtrip(grid: &Grid) -> SuiteReport {
    let cases = grid
        .params_times(true)
        .par_iter()
        .map(|&(p, t)| {
            let lbl = label(&p, t);
            match decompose(&p, t) {
                Ok(dec) => {
                    let [lx, ly, lz] = dec.lambdas();
                    if !(lx == ly && lz <= ly * (1.0 + ORDER_SLACK) && lz >= 0.0) {
                        return Case::failed(lbl, format!("unordered lambdas ({lx}, {ly}, {lz})"));
                    }
                    run_case(lbl, SINKHORN_TOL, || {
                        let recon = dec.reconstruct()?.max_abs_diff(&dec.original());
                        Ok(recon.max(dec.upsilon.unital_tp_residual()))
                    })
                }
                Err(e) => Case::failed(lbl, e.to_string()),
            }
        })
        .collect();
    SuiteReport::from_cases("sinkhorn_roundtrip", SINKHORN_TOL, cases)
}

fn closed_form_vs_iterated(grid: &Grid) -> SuiteReport {
    let cases = grid
        .params_times(true)
        .par_iter()
        .map(|&(p, t)| {
            run_case(label(&p, t), SINKHORN_TOL, || {
                let co = abcd(&p, t)?;
                let s = closed_form_s(&co)?;
                let iterated = fixed_point_iterate(&co.ptm(), DEFAULT_TOL, DEFAULT_MAX_ITER)?;
                let dev = (iterated[(0, 0)].re - (1.0 + s))
                    .abs()
                    .max((iterated[(1, 1)].re - (1.0 - s)).abs())
                    .max(iterated[(0, 1)].norm());
                Ok(dev)
            })
        })
        .collect();
    SuiteReport::from_cases("closed_form_vs_iterated_s", SINKHORN_TOL, cases)
}

fn lifetime_closed_forms(grid: &Grid) -> SuiteReport {
    let mut cases = Vec::new();
    for &gamma in grid.rates.iter().filter(|&&g| g > 0.0) {
        let p = ChannelParams { gamma_h: 0.0, gamma_v: 0.0, gamma };
        cases.push(run_case(format!("depolarizing gamma = {gamma}"), LIFETIME_REL_TOL, || {
            let want = 3f64.ln() / (2.0 * gamma);
            let r = max_lifetime(&p, &p, None)?;
            Ok(r.tau.map_or(f64::INFINITY, |tau| ((tau - want) / want).abs()))
        }));
    }
    for &gh in &grid.rates {
        for &gv in &grid.rates {
            if gh == 0.0 && gv == 0.0 {
                continue;
            }
            let p = ChannelParams { gamma_h: gh, gamma_v: gv, gamma: 0.0 };
            let lbl = format!("pure loss (gamma_h, gamma_v) = ({gh}, {gv})");
            cases.push(match max_lifetime(&p, &p, None) {
                Ok(r) if r.tau.is_none() => Case::within(lbl, 0.0, LIFETIME_REL_TOL),
                Ok(r) => Case::failed(lbl, format!("unexpected finite lifetime {:?}", r.tau)),
                Err(e) => Case::failed(lbl, e.to_string()),
            });
        }
    }
    SuiteReport::from_cases("lifetime_closed_forms", LIFETIME_REL_TOL, cases)
}

/// Runs every suite, in a fixed order.
pub fn run_suites(grid: &Grid) -> Vec<SuiteReport> {
    vec![
        ptm_oracle(grid),
        semigroup(grid),
        predicates(grid),
        sinkhorn_roundtrip(grid),
        closed_form_vs_iterated(grid),
        lifetime_closed_forms(grid),
    ]
}

/// Prints one line per suite; exit 3 on any failure.
pub fn cmd_validate(grid: &Grid, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let reports = run_suites(grid);
    let mut all_ok = true;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            stdout,
            "{status} {:<28} cases={:<5} max_deviation={:.3e} tolerance={:.0e}",
            r.name, r.cases, r.max_deviation, r.tolerance
        );
        if let Some(f) = &r.failure {
            all_ok = false;
            let _ = writeln!(stderr, "{}: failing case {f}", r.name);
        }
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}
