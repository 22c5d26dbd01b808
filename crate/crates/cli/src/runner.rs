//! The four experiment runners. Each returns a [`Table`] plus a flag saying
//! whether any *equality* audit failed; bound audits are report-only and
//! never fail the process.

use crate::config::{Config, ConfigError};
use crate::output::{Cell, Table};
use dunkl_szasz::bivariate::{
    apply2, apply2_general, bi_lipschitz_rate, bi_modulus, BiFunction, BivariateParams,
};
use dunkl_szasz::bounds::{bound_cb2, bound_peetre_arg, modulus, verify_lipschitz};
use dunkl_szasz::grid::GridSpec;
use dunkl_szasz::operator::{
    apply, central1_closed, central2_upper, moment1_closed, moment2_bounds_corrected,
    MomentReport, OperatorParams,
};
use dunkl_szasz::qcalc::TruncationPolicy;
use dunkl_szasz::registry;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(#[from] dunkl_szasz::Error),
    #[error("unknown registry function `{0}`")]
    UnknownFunction(String),
}

pub struct RunOutcome {
    pub table: Table,
    pub equality_failed: bool,
}

fn trunc(cfg: &Config) -> TruncationPolicy {
    TruncationPolicy::new(cfg.tail_tol, cfg.max_terms).expect("validated config")
}

fn params_for(cfg: &Config, n: u32) -> Result<OperatorParams, RunError> {
    Ok(OperatorParams::new(n, cfg.schedule.q_for(n), cfg.mu, cfg.alpha, cfg.beta)?)
}

fn cell_prefix(p: &OperatorParams, x: f64) -> Vec<Cell> {
    vec![
        Cell::Int(p.n() as i64),
        Cell::Float(p.q().get()),
        Cell::Float(p.mu()),
        Cell::Float(p.alpha()),
        Cell::Float(p.beta()),
        Cell::Float(x),
    ]
}

fn moment_row(p: &OperatorParams, x: f64, tau: i64, r: &MomentReport) -> Vec<Cell> {
    let mut row = cell_prefix(p, x);
    row.extend([
        Cell::Int(tau),
        Cell::Float(r.numeric),
        Cell::Float(r.closed_low),
        Cell::Float(r.closed_high),
        Cell::Float(r.discrepancy),
        Cell::Bool(r.satisfied),
    ]);
    row
}

/// Moment audit: raw moments tau = 0, 1, 2 and central moments tau = -1, -2
/// per (n, x) cell. tau 0/1/-1 are equality audits and gate the exit code;
/// tau 2/-2 are sandwich/bound reports.
pub fn run_moments(cfg: &Config) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let tr = trunc(cfg);
    let grid = GridSpec::new(cfg.x_max, cfg.grid_points)?;
    let mut cells = Vec::new();
    for &n in &cfg.n_list {
        let p = params_for(cfg, n)?;
        for x in grid.values() {
            cells.push((p, x));
        }
    }
    let tol = cfg.audit_tol;
    let results: Result<Vec<Vec<Vec<Cell>>>, RunError> = cells
        .par_iter()
        .map(|&(p, x)| {
            let m0 = apply(&|_t: f64| 1.0, x, &p, &tr)?;
            let m1 = apply(&|t: f64| t, x, &p, &tr)?;
            let m2 = apply(&|t: f64| t * t, x, &p, &tr)?;
            let c1 = moment1_closed(x, &p);
            let (lo2, up2) = moment2_bounds_corrected(x, &p);
            let rows = vec![
                moment_row(&p, x, 0, &MomentReport::point(m0, 1.0, tol)),
                moment_row(&p, x, 1, &MomentReport::point(m1, c1, tol * c1.abs().max(1.0))),
                moment_row(&p, x, 2, &MomentReport::interval(m2, lo2, up2, tol)),
                moment_row(
                    &p,
                    x,
                    -1,
                    &MomentReport::point(m1 - x, central1_closed(x, &p), tol),
                ),
                moment_row(
                    &p,
                    x,
                    -2,
                    &MomentReport::interval(
                        m2 - 2.0 * x * m1 + x * x,
                        0.0,
                        central2_upper(x, &p),
                        tol,
                    ),
                ),
            ];
            Ok(rows)
        })
        .collect();
    let mut table = Table::new(vec![
        "n", "q", "mu", "alpha", "beta", "x", "tau", "numeric", "closed_low", "closed_high",
        "discrepancy", "pass",
    ]);
    let mut equality_failed = false;
    for cell_rows in results? {
        for row in cell_rows {
            let tau = match row[6] {
                Cell::Int(t) => t,
                _ => unreachable!(),
            };
            let pass = matches!(row[11], Cell::Bool(true));
            if matches!(tau, 0 | 1 | -1) && !pass {
                equality_failed = true;
            }
            table.push(row);
        }
    }
    Ok(RunOutcome { table, equality_failed })
}

/// A modulus-estimation grid fine enough for the window `delta` on
/// `[0, x_max]`.
fn modulus_grid(x_max: f64, delta: f64) -> GridSpec {
    let points = (x_max / (delta / 8.0)).ceil() as usize + 2;
    GridSpec::new(x_max, points.max(9)).expect("positive extent")
}

/// Convergence table under a q_n schedule: per (n, function), the grid sup
/// error, the applicable rate bounds (NaN where the function lacks the
/// hypothesis), the weighted-norm error, and a monotonicity flag against
/// the previous n.
pub fn run_converge(cfg: &Config) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    if cfg.schedule.is_fixed() {
        return Err(ConfigError::Invalid(
            "converge requires --q-schedule one_minus_inv_n or one_minus_inv_sqrt_n \
             (Korovkin convergence needs q_n -> 1)"
                .into(),
        )
        .into());
    }
    let tr = trunc(cfg);
    let grid = GridSpec::new(cfg.x_max, cfg.grid_points)?;
    let funcs: Vec<_> = cfg
        .functions
        .iter()
        .map(|name| registry::lookup(name).ok_or_else(|| RunError::UnknownFunction(name.clone())))
        .collect::<Result<_, _>>()?;

    struct Row {
        n: u32,
        q: f64,
        name: String,
        sup_error: f64,
        b_mod: f64,
        b_lip: f64,
        b_cb2: f64,
        weighted: f64,
    }

    let mut jobs = Vec::new();
    for &n in &cfg.n_list {
        for f in &funcs {
            jobs.push((n, f.clone()));
        }
    }
    let rows: Result<Vec<Row>, RunError> = jobs
        .par_iter()
        .map(|(n, f)| {
            let p = params_for(cfg, *n)?;
            let delta = 1.0 / p.n_q().sqrt();
            let fine = modulus_grid(cfg.x_max, delta);
            let omega = if f.uniformly_continuous {
                Some(modulus(&f.as_fn(), delta, &fine)?)
            } else {
                None
            };
            let mut sup_error = 0.0f64;
            let mut b_mod = f64::NAN;
            let mut b_lip = f64::NAN;
            let mut b_cb2 = f64::NAN;
            let mut weighted = 0.0f64;
            for x in grid.values() {
                let err = (apply(&f.as_fn(), x, &p, &tr)? - f.eval(x)).abs();
                sup_error = sup_error.max(err);
                weighted = weighted.max(err / (1.0 + x * x));
                let lambda = central2_upper(x, &p);
                if let Some(om) = omega {
                    let b = (1.0 + lambda.sqrt()) * om;
                    b_mod = if b_mod.is_nan() { b } else { b_mod.max(b) };
                }
                if let Some(spec) = f.lipschitz {
                    let b = spec.m * lambda.powf(spec.nu / 2.0);
                    b_lip = if b_lip.is_nan() { b } else { b_lip.max(b) };
                }
                if f.bounded && f.has_derivatives() {
                    let b = bound_cb2(f, x, &p, &grid)?;
                    b_cb2 = if b_cb2.is_nan() { b } else { b_cb2.max(b) };
                }
            }
            Ok(Row {
                n: *n,
                q: p.q().get(),
                name: f.name().to_string(),
                sup_error,
                b_mod,
                b_lip,
                b_cb2,
                weighted,
            })
        })
        .collect();
    let rows = rows?;

    let mut table = Table::new(vec![
        "n",
        "q",
        "function",
        "sup_error",
        "bound_modulus",
        "bound_lipschitz",
        "bound_cb2",
        "weighted_error",
        "decreasing",
    ]);
    let mut prev: std::collections::HashMap<String, f64> = Default::default();
    for r in rows {
        let decreasing = prev.get(&r.name).map_or(true, |&p| r.sup_error < p);
        prev.insert(r.name.clone(), r.sup_error);
        table.push(vec![
            Cell::Int(r.n as i64),
            Cell::Float(r.q),
            Cell::Str(r.name),
            Cell::Float(r.sup_error),
            Cell::Float(r.b_mod),
            Cell::Float(r.b_lip),
            Cell::Float(r.b_cb2),
            Cell::Float(r.weighted),
            Cell::Bool(decreasing),
        ]);
    }
    Ok(RunOutcome { table, equality_failed: false })
}

/// Bivariate audit on a small square grid: moments against closed forms,
/// tensor factorization residuals (general path vs product, at the smallest
/// n to keep the quadratic-cost path tractable), and the two bivariate rate
/// bounds in report mode.
pub fn run_bivariate(cfg: &Config) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let tr = trunc(cfg);
    // the double series is quadratic in the univariate cost, so the square
    // grid is deliberately small
    let extent = cfg.x_max.min(1.0);
    let points = cfg.grid_points.clamp(2, 5);
    let sgrid = GridSpec::new(extent, points)?.values();
    let n_min = *cfg.n_list.iter().min().expect("validated nonempty");

    let ident = registry::lookup(registry::IDENTITY).expect("registry");
    let one = registry::lookup(registry::CONST_ONE).expect("registry");
    let uv = BiFunction::separable("uv", ident.clone(), ident.clone());
    let e10 = BiFunction::separable("e10", ident.clone(), one.clone());
    let e01 = BiFunction::separable("e01", one.clone(), ident.clone());
    let e00 = BiFunction::separable("e00", one.clone(), one);

    let mut table = Table::new(vec![
        "n", "q", "x", "y", "kind", "numeric", "reference", "residual", "pass",
    ]);
    let mut equality_failed = false;
    let tol = cfg.audit_tol;
    for &n in &cfg.n_list {
        let p = params_for(cfg, n)?;
        let bp = BivariateParams::new(p, p);
        let d = 1.0 / p.n_q().sqrt();
        let fine = modulus_grid(extent, d);
        let omega = bi_modulus(&uv, d, d, &fine, &fine)?;
        for &x in &sgrid {
            for &y in &sgrid {
                let mut emit = |kind: &str, numeric: f64, reference: f64, gate: bool| {
                    let residual = (numeric - reference).abs();
                    let pass = if gate { residual <= tol } else { numeric <= reference + tol };
                    if gate && !pass {
                        equality_failed = true;
                    }
                    table.push(vec![
                        Cell::Int(n as i64),
                        Cell::Float(p.q().get()),
                        Cell::Float(x),
                        Cell::Float(y),
                        Cell::Str(kind.to_string()),
                        Cell::Float(numeric),
                        Cell::Float(reference),
                        Cell::Float(residual),
                        Cell::Bool(pass),
                    ]);
                };
                emit("e00", apply2(&e00, x, y, &bp, &tr)?, 1.0, true);
                emit("e10", apply2(&e10, x, y, &bp, &tr)?, moment1_closed(x, &p), true);
                emit("e01", apply2(&e01, x, y, &bp, &tr)?, moment1_closed(y, &p), true);
                if n == n_min {
                    let general = apply2_general(&uv, x, y, &bp, &tr)?;
                    let product = apply2(&uv, x, y, &bp, &tr)?;
                    emit("factorization", general, product, true);
                }
                // report-only rate bounds for f = uv
                let err = (apply2(&uv, x, y, &bp, &tr)? - x * y).abs();
                emit("nsy1_report", err, bi_lipschitz_rate(1.0, 1.0, 1.0, x, y, &bp), false);
                let ntn1 = omega * central2_upper(x, &p) * central2_upper(y, &p);
                emit("ntn1_report", err, ntn1, false);
            }
        }
    }
    Ok(RunOutcome { table, equality_failed })
}

/// Bound audit sweep: per (n, x, function), the operator error against each
/// applicable rate bound plus the K-functional argument. Report-only.
pub fn run_bounds_audit(cfg: &Config) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let tr = trunc(cfg);
    let grid = GridSpec::new(cfg.x_max, cfg.grid_points)?;
    let funcs: Vec<_> = cfg
        .functions
        .iter()
        .map(|name| registry::lookup(name).ok_or_else(|| RunError::UnknownFunction(name.clone())))
        .collect::<Result<_, _>>()?;

    let mut jobs = Vec::new();
    for &n in &cfg.n_list {
        for f in &funcs {
            jobs.push((n, f.clone()));
        }
    }
    let results: Result<Vec<Vec<Vec<Cell>>>, RunError> = jobs
        .par_iter()
        .map(|(n, f)| {
            let p = params_for(cfg, *n)?;
            let delta = 1.0 / p.n_q().sqrt();
            let fine = modulus_grid(cfg.x_max, delta);
            let omega = if f.uniformly_continuous && f.nondecreasing {
                Some(modulus(&f.as_fn(), delta, &fine)?)
            } else {
                None
            };
            let lip_ok = match f.lipschitz {
                Some(spec) => verify_lipschitz(f, &spec, &grid).is_ok().then_some(spec),
                None => None,
            };
            let mut rows = Vec::new();
            for x in grid.values() {
                let err = (apply(&f.as_fn(), x, &p, &tr)? - f.eval(x)).abs();
                let lambda = central2_upper(x, &p);
                let b_mod = omega.map_or(f64::NAN, |om| (1.0 + lambda.sqrt()) * om);
                let b_lip = lip_ok.map_or(f64::NAN, |s| s.m * lambda.powf(s.nu / 2.0));
                let b_cb2 = if f.bounded && f.has_derivatives() {
                    bound_cb2(f, x, &p, &grid)?
                } else {
                    f64::NAN
                };
                let holds = [b_mod, b_lip, b_cb2]
                    .iter()
                    .all(|b| b.is_nan() || err <= b + cfg.audit_tol);
                let mut row = cell_prefix(&p, x);
                row.extend([
                    Cell::Str(f.name().to_string()),
                    Cell::Float(err),
                    Cell::Float(b_mod),
                    Cell::Float(b_lip),
                    Cell::Float(b_cb2),
                    Cell::Float(bound_peetre_arg(x, &p)),
                    Cell::Bool(holds),
                ]);
                rows.push(row);
            }
            Ok(rows)
        })
        .collect();
    let mut table = Table::new(vec![
        "n",
        "q",
        "mu",
        "alpha",
        "beta",
        "x",
        "function",
        "error",
        "bound_modulus",
        "bound_lipschitz",
        "bound_cb2",
        "peetre_arg",
        "pass",
    ]);
    for rows in results? {
        for row in rows {
            table.push(row);
        }
    }
    Ok(RunOutcome { table, equality_failed: false })
}
