//! The bivariate tensor-product operator, its test-function moments, and
//! the bivariate moduli and rate bounds.
//!
//! Two evaluation paths are provided: the tensor factorization (a product
//! of univariate evaluations, valid for separable integrands) and a general
//! nested double-Jackson series. The separable path serves as the oracle
//! for the general one; the kernel weights and the integration rectangle
//! both factor across the axes, so the two must agree.

use crate::bounds::ModulusEstimate;
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::grid::GridSpec;
use crate::operator::{
    apply, central1_closed, central2_upper, interval_bounds, kernel_weights, moment1_closed,
    OperatorParams,
};
use crate::qcalc::{jackson_integral, TruncationPolicy};
use std::sync::Arc;

/// Axis selector for per-variable moment formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Independent univariate parameter bundles for the two axes.
#[derive(Debug, Clone, Copy)]
pub struct BivariateParams {
    pub px: OperatorParams,
    pub py: OperatorParams,
}

impl BivariateParams {
    pub fn new(px: OperatorParams, py: OperatorParams) -> Self {
        BivariateParams { px, py }
    }
}

type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A bivariate function, optionally carrying a separability hint
/// `f(u, v) = g(u) h(v)` that unlocks the factorized evaluation path.
#[derive(Clone)]
pub struct BiFunction {
    name: String,
    f: Eval2,
    separable: Option<(ScalarFunction, ScalarFunction)>,
}

impl BiFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        BiFunction { name: name.into(), f: Arc::new(f), separable: None }
    }

    /// Build a separable function from its factors; the evaluator is the
    /// literal product, so the hint is exact by construction.
    pub fn separable(name: impl Into<String>, g: ScalarFunction, h: ScalarFunction) -> Self {
        let (gc, hc) = (g.clone(), h.clone());
        BiFunction {
            name: name.into(),
            f: Arc::new(move |u, v| gc.eval(u) * hc.eval(v)),
            separable: Some((g, h)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.f)(u, v)
    }

    pub fn factors(&self) -> Option<(&ScalarFunction, &ScalarFunction)> {
        self.separable.as_ref().map(|(g, h)| (g, h))
    }
}

/// General bivariate evaluation through the nested double-Jackson series,
/// ignoring any separability hint. Quadratic in the univariate series
/// length — intended for cross-checks and genuinely non-separable `f`.
pub fn apply2_general(
    f: &BiFunction,
    x: f64,
    y: f64,
    bp: &BivariateParams,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    let wx = kernel_weights(x, &bp.px, trunc)?;
    let wy = kernel_weights(y, &bp.py, trunc)?;
    let (nqx, nqy) = (bp.px.n_q(), bp.py.n_q());
    let mut acc = 0.0;
    for (k1, &w1) in wx.iter().enumerate() {
        if w1 == 0.0 {
            continue;
        }
        let (a1, b1) = interval_bounds(k1 as u32, &bp.px);
        for (k2, &w2) in wy.iter().enumerate() {
            if w2 == 0.0 {
                continue;
            }
            let (a2, b2) = interval_bounds(k2 as u32, &bp.py);
            let cell = jackson_integral(
                &|t: f64| {
                    let u = bp.px.stancu_shift(t);
                    jackson_integral(
                        &|s: f64| f.eval(u, bp.py.stancu_shift(s)),
                        a2,
                        b2,
                        bp.py.q(),
                        trunc,
                    )
                    .unwrap_or(f64::NAN)
                },
                a1,
                b1,
                bp.px.q(),
                trunc,
            )?;
            acc += w1 * w2 * nqx * nqy * cell;
        }
    }
    if acc.is_nan() {
        return Err(Error::NonConvergent { max_terms: trunc.max_terms });
    }
    Ok(acc)
}

/// Bivariate evaluation. Separable functions go through the product of the
/// two univariate operators; everything else through [`apply2_general`].
pub fn apply2(
    f: &BiFunction,
    x: f64,
    y: f64,
    bp: &BivariateParams,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    match f.factors() {
        Some((g, h)) => {
            let gx = apply(&g.as_fn(), x, &bp.px, trunc)?;
            let hy = apply(&h.as_fn(), y, &bp.py, trunc)?;
            Ok(gx * hy)
        }
        None => apply2_general(f, x, y, bp, trunc),
    }
}

/// Closed-form moments for the test monomials `u^i v^j` with
/// `(i, j)` in `{(0,0), (1,0), (0,1)}`: the nonconstant ones are the
/// univariate first moment in the respective variable.
pub fn bi_moment_closed(i: u32, j: u32, x: f64, y: f64, bp: &BivariateParams) -> Result<f64> {
    match (i, j) {
        (0, 0) => Ok(1.0),
        (1, 0) => Ok(moment1_closed(x, &bp.px)),
        (0, 1) => Ok(moment1_closed(y, &bp.py)),
        _ => Err(Error::UnsupportedMoment(i, j)),
    }
}

/// First central moment along one axis: the univariate `central1_closed`.
pub fn bi_central1_closed(axis: Axis, x: f64, y: f64, bp: &BivariateParams) -> f64 {
    match axis {
        Axis::X => central1_closed(x, &bp.px),
        Axis::Y => central1_closed(y, &bp.py),
    }
}

/// Second-central-moment upper bound along one axis: `lambda_{n1}(x)` or
/// `lambda_{n2}(y)`, structurally the univariate `central2_upper`.
pub fn bi_central2_upper(axis: Axis, x: f64, y: f64, bp: &BivariateParams) -> f64 {
    match axis {
        Axis::X => central2_upper(x, &bp.px),
        Axis::Y => central2_upper(y, &bp.py),
    }
}

/// Bivariate modulus of continuity: sup over grid pairs with
/// `|u - x| <= d1` and `|v - y| <= d2` of `|f(u, v) - f(x, y)|`.
pub fn bi_modulus(
    f: &BiFunction,
    d1: f64,
    d2: f64,
    gx: &GridSpec,
    gy: &GridSpec,
) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::InvalidParams(format!("modulus windows must be > 0, got {d1}, {d2}")));
    }
    let (hx, hy) = (gx.spacing(), gy.spacing());
    if hx > d1 / 8.0 {
        return Err(Error::GridTooCoarse { spacing: hx, limit: d1 / 8.0 });
    }
    if hy > d2 / 8.0 {
        return Err(Error::GridTooCoarse { spacing: hy, limit: d2 / 8.0 });
    }
    let xs = gx.values();
    let ys = gy.values();
    let vals: Vec<Vec<f64>> = xs
        .iter()
        .map(|&u| ys.iter().map(|&v| f.eval(u, v)).collect())
        .collect();
    let wx = (d1 / hx + 1e-9).floor() as usize;
    let wy = (d2 / hy + 1e-9).floor() as usize;
    let mut sup = 0.0f64;
    for i in 0..xs.len() {
        for di in 0..=wx.min(xs.len() - 1 - i) {
            for j in 0..ys.len() {
                for dj in 0..=wy.min(ys.len() - 1 - j) {
                    sup = sup.max((vals[i + di][j + dj] - vals[i][j]).abs());
                }
            }
        }
    }
    Ok(sup)
}

/// The bivariate modulus with the product windows `1/sqrt([n]_q)` per axis,
/// packaged for reporting.
pub fn bi_modulus_for_params(
    f: &BiFunction,
    bp: &BivariateParams,
    gx: &GridSpec,
    gy: &GridSpec,
) -> Result<(ModulusEstimate, ModulusEstimate, f64)> {
    let d1 = 1.0 / bp.px.n_q().sqrt();
    let d2 = 1.0 / bp.py.n_q().sqrt();
    let value = bi_modulus(f, d1, d2, gx, gy)?;
    Ok((
        ModulusEstimate { delta: d1, value, grid: *gx },
        ModulusEstimate { delta: d2, value, grid: *gy },
        value,
    ))
}

/// The printed bivariate rate bound
/// `omega(f; 1/sqrt([n1]_q), 1/sqrt([n2]_q)) * lambda_{n1}(x) * lambda_{n2}(y)`.
///
/// The product-of-lambdas form lacks the customary additive `(1 + sqrt(.))`
/// structure and is suspected to be a misprint; it is implemented verbatim
/// and must only ever be audited in report mode, never as a hard gate.
pub fn bi_bound_modulus(
    f: &BiFunction,
    x: f64,
    y: f64,
    bp: &BivariateParams,
    gx: &GridSpec,
    gy: &GridSpec,
) -> Result<f64> {
    let (_, _, omega) = bi_modulus_for_params(f, bp, gx, gy)?;
    Ok(omega * bi_central2_upper(Axis::X, x, y, bp) * bi_central2_upper(Axis::Y, x, y, bp))
}

/// The raw bivariate Lipschitz rate `M lambda_{n1}(x)^{nu1/2}
/// lambda_{n2}(y)^{nu2/2}`, with no class verification.
pub fn bi_lipschitz_rate(
    m: f64,
    nu1: f64,
    nu2: f64,
    x: f64,
    y: f64,
    bp: &BivariateParams,
) -> f64 {
    m * bi_central2_upper(Axis::X, x, y, bp).powf(nu1 / 2.0)
        * bi_central2_upper(Axis::Y, x, y, bp).powf(nu2 / 2.0)
}

/// Verifies the product-form Lipschitz class
/// `|f(u, v) - f(x, y)| <= M |u - x|^{nu1} |v - y|^{nu2}`
/// over all grid pairs. Note this class is extremely restrictive: the
/// right-hand side vanishes whenever only one coordinate moves, so any `f`
/// that varies along an axis line fails. The check reports the first
/// violating pair.
pub fn verify_bi_lipschitz(
    f: &BiFunction,
    m: f64,
    nu1: f64,
    nu2: f64,
    gx: &GridSpec,
    gy: &GridSpec,
) -> Result<()> {
    let xs = gx.values();
    let ys = gy.values();
    for &u in &xs {
        for &v in &ys {
            for &x in &xs {
                for &y in &ys {
                    let lhs = (f.eval(u, v) - f.eval(x, y)).abs();
                    let rhs = m * (u - x).abs().powf(nu1) * (v - y).abs().powf(nu2);
                    if lhs > rhs + 1e-10 {
                        return Err(Error::SpecUnverified(format!(
                            "{}: |f({u},{v}) - f({x},{y})| = {lhs:.3e} exceeds {rhs:.3e}",
                            f.name()
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Lipschitz-class bivariate bound: verifies the class on the grid, then
/// returns [`bi_lipschitz_rate`].
#[allow(clippy::too_many_arguments)]
pub fn bi_bound_lipschitz(
    f: &BiFunction,
    m: f64,
    nu1: f64,
    nu2: f64,
    x: f64,
    y: f64,
    bp: &BivariateParams,
    gx: &GridSpec,
    gy: &GridSpec,
) -> Result<f64> {
    verify_bi_lipschitz(f, m, nu1, nu2, gx, gy)?;
    Ok(bi_lipschitz_rate(m, nu1, nu2, x, y, bp))
}
