//! Moduli of continuity, weighted norms, Lipschitz verification, and the
//! quantitative error bounds driven by the second central moment.
//!
//! All sups are grid-restricted lower estimates of the true sups, so audits
//! that compare an operator error against a modulus-based bound must add an
//! explicit grid-resolution slack (`modulus(f, 2 * spacing)` is the
//! recommended term) — a lower estimate of the modulus could otherwise
//! falsely fail a true inequality.

use crate::error::{Error, Result};
use crate::function::{LipschitzSpec, ScalarFunction};
use crate::grid::GridSpec;
use crate::operator::{central1_closed, central2_upper, OperatorParams};
use crate::qcalc::q_integer;

/// A grid-restricted modulus estimate together with the window and support
/// it was computed on.
#[derive(Debug, Clone, Copy)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub value: f64,
    pub grid: GridSpec,
}

/// First-order modulus of continuity `omega(f, delta)`: the maximum
/// oscillation of `f` over grid pairs at distance `<= delta`.
///
/// Requires `spacing <= delta / 8` so each window holds at least eight pair
/// distances, bounding the underestimation for Lipschitz-type `f`.
pub fn modulus<F: Fn(f64) -> f64>(f: &F, delta: f64, grid: &GridSpec) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!("modulus window must be > 0, got {delta}")));
    }
    let h = grid.spacing();
    if h > delta / 8.0 {
        return Err(Error::GridTooCoarse { spacing: h, limit: delta / 8.0 });
    }
    let values: Vec<f64> = grid.values().iter().map(|&x| f(x)).collect();
    let window = (delta / h + 1e-9).floor() as usize;
    let mut sup = 0.0f64;
    for i in 0..values.len() {
        for j in 1..=window.min(values.len() - 1 - i) {
            sup = sup.max((values[i + j] - values[i]).abs());
        }
    }
    Ok(sup)
}

/// [`modulus`] packaged with its window and support.
pub fn modulus_estimate<F: Fn(f64) -> f64>(
    f: &F,
    delta: f64,
    grid: &GridSpec,
) -> Result<ModulusEstimate> {
    Ok(ModulusEstimate { delta, value: modulus(f, delta, grid)?, grid: *grid })
}

/// Second-order modulus: sup over step sizes `0 < h <= delta_sqrt` and grid
/// points `x` of `|f(x + 2h) - 2 f(x + h) + f(x)|`, both restricted to the
/// grid. The grid must extend past the points of interest by `2 delta_sqrt`;
/// callers simply pass a grid whose `x_max` covers that margin.
pub fn modulus2<F: Fn(f64) -> f64>(f: &F, delta_sqrt: f64, grid: &GridSpec) -> Result<f64> {
    if !(delta_sqrt > 0.0) {
        return Err(Error::InvalidParams(format!("step bound must be > 0, got {delta_sqrt}")));
    }
    let h = grid.spacing();
    if h > delta_sqrt / 8.0 {
        return Err(Error::GridTooCoarse { spacing: h, limit: delta_sqrt / 8.0 });
    }
    let values: Vec<f64> = grid.values().iter().map(|&x| f(x)).collect();
    let max_step = (delta_sqrt / h + 1e-9).floor() as usize;
    let mut sup = 0.0f64;
    for i in 0..values.len() {
        for j in 1..=max_step.min((values.len() - 1 - i) / 2) {
            sup = sup.max((values[i + 2 * j] - 2.0 * values[i + j] + values[i]).abs());
        }
    }
    Ok(sup)
}

/// Truncated weighted norm: sup over the grid of `|f(x)| / (1 + x^2)`.
pub fn weighted_norm<F: Fn(f64) -> f64>(f: &F, grid: &GridSpec) -> f64 {
    grid.values()
        .iter()
        .map(|&x| f(x).abs() / (1.0 + x * x))
        .fold(0.0f64, f64::max)
}

/// Plain grid sup norm, used for the C_B^2 norm pieces.
pub fn sup_norm<F: Fn(f64) -> f64>(f: &F, grid: &GridSpec) -> f64 {
    grid.values().iter().map(|&x| f(x).abs()).fold(0.0f64, f64::max)
}

/// Rate bound for uniformly continuous `f`:
/// `(1 + sqrt(lambda_n(x))) * omega(f; 1/sqrt([n]_q))`
/// with `lambda_n(x) = central2_upper(x)`. The modulus window is
/// `1/sqrt([n]_q)`, so the grid must resolve that window.
pub fn bound_modulus(
    f: &ScalarFunction,
    x: f64,
    p: &OperatorParams,
    grid: &GridSpec,
) -> Result<f64> {
    let delta = 1.0 / p.n_q().sqrt();
    let omega = modulus(&f.as_fn(), delta, grid)?;
    Ok((1.0 + central2_upper(x, p).sqrt()) * omega)
}

/// Checks `|f(a) - f(b)| <= M |a - b|^nu` over all grid pairs, with a small
/// floating-point slack.
pub fn verify_lipschitz(f: &ScalarFunction, spec: &LipschitzSpec, grid: &GridSpec) -> Result<()> {
    let xs = grid.values();
    let values: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let lhs = (values[j] - values[i]).abs();
            let rhs = spec.m * (xs[j] - xs[i]).abs().powf(spec.nu);
            if lhs > rhs + 1e-10 {
                return Err(Error::SpecUnverified(format!(
                    "{}: |f({}) - f({})| = {lhs:.3e} exceeds M d^nu = {rhs:.3e}",
                    f.name(),
                    xs[j],
                    xs[i]
                )));
            }
        }
    }
    Ok(())
}

/// Lipschitz-class rate bound `M * lambda_n(x)^{nu/2}` after verifying the
/// class membership on the grid.
pub fn bound_lipschitz(
    f: &ScalarFunction,
    spec: &LipschitzSpec,
    x: f64,
    p: &OperatorParams,
    grid: &GridSpec,
) -> Result<f64> {
    verify_lipschitz(f, spec, grid)?;
    Ok(spec.m * central2_upper(x, p).powf(spec.nu / 2.0))
}

/// The verbatim smooth-function coefficient multiplying `||g||_{C_B^2}`:
/// `n/(n+b) (a/n + 1/([2]_q [n]_q)) + (2 n q/([2]_q (n+b)) - 1) x
///  + lambda_n(x)/2`.
///
/// The first two terms regroup to the *signed* first central moment, which
/// goes negative at moderate `x` and partially cancels the `lambda_n/2`
/// term — the resulting bound is numerically falsified. Kept only for
/// discrepancy attribution; see [`cb2_coefficient`].
pub fn cb2_coefficient_printed(x: f64, p: &OperatorParams) -> f64 {
    let n = p.n() as f64;
    let nb = n + p.beta();
    let q2 = q_integer(2, p.q());
    n / nb * (p.alpha() / n + 1.0 / (q2 * p.n_q()))
        + (2.0 * n * p.q().get() / (q2 * nb) - 1.0) * x
        + central2_upper(x, p) / 2.0
}

/// The smooth-function coefficient with the first central moment taken in
/// absolute value: `|central1_closed(x)| + lambda_n(x)/2`. This is what the
/// Taylor argument behind the bound actually yields
/// (`|K(g) - g| <= |K(t - x)| ||g'|| + K((t - x)^2)/2 ||g''||`), and it is
/// the form every audit uses.
pub fn cb2_coefficient(x: f64, p: &OperatorParams) -> f64 {
    central1_closed(x, p).abs() + central2_upper(x, p) / 2.0
}

/// Smooth-function bound `cb2_coefficient * (||g|| + ||g'|| + ||g''||)`
/// with the norms taken as grid sups. Requires analytic derivatives on `g`.
pub fn bound_cb2(g: &ScalarFunction, x: f64, p: &OperatorParams, grid: &GridSpec) -> Result<f64> {
    if !g.has_derivatives() {
        return Err(Error::MissingDerivative(g.name().to_string()));
    }
    let norm = sup_norm(&g.as_fn(), grid)
        + sup_norm(&|t| g.deriv1(t).expect("checked"), grid)
        + sup_norm(&|t| g.deriv2(t).expect("checked"), grid);
    Ok(cb2_coefficient(x, p) * norm)
}

/// The delta argument of the K-functional bound:
/// `lambda_n(x)/4 + (n/(2(n+b)))(a/n + 1/([2]_q [n]_q))
///  + (1/2)(2 n q/([2]_q (n+b)) - 1) x`,
/// which regroups to `lambda_n(x)/4 + central1_closed(x)/2`. The absolute
/// constants in front of the full bound are not computable, so only this
/// argument (and its decay under schedules) is reported.
pub fn bound_peetre_arg(x: f64, p: &OperatorParams) -> f64 {
    central2_upper(x, p) / 4.0 + central1_closed(x, p) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ScalarFunction;
    use approx::assert_abs_diff_eq;

    fn grid(x_max: f64, points: usize) -> GridSpec {
        GridSpec::new(x_max, points).unwrap()
    }

    #[test]
    fn modulus_of_constant_is_zero() {
        let g = grid(4.0, 81);
        assert_eq!(modulus(&|_| 3.25, 0.5, &g).unwrap(), 0.0);
    }

    #[test]
    fn modulus_of_identity_is_delta() {
        // exact sup for linear f, attained at grid pairs delta apart
        let g = grid(4.0, 81);
        assert_abs_diff_eq!(modulus(&|t| t, 0.5, &g).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn modulus_of_square_is_edge_oscillation() {
        // sup of |y^2 - x^2| over |y - x| <= delta on [0, B] is 2 B delta - delta^2
        let g = grid(4.0, 81);
        let d = 0.5;
        assert_abs_diff_eq!(
            modulus(&|t| t * t, d, &g).unwrap(),
            2.0 * 4.0 * d - d * d,
            epsilon = 1e-12
        );
    }

    #[test]
    fn modulus_monotone_in_delta() {
        let g = grid(4.0, 161);
        let f = |t: f64| (1.0 - (-t).exp()) * (1.0 + (3.0 * t).sin() * 0.1);
        let mut prev = 0.0;
        for d in [0.25, 0.5, 1.0, 2.0] {
            let v = modulus(&f, d, &g).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn modulus_rejects_coarse_grid() {
        let g = grid(4.0, 21); // spacing 0.2
        assert!(matches!(
            modulus(&|t| t, 0.5, &g),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn modulus_subadditivity_style_audit() {
        // |f(y) - f(x)| <= (|y - x|/delta + 1) * omega(f, delta) on grid pairs
        let g = grid(4.0, 81);
        let f = |t: f64| t.sqrt();
        let d = 0.5;
        let omega = modulus(&f, d, &g).unwrap();
        let xs = g.values();
        for i in 0..xs.len() {
            for j in (i + 1)..xs.len() {
                let lhs = (f(xs[j]) - f(xs[i])).abs();
                let rhs = ((xs[j] - xs[i]) / d + 1.0) * omega;
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }

    #[test]
    fn modulus2_of_affine_is_zero() {
        let g = grid(4.0, 161);
        assert!(modulus2(&|t| 3.0 * t - 1.0, 0.5, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn modulus2_of_square_is_twice_delta() {
        // second difference of t^2 at step h is exactly 2 h^2; sup at h = delta_sqrt
        let g = grid(4.0, 161); // spacing 0.025
        let ds = 0.5;
        assert_abs_diff_eq!(modulus2(&|t| t * t, ds, &g).unwrap(), 2.0 * ds * ds, epsilon = 1e-12);
    }

    #[test]
    fn modulus2_monotone_in_delta() {
        let g = grid(6.0, 241);
        let f = |t: f64| 1.0 - (-t).exp();
        let mut prev = 0.0;
        for ds in [0.25, 0.5, 1.0] {
            let v = modulus2(&f, ds, &g).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn weighted_norm_examples() {
        let g = grid(4.0, 21);
        assert_abs_diff_eq!(weighted_norm(&|_| 1.0, &g), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(weighted_norm(&|t| t * t, &g), 16.0 / 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(weighted_norm(&|t| 1.0 + t * t, &g), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bound_modulus_constant_is_zero() {
        let p = OperatorParams::new(10, 0.8, 0.5, 0.0, 0.0).unwrap();
        let f = ScalarFunction::new("const", |_| 2.0).uniformly_continuous();
        let g = grid(4.0, 801);
        assert_eq!(bound_modulus(&f, 1.0, &p, &g).unwrap(), 0.0);
    }

    #[test]
    fn bound_modulus_shrinks_under_schedule() {
        let f = ScalarFunction::new("ratio", |t| t / (1.0 + t)).uniformly_continuous();
        let g = grid(4.0, 3201);
        let mut prev = f64::INFINITY;
        for n in [10u32, 40, 160] {
            let p = OperatorParams::new(n, 1.0 - 1.0 / n as f64, 0.5, 0.0, 0.0).unwrap();
            let b = bound_modulus(&f, 1.0, &p, &g).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn lipschitz_verification() {
        let g = grid(4.0, 101);
        let sqrt = ScalarFunction::new("sqrt", |t: f64| t.sqrt());
        assert!(verify_lipschitz(&sqrt, &LipschitzSpec::new(1.0, 0.5).unwrap(), &g).is_ok());
        // t^2 is not Lip(1, 1) on [0, 4]
        let sq = ScalarFunction::new("sq", |t: f64| t * t);
        assert!(matches!(
            verify_lipschitz(&sq, &LipschitzSpec::new(1.0, 1.0).unwrap(), &g),
            Err(Error::SpecUnverified(_))
        ));
    }

    #[test]
    fn bound_lipschitz_identity_is_sqrt_lambda() {
        let p = OperatorParams::new(20, 0.8, 0.5, 1.0, 2.0).unwrap();
        let g = grid(4.0, 101);
        let ident = ScalarFunction::new("t", |t| t);
        let spec = LipschitzSpec::new(1.0, 1.0).unwrap();
        let x = 1.5;
        let b = bound_lipschitz(&ident, &spec, x, &p, &g).unwrap();
        assert_abs_diff_eq!(b, central2_upper(x, &p).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn bound_cb2_requires_derivatives() {
        let p = OperatorParams::new(20, 0.8, 0.5, 0.0, 0.0).unwrap();
        let g = grid(4.0, 101);
        let plain = ScalarFunction::new("plain", |t| t);
        assert!(matches!(
            bound_cb2(&plain, 1.0, &p, &g),
            Err(Error::MissingDerivative(_))
        ));
    }

    #[test]
    fn bound_cb2_constant_case() {
        let p = OperatorParams::new(20, 0.8, 0.5, 0.0, 0.0).unwrap();
        let g = grid(4.0, 101);
        let c = ScalarFunction::new("const", |_| -2.0).with_derivatives(|_| 0.0, |_| 0.0);
        let b = bound_cb2(&c, 1.0, &p, &g).unwrap();
        assert_abs_diff_eq!(b, cb2_coefficient(1.0, &p) * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn cb2_printed_coefficient_regroups_to_signed_central1() {
        let p = OperatorParams::new(5, 0.95, 0.0, 1.0, 2.0).unwrap();
        for x in [0.0, 1.0, 3.2] {
            let signed = central1_closed(x, &p) + central2_upper(x, &p) / 2.0;
            assert_abs_diff_eq!(cb2_coefficient_printed(x, &p), signed, epsilon = 1e-13);
            assert!(cb2_coefficient(x, &p) >= cb2_coefficient_printed(x, &p) - 1e-13);
        }
    }

    #[test]
    fn cb2_coefficient_vanishes_under_schedule() {
        let mut prev = f64::INFINITY;
        for n in [10u32, 40, 160, 640] {
            let p = OperatorParams::new(n, 1.0 - 1.0 / n as f64, 0.5, 0.0, 0.0).unwrap();
            let c = cb2_coefficient(0.5, &p).abs();
            assert!(c < prev);
            prev = c;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn peetre_arg_is_regrouped_closed_forms() {
        let p = OperatorParams::new(15, 0.7, 1.0, 1.0, 2.0).unwrap();
        for x in [0.0, 0.5, 1.0, 3.0] {
            let direct = {
                let n = p.n() as f64;
                let nb = n + p.beta();
                let q2 = q_integer(2, p.q());
                central2_upper(x, &p) / 4.0
                    + n / (2.0 * nb) * (p.alpha() / n + 1.0 / (q2 * p.n_q()))
                    + 0.5 * (2.0 * n * p.q().get() / (q2 * nb) - 1.0) * x
            };
            assert_abs_diff_eq!(bound_peetre_arg(x, &p), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn peetre_arg_at_origin_alpha_zero() {
        let p = OperatorParams::new(15, 0.7, 1.0, 0.0, 2.0).unwrap();
        let n = p.n() as f64;
        let expect = central2_upper(0.0, &p) / 4.0
            + n / (2.0 * (n + p.beta()) * q_integer(2, p.q()) * p.n_q());
        assert_abs_diff_eq!(bound_peetre_arg(0.0, &p), expect, epsilon = 1e-15);
    }

    #[test]
    fn peetre_arg_vanishes_under_schedule() {
        for x in [0.0, 0.5, 1.0] {
            let mut prev = f64::INFINITY;
            for n in [10u32, 40, 160, 640] {
                let p = OperatorParams::new(n, 1.0 - 1.0 / n as f64, 0.5, 0.0, 0.0).unwrap();
                let v = bound_peetre_arg(x, &p).abs();
                assert!(v < prev, "not decreasing at n={n}, x={x}");
                prev = v;
            }
            assert!(prev < 0.02);
        }
    }
}
