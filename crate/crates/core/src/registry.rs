//! The default test-function registry: the Korovkin triple plus the
//! standard rate-test functions, with analytic derivatives where the smooth
//! bounds need them and Lipschitz data where the Lipschitz bounds do.

use crate::function::{LipschitzSpec, ScalarFunction};

pub const CONST_ONE: &str = "const_one";
pub const IDENTITY: &str = "t";
pub const SQUARE: &str = "t^2";
pub const SQRT: &str = "sqrt_t";
pub const RATIO: &str = "t_over_1_plus_t";
pub const EXP_SAT: &str = "1_minus_exp_neg_t";

/// All registry entries, in canonical order.
pub fn default_registry() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::new(CONST_ONE, |_| 1.0)
            .with_derivatives(|_| 0.0, |_| 0.0)
            .nondecreasing()
            .uniformly_continuous()
            .bounded(),
        ScalarFunction::new(IDENTITY, |t| t)
            .with_derivatives(|_| 1.0, |_| 0.0)
            .nondecreasing()
            .uniformly_continuous()
            .with_lipschitz(LipschitzSpec::new(1.0, 1.0).expect("static")),
        ScalarFunction::new(SQUARE, |t| t * t)
            .with_derivatives(|t| 2.0 * t, |_| 2.0)
            .nondecreasing(),
        ScalarFunction::new(SQRT, |t: f64| t.sqrt())
            .nondecreasing()
            .uniformly_continuous()
            .with_lipschitz(LipschitzSpec::new(1.0, 0.5).expect("static")),
        ScalarFunction::new(RATIO, |t| t / (1.0 + t))
            .with_derivatives(
                |t| (1.0 + t).powi(-2),
                |t| -2.0 * (1.0 + t).powi(-3),
            )
            .nondecreasing()
            .uniformly_continuous()
            .bounded(),
        ScalarFunction::new(EXP_SAT, |t: f64| 1.0 - (-t).exp())
            .with_derivatives(|t: f64| (-t).exp(), |t: f64| -(-t).exp())
            .nondecreasing()
            .uniformly_continuous()
            .bounded(),
    ]
}

/// Look up a registry entry by name.
pub fn lookup(name: &str) -> Option<ScalarFunction> {
    default_registry().into_iter().find(|f| f.name() == name)
}
