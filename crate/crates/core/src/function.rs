//! Evaluable real functions on `[0, inf)` with the metadata the bound
//! machinery needs: monotonicity, smoothness flags, optional analytic
//! derivatives and an optional Lipschitz specification.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Lipschitz data `|f(a) - f(b)| <= M |a - b|^nu` with `0 < nu <= 1`.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzSpec {
    pub m: f64,
    pub nu: f64,
}

impl LipschitzSpec {
    pub fn new(m: f64, nu: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParams(format!("Lipschitz M must be > 0, got {m}")));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidParams(format!("Lipschitz nu must lie in (0, 1], got {nu}")));
        }
        Ok(LipschitzSpec { m, nu })
    }
}

/// A named scalar function with metadata. Derivatives, when present, are
/// analytic rather than numeric so that bound audits are not polluted by
/// differentiation error.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    f: Eval,
    d1: Option<Eval>,
    d2: Option<Eval>,
    pub nondecreasing: bool,
    pub uniformly_continuous: bool,
    pub bounded: bool,
    pub lipschitz: Option<LipschitzSpec>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("nondecreasing", &self.nondecreasing)
            .field("uniformly_continuous", &self.uniformly_continuous)
            .field("bounded", &self.bounded)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction {
            name: name.into(),
            f: Arc::new(f),
            d1: None,
            d2: None,
            nondecreasing: false,
            uniformly_continuous: false,
            bounded: false,
            lipschitz: None,
        }
    }

    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Arc::new(d1));
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn nondecreasing(mut self) -> Self {
        self.nondecreasing = true;
        self
    }

    pub fn uniformly_continuous(mut self) -> Self {
        self.uniformly_continuous = true;
        self
    }

    pub fn bounded(mut self) -> Self {
        self.bounded = true;
        self
    }

    pub fn with_lipschitz(mut self, spec: LipschitzSpec) -> Self {
        self.lipschitz = Some(spec);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn has_derivatives(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }

    pub fn deriv1(&self, x: f64) -> Result<f64> {
        match &self.d1 {
            Some(d) => Ok(d(x)),
            None => Err(Error::MissingDerivative(self.name.clone())),
        }
    }

    pub fn deriv2(&self, x: f64) -> Result<f64> {
        match &self.d2 {
            Some(d) => Ok(d(x)),
            None => Err(Error::MissingDerivative(self.name.clone())),
        }
    }

    /// Borrow the evaluator as a plain closure.
    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x| (self.f)(x)
    }
}
