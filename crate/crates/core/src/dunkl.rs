//! Dunkl special functions: the parity indicator, the q-deformed Dunkl gamma
//! via its recursion, the classical Dunkl gamma, and the two q-Dunkl
//! exponentials `e_{mu,q}` and `E_{mu,q}`.

use crate::error::{Error, Result};
use crate::qcalc::{q_number, QValue, TruncationPolicy};
use statrs::function::gamma::ln_gamma;

/// Dunkl parameter `mu > -1/2` together with a base `q` in `(0, 1)`.
///
/// The lower bound on `mu` keeps every recursion factor
/// `(1 - q^{2 mu theta_{n+1} + n + 1})/(1 - q)` strictly positive.
#[derive(Debug, Clone, Copy)]
pub struct DunklParams {
    mu: f64,
    q: QValue,
}

impl DunklParams {
    pub fn new(mu: f64, q: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > -0.5) {
            return Err(Error::InvalidParams(format!("mu must exceed -1/2, got {mu}")));
        }
        Ok(DunklParams { mu, q: QValue::new_sub_one(q)? })
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn q(&self) -> QValue {
        self.q
    }
}

/// Parity indicator: 0 for even `n`, 1 for odd `n`.
#[inline]
pub fn theta(n: u32) -> u32 {
    n % 2
}

/// The ratio `gamma(k+1)/gamma(k)` of the q-Dunkl gamma recursion,
/// `[2 mu theta_{k+1} + k + 1]_q`.
#[inline]
pub fn gamma_ratio(k: u32, p: &DunklParams) -> f64 {
    q_number(2.0 * p.mu * theta(k + 1) as f64 + (k + 1) as f64, p.q)
}

/// Eagerly computed table of `gamma_{mu,q}(0..=len)` values.
///
/// Grow-only and immutable after construction; the recursion is O(1) per
/// entry so precomputing up to the truncation horizon is cheap.
#[derive(Debug, Clone)]
pub struct GammaTable {
    values: Vec<f64>,
    params: DunklParams,
}

impl GammaTable {
    pub fn new(params: DunklParams, len: usize) -> Self {
        let mut values = Vec::with_capacity(len + 1);
        values.push(1.0);
        for k in 0..len as u32 {
            let next = values[k as usize] * gamma_ratio(k, &params);
            values.push(next);
        }
        GammaTable { values, params }
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn params(&self) -> &DunklParams {
        &self.params
    }
}

/// The q-deformed Dunkl gamma `gamma_{mu,q}(k)`, base case
/// `gamma_{mu,q}(0) = 1` so that the leading series term of both
/// exponentials equals 1.
pub fn gamma_mu_q(k: u32, p: &DunklParams) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= gamma_ratio(j, p);
    }
    acc
}

/// The classical Dunkl gamma, via log-gamma accumulation to delay overflow:
/// `2^{2k} k! G(k+mu+1/2)/G(mu+1/2)` at even argument `2k` and
/// `2^{2k+1} k! G(k+mu+3/2)/G(mu+1/2)` at odd argument `2k+1`.
pub fn gamma_mu_classical(m: u32, mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu > -0.5) {
        return Err(Error::InvalidParams(format!("mu must exceed -1/2, got {mu}")));
    }
    let k = (m / 2) as f64;
    let log = if m % 2 == 0 {
        2.0 * k * std::f64::consts::LN_2 + ln_gamma(k + 1.0) + ln_gamma(k + mu + 0.5)
            - ln_gamma(mu + 0.5)
    } else {
        (2.0 * k + 1.0) * std::f64::consts::LN_2 + ln_gamma(k + 1.0) + ln_gamma(k + mu + 1.5)
            - ln_gamma(mu + 0.5)
    };
    if log > f64::MAX.ln() {
        return Err(Error::Overflow(format!("gamma_mu_classical({m}, {mu}) exceeds f64 range")));
    }
    Ok(log.exp())
}

/// The q-Dunkl exponential `e_{mu,q}(x) = sum x^k / gamma_{mu,q}(k)`,
/// convergent for `x < 1/(1-q)`.
pub fn e_mu_q(x: f64, p: &DunklParams, trunc: &TruncationPolicy) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("e_mu_q requires x >= 0, got {x}")));
    }
    let radius = 1.0 / (1.0 - p.q.get());
    if x >= radius {
        return Err(Error::Domain(format!(
            "e_mu_q diverges at x = {x} >= 1/(1-q) = {radius}"
        )));
    }
    let mut acc = 0.0;
    let mut term = 1.0;
    for k in 0..trunc.max_terms {
        acc += term;
        term *= x / gamma_ratio(k as u32, p);
        if k >= 8 && term.abs() <= trunc.tail_tol * acc.abs().max(1.0) {
            return Ok(acc + term);
        }
    }
    Err(Error::NonConvergent { max_terms: trunc.max_terms })
}

/// The entire q-Dunkl exponential
/// `E_{mu,q}(x) = sum q^{k(k-1)/2} x^k / gamma_{mu,q}(k)`.
pub fn e_mu_q_entire(x: f64, p: &DunklParams, trunc: &TruncationPolicy) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("E_mu_q requires x >= 0, got {x}")));
    }
    // term_{k+1}/term_k = x q^k / gamma_ratio(k): the q^{k(k-1)/2} damping
    // enters one factor of q^k at a time, so no large powers are formed.
    let mut acc = 0.0;
    let mut term = 1.0;
    let mut qk = 1.0;
    for k in 0..trunc.max_terms {
        acc += term;
        term *= x * qk / gamma_ratio(k as u32, p);
        qk *= p.q.get();
        if k >= 8 && term.abs() <= trunc.tail_tol * acc.abs().max(1.0) {
            return Ok(acc + term);
        }
    }
    Err(Error::NonConvergent { max_terms: trunc.max_terms })
}
