//! The univariate Dunkl q-Szasz-Mirakjan-Kantorovich-Stancu operator:
//! kernel weights, q-integration intervals, full evaluation, and the
//! closed-form moment formulas and bounds it is audited against.
//!
//! The closed forms come in two flavors. `moment2_bounds` reproduces the
//! reference sandwich verbatim, including its shared x^0 block with an
//! `(n+beta)` factor that numeric audits flag as a misprint.
//! `moment2_bounds_corrected` replaces that block by the beta-free value
//! that the operator actually attains at `x = 0`; the corrected upper bound
//! is what feeds `central2_upper` and every rate estimate built on it.

use crate::dunkl::{gamma_ratio, theta, DunklParams};
use crate::error::{Error, Result};
use crate::qcalc::{jackson_integral, q_integer, q_number, QValue, TruncationPolicy};

/// Parameter bundle `(n, q, mu, alpha, beta)` defining one operator instance.
///
/// The Stancu constraint `0 <= alpha <= beta` keeps the shift
/// `t -> (n t + alpha)/(n + beta)` a self-map of `[0, inf)` and the operator
/// positive on nonnegative inputs.
#[derive(Debug, Clone, Copy)]
pub struct OperatorParams {
    n: u32,
    q: QValue,
    mu: f64,
    alpha: f64,
    beta: f64,
}

impl OperatorParams {
    pub fn new(n: u32, q: f64, mu: f64, alpha: f64, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("operator index n must be >= 1".into()));
        }
        if !(mu.is_finite() && mu > -0.5) {
            return Err(Error::InvalidParams(format!("mu must exceed -1/2, got {mu}")));
        }
        if !(alpha >= 0.0 && alpha <= beta) {
            return Err(Error::InvalidParams(format!(
                "Stancu parameters need 0 <= alpha <= beta, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(OperatorParams { n: n, q: QValue::new_sub_one(q)?, mu, alpha, beta })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> QValue {
        self.q
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `[n]_q`.
    #[inline]
    pub fn n_q(&self) -> f64 {
        q_integer(self.n, self.q)
    }

    pub fn dunkl(&self) -> DunklParams {
        DunklParams::new(self.mu, self.q.get()).expect("validated at construction")
    }

    /// The Stancu argument shift `(n t + alpha)/(n + beta)`.
    #[inline]
    pub fn stancu_shift(&self, t: f64) -> f64 {
        (self.n as f64 * t + self.alpha) / (self.n as f64 + self.beta)
    }
}

/// One summand of the operator: weight and q-integration interval.
#[derive(Debug, Clone, Copy)]
pub struct KernelTerm {
    pub k: u32,
    pub weight: f64,
    pub lower: f64,
    pub upper: f64,
}

/// A numeric-vs-closed-form audit cell.
#[derive(Debug, Clone, Copy)]
pub struct MomentReport {
    pub numeric: f64,
    pub closed_low: f64,
    pub closed_high: f64,
    pub discrepancy: f64,
    pub satisfied: bool,
}

impl MomentReport {
    /// Point equality audit: `|numeric - closed| <= tol`.
    pub fn point(numeric: f64, closed: f64, tol: f64) -> Self {
        let discrepancy = (numeric - closed).abs();
        MomentReport {
            numeric,
            closed_low: closed,
            closed_high: closed,
            discrepancy,
            satisfied: discrepancy <= tol,
        }
    }

    /// Sandwich audit: `low - tol <= numeric <= high + tol`. The discrepancy
    /// is the signed distance outside the interval (zero when inside).
    pub fn interval(numeric: f64, low: f64, high: f64, tol: f64) -> Self {
        let below = low - numeric;
        let above = numeric - high;
        let discrepancy = below.max(above).max(0.0);
        MomentReport {
            numeric,
            closed_low: low,
            closed_high: high,
            discrepancy,
            satisfied: numeric >= low - tol && numeric <= high + tol,
        }
    }
}

/// Integration interval `(A_k, B_k)` of the k-th summand.
///
/// `A_k = [k + 2 mu theta_k]_q / (q^{k-2} [n]_q)` and
/// `B_k = A_k + 1/[n]_q`, the latter via the identity
/// `[m+1]_q - 1 = q [m]_q`, which keeps `B_k - A_k = 1/[n]_q` exact even
/// where the literal endpoint difference would cancel catastrophically.
pub fn interval_bounds(k: u32, p: &OperatorParams) -> (f64, f64) {
    let n_q = p.n_q();
    let m = k as f64 + 2.0 * p.mu() * theta(k) as f64;
    let lower = q_number(m, p.q()) * p.q().get().powi(2 - k as i32) / n_q;
    (lower, lower + 1.0 / n_q)
}

/// Endpoints evaluated literally from their printed formulas, negative
/// q-powers at k in {0, 1} included. Used to cross-check the stable form.
pub fn interval_bounds_literal(k: u32, p: &OperatorParams) -> (f64, f64) {
    let n_q = p.n_q();
    let qv = p.q().get();
    let m = k as f64 + 2.0 * p.mu() * theta(k) as f64;
    let lower = q_number(m, p.q()) / (qv.powi(k as i32 - 2) * n_q);
    let upper = (q_number(m + 1.0, p.q()) - 1.0) / (qv.powi(k as i32 - 1) * n_q) + 1.0 / n_q;
    (lower, upper)
}

/// Normalized kernel weights `p_k(x)` for `k = 0..len`, computed by the
/// gamma-recursion term ratio so no large powers are ever formed:
/// `u_0 = 1`, `u_{k+1} = u_k ([n]_q x) q^k / [2 mu theta_{k+1} + k + 1]_q`,
/// normalized by their sum (which is `E_{mu,q}([n]_q x)`).
pub fn kernel_weights(x: f64, p: &OperatorParams, trunc: &TruncationPolicy) -> Result<Vec<f64>> {
    if x < 0.0 {
        return Err(Error::Domain(format!("operator argument must be >= 0, got {x}")));
    }
    let dunkl = p.dunkl();
    let n_q_x = p.n_q() * x;
    let qv = p.q().get();
    let mut terms = vec![1.0f64];
    let mut term = 1.0;
    let mut qk = 1.0;
    let mut sum = 1.0;
    for k in 0..trunc.max_terms {
        term *= n_q_x * qk / gamma_ratio(k as u32, &dunkl);
        qk *= qv;
        if term == 0.0 {
            break;
        }
        terms.push(term);
        sum += term;
        if k >= 8 && term <= trunc.tail_tol * sum {
            break;
        }
        if k + 1 == trunc.max_terms {
            return Err(Error::NonConvergent { max_terms: trunc.max_terms });
        }
    }
    for t in &mut terms {
        *t /= sum;
    }
    Ok(terms)
}

/// The single weight `p_k(x)`.
pub fn kernel_weight(k: u32, x: f64, p: &OperatorParams, trunc: &TruncationPolicy) -> Result<f64> {
    let w = kernel_weights(x, p, trunc)?;
    Ok(w.get(k as usize).copied().unwrap_or(0.0))
}

/// Kernel terms with their intervals, for reporting.
pub fn kernel_terms(x: f64, p: &OperatorParams, trunc: &TruncationPolicy) -> Result<Vec<KernelTerm>> {
    let weights = kernel_weights(x, p, trunc)?;
    Ok(weights
        .iter()
        .enumerate()
        .map(|(k, &weight)| {
            let (lower, upper) = interval_bounds(k as u32, p);
            KernelTerm { k: k as u32, weight, lower, upper }
        })
        .collect())
}

/// Full operator evaluation:
/// `sum_k p_k(x) [n]_q int_{A_k}^{B_k} f((n t + alpha)/(n + beta)) d_q t`.
///
/// Terms are accumulated until the collected kernel mass exceeds
/// `1 - tail_tol` and the current contribution is negligible relative to the
/// accumulated value; the mass-based rule is independent of the growth of
/// `f` on compacts.
pub fn apply<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    p: &OperatorParams,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    let weights = kernel_weights(x, p, trunc)?;
    let n_q = p.n_q();
    let shifted = |t: f64| f(p.stancu_shift(t));
    let mut acc = 0.0;
    let mut mass = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        let (a, b) = interval_bounds(k as u32, p);
        let contribution = w * n_q * jackson_integral(&shifted, a, b, p.q(), trunc)?;
        acc += contribution;
        mass += w;
        if mass >= 1.0 - trunc.tail_tol && contribution.abs() <= trunc.tail_tol * acc.abs().max(1.0)
        {
            break;
        }
    }
    Ok(acc)
}

/// First-moment closed form:
/// `n/(n+b) (a/n + 1/([2]_q [n]_q)) + 2 n q/([2]_q (n+b)) x`.
pub fn moment1_closed(x: f64, p: &OperatorParams) -> f64 {
    let n = p.n() as f64;
    let nb = n + p.beta();
    let q2 = q_integer(2, p.q());
    let n_q = p.n_q();
    n / nb * (p.alpha() / n + 1.0 / (q2 * n_q)) + 2.0 * n * p.q().get() / (q2 * nb) * x
}

fn x0_block(p: &OperatorParams, beta_free: bool) -> f64 {
    let n = p.n() as f64;
    let nb = n + p.beta();
    let q2 = q_integer(2, p.q());
    let q3 = q_integer(3, p.q());
    let n_q = p.n_q();
    let last = if beta_free {
        1.0 / (q3 * n_q * n_q)
    } else {
        1.0 / (q3 * n_q * n_q * nb)
    };
    n * n / (nb * nb)
        * (p.alpha() * p.alpha() / (n * n) + 2.0 * p.alpha() / (q2 * n * n_q) + last)
}

fn moment2_pair(x: f64, p: &OperatorParams, beta_free: bool) -> (f64, f64) {
    let n = p.n() as f64;
    let nb = n + p.beta();
    let qv = p.q().get();
    let q2 = q_integer(2, p.q());
    let q3 = q_integer(3, p.q());
    let n_q = p.n_q();
    let m2mu = q_number(1.0 + 2.0 * p.mu(), p.q());
    let x0 = x0_block(p, beta_free);
    let low_x = qv * n * n / (nb * nb)
        * (3.0 * qv.powf(2.0 * p.mu() + 1.0) * m2mu / (q3 * n_q)
            + 3.0 / (q3 * n_q)
            + 4.0 * p.alpha() / (q2 * n));
    let up_x = n * n / (nb * nb)
        * (3.0 * m2mu / (q3 * n_q) + 3.0 * qv / (q3 * n_q) + 4.0 * qv * p.alpha() / (q2 * n));
    let low_x2 = 3.0 * qv * n * n / (q3 * nb * nb);
    let up_x2 = 3.0 * n * n / (q3 * nb * nb);
    (x0 + low_x * x + low_x2 * x * x, x0 + up_x * x + up_x2 * x * x)
}

/// The second-moment sandwich `(lower, upper)` exactly as printed, including
/// the `(n+beta)` factor inside the shared x^0 block.
pub fn moment2_bounds(x: f64, p: &OperatorParams) -> (f64, f64) {
    moment2_pair(x, p, false)
}

/// The sandwich with the beta-free x^0 block `1/([3]_q [n]_q^2)`, which is
/// the value the operator attains exactly at `x = 0` (with `alpha = 0`).
pub fn moment2_bounds_corrected(x: f64, p: &OperatorParams) -> (f64, f64) {
    moment2_pair(x, p, true)
}

/// First central moment `K(t - x; x) = moment1_closed(x) - x`.
pub fn central1_closed(x: f64, p: &OperatorParams) -> f64 {
    moment1_closed(x, p) - x
}

/// Shifted first moment `K(t - 1; x) = moment1_closed(x) - 1`.
pub fn shifted1_closed(x: f64, p: &OperatorParams) -> f64 {
    moment1_closed(x, p) - 1.0
}

/// Upper bound `lambda_n(x)` for the second central moment
/// `K((t - x)^2; x)`, obtained by expanding through the corrected
/// second-moment upper bound:
/// `lambda_n(x) = upper2(x) - 2 x moment1_closed(x) + x^2`.
///
/// This is the quantity driving every quantitative rate estimate; under the
/// schedule `q_n = 1 - 1/n` it tends to 0 uniformly on compacts.
pub fn central2_upper(x: f64, p: &OperatorParams) -> f64 {
    let (_, upper) = moment2_bounds_corrected(x, p);
    upper - 2.0 * x * moment1_closed(x, p) + x * x
}
