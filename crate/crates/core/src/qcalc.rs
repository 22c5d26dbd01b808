//! q-calculus primitives: q-integers, q-factorials, q-binomial coefficients,
//! q-Pochhammer products, and Jackson q-integration.
//!
//! The Jackson integral over `[0, c]` is the geometric sum
//! `(1-q) c \sum_{j>=0} q^j f(c q^j)` and interval integrals are differences
//! of two zero-based sums. Under this construction integrating a constant
//! over `[a, b]` gives exactly `C (b - a)`, which the operator's
//! normalization relies on.

use crate::error::{Error, Result};

/// The base `q` of all q-deformations, restricted to `(0, 1]`.
///
/// `q = 1` is only admitted where the classical branch is defined
/// (q-integers, factorials, binomials, Pochhammer products). Jackson
/// integration and everything built on it require `q < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue(f64);

impl QValue {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(QValue(q))
        } else {
            Err(Error::InvalidParams(format!("q must lie in (0, 1], got {q}")))
        }
    }

    /// `q` strictly below 1, as required by Jackson sums and the operator.
    pub fn new_sub_one(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(QValue(q))
        } else {
            Err(Error::InvalidParams(format!("q must lie in (0, 1), got {q}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// Tail tolerance and hard term cap governing every infinite series and
/// Jackson sum in the crate.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    pub tail_tol: f64,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(tail_tol: f64, max_terms: usize) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParams(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        if max_terms < 8 {
            return Err(Error::InvalidParams(format!(
                "max_terms must be at least 8, got {max_terms}"
            )));
        }
        Ok(TruncationPolicy { tail_tol, max_terms })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tail_tol: 1e-14, max_terms: 10_000 }
    }
}

/// `[t]_q = (1 - q^t)/(1 - q)` for real `t >= 0`; `t` itself at `q = 1`.
///
/// The real-exponent form is needed because the Dunkl shift `k + 2 mu theta_k`
/// is not an integer for general `mu`.
#[inline]
pub fn q_number(t: f64, q: QValue) -> f64 {
    if q.is_one() {
        t
    } else {
        (1.0 - q.get().powf(t)) / (1.0 - q.get())
    }
}

/// The q-integer `[n]_q`.
pub fn q_integer(n: u32, q: QValue) -> f64 {
    if q.is_one() {
        n as f64
    } else {
        (1.0 - q.get().powi(n as i32)) / (1.0 - q.get())
    }
}

/// The q-factorial `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: QValue) -> f64 {
    (1..=n).map(|k| q_integer(k, q)).product()
}

/// The q-binomial (Gaussian) coefficient `[n]_q! / ([k]_q! [n-k]_q!)`.
pub fn q_binomial(n: u32, k: u32, q: QValue) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("q_binomial requires k <= n, got k={k}, n={n}")));
    }
    // Ratio form keeps intermediate magnitudes tame: prod_{i=1..k} [n-k+i]/[i].
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= q_integer(n - k + i, q) / q_integer(i, q);
    }
    Ok(acc)
}

/// The q-analogue of `(1+x)^n`: the product `(1+x)(1+qx)...(1+q^{n-1}x)`.
pub fn q_pochhammer_plus(x: f64, n: u32, q: QValue) -> f64 {
    let mut acc = 1.0;
    let mut qj = 1.0;
    for _ in 0..n {
        acc *= 1.0 + qj * x;
        qj *= q.get();
    }
    acc
}

/// Jackson q-integral over `[0, c]`.
///
/// Truncates the geometric sum once the next increment is below
/// `tail_tol * max(1, |accumulated|)`, after a minimum of 8 terms.
pub fn jackson_integral_zero_to<F: Fn(f64) -> f64>(
    f: &F,
    c: f64,
    q: QValue,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    if q.is_one() {
        return Err(Error::Domain("Jackson integration requires q < 1".into()));
    }
    if c < 0.0 {
        return Err(Error::Domain(format!("Jackson integral needs c >= 0, got {c}")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let qv = q.get();
    let scale = (1.0 - qv) * c;
    let mut acc = 0.0;
    let mut qj = 1.0;
    for j in 0..trunc.max_terms {
        let incr = scale * qj * f(c * qj);
        acc += incr;
        qj *= qv;
        if j >= 8 && incr.abs() <= trunc.tail_tol * acc.abs().max(1.0) {
            return Ok(acc);
        }
    }
    Err(Error::NonConvergent { max_terms: trunc.max_terms })
}

/// Jackson q-integral over `[a, b]`, defined as the difference of two
/// zero-based sums.
///
/// No positivity assumption is imposed: integrands such as `(t - x)^2`
/// shifted by Stancu parameters may take any sign.
pub fn jackson_integral<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    q: QValue,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    if b < a {
        return Err(Error::Domain(format!("Jackson integral needs b >= a, got a={a}, b={b}")));
    }
    Ok(jackson_integral_zero_to(f, b, q, trunc)? - jackson_integral_zero_to(f, a, q, trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn q_integer_base_cases() {
        assert_eq!(q_integer(0, q(0.5)), 0.0);
        assert_eq!(q_integer(0, q(1.0)), 0.0);
        assert_eq!(q_integer(3, q(1.0)), 3.0);
        // direct sum 1 + q + q^2
        assert_abs_diff_eq!(q_integer(3, q(0.5)), 1.75, epsilon = 1e-15);
    }

    #[test]
    fn q_integer_nondecreasing_and_bounded() {
        let qv = q(0.7);
        let cap = 1.0 / (1.0 - 0.7);
        let mut prev = 0.0;
        for n in 0..40 {
            let v = q_integer(n, qv);
            assert!(v >= prev);
            assert!(v < cap);
            prev = v;
        }
    }

    #[test]
    fn q_integer_tends_to_n_as_q_to_one() {
        // [1]_q = 1 for every q, so the gap is identically zero there
        assert_eq!(q_integer(1, q(0.9)), 1.0);
        for n in [5u32, 20] {
            let mut prev_gap = f64::INFINITY;
            for qv in [0.9, 0.99, 0.999] {
                let gap = (q_integer(n, q(qv)) - n as f64).abs();
                assert!(gap < prev_gap, "gap not decreasing for n={n} at q={qv}");
                prev_gap = gap;
            }
        }
    }

    #[test]
    fn q_factorial_values() {
        assert_eq!(q_factorial(0, q(0.5)), 1.0);
        // 1 * 1.5 * 1.75
        assert_abs_diff_eq!(q_factorial(3, q(0.5)), 2.625, epsilon = 1e-15);
        assert_abs_diff_eq!(q_factorial(4, q(1.0)), 24.0, epsilon = 1e-12);
    }

    #[test]
    fn q_binomial_values() {
        assert_eq!(q_binomial(7, 0, q(0.3)).unwrap(), 1.0);
        // Gaussian polynomial 1 + q + 2q^2 + q^3 + q^4 at q = 0.5
        let expect = 1.0 + 0.5 + 2.0 * 0.25 + 0.125 + 0.0625;
        assert_abs_diff_eq!(q_binomial(4, 2, q(0.5)).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(q_binomial(5, 2, q(1.0)).unwrap(), 10.0, epsilon = 1e-12);
        assert!(q_binomial(3, 4, q(0.5)).is_err());
    }

    #[test]
    fn q_binomial_symmetry() {
        for qv in [0.3, 0.8, 1.0] {
            for n in 0..10u32 {
                for k in 0..=n {
                    let a = q_binomial(n, k, q(qv)).unwrap();
                    let b = q_binomial(n, n - k, q(qv)).unwrap();
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10 * a.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn pascal_identity() {
        for qv in [0.2, 0.5, 0.9, 0.99] {
            let qq = q(qv);
            for n in 1..=12u32 {
                for k in 1..n {
                    let lhs = q_binomial(n, k, qq).unwrap();
                    let rhs = q_binomial(n - 1, k - 1, qq).unwrap()
                        + qv.powi(k as i32) * q_binomial(n - 1, k, qq).unwrap();
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * lhs.max(1.0));
                }
            }
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(q_pochhammer_plus(3.2, 0, q(0.5)), 1.0);
        assert_abs_diff_eq!(q_pochhammer_plus(0.7, 1, q(0.5)), 1.7, epsilon = 1e-15);
        // (1+2)(1+1)(1+0.5) = 9
        assert_abs_diff_eq!(q_pochhammer_plus(2.0, 3, q(0.5)), 9.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_binomial_expansion_matches_product() {
        // (1+x)_q^n = sum_k [n k]_q q^{k(k-1)/2} x^k
        for qv in [0.4, 0.8] {
            let qq = q(qv);
            for n in 0..=8u32 {
                for x in [0.3, 1.0, 2.5] {
                    let direct = q_pochhammer_plus(x, n, qq);
                    let mut sum = 0.0;
                    for k in 0..=n {
                        sum += q_binomial(n, k, qq).unwrap()
                            * qv.powf((k * (k.saturating_sub(1))) as f64 / 2.0)
                            * x.powi(k as i32);
                    }
                    assert_abs_diff_eq!(direct, sum, epsilon = 1e-10 * direct.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn jackson_constant_gives_interval_length() {
        let trunc = TruncationPolicy::default();
        let f = |_t: f64| 3.5;
        let v = jackson_integral(&f, 0.5, 2.25, q(0.5), &trunc).unwrap();
        assert_abs_diff_eq!(v, 3.5 * 1.75, epsilon = 1e-12);
    }

    #[test]
    fn jackson_monomial_closed_forms() {
        // int_0^c t^m d_q t = c^{m+1}/[m+1]_q
        let trunc = TruncationPolicy::default();
        for qv in [0.3, 0.5, 0.8] {
            let qq = q(qv);
            for m in 0..=4u32 {
                for c in [0.5, 1.0, 2.0] {
                    let f = move |t: f64| t.powi(m as i32);
                    let got = jackson_integral_zero_to(&f, c, qq, &trunc).unwrap();
                    let expect = c.powi(m as i32 + 1) / q_integer(m + 1, qq);
                    assert_abs_diff_eq!(got, expect, epsilon = 1e-10 * expect.max(1.0));
                }
            }
        }
    }

    #[test]
    fn jackson_first_and_second_moment_partial_sum_crosscheck() {
        // 200-term partial sums computed independently of the adaptive loop.
        let qv = 0.5;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        let mut qj = 1.0;
        for _ in 0..200 {
            s1 += (1.0 - qv) * qj * qj;
            s2 += (1.0 - qv) * qj * qj * qj;
            qj *= qv;
        }
        let trunc = TruncationPolicy::default();
        let ft = |t: f64| t;
        let ft2 = |t: f64| t * t;
        let i1 = jackson_integral_zero_to(&ft, 1.0, q(qv), &trunc).unwrap();
        let i2 = jackson_integral_zero_to(&ft2, 1.0, q(qv), &trunc).unwrap();
        assert_abs_diff_eq!(i1, s1, epsilon = 1e-12);
        assert_abs_diff_eq!(i2, s2, epsilon = 1e-12);
        assert_abs_diff_eq!(i1, 1.0 / q_integer(2, q(qv)), epsilon = 1e-12);
        assert_abs_diff_eq!(i2, 1.0 / q_integer(3, q(qv)), epsilon = 1e-12);
    }

    #[test]
    fn jackson_rejects_q_one() {
        let trunc = TruncationPolicy::default();
        let f = |t: f64| t;
        assert!(jackson_integral(&f, 0.0, 1.0, q(1.0), &trunc).is_err());
    }

    #[test]
    fn jackson_nonconvergent_on_tiny_cap() {
        let trunc = TruncationPolicy::new(1e-14, 8).unwrap();
        let f = |t: f64| t;
        let err = jackson_integral_zero_to(&f, 1.0, q(0.99), &trunc).unwrap_err();
        assert!(matches!(err, Error::NonConvergent { .. }));
    }

    proptest! {
        #[test]
        fn jackson_linearity(
            qv in 0.2f64..0.95,
            a in 0.0f64..2.0,
            len in 0.1f64..2.0,
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let qq = q(qv);
            let trunc = TruncationPolicy::default();
            let b = a + len;
            let f = |t: f64| t * t - 0.5;
            let g = |t: f64| (1.0 + t).ln();
            let combo = move |t: f64| alpha * f(t) + beta * g(t);
            let lhs = jackson_integral(&combo, a, b, qq, &trunc).unwrap();
            let rhs = alpha * jackson_integral(&f, a, b, qq, &trunc).unwrap()
                + beta * jackson_integral(&g, a, b, qq, &trunc).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn jackson_interval_additivity(
            qv in 0.2f64..0.95,
            a in 0.0f64..1.5,
            l1 in 0.05f64..1.5,
            l2 in 0.05f64..1.5,
        ) {
            let qq = q(qv);
            let trunc = TruncationPolicy::default();
            let b = a + l1;
            let c = b + l2;
            let f = |t: f64| t.sin() + t;
            let lhs = jackson_integral(&f, a, b, qq, &trunc).unwrap()
                + jackson_integral(&f, b, c, qq, &trunc).unwrap();
            let rhs = jackson_integral(&f, a, c, qq, &trunc).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
        }
    }
}
