//! q-calculus primitives: q-integers, q-factorials, Gaussian binomials,
//! q-Pochhammer products, q-derivatives and truncated Jackson integrals.
//!
//! All functions take the deformation parameter through [`QParam`], which
//! guarantees `0 < q <= 1` and routes `q = 1` to the classical limit without
//! ever dividing by `1 - q`.

use crate::error::{Error, Result};

/// Deformation parameter `q` with `0 < q <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam(f64);

/// Below this distance from 1 the geometric closed form of `[n]_q` loses
/// digits to cancellation and direct summation is used instead.
const Q_SUM_FALLBACK: f64 = 1e-12;

/// Jackson sums with `q` this close to 1 need billions of terms; the series
/// differs from the Riemann integral by O(1-q), far below every tolerance in
/// use, so classical adaptive quadrature takes over.
const Q_CLASSICAL_QUADRATURE: f64 = 1e-7;

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(QParam(q))
        } else {
            Err(Error::Domain(format!("q must lie in (0, 1], got {q}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True exactly at the classical limit `q = 1`.
    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// True when Jackson sums should be replaced by classical quadrature.
    #[inline]
    pub(crate) fn quadrature_classical(self) -> bool {
        1.0 - self.0 < Q_CLASSICAL_QUADRATURE
    }
}

/// Truncation controls for the infinite sums in this crate.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    /// Absolute tail bound for geometric-type series.
    pub series_tol: f64,
    /// Basis sums stop once accumulated weight reaches `1 - weight_mass_tol`
    /// *and* the next term cannot move a quadratically bounded sum by more
    /// than `series_tol`. The mass target alone would be both too loose for
    /// unbounded integrands (the omitted tail is weighted by `f(node)`) and
    /// numerically unreachable near machine precision when q -> 1.
    pub weight_mass_tol: f64,
    /// Hard cap on retained basis terms.
    pub k_max: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            series_tol: 1e-12,
            weight_mass_tol: 1e-6,
            k_max: 10_000,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return Err(Error::Domain("series_tol must be positive".into()));
        }
        if !(self.weight_mass_tol > 0.0 && self.weight_mass_tol < 1.0) {
            return Err(Error::Domain("weight_mass_tol must lie in (0, 1)".into()));
        }
        if self.k_max == 0 {
            return Err(Error::Domain("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// `[n]_q = (1 - q^n) / (1 - q)`, equal to `n` at `q = 1`.
pub fn q_integer(n: u64, q: QParam) -> f64 {
    let qv = q.get();
    if q.is_classical() {
        return n as f64;
    }
    if 1.0 - qv < Q_SUM_FALLBACK {
        // near-classical: sum 1 + q + ... + q^{n-1} directly
        let mut acc = 0.0;
        let mut p = 1.0;
        for _ in 0..n {
            acc += p;
            p *= qv;
        }
        return acc;
    }
    (1.0 - qv.powi(n as i32)) / (1.0 - qv)
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u64, q: QParam) -> f64 {
    if n <= 60 {
        (1..=n).map(|k| q_integer(k, q)).product()
    } else {
        (1..=n).map(|k| q_integer(k, q).ln()).sum::<f64>().exp()
    }
}

/// Gaussian binomial `[n choose k]_q`.
pub fn q_binomial(n: u64, k: u64, q: QParam) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("q_binomial requires k <= n, got k={k}, n={n}")));
    }
    let k = k.min(n - k);
    if n <= 60 {
        Ok((1..=k).map(|i| q_integer(n - k + i, q) / q_integer(i, q)).product())
    } else {
        Ok((1..=k)
            .map(|i| q_integer(n - k + i, q).ln() - q_integer(i, q).ln())
            .sum::<f64>()
            .exp())
    }
}

/// `(1+x)_q^n = (1+x)(1+qx)...(1+q^{n-1}x)`, with the empty product equal to 1.
pub fn q_pochhammer(x: f64, n: u64, q: QParam) -> f64 {
    let qv = q.get();
    let mut acc = 1.0;
    let mut p = 1.0;
    for _ in 0..n {
        acc *= 1.0 + p * x;
        p *= qv;
    }
    acc
}

/// Natural log of `(1+x)_q^n`, stable where the product itself underflows
/// (for example `(1+x)^{-n}` seeds of basis-weight recurrences at large `n`).
pub fn q_pochhammer_ln(x: f64, n: u64, q: QParam) -> f64 {
    let qv = q.get();
    let mut acc = 0.0;
    let mut p = 1.0;
    for _ in 0..n {
        acc += (p * x).ln_1p();
        p *= qv;
    }
    acc
}

/// q-difference quotient `(f(x) - f(qx)) / ((1-q) x)`.
///
/// Both `x = 0` and `q = 1` are outside the contract; callers needing the
/// classical limit must supply an ordinary derivative themselves.
pub fn q_derivative(f: &dyn Fn(f64) -> f64, x: f64, q: QParam) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Domain("q_derivative is undefined at x = 0".into()));
    }
    if q.is_classical() {
        return Err(Error::Domain("q_derivative requires q < 1".into()));
    }
    let qv = q.get();
    Ok((f(x) - f(qv * x)) / ((1.0 - qv) * x))
}

/// k-fold q-derivative by recursion on the defining difference quotient.
pub fn q_derivative_iterated(f: &dyn Fn(f64) -> f64, k: u32, x: f64, q: QParam) -> Result<f64> {
    if k == 0 {
        return Ok(f(x));
    }
    if x == 0.0 {
        return Err(Error::Domain("q_derivative_iterated is undefined at x = 0".into()));
    }
    if q.is_classical() {
        return Err(Error::Domain("q_derivative_iterated requires q < 1".into()));
    }
    let qv = q.get();
    let hi = q_derivative_iterated(f, k - 1, x, q)?;
    let lo = q_derivative_iterated(f, k - 1, qv * x, q)?;
    Ok((hi - lo) / ((1.0 - qv) * x))
}

/// Jackson integral `int_0^c f(t) d_q t = (1-q) c sum_j f(c q^j) q^j`.
///
/// The series is truncated at the first `j` with
/// `q^j (1 + |f(c q^j)|) < series_tol`, capped at
/// `10 ceil(ln series_tol / ln q)`. For `q` within 1e-7 of 1 the sum is
/// evaluated as a classical integral by adaptive quadrature instead.
pub fn jackson_integral_0(
    f: &dyn Fn(f64) -> f64,
    c: f64,
    q: QParam,
    pol: &TruncationPolicy,
) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::Domain(format!("jackson_integral_0 requires c >= 0, got {c}")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    if q.quadrature_classical() {
        return adaptive_simpson(f, 0.0, c, pol.series_tol);
    }
    let qv = q.get();
    let j_cap = 10.0 * (pol.series_tol.ln() / qv.ln()).ceil();
    let j_cap = j_cap.max(1.0) as u64;
    let mut acc = 0.0;
    let mut p = 1.0; // q^j
    for _ in 0..=j_cap {
        let v = f(c * p);
        if !v.is_finite() {
            return Err(Error::Eval(format!("non-finite sample f({}) in Jackson sum", c * p)));
        }
        acc += v * p;
        if p * (1.0 + v.abs()) < pol.series_tol {
            break;
        }
        p *= qv;
    }
    Ok((1.0 - qv) * c * acc)
}

/// Jackson integral over `[a, b]` as the difference of two one-endpoint integrals.
pub fn jackson_integral(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    q: QParam,
    pol: &TruncationPolicy,
) -> Result<f64> {
    if a < 0.0 || a > b {
        return Err(Error::Domain(format!("jackson_integral requires 0 <= a <= b, got a={a}, b={b}")));
    }
    if q.quadrature_classical() {
        return adaptive_simpson(f, a, b, pol.series_tol);
    }
    let hi = jackson_integral_0(f, b, q, pol)?;
    if a == 0.0 {
        return Ok(hi);
    }
    Ok(hi - jackson_integral_0(f, a, q, pol)?)
}

/// Checks the q-Cauchy-Schwarz inequality
/// `int_a^b |f| d_q t <= (int_a^b f^2 d_q t)^{1/2} (int_a^b d_q t)^{1/2}`
/// under the hypothesis `0 <= a <= q b`, `b > 0`.
pub fn q_schwarz_check(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    q: QParam,
    pol: &TruncationPolicy,
) -> Result<bool> {
    if !(b > 0.0) || a < 0.0 || a > q.get() * b {
        return Err(Error::Domain(format!(
            "q_schwarz_check requires 0 <= a <= q*b with b > 0, got a={a}, b={b}, q={}",
            q.get()
        )));
    }
    let lhs = jackson_integral(&|t| f(t).abs(), a, b, q, pol)?;
    let sq = jackson_integral(&|t| f(t) * f(t), a, b, q, pol)?;
    let len = jackson_integral(&|_| 1.0, a, b, q, pol)?;
    // compare in squared form: when the interval measure is a single atom
    // (a = q b) the inequality is an exact equality, and the square-root
    // amplifies truncation noise in the tiny second moment far beyond a
    // flat series_tol slack
    let tol = 10.0 * pol.series_tol * (1.0 + len.abs()) * (1.0 + sq.abs() + lhs * lhs);
    Ok(lhs * lhs <= sq.max(0.0) * len.max(0.0) + tol)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        if !flm.is_finite() || !frm.is_finite() {
            return Err(Error::Eval("non-finite sample in classical quadrature".into()));
        }
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    if !fa.is_finite() || !fm.is_finite() || !fb.is_finite() {
        return Err(Error::Eval("non-finite sample in classical quadrature".into()));
    }
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(0, q(0.5)), 0.0);
        assert!((q_integer(3, q(0.5)) - 1.75).abs() < 1e-15);
        assert_eq!(q_integer(7, q(1.0)), 7.0);
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, q(0.9)), 1.0);
        assert!((q_factorial(2, q(0.5)) - 1.5).abs() < 1e-15);
        assert!((q_factorial(5, q(1.0)) - 120.0).abs() < 1e-12);
    }

    #[test]
    fn q_binomial_examples() {
        assert!((q_binomial(4, 0, q(0.7)).unwrap() - 1.0).abs() < 1e-15);
        // Gaussian polynomial 1 + q + 2q^2 + q^3 + q^4 at q = 0.5
        let expect = 1.0 + 0.5 + 2.0 * 0.25 + 0.125 + 0.0625;
        assert!((q_binomial(4, 2, q(0.5)).unwrap() - expect).abs() < 1e-14);
        assert!((q_binomial(5, 2, q(1.0)).unwrap() - 10.0).abs() < 1e-12);
        assert!(q_binomial(2, 3, q(0.5)).is_err());
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(2.0, 0, q(0.5)), 1.0);
        assert!((q_pochhammer(1.0, 2, q(0.5)) - 3.0).abs() < 1e-15);
        assert!((q_pochhammer(1.0, 3, q(1.0)) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn q_derivative_examples() {
        let e2 = |t: f64| t * t;
        let e1 = |t: f64| t;
        let e0 = |_: f64| 1.0;
        assert!((q_derivative(&e2, 2.0, q(0.5)).unwrap() - 3.0).abs() < 1e-14);
        assert!((q_derivative(&e1, 0.3, q(0.8)).unwrap() - 1.0).abs() < 1e-14);
        assert!(q_derivative(&e0, 1.0, q(0.5)).unwrap().abs() < 1e-14);
        assert!(q_derivative(&e1, 0.0, q(0.5)).is_err());
        assert!(q_derivative(&e1, 1.0, q(1.0)).is_err());
    }

    #[test]
    fn q_derivative_iterated_polynomials() {
        let e2 = |t: f64| t * t;
        // D_q^2 x^2 = [2]_q! = 1.5 at q = 0.5
        assert!((q_derivative_iterated(&e2, 2, 1.0, q(0.5)).unwrap() - 1.5).abs() < 1e-12);
        assert!(q_derivative_iterated(&e2, 3, 1.0, q(0.5)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn q_derivative_iterated_rational_oracle() {
        // phi_2(x) = 1/((1+x)(1+qx)); D_q phi_2 expanded symbolically:
        // D_q phi_2(x) = -[2]_q / ((1+x)(1+qx)(1+q^2 x))
        let qq = q(0.5);
        let qv = qq.get();
        let phi2 = move |x: f64| 1.0 / ((1.0 + x) * (1.0 + qv * x));
        let x = 1.0;
        let expect = -q_integer(2, qq) / ((1.0 + x) * (1.0 + qv * x) * (1.0 + qv * qv * x));
        let got = q_derivative_iterated(&phi2, 1, x, qq).unwrap();
        assert!((got - expect).abs() < 1e-12, "got {got}, expect {expect}");
    }

    #[test]
    fn jackson_integral_examples() {
        let pol = TruncationPolicy::default();
        let e1 = |t: f64| t;
        let e0 = |_: f64| 1.0;
        let e2 = |t: f64| t * t;
        let v = jackson_integral_0(&e1, 1.0, q(0.5), &pol).unwrap();
        assert!((v - 1.0 / 1.5).abs() < 1e-11);
        let v = jackson_integral_0(&e0, 2.0, q(0.9), &pol).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = jackson_integral_0(&e2, 1.0, q(0.8), &pol).unwrap();
        assert!((v - 1.0 / q_integer(3, q(0.8))).abs() < 1e-11);
    }

    #[test]
    fn jackson_interval_constant() {
        let pol = TruncationPolicy::default();
        let v = jackson_integral(&|_| 1.0, 0.5, 1.0, q(0.5), &pol).unwrap();
        assert!((v - 0.5).abs() < 1e-11);
        assert!(jackson_integral(&|_| 1.0, 1.0, 0.5, q(0.5), &pol).is_err());
    }

    #[test]
    fn jackson_interval_cell_closed_forms() {
        // endpoints of the k-th Kantorovich cell, checked against the
        // closed forms for the integrals of 1 and t
        let pol = TruncationPolicy::default();
        let qq = q(0.9);
        let (alpha, beta) = (1.0, 2.0);
        let nq = q_integer(4, qq) + beta;
        // k = 0, f = 1
        let k = 0u64;
        let qk1 = qq.get().powi(k as i32 - 1);
        let lo = qq.get() * (q_integer(k, qq) + qk1 * alpha) / nq;
        let hi = (q_integer(k + 1, qq) + qq.get().powi(k as i32) * alpha) / nq;
        let v = jackson_integral(&|_| 1.0, lo, hi, qq, &pol).unwrap();
        assert!((v - 1.0 / nq).abs() < 1e-11, "got {v}, expect {}", 1.0 / nq);
        // k = 1, f = t
        let k = 1u64;
        let qk1 = qq.get().powi(k as i32 - 1);
        let lo = qq.get() * (q_integer(k, qq) + qk1 * alpha) / nq;
        let hi = (q_integer(k + 1, qq) + qq.get().powi(k as i32) * alpha) / nq;
        let v = jackson_integral(&|t| t, lo, hi, qq, &pol).unwrap();
        let expect = (q_integer(2, qq) * q_integer(k, qq) + qq.get().powi(k as i32) * (1.0 + 2.0 * alpha))
            / (q_integer(2, qq) * nq * nq);
        assert!((v - expect).abs() < 1e-11, "got {v}, expect {expect}");
    }

    #[test]
    fn schwarz_examples() {
        let pol = TruncationPolicy::default();
        let abs0 = |t: f64| t; // |t - 0|
        assert!(q_schwarz_check(&abs0, 0.0, 1.0, q(0.5), &pol).unwrap());
        // hypothesis violation: a > q*b
        let absh = |t: f64| (t - 0.5f64).abs();
        assert!(q_schwarz_check(&absh, 0.5, 0.9, q(0.5), &pol).is_err());
        let abs1 = |t: f64| (t - 1.0f64).abs();
        assert!(q_schwarz_check(&abs1, 0.2, 0.5, q(0.5), &pol).unwrap());
    }

    #[test]
    fn classical_limit_agreement() {
        let qq = q(1.0 - 1e-8);
        for n in 0..=20u64 {
            let rel = (q_integer(n, qq) - n as f64).abs() / (n as f64).max(1.0);
            assert!(rel < 1e-5);
        }
        let fact: f64 = (1..=12u64).map(|k| k as f64).product();
        assert!((q_factorial(12, qq) - fact).abs() / fact < 1e-5);
        assert!((q_binomial(20, 7, qq).unwrap() - 77520.0).abs() / 77520.0 < 1e-5);
        assert!((q_pochhammer(0.5, 20, qq) - 1.5f64.powi(20)).abs() / 1.5f64.powi(20) < 1e-5);
        let pol = TruncationPolicy::default();
        let v = jackson_integral_0(&|t| t, 2.0, qq, &pol).unwrap();
        assert!((v - 2.0).abs() < 1e-5);
    }

    #[test]
    fn jackson_moment_closed_forms() {
        let pol = TruncationPolicy::default();
        for &qv in &[0.5, 0.8, 0.95] {
            for m in 0..=3i32 {
                for &c in &[0.5, 1.0, 2.0] {
                    let v = jackson_integral_0(&|t| t.powi(m), c, q(qv), &pol).unwrap();
                    let expect = c.powi(m + 1) / q_integer(m as u64 + 1, q(qv));
                    assert!(
                        (v - expect).abs() < pol.series_tol * 10.0 * c.powi(m + 1).max(1.0),
                        "m={m}, q={qv}, c={c}: got {v}, expect {expect}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q_integer_recurrence(n in 1u64..200, qv in 0.01f64..0.999) {
            let qq = q(qv);
            let lhs = q_integer(n, qq);
            let rhs = q_integer(n - 1, qq) + qv.powi(n as i32 - 1);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
        }

        #[test]
        fn q_pascal_identity(n in 1u64..40, kk in 0u64..40, qv in 0.05f64..0.999) {
            let k = kk % (n + 1);
            prop_assume!(k >= 1 && k <= n - 1 || n == 1);
            if n >= 2 && k >= 1 && k <= n - 1 {
                let qq = q(qv);
                let lhs = q_binomial(n, k, qq).unwrap();
                let rhs = q_binomial(n - 1, k - 1, qq).unwrap()
                    + qv.powi(k as i32) * q_binomial(n - 1, k, qq).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            }
        }

        #[test]
        fn q_binomial_symmetry(n in 0u64..50, kk in 0u64..50, qv in 0.05f64..0.999) {
            let k = kk % (n + 1);
            let qq = q(qv);
            let a = q_binomial(n, k, qq).unwrap();
            let b = q_binomial(n, n - k, qq).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        // `a = q^m b` (or 0) keeps the interval measure positive; for
        // arbitrary a in [0, qb] the inequality can genuinely fail
        fn schwarz_randomized(xv in 0.0f64..2.0, bv in 0.05f64..2.0, m in 0u32..8, qv in 0.1f64..0.99) {
            let qq = q(qv);
            let a = if m == 0 { 0.0 } else { bv * qv.powi(m as i32) };
            let pol = TruncationPolicy::default();
            let f = move |t: f64| (t - xv).abs();
            prop_assert!(q_schwarz_check(&f, a, bv, qq, &pol).unwrap());
        }
    }
}
