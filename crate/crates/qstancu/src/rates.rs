//! Modulus-of-continuity machinery and the quantitative error bounds:
//! the `2 omega(f; sqrt(delta_n(x)))` bound and the Lipschitz-class
//! `M delta_n^{a/2}(x)` bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::moments::kantorovich_moments;
use crate::operators::{OperatorSpec, StancuParams};
use crate::qcalc::QParam;

/// Grid estimate of `omega(f; delta)`; a lower bound of the true modulus
/// that converges as the step shrinks.
#[derive(Debug, Clone, Copy)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub omega: f64,
    pub grid_step: f64,
}

/// Declared Lipschitz class membership: `|f(t)-f(x)| <= M |t-x|^a`.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzSpec {
    pub m: f64,
    pub a: f64,
}

impl LipschitzSpec {
    pub fn new(m: f64, a: f64) -> Result<Self> {
        if !(m > 0.0 && a > 0.0 && a <= 1.0) {
            return Err(Error::Domain(format!(
                "LipschitzSpec requires M > 0 and a in (0, 1], got M={m}, a={a}"
            )));
        }
        Ok(LipschitzSpec { m, a })
    }
}

/// Brute-force `sup |f(t)-f(x)|` over grid pairs with `|t-x| <= delta`.
pub fn modulus_of_continuity(
    f: &dyn Fn(f64) -> f64,
    delta: f64,
    domain: (f64, f64),
    step: f64,
) -> ModulusEstimate {
    assert!(delta >= 0.0 && step > 0.0, "need delta >= 0 and step > 0");
    let (lo, hi) = domain;
    let count = ((hi - lo) / step).round() as usize;
    let xs: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    let fv: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let window = (delta / step + 1e-9).floor() as usize;
    let mut omega = 0.0f64;
    for i in 0..xs.len() {
        for j in i + 1..=(i + window).min(xs.len() - 1) {
            omega = omega.max((fv[j] - fv[i]).abs());
        }
    }
    ModulusEstimate { delta, omega, grid_step: step }
}

/// The second central moment `delta_n(x)` of the Kantorovich operator;
/// identical to the grouped closed form in the moment oracle.
pub fn delta_n_of_x(n: u64, q: QParam, params: &StancuParams, x: f64) -> f64 {
    kantorovich_moments(n, q, params, x).delta_n
}

/// One bound check: raw left- and right-hand sides plus the grid/truncation
/// slack, reported separately so unpadded numbers stay visible.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

fn grid_lipschitz_estimate(f: &dyn Fn(f64) -> f64, domain: (f64, f64), step: f64) -> f64 {
    let (lo, hi) = domain;
    let count = ((hi - lo) / step).round() as usize;
    let mut worst = 0.0f64;
    let mut prev = f(lo);
    for i in 1..=count {
        let v = f(lo + i as f64 * step);
        worst = worst.max((v - prev).abs() / step);
        prev = v;
    }
    worst
}

/// Checks `|L*(f; x) - f(x)| <= 2 omega(f; sqrt(delta_n(x)))` with slack for
/// the grid underestimation of the modulus and the series truncation.
pub fn check_modulus_bound(
    f: &(dyn Fn(f64) -> f64 + Sync),
    spec: &OperatorSpec,
    x: f64,
    domain: (f64, f64),
    step: f64,
) -> Result<BoundCheck> {
    let lhs = (spec.eval_kantorovich(f, x)? - f(x)).abs();
    let delta = delta_n_of_x(spec.n, spec.q, &spec.params, x).max(0.0).sqrt();
    let est = modulus_of_continuity(f, delta, domain, step);
    let rhs = 2.0 * est.omega;
    let lip = grid_lipschitz_estimate(f, domain, step);
    let slack = 10.0 * spec.pol.series_tol + 2.0 * lip * step;
    Ok(BoundCheck { lhs, rhs, slack, holds: lhs <= rhs + slack })
}

/// Number of random pairs sampled when vetting a Lipschitz declaration.
pub const LIPSCHITZ_SAMPLE_PAIRS: usize = 10_000;

/// Sampled membership test for `f in Lip_M(a)` over `domain`.
pub fn verify_lipschitz(
    f: &dyn Fn(f64) -> f64,
    lip: &LipschitzSpec,
    domain: (f64, f64),
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain;
    for _ in 0..LIPSCHITZ_SAMPLE_PAIRS {
        let t = rng.gen_range(lo..=hi);
        let s = rng.gen_range(lo..=hi);
        let diff = (f(t) - f(s)).abs();
        let bound = lip.m * (t - s).abs().powf(lip.a);
        if diff > bound * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::LipschitzViolation(format!(
                "|f({t}) - f({s})| = {diff} exceeds M|t-s|^a = {bound}"
            )));
        }
    }
    Ok(())
}

/// Checks `|L*(f; x) - f(x)| <= M delta_n^{a/2}(x)` after vetting the
/// declared Lipschitz membership on sampled pairs.
pub fn check_lipschitz_bound(
    f: &(dyn Fn(f64) -> f64 + Sync),
    lip: &LipschitzSpec,
    spec: &OperatorSpec,
    x: f64,
    sample_domain: (f64, f64),
    seed: u64,
) -> Result<BoundCheck> {
    verify_lipschitz(f, lip, sample_domain, seed)?;
    let lhs = (spec.eval_kantorovich(f, x)? - f(x)).abs();
    let delta = delta_n_of_x(spec.n, spec.q, &spec.params, x).max(0.0);
    let rhs = lip.m * delta.powf(lip.a / 2.0);
    let slack = 10.0 * spec.pol.series_tol;
    Ok(BoundCheck { lhs, rhs, slack, holds: lhs <= rhs + slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::classical_moments;
    use crate::qcalc::{q_integer, TruncationPolicy};

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn spec(n: u64, qv: f64, alpha: f64, beta: f64) -> OperatorSpec {
        OperatorSpec::new(
            n,
            q(qv),
            StancuParams::new(alpha, beta).unwrap(),
            TruncationPolicy::default(),
        )
        .unwrap()
    }

    #[test]
    fn modulus_examples() {
        let e1 = |t: f64| t;
        let m = modulus_of_continuity(&e1, 0.3, (0.0, 2.0), 0.01);
        assert!((m.omega - 0.3).abs() < 1e-12);
        let e0 = |_: f64| 1.0;
        assert_eq!(modulus_of_continuity(&e0, 0.5, (0.0, 2.0), 0.01).omega, 0.0);
        let e2 = |t: f64| t * t;
        let m = modulus_of_continuity(&e2, 0.2, (0.0, 2.0), 0.01);
        assert!((m.omega - 0.76).abs() < 1e-10, "got {}", m.omega);
    }

    #[test]
    fn modulus_monotone_in_delta() {
        let f = |t: f64| (3.0 * t).sin();
        let mut prev = 0.0;
        for &d in &[0.05, 0.1, 0.2, 0.4, 0.8] {
            let m = modulus_of_continuity(&f, d, (0.0, 2.0), 0.005).omega;
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn modulus_subadditivity_proxy() {
        let funcs: [&dyn Fn(f64) -> f64; 3] =
            [&|t| t / (1.0 + t), &|t| t.min(1.0), &|t: f64| (2.0 * t).cos()];
        let step = 0.005;
        for f in funcs {
            for &d in &[0.1, 0.2, 0.4] {
                let small = modulus_of_continuity(f, d, (0.0, 2.0), step).omega;
                let big = modulus_of_continuity(f, 2.0 * d, (0.0, 2.0), step).omega;
                let lip = grid_lipschitz_estimate(f, (0.0, 2.0), step);
                assert!(big <= 2.0 * small + 4.0 * lip * step, "d={d}: {big} vs {small}");
            }
        }
    }

    #[test]
    fn pointwise_modulus_inequality_instances() {
        // |f(t)-f(x)| <= omega(f; d)(1 + |t-x|/d) up to grid correction
        let f = |t: f64| t / (1.0 + t);
        let step = 0.002;
        let lip = grid_lipschitz_estimate(&f, (0.0, 2.0), step);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t = rng.gen_range(0.0..2.0);
            let x = rng.gen_range(0.0..2.0);
            let d = rng.gen_range(0.05..0.5);
            let omega = modulus_of_continuity(&f, d, (0.0, 2.0), step).omega;
            let lhs = (f(t) - f(x)).abs();
            let rhs = omega * (1.0 + (t - x).abs() / d) + 2.0 * lip * step;
            assert!(lhs <= rhs, "t={t}, x={x}, d={d}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn delta_n_at_origin_closed_form() {
        let p = StancuParams::new(0.0, 0.0).unwrap();
        let d = delta_n_of_x(10, q(0.9), &p, 0.0);
        let nq = q_integer(10, q(0.9));
        let expect = 0.81 / (q_integer(3, q(0.9)) * nq * nq);
        assert!((d - expect).abs() < 1e-14);
        assert!((d - 0.00704576).abs() < 1e-7, "got {d}");
        // oracle: the operator applied to (t-x)^2 at x = 0
        let s = spec(10, 0.9, 0.0, 0.0);
        let direct = s.eval_kantorovich(&|t| t * t, 0.0).unwrap();
        assert!((d - direct).abs() < 1e-9);
    }

    #[test]
    fn delta_n_classical_scaling() {
        let p = StancuParams::new(0.0, 0.0).unwrap();
        for &n in &[50u64, 200, 800] {
            let ratio = classical_moments(2 * n, &p, 1.0).delta_n / classical_moments(n, &p, 1.0).delta_n;
            assert!((0.4..=0.6).contains(&ratio), "n={n}: ratio {ratio}");
        }
    }

    #[test]
    fn delta_n_decreases_along_plain_sequence() {
        let p = StancuParams::new(0.0, 0.0).unwrap();
        let d = |n: u64| {
            let qn = 1.0 - 1.0 / (n as f64 + 1.0);
            delta_n_of_x(n, q(qn), &p, 1.0)
        };
        assert!(d(10) > d(100) && d(100) > d(1000));
    }

    #[test]
    fn modulus_bound_holds_for_samples() {
        let s = spec(20, 0.9, 1.0, 2.0);
        let f = |t: f64| t / (1.0 + t);
        let c = check_modulus_bound(&f, &s, 1.0, (0.0, 4.0), 0.005).unwrap();
        assert!(c.holds, "lhs {} rhs {} slack {}", c.lhs, c.rhs, c.slack);
        let e0 = |_: f64| 1.0;
        let c = check_modulus_bound(&e0, &s, 1.0, (0.0, 4.0), 0.005).unwrap();
        assert!(c.lhs < 1e-9 && c.holds);
    }

    #[test]
    fn modulus_bound_linear_function_is_tightest_case() {
        // for e1: lhs = |alpha_n(x)| and omega(e1; d) = d exactly
        let s = spec(10, 0.8, 0.0, 0.0);
        let x = 0.5;
        let c = check_modulus_bound(&|t| t, &s, x, (0.0, 4.0), 0.002).unwrap();
        let m = kantorovich_moments(10, q(0.8), &StancuParams::new(0.0, 0.0).unwrap(), x);
        assert!((c.lhs - m.alpha_n.abs()).abs() < 1e-9);
        assert!(c.holds);
    }

    #[test]
    fn lipschitz_bound_holds_for_declared_pairs() {
        let s = spec(20, 0.9, 0.0, 0.0);
        let lip = LipschitzSpec::new(1.0, 1.0).unwrap();
        let c = check_lipschitz_bound(&|t| t, &lip, &s, 1.0, (0.0, 2.0), 42).unwrap();
        assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
        let half = LipschitzSpec::new(1.0, 0.5).unwrap();
        let c = check_lipschitz_bound(&|t: f64| t.sqrt(), &half, &s, 1.0, (0.0, 2.0), 42).unwrap();
        assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
    }

    #[test]
    fn lipschitz_declaration_rejected_for_sqrt_with_a_one() {
        let s = spec(20, 0.9, 0.0, 0.0);
        let lip = LipschitzSpec::new(1.0, 1.0).unwrap();
        let r = check_lipschitz_bound(&|t: f64| t.sqrt(), &lip, &s, 1.0, (0.0, 2.0), 42);
        assert!(matches!(r, Err(Error::LipschitzViolation(_))));
    }
}
