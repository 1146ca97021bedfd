//! Closed-form moment oracles for the discrete and Kantorovich operators,
//! their classical (`q = 1`) limits, and the bivariate tensor moments.
//!
//! These formulas are the ground truth the direct summation paths are tested
//! against; `m(n) = n + 1` is baked in, matching the q-Baskakov family.

use crate::operators::StancuParams;
use crate::qcalc::{q_integer, QParam};

/// Images of the monomial test functions at a point, plus the first and
/// second central moments.
#[derive(Debug, Clone, Copy)]
pub struct MomentSet {
    /// Image of `e_0`; always 1.
    pub m0: f64,
    /// Image of `e_1`.
    pub m1: f64,
    /// Image of `e_2`.
    pub m2: f64,
    /// First central moment `L(t - x; x)`.
    pub alpha_n: f64,
    /// Second central moment `L((t - x)^2; x)`.
    pub delta_n: f64,
}

/// Moments of the discrete operator.
pub fn discrete_moments(n: u64, q: QParam, params: &StancuParams, x: f64) -> MomentSet {
    let (a, b) = (params.alpha(), params.beta());
    let nq = q_integer(n, q);
    let mq = q_integer(n + 1, q);
    let norm = nq + b;
    let m1 = nq / norm * x + a / norm;
    let m2 = nq * mq / (q.get() * norm * norm) * x * x
        + nq * (2.0 * a + 1.0) / (norm * norm) * x
        + a * a / (norm * norm);
    MomentSet {
        m0: 1.0,
        m1,
        m2,
        alpha_n: m1 - x,
        delta_n: central_second(x, m1, m2),
    }
}

/// Moments of the Kantorovich operator, with the central moments in the
/// grouped polynomial form that avoids subtracting large terms.
pub fn kantorovich_moments(n: u64, q: QParam, params: &StancuParams, x: f64) -> MomentSet {
    let (a, b) = (params.alpha(), params.beta());
    let qv = q.get();
    let nq = q_integer(n, q);
    let mq = q_integer(n + 1, q);
    let q2 = q_integer(2, q);
    let q3 = q_integer(3, q);
    let norm = nq + b;
    let m1 = nq / norm * x + qv * (1.0 + 2.0 * a) / (q2 * norm);
    let linear = nq * (q3 + qv * ((1.0 + 3.0 * a) * q2 + 1.0)) / (q3 * norm * norm);
    let constant = qv * qv * (1.0 + 3.0 * a + 3.0 * a * a) / (q3 * norm * norm);
    let m2 = nq * mq / (qv * norm * norm) * x * x + linear * x + constant;
    let alpha_n = (nq / norm - 1.0) * x + qv * (1.0 + 2.0 * a) / (q2 * norm);
    let delta_n = (nq * mq / (qv * norm * norm) + 1.0 - 2.0 * nq / norm) * x * x
        + (linear - 2.0 * qv * (1.0 + 2.0 * a) / (q2 * norm)) * x
        + constant;
    MomentSet { m0: 1.0, m1, m2, alpha_n, delta_n }
}

/// Kantorovich moments at the classical limit `q = 1`, with `m(n) = n + 1`.
pub fn classical_moments(n: u64, params: &StancuParams, x: f64) -> MomentSet {
    let (a, b) = (params.alpha(), params.beta());
    let nf = n as f64;
    let mf = (n + 1) as f64;
    let norm = nf + b;
    let m1 = nf / norm * x + (1.0 + 2.0 * a) / (2.0 * norm);
    let m2 = nf * mf / (norm * norm) * x * x
        + 2.0 * nf * (a + 1.0) / (norm * norm) * x
        + (1.0 + 3.0 * a + 3.0 * a * a) / (3.0 * norm * norm);
    let alpha_n = (nf / norm - 1.0) * x + (1.0 + 2.0 * a) / (2.0 * norm);
    let delta_n = (nf * mf / (norm * norm) + 1.0 - 2.0 * nf / norm) * x * x
        + (2.0 * nf * (1.0 + a) / (norm * norm) - (1.0 + 2.0 * a) / norm) * x
        + (1.0 + 3.0 * a + 3.0 * a * a) / (3.0 * norm * norm);
    MomentSet { m0: 1.0, m1, m2, alpha_n, delta_n }
}

/// Bivariate tensor moments: images of `1`, `x`, `y` and `x^2 + y^2`.
///
/// Each axis contributes its univariate Kantorovich moments; the second-order
/// image is the sum of the two per-axis second moments, including the `1/q`
/// factor on both quadratic terms.
#[derive(Debug, Clone, Copy)]
pub struct BivariateMoments {
    pub m0: f64,
    pub m1x: f64,
    pub m1y: f64,
    pub m2sum: f64,
}

pub fn bivariate_moments(
    n1: u64,
    n2: u64,
    q1: QParam,
    q2: QParam,
    params: &StancuParams,
    x: f64,
    y: f64,
) -> BivariateMoments {
    let mx = kantorovich_moments(n1, q1, params, x);
    let my = kantorovich_moments(n2, q2, params, y);
    BivariateMoments {
        m0: 1.0,
        m1x: mx.m1,
        m1y: my.m1,
        m2sum: mx.m2 + my.m2,
    }
}

fn central_second(x: f64, m1: f64, m2: f64) -> f64 {
    m2 - 2.0 * x * m1 + x * x
}
