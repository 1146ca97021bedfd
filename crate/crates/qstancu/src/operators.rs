//! The q-Baskakov basis family and evaluation of the discrete Stancu
//! q-Baskakov operator and its Kantorovich variant.
//!
//! The concrete family is `phi_n(x) = 1/(1+x)_q^n`, for which the basis
//! weights have the closed form
//! `[n+k-1 choose k]_q q^{k(k-1)/2} x^k / (1+x)_q^{n+k}`.
//! Evaluation never forms factorials of large `k`; successive weights come
//! from the term-ratio recurrence
//! `w_{k+1}/w_k = q^k [n+k]_q x / ([k+1]_q (1 + q^{n+k} x))`.

use crate::error::{Error, Result};
use crate::qcalc::{self, jackson_integral, QParam, TruncationPolicy};

/// Stancu shift parameters `(alpha, beta)` with `0 <= alpha <= beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancuParams {
    alpha: f64,
    beta: f64,
}

impl StancuParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 0.0 <= alpha && alpha <= beta) {
            return Err(Error::Domain(format!(
                "StancuParams require 0 <= alpha <= beta, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(StancuParams { alpha, beta })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A basis family satisfying the positivity and recursion conditions the
/// operator construction requires.
pub trait BasisFamily {
    /// The k-th basis weight at `x`.
    fn weight(&self, n: u64, k: u64, x: f64, q: QParam) -> f64;
    /// The index `m(n)` appearing in the second-moment formulas.
    fn m_of(&self, n: u64) -> u64;
}

/// The q-Baskakov family `phi_n(x) = 1/(1+x)_q^n`, with `m(n) = n + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QBaskakov;

impl BasisFamily for QBaskakov {
    fn weight(&self, n: u64, k: u64, x: f64, q: QParam) -> f64 {
        baskakov_weight(n, k, x, q)
    }

    fn m_of(&self, n: u64) -> u64 {
        n + 1
    }
}

/// q-Baskakov basis weight, computed by the multiplicative recurrence.
pub fn baskakov_weight(n: u64, k: u64, x: f64, q: QParam) -> f64 {
    let mut it = WeightIter::new(n, x, q);
    let mut w = 0.0;
    for _ in 0..=k {
        w = it.next_weight();
    }
    w
}

/// Iterator state for the weight recurrence at a fixed `(n, x, q)`.
///
/// The weight is carried as a natural log: the seed `1/(1+x)_q^n` underflows
/// to zero for large `n x`, which would silently zero out the whole
/// multiplicative recurrence even though the weights near the bump are O(1).
pub struct WeightIter {
    n: u64,
    x: f64,
    q: QParam,
    k: u64,
    lw: f64,
    q_pow_k: f64,
    q_pow_nk: f64,
}

impl WeightIter {
    pub fn new(n: u64, x: f64, q: QParam) -> Self {
        let qv = q.get();
        WeightIter {
            n,
            x,
            q,
            k: 0,
            lw: -qcalc::q_pochhammer_ln(x, n, q),
            q_pow_k: 1.0,
            q_pow_nk: qv.powi(n as i32),
        }
    }

    /// Returns `w_k` and advances the internal state to `k + 1`.
    pub fn next_weight(&mut self) -> f64 {
        let current = self.lw.exp();
        let ratio = self.q_pow_k * qcalc::q_integer(self.n + self.k, self.q) * self.x
            / (qcalc::q_integer(self.k + 1, self.q) * (1.0 + self.q_pow_nk * self.x));
        self.lw += ratio.ln();
        self.q_pow_k *= self.q.get();
        self.q_pow_nk *= self.q.get();
        self.k += 1;
        current
    }
}

/// One operator instance: index `n`, deformation `q`, Stancu parameters and
/// truncation policy.
#[derive(Debug, Clone, Copy)]
pub struct OperatorSpec {
    pub n: u64,
    pub q: QParam,
    pub params: StancuParams,
    pub pol: TruncationPolicy,
}

/// Jackson integrals of the (scaled) integrand over the Kantorovich cells,
/// precomputed once per function so that grid sweeps over `x` only pay for
/// the weight recurrence.
pub struct KantorovichCells {
    vals: Vec<f64>,
}

impl KantorovichCells {
    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}

impl OperatorSpec {
    pub fn new(n: u64, q: QParam, params: StancuParams, pol: TruncationPolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("operator index n must be >= 1".into()));
        }
        pol.validate()?;
        Ok(OperatorSpec { n, q, params, pol })
    }

    /// `[n]_q + beta`, the normalization shared by nodes and cells.
    #[inline]
    pub(crate) fn norm(&self) -> f64 {
        qcalc::q_integer(self.n, self.q) + self.params.beta()
    }

    /// The k-th evaluation node `([k]_q + q^{k-1} alpha) / (q^{k-1} ([n]_q + beta))`.
    pub fn node(&self, k: u64) -> f64 {
        let q = self.q.get();
        // [k]_q / q^{k-1} = (q^{1-k} - q) / (1-q), or k at q = 1
        let shifted = if self.q.is_classical() {
            k as f64
        } else {
            (q.powi(1 - k as i32) - q) / (1.0 - q)
        };
        (shifted + self.params.alpha()) / self.norm()
    }

    /// Endpoints of the k-th Kantorovich cell.
    pub fn cell_bounds(&self, k: u64) -> (f64, f64) {
        let q = self.q.get();
        let nq = self.norm();
        let qk1 = q.powi(k as i32 - 1);
        let qk = qk1 * q;
        let lo = q * (qcalc::q_integer(k, self.q) + qk1 * self.params.alpha()) / nq;
        let hi = (qcalc::q_integer(k + 1, self.q) + qk * self.params.alpha()) / nq;
        (lo, hi)
    }

    /// Basis weights at `x`, in increasing `k`.
    pub fn weights(&self, x: f64) -> WeightIter {
        WeightIter::new(self.n, x, self.q)
    }

    /// Basis-sum stopping rule: the bulk of the mass is in *and* the current
    /// term cannot move a quadratically bounded sum by more than
    /// `series_tol`. Checking mass alone would drop an `f(node_k)`-weighted
    /// tail (the nodes grow without bound), while a mass target near machine
    /// precision is unreachable for q close to 1.
    pub(crate) fn tail_converged(&self, mass: f64, w: f64, k: u64) -> bool {
        if mass < 1.0 - self.pol.weight_mass_tol {
            return false;
        }
        let t = self.node(k);
        w * (1.0 + t + t * t) <= self.pol.series_tol
    }

    /// Number of basis terms needed to satisfy the stopping rule at `x`.
    pub fn required_terms(&self, x: f64) -> Result<usize> {
        let mut it = self.weights(x);
        let mut mass = 0.0;
        for k in 0..self.pol.k_max {
            let w = it.next_weight();
            mass += w;
            if self.tail_converged(mass, w, k as u64) {
                return Ok(k + 1);
            }
        }
        Err(Error::TruncationBudget(format!(
            "weight mass {mass} below target at x={x} after {} terms",
            self.pol.k_max
        )))
    }

    /// The discrete operator: `sum_k w_k(x) f(node_k)`.
    pub fn eval_discrete(&self, f: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("operator domain is x >= 0, got {x}")));
        }
        let mut it = self.weights(x);
        let mut mass = 0.0;
        let mut acc = 0.0;
        for k in 0..self.pol.k_max as u64 {
            let w = it.next_weight();
            let fv = f(self.node(k));
            if !fv.is_finite() {
                return Err(Error::Eval(format!("non-finite sample at node {}", self.node(k))));
            }
            acc += w * fv;
            mass += w;
            if self.tail_converged(mass, w, k) {
                return Ok(acc);
            }
        }
        Err(Error::TruncationBudget(format!(
            "weight mass {mass} below target at x={x}; raise k_max or reduce x"
        )))
    }

    /// Jackson integral of `t -> f(q^{-k+1} t)` over the k-th cell.
    fn cell_integral(&self, f: &dyn Fn(f64) -> f64, k: u64) -> Result<f64> {
        let (lo, hi) = self.cell_bounds(k);
        let scale = self.q.get().powi(1 - k as i32);
        jackson_integral(&|t| f(scale * t), lo, hi, self.q, &self.pol)
    }

    /// Precompute the first `k_count` cell integrals of `f`.
    pub fn kantorovich_cells(&self, f: &dyn Fn(f64) -> f64, k_count: usize) -> Result<KantorovichCells> {
        let mut vals = Vec::with_capacity(k_count);
        for k in 0..k_count as u64 {
            vals.push(self.cell_integral(f, k)?);
        }
        Ok(KantorovichCells { vals })
    }

    /// The Kantorovich operator: `([n]_q + beta) sum_k w_k(x) I_k`.
    pub fn eval_kantorovich(&self, f: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("operator domain is x >= 0, got {x}")));
        }
        let mut it = self.weights(x);
        let mut mass = 0.0;
        let mut acc = 0.0;
        for k in 0..self.pol.k_max as u64 {
            let w = it.next_weight();
            if w != 0.0 {
                acc += w * self.cell_integral(f, k)?;
            }
            mass += w;
            if self.tail_converged(mass, w, k) {
                return Ok(self.norm() * acc);
            }
        }
        Err(Error::TruncationBudget(format!(
            "weight mass {mass} below target at x={x}; raise k_max or reduce x"
        )))
    }

    /// Kantorovich evaluation against precomputed cell integrals.
    pub fn eval_kantorovich_cached(&self, cells: &KantorovichCells, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("operator domain is x >= 0, got {x}")));
        }
        let mut it = self.weights(x);
        let mut mass = 0.0;
        let mut acc = 0.0;
        for (k, val) in cells.vals.iter().enumerate() {
            let w = it.next_weight();
            acc += w * val;
            mass += w;
            if self.tail_converged(mass, w, k as u64) {
                return Ok(self.norm() * acc);
            }
        }
        Err(Error::TruncationBudget(format!(
            "cell table of {} entries too short for x={x}",
            cells.vals.len()
        )))
    }
}
