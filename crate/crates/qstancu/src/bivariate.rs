//! The tensor-product Kantorovich operator on `[0, inf)^2`, its bivariate
//! modulus of continuity, and the two bivariate rate bounds.
//!
//! The double Jackson integral over a product cell is evaluated as an
//! iterated integral, reusing the univariate machinery per axis. The cell
//! table depends only on the integrand and the two axis specs, never on the
//! evaluation point, so grid sweeps precompute it once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::qcalc::jackson_integral;
use crate::rates::{delta_n_of_x, BoundCheck, LIPSCHITZ_SAMPLE_PAIRS};

/// Axis specs of the bivariate operator; both share the Stancu parameters.
#[derive(Debug, Clone, Copy)]
pub struct BivariateSpec {
    pub spec_x: OperatorSpec,
    pub spec_y: OperatorSpec,
}

impl BivariateSpec {
    pub fn new(spec_x: OperatorSpec, spec_y: OperatorSpec) -> Result<Self> {
        if spec_x.params != spec_y.params {
            return Err(Error::Domain(
                "bivariate axes must share the same Stancu parameters".into(),
            ));
        }
        Ok(BivariateSpec { spec_x, spec_y })
    }

    /// Double Jackson integral of `(t, s) -> f(scale1 t, scale2 s)` over the
    /// `(k1, k2)` product cell, as an iterated integral.
    fn cell_integral(&self, f: &(dyn Fn(f64, f64) -> f64 + Sync), k1: u64, k2: u64) -> Result<f64> {
        let (lo1, hi1) = self.spec_x.cell_bounds(k1);
        let (lo2, hi2) = self.spec_y.cell_bounds(k2);
        let s1 = self.spec_x.q.get().powi(1 - k1 as i32);
        let s2 = self.spec_y.q.get().powi(1 - k2 as i32);
        let outer = |t: f64| {
            jackson_integral(
                &|s| f(s1 * t, s2 * s),
                lo2,
                hi2,
                self.spec_y.q,
                &self.spec_y.pol,
            )
            .unwrap_or(f64::NAN)
        };
        let v = jackson_integral(&outer, lo1, hi1, self.spec_x.q, &self.spec_x.pol)?;
        if !v.is_finite() {
            return Err(Error::Eval(format!("non-finite double integral in cell ({k1}, {k2})")));
        }
        Ok(v)
    }

    /// Direct double-sum evaluation at a point.
    pub fn eval_bivariate(&self, f: &(dyn Fn(f64, f64) -> f64 + Sync), x: f64, y: f64) -> Result<f64> {
        let k1 = self.spec_x.required_terms(x)?;
        let k2 = self.spec_y.required_terms(y)?;
        let table = self.cell_table(f, k1, k2)?;
        self.eval_with_table(&table, x, y)
    }

    /// Precompute the `(k1, k2)` cell integrals for repeated evaluation.
    pub fn cell_table(
        &self,
        f: &(dyn Fn(f64, f64) -> f64 + Sync),
        k1_count: usize,
        k2_count: usize,
    ) -> Result<CellTable> {
        let mut vals = Vec::with_capacity(k1_count);
        for k1 in 0..k1_count as u64 {
            let mut row = Vec::with_capacity(k2_count);
            for k2 in 0..k2_count as u64 {
                row.push(self.cell_integral(f, k1, k2)?);
            }
            vals.push(row);
        }
        Ok(CellTable { vals })
    }

    /// Evaluation against a precomputed cell table.
    pub fn eval_with_table(&self, table: &CellTable, x: f64, y: f64) -> Result<f64> {
        if x < 0.0 || y < 0.0 {
            return Err(Error::Domain(format!("operator domain is x, y >= 0, got ({x}, {y})")));
        }
        let w1 = truncated_weights(&self.spec_x, x, table.vals.len())?;
        let k2_len = table.vals.first().map_or(0, Vec::len);
        let w2 = truncated_weights(&self.spec_y, y, k2_len)?;
        let mut acc = 0.0;
        for (i, &wx) in w1.iter().enumerate() {
            let row = &table.vals[i];
            let mut inner = 0.0;
            for (j, &wy) in w2.iter().enumerate() {
                inner += wy * row[j];
            }
            acc += wx * inner;
        }
        Ok(self.spec_x.norm() * self.spec_y.norm() * acc)
    }
}

/// Per-cell double Jackson integrals of one integrand.
pub struct CellTable {
    vals: Vec<Vec<f64>>,
}

fn truncated_weights(spec: &OperatorSpec, x: f64, limit: usize) -> Result<Vec<f64>> {
    let mut it = spec.weights(x);
    let mut out = Vec::new();
    let mut mass = 0.0;
    for k in 0..limit.min(spec.pol.k_max) {
        let w = it.next_weight();
        out.push(w);
        mass += w;
        if spec.tail_converged(mass, w, k as u64) {
            return Ok(out);
        }
    }
    Err(Error::TruncationBudget(format!(
        "axis weight mass {mass} below target at {x} within {limit} cells"
    )))
}

/// Estimate of the bivariate modulus `omega(f; delta1, delta2)`.
#[derive(Debug, Clone, Copy)]
pub struct BivariateModulus {
    pub delta1: f64,
    pub delta2: f64,
    pub omega: f64,
}

/// Brute-force bivariate modulus with base points on the `[0, a_max]^2` grid.
/// The partner point ranges up to `delta` beyond the box, since the modulus
/// is defined over the whole quadrant, not the evaluation window.
pub fn bivariate_modulus(
    f: &dyn Fn(f64, f64) -> f64,
    delta1: f64,
    delta2: f64,
    a_max: f64,
    step: f64,
) -> BivariateModulus {
    assert!(delta1 >= 0.0 && delta2 >= 0.0 && step > 0.0);
    let count = (a_max / step).round() as isize;
    let w1 = (delta1 / step + 1e-9).floor() as isize;
    let w2 = (delta2 / step + 1e-9).floor() as isize;
    let n_ext = (count + w1.max(w2) + 1) as usize;
    let fv: Vec<f64> = (0..n_ext)
        .flat_map(|i| (0..n_ext).map(move |j| f(i as f64 * step, j as f64 * step)))
        .collect();
    let mut omega = 0.0f64;
    for i in 0..=count {
        for j in 0..=count {
            let base = fv[i as usize * n_ext + j as usize];
            // base point inside the box, partner anywhere within the window
            for di in -w1..=w1 {
                let ii = i + di;
                if ii < 0 {
                    continue;
                }
                for dj in -w2..=w2 {
                    let jj = j + dj;
                    if jj < 0 {
                        continue;
                    }
                    let v = fv[ii as usize * n_ext + jj as usize];
                    omega = omega.max((v - base).abs());
                }
            }
        }
    }
    BivariateModulus { delta1, delta2, omega }
}

pub(crate) fn grid_axis_lipschitz(f: &dyn Fn(f64, f64) -> f64, a_max: f64, step: f64) -> f64 {
    let count = (a_max / step).round() as usize;
    let mut worst = 0.0f64;
    for i in 0..=count {
        let x = i as f64 * step;
        for j in 1..=count {
            let y = j as f64 * step;
            worst = worst.max((f(x, y) - f(x, y - step)).abs() / step);
            worst = worst.max((f(y, x) - f(y - step, x)).abs() / step);
        }
    }
    worst
}

/// Checks `|L*(f; x, y) - f(x, y)| <= 4 omega(f; sqrt(d1(x)), sqrt(d2(y)))`.
pub fn check_bivariate_modulus_bound(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    bspec: &BivariateSpec,
    x: f64,
    y: f64,
    a_max: f64,
    step: f64,
) -> Result<BoundCheck> {
    let lhs = (bspec.eval_bivariate(f, x, y)? - f(x, y)).abs();
    let d1 = delta_n_of_x(bspec.spec_x.n, bspec.spec_x.q, &bspec.spec_x.params, x)
        .max(0.0)
        .sqrt();
    let d2 = delta_n_of_x(bspec.spec_y.n, bspec.spec_y.q, &bspec.spec_y.params, y)
        .max(0.0)
        .sqrt();
    let omega = bivariate_modulus(f, d1, d2, a_max, step).omega;
    let rhs = 4.0 * omega;
    let lip = grid_axis_lipschitz(f, a_max, step);
    let slack = 10.0 * bspec.spec_x.pol.series_tol + 4.0 * lip * step;
    Ok(BoundCheck { lhs, rhs, slack, holds: lhs <= rhs + slack })
}

/// Sampled membership test for the product Lipschitz class, in the mixed
/// second-difference form
/// `|f(t1,s1) - f(t1,s0) - f(t0,s1) + f(t0,s0)| <= M |t1-t0|^{a1} |s1-s0|^{a2}`.
///
/// The pointwise first-difference form admits no nonconstant functions
/// (hold one coordinate fixed and the right side vanishes); the mixed form
/// is the one separable products of per-axis Hoelder factors satisfy, and it
/// still rejects exponent over-declarations.
pub fn verify_lipschitz_2d(
    f: &dyn Fn(f64, f64) -> f64,
    m: f64,
    a1: f64,
    a2: f64,
    sample_max: f64,
    seed: u64,
) -> Result<()> {
    if !(m > 0.0 && a1 > 0.0 && a1 <= 1.0 && a2 > 0.0 && a2 <= 1.0) {
        return Err(Error::Domain(format!(
            "need M > 0 and a1, a2 in (0, 1], got M={m}, a1={a1}, a2={a2}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..LIPSCHITZ_SAMPLE_PAIRS {
        let (x0, y0) = (rng.gen_range(0.0..=sample_max), rng.gen_range(0.0..=sample_max));
        let (x1, y1) = (rng.gen_range(0.0..=sample_max), rng.gen_range(0.0..=sample_max));
        let diff = (f(x1, y1) - f(x1, y0) - f(x0, y1) + f(x0, y0)).abs();
        let bound = m * (x1 - x0).abs().powf(a1) * (y1 - y0).abs().powf(a2);
        if diff > bound * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::LipschitzViolation(format!(
                "mixed difference {diff} at ({x0},{y0})-({x1},{y1}) exceeds M|dx|^a1 |dy|^a2 = {bound}"
            )));
        }
    }
    Ok(())
}

/// Checks the product Lipschitz bound
/// `|L*(f; x, y) - f(x, y)| <= M d1^{a1/2}(x) d2^{a2/2}(y)` after vetting the
/// declared class membership on sampled pairs.
#[allow(clippy::too_many_arguments)]
pub fn check_bivariate_lipschitz_bound(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    m: f64,
    a1: f64,
    a2: f64,
    bspec: &BivariateSpec,
    x: f64,
    y: f64,
    sample_max: f64,
    seed: u64,
) -> Result<BoundCheck> {
    verify_lipschitz_2d(f, m, a1, a2, sample_max, seed)?;
    let lhs = (bspec.eval_bivariate(f, x, y)? - f(x, y)).abs();
    let d1 = delta_n_of_x(bspec.spec_x.n, bspec.spec_x.q, &bspec.spec_x.params, x).max(0.0);
    let d2 = delta_n_of_x(bspec.spec_y.n, bspec.spec_y.q, &bspec.spec_y.params, y).max(0.0);
    let rhs = m * d1.powf(a1 / 2.0) * d2.powf(a2 / 2.0);
    let slack = 10.0 * bspec.spec_x.pol.series_tol;
    Ok(BoundCheck { lhs, rhs, slack, holds: lhs <= rhs + slack })
}
