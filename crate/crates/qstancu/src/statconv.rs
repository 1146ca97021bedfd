//! Natural density, statistical limits, admissible q-sequences, and the
//! empirical convergence harness for the sup-norm and weighted-norm
//! statements.
//!
//! Statistical convergence is asymptotic; the finite-N proxy used here is a
//! density curve over growing checkpoints with an explicit verdict rule:
//! nonincreasing over the last three checkpoints and a net decrease from the
//! first checkpoint to the last (a flat zero curve also passes).

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{OperatorSpec, StancuParams};
use crate::qcalc::{QParam, TruncationPolicy};

/// A deterministic membership test over positive integers.
#[derive(Clone)]
pub struct IndexPredicate {
    label: String,
    test: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl IndexPredicate {
    pub fn new(label: impl Into<String>, test: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        IndexPredicate { label: label.into(), test: Arc::new(test) }
    }

    pub fn empty() -> Self {
        IndexPredicate::new("empty", |_| false)
    }

    #[inline]
    pub fn contains(&self, j: u64) -> bool {
        (self.test)(j)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `|{j <= N : j in K}| / N`.
pub fn natural_density(pred: &IndexPredicate, n: u64) -> f64 {
    assert!(n >= 1, "natural_density requires N >= 1");
    let count = (1..=n).filter(|&j| pred.contains(j)).count();
    count as f64 / n as f64
}

/// Density at `N` of the exception set `{j <= N : |seq(j) - L| >= eps}`.
pub fn st_limit_estimate(seq: &dyn Fn(u64) -> f64, limit: f64, epsilon: f64, n: u64) -> f64 {
    assert!(epsilon > 0.0, "st_limit_estimate requires epsilon > 0");
    let count = (1..=n).filter(|&j| (seq(j) - limit).abs() >= epsilon).count();
    count as f64 / n as f64
}

/// A sequence `n -> q_n in (0, 1)` with a labelled exceptional index set.
#[derive(Clone)]
pub struct QSequence {
    label: String,
    gen: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    exceptional: IndexPredicate,
}

impl QSequence {
    #[inline]
    pub fn q_at(&self, n: u64) -> f64 {
        (self.gen)(n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exceptional(&self) -> &IndexPredicate {
        &self.exceptional
    }
}

/// The two admissible q-sequence constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSeqKind {
    /// `q_n = 1 - 1/(n+1)`: ordinary (hence statistical) convergence to 1.
    Plain,
    /// `q_n = 1/2` on perfect squares, `1 - 1/(n+1)` otherwise: statistically
    /// but not ordinarily convergent to 1.
    SquareExceptional,
}

pub fn is_perfect_square(j: u64) -> bool {
    let r = (j as f64).sqrt().round() as u64;
    r * r == j
}

pub fn make_admissible_qseq(kind: QSeqKind) -> QSequence {
    match kind {
        QSeqKind::Plain => QSequence {
            label: "plain".into(),
            gen: Arc::new(|n| 1.0 - 1.0 / (n as f64 + 1.0)),
            exceptional: IndexPredicate::empty(),
        },
        QSeqKind::SquareExceptional => QSequence {
            label: "square-exceptional".into(),
            gen: Arc::new(|n| {
                if is_perfect_square(n) {
                    0.5
                } else {
                    1.0 - 1.0 / (n as f64 + 1.0)
                }
            }),
            exceptional: IndexPredicate::new("perfect squares", is_perfect_square),
        },
    }
}

/// Sup-norm error of the Kantorovich operator against `f` over a grid.
pub fn sup_error<F>(spec: &OperatorSpec, f: &F, grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    norm_error(spec, f, grid, |_| 1.0)
}

/// Weighted grid norm `max |f(x)| / (1 + x^2)`.
pub fn weighted_norm<F>(f: &F, grid: &[f64]) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    grid.iter()
        .map(|&x| f(x).abs() / (1.0 + x * x))
        .fold(0.0, f64::max)
}

/// Weighted-norm error of the Kantorovich operator against `f` over a grid.
pub fn weighted_sup_error<F>(spec: &OperatorSpec, f: &F, grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    norm_error(spec, f, grid, |x| 1.0 / (1.0 + x * x))
}

fn norm_error<F>(spec: &OperatorSpec, f: &F, grid: &[f64], weight: impl Fn(f64) -> f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    if grid.is_empty() {
        return Err(Error::Domain("sup_error requires a nonempty grid".into()));
    }
    let x_max = grid.iter().cloned().fold(0.0, f64::max);
    let k = spec.required_terms(x_max)? + 2;
    let cells = spec.kantorovich_cells(&|t| f(t), k)?;
    let mut worst = 0.0f64;
    for &x in grid {
        let v = spec.eval_kantorovich_cached(&cells, x)?;
        worst = worst.max((v - f(x)).abs() * weight(x));
    }
    Ok(worst)
}

/// Per-epsilon outcome of a convergence experiment.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub n_values: Vec<u64>,
    pub errors: Vec<f64>,
    pub epsilon: f64,
    /// `(N, estimated density of {j <= N : E_j >= epsilon})` at growing checkpoints.
    pub density_curve: Vec<(u64, f64)>,
    pub verdict: bool,
}

/// Shared setup of a convergence experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub params: StancuParams,
    pub pol: TruncationPolicy,
    /// Upper end of the evaluation domain (`A` for sup-norm runs, `X_max`
    /// for weighted runs).
    pub domain_max: f64,
    pub grid_step: f64,
    pub n_max: u64,
    /// Every index up to this bound is evaluated; beyond it a log-spaced
    /// subset (always including exceptional indices and their successors).
    pub dense_limit: u64,
    pub log_samples: usize,
}

impl ExperimentSetup {
    pub fn new(params: StancuParams, domain_max: f64, grid_step: f64, n_max: u64) -> Self {
        ExperimentSetup {
            params,
            pol: TruncationPolicy::default(),
            domain_max,
            grid_step,
            n_max,
            dense_limit: 200,
            log_samples: 40,
        }
    }

    fn grid(&self) -> Vec<f64> {
        uniform_grid(self.domain_max, self.grid_step)
    }
}

pub fn uniform_grid(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step).round() as usize;
    (0..=count).map(|i| (i as f64 * step).min(max)).collect()
}

/// Indices at which `E_n` is actually computed.
pub fn sample_indices(setup: &ExperimentSetup, exceptional: &IndexPredicate) -> Vec<u64> {
    let mut samples: Vec<u64> = (1..=setup.n_max.min(setup.dense_limit)).collect();
    for j in setup.dense_limit + 1..=setup.n_max {
        // exceptional indices and their successors are always sampled so the
        // density bookkeeping never attributes an exceptional error to a gap
        if exceptional.contains(j) || (j > 1 && exceptional.contains(j - 1)) {
            samples.push(j);
        }
    }
    if setup.n_max > setup.dense_limit {
        let lo = (setup.dense_limit as f64).ln();
        let hi = (setup.n_max as f64).ln();
        for i in 0..=setup.log_samples {
            let v = (lo + (hi - lo) * i as f64 / setup.log_samples.max(1) as f64).exp();
            samples.push((v.round() as u64).clamp(1, setup.n_max));
        }
        samples.push(setup.n_max);
    }
    samples.sort_unstable();
    samples.dedup();
    samples
}

/// Density of `{j <= N : E_j >= eps}` from sampled errors. Unsampled indices
/// inherit the error of the nearest preceding non-exceptional sample.
pub fn exception_density(
    samples: &[(u64, f64)],
    exceptional: &IndexPredicate,
    n: u64,
    epsilon: f64,
) -> f64 {
    let mut count = 0u64;
    let mut idx = 0usize;
    let mut last_regular = f64::NAN;
    let mut attributed = f64::NAN;
    for j in 1..=n {
        while idx < samples.len() && samples[idx].0 <= j {
            if samples[idx].0 == j {
                attributed = samples[idx].1;
                if !exceptional.contains(j) {
                    last_regular = samples[idx].1;
                }
            }
            idx += 1;
        }
        let e = if idx > 0 && samples[idx - 1].0 == j {
            attributed
        } else {
            last_regular
        };
        if e.is_finite() && e >= epsilon {
            count += 1;
        }
    }
    count as f64 / n as f64
}

fn density_checkpoints(n_max: u64) -> Vec<u64> {
    let mut pts: Vec<u64> = [16, 8, 4, 2, 1]
        .iter()
        .map(|d| n_max / d)
        .filter(|&n| n >= 10)
        .collect();
    if pts.is_empty() {
        pts.push(n_max);
    }
    pts.dedup();
    pts
}

fn verdict(curve: &[(u64, f64)]) -> bool {
    if curve.is_empty() {
        return false;
    }
    let vals: Vec<f64> = curve.iter().map(|&(_, d)| d).collect();
    let tail = &vals[vals.len().saturating_sub(3)..];
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let first = vals[0];
    let last = *vals.last().unwrap();
    let net_decrease = if first == 0.0 { last == 0.0 } else { last < first };
    nonincreasing && net_decrease
}

fn run_experiment<E>(
    setup: &ExperimentSetup,
    qseq: &QSequence,
    epsilons: &[f64],
    err_of: E,
) -> Result<Vec<ConvergenceReport>>
where
    E: Fn(&OperatorSpec, &[f64]) -> Result<f64> + Sync,
{
    if setup.n_max < 10 {
        return Err(Error::Domain("experiments require n_max >= 10".into()));
    }
    let grid = setup.grid();
    if grid.is_empty() {
        return Err(Error::Domain("empty evaluation grid".into()));
    }
    let indices = sample_indices(setup, qseq.exceptional());
    let errors: Result<Vec<f64>> = indices
        .par_iter()
        .map(|&n| {
            let q = QParam::new(qseq.q_at(n))?;
            let spec = OperatorSpec::new(n, q, setup.params, setup.pol)?;
            err_of(&spec, &grid)
        })
        .collect();
    let errors = errors?;
    let samples: Vec<(u64, f64)> = indices.iter().cloned().zip(errors.iter().cloned()).collect();
    let checkpoints = density_checkpoints(setup.n_max);
    let reports = epsilons
        .iter()
        .map(|&eps| {
            let curve: Vec<(u64, f64)> = checkpoints
                .iter()
                .map(|&n| (n, exception_density(&samples, qseq.exceptional(), n, eps)))
                .collect();
            ConvergenceReport {
                n_values: indices.clone(),
                errors: errors.clone(),
                epsilon: eps,
                verdict: verdict(&curve),
                density_curve: curve,
            }
        })
        .collect();
    Ok(reports)
}

/// Sup-norm statistical-convergence experiment.
pub fn statistical_convergence_experiment<F>(
    f: &F,
    qseq: &QSequence,
    setup: &ExperimentSetup,
    epsilons: &[f64],
) -> Result<Vec<ConvergenceReport>>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    run_experiment(setup, qseq, epsilons, |spec, grid| sup_error(spec, f, grid))
}

/// Weighted-norm statistical-convergence experiment.
pub fn weighted_convergence_experiment<F>(
    f: &F,
    qseq: &QSequence,
    setup: &ExperimentSetup,
    epsilons: &[f64],
) -> Result<Vec<ConvergenceReport>>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    let grid = setup.grid();
    for &x in &grid {
        if f(x).abs() > 1e6 * (1.0 + x * x) {
            return Err(Error::WeightedClass(format!(
                "|f({x})| exceeds 1e6 (1 + x^2); not in the weighted class"
            )));
        }
    }
    run_experiment(setup, qseq, epsilons, |spec, grid| {
        weighted_sup_error(spec, f, grid)
    })
}
