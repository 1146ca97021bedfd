//! Config-driven experiment commands behind the `qstancu` binary.
//!
//! Each command loads one TOML config, runs its experiment, writes CSV (and
//! for convergence runs, an SVG plot) into the output directory, prints a
//! one-line summary, and reports an exit code: 0 success, 1 tolerance or
//! verdict failure, 2 config error, 3 rejected hypothesis declaration.

pub mod config;
pub mod output;

use std::path::Path;

use crate::bivariate::{
    bivariate_modulus, grid_axis_lipschitz, verify_lipschitz_2d, BivariateSpec,
};
use crate::error::{Error, Result};
use crate::moments::{bivariate_moments, discrete_moments, kantorovich_moments, MomentSet};
use crate::operators::OperatorSpec;
use crate::qcalc::{QParam, TruncationPolicy};
use crate::rates::{check_modulus_bound, delta_n_of_x, verify_lipschitz, LipschitzSpec};
use crate::statconv::{
    statistical_convergence_experiment, uniform_grid, weighted_convergence_experiment,
    ExperimentSetup,
};

pub use config::Config;
use output::{write_csv, write_error_plot, Cell, ErrorPlot};

/// Stable exit-code mapping for command failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::LipschitzViolation(_) => 3,
        _ => 1,
    }
}

fn spec_for(cfg: &Config, n: u64, q: f64) -> Result<OperatorSpec> {
    OperatorSpec::new(n, QParam::new(q)?, cfg.params()?, TruncationPolicy::default())
}

fn moment_value(set: &MomentSet, idx: usize) -> f64 {
    match idx {
        0 => set.m0,
        1 => set.m1,
        _ => set.m2,
    }
}

/// Moment verification: direct evaluation of `e0, e1, e2` against the closed
/// forms, for both the discrete and the Kantorovich operator.
pub fn cmd_moments(cfg: &Config, out: &Path) -> Result<i32> {
    let grid = uniform_grid(cfg.domain.max, cfg.domain.step);
    let monomials: [fn(f64) -> f64; 3] = [|_| 1.0, |t| t, |t| t * t];
    let mut rows = Vec::new();
    let mut max_err = 0.0f64;
    for &n in cfg.n_values()? {
        for &qv in &cfg.q_values()? {
            let spec = spec_for(cfg, n, qv)?;
            let k = spec.required_terms(cfg.domain.max)? + 2;
            for (idx, f) in monomials.iter().enumerate() {
                let cells = spec.kantorovich_cells(f, k)?;
                for &x in &grid {
                    for variant in ["discrete", "kantorovich"] {
                        let (closed, direct) = if variant == "discrete" {
                            (
                                moment_value(&discrete_moments(n, spec.q, &spec.params, x), idx),
                                spec.eval_discrete(f, x)?,
                            )
                        } else {
                            (
                                moment_value(&kantorovich_moments(n, spec.q, &spec.params, x), idx),
                                spec.eval_kantorovich_cached(&cells, x)?,
                            )
                        };
                        let err = (closed - direct).abs();
                        max_err = max_err.max(err);
                        rows.push(vec![
                            Cell::Int(n),
                            Cell::Num(qv),
                            Cell::Num(cfg.operator.alpha),
                            Cell::Num(cfg.operator.beta),
                            Cell::Num(x),
                            Cell::Text(variant.into()),
                            Cell::Text(format!("e{idx}")),
                            Cell::Num(closed),
                            Cell::Num(direct),
                            Cell::Num(err),
                        ]);
                    }
                }
            }
        }
    }
    write_csv(
        &out.join("moments.csv"),
        &[cfg.provenance()],
        &["n", "q", "alpha", "beta", "x", "variant", "moment", "closed_form", "direct_eval", "abs_err"],
        &rows,
    )?;
    let pass = max_err <= cfg.run.tolerance;
    println!(
        "moments: {} rows, max abs_err {:e}, tolerance {:e} -> {}",
        rows.len(),
        max_err,
        cfg.run.tolerance,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

/// Statistical-convergence experiment: per-n error table, per-epsilon density
/// curves, and an error-vs-n plot with exceptional indices marked.
pub fn cmd_converge(cfg: &Config, out: &Path) -> Result<i32> {
    let f = cfg.function_1d(&cfg.run.function)?;
    let qseq = cfg.qseq()?;
    let setup = ExperimentSetup {
        params: cfg.params()?,
        pol: TruncationPolicy::default(),
        domain_max: cfg.domain.max,
        grid_step: cfg.domain.step,
        n_max: cfg.run.n_max,
        dense_limit: 200,
        log_samples: 40,
    };
    let reports = match cfg.run.mode.as_str() {
        "weighted" => weighted_convergence_experiment(&f, &qseq, &setup, &cfg.run.epsilons)?,
        _ => statistical_convergence_experiment(&f, &qseq, &setup, &cfg.run.epsilons)?,
    };

    let first = &reports[0];
    let mut err_rows = Vec::new();
    let mut series = Vec::new();
    for (&n, &e) in first.n_values.iter().zip(&first.errors) {
        let exceptional = qseq.exceptional().contains(n);
        err_rows.push(vec![
            Cell::Int(n),
            Cell::Num(qseq.q_at(n)),
            Cell::Bool(exceptional),
            Cell::Num(e),
        ]);
        series.push((n, e, exceptional));
    }
    write_csv(
        &out.join("converge_errors.csv"),
        &[cfg.provenance(), format!("qseq={} function={}", qseq.label(), cfg.run.function)],
        &["n", "q_n", "exceptional", "error"],
        &err_rows,
    )?;

    let mut density_rows = Vec::new();
    for r in &reports {
        for &(n, d) in &r.density_curve {
            density_rows.push(vec![
                Cell::Num(r.epsilon),
                Cell::Int(n),
                Cell::Num(d),
                Cell::Bool(r.verdict),
            ]);
        }
    }
    write_csv(
        &out.join("converge_density.csv"),
        &[cfg.provenance(), format!("qseq={} function={}", qseq.label(), cfg.run.function)],
        &["epsilon", "N", "density", "verdict"],
        &density_rows,
    )?;

    write_error_plot(
        &out.join("converge_plot.svg"),
        &ErrorPlot {
            title: &format!("{} error vs n ({})", cfg.run.mode, qseq.label()),
            series: &series,
        },
    )?;

    let pass = reports.iter().all(|r| r.verdict);
    for r in &reports {
        println!(
            "converge: eps={:e} densities {:?} -> {}",
            r.epsilon,
            r.density_curve,
            if r.verdict { "PASS" } else { "FAIL" }
        );
    }
    Ok(if pass { 0 } else { 1 })
}

/// Rate-bound checks: the modulus bound at every grid point, plus the
/// Lipschitz bound when a class declaration is configured.
pub fn cmd_rates(cfg: &Config, out: &Path) -> Result<i32> {
    let f = cfg.function_1d(&cfg.run.function)?;
    let grid = uniform_grid(cfg.domain.max, cfg.domain.step);
    let lip = match &cfg.lipschitz {
        Some(l) => {
            let a = l.a.ok_or_else(|| Error::Config("lipschitz.a required for rates".into()))?;
            let spec = LipschitzSpec::new(l.m, a).map_err(|e| Error::Config(e.to_string()))?;
            verify_lipschitz(&f, &spec, (0.0, cfg.domain.max), cfg.run.seed)?;
            Some(spec)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut all_hold = true;
    for &n in cfg.n_values()? {
        let qv = cfg.q_at(n)?;
        let spec = spec_for(cfg, n, qv)?;
        let k = spec.required_terms(cfg.domain.max)? + 2;
        let cells = spec.kantorovich_cells(&f, k)?;
        for &x in &grid {
            let c = check_modulus_bound(&f, &spec, x, (0.0, cfg.domain.max), cfg.domain.step)?;
            all_hold &= c.holds;
            rows.push(vec![
                Cell::Int(n),
                Cell::Num(qv),
                Cell::Num(x),
                Cell::Text("modulus".into()),
                Cell::Num(c.lhs),
                Cell::Num(c.rhs),
                Cell::Num(c.slack),
                Cell::Bool(c.holds),
            ]);
            if let Some(l) = &lip {
                let lhs = (spec.eval_kantorovich_cached(&cells, x)? - f(x)).abs();
                let delta = delta_n_of_x(n, spec.q, &spec.params, x).max(0.0);
                let rhs = l.m * delta.powf(l.a / 2.0);
                let slack = 10.0 * spec.pol.series_tol;
                let holds = lhs <= rhs + slack;
                all_hold &= holds;
                rows.push(vec![
                    Cell::Int(n),
                    Cell::Num(qv),
                    Cell::Num(x),
                    Cell::Text("lipschitz".into()),
                    Cell::Num(lhs),
                    Cell::Num(rhs),
                    Cell::Num(slack),
                    Cell::Bool(holds),
                ]);
            }
        }
    }
    write_csv(
        &out.join("rates.csv"),
        &[cfg.provenance(), format!("function={}", cfg.run.function)],
        &["n", "q", "x", "kind", "lhs", "rhs", "slack", "holds"],
        &rows,
    )?;
    println!(
        "rates: {} rows -> {}",
        rows.len(),
        if all_hold { "PASS" } else { "FAIL" }
    );
    Ok(if all_hold { 0 } else { 1 })
}

/// Separable decompositions of the bivariate built-ins, used for the
/// tensor-factorization verification column.
fn separable_parts(name: &str) -> Option<(fn(f64) -> f64, fn(f64) -> f64)> {
    Some(match name {
        "one" => (|_| 1.0, |_| 1.0),
        "x" => (|x| x, |_| 1.0),
        "y" => (|_| 1.0, |y| y),
        "xy" => (|x| x, |y| y),
        "sqrt_xy" => (|x: f64| x.sqrt(), |y: f64| y.sqrt()),
        "min1_prod" => (|x: f64| x.min(1.0), |y: f64| y.min(1.0)),
        _ => return None,
    })
}

/// Bivariate run: tensor moment verification, optional tensor-factorization
/// column, the doubled-modulus bound, and the product Lipschitz bound when
/// declared.
pub fn cmd_bivariate(cfg: &Config, out: &Path) -> Result<i32> {
    let bi = cfg
        .bivariate
        .as_ref()
        .ok_or_else(|| Error::Config("bivariate command requires a [bivariate] section".into()))?;
    let f = cfg.function_2d(&bi.function)?;
    let qs = cfg.q_values()?;
    let (q1, q2) = match qs.as_slice() {
        [q] => (*q, *q),
        [a, b] => (*a, *b),
        _ => {
            return Err(Error::Config(
                "bivariate runs need one or two operator.q entries".into(),
            ))
        }
    };
    let lip = match &cfg.lipschitz {
        Some(l) => {
            let a1 = l.a1.or(l.a).ok_or_else(|| {
                Error::Config("lipschitz.a1 (or a) required for bivariate".into())
            })?;
            let a2 = l.a2.or(l.a).ok_or_else(|| {
                Error::Config("lipschitz.a2 (or a) required for bivariate".into())
            })?;
            verify_lipschitz_2d(&f, l.m, a1, a2, cfg.domain.max, cfg.run.seed)?;
            Some((l.m, a1, a2))
        }
        None => None,
    };

    let mut moment_rows = Vec::new();
    let mut bound_rows = Vec::new();
    let mut max_err = 0.0f64;
    let mut all_hold = true;
    let monomials: [(&str, fn(f64, f64) -> f64); 4] = [
        ("m0", |_, _| 1.0),
        ("m1x", |x, _| x),
        ("m1y", |_, y| y),
        ("m2sum", |x, y| x * x + y * y),
    ];
    for (&n1, &n2) in bi.n1.iter().zip(&bi.n2) {
        let sx = spec_for(cfg, n1, q1)?;
        let sy = spec_for(cfg, n2, q2)?;
        let bspec = BivariateSpec::new(sx, sy)?;
        let x_top = bi.points.iter().map(|p| p[0]).fold(0.0, f64::max);
        let y_top = bi.points.iter().map(|p| p[1]).fold(0.0, f64::max);
        let k1 = sx.required_terms(x_top)? + 2;
        let k2 = sy.required_terms(y_top)? + 2;

        for (label, g) in monomials {
            let table = bspec.cell_table(&g, k1, k2)?;
            for p in &bi.points {
                let (x, y) = (p[0], p[1]);
                let m = bivariate_moments(n1, n2, sx.q, sy.q, &sx.params, x, y);
                let closed = match label {
                    "m0" => m.m0,
                    "m1x" => m.m1x,
                    "m1y" => m.m1y,
                    _ => m.m2sum,
                };
                let direct = bspec.eval_with_table(&table, x, y)?;
                let err = (closed - direct).abs();
                max_err = max_err.max(err);
                moment_rows.push(vec![
                    Cell::Int(n1),
                    Cell::Int(n2),
                    Cell::Num(q1),
                    Cell::Num(q2),
                    Cell::Num(x),
                    Cell::Num(y),
                    Cell::Text(label.into()),
                    Cell::Num(closed),
                    Cell::Num(direct),
                    Cell::Num(err),
                ]);
            }
        }

        let table_f = bspec.cell_table(&f, k1, k2)?;
        let parts = separable_parts(&bi.function);
        for p in &bi.points {
            let (x, y) = (p[0], p[1]);
            let direct = bspec.eval_with_table(&table_f, x, y)?;
            if let Some((g, h)) = parts {
                let tensor = sx.eval_kantorovich(&g, x)? * sy.eval_kantorovich(&h, y)?;
                let err = (direct - tensor).abs();
                max_err = max_err.max(err);
                moment_rows.push(vec![
                    Cell::Int(n1),
                    Cell::Int(n2),
                    Cell::Num(q1),
                    Cell::Num(q2),
                    Cell::Num(x),
                    Cell::Num(y),
                    Cell::Text("tensor".into()),
                    Cell::Num(tensor),
                    Cell::Num(direct),
                    Cell::Num(err),
                ]);
            }
            // doubled-modulus bound, with the lhs from the cached table
            let lhs = (direct - f(x, y)).abs();
            let d1 = delta_n_of_x(n1, sx.q, &sx.params, x).max(0.0).sqrt();
            let d2 = delta_n_of_x(n2, sy.q, &sy.params, y).max(0.0).sqrt();
            let omega = bivariate_modulus(&f, d1, d2, cfg.domain.max, cfg.domain.step).omega;
            let axis_lip = grid_axis_lipschitz(&f, cfg.domain.max, cfg.domain.step);
            let rhs = 4.0 * omega;
            let slack = 10.0 * sx.pol.series_tol + 4.0 * axis_lip * cfg.domain.step;
            let c = crate::rates::BoundCheck { lhs, rhs, slack, holds: lhs <= rhs + slack };
            all_hold &= c.holds;
            bound_rows.push(vec![
                Cell::Int(n1),
                Cell::Int(n2),
                Cell::Num(q1),
                Cell::Num(q2),
                Cell::Num(x),
                Cell::Num(y),
                Cell::Text("modulus".into()),
                Cell::Num(c.lhs),
                Cell::Num(c.rhs),
                Cell::Num(c.slack),
                Cell::Bool(c.holds),
            ]);
            if let Some((m, a1, a2)) = lip {
                let d1 = delta_n_of_x(n1, sx.q, &sx.params, x).max(0.0);
                let d2 = delta_n_of_x(n2, sy.q, &sy.params, y).max(0.0);
                let rhs = m * d1.powf(a1 / 2.0) * d2.powf(a2 / 2.0);
                let slack = 10.0 * sx.pol.series_tol;
                let holds = lhs <= rhs + slack;
                all_hold &= holds;
                bound_rows.push(vec![
                    Cell::Int(n1),
                    Cell::Int(n2),
                    Cell::Num(q1),
                    Cell::Num(q2),
                    Cell::Num(x),
                    Cell::Num(y),
                    Cell::Text("lipschitz".into()),
                    Cell::Num(lhs),
                    Cell::Num(rhs),
                    Cell::Num(slack),
                    Cell::Bool(holds),
                ]);
            }
        }
    }

    write_csv(
        &out.join("bivariate_moments.csv"),
        &[cfg.provenance(), format!("function={}", bi.function)],
        &["n1", "n2", "q1", "q2", "x", "y", "moment", "closed_form", "direct_eval", "abs_err"],
        &moment_rows,
    )?;
    write_csv(
        &out.join("bivariate_bounds.csv"),
        &[cfg.provenance(), format!("function={}", bi.function)],
        &["n1", "n2", "q1", "q2", "x", "y", "kind", "lhs", "rhs", "slack", "holds"],
        &bound_rows,
    )?;
    let pass = max_err <= cfg.run.tolerance && all_hold;
    println!(
        "bivariate: {} moment rows (max abs_err {:e}), {} bound rows -> {}",
        moment_rows.len(),
        max_err,
        bound_rows.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}
