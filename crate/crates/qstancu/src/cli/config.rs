//! Experiment configuration: a single TOML file with nested sections.
//!
//! Every command reads the same structure and validates the parts it needs;
//! parse or validation failures map to exit code 2.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::functions::{lookup1, lookup2, Fn1, Fn2, NAMES_1D, NAMES_2D};
use crate::operators::StancuParams;
use crate::qcalc::QParam;
use crate::statconv::{make_admissible_qseq, QSeqKind, QSequence};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub operator: OperatorSection,
    pub domain: DomainSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub lipschitz: Option<LipschitzSection>,
    #[serde(default)]
    pub bivariate: Option<BivariateSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    /// Operator indices used by `moments`, `rates` and `bivariate`.
    #[serde(default)]
    pub n: Vec<u64>,
    /// Fixed q values; mutually exclusive with `qseq`.
    #[serde(default)]
    pub q: Vec<f64>,
    /// Named q-sequence: "plain" or "square-exceptional".
    #[serde(default)]
    pub qseq: Option<String>,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// Upper end of the evaluation interval (the grid starts at 0).
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub function: String,
    pub tolerance: f64,
    pub epsilons: Vec<f64>,
    pub n_max: u64,
    /// "sup" or "weighted" (converge command).
    pub mode: String,
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            function: "e1".into(),
            tolerance: 1e-8,
            epsilons: vec![0.05],
            n_max: 200,
            mode: "sup".into(),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzSection {
    pub m: f64,
    /// Univariate exponent; for bivariate runs `a1`/`a2` take precedence.
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub a1: Option<f64>,
    #[serde(default)]
    pub a2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivariateSection {
    /// Axis index pairs, zipped positionally.
    pub n1: Vec<u64>,
    pub n2: Vec<u64>,
    /// Evaluation points `[x, y]`.
    pub points: Vec<[f64; 2]>,
    pub function: String,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Config =
            toml::from_str(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.params()?;
        for &q in &self.operator.q {
            QParam::new(q).map_err(|e| cfg_err(e.to_string()))?;
        }
        if let Some(kind) = &self.operator.qseq {
            parse_qseq_kind(kind)?;
        }
        if !(self.domain.max > 0.0 && self.domain.step > 0.0 && self.domain.step <= self.domain.max)
        {
            return Err(cfg_err(format!(
                "domain requires 0 < step <= max, got max={}, step={}",
                self.domain.max, self.domain.step
            )));
        }
        if !(self.run.tolerance > 0.0) {
            return Err(cfg_err(format!("tolerance must be > 0, got {}", self.run.tolerance)));
        }
        if self.run.epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(cfg_err("epsilons must all be > 0"));
        }
        match self.run.mode.as_str() {
            "sup" | "weighted" => {}
            m => return Err(cfg_err(format!("mode must be \"sup\" or \"weighted\", got \"{m}\""))),
        }
        if let Some(l) = &self.lipschitz {
            for a in [l.a, l.a1, l.a2].into_iter().flatten() {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(cfg_err(format!("lipschitz exponents must lie in (0, 1], got {a}")));
                }
            }
            if !(l.m > 0.0) {
                return Err(cfg_err(format!("lipschitz.m must be > 0, got {}", l.m)));
            }
        }
        if let Some(b) = &self.bivariate {
            if b.n1.len() != b.n2.len() || b.n1.is_empty() {
                return Err(cfg_err("bivariate.n1 and bivariate.n2 must be nonempty and equal length"));
            }
            if b.n1.iter().chain(&b.n2).any(|&n| n == 0) {
                return Err(cfg_err("bivariate indices must be >= 1"));
            }
            if b.points.is_empty() {
                return Err(cfg_err("bivariate.points must be nonempty"));
            }
            if b.points.iter().any(|p| p[0] < 0.0 || p[1] < 0.0) {
                return Err(cfg_err("bivariate points must have nonnegative coordinates"));
            }
            self.function_2d(&b.function)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<StancuParams> {
        StancuParams::new(self.operator.alpha, self.operator.beta)
            .map_err(|e| cfg_err(e.to_string()))
    }

    pub fn function_1d(&self, name: &str) -> Result<Fn1> {
        lookup1(name).ok_or_else(|| {
            cfg_err(format!("unknown function \"{name}\"; known: {}", NAMES_1D.join(", ")))
        })
    }

    pub fn function_2d(&self, name: &str) -> Result<Fn2> {
        lookup2(name).ok_or_else(|| {
            cfg_err(format!("unknown function \"{name}\"; known: {}", NAMES_2D.join(", ")))
        })
    }

    pub fn qseq(&self) -> Result<QSequence> {
        let kind = self
            .operator
            .qseq
            .as_deref()
            .ok_or_else(|| cfg_err("this command requires operator.qseq"))?;
        Ok(make_admissible_qseq(parse_qseq_kind(kind)?))
    }

    /// q value for index `n`: the configured sequence if present, otherwise
    /// the fixed list zipped against `n` positions is not meaningful, so a
    /// fixed list must have exactly one entry in per-n contexts.
    pub fn q_values(&self) -> Result<Vec<f64>> {
        if self.operator.q.is_empty() {
            return Err(cfg_err("this command requires operator.q"));
        }
        Ok(self.operator.q.clone())
    }

    pub fn n_values(&self) -> Result<&[u64]> {
        if self.operator.n.is_empty() {
            return Err(cfg_err("this command requires operator.n"));
        }
        if self.operator.n.contains(&0) {
            return Err(cfg_err("operator.n entries must be >= 1"));
        }
        Ok(&self.operator.n)
    }

    /// q at index `n`: sequence if configured, else a single fixed q.
    pub fn q_at(&self, n: u64) -> Result<f64> {
        if self.operator.qseq.is_some() {
            Ok(self.qseq()?.q_at(n))
        } else {
            let qs = self.q_values()?;
            if qs.len() != 1 {
                return Err(cfg_err(
                    "per-index runs need operator.qseq or a single operator.q entry",
                ));
            }
            Ok(qs[0])
        }
    }

    /// One-line echo of the numeric settings, embedded in CSV headers.
    pub fn provenance(&self) -> String {
        format!(
            "alpha={} beta={} domain_max={} step={} tolerance={} n_max={} seed={} mode={}",
            self.operator.alpha,
            self.operator.beta,
            self.domain.max,
            self.domain.step,
            self.run.tolerance,
            self.run.n_max,
            self.run.seed,
            self.run.mode
        )
    }
}

fn parse_qseq_kind(name: &str) -> Result<QSeqKind> {
    match name {
        "plain" => Ok(QSeqKind::Plain),
        "square-exceptional" => Ok(QSeqKind::SquareExceptional),
        other => Err(cfg_err(format!(
            "qseq must be \"plain\" or \"square-exceptional\", got \"{other}\""
        ))),
    }
}
