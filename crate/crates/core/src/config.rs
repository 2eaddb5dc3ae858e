//! Flat `key=value` files (UTF-8, `#` starts a comment).
//!
//! Run configuration keys: `alpha_levels`, `quad_nodes`, `epsilon`,
//! `fd_step`, `seed`.
//!
//! Problem definition keys:
//!
//! ```text
//! name = my_problem
//! lsf = linear                 # built-in registry key
//! random = u1, 0.0, 1.0        # name, mean, stddev (repeatable)
//! uncertain = d1, -1.0, 1.0    # name, lower, upper (repeatable)
//! t = 10                       # case parameters: t, stress_scale
//! ```

use std::path::Path;

use crate::bench::{lsf_by_key, CaseParams};
use crate::error::{HraError, Result};
use crate::model::{HybridProblem, RandomVariable, UncertainVariable};

fn entries(text: &str) -> impl Iterator<Item = Result<(usize, String, String)>> + '_ {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        Some(match line.split_once('=') {
            Some((k, v)) => Ok((i + 1, k.trim().to_string(), v.trim().to_string())),
            None => Err(HraError::Config { line: i + 1, message: format!("expected key=value, got '{line}'") }),
        })
    })
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| HraError::Config { line, message: format!("{key}: cannot parse '{value}': {e}") })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunConfig {
    pub alpha_levels: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub epsilon: Option<f64>,
    pub fd_step: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for entry in entries(text) {
            let (line, key, value) = entry?;
            match key.as_str() {
                "alpha_levels" => cfg.alpha_levels = Some(parse_value(line, &key, &value)?),
                "quad_nodes" => cfg.quad_nodes = Some(parse_value(line, &key, &value)?),
                "epsilon" => cfg.epsilon = Some(parse_value(line, &key, &value)?),
                "fd_step" => cfg.fd_step = Some(parse_value(line, &key, &value)?),
                "seed" => cfg.seed = Some(parse_value(line, &key, &value)?),
                other => {
                    return Err(HraError::Config {
                        line,
                        message: format!(
                            "unknown key '{other}' (expected alpha_levels, quad_nodes, epsilon, fd_step, seed)"
                        ),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDefinition {
    pub name: String,
    pub lsf: String,
    pub randoms: Vec<RandomVariable>,
    pub uncertains: Vec<UncertainVariable>,
    pub params: CaseParams,
}

impl ProblemDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut lsf = None;
        let mut randoms = Vec::new();
        let mut uncertains = Vec::new();
        let mut params = CaseParams::default();
        for entry in entries(text) {
            let (line, key, value) = entry?;
            match key.as_str() {
                "name" => name = Some(value),
                "lsf" => lsf = Some(value),
                "random" | "uncertain" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(HraError::Config {
                            line,
                            message: format!("{key} needs 'name, a, b', got '{value}'"),
                        });
                    }
                    let a: f64 = parse_value(line, &key, parts[1])?;
                    let b: f64 = parse_value(line, &key, parts[2])?;
                    if key == "random" {
                        randoms.push(RandomVariable::new(parts[0], a, b));
                    } else {
                        uncertains.push(UncertainVariable::new(parts[0], a, b));
                    }
                }
                "t" => params.t = Some(parse_value(line, &key, &value)?),
                "stress_scale" => params.stress_scale = Some(parse_value(line, &key, &value)?),
                other => {
                    return Err(HraError::Config { line, message: format!("unknown key '{other}'") });
                }
            }
        }
        let lsf = lsf.ok_or(HraError::Config { line: 0, message: "missing 'lsf' key".into() })?;
        Ok(Self { name: name.unwrap_or_else(|| lsf.clone()), lsf, randoms, uncertains, params })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<HybridProblem> {
        let (lsf, grad) = lsf_by_key(&self.lsf, self.randoms.len(), self.uncertains.len(), &self.params)?;
        let p = HybridProblem::new(self.name.clone(), self.randoms.clone(), self.uncertains.clone(), lsf)?;
        Ok(match grad {
            Some(g) => p.with_gradient(g),
            None => p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config() {
        let c = RunConfig::parse("# defaults\nalpha_levels = 11\nquad_nodes=48 # trailing\n\nseed=9\nepsilon=1e-8").unwrap();
        assert_eq!(c.alpha_levels, Some(11));
        assert_eq!(c.quad_nodes, Some(48));
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.epsilon, Some(1e-8));
        assert_eq!(c.fd_step, None);
        assert!(matches!(RunConfig::parse("bogus=1"), Err(HraError::Config { line: 1, .. })));
        assert!(matches!(RunConfig::parse("\nquad_nodes=abc"), Err(HraError::Config { line: 2, .. })));
        assert!(matches!(RunConfig::parse("justtext"), Err(HraError::Config { .. })));
    }

    #[test]
    fn problem_definition() {
        let text = "name = lin22\nlsf = linear\nrandom = u1, 0, 1\nrandom = u2, 0, 1\nuncertain = d1, -1, 1\nuncertain = d2, -1, 1\n";
        let def = ProblemDefinition::parse(text).unwrap();
        let p = def.build().unwrap();
        assert_eq!((p.m(), p.n()), (2, 2));
        assert_eq!(p.name(), "lin22");
        assert!(p.has_gradient());
        assert!(ProblemDefinition::parse("random = a, 1").is_err());
        assert!(ProblemDefinition::parse("name = x").is_err());
        let bad = "lsf = crank_slider\nrandom = a, 0, 1\n";
        assert!(ProblemDefinition::parse(bad).unwrap().build().is_err());
    }
}
