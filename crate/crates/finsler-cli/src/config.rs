//! Space configuration: a JSON file describing the norm, the working basis,
//! tolerance overrides, and sweep parameters.

use std::fmt;
use std::path::Path;

use finsler::{Basis, Method, MonomialTerm, NormModel, Vector};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

/// Configuration error: reported on stderr and mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dimension: usize,
    pub norm: NormConfig,
    /// Basis rows, one vector per row; defaults to the standard basis.
    #[serde(default)]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// "auto" (default), "analytic", "hyperdual", or "finite-difference".
    #[serde(default)]
    pub method: Option<String>,
    /// Reorder pivots by largest |F^2| during orthogonalization.
    #[serde(default)]
    pub pivot_reordering: Option<bool>,
    #[serde(default)]
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    Euclidean,
    PseudoEuclidean {
        signature: Vec<i8>,
    },
    Randers {
        alpha: Vec<Vec<f64>>,
        beta: Vec<f64>,
    },
    MthRoot {
        order: u32,
        terms: Vec<TermConfig>,
    },
    Custom {
        terms: Vec<TermConfig>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Identity-sweep bound on the hyperdual path (default 1e-10).
    pub hyperdual: Option<f64>,
    /// Identity-sweep bound on the finite-difference path (default 1e-6).
    pub finite_difference: Option<f64>,
    /// Orthonormal-pattern bound (default 1e-8).
    pub pattern: Option<f64>,
    /// Largest principal angle accepted as algebra equality (default 1e-6).
    pub angle: Option<f64>,
    /// Constraint-residual bound for generators (default 1e-8).
    pub residual: Option<f64>,
    /// Sampling margin: directions with |F^2| below this are rejected
    /// (default 1e-6).
    pub min_abs_f2: Option<f64>,
}

/// Derivative-method selection: `None` means "choose per command".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Fixed(Method),
}

impl SpaceConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let config: SpaceConfig = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.dimension < 2 {
            return Err(ConfigError(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        if let Some(rows) = &self.basis {
            if rows.len() != self.dimension {
                return Err(ConfigError(format!(
                    "basis must have {} rows, got {}",
                    self.dimension,
                    rows.len()
                )));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != self.dimension {
                    return Err(ConfigError(format!(
                        "basis row {i} must have {} entries, got {}",
                        self.dimension,
                        row.len()
                    )));
                }
            }
        }
        if let Some(m) = &self.method {
            if !matches!(
                m.as_str(),
                "auto" | "analytic" | "hyperdual" | "finite-difference"
            ) {
                return Err(ConfigError(format!(
                    "method must be auto, analytic, hyperdual or finite-difference, got {m:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn method_choice(&self) -> MethodChoice {
        match self.method.as_deref() {
            Some("analytic") => MethodChoice::Fixed(Method::Analytic),
            Some("hyperdual") => MethodChoice::Fixed(Method::Hyperdual),
            Some("finite-difference") => MethodChoice::Fixed(Method::FiniteDifference),
            _ => MethodChoice::Auto,
        }
    }

    /// Builds the norm model; inconsistencies are configuration errors.
    pub fn build_model(&self) -> Result<NormModel, ConfigError> {
        let n = self.dimension;
        let to_terms = |terms: &[TermConfig]| -> Vec<MonomialTerm> {
            terms
                .iter()
                .map(|t| MonomialTerm::new(t.coeff, t.exponents.clone()))
                .collect()
        };
        let model = match &self.norm {
            NormConfig::Euclidean => NormModel::euclidean(n),
            NormConfig::PseudoEuclidean { signature } => {
                if signature.len() != n {
                    return Err(ConfigError(format!(
                        "signature length {} does not match dimension {n}",
                        signature.len()
                    )));
                }
                NormModel::pseudo_euclidean(signature.clone())
            }
            NormConfig::Randers { alpha, beta } => {
                if alpha.len() != n || alpha.iter().any(|r| r.len() != n) {
                    return Err(ConfigError(format!("alpha must be a {n}x{n} matrix")));
                }
                if beta.len() != n {
                    return Err(ConfigError(format!(
                        "beta must have {n} entries, got {}",
                        beta.len()
                    )));
                }
                let a = DMatrix::from_fn(n, n, |i, j| alpha[i][j]);
                NormModel::randers(a, DVector::from_vec(beta.clone()))
            }
            NormConfig::MthRoot { order, terms } => NormModel::mth_root(n, *order, to_terms(terms)),
            NormConfig::Custom { terms } => NormModel::custom_polynomial(n, to_terms(terms)),
        };
        model.map_err(|e| ConfigError(format!("invalid norm: {e}")))
    }

    /// Builds the working basis (standard when none is configured).
    pub fn build_basis(&self) -> Result<Basis, ConfigError> {
        match &self.basis {
            None => Ok(Basis::standard(self.dimension)),
            Some(rows) => {
                let vectors: Vec<Vector> =
                    rows.iter().map(|r| Vector::from_vec(r.clone())).collect();
                Basis::new(vectors).map_err(|e| ConfigError(format!("invalid basis: {e}")))
            }
        }
    }

    pub fn tolerances(&self) -> ToleranceConfig {
        ToleranceConfig {
            hyperdual: self.tolerances.as_ref().and_then(|t| t.hyperdual),
            finite_difference: self.tolerances.as_ref().and_then(|t| t.finite_difference),
            pattern: self.tolerances.as_ref().and_then(|t| t.pattern),
            angle: self.tolerances.as_ref().and_then(|t| t.angle),
            residual: self.tolerances.as_ref().and_then(|t| t.residual),
            min_abs_f2: self.tolerances.as_ref().and_then(|t| t.min_abs_f2),
        }
    }
}
