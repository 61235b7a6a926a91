//! Minkowski norms: built-in families and a user-supplied escape hatch.
//!
//! A norm is represented through its square `F^2`, which is smooth wherever
//! the indefinite `F` itself is not, and is the quantity the metric tensor
//! differentiates. `F` is recovered as `sign(F^2) * sqrt(|F^2|)` only where a
//! scalar length is needed.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::FinslerError;
use crate::hyperdual::Dual3;

/// Coordinate vector of the modeled space.
pub type Vector = DVector<f64>;

/// One monomial `coeff * prod_i v_i^exponents[i]` of a polynomial in the
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl MonomialTerm {
    pub fn new(coeff: f64, exponents: Vec<u32>) -> Self {
        MonomialTerm { coeff, exponents }
    }

    fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn eval(&self, v: &Vector) -> f64 {
        let mut out = self.coeff;
        for (x, &e) in v.iter().zip(&self.exponents) {
            out *= x.powi(e as i32);
        }
        out
    }

    fn eval_dual(&self, v: &[Dual3]) -> Dual3 {
        let mut out = Dual3::constant(self.coeff);
        for (x, &e) in v.iter().zip(&self.exponents) {
            out = out * x.powi(e);
        }
        out
    }
}

/// Squared-norm callback for custom models, written in third-order dual
/// arithmetic so every derivative path works on it. Plain evaluation seeds no
/// generators, in which case the arithmetic reduces to ordinary `f64` math.
pub type CustomF2 = Arc<dyn Fn(&[Dual3]) -> Dual3 + Send + Sync>;

/// The family a norm belongs to, with its parameters.
#[derive(Clone)]
pub enum NormKind {
    /// `F^2 = sum v_i^2`.
    Euclidean,
    /// `F^2 = sum s_i v_i^2` with `s_i = +-1`.
    PseudoEuclidean { signature: Vec<i8> },
    /// `F = sqrt(v' A v) + b . v` with `A` symmetric positive definite and
    /// `|b|_A < 1`.
    Randers {
        alpha: DMatrix<f64>,
        beta: DVector<f64>,
    },
    /// `F^2 = A(v)^(2/m)` where `A` is a degree-`m` homogeneous polynomial
    /// (the coefficient tensor in sparse monomial form). Directions with
    /// `A(v) <= 0` are not admissible.
    MthRoot {
        order: u32,
        terms: Vec<MonomialTerm>,
    },
    /// Arbitrary user-supplied `F^2`; the callback must be pure and
    /// deterministic. Homogeneity is not enforced (it can be measured with
    /// [`NormModel::homogeneity_residual`]).
    Custom { f2: CustomF2 },
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Euclidean => write!(f, "Euclidean"),
            NormKind::PseudoEuclidean { signature } => {
                write!(f, "PseudoEuclidean {{ signature: {signature:?} }}")
            }
            NormKind::Randers { alpha, beta } => {
                write!(f, "Randers {{ alpha: {alpha:?}, beta: {beta:?} }}")
            }
            NormKind::MthRoot { order, terms } => {
                write!(f, "MthRoot {{ order: {order}, terms: {terms:?} }}")
            }
            NormKind::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

/// A Minkowski norm on an `n`-dimensional space, immutable after
/// construction; all evaluation methods are pure.
#[derive(Clone, Debug)]
pub struct NormModel {
    kind: NormKind,
    dimension: usize,
}

/// A validated nonzero direction at which the norm's derivatives can be
/// taken. Constructed through [`NormModel::admissible`].
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleDirection(Vector);

impl AdmissibleDirection {
    pub fn vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

fn check_finite(v: &Vector) -> Result<(), FinslerError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FinslerError::NonAdmissibleDirection(
            "vector has non-finite entries".into(),
        ));
    }
    Ok(())
}

impl NormModel {
    /// Standard Euclidean norm on `n >= 2` dimensions.
    pub fn euclidean(n: usize) -> Result<Self, FinslerError> {
        if n < 2 {
            return Err(FinslerError::InvalidModel(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        Ok(NormModel {
            kind: NormKind::Euclidean,
            dimension: n,
        })
    }

    /// Diagonal quadratic form with entries `+-1`.
    pub fn pseudo_euclidean(signature: Vec<i8>) -> Result<Self, FinslerError> {
        let n = signature.len();
        if n < 2 {
            return Err(FinslerError::InvalidModel(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        if signature.iter().any(|&s| s != 1 && s != -1) {
            return Err(FinslerError::InvalidModel(
                "signature entries must be +1 or -1".into(),
            ));
        }
        Ok(NormModel {
            kind: NormKind::PseudoEuclidean { signature },
            dimension: n,
        })
    }

    /// Randers norm `F = sqrt(v' A v) + b . v`. Rejects a non-symmetric or
    /// non-positive-definite `alpha` and any `beta` with alpha-norm >= 1
    /// (`b' A^-1 b >= 1`), the condition for `F` to stay positive away
    /// from the origin.
    pub fn randers(alpha: DMatrix<f64>, beta: DVector<f64>) -> Result<Self, FinslerError> {
        let n = alpha.nrows();
        if n < 2 {
            return Err(FinslerError::InvalidModel(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        if alpha.ncols() != n {
            return Err(FinslerError::InvalidModel(format!(
                "alpha must be square, got {}x{}",
                alpha.nrows(),
                alpha.ncols()
            )));
        }
        if beta.len() != n {
            return Err(FinslerError::DimensionMismatch {
                expected: n,
                got: beta.len(),
            });
        }
        if alpha.iter().any(|x| !x.is_finite()) || beta.iter().any(|x| !x.is_finite()) {
            return Err(FinslerError::InvalidModel(
                "alpha/beta entries must be finite".into(),
            ));
        }
        let max_entry = alpha.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let asym = (&alpha - alpha.transpose())
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if asym > 1e-12 * max_entry.max(1.0) {
            return Err(FinslerError::InvalidModel(format!(
                "alpha is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let alpha = (&alpha + alpha.transpose()) * 0.5;
        let chol = alpha
            .clone()
            .cholesky()
            .ok_or_else(|| FinslerError::InvalidModel("alpha is not positive definite".into()))?;
        let alpha_norm_sq = beta.dot(&chol.solve(&beta));
        if alpha_norm_sq >= 1.0 {
            return Err(FinslerError::InvalidModel(format!(
                "beta has alpha-norm {:.6} >= 1; the norm would vanish on nonzero vectors",
                alpha_norm_sq.sqrt()
            )));
        }
        Ok(NormModel {
            kind: NormKind::Randers { alpha, beta },
            dimension: n,
        })
    }

    /// m-th root norm `F^2 = A(v)^(2/m)` for a degree-`m` homogeneous
    /// polynomial `A` given as monomial terms; `m >= 3`.
    pub fn mth_root(n: usize, order: u32, terms: Vec<MonomialTerm>) -> Result<Self, FinslerError> {
        if n < 2 {
            return Err(FinslerError::InvalidModel(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        if order < 3 {
            return Err(FinslerError::InvalidModel(format!(
                "m-th root order must be >= 3, got {order}"
            )));
        }
        if terms.is_empty() {
            return Err(FinslerError::InvalidModel(
                "coefficient tensor has no terms".into(),
            ));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.exponents.len() != n {
                return Err(FinslerError::DimensionMismatch {
                    expected: n,
                    got: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(FinslerError::InvalidModel(format!(
                    "term {i} has a non-finite coefficient"
                )));
            }
            if t.degree() != order {
                return Err(FinslerError::InvalidModel(format!(
                    "term {i} has degree {} but the order is {order}",
                    t.degree()
                )));
            }
        }
        Ok(NormModel {
            kind: NormKind::MthRoot { order, terms },
            dimension: n,
        })
    }

    /// Custom squared norm from a dual-arithmetic callback.
    pub fn custom(n: usize, f2: CustomF2) -> Result<Self, FinslerError> {
        if n < 2 {
            return Err(FinslerError::InvalidModel(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        Ok(NormModel {
            kind: NormKind::Custom { f2 },
            dimension: n,
        })
    }

    /// Custom squared norm given directly as a polynomial in the coordinates
    /// (need not be homogeneous; useful as a negative control).
    pub fn custom_polynomial(n: usize, terms: Vec<MonomialTerm>) -> Result<Self, FinslerError> {
        for (i, t) in terms.iter().enumerate() {
            if t.exponents.len() != n {
                return Err(FinslerError::DimensionMismatch {
                    expected: n,
                    got: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(FinslerError::InvalidModel(format!(
                    "term {i} has a non-finite coefficient"
                )));
            }
        }
        let f2: CustomF2 = Arc::new(move |v: &[Dual3]| {
            let mut acc = Dual3::ZERO;
            for t in &terms {
                acc += t.eval_dual(v);
            }
            acc
        });
        Self::custom(n, f2)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// True when `F^2 > 0` for every admissible nonzero direction.
    pub fn is_positive(&self) -> bool {
        match &self.kind {
            NormKind::Euclidean | NormKind::Randers { .. } => true,
            NormKind::PseudoEuclidean { signature } => signature.iter().all(|&s| s == 1),
            // Admissibility already demands A(v) > 0, so F^2 = A^(2/m) > 0.
            NormKind::MthRoot { .. } => true,
            NormKind::Custom { .. } => false,
        }
    }

    /// Short deterministic label for reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => format!("euclidean(n={})", self.dimension),
            NormKind::PseudoEuclidean { signature } => {
                let signs: Vec<String> = signature.iter().map(|s| s.to_string()).collect();
                format!("pseudo_euclidean(signature=[{}])", signs.join(","))
            }
            NormKind::Randers { .. } => format!("randers(n={})", self.dimension),
            NormKind::MthRoot { order, terms } => {
                format!(
                    "mth_root(order={order}, terms={}, n={})",
                    terms.len(),
                    self.dimension
                )
            }
            NormKind::Custom { .. } => format!("custom(n={})", self.dimension),
        }
    }

    fn check_vector(&self, v: &Vector) -> Result<(), FinslerError> {
        if v.len() != self.dimension {
            return Err(FinslerError::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
            });
        }
        check_finite(v)
    }

    /// Validates `v` as a direction: nonzero, finite, inside the norm's
    /// admissible set (for m-th root norms, `A(v) > 0`).
    pub fn admissible(&self, v: &Vector) -> Result<AdmissibleDirection, FinslerError> {
        self.check_vector(v)?;
        if v.iter().all(|&x| x == 0.0) {
            return Err(FinslerError::NonAdmissibleDirection("zero vector".into()));
        }
        if let NormKind::MthRoot { terms, .. } = &self.kind {
            let a: f64 = terms.iter().map(|t| t.eval(v)).sum();
            if a <= 0.0 {
                return Err(FinslerError::NonAdmissibleDirection(format!(
                    "m-th root contraction A(v) = {a:.6e} <= 0"
                )));
            }
        }
        Ok(AdmissibleDirection(v.clone()))
    }

    /// Squared norm `F^2(v)`; may be negative for indefinite kinds.
    ///
    /// `v = 0` is allowed for the quadratic-based kinds where `F^2(0) = 0` is
    /// well defined, and rejected for m-th root and custom kinds.
    pub fn evaluate_f2(&self, v: &Vector) -> Result<f64, FinslerError> {
        self.check_vector(v)?;
        match &self.kind {
            NormKind::Euclidean => Ok(v.norm_squared()),
            NormKind::PseudoEuclidean { signature } => Ok(v
                .iter()
                .zip(signature)
                .map(|(x, &s)| f64::from(s) * x * x)
                .sum()),
            NormKind::Randers { alpha, beta } => {
                let a2 = v.dot(&(alpha * v));
                let f = a2.max(0.0).sqrt() + beta.dot(v);
                Ok(f * f)
            }
            NormKind::MthRoot { order, terms } => {
                if v.iter().all(|&x| x == 0.0) {
                    return Err(FinslerError::NonAdmissibleDirection("zero vector".into()));
                }
                let a: f64 = terms.iter().map(|t| t.eval(v)).sum();
                if a <= 0.0 {
                    return Err(FinslerError::NonAdmissibleDirection(format!(
                        "m-th root contraction A(v) = {a:.6e} <= 0"
                    )));
                }
                Ok(a.powf(2.0 / f64::from(*order)))
            }
            NormKind::Custom { f2 } => {
                if v.iter().all(|&x| x == 0.0) {
                    return Err(FinslerError::NonAdmissibleDirection("zero vector".into()));
                }
                let duals: Vec<Dual3> = v.iter().map(|&x| Dual3::constant(x)).collect();
                Ok(f2(&duals).re())
            }
        }
    }

    /// Scalar length `F(v) = sign(F^2) * sqrt(|F^2|)`.
    pub fn evaluate_f(&self, v: &Vector) -> Result<f64, FinslerError> {
        let f2 = self.evaluate_f2(v)?;
        Ok(f2.signum() * f2.abs().sqrt())
    }

    /// `|F^2(lambda v) - lambda^2 F^2(v)| / max(1, |F^2(v)|)`; zero (up to
    /// roundoff) exactly when the squared norm is positively 2-homogeneous.
    ///
    /// Panics if `lambda <= 0`: homogeneity is only claimed for positive
    /// scalings.
    pub fn homogeneity_residual(&self, v: &Vector, lambda: f64) -> Result<f64, FinslerError> {
        assert!(
            lambda > 0.0 && lambda.is_finite(),
            "lambda must be positive and finite, got {lambda}"
        );
        let f2 = self.evaluate_f2(v)?;
        let scaled = self.evaluate_f2(&(v * lambda))?;
        Ok((scaled - lambda * lambda * f2).abs() / f2.abs().max(1.0))
    }

    /// Squared norm in dual arithmetic; the engine behind the hyperdual
    /// derivative path. Seeding no generators reduces it to `evaluate_f2`.
    pub fn evaluate_f2_dual(&self, v: &[Dual3]) -> Result<Dual3, FinslerError> {
        if v.len() != self.dimension {
            return Err(FinslerError::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
            });
        }
        match &self.kind {
            NormKind::Euclidean => {
                let mut acc = Dual3::ZERO;
                for x in v {
                    acc += *x * *x;
                }
                Ok(acc)
            }
            NormKind::PseudoEuclidean { signature } => {
                let mut acc = Dual3::ZERO;
                for (x, &s) in v.iter().zip(signature) {
                    acc += *x * *x * f64::from(s);
                }
                Ok(acc)
            }
            NormKind::Randers { alpha, beta } => {
                let n = self.dimension;
                let mut a2 = Dual3::ZERO;
                for i in 0..n {
                    for j in 0..n {
                        a2 += v[i] * v[j] * alpha[(i, j)];
                    }
                }
                if a2.re() <= 0.0 {
                    return Err(FinslerError::NonAdmissibleDirection("zero vector".into()));
                }
                let mut f = a2.sqrt();
                for (x, b) in v.iter().zip(beta.iter()) {
                    f += *x * *b;
                }
                Ok(f * f)
            }
            NormKind::MthRoot { order, terms } => {
                let mut a = Dual3::ZERO;
                for t in terms {
                    a += t.eval_dual(v);
                }
                if a.re() <= 0.0 {
                    return Err(FinslerError::NonAdmissibleDirection(format!(
                        "m-th root contraction A(v) = {:.6e} <= 0",
                        a.re()
                    )));
                }
                Ok(a.powf(2.0 / f64::from(*order)))
            }
            NormKind::Custom { f2 } => {
                if v.iter().all(|x| x.re() == 0.0) {
                    return Err(FinslerError::NonAdmissibleDirection("zero vector".into()));
                }
                Ok(f2(v))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(a: f64, b: f64) -> Vector {
        Vector::from_vec(vec![a, b])
    }

    #[test]
    fn euclidean_is_pythagorean() {
        let m = NormModel::euclidean(2).unwrap();
        assert_eq!(m.evaluate_f2(&vec2(3.0, 4.0)).unwrap(), 25.0);
        assert_eq!(m.evaluate_f(&vec2(3.0, 4.0)).unwrap(), 5.0);
    }

    #[test]
    fn pseudo_euclidean_diagonal_form() {
        let m = NormModel::pseudo_euclidean(vec![-1, 1, 1, 1]).unwrap();
        let v = Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(m.evaluate_f2(&v).unwrap(), -1.0);
        assert_eq!(m.evaluate_f(&v).unwrap(), -1.0);
        // Exact agreement with the quadratic form v' D v.
        let v = Vector::from_vec(vec![0.3, -2.0, 0.25, 1.5]);
        let expected = -0.09 + 4.0 + 0.0625 + 2.25;
        assert_eq!(m.evaluate_f2(&v).unwrap(), expected);
    }

    #[test]
    fn randers_oracle_value() {
        // alpha = I, beta = (0.5, 0), v = (1, 0): F = 1 + 0.5, F^2 = 2.25.
        let m =
            NormModel::randers(DMatrix::identity(2, 2), DVector::from_vec(vec![0.5, 0.0])).unwrap();
        let f2 = m.evaluate_f2(&vec2(1.0, 0.0)).unwrap();
        assert!((f2 - 2.25).abs() < 1e-15);
    }

    #[test]
    fn randers_rejects_large_beta() {
        let err = NormModel::randers(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, FinslerError::InvalidModel(_)));
        // Non-identity alpha: validity is measured in the A^-1 inner product.
        let alpha = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        assert!(NormModel::randers(alpha.clone(), DVector::from_vec(vec![1.5, 0.0])).is_ok());
        assert!(NormModel::randers(alpha, DVector::from_vec(vec![2.5, 0.0])).is_err());
    }

    #[test]
    fn randers_rejects_asymmetric_or_indefinite_alpha() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(NormModel::randers(asym, DVector::zeros(2)).is_err());
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(NormModel::randers(indef, DVector::zeros(2)).is_err());
    }

    #[test]
    fn homogeneity_exact_for_euclidean() {
        let m = NormModel::euclidean(2).unwrap();
        assert_eq!(m.homogeneity_residual(&vec2(1.0, 2.0), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity_randers_within_tolerance() {
        let m =
            NormModel::randers(DMatrix::identity(2, 2), DVector::from_vec(vec![0.5, 0.0])).unwrap();
        let r = m.homogeneity_residual(&vec2(1.0, 0.0), 2.0).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn non_homogeneous_custom_control() {
        // F^2 = v1^4: F^2(2 e1) = 16 vs 4 * F^2(e1) = 4, residual 12 / max(1, 1).
        let m = NormModel::custom_polynomial(2, vec![MonomialTerm::new(1.0, vec![4, 0])]).unwrap();
        let r = m.homogeneity_residual(&vec2(1.0, 0.0), 2.0).unwrap();
        assert!((r - 12.0).abs() < 1e-12, "residual {r}");
    }

    #[test]
    fn mth_root_requires_positive_contraction() {
        // A(v) = v1^3 + v2^3, m = 3.
        let m = NormModel::mth_root(
            2,
            3,
            vec![
                MonomialTerm::new(1.0, vec![3, 0]),
                MonomialTerm::new(1.0, vec![0, 3]),
            ],
        )
        .unwrap();
        assert!(m.evaluate_f2(&vec2(1.0, 1.0)).is_ok());
        assert!(matches!(
            m.evaluate_f2(&vec2(-1.0, -1.0)),
            Err(FinslerError::NonAdmissibleDirection(_))
        ));
        assert!(m.admissible(&vec2(-1.0, -1.0)).is_err());
        // Homogeneity of the 2/m power: F^2(lambda v) = lambda^2 F^2(v).
        let r = m.homogeneity_residual(&vec2(1.0, 2.0), 1.7).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn mth_root_rejects_wrong_degree() {
        let err = NormModel::mth_root(2, 4, vec![MonomialTerm::new(1.0, vec![3, 0])]).unwrap_err();
        assert!(matches!(err, FinslerError::InvalidModel(_)));
    }

    #[test]
    fn admissible_rejects_zero_and_mismatch() {
        let m = NormModel::euclidean(2).unwrap();
        assert!(matches!(
            m.admissible(&vec2(0.0, 0.0)),
            Err(FinslerError::NonAdmissibleDirection(_))
        ));
        assert!(matches!(
            m.admissible(&Vector::from_vec(vec![1.0, 0.0, 0.0])),
            Err(FinslerError::DimensionMismatch { .. })
        ));
        assert!(m.admissible(&vec2(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn dual_evaluation_matches_plain_evaluation() {
        let models = [
            NormModel::euclidean(3).unwrap(),
            NormModel::pseudo_euclidean(vec![-1, 1, 1]).unwrap(),
            NormModel::randers(
                DMatrix::identity(3, 3),
                DVector::from_vec(vec![0.3, 0.2, 0.1]),
            )
            .unwrap(),
        ];
        let v = Vector::from_vec(vec![0.7, -1.1, 0.4]);
        for m in &models {
            let duals: Vec<Dual3> = v.iter().map(|&x| Dual3::constant(x)).collect();
            let via_dual = m.evaluate_f2_dual(&duals).unwrap().re();
            let plain = m.evaluate_f2(&v).unwrap();
            assert!(
                (via_dual - plain).abs() <= 1e-14 * plain.abs().max(1.0),
                "{}",
                m.describe()
            );
        }
    }
}
