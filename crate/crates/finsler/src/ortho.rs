//! Noncommutative orthogonality, constructive orthogonalization, and the
//! triangular metric profile.
//!
//! Orthogonality here is direction-dependent: `v1` is orthogonal to `v2` when
//! `g(v1)(v1, v2) = 0`, the metric being evaluated at `v1`. The relation is
//! not symmetric, so a basis is an *ordered* list and an orthogonal set means
//! `g(e_i)(e_i, e_j) = 0` for `i < j` (the earlier vector supplies the
//! direction). Under that convention the contracted profile
//! `G_kl = g(e_k)(e_k, e_l)` of an orthonormal basis is lower triangular with
//! unit-modulus diagonal; entries below the diagonal are unconstrained.

use nalgebra::DMatrix;

use crate::diff::{metric_at_opts, preferred_method, DiffOptions, Method};
use crate::error::FinslerError;
use crate::norm::{AdmissibleDirection, NormModel, Vector};

/// Relative threshold below which a pivot's `|F^2|` counts as isotropic.
const PIVOT_TOL: f64 = 1e-10;

/// Ordered list of `n` linearly independent vectors in `n` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    vectors: Vec<Vector>,
}

impl Basis {
    /// Validates vector count, shared dimension, finite entries, and linear
    /// independence (`|det| > 1e-10 *` product of column norms).
    pub fn new(vectors: Vec<Vector>) -> Result<Self, FinslerError> {
        let n = vectors.len();
        if n < 2 {
            return Err(FinslerError::SingularInput(format!(
                "a basis needs at least 2 vectors, got {n}"
            )));
        }
        for v in &vectors {
            if v.len() != n {
                return Err(FinslerError::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(FinslerError::SingularInput(
                    "basis vector has non-finite entries".into(),
                ));
            }
        }
        let basis = Basis { vectors };
        let det = basis.matrix().determinant();
        let scale: f64 = basis.vectors.iter().map(|v| v.norm()).product();
        if det.abs() <= 1e-10 * scale {
            return Err(FinslerError::SingularInput(format!(
                "vectors are linearly dependent (|det| = {:.3e}, scale {:.3e})",
                det.abs(),
                scale
            )));
        }
        Ok(basis)
    }

    pub fn standard(n: usize) -> Self {
        let vectors = (0..n)
            .map(|k| Vector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }))
            .collect();
        Basis { vectors }
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Column matrix `[e_1 .. e_n]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dimension();
        DMatrix::from_fn(n, n, |i, k| self.vectors[k][i])
    }
}

/// Pivot handling during orthogonalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotStrategy {
    /// Keep the input order; raise `IsotropicPivot` on a null pivot. Order is
    /// part of the answer under noncommutative orthogonality, so this is the
    /// default.
    InputOrder,
    /// At each step, orthogonalize every remaining input vector against the
    /// accepted prefix and take the candidate with the largest `|F^2|` (ties
    /// break to the earlier input). The applied permutation is reported.
    ReorderByPivot,
}

/// Result of [`orthogonalize_with`]: the orthogonal basis plus the input
/// permutation actually used (identity under [`PivotStrategy::InputOrder`]).
#[derive(Clone, Debug)]
pub struct OrthogonalizeOutcome {
    pub basis: Basis,
    pub permutation: Vec<usize>,
}

/// Result of [`normalize`]: unit-`|F^2|` vectors plus the sign of each
/// `F^2(e_k)` (the signature record).
#[derive(Clone, Debug)]
pub struct NormalizeOutcome {
    pub basis: Basis,
    pub signature: Vec<i8>,
}

/// The per-direction metric stack `P[k] = g(e_k)` and its contraction
/// `G_kl = g(e_k)(e_k, e_l)`.
#[derive(Clone, Debug)]
pub struct MetricProfile {
    pub p: Vec<DMatrix<f64>>,
    pub g: DMatrix<f64>,
}

/// Deviation of a profile from the orthonormal pattern.
#[derive(Clone, Debug)]
pub struct PatternCheck {
    /// `max_{k<l} |G_kl|`; zero for an orthogonal basis.
    pub max_above_diagonal: f64,
    /// `max_k ||G_kk| - 1|`; zero for unit-length vectors in the `|F^2| = 1`
    /// convention.
    pub max_unit_diagonal_deviation: f64,
    /// `max_k |G_kk - 1|`; the literal theorem statement, meaningful for
    /// positive norms.
    pub max_positive_diagonal_deviation: f64,
    /// Signs of the diagonal entries.
    pub diagonal_signs: Vec<i8>,
    /// True when any diagonal entry is negative (the unit-modulus convention
    /// extension is in play).
    pub indefinite: bool,
}

impl PatternCheck {
    /// Whether the profile matches the orthonormal pattern within `tol`,
    /// using the literal unit diagonal for positive norms and `|G_kk| = 1`
    /// otherwise.
    pub fn orthonormal_within(&self, tol: f64, positive_norm: bool) -> bool {
        let diag = if positive_norm {
            self.max_positive_diagonal_deviation
        } else {
            self.max_unit_diagonal_deviation
        };
        self.max_above_diagonal <= tol && diag <= tol
    }
}

impl MetricProfile {
    pub fn pattern_check(&self) -> PatternCheck {
        let n = self.g.nrows();
        let mut above = 0.0f64;
        let mut unit = 0.0f64;
        let mut positive = 0.0f64;
        let mut signs = Vec::with_capacity(n);
        for k in 0..n {
            for l in (k + 1)..n {
                above = above.max(self.g[(k, l)].abs());
            }
            let d = self.g[(k, k)];
            unit = unit.max((d.abs() - 1.0).abs());
            positive = positive.max((d - 1.0).abs());
            signs.push(if d < 0.0 { -1 } else { 1 });
        }
        let indefinite = signs.iter().any(|&s| s < 0);
        PatternCheck {
            max_above_diagonal: above,
            max_unit_diagonal_deviation: unit,
            max_positive_diagonal_deviation: positive,
            diagonal_signs: signs,
            indefinite,
        }
    }
}

/// `g(v1)(v1, v2) = 0` within `tol * (1 + |v1||v2|)`. Noncommutative: swap
/// the arguments and the metric moves to the other direction.
pub fn is_orthogonal(
    model: &NormModel,
    v1: &AdmissibleDirection,
    v2: &Vector,
    tol: f64,
) -> Result<bool, FinslerError> {
    if v2.len() != model.dimension() {
        return Err(FinslerError::DimensionMismatch {
            expected: model.dimension(),
            got: v2.len(),
        });
    }
    if v2.iter().any(|x| !x.is_finite()) {
        return Err(FinslerError::NonAdmissibleDirection(
            "vector has non-finite entries".into(),
        ));
    }
    let g = metric_at_opts(model, v1, preferred_method(model), &DiffOptions::default())?.g;
    let val = v1.vector().dot(&(&g * v2));
    Ok(val.abs() <= tol * (1.0 + v1.vector().norm() * v2.norm()))
}

struct OrthoState {
    accepted: Vec<Vector>,
    profiles: Vec<DMatrix<f64>>,
    /// `G_kk = g(e_k)(e_k, e_k)`, the forward-substitution pivots.
    pivots: Vec<f64>,
}

impl OrthoState {
    /// Orthogonalizes `raw` against the accepted prefix: solves
    /// `g(e_k)(e_k, raw + sum_s a_s e_s) = 0` for `k = 0..len`. The system is
    /// lower triangular because the accepted set is already orthogonal, so a
    /// forward substitution suffices.
    fn candidate(&self, raw: &Vector) -> Vector {
        let m = self.accepted.len();
        let mut coeffs = vec![0.0; m];
        for k in 0..m {
            let pk = &self.profiles[k];
            let ek = &self.accepted[k];
            let mut rhs = -ek.dot(&(pk * raw));
            for (cs, es) in coeffs.iter().zip(&self.accepted).take(k) {
                rhs -= cs * ek.dot(&(pk * es));
            }
            coeffs[k] = rhs / self.pivots[k];
        }
        let mut out = raw.clone();
        for (c, e) in coeffs.iter().zip(&self.accepted) {
            out += e * *c;
        }
        out
    }
}

/// Orthogonalization in input order; see [`orthogonalize_with`].
pub fn orthogonalize(model: &NormModel, input: &Basis) -> Result<Basis, FinslerError> {
    Ok(orthogonalize_with(model, input, PivotStrategy::InputOrder)?.basis)
}

/// Constructs an orthogonal basis: `e_1 = e'_1` and each later vector is the
/// input vector plus a combination of the accepted ones, chosen so it is
/// orthogonal to every earlier direction. Spans of the leading segments are
/// preserved. Pivots with `|F^2(e_k)| <= 1e-10 |e_k|^2` raise
/// [`FinslerError::IsotropicPivot`].
pub fn orthogonalize_with(
    model: &NormModel,
    input: &Basis,
    strategy: PivotStrategy,
) -> Result<OrthogonalizeOutcome, FinslerError> {
    if input.dimension() != model.dimension() {
        return Err(FinslerError::DimensionMismatch {
            expected: model.dimension(),
            got: input.dimension(),
        });
    }
    let n = input.dimension();
    let method = preferred_method(model);
    let opts = DiffOptions::default();
    let mut state = OrthoState {
        accepted: Vec::new(),
        profiles: Vec::new(),
        pivots: Vec::new(),
    };
    let mut remaining: Vec<(usize, Vector)> = input.vectors().iter().cloned().enumerate().collect();
    let mut permutation = Vec::with_capacity(n);

    for step in 0..n {
        let pick = match strategy {
            PivotStrategy::InputOrder => 0,
            PivotStrategy::ReorderByPivot => {
                let mut best: Option<(usize, f64)> = None;
                for (idx, (_, raw)) in remaining.iter().enumerate() {
                    let cand = state.candidate(raw);
                    let Ok(f2) = model.evaluate_f2(&cand) else {
                        continue;
                    };
                    if best.is_none_or(|(_, b)| f2.abs() > b) {
                        best = Some((idx, f2.abs()));
                    }
                }
                best.map(|(idx, _)| idx).unwrap_or(0)
            }
        };
        let (orig_idx, raw) = remaining.remove(pick);
        let cand = state.candidate(&raw);
        let threshold = PIVOT_TOL * cand.norm_squared();
        let f2 = model.evaluate_f2(&cand)?;
        if f2.abs() <= threshold {
            return Err(FinslerError::IsotropicPivot {
                index: step,
                f2_abs: f2.abs(),
                threshold,
            });
        }
        let dir = model.admissible(&cand)?;
        let p = metric_at_opts(model, &dir, method, &opts)?.g;
        state.pivots.push(cand.dot(&(&p * &cand)));
        state.profiles.push(p);
        state.accepted.push(cand);
        permutation.push(orig_idx);
    }

    Ok(OrthogonalizeOutcome {
        basis: Basis::new(state.accepted)?,
        permutation,
    })
}

/// Rescales each vector to `|F^2(e_k)| = 1`, preserving and reporting the
/// sign of `F^2` per vector.
pub fn normalize(model: &NormModel, basis: &Basis) -> Result<NormalizeOutcome, FinslerError> {
    let mut out = Vec::with_capacity(basis.dimension());
    let mut signature = Vec::with_capacity(basis.dimension());
    for (k, e) in basis.vectors().iter().enumerate() {
        let f2 = model.evaluate_f2(e)?;
        let threshold = PIVOT_TOL * e.norm_squared();
        if f2.abs() <= threshold {
            return Err(FinslerError::IsotropicPivot {
                index: k,
                f2_abs: f2.abs(),
                threshold,
            });
        }
        out.push(e / f2.abs().sqrt());
        signature.push(if f2 < 0.0 { -1 } else { 1 });
    }
    Ok(NormalizeOutcome {
        basis: Basis::new(out)?,
        signature,
    })
}

/// Metric profile along the most precise path.
pub fn metric_profile(model: &NormModel, basis: &Basis) -> Result<MetricProfile, FinslerError> {
    metric_profile_opts(
        model,
        basis,
        preferred_method(model),
        &DiffOptions::default(),
    )
}

pub fn metric_profile_opts(
    model: &NormModel,
    basis: &Basis,
    method: Method,
    opts: &DiffOptions,
) -> Result<MetricProfile, FinslerError> {
    if basis.dimension() != model.dimension() {
        return Err(FinslerError::DimensionMismatch {
            expected: model.dimension(),
            got: basis.dimension(),
        });
    }
    let n = basis.dimension();
    let mut p = Vec::with_capacity(n);
    for e in basis.vectors() {
        let dir = model.admissible(e)?;
        p.push(metric_at_opts(model, &dir, method, opts)?.g);
    }
    let g = DMatrix::from_fn(n, n, |k, l| {
        basis.vectors()[k].dot(&(&p[k] * &basis.vectors()[l]))
    });
    Ok(MetricProfile { p, g })
}

/// Verifies the orthogonal-set precondition (`g(e_i)(e_i, e_j) = 0` for
/// `i < j`), then re-derives linear independence the constructive way: the
/// triangular system `T_ij = g(e_i)(e_i, e_j)` has determinant
/// `prod F^2(e_i)`, so independence holds exactly when no pivot is isotropic.
/// The column-matrix rank is checked independently as well.
pub fn check_linear_independence(
    model: &NormModel,
    vectors: &[Vector],
) -> Result<bool, FinslerError> {
    const ORTHO_TOL: f64 = 1e-8;
    if vectors.len() < 2 || vectors.len() > model.dimension() {
        return Err(FinslerError::NotOrthogonalSet(format!(
            "expected between 2 and {} vectors, got {}",
            model.dimension(),
            vectors.len()
        )));
    }
    for (i, vi) in vectors.iter().enumerate() {
        let dir = model.admissible(vi).map_err(|e| {
            FinslerError::NotOrthogonalSet(format!("vector {i} is not admissible: {e}"))
        })?;
        for (j, vj) in vectors.iter().enumerate().skip(i + 1) {
            if !is_orthogonal(model, &dir, vj, ORTHO_TOL)? {
                return Err(FinslerError::NotOrthogonalSet(format!(
                    "g(e_{i})(e_{i}, e_{j}) does not vanish"
                )));
            }
        }
    }
    // Triangular-system pivots: all F^2(e_i) bounded away from zero.
    for v in vectors {
        let f2 = model.evaluate_f2(v)?;
        if f2.abs() <= PIVOT_TOL * v.norm_squared() {
            return Ok(false);
        }
    }
    // Independent confirmation through the column matrix.
    let n = model.dimension();
    let m = DMatrix::from_fn(n, vectors.len(), |i, k| vectors[k][i]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    Ok(smax > 0.0 && smin > 1e-10 * smax)
}

/// Largest relative projection residual between the leading `m`-vector spans
/// of two bases, maximized over `m`; zero when every leading segment spans
/// the same subspace.
pub fn span_preservation_residual(a: &Basis, b: &Basis) -> f64 {
    let n = a.dimension().min(b.dimension());
    let mut worst = 0.0f64;
    for m in 1..=n {
        let qa = leading_q(a, m);
        let qb = leading_q(b, m);
        for k in 0..m {
            let x = &b.vectors()[k];
            worst = worst.max((x - &qa * (qa.transpose() * x)).norm() / x.norm());
            let y = &a.vectors()[k];
            worst = worst.max((y - &qb * (qb.transpose() * y)).norm() / y.norm());
        }
    }
    worst
}

fn leading_q(basis: &Basis, m: usize) -> DMatrix<f64> {
    let n = basis.dimension();
    let cols = DMatrix::from_fn(n, m, |i, k| basis.vectors()[k][i]);
    cols.qr().q()
}
