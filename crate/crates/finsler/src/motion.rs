//! Infinitesimal motions and quasimotions: constraint assembly at an
//! orthonormal basis, nullspace extraction, closure and preservation checks,
//! and the commutator bracket.
//!
//! A motion sends vectors to vectors and, to first order, deforms a basis as
//! `e'_k = e_k + eps * sum_m a_k^m e_m`. Demanding that the orthonormal
//! profile pattern survive to first order yields one linear equation per pair
//! `k <= l`; rows with `k > l` are deliberately absent because the profile's
//! below-diagonal entries are unconstrained. A quasimotion acts on vector
//! coordinates instead (`v'^i = v^i + eps * u^i_j v^j`), with the metric
//! transforming as a tensor; first-order pattern invariance produces a second
//! system over the same unknown count. Identifying the quasimotion
//! coefficient `u^m_k` with flattened slot `(k, m)` — lower index chooses the
//! block — aligns the two systems so their nullspaces can be compared
//! directly.

use nalgebra::{DMatrix, DVector};

use crate::diff::cartan_at;
use crate::error::FinslerError;
use crate::norm::NormModel;
use crate::ortho::{metric_profile, Basis, MetricProfile};

/// Relative singular-value threshold separating rank from nullspace.
pub const RANK_TOL: f64 = 1e-8;
/// Pattern tolerance a basis must meet before constraint assembly.
const PATTERN_TOL: f64 = 1e-8;
/// Largest principal angle accepted when declaring two algebras equal.
pub const ANGLE_TOL: f64 = 1e-6;

/// First-order basis deformation with coefficient matrix `a`, where row `k`
/// holds the components of the velocity of `e_k` in the basis itself:
/// `e'_k = e_k + eps * sum_m a[(k, m)] e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionGenerator {
    a: DMatrix<f64>,
}

impl MotionGenerator {
    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self, FinslerError> {
        if a.nrows() != a.ncols() {
            return Err(FinslerError::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(FinslerError::SingularInput(
                "generator has non-finite entries".into(),
            ));
        }
        Ok(MotionGenerator { a })
    }

    pub fn zero(n: usize) -> Self {
        MotionGenerator {
            a: DMatrix::zeros(n, n),
        }
    }

    pub fn dimension(&self) -> usize {
        self.a.nrows()
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Row-major flattening; slot `k*n + m` carries `a_k^m`.
    pub fn flat(&self) -> DVector<f64> {
        let n = self.dimension();
        DVector::from_fn(n * n, |i, _| self.a[(i / n, i % n)])
    }

    pub fn from_flat(n: usize, flat: &DVector<f64>) -> Result<Self, FinslerError> {
        if flat.len() != n * n {
            return Err(FinslerError::DimensionMismatch {
                expected: n * n,
                got: flat.len(),
            });
        }
        Ok(MotionGenerator {
            a: DMatrix::from_fn(n, n, |k, m| flat[k * n + m]),
        })
    }

    /// Ambient-coordinate operator `X = E a^T E^{-1}` (columns of `E` are the
    /// basis vectors), so the deformed frame is `(I + eps X) E`.
    pub fn to_ambient(&self, basis: &Basis) -> Result<DMatrix<f64>, FinslerError> {
        if basis.dimension() != self.dimension() {
            return Err(FinslerError::DimensionMismatch {
                expected: self.dimension(),
                got: basis.dimension(),
            });
        }
        let e = basis.matrix();
        let inv = e
            .clone()
            .try_inverse()
            .ok_or_else(|| FinslerError::SingularInput("basis matrix is not invertible".into()))?;
        Ok(e * self.a.transpose() * inv)
    }
}

/// Which first-order invariance produced a constraint system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    Motion,
    Quasimotion,
}

/// Homogeneous linear system `M x = 0` over the flattened generator
/// coefficients; assembled systems have one row per pair `k <= l`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    kind: ConstraintKind,
    n: usize,
    matrix: DMatrix<f64>,
    cartan_row_max: Vec<f64>,
    cartan_max_abs: f64,
}

impl ConstraintSystem {
    /// Wraps an explicit matrix (any row count, `n^2` columns). Used for
    /// control systems in diagnostics and tests; assembled systems come from
    /// [`assemble_motion_constraints`] / [`assemble_quasimotion_constraints`].
    pub fn from_matrix(
        kind: ConstraintKind,
        n: usize,
        matrix: DMatrix<f64>,
    ) -> Result<Self, FinslerError> {
        if matrix.ncols() != n * n || matrix.nrows() == 0 {
            return Err(FinslerError::DimensionMismatch {
                expected: n * n,
                got: matrix.ncols(),
            });
        }
        let rows = matrix.nrows();
        Ok(ConstraintSystem {
            kind,
            n,
            matrix,
            cartan_row_max: vec![0.0; rows],
            cartan_max_abs: 0.0,
        })
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest Cartan contribution per assembled row (health metric; the
    /// contraction with the evaluation direction vanishes analytically).
    pub fn cartan_row_max(&self) -> &[f64] {
        &self.cartan_row_max
    }

    pub fn cartan_max_abs(&self) -> f64 {
        self.cartan_max_abs
    }

    /// Row position of the pair `(k, l)`, `k <= l`, in lexicographic order.
    pub fn row_index(&self, k: usize, l: usize) -> usize {
        debug_assert!(k <= l && l < self.n);
        // Rows for prefixes 0..k occupy sum_{i<k} (n - i) slots.
        k * self.n - k * (k + 1) / 2 + k + (l - k)
    }
}

/// Orthonormal spanning set of a constraint system's nullspace.
#[derive(Clone, Debug)]
pub struct LieAlgebraBasis {
    pub generators: Vec<MotionGenerator>,
    pub dimension: usize,
    /// Singular values of the constraint matrix, descending.
    pub singular_values: Vec<f64>,
}

/// Additive-closure check: residuals of two members and of their sum.
#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub residual_f: f64,
    pub residual_g: f64,
    pub residual_sum: f64,
    pub pass: bool,
}

/// Deviation-versus-epsilon ladder with a fitted decay order.
#[derive(Clone, Debug)]
pub struct DriftReport {
    pub ladder: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Least-squares slope of `log deviation` against `log eps`; `None` when
    /// fewer than two ladder points rise above the noise floor (exact
    /// preservation).
    pub fitted_order: Option<f64>,
    pub pass: bool,
}

/// Nullspace comparison between two constraint systems.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Largest principal angle between the nullspaces (radians); `None` when
    /// the dimensions differ or both nullspaces are trivial.
    pub largest_principal_angle: Option<f64>,
    pub equivalent: bool,
    pub angle_tol: f64,
}

/// Commutator of two generators plus its residual against a system.
#[derive(Clone, Debug)]
pub struct BracketReport {
    pub commutator: MotionGenerator,
    pub residual: f64,
}

fn require_orthonormal(model: &NormModel, basis: &Basis) -> Result<MetricProfile, FinslerError> {
    let profile = metric_profile(model, basis)?;
    let check = profile.pattern_check();
    if !check.orthonormal_within(PATTERN_TOL, model.is_positive()) {
        return Err(FinslerError::NotOrthonormalBasis(format!(
            "profile deviates from the orthonormal pattern: above-diagonal {:.3e}, diagonal {:.3e}",
            check.max_above_diagonal,
            if model.is_positive() {
                check.max_positive_diagonal_deviation
            } else {
                check.max_unit_diagonal_deviation
            }
        )));
    }
    Ok(profile)
}

fn assemble(
    model: &NormModel,
    basis: &Basis,
    kind: ConstraintKind,
) -> Result<ConstraintSystem, FinslerError> {
    let profile = require_orthonormal(model, basis)?;
    let n = basis.dimension();
    let e = basis.vectors();
    // Motion rows demand d/dt G_kl = 0; quasimotion rows are the tensor
    // transformation law's first-order terms, which carry the opposite sign.
    let sign = match kind {
        ConstraintKind::Motion => 1.0,
        ConstraintKind::Quasimotion => -1.0,
    };
    let cartans = e
        .iter()
        .map(|v| cartan_at(model, &model.admissible(v)?))
        .collect::<Result<Vec<_>, _>>()?;

    let rows = n * (n + 1) / 2;
    let mut m = DMatrix::zeros(rows, n * n);
    let mut cartan_row_max = vec![0.0f64; rows];
    let mut r = 0;
    for k in 0..n {
        for l in k..n {
            for mm in 0..n {
                // g(e_k)(e_m, e_l): response of G_kl to the velocity of e_k.
                let g_ml = e[mm].dot(&(&profile.p[k] * &e[l]));
                // g(e_k)(e_k, e_m): response to the velocity of e_l.
                let g_km = e[k].dot(&(&profile.p[k] * &e[mm]));
                m[(r, k * n + mm)] += sign * g_ml;
                m[(r, l * n + mm)] += sign * g_km;
                // Transport of the metric itself along the moving direction;
                // vanishes analytically because C(e_k) contracted with e_k
                // is zero, kept as an assembled health term.
                let c = 2.0 * cartans[k].contract(&e[k], &e[l], &e[mm]);
                cartan_row_max[r] = cartan_row_max[r].max(c.abs());
                m[(r, k * n + mm)] += sign * c;
            }
            r += 1;
        }
    }
    let cartan_max_abs = cartan_row_max.iter().copied().fold(0.0f64, f64::max);
    Ok(ConstraintSystem {
        kind,
        n,
        matrix: m,
        cartan_row_max,
        cartan_max_abs,
    })
}

/// Linear system whose nullspace is the algebra of infinitesimal motions at
/// `basis`. The basis must already carry the orthonormal profile pattern.
pub fn assemble_motion_constraints(
    model: &NormModel,
    basis: &Basis,
) -> Result<ConstraintSystem, FinslerError> {
    assemble(model, basis, ConstraintKind::Motion)
}

/// The quasimotion counterpart: coordinates transform, the metric follows
/// the tensor law, and the unknown `u^m_k` occupies flattened slot `(k, m)`.
pub fn assemble_quasimotion_constraints(
    model: &NormModel,
    basis: &Basis,
) -> Result<ConstraintSystem, FinslerError> {
    assemble(model, basis, ConstraintKind::Quasimotion)
}

/// Nullspace of the system by singular value decomposition with relative
/// threshold [`RANK_TOL`]; generator order follows descending singular value
/// and each generator's first significant flattened entry is made positive.
pub fn solve_lie_algebra(system: &ConstraintSystem) -> LieAlgebraBasis {
    solve_lie_algebra_with_tol(system, RANK_TOL)
}

pub fn solve_lie_algebra_with_tol(system: &ConstraintSystem, rel_tol: f64) -> LieAlgebraBasis {
    let n = system.n;
    let cols = n * n;
    let rows = system.matrix.nrows();
    // The decomposition returns a thin right factor for wide matrices; pad
    // with zero rows (which leave singular values untouched) to obtain the
    // full right singular basis, nullspace included.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(&system.matrix);
        p
    } else {
        system.matrix.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let rank = if smax <= 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax)
            .count()
    };

    let mut generators = Vec::with_capacity(cols - rank);
    for r in rank..cols {
        let mut flat = DVector::from_fn(cols, |i, _| v_t[(r, i)]);
        let scale = flat.amax();
        if let Some(first) = flat.iter().find(|x| x.abs() > 1e-12 * scale) {
            if *first < 0.0 {
                // Adding 0.0 turns the negated zeros back into +0.0.
                flat = flat.map(|x| -x + 0.0);
            }
        }
        generators
            .push(MotionGenerator::from_flat(n, &flat).expect("nullspace vector has length n^2"));
    }
    let kept = rows.min(cols);
    let singular_values = svd.singular_values.iter().copied().take(kept).collect();
    let dimension = generators.len();
    LieAlgebraBasis {
        generators,
        dimension,
        singular_values,
    }
}

/// Largest row residual `max |(M x)_r|` of a generator against a system.
pub fn constraint_residual(
    system: &ConstraintSystem,
    gen: &MotionGenerator,
) -> Result<f64, FinslerError> {
    if gen.dimension() != system.n {
        return Err(FinslerError::DimensionMismatch {
            expected: system.n,
            got: gen.dimension(),
        });
    }
    Ok((&system.matrix * gen.flat()).amax())
}

/// First-order composition of two motions is their coefficient sum; because
/// the constraints are linear and homogeneous the sum must satisfy them
/// whenever both members do.
pub fn verify_additive_closure(
    system: &ConstraintSystem,
    f: &MotionGenerator,
    g: &MotionGenerator,
) -> Result<ClosureReport, FinslerError> {
    let residual_f = constraint_residual(system, f)?;
    let residual_g = constraint_residual(system, g)?;
    let sum = MotionGenerator::from_matrix(f.coefficients() + g.coefficients())?;
    let residual_sum = constraint_residual(system, &sum)?;
    Ok(ClosureReport {
        residual_f,
        residual_g,
        residual_sum,
        pass: residual_sum <= 1e-8,
    })
}

/// Applies the finite deformation `e'_k = e_k + eps * sum_m a_k^m e_m` and
/// reports the worst deviation of the new profile from the orthonormal
/// pattern. For a generator in the algebra the deviation is second order.
pub fn verify_first_order_preservation(
    model: &NormModel,
    basis: &Basis,
    gen: &MotionGenerator,
    eps: f64,
) -> Result<f64, FinslerError> {
    require_orthonormal(model, basis)?;
    if gen.dimension() != basis.dimension() {
        return Err(FinslerError::DimensionMismatch {
            expected: basis.dimension(),
            got: gen.dimension(),
        });
    }
    let n = basis.dimension();
    let e = basis.vectors();
    let mut moved = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = e[k].clone();
        for (m, em) in e.iter().enumerate() {
            v += em * (eps * gen.coefficients()[(k, m)]);
        }
        moved.push(v);
    }
    let deformed = Basis::new(moved)?;
    let profile = metric_profile(model, &deformed)?;
    let check = profile.pattern_check();
    let diag = if model.is_positive() {
        check.max_positive_diagonal_deviation
    } else {
        check.max_unit_diagonal_deviation
    };
    Ok(check.max_above_diagonal.max(diag))
}

/// Runs [`verify_first_order_preservation`] over an epsilon ladder and fits
/// the decay order; `pass` requires order >= 1.9 (or exact preservation).
pub fn fit_drift_order(
    model: &NormModel,
    basis: &Basis,
    gen: &MotionGenerator,
    ladder: &[f64],
) -> Result<DriftReport, FinslerError> {
    let mut deviations = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        deviations.push(verify_first_order_preservation(model, basis, gen, eps)?);
    }
    // Points at the noise floor say "exactly preserved", not "order zero";
    // drop them before fitting.
    let points: Vec<(f64, f64)> = ladder
        .iter()
        .zip(&deviations)
        .filter(|(_, &d)| d > 1e-14)
        .map(|(&e, &d)| (e.ln(), d.ln()))
        .collect();
    let fitted_order = if points.len() < 2 {
        None
    } else {
        let m = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        Some(sxy / sxx)
    };
    let pass = fitted_order.is_none_or(|o| o >= 1.9);
    Ok(DriftReport {
        ladder: ladder.to_vec(),
        deviations,
        fitted_order,
        pass,
    })
}

/// Compares the nullspaces of two systems over the same unknowns: dimensions
/// plus the largest principal angle between the spanned subspaces.
pub fn compare_algebras(
    sys_a: &ConstraintSystem,
    sys_b: &ConstraintSystem,
) -> Result<EquivalenceReport, FinslerError> {
    if sys_a.n != sys_b.n {
        return Err(FinslerError::DimensionMismatch {
            expected: sys_a.n,
            got: sys_b.n,
        });
    }
    let a = solve_lie_algebra(sys_a);
    let b = solve_lie_algebra(sys_b);
    let (dim_a, dim_b) = (a.dimension, b.dimension);
    if dim_a != dim_b {
        return Ok(EquivalenceReport {
            dim_a,
            dim_b,
            largest_principal_angle: None,
            equivalent: false,
            angle_tol: ANGLE_TOL,
        });
    }
    if dim_a == 0 {
        return Ok(EquivalenceReport {
            dim_a,
            dim_b,
            largest_principal_angle: Some(0.0),
            equivalent: true,
            angle_tol: ANGLE_TOL,
        });
    }
    let cols = sys_a.n * sys_a.n;
    let qa = DMatrix::from_fn(cols, dim_a, |i, j| a.generators[j].flat()[i]);
    let qb = DMatrix::from_fn(cols, dim_b, |i, j| b.generators[j].flat()[i]);
    // Columns are orthonormal, so the singular values of Qa^T Qb are the
    // cosines of the principal angles.
    let overlap = qa.transpose() * qb;
    let sv = overlap.svd(false, false).singular_values;
    let cos_min = sv.min().clamp(-1.0, 1.0);
    let angle = cos_min.acos();
    Ok(EquivalenceReport {
        dim_a,
        dim_b,
        largest_principal_angle: Some(angle),
        equivalent: angle <= ANGLE_TOL,
        angle_tol: ANGLE_TOL,
    })
}

/// Coefficient-matrix commutator `fg - gf`.
pub fn bracket(f: &MotionGenerator, g: &MotionGenerator) -> Result<MotionGenerator, FinslerError> {
    if f.dimension() != g.dimension() {
        return Err(FinslerError::DimensionMismatch {
            expected: f.dimension(),
            got: g.dimension(),
        });
    }
    MotionGenerator::from_matrix(
        f.coefficients() * g.coefficients() - g.coefficients() * f.coefficients(),
    )
}

/// Bracket plus its residual against `system`. For constant-metric norms the
/// residual is provably zero; for direction-dependent metrics it is an
/// observable to report, not a theorem to assert.
pub fn bracket_with_residual(
    system: &ConstraintSystem,
    f: &MotionGenerator,
    g: &MotionGenerator,
) -> Result<BracketReport, FinslerError> {
    let commutator = bracket(f, g)?;
    let residual = constraint_residual(system, &commutator)?;
    Ok(BracketReport {
        commutator,
        residual,
    })
}
