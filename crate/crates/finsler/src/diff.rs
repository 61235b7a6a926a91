//! Metric and Cartan tensors of a norm, and the Euler-homogeneity identity
//! suite.
//!
//! The metric tensor is `g_ij(v) = (1/2) d^2 F^2 / dv_i dv_j`, attached to a
//! direction; the Cartan tensor is `C_ijk(v) = (1/2) dg_ij/dv_k`. Every
//! derivative is available along two independent routes: exact hyperdual
//! arithmetic and central finite differences, plus closed forms for the
//! quadratic and Randers families. The identity suite checks the four
//! homogeneity consequences that make `F` a Minkowski norm:
//!
//! * (a) `v . grad F^2 = 2 F^2` (degree-2 Euler identity),
//! * (b) `v^j d2F^2/dv_i dv_j = dF^2/dv_i` (first derivatives degree-1),
//! * (c) `g(v)(v, v) = F^2(v)`,
//! * (d) `v^k dg_ij/dv_k = 0` (metric degree-0).

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::FinslerError;
use crate::hyperdual::Dual3;
use crate::norm::{AdmissibleDirection, NormKind, NormModel, Vector};

/// How a derivative is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed form; only the Euclidean, pseudo-Euclidean and Randers families
    /// have one.
    Analytic,
    /// Exact third-order truncated polynomial arithmetic.
    Hyperdual,
    /// Central finite differences of `F^2` (and of the exact metric for third
    /// derivatives).
    FiniteDifference,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Hyperdual => "hyperdual",
            Method::FiniteDifference => "finite-difference",
        })
    }
}

/// Step sizes and rank threshold for the numerical paths. All steps are
/// multiplied by `max(1, |v|)`.
#[derive(Clone, Copy, Debug)]
pub struct DiffOptions {
    /// Central first-difference step for `grad F^2`.
    pub fd_step1: f64,
    /// Central second-difference step for the Hessian of `F^2`. Roundoff in
    /// a second difference grows like `eps / h^2`, so the optimum sits near
    /// `eps^(1/4) ~ 1e-4`; at 1e-5 the noise floor is ~1e-5, above the
    /// tolerances this path is checked against.
    pub fd_step2: f64,
    /// Step for the first difference of the metric (third derivatives).
    pub fd_step3: f64,
    /// Relative singular-value threshold for the nonsingularity check.
    pub tol_rank: f64,
}

impl Default for DiffOptions {
    fn default() -> Self {
        DiffOptions {
            fd_step1: 1e-5,
            fd_step2: 1e-4,
            fd_step3: 1e-4,
            tol_rank: 1e-8,
        }
    }
}

/// Direction-dependent metric tensor `g_ij(v)`.
#[derive(Clone, Debug)]
pub struct MetricTensor {
    pub direction: Vector,
    /// Symmetrized metric matrix.
    pub g: DMatrix<f64>,
    pub source: Method,
    /// Largest `|g_ij - g_ji|` before symmetrization (health metric).
    pub asymmetry: f64,
}

/// Totally symmetric Cartan tensor `C_ijk(v) = (1/2) dg_ij/dv_k`.
#[derive(Clone, Debug)]
pub struct CartanTensor {
    pub direction: Vector,
    n: usize,
    /// Symmetrized entries, row-major `[i][j][k]`.
    c: Vec<f64>,
    pub source: Method,
    /// Largest deviation between index permutations before symmetrization.
    pub asymmetry: f64,
}

impl CartanTensor {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Full contraction `C_ijk x^i y^j z^k`.
    pub fn contract(&self, x: &Vector, y: &Vector, z: &Vector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc += self.get(i, j, k) * x[i] * y[j] * z[k];
                }
            }
        }
        acc
    }

    /// `max_{j,k} |C_ijk v^i|` with `v` the base direction; vanishes for a
    /// homogeneous norm.
    pub fn direction_contraction_max(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.get(i, j, k) * self.direction[i];
                }
                worst = worst.max(acc.abs());
            }
        }
        worst
    }
}

/// Outcome of one identity over a sample sweep.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub method: Method,
    pub max_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// The most precise metric path available for a norm kind.
pub fn preferred_method(model: &NormModel) -> Method {
    match model.kind() {
        NormKind::Euclidean | NormKind::PseudoEuclidean { .. } | NormKind::Randers { .. } => {
            Method::Analytic
        }
        NormKind::MthRoot { .. } | NormKind::Custom { .. } => Method::Hyperdual,
    }
}

fn fd_scale(v: &Vector) -> f64 {
    v.norm().max(1.0)
}

// ---------------------------------------------------------------------------
// Hyperdual derivatives of F^2 (raw, not halved).

fn dual_point(v: &Vector) -> Vec<Dual3> {
    v.iter().map(|&x| Dual3::constant(x)).collect()
}

fn hd_gradient(model: &NormModel, v: &Vector) -> Result<DVector<f64>, FinslerError> {
    let n = v.len();
    let mut grad = DVector::zeros(n);
    for i in 0..n {
        let mut point = dual_point(v);
        point[i] = Dual3::variable(v[i], &[0]);
        grad[i] = model.evaluate_f2_dual(&point)?.d1(0);
    }
    Ok(grad)
}

fn hd_hessian(model: &NormModel, v: &Vector) -> Result<DMatrix<f64>, FinslerError> {
    let n = v.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut point = dual_point(v);
            if i == j {
                point[i] = Dual3::variable(v[i], &[0, 1]);
            } else {
                point[i] = Dual3::variable(v[i], &[0]);
                point[j] = Dual3::variable(v[j], &[1]);
            }
            let d = model.evaluate_f2_dual(&point)?.d2(0, 1);
            h[(i, j)] = d;
            h[(j, i)] = d;
        }
    }
    Ok(h)
}

/// Third derivatives `d^3 F^2 / dv_i dv_j dv_k`, computed once per sorted
/// triple and mirrored (row-major `[i][j][k]`).
fn hd_third(model: &NormModel, v: &Vector) -> Result<Vec<f64>, FinslerError> {
    let n = v.len();
    let mut t = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut point = dual_point(v);
                let mut gens: Vec<(usize, Vec<usize>)> = Vec::new();
                for (gen, coord) in [(0, i), (1, j), (2, k)] {
                    if let Some(entry) = gens.iter_mut().find(|(c, _)| *c == coord) {
                        entry.1.push(gen);
                    } else {
                        gens.push((coord, vec![gen]));
                    }
                }
                for (coord, g) in &gens {
                    point[*coord] = Dual3::variable(v[*coord], g);
                }
                let d = model.evaluate_f2_dual(&point)?.d3();
                for (a, b, c) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    t[(a * n + b) * n + c] = d;
                }
            }
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Finite differences of F^2.

fn fd_gradient(model: &NormModel, v: &Vector, step: f64) -> Result<DVector<f64>, FinslerError> {
    let n = v.len();
    let h = step * fd_scale(v);
    let mut grad = DVector::zeros(n);
    for i in 0..n {
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[i] += h;
        vm[i] -= h;
        grad[i] = (model.evaluate_f2(&vp)? - model.evaluate_f2(&vm)?) / (2.0 * h);
    }
    Ok(grad)
}

fn fd_hessian(model: &NormModel, v: &Vector, step: f64) -> Result<DMatrix<f64>, FinslerError> {
    let n = v.len();
    let h = step * fd_scale(v);
    let f0 = model.evaluate_f2(v)?;
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = if i == j {
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[i] += h;
                vm[i] -= h;
                (model.evaluate_f2(&vp)? - 2.0 * f0 + model.evaluate_f2(&vm)?) / (h * h)
            } else {
                let mut vpp = v.clone();
                let mut vpm = v.clone();
                let mut vmp = v.clone();
                let mut vmm = v.clone();
                vpp[i] += h;
                vpp[j] += h;
                vpm[i] += h;
                vpm[j] -= h;
                vmp[i] -= h;
                vmp[j] += h;
                vmm[i] -= h;
                vmm[j] -= h;
                (model.evaluate_f2(&vpp)? - model.evaluate_f2(&vpm)? - model.evaluate_f2(&vmp)?
                    + model.evaluate_f2(&vmm)?)
                    / (4.0 * h * h)
            };
            hess[(i, j)] = d;
            hess[(j, i)] = d;
        }
    }
    Ok(hess)
}

/// `dg_ij/dv_k` by central first differences of the exact-path metric
/// (closed form where available, hyperdual otherwise). Differencing the
/// finite-difference metric instead would compound its noise far above the
/// tolerances this path serves.
fn fd_metric_derivative(
    model: &NormModel,
    v: &Vector,
    step: f64,
) -> Result<Vec<f64>, FinslerError> {
    let n = v.len();
    let h = step * fd_scale(v);
    let exact = match preferred_method(model) {
        Method::Analytic => Method::Analytic,
        _ => Method::Hyperdual,
    };
    let mut d = vec![0.0; n * n * n];
    for k in 0..n {
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[k] += h;
        vm[k] -= h;
        let gp = metric_matrix(model, &vp, exact)?;
        let gm = metric_matrix(model, &vm, exact)?;
        for i in 0..n {
            for j in 0..n {
                d[(i * n + j) * n + k] = (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
            }
        }
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Metric tensor.

fn analytic_metric(model: &NormModel, v: &Vector) -> Result<DMatrix<f64>, FinslerError> {
    let n = model.dimension();
    match model.kind() {
        NormKind::Euclidean => Ok(DMatrix::identity(n, n)),
        NormKind::PseudoEuclidean { signature } => Ok(DMatrix::from_diagonal(
            &DVector::from_iterator(n, signature.iter().map(|&s| f64::from(s))),
        )),
        NormKind::Randers { alpha, beta } => {
            let av = alpha * v;
            let a2 = v.dot(&av);
            // AdmissibleDirection guarantees v != 0, and alpha is positive
            // definite, so a2 > 0.
            let a = a2.sqrt();
            let l = av / a;
            let f = a + beta.dot(v);
            let mut g = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] = (f / a) * (alpha[(i, j)] - l[i] * l[j])
                        + (l[i] + beta[i]) * (l[j] + beta[j]);
                }
            }
            Ok(g)
        }
        _ => Err(FinslerError::AnalyticUnavailable),
    }
}

/// Raw metric matrix for a validated direction, without the nonsingularity
/// check (used internally where the displaced points of a finite difference
/// must not trip it).
fn metric_matrix(
    model: &NormModel,
    v: &Vector,
    method: Method,
) -> Result<DMatrix<f64>, FinslerError> {
    metric_matrix_opts(model, v, method, &DiffOptions::default())
}

fn metric_matrix_opts(
    model: &NormModel,
    v: &Vector,
    method: Method,
    opts: &DiffOptions,
) -> Result<DMatrix<f64>, FinslerError> {
    match method {
        Method::Analytic => analytic_metric(model, v),
        Method::Hyperdual => Ok(hd_hessian(model, v)? * 0.5),
        Method::FiniteDifference => Ok(fd_hessian(model, v, opts.fd_step2)? * 0.5),
    }
}

/// Metric tensor `g(v)` with default options.
pub fn metric_at(
    model: &NormModel,
    v: &AdmissibleDirection,
    method: Method,
) -> Result<MetricTensor, FinslerError> {
    metric_at_opts(model, v, method, &DiffOptions::default())
}

/// Metric tensor `g(v)`; errors with `SingularMetric` if the smallest
/// singular value falls below `tol_rank` times the largest.
pub fn metric_at_opts(
    model: &NormModel,
    v: &AdmissibleDirection,
    method: Method,
    opts: &DiffOptions,
) -> Result<MetricTensor, FinslerError> {
    let vec = v.vector();
    let raw = metric_matrix_opts(model, vec, method, opts)?;
    let asymmetry = (&raw - raw.transpose())
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let g = (&raw + raw.transpose()) * 0.5;
    let svd = g.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    // The comparisons are written so NaN singular values also count as degenerate.
    let nondegenerate = smax > 0.0 && smin > opts.tol_rank * smax;
    if !nondegenerate {
        return Err(FinslerError::SingularMetric {
            direction: format!("{:?}", vec.as_slice()),
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
            tol: opts.tol_rank,
        });
    }
    Ok(MetricTensor {
        direction: vec.clone(),
        g,
        source: method,
        asymmetry,
    })
}

// ---------------------------------------------------------------------------
// Cartan tensor.

/// Cartan tensor along the most precise path (closed-form zero for constant
/// metrics, hyperdual otherwise).
pub fn cartan_at(model: &NormModel, v: &AdmissibleDirection) -> Result<CartanTensor, FinslerError> {
    let method = match model.kind() {
        NormKind::Euclidean | NormKind::PseudoEuclidean { .. } => Method::Analytic,
        _ => Method::Hyperdual,
    };
    cartan_at_opts(model, v, method, &DiffOptions::default())
}

pub fn cartan_at_opts(
    model: &NormModel,
    v: &AdmissibleDirection,
    method: Method,
    opts: &DiffOptions,
) -> Result<CartanTensor, FinslerError> {
    let vec = v.vector();
    let n = model.dimension();
    let (raw, asymmetry) = match method {
        Method::Analytic => match model.kind() {
            // Quadratic norms have a constant metric: C = 0 identically.
            NormKind::Euclidean | NormKind::PseudoEuclidean { .. } => (vec![0.0; n * n * n], 0.0),
            _ => return Err(FinslerError::AnalyticUnavailable),
        },
        Method::Hyperdual => {
            // C = (1/4) d^3 F^2; computed per sorted triple, so exactly
            // symmetric by construction.
            let t = hd_third(model, vec)?;
            (t.into_iter().map(|x| x * 0.25).collect::<Vec<f64>>(), 0.0)
        }
        Method::FiniteDifference => {
            let d = fd_metric_derivative(model, vec, opts.fd_step3)?;
            let c: Vec<f64> = d.into_iter().map(|x| x * 0.5).collect();
            let mut asym = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let base = c[(i * n + j) * n + k];
                        for (a, b, d2) in [(i, k, j), (k, j, i)] {
                            asym = asym.max((base - c[(a * n + b) * n + d2]).abs());
                        }
                    }
                }
            }
            (c, asym)
        }
    };
    // Symmetrize by averaging over all index permutations.
    let mut c = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let perms = [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ];
                let avg: f64 = perms
                    .iter()
                    .map(|&(a, b, d)| raw[(a * n + b) * n + d])
                    .sum::<f64>()
                    / 6.0;
                c[(i * n + j) * n + k] = avg;
            }
        }
    }
    Ok(CartanTensor {
        direction: vec.clone(),
        n,
        c,
        source: method,
        asymmetry,
    })
}

// ---------------------------------------------------------------------------
// Euler identity suite.

/// Residuals of the four homogeneity identities at one direction:
/// `[degree-2 Euler, gradient degree-1, g(v)(v,v) = F^2, metric degree-0]`.
///
/// Only the hyperdual and finite-difference methods are accepted: the
/// closed-form gradient of the non-quadratic families is `2 g(v) v`, which is
/// the content of identities (b) and (c) themselves, so an "analytic" sweep
/// would be circular.
pub fn euler_residuals_opts(
    model: &NormModel,
    v: &AdmissibleDirection,
    method: Method,
    opts: &DiffOptions,
) -> Result<[f64; 4], FinslerError> {
    let vec = v.vector();
    let (grad, hess, dg) = match method {
        Method::Hyperdual => {
            let t = hd_third(model, vec)?;
            let dg: Vec<f64> = t.into_iter().map(|x| x * 0.5).collect();
            (hd_gradient(model, vec)?, hd_hessian(model, vec)?, dg)
        }
        Method::FiniteDifference => (
            fd_gradient(model, vec, opts.fd_step1)?,
            fd_hessian(model, vec, opts.fd_step2)?,
            fd_metric_derivative(model, vec, opts.fd_step3)?,
        ),
        Method::Analytic => return Err(FinslerError::AnalyticUnavailable),
    };
    let n = vec.len();
    let f2 = model.evaluate_f2(vec)?;

    // (a) degree-2 Euler identity, in both the F^2-level and F-level forms.
    // With the signed convention F = sign(F^2) sqrt|F^2| the chain rule gives
    // dF/dF^2 = 1 / (2|F|) on either side of the cone.
    let vg = vec.dot(&grad);
    let mut r_a = (vg - 2.0 * f2).abs();
    if f2 != 0.0 {
        let f = f2.signum() * f2.abs().sqrt();
        r_a = r_a.max((vg / (2.0 * f.abs()) - f).abs());
    }

    // (b) first derivatives are degree-1 homogeneous.
    let hv = &hess * vec;
    let r_b = (&hv - &grad).iter().fold(0.0f64, |m, x| m.max(x.abs()));

    // (c) the metric reproduces the squared norm.
    let r_c = (vec.dot(&hv) * 0.5 - f2).abs();

    // (d) the metric is degree-0 homogeneous: v^k dg_ij/dv_k = 0.
    let mut r_d = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += dg[(i * n + j) * n + k] * vec[k];
            }
            r_d = r_d.max(acc.abs());
        }
    }
    Ok([r_a, r_b, r_c, r_d])
}

pub const IDENTITY_NAMES: [&str; 4] = [
    "euler-degree-2",
    "gradient-degree-1",
    "metric-reproduces-f2",
    "metric-degree-0",
];

/// Sweeps the four identities over the samples and reports the worst residual
/// of each against `tolerance`. Failures are reported, not raised.
pub fn check_euler_identities(
    model: &NormModel,
    samples: &[AdmissibleDirection],
    method: Method,
    tolerance: f64,
) -> Result<Vec<IdentityReport>, FinslerError> {
    check_euler_identities_opts(model, samples, method, tolerance, &DiffOptions::default())
}

pub fn check_euler_identities_opts(
    model: &NormModel,
    samples: &[AdmissibleDirection],
    method: Method,
    tolerance: f64,
    opts: &DiffOptions,
) -> Result<Vec<IdentityReport>, FinslerError> {
    let mut worst = [0.0f64; 4];
    for s in samples {
        let r = euler_residuals_opts(model, s, method, opts)?;
        for (w, x) in worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
    }
    Ok(IDENTITY_NAMES
        .iter()
        .zip(worst)
        .map(|(name, max_residual)| IdentityReport {
            name: (*name).to_string(),
            method,
            max_residual,
            samples: samples.len(),
            tolerance,
            pass: max_residual <= tolerance,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::MonomialTerm;
    use nalgebra::{DMatrix, DVector};

    fn randers2() -> NormModel {
        NormModel::randers(DMatrix::identity(2, 2), DVector::from_vec(vec![0.5, 0.0])).unwrap()
    }

    fn dir(model: &NormModel, coords: &[f64]) -> AdmissibleDirection {
        model
            .admissible(&Vector::from_vec(coords.to_vec()))
            .unwrap()
    }

    fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn euclidean_metric_is_identity_on_all_paths() {
        let m = NormModel::euclidean(3).unwrap();
        let v = dir(&m, &[0.3, -1.2, 0.5]);
        let id = DMatrix::identity(3, 3);
        for method in [Method::Analytic, Method::Hyperdual] {
            let g = metric_at(&m, &v, method).unwrap();
            assert!(max_diff(&g.g, &id) <= 1e-14, "{method}");
            assert_eq!(g.asymmetry, 0.0);
        }
        let g = metric_at(&m, &v, Method::FiniteDifference).unwrap();
        assert!(max_diff(&g.g, &id) <= 1e-6);
    }

    #[test]
    fn pseudo_euclidean_metric_is_signature_diagonal_everywhere() {
        let m = NormModel::pseudo_euclidean(vec![-1, 1, 1, 1]).unwrap();
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
        // Inside the cone, outside, and near it.
        for coords in [
            [2.0, 0.1, 0.0, 0.0],
            [0.1, 2.0, 0.0, 0.0],
            [1.0, 1.0, 0.1, 0.0],
        ] {
            let v = dir(&m, &coords);
            let g = metric_at(&m, &v, Method::Analytic).unwrap();
            assert_eq!(max_diff(&g.g, &diag), 0.0);
            let g = metric_at(&m, &v, Method::Hyperdual).unwrap();
            assert!(max_diff(&g.g, &diag) <= 1e-14);
        }
    }

    #[test]
    fn randers_metric_frozen_values() {
        // Hand values for alpha = I, beta = (0.5, 0):
        // g((1,0)) = [[2.25, 0], [0, 1.5]], g((0,1)) = [[1.25, 0.5], [0.5, 1]].
        let m = randers2();
        let cases = [
            ([1.0, 0.0], [[2.25, 0.0], [0.0, 1.5]]),
            ([0.0, 1.0], [[1.25, 0.5], [0.5, 1.0]]),
        ];
        for (coords, expected) in cases {
            let v = dir(&m, &coords);
            let e = DMatrix::from_fn(2, 2, |i, j| expected[i][j]);
            let ga = metric_at(&m, &v, Method::Analytic).unwrap();
            assert!(max_diff(&ga.g, &e) <= 1e-14);
            let gh = metric_at(&m, &v, Method::Hyperdual).unwrap();
            assert!(max_diff(&gh.g, &e) <= 1e-12);
            let gf = metric_at(&m, &v, Method::FiniteDifference).unwrap();
            assert!(max_diff(&gf.g, &e) <= 1e-6);
        }
    }

    #[test]
    fn metric_is_degree_zero_homogeneous() {
        let m = randers2();
        let base = Vector::from_vec(vec![0.8, -0.6]);
        let g0 = metric_at(&m, &m.admissible(&base).unwrap(), Method::Hyperdual).unwrap();
        for lambda in [0.5, 2.0, 7.0] {
            let gl = metric_at(
                &m,
                &m.admissible(&(&base * lambda)).unwrap(),
                Method::Hyperdual,
            )
            .unwrap();
            assert!(max_diff(&g0.g, &gl.g) <= 1e-8, "lambda {lambda}");
        }
    }

    #[test]
    fn cartan_zero_for_quadratic_norms() {
        let m = NormModel::pseudo_euclidean(vec![-1, 1]).unwrap();
        let v = dir(&m, &[2.0, 0.3]);
        let c = cartan_at(&m, &v).unwrap();
        assert_eq!(c.max_abs(), 0.0);
        let ch = cartan_at_opts(&m, &v, Method::Hyperdual, &DiffOptions::default()).unwrap();
        assert!(ch.max_abs() <= 1e-14);
    }

    #[test]
    fn cartan_frozen_randers_values() {
        // At (0,1): C_000 = 0.75 (nonzero witness), every slot contracted
        // with the direction itself vanishes.
        let m = randers2();
        let v = dir(&m, &[0.0, 1.0]);
        let c = cartan_at(&m, &v).unwrap();
        assert!(
            (c.get(0, 0, 0) - 0.75).abs() <= 1e-12,
            "C_000 = {}",
            c.get(0, 0, 0)
        );
        assert!(c.max_abs() > 1e-3);
        assert!(c.direction_contraction_max() <= 1e-12);
        // Finite-difference route agrees and stays symmetric to tolerance.
        let cf = cartan_at_opts(&m, &v, Method::FiniteDifference, &DiffOptions::default()).unwrap();
        assert!((cf.get(0, 0, 0) - 0.75).abs() <= 1e-6);
        assert!(cf.asymmetry <= 1e-6);
        assert!(cf.direction_contraction_max() <= 1e-6 * (1.0 + cf.max_abs()));
        // At (1,0) the contraction with the base direction also vanishes.
        let v10 = dir(&m, &[1.0, 0.0]);
        let c10 = cartan_at(&m, &v10).unwrap();
        assert!(c10.direction_contraction_max() <= 1e-12);
    }

    #[test]
    fn identities_hold_for_builtin_norms_on_fixed_directions() {
        let models = vec![
            NormModel::euclidean(3).unwrap(),
            NormModel::pseudo_euclidean(vec![-1, 1, 1]).unwrap(),
            randers2(),
            NormModel::mth_root(
                2,
                4,
                vec![
                    MonomialTerm::new(1.5, vec![4, 0]),
                    MonomialTerm::new(1.5, vec![0, 4]),
                    MonomialTerm::new(2.0, vec![2, 2]),
                ],
            )
            .unwrap(),
        ];
        for m in &models {
            let n = m.dimension();
            let fixed: Vec<Vec<f64>> = vec![
                (0..n).map(|i| 1.0 + 0.3 * i as f64).collect(),
                (0..n).map(|i| if i == 0 { 2.0 } else { -0.4 }).collect(),
                (0..n)
                    .map(|i| 0.5 + (i as f64) * (i as f64) * 0.2)
                    .collect(),
            ];
            let samples: Vec<AdmissibleDirection> = fixed
                .iter()
                .map(|c| m.admissible(&Vector::from_vec(c.clone())).unwrap())
                .collect();
            let hyper = check_euler_identities(m, &samples, Method::Hyperdual, 1e-10).unwrap();
            for r in &hyper {
                assert!(
                    r.pass,
                    "{} hyperdual {}: {}",
                    m.describe(),
                    r.name,
                    r.max_residual
                );
            }
            let fd = check_euler_identities(m, &samples, Method::FiniteDifference, 1e-6).unwrap();
            for r in &fd {
                assert!(r.pass, "{} fd {}: {}", m.describe(), r.name, r.max_residual);
            }
        }
    }

    #[test]
    fn non_homogeneous_control_fails_identity_a_with_residual_two() {
        // F^2 = v1^4 + v2^2 at (1,1): |v . grad - 2 F^2| = |4 + 2 - 4| = 2.
        let m = NormModel::custom_polynomial(
            2,
            vec![
                MonomialTerm::new(1.0, vec![4, 0]),
                MonomialTerm::new(1.0, vec![0, 2]),
            ],
        )
        .unwrap();
        let sample = [dir(&m, &[1.0, 1.0])];
        let reports = check_euler_identities(&m, &sample, Method::Hyperdual, 1e-10).unwrap();
        assert_eq!(reports[0].name, "euler-degree-2");
        assert!(
            (reports[0].max_residual - 2.0).abs() <= 1e-12,
            "residual {}",
            reports[0].max_residual
        );
        assert!(!reports[0].pass);
    }

    #[test]
    fn singular_metric_is_detected() {
        // F^2 = v1^2 alone: Hessian diag(2, 0) is singular.
        let m = NormModel::custom_polynomial(2, vec![MonomialTerm::new(1.0, vec![2, 0])]).unwrap();
        let v = dir(&m, &[1.0, 1.0]);
        assert!(matches!(
            metric_at(&m, &v, Method::Hyperdual),
            Err(FinslerError::SingularMetric { .. })
        ));
    }

    #[test]
    fn analytic_path_unavailable_for_mth_root() {
        let m = NormModel::mth_root(
            2,
            4,
            vec![
                MonomialTerm::new(1.5, vec![4, 0]),
                MonomialTerm::new(1.5, vec![0, 4]),
                MonomialTerm::new(2.0, vec![2, 2]),
            ],
        )
        .unwrap();
        let v = dir(&m, &[1.0, 0.5]);
        assert!(matches!(
            metric_at(&m, &v, Method::Analytic),
            Err(FinslerError::AnalyticUnavailable)
        ));
        let reports = check_euler_identities(&m, &[v], Method::Analytic, 1e-10);
        assert!(matches!(reports, Err(FinslerError::AnalyticUnavailable)));
    }

    #[test]
    fn cross_path_agreement_randers() {
        let m = randers2();
        for coords in [[0.9, 0.1], [-0.3, 1.1], [0.7, -0.7]] {
            let v = dir(&m, &coords);
            let gh = metric_at(&m, &v, Method::Hyperdual).unwrap();
            let gf = metric_at(&m, &v, Method::FiniteDifference).unwrap();
            let scale = gh.g.iter().fold(0.0f64, |mx, x| mx.max(x.abs()));
            assert!(max_diff(&gh.g, &gf.g) <= 1e-5 * scale);
        }
    }
}
