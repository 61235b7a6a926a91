//! Command handlers. Each handler returns a complete [`Report`];
//! computation failures (inadmissible directions, isotropic pivots,
//! unavailable derivative paths) are recorded in the report's error list and
//! force exit status 1. Configuration problems never reach these handlers.

use finsler::diff::preferred_method;
use finsler::ortho::{metric_profile_opts, span_preservation_residual};
use finsler::sample::admissible_directions;
use finsler::{
    assemble_motion_constraints, assemble_quasimotion_constraints, bracket_with_residual,
    check_euler_identities, compare_algebras, constraint_residual, fit_drift_order, metric_profile,
    normalize, orthogonalize_with, solve_lie_algebra, Basis, DiffOptions, FinslerError, Method,
    NormKind, NormModel, PivotStrategy,
};
use nalgebra::DMatrix;

use crate::config::{MethodChoice, SpaceConfig, ToleranceConfig};
use crate::report::{Report, ReportBuilder};

pub struct CommandContext {
    pub config: SpaceConfig,
    pub model: NormModel,
    pub basis: Basis,
    pub seed: u64,
    pub samples: usize,
    pub tol_override: Option<f64>,
}

impl CommandContext {
    fn tolerances(&self) -> ToleranceConfig {
        self.config.tolerances()
    }

    /// The metric path this run reports: the configured method, or the most
    /// precise one available for the norm.
    fn effective_method(&self) -> Method {
        match self.config.method_choice() {
            MethodChoice::Fixed(m) => m,
            MethodChoice::Auto => preferred_method(&self.model),
        }
    }

    fn builder(&self, command: &str, method: &str) -> ReportBuilder {
        ReportBuilder::new(
            command,
            &self.model.describe(),
            self.model.dimension(),
            method,
            self.seed,
            self.samples,
        )
    }

    fn pattern_tol(&self) -> f64 {
        self.tol_override
            .or(self.tolerances().pattern)
            .unwrap_or(1e-8)
    }

    fn residual_tol(&self) -> f64 {
        self.tol_override
            .or(self.tolerances().residual)
            .unwrap_or(1e-8)
    }

    fn angle_tol(&self) -> f64 {
        self.tol_override
            .or(self.tolerances().angle)
            .unwrap_or(1e-6)
    }
}

/// Emits a matrix whose rows are the basis vectors (the config convention).
fn basis_rows(b: &Basis) -> DMatrix<f64> {
    b.matrix().transpose()
}

/// Orthonormalizes the working basis: orthogonalize (honoring the configured
/// pivot strategy), then scale to unit |F^2|.
fn orthonormalize(ctx: &CommandContext) -> Result<(Basis, Vec<usize>, Vec<i8>), FinslerError> {
    let strategy = if ctx.config.pivot_reordering.unwrap_or(false) {
        PivotStrategy::ReorderByPivot
    } else {
        PivotStrategy::InputOrder
    };
    let out = orthogonalize_with(&ctx.model, &ctx.basis, strategy)?;
    let normed = normalize(&ctx.model, &out.basis)?;
    Ok((normed.basis, out.permutation, normed.signature))
}

pub fn identities(ctx: &CommandContext) -> Report {
    let tols = ctx.tolerances();
    let hd_tol = ctx.tol_override.or(tols.hyperdual).unwrap_or(1e-10);
    let fd_tol = ctx.tol_override.or(tols.finite_difference).unwrap_or(1e-6);
    let min_abs_f2 = tols.min_abs_f2.unwrap_or(1e-6);
    let sweeps: Vec<(Method, f64)> = match ctx.config.method_choice() {
        MethodChoice::Auto => {
            vec![
                (Method::Hyperdual, hd_tol),
                (Method::FiniteDifference, fd_tol),
            ]
        }
        MethodChoice::Fixed(m) => {
            let tol = match m {
                Method::FiniteDifference => fd_tol,
                _ => hd_tol,
            };
            vec![(m, tol)]
        }
    };
    let method_label = sweeps
        .iter()
        .map(|(m, _)| m.to_string())
        .collect::<Vec<_>>()
        .join("+");
    let mut b = ctx.builder("identities", &method_label);

    match admissible_directions(&ctx.model, ctx.samples, ctx.seed, min_abs_f2) {
        Err(e) => b.error(e.to_string()),
        Ok(dirs) => {
            for (method, tol) in sweeps {
                match check_euler_identities(&ctx.model, &dirs, method, tol) {
                    Err(e) => b.error(format!("{method}: {e}")),
                    Ok(reports) => {
                        for r in reports {
                            b.check(
                                &format!("{method}/{}", r.name),
                                r.max_residual,
                                tol,
                                "<=",
                                true,
                            );
                        }
                    }
                }
            }
        }
    }
    b.finish()
}

pub fn orthogonalize_cmd(ctx: &CommandContext) -> Report {
    let mut b = ctx.builder("orthogonalize", &ctx.effective_method().to_string());
    b.matrix("input-basis-rows", &basis_rows(&ctx.basis));
    let pat_tol = ctx.pattern_tol();
    match orthonormalize(ctx) {
        Err(e) => b.error(e.to_string()),
        Ok((basis, permutation, signature)) => {
            b.matrix("orthonormal-basis-rows", &basis_rows(&basis));
            b.row(
                "permutation",
                &permutation.iter().map(|&p| p as f64).collect::<Vec<_>>(),
            );
            b.row(
                "signature",
                &signature.iter().map(|&s| s as f64).collect::<Vec<_>>(),
            );
            match metric_profile(&ctx.model, &basis) {
                Err(e) => b.error(e.to_string()),
                Ok(profile) => {
                    b.matrix("profile-g", &profile.g);
                    let check = profile.pattern_check();
                    let diag = if ctx.model.is_positive() {
                        check.max_positive_diagonal_deviation
                    } else {
                        check.max_unit_diagonal_deviation
                    };
                    b.check(
                        "above-diagonal",
                        check.max_above_diagonal,
                        pat_tol,
                        "<=",
                        true,
                    );
                    b.check("unit-diagonal-deviation", diag, pat_tol, "<=", true);
                    b.check(
                        "span-preservation",
                        span_preservation_residual(&ctx.basis, &basis),
                        pat_tol,
                        "<=",
                        true,
                    );
                }
            }
        }
    }
    b.finish()
}

pub fn profile(ctx: &CommandContext) -> Report {
    let method = ctx.effective_method();
    let mut b = ctx.builder("profile", &method.to_string());
    b.matrix("basis-rows", &basis_rows(&ctx.basis));
    // Finite differencing carries O(h^2) error in second derivatives, so the
    // pattern assertion loosens to 1e-5 on that path.
    let default_tol = match method {
        Method::FiniteDifference => 1e-5,
        _ => 1e-8,
    };
    let pat_tol = ctx
        .tol_override
        .or(ctx.tolerances().pattern)
        .unwrap_or(default_tol);
    match metric_profile_opts(&ctx.model, &ctx.basis, method, &DiffOptions::default()) {
        Err(e) => b.error(e.to_string()),
        Ok(profile) => {
            for (k, p) in profile.p.iter().enumerate() {
                b.matrix(&format!("p-{k}"), p);
            }
            b.matrix("profile-g", &profile.g);
            let check = profile.pattern_check();
            let diag = if ctx.model.is_positive() {
                check.max_positive_diagonal_deviation
            } else {
                check.max_unit_diagonal_deviation
            };
            b.row(
                "diagonal-signs",
                &check
                    .diagonal_signs
                    .iter()
                    .map(|&s| s as f64)
                    .collect::<Vec<_>>(),
            );
            b.check(
                "above-diagonal",
                check.max_above_diagonal,
                pat_tol,
                "<=",
                true,
            );
            b.check("unit-diagonal-deviation", diag, pat_tol, "<=", true);
        }
    }
    b.finish()
}

pub fn motions(ctx: &CommandContext) -> Report {
    algebra_command(ctx, "motions", false)
}

pub fn quasimotions(ctx: &CommandContext) -> Report {
    algebra_command(ctx, "quasimotions", true)
}

fn algebra_command(ctx: &CommandContext, name: &str, quasi: bool) -> Report {
    let mut b = ctx.builder(name, &preferred_method(&ctx.model).to_string());
    let res_tol = ctx.residual_tol();
    match orthonormalize(ctx) {
        Err(e) => b.error(e.to_string()),
        Ok((basis, _, _)) => {
            b.matrix("orthonormal-basis-rows", &basis_rows(&basis));
            let assembled = if quasi {
                assemble_quasimotion_constraints(&ctx.model, &basis)
            } else {
                assemble_motion_constraints(&ctx.model, &basis)
            };
            match assembled {
                Err(e) => b.error(e.to_string()),
                Ok(sys) => {
                    let algebra = solve_lie_algebra(&sys);
                    b.value("dimension", algebra.dimension as f64);
                    b.row("singular-values", &algebra.singular_values);
                    b.check("cartan-health", sys.cartan_max_abs(), 1e-6, "<=", false);
                    for (k, gen) in algebra.generators.iter().enumerate() {
                        b.matrix(&format!("generator-{k}"), gen.coefficients());
                        let res = constraint_residual(&sys, gen)
                            .expect("solved generator fits the system");
                        b.check(&format!("generator-{k}-residual"), res, res_tol, "<=", true);
                    }
                    if quasi {
                        match assemble_motion_constraints(&ctx.model, &basis)
                            .and_then(|motion_sys| compare_algebras(&motion_sys, &sys))
                        {
                            Err(e) => b.error(e.to_string()),
                            Ok(cmp) => {
                                b.value("motion-dimension", cmp.dim_a as f64);
                                b.check(
                                    "dimension-difference",
                                    (cmp.dim_a as f64 - cmp.dim_b as f64).abs(),
                                    0.0,
                                    "<=",
                                    true,
                                );
                                if let Some(angle) = cmp.largest_principal_angle {
                                    b.check(
                                        "largest-principal-angle",
                                        angle,
                                        ctx.angle_tol(),
                                        "<=",
                                        true,
                                    );
                                }
                                b.value("equivalent", if cmp.equivalent { 1.0 } else { 0.0 });
                            }
                        }
                    }
                }
            }
        }
    }
    b.finish()
}

pub fn drift(ctx: &CommandContext) -> Report {
    let mut b = ctx.builder("drift", &preferred_method(&ctx.model).to_string());
    let ladder = [1e-2, 1e-3, 1e-4];
    let order_bound = ctx.tol_override.unwrap_or(1.9);
    match orthonormalize(ctx) {
        Err(e) => b.error(e.to_string()),
        Ok((basis, _, _)) => {
            b.matrix("orthonormal-basis-rows", &basis_rows(&basis));
            b.row("eps-ladder", &ladder);
            match assemble_motion_constraints(&ctx.model, &basis) {
                Err(e) => b.error(e.to_string()),
                Ok(sys) => {
                    let algebra = solve_lie_algebra(&sys);
                    b.value("dimension", algebra.dimension as f64);
                    for (k, gen) in algebra.generators.iter().enumerate() {
                        match fit_drift_order(&ctx.model, &basis, gen, &ladder) {
                            Err(e) => b.error(format!("generator {k}: {e}")),
                            Ok(report) => {
                                b.row(&format!("generator-{k}-deviations"), &report.deviations);
                                match report.fitted_order {
                                    Some(order) => {
                                        b.check(
                                            &format!("generator-{k}-drift-order"),
                                            order,
                                            order_bound,
                                            ">=",
                                            true,
                                        );
                                    }
                                    None => {
                                        b.value(&format!("generator-{k}-exact-preservation"), 1.0)
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    b.finish()
}

pub fn bracket(ctx: &CommandContext) -> Report {
    let mut b = ctx.builder("bracket", &preferred_method(&ctx.model).to_string());
    // Closure under the bracket is provable only when the metric is constant;
    // for direction-dependent norms the residuals are observables.
    let constant_metric = matches!(
        ctx.model.kind(),
        NormKind::Euclidean | NormKind::PseudoEuclidean { .. }
    );
    let res_tol = ctx.tol_override.unwrap_or(1e-10);
    match orthonormalize(ctx) {
        Err(e) => b.error(e.to_string()),
        Ok((basis, _, _)) => {
            b.matrix("orthonormal-basis-rows", &basis_rows(&basis));
            match assemble_motion_constraints(&ctx.model, &basis) {
                Err(e) => b.error(e.to_string()),
                Ok(sys) => {
                    let algebra = solve_lie_algebra(&sys);
                    b.value("dimension", algebra.dimension as f64);
                    b.value("asserted", if constant_metric { 1.0 } else { 0.0 });
                    let d = algebra.dimension;
                    let mut table = DMatrix::zeros(d, d);
                    for i in 0..d {
                        for j in 0..d {
                            let report = bracket_with_residual(
                                &sys,
                                &algebra.generators[i],
                                &algebra.generators[j],
                            )
                            .expect("matching dimensions");
                            table[(i, j)] = report.residual;
                            if i < j {
                                b.check(
                                    &format!("bracket-{i}-{j}-residual"),
                                    report.residual,
                                    res_tol,
                                    "<=",
                                    constant_metric,
                                );
                            }
                        }
                    }
                    if d > 0 {
                        b.matrix("bracket-residuals", &table);
                    }
                }
            }
        }
    }
    b.finish()
}
