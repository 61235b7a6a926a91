//! Property-based invariants: homogeneity of the norm families, degree-0
//! homogeneity of the metric, ring laws of the hyperdual numbers,
//! orthogonalization determinism, and solved-generator membership for random
//! signatures.

use finsler::hyperdual::Dual3;
use finsler::{
    assemble_motion_constraints, constraint_residual, is_orthogonal, metric_at, orthogonalize,
    solve_lie_algebra, Basis, Method, MonomialTerm, NormModel, Vector,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn quartic(n: usize) -> NormModel {
    let mut terms = Vec::new();
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] = 4;
        terms.push(MonomialTerm::new(1.5, e));
        for j in (i + 1)..n {
            let mut e = vec![0u32; n];
            e[i] = 2;
            e[j] = 2;
            terms.push(MonomialTerm::new(2.0, e));
        }
    }
    NormModel::mth_root(n, 4, terms).unwrap()
}

fn randers3() -> NormModel {
    NormModel::randers(
        DMatrix::identity(3, 3),
        DVector::from_vec(vec![0.3, 0.2, 0.1]),
    )
    .unwrap()
}

fn builtin_models() -> Vec<NormModel> {
    vec![
        NormModel::euclidean(3).unwrap(),
        NormModel::pseudo_euclidean(vec![-1, 1, 1]).unwrap(),
        randers3(),
        quartic(3),
    ]
}

fn component() -> impl Strategy<Value = f64> {
    -3.0f64..3.0f64
}

fn vector3() -> impl Strategy<Value = Vector> {
    proptest::collection::vec(component(), 3).prop_map(Vector::from_vec)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(192))]

    /// F^2(lambda v) = lambda^2 F^2(v) for every built-in family.
    #[test]
    fn squared_norm_is_degree_two_homogeneous(v in vector3(), lambda in 0.1f64..10.0) {
        for model in builtin_models() {
            prop_assume!(v.norm() > 1e-2);
            let Ok(f2) = model.evaluate_f2(&v) else { continue };
            prop_assume!(f2.abs() > 1e-6);
            let r = model.homogeneity_residual(&v, lambda).unwrap();
            prop_assert!(r <= 1e-10, "residual {r:.3e} for {}", model.describe());
        }
    }

    /// g(lambda v) = g(v): the metric is degree-0 homogeneous.
    #[test]
    fn metric_is_degree_zero_homogeneous(v in vector3(), lambda in 0.1f64..10.0) {
        for model in builtin_models() {
            prop_assume!(v.norm() > 1e-2);
            let Ok(f2) = model.evaluate_f2(&v) else { continue };
            prop_assume!(f2.abs() > 1e-3 * v.norm_squared());
            let dir = model.admissible(&v).unwrap();
            let scaled = model.admissible(&(&v * lambda)).unwrap();
            let g1 = match metric_at(&model, &dir, Method::Hyperdual) {
                Ok(t) => t.g,
                Err(_) => continue,
            };
            let g2 = metric_at(&model, &scaled, Method::Hyperdual).unwrap().g;
            let dev = (&g1 - &g2).amax() / g1.amax().max(1.0);
            prop_assert!(dev <= 1e-10, "deviation {dev:.3e} for {}", model.describe());
        }
    }

    /// Hyperdual multiplication distributes over addition and commutes.
    #[test]
    fn hyperdual_ring_laws(a in proptest::collection::vec(component(), 8),
                           b in proptest::collection::vec(component(), 8),
                           c in proptest::collection::vec(component(), 8)) {
        let build = |v: &[f64]| {
            let mut d = Dual3::constant(v[0]);
            for (mask, &x) in v.iter().enumerate().skip(1) {
                d += Dual3::from_component(mask, x);
            }
            d
        };
        let (da, db, dc) = (build(&a), build(&b), build(&c));
        let left = (da + db) * dc;
        let right = da * dc + db * dc;
        for mask in 0..8 {
            prop_assert!((left.component(mask) - right.component(mask)).abs() <= 1e-9);
            let ab = da * db;
            let ba = db * da;
            prop_assert!((ab.component(mask) - ba.component(mask)).abs() <= 1e-9);
        }
    }

    /// Orthogonalization is deterministic and produces an orthogonal set.
    #[test]
    fn orthogonalization_determinism_and_output(entries in proptest::collection::vec(component(), 9)) {
        let vectors: Vec<Vector> =
            (0..3).map(|k| Vector::from_vec(entries[3 * k..3 * k + 3].to_vec())).collect();
        let Ok(input) = Basis::new(vectors) else { return Ok(()) };
        // Keep the solves well posed.
        let m = input.matrix();
        let svd = m.svd(false, false);
        prop_assume!(svd.singular_values.min() > 1e-2 * svd.singular_values.max());

        for model in [NormModel::euclidean(3).unwrap(), randers3()] {
            let once = orthogonalize(&model, &input).unwrap();
            let twice = orthogonalize(&model, &input).unwrap();
            prop_assert_eq!(once.matrix(), twice.matrix(), "bitwise determinism");
            for i in 0..3 {
                let dir = model.admissible(&once.vectors()[i]).unwrap();
                for j in (i + 1)..3 {
                    prop_assert!(is_orthogonal(&model, &dir, &once.vectors()[j], 1e-8).unwrap());
                }
            }
        }
    }

    /// For a random constant diagonal metric the solved generators satisfy
    /// the system and the dimension is n(n-1)/2.
    #[test]
    fn solved_generators_satisfy_random_signature_systems(bits in 0u8..32, n in 2usize..=5) {
        let signature: Vec<i8> = (0..n).map(|k| if bits & (1 << k) != 0 { -1 } else { 1 }).collect();
        let model = NormModel::pseudo_euclidean(signature).unwrap();
        let sys = assemble_motion_constraints(&model, &Basis::standard(n)).unwrap();
        let algebra = solve_lie_algebra(&sys);
        prop_assert_eq!(algebra.dimension, n * (n - 1) / 2);
        for gen in &algebra.generators {
            let res = constraint_residual(&sys, gen).unwrap();
            prop_assert!(res <= 1e-10, "residual {res:.3e}");
        }
    }
}
