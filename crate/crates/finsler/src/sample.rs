//! Deterministic seeded sampling of directions and bases.
//!
//! All randomness flows through a counter-based ChaCha8 generator seeded
//! explicitly, so identical seeds reproduce identical sweeps byte for byte.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::FinslerError;
use crate::norm::{AdmissibleDirection, NormModel, Vector};
use crate::ortho::Basis;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere (normalized Gaussian vector).
pub fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// `count` unit directions admissible for the model, rejecting those with
/// `|F^2| < min_abs_f2` (near the light cone) or outside the admissible set.
pub fn admissible_directions(
    model: &NormModel,
    count: usize,
    seed: u64,
    min_abs_f2: f64,
) -> Result<Vec<AdmissibleDirection>, FinslerError> {
    let mut rng = seeded_rng(seed);
    let n = model.dimension();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = 1000 * count.max(1);
    while out.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(FinslerError::NonAdmissibleDirection(format!(
                "sampling gave up after {max_attempts} attempts; the admissible set with |F^2| >= {min_abs_f2:.1e} is too thin"
            )));
        }
        let v = unit_direction(&mut rng, n);
        let Ok(dir) = model.admissible(&v) else {
            continue;
        };
        match model.evaluate_f2(&v) {
            Ok(f2) if f2.abs() >= min_abs_f2 => out.push(dir),
            _ => continue,
        }
    }
    Ok(out)
}

/// Random basis with Gaussian entries, rejected until its condition number is
/// at most `max_condition` (keeps downstream triangular solves well posed).
pub fn random_basis(rng: &mut ChaCha8Rng, n: usize, max_condition: f64) -> Basis {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin > 0.0 && smax / smin <= max_condition {
            let vectors = (0..n).map(|k| Vector::from(m.column(k))).collect();
            if let Ok(basis) = Basis::new(vectors) {
                return basis;
            }
        }
    }
}

pub fn random_bases(n: usize, count: usize, seed: u64, max_condition: f64) -> Vec<Basis> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| random_basis(&mut rng, n, max_condition))
        .collect()
}
