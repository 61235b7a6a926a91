use finsler::{
    assemble_motion_constraints, metric_at, normalize, orthogonalize, solve_lie_algebra, Basis,
    Method, NormModel, Vector,
};

fn main() -> Result<(), finsler::FinslerError> {
    let model = NormModel::pseudo_euclidean(vec![-1, 1, 1, 1])?;

    let v = model.admissible(&Vector::from_vec(vec![2.0, 0.3, 0.1, 0.0]))?;
    let g = metric_at(&model, &v, Method::Analytic)?;
    println!("g(v) = {}", g.g);

    let basis = normalize(&model, &orthogonalize(&model, &Basis::standard(4))?)?.basis;
    let system = assemble_motion_constraints(&model, &basis)?;
    let algebra = solve_lie_algebra(&system);
    assert_eq!(algebra.dimension, 6);
    Ok(())
}
