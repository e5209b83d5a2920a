use obtuse::invariants::{kappa_obtuse_infinity, HalfPlaneTriangle, QueryTemplate, Space};
use obtuse::model::Curvature;

fn main() -> obtuse::Result<()> {
    let space = HalfPlaneTriangle::new();
    let pairs = space.pair_population(40, 0)?;
    let est = kappa_obtuse_infinity(&space, Curvature::new(-1.0)?, &pairs, &QueryTemplate::new(vec![4.0, 8.0, 16.0]))?;
    println!("(-1)-obtuse from infinity over {} pairs: {:?}", pairs.len(), est.ladder_values);
    Ok(())
}
