use obtuse::model::{comparison_angle, model_side, tangent_cone_distance, Curvature, Side, SideTriple};

fn main() -> obtuse::Result<()> {
    for k in [-1.0, 0.0, 1.0] {
        let kappa = Curvature::new(k)?;
        let c = model_side(kappa, 1.0, 1.0, std::f64::consts::FRAC_PI_2)?;
        let sides = SideTriple::new(1.0, 1.0, c, kappa)?;
        let back = comparison_angle(kappa, &sides, Side::C)?;
        println!("kappa {k:+}: hypotenuse {c:.6}, recovered angle {back:.12}");
    }
    // distance in the tangent cone of the hyperbolic plane
    let d = tangent_cone_distance(Curvature::new(-1.0)?, 2.0, 3.0, 1.0)?;
    println!("cone distance {d:.9}");
    Ok(())
}
