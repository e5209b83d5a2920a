use std::f64::consts::PI;

use obtuse::flatcone::{cone_connect, cone_distance, cone_obtuse_inf_exact, FlatCone};

fn main() -> obtuse::Result<()> {
    let cone = FlatCone::new(PI / 2.0)?;
    let p = cone.point(1.0, 0.0)?;
    let q = cone.point(2.0, 1.0)?;
    println!("distance {:.9}", cone_distance(&cone, &p, &q));

    // half the link apart: one segment on each side
    let c = cone_connect(&cone, &cone.point(1.0, 0.0)?, &cone.point(1.0, PI / 4.0)?)?;
    println!("tie: {} minimal segments, distance {:.9}", c.directions.len(), c.distance);

    let ob = cone_obtuse_inf_exact(&cone, &p, &q)?;
    println!("exact ob_inf: angle {:.9}, comparison {:.9}", ob.angle, ob.comparison);
    println!("v_inf {:.6}, total curvature {:.6}", cone.v_inf(), cone.total_curvature());
    Ok(())
}
