use obtuse::invariants::{obtuse_from_infinity, pair_obtuse, PairLadder, QueryTemplate, SurfaceSpace, Variant};
use obtuse::revsurface::{make_surface, Family, SurfacePoint};

fn main() -> obtuse::Result<()> {
    let space = SurfaceSpace::new(make_surface(Family::Hyperboloid { a: 1.0 })?);
    let template = QueryTemplate::new(vec![10.0, 100.0, 1000.0]);

    let query = template.at(SurfacePoint::new(2.0, 0.0), SurfacePoint::new(2.05, 0.02));
    for variant in [Variant::Angle, Variant::Comparison] {
        let est = pair_obtuse(&space, &query, variant)?;
        println!("pair {variant:?}: {:.9} along {:?}", est.value, est.ladder_values);
    }

    let ladder = PairLadder {
        separations: vec![0.1, 0.01],
        pairs_per_separation: 6,
    };
    let est = obtuse_from_infinity(&space, &ladder, &template, Variant::Angle)?;
    println!("ob_inf ~ {:.9} (pi/2 = {:.9}), monotone {}", est.value, std::f64::consts::FRAC_PI_2, est.monotone);
    Ok(())
}
