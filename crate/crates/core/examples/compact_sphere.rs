use obtuse::invariants::{obtuse_compact, PairLadder, QueryTemplate, SurfaceSpace, Variant};
use obtuse::revsurface::{compact_extents, make_surface, Family};

fn main() -> obtuse::Result<()> {
    let s = make_surface(Family::Sphere)?;
    let ext = compact_extents(&s, 12)?;
    println!("diameter {:.6}, radius {:.6}, area {:.6}, v~ {:.6}", ext.diameter, ext.radius, ext.area, ext.normalized_volume);

    let space = SurfaceSpace::new(s).with_radius(ext.radius);
    let ladder = PairLadder {
        separations: vec![0.1],
        pairs_per_separation: 3,
    };
    let est = obtuse_compact(&space, &ladder, &QueryTemplate::new(vec![1.0]), Variant::Angle)?;
    println!("ob(M) ~ {:.9}", est.value);
    Ok(())
}
