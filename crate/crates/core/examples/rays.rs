use std::f64::consts::PI;

use obtuse::revsurface::{make_surface, Family, RayProbe, SurfacePoint};

fn main() -> obtuse::Result<()> {
    let s = make_surface(Family::Hyperboloid { a: 1.0 })?;
    let probe = RayProbe::new(&s, SurfacePoint::new(2.0, 0.0), 50.0, 1e-3)?;
    for t in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
        println!("direction {t:.4}: ray = {}", probe.is_ray(t)?);
    }
    let m = probe.measure()?;
    println!("ray directions measure in [{:.4}, {:.4}], 2 pi / sqrt 2 = {:.4}", m.lower, m.upper, 2.0 * PI / 2f64.sqrt());
    Ok(())
}
