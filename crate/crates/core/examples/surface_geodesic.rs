use obtuse::revsurface::{integrate_geodesic, make_surface, Family, GeodesicState, SurfacePoint};

fn main() -> obtuse::Result<()> {
    let s = make_surface(Family::Hyperboloid { a: 1.0 })?;
    let init = GeodesicState::from_direction(&s, SurfacePoint::new(2.0, 0.0), 1.2)?;
    let path = integrate_geodesic(&s, &init, 100.0, 1e-10)?;
    let end = path.end();
    println!("end r = {:.6}, theta = {:.6}, winding {}", end.point.r, end.point.theta, path.winding);
    println!("Clairaut drift {:.2e}, speed drift {:.2e}", path.clairaut_drift(&s), path.speed_drift(&s));

    // through the vertex: a meridian continues on the other side
    let init = GeodesicState::from_direction(&s, SurfacePoint::new(1.0, 0.0), std::f64::consts::PI)?;
    let end = integrate_geodesic(&s, &init, 2.0, 1e-10)?.end().point;
    println!("meridian through the vertex ends at r = {:.9}, theta = {:.9}", end.r, end.theta);
    Ok(())
}
