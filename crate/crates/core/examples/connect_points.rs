use obtuse::revsurface::{connect, make_surface, ConnectOptions, Family, SurfacePoint};

fn main() -> obtuse::Result<()> {
    let opts = ConnectOptions::default();
    let sphere = make_surface(Family::Sphere)?;
    let c = connect(&sphere, SurfacePoint::new(1.0, 0.0), SurfacePoint::new(2.0, 2.5), &opts)?;
    println!("sphere: distance {:.9}, directions {:?}", c.distance, c.directions);

    let hyp = make_surface(Family::Hyperboloid { a: 1.0 })?;
    // near the vertex the meridian through it is the unique shortest path
    let c = connect(&hyp, SurfacePoint::new(2.0, 0.0), SurfacePoint::new(2.0, std::f64::consts::PI), &opts)?;
    println!("hyperboloid r = 2: distance {:.9}, {} minimal geodesics", c.distance, c.directions.len());
    // far out the surface is cone-like and the vertex is avoided on both sides
    let c = connect(&hyp, SurfacePoint::new(20.0, 0.0), SurfacePoint::new(20.0, std::f64::consts::PI), &opts)?;
    println!("hyperboloid r = 20: distance {:.9}, {} minimal geodesics", c.distance, c.directions.len());
    Ok(())
}
