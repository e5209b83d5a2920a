use obtuse::revsurface::{asymptotic_profile, make_surface, Family};

fn main() -> obtuse::Result<()> {
    for a in [0.0, 0.5, 1.0, 3f64.sqrt(), 3.0] {
        let p = asymptotic_profile(&make_surface(Family::Hyperboloid { a })?)?;
        println!(
            "a = {a:.4}: m' -> {:.8}, total curvature {:.8} (quadrature {:.8}), boundary {:.8}, v_inf {:.8}",
            p.m_prime_limit, p.total_curvature, p.curvature_quadrature, p.ideal_boundary_length, p.v_inf
        );
    }
    Ok(())
}
