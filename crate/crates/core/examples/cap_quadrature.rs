//! Gauss–trapezoid product rules on caps and the sphere.

use sphaerica::harmonics::sh_basis;
use sphaerica::quadrature::{build_boundary_grid, build_cap_grid, build_sphere_grid};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(-40.0, 10.0), 0.3)?;
    for (nt, nphi) in [(4, 8), (8, 16), (16, 32)] {
        let g = build_cap_grid(&cap, nt, nphi)?;
        let area: f64 = g.weights().iter().sum();
        let zeta = cap.center();
        let m = g.integrate_fn(|x| (x.dot(&zeta)).powi(6));
        println!("{nt:>3}x{nphi:<3} area err {:.2e}   ∫(ξ·ζ)^6 = {m:.15}", (area - 2.0 * std::f64::consts::PI * 0.3).abs());
    }
    let s = build_sphere_grid(16, 32)?;
    let norm = s.integrate_fn(|x| sh_basis(7, 5, x).powi(2));
    println!("‖Y_7,5‖² on (16,32) = {norm:.15}");
    let b = build_boundary_grid(&cap, 64)?;
    let len = b.integrate_fn(|_| 1.0);
    println!("boundary length     = {len:.15} (2π√(ρ(2−ρ)) = {:.15})", 2.0 * std::f64::consts::PI * (0.3f64 * 1.7).sqrt());
    Ok(())
}
