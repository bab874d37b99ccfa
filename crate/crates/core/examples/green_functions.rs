//! Fundamental solution, Kelvin reflection and the cap Green functions.

use sphaerica::geometry::{boundary_frame, reflect};
use sphaerica::kernels::{dirichlet_green, fundamental, neumann_green, Mode};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(30.0, 50.0), 0.4)?;
    let xi = UnitVector::from_lon_lat_deg(35.0, 55.0);
    let eta = UnitVector::from_lon_lat_deg(20.0, 45.0);

    println!("G(-1)            = {:.16}", fundamental(-1.0)?);
    println!("G(xi.eta)        = {:.16}", fundamental(xi.dot(&eta))?);

    let r = reflect(&cap, &xi)?;
    println!("reflection       = {:?}, scale {:.6}", r.point.lon_lat_deg(), r.scale);

    println!("G_D(xi, eta)     = {:.12}", dirichlet_green(&cap, &xi, &eta, Mode::Value)?.scalar());
    println!("G_N(xi, eta)     = {:.12}", neumann_green(&cap, &xi, &eta, Mode::Value)?.scalar());

    // G_D vanishes on the boundary, ∂_ν G_N is constant there.
    for phi in [0.0, 1.0, 2.5] {
        let b = boundary_frame(&cap, phi);
        let gd = dirichlet_green(&cap, &xi, &b.eta, Mode::Value)?.scalar();
        let gn = neumann_green(&cap, &xi, &b.eta, Mode::Normal(b.nu))?.scalar();
        println!("phi = {phi:.1}: G_D = {gd:+.2e}, dG_N/dnu = {gn:+.12}");
    }
    Ok(())
}
