//! Poisson equation Δ*U = H on a cap via the surface potential.

use std::sync::Arc;

use sphaerica::harmonics::{sh_eval, synth_field};
use sphaerica::quadrature::{build_cap_grid, FieldSamples};
use sphaerica::solvers::{beltrami_fd, poisson_solve_cap, poisson_solve_cap_adaptive, Singular};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.5)?;
    let grid = Arc::new(build_cap_grid(&cap, 32, 64)?);
    let u = synth_field(1, 1, 5, 2.0)?;
    let h = u.map_degrees(|n| -((n * (n + 1)) as f64));
    let hs = FieldSamples::from_fn(grid.clone(), |x| sh_eval(&h, x));
    let xbar = cap.center().neg();
    for lat in [85.0, 75.0, 65.0] {
        let xi = UnitVector::from_lon_lat_deg(12.0, lat);
        let v = poisson_solve_cap(&cap, &hs, &xbar, &xi, Singular::subtracted(8, sh_eval(&h, &xi)))?;
        let fd = beltrami_fd(
            |x| poisson_solve_cap_adaptive(&cap, |y| sh_eval(&h, y), &xbar, x, &grid).unwrap(),
            &xi,
            1e-3,
        );
        println!("lat {lat}: U = {v:+.10}  Δ*U − H = {:+.2e}", fd - sh_eval(&h, &xi));
    }
    Ok(())
}
