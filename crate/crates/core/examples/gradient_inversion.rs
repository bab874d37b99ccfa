//! Recovering a scalar from its surface gradient or surface curl gradient.

use std::sync::Arc;

use sphaerica::harmonics::{sh_eval, sh_grad_eval, synth_field};
use sphaerica::quadrature::{build_cap_grid, FieldSamples};
use sphaerica::solvers::{invert_gradient, interior_probes, DerivMode, Domain};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(0.0, 60.0), 0.3)?;
    let grid = Arc::new(build_cap_grid(&cap, 120, 240)?);
    let c = synth_field(3, 1, 8, 1.0)?;
    let grad = FieldSamples::tangential_from_fn(grid.clone(), |x| sh_grad_eval(&c, x));
    let curl = FieldSamples::tangential_from_fn(grid.clone(), |x| x.cross(&sh_grad_eval(&c, x)));
    let area: f64 = grid.weights().iter().sum();
    let mean = grid.integrate_fn(|x| sh_eval(&c, x)) / area;
    let probes = interior_probes(&cap, 0.8, 6, 12)?;
    let d = Domain::Cap(cap);
    for j in [8, 10, 12] {
        let mut eg: f64 = 0.0;
        let mut ec: f64 = 0.0;
        for x in &probes {
            let ex = sh_eval(&c, x);
            eg = eg.max((mean + invert_gradient(&d, &grad, DerivMode::Grad, j, x)? - ex).abs());
            ec = ec.max((mean + invert_gradient(&d, &curl, DerivMode::Curl, j, x)? - ex).abs());
        }
        println!("J = {j:>2}: sup error ∇* {eg:.2e}, L* {ec:.2e}");
    }
    Ok(())
}
