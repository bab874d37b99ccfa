//! Disturbing potential from synthetic deflections of the vertical.

use std::sync::Arc;

use sphaerica::apps::{vd_forward, vd_reconstruct, PhysicalConstants};
use sphaerica::harmonics::{sh_eval, synth_field};
use sphaerica::quadrature::build_cap_grid;
use sphaerica::solvers::interior_probes;
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(-60.0, -15.0), 0.2)?;
    let grid = Arc::new(build_cap_grid(&cap, 120, 240)?);
    let k = PhysicalConstants::default();
    let t = synth_field(7, 3, 25, 2.0)?;
    let (ts, theta) = vd_forward(&t, &grid, &k)?;
    let area: f64 = grid.weights().iter().sum();
    let v = ts.as_scalar()?;
    let mean = grid.sum_weighted(|i, _| v[i]) / area;
    let probes = interior_probes(&cap, 0.8, 16, 32)?;
    let exact: Vec<f64> = probes.iter().map(|x| sh_eval(&t, x)).collect();
    for j in [6, 10, 15] {
        let r = vd_reconstruct(&theta, j, mean, &probes, &k)?.with_oracle(exact.clone());
        println!("J = {j:>2}: relative ℓ² {:.3e}, sup {:.3e}", r.rel_l2_error.unwrap(), r.sup_error.unwrap());
    }
    Ok(())
}
