//! Mean dynamic topography from a synthetic geostrophic velocity field.

use std::sync::Arc;

use sphaerica::apps::{geo_forward, geo_reconstruct, PhysicalConstants};
use sphaerica::harmonics::{sh_eval, synth_field};
use sphaerica::quadrature::build_cap_grid;
use sphaerica::solvers::interior_probes;
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(165.0, 40.0), 0.1)?;
    let grid = Arc::new(build_cap_grid(&cap, 120, 240)?);
    let k = PhysicalConstants { radius: 6.371e6, gm: 3.986e14, omega: 7.292e-5, gravity: 9.81 };
    let h = synth_field(11, 3, 25, 2.0)?;
    let (hs, v) = geo_forward(&h, &grid, &k)?;
    let area: f64 = grid.weights().iter().sum();
    let hv = hs.as_scalar()?;
    let mean = grid.sum_weighted(|i, _| hv[i]) / area;
    let probes = interior_probes(&cap, 0.8, 16, 32)?;
    let exact: Vec<f64> = probes.iter().map(|x| sh_eval(&h, x)).collect();
    let vmax = v.as_vector()?.iter().fold(0.0f64, |a, w| a.max(w.norm()));
    println!("max |v| = {vmax:.3e}");
    for j in [6, 10, 15] {
        let r = geo_reconstruct(&v, j, mean, &probes, &k)?.with_oracle(exact.clone());
        println!("J = {j:>2}: relative ℓ² {:.3e}", r.rel_l2_error.unwrap());
    }
    Ok(())
}
