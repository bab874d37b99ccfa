//! Limits of layer potentials across the cap boundary.

use std::sync::Arc;

use sphaerica::layers::{jump_probe, jump_resolution_floor, DensitySamples, Potential, Quantity};
use sphaerica::quadrature::build_boundary_grid;
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.5)?;
    let grid = Arc::new(build_boundary_grid(&cap, 4096)?);
    let q = DensitySamples::from_fn(grid.clone(), |p| 2.0 + (3.0 * p.phi).cos())?;
    let floor = jump_resolution_floor(&grid);
    let taus: Vec<f64> = (4..=9).map(|k| 2f64.powi(-k)).filter(|&t| t >= floor).collect();
    println!("Q(node) = {}, τ = {taus:?}", q.values()[0]);
    for (pot, quant) in [
        (Potential::Double, Quantity::Value),
        (Potential::Single, Quantity::NormalDerivative),
        (Potential::Single, Quantity::Value),
    ] {
        let r = jump_probe(pot, quant, &q, 0, &taus)?;
        println!(
            "{pot:?} {quant:?}: jump {:+.8} (order {:.2}), limits {:+.8} / {:+.8}",
            r.jump, r.observed_order, r.interior_limit, r.exterior_limit
        );
    }
    Ok(())
}
