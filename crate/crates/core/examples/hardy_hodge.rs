//! Hardy–Hodge decomposition and the operator D = (−Δ* + 1/4)^{1/2}.

use std::sync::Arc;

use sphaerica::decomposition::{
    d_apply, d_inv_convolve_nodes, hardy_hodge_compose, hardy_hodge_decompose_sphere, DInvPath,
    DPower, HardyHodgeScalars, ScalarField,
};
use sphaerica::harmonics::{sh_basis, sh_eval, ShCoefficients};
use sphaerica::quadrature::{build_sphere_grid, FieldSamples};
use sphaerica::Vec3;

fn main() -> sphaerica::Result<()> {
    let grid = Arc::new(build_sphere_grid(48, 96)?);
    for n in [0, 2, 5] {
        let y = FieldSamples::from_fn(grid.clone(), |x| sh_basis(n, 1, x));
        let d = d_inv_convolve_nodes(&y)?;
        let i = grid.len() / 5;
        let spec = sh_eval(&d_apply(&ShCoefficients::single(n, 1), DPower::Inverse), &grid.nodes()[i]);
        println!("D⁻¹Y_{n},1 at node {i}: convolution {:+.8}, spectral {spec:+.8}", d[i]);
    }
    let h = HardyHodgeScalars {
        f1: ScalarField::Spectral(ShCoefficients::single(2, 3)),
        f2: ScalarField::Spectral(ShCoefficients::zeros(2)),
        f3: ScalarField::Spectral(ShCoefficients::zeros(2)),
    };
    let f = FieldSamples::vector(
        grid.clone(),
        grid.nodes().iter().map(|x| hardy_hodge_compose(&h, x)).collect::<Result<Vec<Vec3>, _>>()?,
        false,
    )?;
    let r = hardy_hodge_decompose_sphere(&f, None, DInvPath::Convolution)?;
    let i = grid.len() / 7;
    println!("õ(1)Y_2,3: F̃1 {:+.6} (exact {:+.6}), F̃2 {:+.2e}, F̃3 {:+.2e}",
        r.f1.as_samples().unwrap()[i], sh_basis(2, 3, &grid.nodes()[i]),
        r.f2.as_samples().unwrap()[i], r.f3.as_samples().unwrap()[i]);
    Ok(())
}
