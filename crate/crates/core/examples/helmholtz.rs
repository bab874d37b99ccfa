//! Helmholtz decomposition of a sampled vector field, on the sphere and on a cap.

use std::sync::Arc;

use sphaerica::decomposition::{
    helmholtz_compose, helmholtz_decompose_cap, helmholtz_decompose_sphere, HelmholtzScalars,
};
use sphaerica::harmonics::{sh_eval, synth_field};
use sphaerica::quadrature::{build_boundary_grid, build_cap_grid, build_sphere_grid, FieldSamples};
use sphaerica::{SphericalCap, UnitVector, Vec3};

fn main() -> sphaerica::Result<()> {
    let c: Vec<_> = (0..3).map(|k| synth_field(20 + k, 1, 4, 1.0)).collect::<Result<_, _>>()?;
    let s = HelmholtzScalars::spectral(c[0].clone(), c[1].clone(), c[2].clone());

    let grid = Arc::new(build_sphere_grid(48, 96)?);
    let f = FieldSamples::vector(
        grid.clone(),
        grid.nodes().iter().map(|x| helmholtz_compose(&s, x)).collect::<Result<Vec<Vec3>, _>>()?,
        false,
    )?;
    let d = helmholtz_decompose_sphere(&f, None)?;
    let i = grid.len() / 3;
    let x = grid.nodes()[i];
    println!("sphere node {i}: F2 {:+.6} (exact {:+.6}), F3 {:+.6} (exact {:+.6})",
        d.f2.as_samples().unwrap()[i], sh_eval(&c[1], &x),
        d.f3.as_samples().unwrap()[i], sh_eval(&c[2], &x));

    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(45.0, 30.0), 0.4)?;
    let grid = Arc::new(build_cap_grid(&cap, 48, 96)?);
    let bgrid = Arc::new(build_boundary_grid(&cap, 256)?);
    let comp = |n: &[UnitVector]| n.iter().map(|x| helmholtz_compose(&s, x)).collect::<Result<Vec<Vec3>, _>>();
    let f = FieldSamples::vector(grid.clone(), comp(grid.nodes())?, false)?;
    let trace: Vec<f64> = bgrid.nodes().iter().map(|x| sh_eval(&c[2], x)).collect();
    let d = helmholtz_decompose_cap(&cap, &f, &bgrid, &comp(bgrid.nodes())?, Some(&trace), None)?;
    // Near the boundary the last Gauss rows are under-resolved; look inside.
    let i = grid.nodes().iter().position(|x| cap.depth(x) < 0.5 * cap.radius()).unwrap();
    let x = grid.nodes()[i];
    println!("cap node {i}: F3 {:+.6} (exact {:+.6})", d.f3.as_samples().unwrap()[i], sh_eval(&c[2], &x));
    Ok(())
}
