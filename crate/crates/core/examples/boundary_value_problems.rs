//! Dirichlet and Neumann problems on a cap: Poisson-type integrals and the
//! second-kind boundary integral equations.

use std::sync::Arc;

use sphaerica::harmonics::InnerHarmonicSum;
use sphaerica::layers::{idp_residual, inp_residual, solve_idp, solve_inp};
use sphaerica::quadrature::{build_boundary_grid, FieldSamples};
use sphaerica::solvers::{dirichlet_solve_cap, neumann_solve_cap};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(100.0, -30.0), 0.5)?;
    let h = InnerHarmonicSum::random(cap, 5, 0, 4)?;
    let grid = Arc::new(build_boundary_grid(&cap, 256)?);
    let f: Vec<f64> = grid.nodes().iter().map(|x| h.eval(x)).collect::<Result<_, _>>()?;
    let g: Vec<f64> = grid
        .frames()
        .iter()
        .map(|p| Ok(h.grad(&p.eta)?.dot(&p.nu)))
        .collect::<sphaerica::Result<_>>()?;

    let idp = solve_idp(&grid, &f)?;
    let inp = solve_inp(&grid, &g)?;
    println!("IDP residual {:.2e}, INP residual {:.2e}", idp_residual(&idp, &f), inp_residual(&inp, &g));

    let fd = FieldSamples::scalar(grid.clone(), f)?;
    let xi = UnitVector::from_lon_lat_deg(104.0, -27.0);
    let zero = UnitVector::from_lon_lat_deg(96.0, -33.0);
    let exact = h.eval(&xi)?;
    println!("exact                {exact:+.12}");
    println!("Dirichlet integral   {:+.12}", dirichlet_solve_cap(&cap, &fd, &xi)?);
    println!("double layer (IDP)   {:+.12}", idp.eval(&xi)?);
    // Neumann data fixes U up to a constant.
    let gn = FieldSamples::scalar(grid, g)?;
    let n = neumann_solve_cap(&cap, &gn, 0.0, &xi)? - neumann_solve_cap(&cap, &gn, 0.0, &zero)?;
    let s = inp.eval(&xi)? - inp.eval(&zero)?;
    println!("U(ξ) − U(ξ0): exact {:+.12}, Neumann {n:+.12}, INP {s:+.12}", exact - h.eval(&zero)?);
    Ok(())
}
