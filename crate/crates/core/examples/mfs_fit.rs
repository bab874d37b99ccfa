//! Method of fundamental solutions for Dirichlet data on a cap.

use std::sync::Arc;

use sphaerica::harmonics::InnerHarmonicSum;
use sphaerica::mfs::{mfs_eval, mfs_fit, DataKind, FitMode, FundamentalSystem, Variant};
use sphaerica::quadrature::build_boundary_grid;
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.6)?;
    let h = InnerHarmonicSum::random(cap, 9, 0, 3)?;
    let xi = UnitVector::from_lon_lat_deg(30.0, 60.0);
    // Plain G_k are not harmonic (Δ*G_k = −1/4π), so only the gk-mod and
    // inner-harmonic fits extend the boundary data harmonically.
    for variant in [Variant::Gk, Variant::GkMod, Variant::InnerHarmonic] {
        for m in [25, 50, 100] {
            let system = FundamentalSystem::on_circle(cap, variant, 0.7, m, true)?;
            let coll = Arc::new(build_boundary_grid(&cap, 4 * m)?);
            let f: Vec<f64> = coll.nodes().iter().map(|x| h.eval(x)).collect::<Result<_, _>>()?;
            let sol = mfs_fit(&system, &coll, &f, FitMode::Tikhonov(1e-12), DataKind::Dirichlet)?;
            println!(
                "{variant:?} M={m:>3}: residual {:.2e}, cond {:.1e}, error {:.2e}",
                sol.residual,
                sol.condition,
                (mfs_eval(&sol, &xi)? - h.eval(&xi)?).abs()
            );
        }
    }
    Ok(())
}
