//! Stream function of point vortices in a cap with the MFS boundary correction.

use sphaerica::apps::{vortex_mfs, PhysicalConstants, VortexMfs, VortexSet};
use sphaerica::solvers::interior_probes;
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.9)?;
    let v = VortexSet::random(&cap, 5, 0.8, 7)?;
    for (c, w) in v.centers.iter().zip(&v.strengths) {
        let (lon, lat) = c.lon_lat_deg();
        println!("vortex at ({lon:+8.3}, {lat:+7.3}) strength {w:+.4}");
    }
    let probes = interior_probes(&cap, 0.8, 16, 32)?;
    let k = PhysicalConstants::default();
    for (m, rb) in [(50, 0.905), (100, 0.905), (200, 0.905), (200, 0.900005)] {
        let mut o = VortexMfs::new(&cap, m);
        o.rho_bar = rb;
        let r = vortex_mfs(&cap, &v, o, &probes, &k)?;
        println!(
            "M = {m:>3}, ρ̄ = {rb}: relative max error {:.2e}",
            r.sup_error.unwrap() / r.oracle_sup().unwrap()
        );
    }
    Ok(())
}
