//! Writing and reading grid CSV files.

use std::sync::Arc;

use sphaerica::harmonics::sh_basis;
use sphaerica::io::{load_field_csv, save_field_csv};
use sphaerica::quadrature::{build_cap_grid, FieldSamples};
use sphaerica::{SphericalCap, UnitVector};

fn main() -> sphaerica::Result<()> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(10.0, 45.0), 0.2)?;
    let grid = Arc::new(build_cap_grid(&cap, 4, 8)?);
    let f = FieldSamples::from_fn(grid.clone(), |x| sh_basis(3, 2, x));
    let dir = std::env::temp_dir().join("sphaerica-csv-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("y32.csv");
    save_field_csv(&path, &f)?;
    let back = load_field_csv(&path)?.to_samples(grid)?;
    assert_eq!(back.as_scalar()?, f.as_scalar()?);
    println!("{}", std::fs::read_to_string(&path)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("... {} rows round-tripped exactly via {}", f.len(), path.display());
    Ok(())
}
