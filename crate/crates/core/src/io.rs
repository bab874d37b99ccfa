//! CSV grid files: `lon_deg,lat_deg,value` or `lon_deg,lat_deg,vx,vy,vz`,
//! one row per node in grid index order, 17 significant digits.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{UnitVector, Vec3};
use crate::quadrature::{FieldSamples, QuadratureGrid, Values};

pub const SCALAR_HEADER: &str = "lon_deg,lat_deg,value";
pub const VECTOR_HEADER: &str = "lon_deg,lat_deg,vx,vy,vz";

/// Nodes must match a grid to this tolerance in |Δξ|.
pub const NODE_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvValues {
    Scalar(Vec<f64>),
    Vector(Vec<Vec3>),
}

impl CsvValues {
    pub fn len(&self) -> usize {
        match self {
            CsvValues::Scalar(v) => v.len(),
            CsvValues::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parsed rows: node coordinates in degrees and the attached values.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvField {
    pub lon_lat: Vec<(f64, f64)>,
    pub values: CsvValues,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

impl CsvField {
    pub fn scalar(nodes: &[UnitVector], values: Vec<f64>) -> Result<Self> {
        check_len(nodes.len(), values.len())?;
        Ok(CsvField {
            lon_lat: nodes.iter().map(|x| x.lon_lat_deg()).collect(),
            values: CsvValues::Scalar(values),
        })
    }

    pub fn vector(nodes: &[UnitVector], values: Vec<Vec3>) -> Result<Self> {
        check_len(nodes.len(), values.len())?;
        Ok(CsvField {
            lon_lat: nodes.iter().map(|x| x.lon_lat_deg()).collect(),
            values: CsvValues::Vector(values),
        })
    }

    pub fn from_samples(s: &FieldSamples) -> Self {
        let nodes = s.grid().nodes();
        let lon_lat = nodes.iter().map(|x| x.lon_lat_deg()).collect();
        let values = match s.values() {
            Values::Scalar(v) => CsvValues::Scalar(v.clone()),
            Values::Vector { values, .. } => CsvValues::Vector(values.clone()),
        };
        CsvField { lon_lat, values }
    }

    pub fn len(&self) -> usize {
        self.lon_lat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lon_lat.is_empty()
    }

    pub fn nodes(&self) -> Vec<UnitVector> {
        self.lon_lat
            .iter()
            .map(|&(lon, lat)| UnitVector::from_lon_lat_deg(lon, lat))
            .collect()
    }

    /// Attaches the values to `grid`, whose nodes must coincide row by row.
    pub fn to_samples(&self, grid: Arc<QuadratureGrid>) -> Result<FieldSamples> {
        check_len(grid.len(), self.len())?;
        for (i, (a, b)) in self.nodes().iter().zip(grid.nodes()).enumerate() {
            let d = (a.into_vec() - b.into_vec()).norm();
            if d > NODE_MATCH_TOL {
                return Err(Error::Csv(format!(
                    "row {}: node does not match grid node {i} (|d| = {d:e})",
                    i + 1
                )));
            }
        }
        match &self.values {
            CsvValues::Scalar(v) => FieldSamples::scalar(grid, v.clone()),
            CsvValues::Vector(v) => FieldSamples::vector(grid, v.clone(), false),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        match &self.values {
            CsvValues::Scalar(v) => {
                s.push_str(SCALAR_HEADER);
                s.push('\n');
                for (&(lon, lat), x) in self.lon_lat.iter().zip(v) {
                    let _ = writeln!(s, "{},{},{}", fmt(lon), fmt(lat), fmt(*x));
                }
            }
            CsvValues::Vector(v) => {
                s.push_str(VECTOR_HEADER);
                s.push('\n');
                for (&(lon, lat), x) in self.lon_lat.iter().zip(v) {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        fmt(lon),
                        fmt(lat),
                        fmt(x.x),
                        fmt(x.y),
                        fmt(x.z)
                    );
                }
            }
        }
        s
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

fn node_key(lon: f64, lat: f64) -> (i64, i64, i64) {
    let v = UnitVector::from_lon_lat_deg(lon, lat).into_vec();
    let q = |c: f64| (c * 1e11).round() as i64;
    (q(v.x), q(v.y), q(v.z))
}

pub fn parse_field_csv(text: &str) -> Result<CsvField> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Csv("empty file".into()))?
        .trim_end_matches('\r');
    let width = match header {
        SCALAR_HEADER => 3,
        VECTOR_HEADER => 5,
        h => return Err(Error::Csv(format!("unknown header '{h}'"))),
    };
    let mut lon_lat = Vec::new();
    let mut scalars = Vec::new();
    let mut vectors = Vec::new();
    let mut seen = HashSet::new();
    for (k, line) in lines.enumerate() {
        let row = k + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::Csv(format!(
                "row {row}: expected {width} fields, found {}",
                fields.len()
            )));
        }
        let mut x = [0.0; 5];
        for (slot, f) in x.iter_mut().zip(&fields) {
            *slot = f
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Csv(format!("row {row}: cannot parse '{f}'")))?;
            if !slot.is_finite() {
                return Err(Error::Csv(format!("row {row}: non-finite value '{f}'")));
            }
        }
        let (lon, lat) = (x[0], x[1]);
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Csv(format!("row {row}: latitude {lat} out of range")));
        }
        if !seen.insert(node_key(lon, lat)) {
            return Err(Error::Csv(format!("row {row}: duplicate node ({lon}, {lat})")));
        }
        lon_lat.push((lon, lat));
        if width == 3 {
            scalars.push(x[2]);
        } else {
            vectors.push(Vec3::new(x[2], x[3], x[4]));
        }
    }
    let values = if width == 3 {
        CsvValues::Scalar(scalars)
    } else {
        CsvValues::Vector(vectors)
    };
    Ok(CsvField { lon_lat, values })
}

pub fn load_field_csv(path: impl AsRef<Path>) -> Result<CsvField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_field_csv(&text)
}

pub fn write_field_csv(path: impl AsRef<Path>, field: &CsvField) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, field.to_csv_string())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn save_field_csv(path: impl AsRef<Path>, samples: &FieldSamples) -> Result<()> {
    write_field_csv(path, &CsvField::from_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip_is_byte_identical() {
        let text = "lon_deg,lat_deg,value\n\
            1.0000000000000000e1,2.0000000000000000e1,3.1415926535897931e0\n\
            -4.5000000000000000e1,-1.2500000000000000e1,-1.5000000000000000e-3\n\
            1.7900000000000000e2,8.9000000000000000e1,0.0000000000000000e0\n";
        let f = parse_field_csv(text).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.to_csv_string(), text);
    }

    #[test]
    fn zero_vector_accepted() {
        let f = parse_field_csv("lon_deg,lat_deg,vx,vy,vz\n0,0,0,0,0\n").unwrap();
        assert_eq!(f.values, CsvValues::Vector(vec![Vec3::zeros()]));
    }

    #[test]
    fn nan_rejected_with_row() {
        let e = parse_field_csv("lon_deg,lat_deg,value\n0,0,1\n10,0,NaN\n").unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
    }

    #[test]
    fn duplicates_rejected() {
        let e = parse_field_csv("lon_deg,lat_deg,value\n0,90,1\n45,90,2\n").unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{e}");
        assert!(parse_field_csv("lon_deg,lat_deg,value\n0,0,1\n360,0,2\n").is_err());
    }

    #[test]
    fn empty_field_is_header_only() {
        let f = CsvField::scalar(&[], vec![]).unwrap();
        assert_eq!(f.to_csv_string(), "lon_deg,lat_deg,value\n");
        assert!(parse_field_csv(&f.to_csv_string()).unwrap().is_empty());
    }

    #[test]
    fn schema_mismatch() {
        assert!(parse_field_csv("lon,lat,value\n").is_err());
        assert!(parse_field_csv("lon_deg,lat_deg,value\n0,0\n").is_err());
    }
}
