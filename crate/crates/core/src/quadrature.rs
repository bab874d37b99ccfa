//! Product Gauss–Legendre × uniform-longitude rules on caps and the sphere,
//! trapezoidal rules on cap boundaries, and reproducible summation.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{boundary_frame_with, BoundaryPoint, SphericalCap, UnitVector, Vec3};

/// Tangency tolerance for vector samples, relative to max(1, |v|).
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    CapArea(SphericalCap),
    SphereArea,
    BoundaryLine(SphericalCap),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridShape {
    Product { n_t: usize, n_phi: usize },
    Curve { m: usize },
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    kind: GridKind,
    shape: GridShape,
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
    frames: Vec<BoundaryPoint>,
}

impl QuadratureGrid {
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Boundary frames; empty for area grids.
    pub fn frames(&self) -> &[BoundaryPoint] {
        &self.frames
    }

    pub fn cap(&self) -> Option<SphericalCap> {
        match self.kind {
            GridKind::CapArea(c) | GridKind::BoundaryLine(c) => Some(c),
            GridKind::SphereArea => None,
        }
    }

    /// Typical node spacing in radians (polar spacing for area grids, arc step
    /// for boundary grids).
    pub fn spacing(&self) -> f64 {
        match (self.kind, self.shape) {
            (GridKind::CapArea(cap), GridShape::Product { n_t, .. }) => {
                cap.angular_radius() / n_t as f64
            }
            (GridKind::SphereArea, GridShape::Product { n_t, .. }) => PI / n_t as f64,
            (GridKind::BoundaryLine(cap), GridShape::Curve { m }) => 2.0 * PI * cap.s() / m as f64,
            _ => unreachable!("grid kind and shape disagree"),
        }
    }

    /// Σ wᵢ f(ηᵢ), with node evaluations in parallel and a fixed-order reduction.
    pub fn integrate_fn<F>(&self, f: F) -> f64
    where
        F: Fn(&UnitVector) -> f64 + Sync,
    {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(n, w)| w * f(n))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_fn_vec<F>(&self, f: F) -> Vec3
    where
        F: Fn(&UnitVector) -> Vec3 + Sync,
    {
        let terms: Vec<Vec3> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(n, w)| *w * f(n))
            .collect();
        pairwise_sum_vec(&terms)
    }

    /// Boundary integral with access to the full frame at each node.
    pub fn integrate_boundary<F>(&self, f: F) -> f64
    where
        F: Fn(&BoundaryPoint) -> f64 + Sync,
    {
        assert!(!self.frames.is_empty(), "not a boundary grid");
        let terms: Vec<f64> = self
            .frames
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(b, w)| w * f(b))
            .collect();
        pairwise_sum(&terms)
    }

    /// Sequential variant of [`integrate_fn`](Self::integrate_fn) for use
    /// inside already-parallel loops.
    pub fn sum_weighted<F>(&self, mut f: F) -> f64
    where
        F: FnMut(usize, &UnitVector) -> f64,
    {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| self.weights[i] * f(i, n))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on the three-term recurrence.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn product_grid(
    kind: GridKind,
    zeta: UnitVector,
    lo: f64,
    hi: f64,
    n_t: usize,
    n_phi: usize,
) -> QuadratureGrid {
    let (x, w) = gauss_legendre(n_t);
    let frame = crate::geometry::rotation_to_pole(&zeta);
    let (e1, e2, e3) = (frame.col(0), frame.col(1), frame.col(2));
    let half = 0.5 * (hi - lo);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_t * n_phi);
    let mut weights = Vec::with_capacity(n_t * n_phi);
    for (xi, wi) in x.iter().zip(&w) {
        // depth 1 − t (hi = 1 for every grid built here) keeps sin θ accurate near the pole
        let depth = (1.0 - hi) + half * (1.0 - xi);
        let t = 1.0 - depth;
        let sin_t = (depth * (2.0 - depth)).max(0.0).sqrt();
        for j in 0..n_phi {
            let (sp, cp) = (j as f64 * dphi).sin_cos();
            nodes.push(UnitVector::new(t * e3 + sin_t * (cp * e1 + sp * e2)));
            weights.push(wi * half * dphi);
        }
    }
    QuadratureGrid {
        kind,
        shape: GridShape::Product { n_t, n_phi },
        nodes,
        weights,
        frames: Vec::new(),
    }
}

pub fn build_cap_grid(cap: &SphericalCap, n_t: usize, n_phi: usize) -> Result<QuadratureGrid> {
    check_product(n_t, n_phi)?;
    Ok(product_grid(
        GridKind::CapArea(*cap),
        cap.center(),
        1.0 - cap.radius(),
        1.0,
        n_t,
        n_phi,
    ))
}

pub fn build_sphere_grid(n_t: usize, n_phi: usize) -> Result<QuadratureGrid> {
    check_product(n_t, n_phi)?;
    Ok(product_grid(
        GridKind::SphereArea,
        UnitVector::e3(),
        -1.0,
        1.0,
        n_t,
        n_phi,
    ))
}

fn check_product(n_t: usize, n_phi: usize) -> Result<()> {
    if n_t < 2 || n_phi < 4 {
        return Err(Error::InvalidParameter(format!(
            "grid needs n_t >= 2 and n_phi >= 4, got ({n_t}, {n_phi})"
        )));
    }
    Ok(())
}

pub fn build_boundary_grid(cap: &SphericalCap, m: usize) -> Result<QuadratureGrid> {
    build_boundary_grid_offset(cap, m, 0.0)
}

/// Boundary grid with nodes at φ = 2π(j + offset)/m.
pub fn build_boundary_grid_offset(
    cap: &SphericalCap,
    m: usize,
    offset: f64,
) -> Result<QuadratureGrid> {
    if m < 8 {
        return Err(Error::InvalidParameter(format!(
            "boundary grid needs m >= 8, got {m}"
        )));
    }
    let frame = cap.frame();
    let frames: Vec<BoundaryPoint> = (0..m)
        .map(|j| boundary_frame_with(cap, &frame, 2.0 * PI * (j as f64 + offset) / m as f64))
        .collect();
    let w = 2.0 * PI * cap.s() / m as f64;
    Ok(QuadratureGrid {
        kind: GridKind::BoundaryLine(*cap),
        shape: GridShape::Curve { m },
        nodes: frames.iter().map(|b| b.eta).collect(),
        weights: vec![w; m],
        frames,
    })
}

/// Pairwise (tree) summation in index order.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

pub fn pairwise_sum_vec(x: &[Vec3]) -> Vec3 {
    if x.len() <= 16 {
        return x.iter().fold(Vec3::zeros(), |a, b| a + b);
    }
    let mid = x.len() / 2;
    pairwise_sum_vec(&x[..mid]) + pairwise_sum_vec(&x[mid..])
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Scalar(Vec<f64>),
    Vector { values: Vec<Vec3>, tangential: bool },
}

/// Scalar or vector values co-indexed with a grid.
#[derive(Debug, Clone)]
pub struct FieldSamples {
    grid: Arc<QuadratureGrid>,
    values: Values,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    Scalar(f64),
    Vector(Vec3),
}

impl Integral {
    pub fn scalar(self) -> f64 {
        match self {
            Integral::Scalar(v) => v,
            Integral::Vector(_) => panic!("vector integral used as scalar"),
        }
    }

    pub fn vector(self) -> Vec3 {
        match self {
            Integral::Vector(v) => v,
            Integral::Scalar(_) => panic!("scalar integral used as vector"),
        }
    }
}

impl FieldSamples {
    pub fn scalar(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(FieldSamples {
            grid,
            values: Values::Scalar(values),
        })
    }

    /// Vector samples; with `tangential` set, every value must satisfy
    /// |v·ξ| < 1e-10·max(1, |v|).
    pub fn vector(grid: Arc<QuadratureGrid>, values: Vec<Vec3>, tangential: bool) -> Result<Self> {
        check_len(&grid, values.len())?;
        if tangential {
            for (i, (v, n)) in values.iter().zip(grid.nodes()).enumerate() {
                let r = v.dot(n).abs();
                if !(r < TANGENCY_TOL * v.norm().max(1.0)) {
                    return Err(Error::NotTangential {
                        index: i,
                        residual: r,
                    });
                }
            }
        }
        Ok(FieldSamples {
            grid,
            values: Values::Vector { values, tangential },
        })
    }

    pub fn from_fn<F>(grid: Arc<QuadratureGrid>, f: F) -> Self
    where
        F: Fn(&UnitVector) -> f64 + Sync,
    {
        let values = grid.nodes().par_iter().map(&f).collect();
        FieldSamples {
            grid,
            values: Values::Scalar(values),
        }
    }

    /// Samples a vector field and projects it onto the tangent plane.
    pub fn tangential_from_fn<F>(grid: Arc<QuadratureGrid>, f: F) -> Self
    where
        F: Fn(&UnitVector) -> Vec3 + Sync,
    {
        let values = grid
            .nodes()
            .par_iter()
            .map(|n| {
                let v = f(n);
                v - v.dot(n) * n.into_vec()
            })
            .collect();
        FieldSamples {
            grid,
            values: Values::Vector {
                values,
                tangential: true,
            },
        }
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn as_scalar(&self) -> Result<&[f64]> {
        match &self.values {
            Values::Scalar(v) => Ok(v),
            _ => Err(Error::WrongKind { expected: "scalar" }),
        }
    }

    pub fn as_vector(&self) -> Result<&[Vec3]> {
        match &self.values {
            Values::Vector { values, .. } => Ok(values),
            _ => Err(Error::WrongKind { expected: "vector" }),
        }
    }

    /// Vector values, failing unless the samples carry the tangency flag.
    pub fn as_tangential(&self) -> Result<&[Vec3]> {
        match &self.values {
            Values::Vector {
                values,
                tangential: true,
            } => Ok(values),
            Values::Vector { values, .. } => {
                // Validate on demand so untagged but tangential data is accepted.
                for (i, (v, n)) in values.iter().zip(self.grid.nodes()).enumerate() {
                    let r = v.dot(n).abs();
                    if !(r < TANGENCY_TOL * v.norm().max(1.0)) {
                        return Err(Error::NotTangential {
                            index: i,
                            residual: r,
                        });
                    }
                }
                Ok(values)
            }
            _ => Err(Error::WrongKind {
                expected: "tangential vector",
            }),
        }
    }
}

fn check_len(grid: &QuadratureGrid, found: usize) -> Result<()> {
    if grid.len() != found {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found,
        });
    }
    Ok(())
}

/// Σ wᵢ·valueᵢ with pairwise summation.
pub fn integrate(grid: &QuadratureGrid, samples: &FieldSamples) -> Result<Integral> {
    check_len(grid, samples.len())?;
    if !std::ptr::eq(grid, samples.grid.as_ref()) && grid.nodes() != samples.grid.nodes() {
        return Err(Error::InvalidParameter(
            "samples belong to a different grid".into(),
        ));
    }
    let w = grid.weights();
    Ok(match &samples.values {
        Values::Scalar(v) => {
            let t: Vec<f64> = v.iter().zip(w).map(|(a, b)| a * b).collect();
            Integral::Scalar(pairwise_sum(&t))
        }
        Values::Vector { values, .. } => {
            let t: Vec<Vec3> = values.iter().zip(w).map(|(a, b)| *b * a).collect();
            Integral::Vector(pairwise_sum_vec(&t))
        }
    })
}
