//! Helmholtz decomposition f = o⁽¹⁾F₁ + o⁽²⁾F₂ + o⁽³⁾F₃ (sphere and caps),
//! the operator D = (−Δ* + 1/4)^{1/2}, and the Hardy–Hodge decomposition
//! f = õ⁽¹⁾F̃₁ + õ⁽²⁾F̃₂ + õ⁽³⁾F̃₃ on the whole sphere.
//!
//! Scalars live either as node samples (from quadrature) or as spherical
//! harmonic coefficients (band-limited input, exact operators).

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix3};

use crate::geometry::{rotation_to_pole, SphericalCap, UnitVector, Vec3};
use crate::harmonics::{sh_eval, sh_grad_eval, sh_project, ShCoefficients};
use crate::kernels::KernelSpec;
use crate::quadrature::{pairwise_sum, FieldSamples, GridKind, GridShape, QuadratureGrid};
use crate::solvers::default_scale;

/// A scalar carried as node samples or as spherical harmonic coefficients.
#[derive(Debug, Clone)]
pub enum ScalarField {
    Samples(FieldSamples),
    Spectral(ShCoefficients),
}

impl ScalarField {
    pub fn eval(&self, xi: &UnitVector) -> Result<f64> {
        match self {
            ScalarField::Spectral(c) => Ok(sh_eval(c, xi)),
            ScalarField::Samples(_) => Err(Error::WrongKind {
                expected: "spectral scalar",
            }),
        }
    }

    pub fn grad(&self, xi: &UnitVector) -> Result<Vec3> {
        match self {
            ScalarField::Spectral(c) => Ok(sh_grad_eval(c, xi)),
            ScalarField::Samples(_) => Err(Error::WrongKind {
                expected: "spectral scalar",
            }),
        }
    }

    /// Node values (samples) or values at the given nodes (spectral).
    pub fn values_at(&self, nodes: &[UnitVector]) -> Vec<f64> {
        match self {
            ScalarField::Samples(s) => s.as_scalar().expect("scalar samples").to_vec(),
            ScalarField::Spectral(c) => nodes.par_iter().map(|x| sh_eval(c, x)).collect(),
        }
    }

    pub fn as_samples(&self) -> Option<&[f64]> {
        match self {
            ScalarField::Samples(s) => s.as_scalar().ok(),
            ScalarField::Spectral(_) => None,
        }
    }

    pub fn as_spectral(&self) -> Option<&ShCoefficients> {
        match self {
            ScalarField::Spectral(c) => Some(c),
            ScalarField::Samples(_) => None,
        }
    }
}

/// Uniqueness conditions that were applied to the scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// F₂, F₃ mean-free on Ω.
    Global,
    /// F₂ mean-free on the cap; F₃ equal to the given boundary data.
    Cap { zero_boundary_data: bool },
    /// Built by the caller; nothing enforced.
    None,
}

#[derive(Debug, Clone)]
pub struct HelmholtzScalars {
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub f3: ScalarField,
    pub normalization: Normalization,
}

impl HelmholtzScalars {
    pub fn spectral(f1: ShCoefficients, f2: ShCoefficients, f3: ShCoefficients) -> Self {
        HelmholtzScalars {
            f1: ScalarField::Spectral(f1),
            f2: ScalarField::Spectral(f2),
            f3: ScalarField::Spectral(f3),
            normalization: Normalization::None,
        }
    }
}

/// ξF₁(ξ) + ∇*F₂(ξ) + L*F₃(ξ).
pub fn helmholtz_compose(s: &HelmholtzScalars, xi: &UnitVector) -> Result<Vec3> {
    Ok(xi.into_vec() * s.f1.eval(xi)? + s.f2.grad(xi)? + xi.cross(&s.f3.grad(xi)?))
}

/// The three summands of [`helmholtz_compose`] separately.
pub fn helmholtz_parts(s: &HelmholtzScalars, xi: &UnitVector) -> Result<[Vec3; 3]> {
    Ok([
        xi.into_vec() * s.f1.eval(xi)?,
        s.f2.grad(xi)?,
        xi.cross(&s.f3.grad(xi)?),
    ])
}

/// First-order local model of a tangential field at a node ξ:
/// m = ∇*P + L*S with P = a·η + c₀(ξ·η) + ½ηᵀ(c₂B₁ + c₃B₂)η and
/// S = c₁(ξ·η), where a = f(ξ) and B₁, B₂ span the traceless symmetric forms
/// on T_ξ. The c's are a least-squares fit to the neighbouring samples, so
/// f − m = O(r²) near ξ while P and S are explicit polynomials.
#[derive(Debug, Clone, Copy)]
struct LocalModel {
    xi: Vec3,
    a: Vec3,
    c: [f64; 4],
    b: [Matrix3<f64>; 2],
}

impl LocalModel {
    fn basis(&self, eta: &Vec3) -> [Vec3; 4] {
        let x = self.xi;
        let sym = |b: &Matrix3<f64>| b * eta - eta.dot(&(b * eta)) * eta;
        [x - x.dot(eta) * eta, eta.cross(&x), sym(&self.b[0]), sym(&self.b[1])]
    }

    fn fit(grid: &QuadratureGrid, t: &[Vec3], i: usize) -> Result<Self> {
        let xi = grid.nodes()[i];
        let frame = rotation_to_pole(&xi);
        let (u1, u2) = (frame.col(0), frame.col(1));
        let b = [
            u1 * u1.transpose() - u2 * u2.transpose(),
            u1 * u2.transpose() + u2 * u1.transpose(),
        ];
        let mut model = LocalModel {
            xi: xi.into_vec(),
            a: t[i],
            c: [0.0; 4],
            b,
        };
        let nb = neighbours(grid, i);
        let mut m = DMatrix::zeros(3 * nb.len(), 4);
        let mut rhs = DVector::zeros(3 * nb.len());
        for (r, &k) in nb.iter().enumerate() {
            let eta = grid.nodes()[k].into_vec();
            let res = t[k] - (model.a - model.a.dot(&eta) * eta);
            for (col, phi) in model.basis(&eta).iter().enumerate() {
                for d in 0..3 {
                    m[(3 * r + d, col)] = phi[d];
                }
            }
            for d in 0..3 {
                rhs[3 * r + d] = res[d];
            }
        }
        let sol = m
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::SingularSystem(e.to_string()))?;
        model.c = [sol[0], sol[1], sol[2], sol[3]];
        Ok(model)
    }

    fn field(&self, eta: &Vec3) -> Vec3 {
        let mut v = self.a - self.a.dot(eta) * eta;
        for (c, phi) in self.c.iter().zip(self.basis(eta)) {
            v += *c * phi;
        }
        v
    }

    /// P(ξ) (a·ξ = 0 and ξᵀBξ = 0).
    fn p_center(&self) -> f64 {
        self.c[0]
    }

    /// S(ξ).
    fn s_center(&self) -> f64 {
        self.c[1]
    }

    fn s_value(&self, eta: &Vec3) -> f64 {
        self.c[1] * self.xi.dot(eta)
    }

    /// Mean of P over a cap, from ∫ ηηᵀ = α ζζᵀ + β(I − ζζᵀ) and ∫ η = πρ(2−ρ)ζ.
    fn p_mean_cap(&self, cap: &SphericalCap) -> f64 {
        let rho = cap.radius();
        let z = cap.center().into_vec();
        let area = 2.0 * PI * rho;
        let cube = 1.0 - (1.0 - rho).powi(3);
        let alpha = 2.0 * PI * cube / 3.0;
        let beta = PI * (rho - cube / 3.0);
        let lin = (self.a + self.c[0] * self.xi).dot(&z) * (1.0 - 0.5 * rho);
        let quad = 0.5 * (alpha - beta) / area
            * (self.c[2] * z.dot(&(self.b[0] * z)) + self.c[3] * z.dot(&(self.b[1] * z)));
        lin + quad
    }
}

/// Eight product-grid neighbours of node i: the two adjacent rows (across the
/// pole for polar rows) and a longitude step matched to the row spacing.
fn neighbours(grid: &QuadratureGrid, i: usize) -> Vec<usize> {
    let (n_t, n_phi) = match grid.shape() {
        GridShape::Product { n_t, n_phi } => (n_t, n_phi),
        GridShape::Curve { m } => (1, m),
    };
    let (it, jp) = (i / n_phi, i % n_phi);
    let half = n_phi / 2;
    let rows: Vec<(usize, usize)> = if n_t < 3 {
        (0..n_t).filter(|&r| r != it).map(|r| (r, 0)).collect()
    } else if it > 0 && it + 1 < n_t {
        vec![(it - 1, 0), (it + 1, 0)]
    } else if it == 0 {
        vec![(0, half), (1, 0)]
    } else if grid.kind() == GridKind::SphereArea {
        vec![(it - 1, 0), (it, half)]
    } else {
        vec![(it - 1, 0), (it - 2, 0)]
    };
    let node = |r: usize, c: usize| r * n_phi + c % n_phi;
    let x = grid.nodes()[i].into_vec();
    let dist = |k: usize| (grid.nodes()[k].into_vec() - x).norm();
    let adjacent = if it + 1 < n_t { it + 1 } else { it.saturating_sub(1) };
    let d_row = dist(node(adjacent, jp));
    let d_col = dist(node(it, jp + 1));
    let k = ((d_row / d_col).round() as usize).clamp(1, (n_phi / 4).max(1));
    let mut out = vec![node(it, jp + n_phi - k), node(it, jp + k)];
    for (r, off) in rows {
        for c in [jp + n_phi - k, jp, jp + k] {
            out.push(node(r, c + off));
        }
    }
    out.retain(|&j| j != i);
    out
}

fn remove_mean(grid: &QuadratureGrid, v: &mut [f64]) {
    let area = grid.sum_weighted(|_, _| 1.0);
    let mean = grid.sum_weighted(|i, _| v[i]) / area;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn tangential_part(f: &FieldSamples) -> Result<(Vec<f64>, Vec<Vec3>)> {
    let vals = f.as_vector()?;
    let nodes = f.grid().nodes();
    let mut f1 = Vec::with_capacity(vals.len());
    let mut t = Vec::with_capacity(vals.len());
    for (v, x) in vals.iter().zip(nodes) {
        let r = v.dot(x);
        f1.push(r);
        t.push(v - r * x.into_vec());
    }
    Ok((f1, t))
}

fn collect_results(r: Vec<Result<(f64, f64)>>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = Vec::with_capacity(r.len());
    let mut b = Vec::with_capacity(r.len());
    for x in r {
        let (u, v) = x?;
        a.push(u);
        b.push(v);
    }
    Ok((a, b))
}

/// Global decomposition of sampled f at the grid nodes:
/// F₁ = ξ·f, F₂ = −∫(∇*G)·f dω, F₃ = −∫(L*G)·f dω, means of F₂, F₃ removed.
/// The kernel is regularized at scale `j` (grid default when `None`) and the
/// field value at ξ is subtracted through a linear model with known integrals.
pub fn helmholtz_decompose_sphere(f: &FieldSamples, j: Option<u32>) -> Result<HelmholtzScalars> {
    let grid = f.grid().clone();
    if grid.kind() != GridKind::SphereArea {
        return Err(Error::WrongKind {
            expected: "sphere grid samples",
        });
    }
    let j = j.unwrap_or_else(|| default_scale(&grid));
    let (f1, t) = tangential_part(f)?;
    let spec = KernelSpec::fundamental().regularized(j);
    let nodes = grid.nodes();
    let res: Vec<Result<(f64, f64)>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = nodes[i];
            let k = spec.at(&xi)?;
            let model = LocalModel::fit(&grid, &t, i)?;
            let mut err = None;
            let mut s2 = 0.0;
            let s3 = grid.sum_weighted(|l, eta| {
                let d = t[l] - model.field(&eta.into_vec());
                match k.grad(eta) {
                    Ok(g) => {
                        s2 += grid.weights()[l] * g.dot(&d);
                        eta.cross(&g).dot(&d)
                    }
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                // The model contributes P(ξ) − mean P and S(ξ) − mean S; all
                // means vanish on Ω.
                None => Ok((-s2 + model.p_center(), -s3 + model.s_center())),
            }
        })
        .collect();
    let (mut f2, mut f3) = collect_results(res)?;
    remove_mean(&grid, &mut f2);
    remove_mean(&grid, &mut f3);
    Ok(HelmholtzScalars {
        f1: ScalarField::Samples(FieldSamples::scalar(grid.clone(), f1)?),
        f2: ScalarField::Samples(FieldSamples::scalar(grid.clone(), f2)?),
        f3: ScalarField::Samples(FieldSamples::scalar(grid, f3)?),
        normalization: Normalization::Global,
    })
}

/// Cap decomposition at the interior grid nodes:
/// F₂ = −∫_Γ ∇*G_N·f dω + ∫_∂Γ F τ·∇*G_N dσ (then made mean-free),
/// F₃ = −∫_Γ L*G_D·f dω + ∫_∂Γ G_D τ·f dσ + ∫_∂Γ F ∂_νG_D dσ,
/// where F is the boundary trace of F₃ (zero when `boundary` is `None`) and
/// `boundary_f` holds the tangential field on the boundary grid.
pub fn helmholtz_decompose_cap(
    cap: &SphericalCap,
    f: &FieldSamples,
    boundary_grid: &Arc<QuadratureGrid>,
    boundary_f: &[Vec3],
    boundary: Option<&[f64]>,
    j: Option<u32>,
) -> Result<HelmholtzScalars> {
    let grid = f.grid().clone();
    match grid.kind() {
        GridKind::CapArea(c) if c == *cap => {}
        _ => {
            return Err(Error::WrongKind {
                expected: "samples on the cap grid",
            })
        }
    }
    match boundary_grid.kind() {
        GridKind::BoundaryLine(c) if c == *cap => {}
        _ => {
            return Err(Error::WrongKind {
                expected: "boundary grid of the cap",
            })
        }
    }
    let m = boundary_grid.len();
    if boundary_f.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: boundary_f.len(),
        });
    }
    let zero = vec![0.0; m];
    let data = boundary.unwrap_or(&zero);
    if data.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: data.len(),
        });
    }
    let j = j.unwrap_or_else(|| default_scale(&grid));
    let (f1, t) = tangential_part(f)?;
    let gn = KernelSpec::neumann(*cap).regularized(j);
    let gd = KernelSpec::dirichlet(*cap).regularized(j);
    let nodes = grid.nodes();
    let frames = boundary_grid.frames();
    let res: Vec<Result<(f64, f64)>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = nodes[i];
            let kn = gn.at(&xi)?;
            let kd = gd.at(&xi)?;
            let model = LocalModel::fit(&grid, &t, i)?;
            let mut err = None;
            let mut s2 = 0.0;
            let s3 = grid.sum_weighted(|l, eta| {
                let d = t[l] - model.field(&eta.into_vec());
                match (kn.grad(eta), kd.curl(eta)) {
                    (Ok(g), Ok(c)) => {
                        s2 += grid.weights()[l] * g.dot(&d);
                        c.dot(&d)
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            let mut b2 = Vec::with_capacity(m);
            let mut b3 = Vec::with_capacity(m);
            for (k, b) in frames.iter().enumerate() {
                let w = boundary_grid.weights()[k];
                let gnv = kn.grad(&b.eta)?;
                let dnd = kd.normal(b)?;
                let gdv = kd.value(&b.eta)?;
                let e = b.eta.into_vec();
                let rest = data[k] - model.s_value(&e);
                b2.push(w * rest * b.tau.dot(&gnv));
                b3.push(w * (gdv * b.tau.dot(&(boundary_f[k] - model.field(&e))) + rest * dnd));
            }
            // The formulas reproduce the model exactly: P(ξ) − mean_Γ P and S(ξ).
            Ok((
                -s2 + pairwise_sum(&b2) + model.p_center() - model.p_mean_cap(cap),
                -s3 + pairwise_sum(&b3) + model.s_center(),
            ))
        })
        .collect();
    let (mut f2, f3) = collect_results(res)?;
    remove_mean(&grid, &mut f2);
    Ok(HelmholtzScalars {
        f1: ScalarField::Samples(FieldSamples::scalar(grid.clone(), f1)?),
        f2: ScalarField::Samples(FieldSamples::scalar(grid.clone(), f2)?),
        f3: ScalarField::Samples(FieldSamples::scalar(grid, f3)?),
        normalization: Normalization::Cap {
            zero_boundary_data: boundary.is_none(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DPower {
    Forward,
    Inverse,
}

/// Multiplies degree-n coefficients by (n + 1/2)^{±1}.
pub fn d_apply(c: &ShCoefficients, power: DPower) -> ShCoefficients {
    match power {
        DPower::Forward => c.map_degrees(|n| n as f64 + 0.5),
        DPower::Inverse => c.map_degrees(|n| 1.0 / (n as f64 + 0.5)),
    }
}

/// Kernel of D⁻¹: 1/(2π√(2(1 − ξ·η))), with ∫_Ω = 2.
pub fn d_inv_kernel(one_minus_t: f64) -> f64 {
    1.0 / (2.0 * PI * (2.0 * one_minus_t).sqrt())
}

/// (D⁻¹F)(ξ) = ∫ k(ξ·η)(F(η) − F(ξ)) dω + 2F(ξ), with `center` = F(ξ).
pub fn d_inv_convolve(f: &FieldSamples, xi: &UnitVector, center: f64) -> Result<f64> {
    if f.grid().kind() != GridKind::SphereArea {
        return Err(Error::WrongKind {
            expected: "sphere grid samples",
        });
    }
    let v = f.as_scalar()?;
    let s = f.grid().sum_weighted(|i, eta| {
        let x = xi.one_minus_dot(eta);
        if x <= 0.0 {
            0.0
        } else {
            d_inv_kernel(x) * (v[i] - center)
        }
    });
    Ok(s + 2.0 * center)
}

/// [`d_inv_convolve`] at every node of the sample grid.
pub fn d_inv_convolve_nodes(f: &FieldSamples) -> Result<Vec<f64>> {
    let v = f.as_scalar()?;
    let nodes = f.grid().nodes();
    (0..nodes.len())
        .into_par_iter()
        .map(|i| d_inv_convolve(f, &nodes[i], v[i]))
        .collect()
}

#[derive(Debug, Clone)]
pub struct HardyHodgeScalars {
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub f3: ScalarField,
}

/// How D⁻¹ is applied to sampled scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DInvPath {
    /// Project onto spherical harmonics up to the given degree.
    Spectral(usize),
    Convolution,
}

/// õ⁽¹⁾F = o⁽¹⁾(D + ½)F − o⁽²⁾F, õ⁽²⁾F = o⁽¹⁾(D − ½)F + o⁽²⁾F, õ⁽³⁾ = o⁽³⁾:
/// the Helmholtz scalars of Σ õ⁽ⁱ⁾F̃ᵢ.
pub fn hardy_hodge_to_helmholtz(h: &HardyHodgeScalars) -> Result<HelmholtzScalars> {
    let (a, b, c) = match (&h.f1, &h.f2, &h.f3) {
        (ScalarField::Spectral(a), ScalarField::Spectral(b), ScalarField::Spectral(c)) => (a, b, c),
        _ => {
            return Err(Error::WrongKind {
                expected: "spectral Hardy-Hodge scalars",
            })
        }
    };
    let f1 = a
        .map_degrees(|n| n as f64 + 1.0)
        .add(&b.map_degrees(|n| n as f64));
    let f2 = b.add(&a.scale(-1.0));
    Ok(HelmholtzScalars::spectral(f1, f2, c.clone()))
}

/// Σ õ⁽ⁱ⁾F̃ᵢ at ξ.
pub fn hardy_hodge_compose(h: &HardyHodgeScalars, xi: &UnitVector) -> Result<Vec3> {
    helmholtz_compose(&hardy_hodge_to_helmholtz(h)?, xi)
}

/// F̃₁ = ½D⁻¹F₁ + ¼D⁻¹F₂ − ½F₂, F̃₂ = ½D⁻¹F₁ + ¼D⁻¹F₂ + ½F₂, F̃₃ = F₃.
/// Spectral scalars use exact eigenvalues; sampled ones use `path`.
pub fn hardy_hodge_from_helmholtz(s: &HelmholtzScalars, path: DInvPath) -> Result<HardyHodgeScalars> {
    match (&s.f1, &s.f2) {
        (ScalarField::Spectral(a), ScalarField::Spectral(b)) => {
            let g = d_apply(a, DPower::Inverse)
                .scale(0.5)
                .add(&d_apply(b, DPower::Inverse).scale(0.25));
            Ok(HardyHodgeScalars {
                f1: ScalarField::Spectral(g.add(&b.scale(-0.5))),
                f2: ScalarField::Spectral(g.add(&b.scale(0.5))),
                f3: s.f3.clone(),
            })
        }
        (ScalarField::Samples(a), ScalarField::Samples(b)) => {
            let grid = a.grid().clone();
            let (da, db) = match path {
                DInvPath::Convolution => (d_inv_convolve_nodes(a)?, d_inv_convolve_nodes(b)?),
                DInvPath::Spectral(l) => {
                    let nodes = grid.nodes();
                    let pa = d_apply(&sh_project(a, l)?, DPower::Inverse);
                    let pb = d_apply(&sh_project(b, l)?, DPower::Inverse);
                    (
                        nodes.par_iter().map(|x| sh_eval(&pa, x)).collect(),
                        nodes.par_iter().map(|x| sh_eval(&pb, x)).collect(),
                    )
                }
            };
            let f2 = b.as_scalar()?;
            let g: Vec<f64> = da.iter().zip(&db).map(|(x, y)| 0.5 * x + 0.25 * y).collect();
            let t1 = g.iter().zip(f2).map(|(g, f)| g - 0.5 * f).collect();
            let t2 = g.iter().zip(f2).map(|(g, f)| g + 0.5 * f).collect();
            Ok(HardyHodgeScalars {
                f1: ScalarField::Samples(FieldSamples::scalar(grid.clone(), t1)?),
                f2: ScalarField::Samples(FieldSamples::scalar(grid, t2)?),
                f3: s.f3.clone(),
            })
        }
        _ => Err(Error::WrongKind {
            expected: "matching scalar carriers",
        }),
    }
}

/// Helmholtz decomposition of sampled f followed by the Hardy–Hodge combination.
pub fn hardy_hodge_decompose_sphere(
    f: &FieldSamples,
    j: Option<u32>,
    path: DInvPath,
) -> Result<HardyHodgeScalars> {
    hardy_hodge_from_helmholtz(&helmholtz_decompose_sphere(f, j)?, path)
}
