//! Surface potentials, Poisson/Dirichlet/Neumann solvers on caps, inversion of
//! the surface gradient and curl gradient, and analytic probes (mean value
//! properties, maximum principle, finite-difference Beltrami operator).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{rotation_to_pole, SphericalCap, UnitVector, Vec3};
use crate::kernels::{KernelSpec, G_CONST, INV_4PI};
use crate::quadrature::{
    build_boundary_grid, build_cap_grid, gauss_legendre, pairwise_sum, FieldSamples, GridKind, QuadratureGrid,
};

/// Strict-interior margin for the Dirichlet solver.
pub const DIRICHLET_MARGIN: f64 = 1e-6;

/// Tolerance of the Neumann compatibility condition ∫F dσ = 0.
pub const NEUMANN_COMPAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Cap(SphericalCap),
    Sphere,
}

impl Domain {
    pub fn of_grid(grid: &QuadratureGrid) -> Result<Domain> {
        match grid.kind() {
            GridKind::CapArea(c) => Ok(Domain::Cap(c)),
            GridKind::SphereArea => Ok(Domain::Sphere),
            GridKind::BoundaryLine(_) => Err(Error::InvalidParameter(
                "an area grid is required".into(),
            )),
        }
    }
}

/// Default regularization scale: ⌈log₂(1/h)⌉ + 2 for polar node spacing h.
pub fn default_scale(grid: &QuadratureGrid) -> u32 {
    ((1.0 / grid.spacing()).log2().ceil() as i64 + 2).max(0) as u32
}

/// How the log singularity of a surface integral is treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    pub scale: u32,
    /// Value of the density at ξ; when present it is subtracted under the
    /// integral and its contribution ∫_Γ G dω is added back analytically.
    pub center: Option<f64>,
}

impl Singular {
    pub fn regularized(scale: u32) -> Self {
        Singular {
            scale,
            center: None,
        }
    }

    pub fn subtracted(scale: u32, center: f64) -> Self {
        Singular {
            scale,
            center: Some(center),
        }
    }
}

/// ∫_Γ G(Δ*; ξ·η) H(η) dω(η) with the first log branch regularized at scale J.
pub fn surface_potential(
    grid: &QuadratureGrid,
    h: &FieldSamples,
    xi: &UnitVector,
    j: u32,
) -> Result<f64> {
    check_grid(grid, h)?;
    surface_potential_with(h, xi, Singular::regularized(j))
}

pub fn surface_potential_with(h: &FieldSamples, xi: &UnitVector, rule: Singular) -> Result<f64> {
    let grid = h.grid();
    let vals = h.as_scalar()?;
    let k = KernelSpec::fundamental().regularized(rule.scale).at(xi)?;
    let c = rule.center.unwrap_or(0.0);
    let mut err = None;
    let s = grid.sum_weighted(|i, eta| match k.value(eta) {
        Ok(g) => g * (vals[i] - c),
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let domain = Domain::of_grid(grid)?;
    Ok(match rule.center {
        Some(c) => s + c * fundamental_integral(&domain, xi),
        None => s,
    })
}

/// Nodes used for the local quadratic model in [`surface_potential_corrected`].
const LOCAL_FIT_NODES: usize = 32;

/// Full-sphere surface potential with a local quadratic model P of H removed
/// under the integral: P(η) = c₀ + c₁u + c₂v + c₃u² + c₄uv + c₅v² in the
/// tangent coordinates u = e₁·η, v = e₂·η at ξ, fitted to the nearest nodes.
/// ∫_Ω G(ξ·η)P(η) dω = (c₃ + c₅)/18, so the remainder G·(H − P) is O(s³ ln s)
/// at ξ and the product rule converges at the rate of a smooth integrand.
pub fn surface_potential_corrected(h: &FieldSamples, xi: &UnitVector, j: u32) -> Result<f64> {
    let grid = h.grid();
    if Domain::of_grid(grid)? != Domain::Sphere {
        return Err(Error::InvalidParameter(
            "the local correction needs a full-sphere grid".into(),
        ));
    }
    let vals = h.as_scalar()?;
    let nodes = grid.nodes();
    if nodes.len() < LOCAL_FIT_NODES {
        return Err(Error::InvalidParameter("grid too coarse for the local fit".into()));
    }
    let frame = rotation_to_pole(xi);
    let (e1, e2) = (frame.col(0), frame.col(1));
    let basis = |eta: &UnitVector| {
        let (u, v) = (eta.dot(&e1), eta.dot(&e2));
        [1.0, u, v, u * u, u * v, v * v]
    };
    let mut near: Vec<(f64, usize)> = nodes
        .iter()
        .enumerate()
        .map(|(i, eta)| (xi.one_minus_dot(eta), i))
        .collect();
    near.select_nth_unstable_by(LOCAL_FIT_NODES - 1, |a, b| a.0.total_cmp(&b.0));
    near.truncate(LOCAL_FIT_NODES);
    let scale = near.iter().map(|p| p.0).fold(0.0, f64::max).sqrt().max(f64::MIN_POSITIVE);
    // columns scaled by powers of the fit radius for conditioning
    let col_scale = [1.0, scale, scale, scale * scale, scale * scale, scale * scale];
    let a = DMatrix::from_fn(LOCAL_FIT_NODES, 6, |r, c| {
        basis(&nodes[near[r].1])[c] / col_scale[c]
    });
    let b = DVector::from_fn(LOCAL_FIT_NODES, |r, _| vals[near[r].1]);
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let c: Vec<f64> = (0..6).map(|k| coef[k] / col_scale[k]).collect();
    let k = KernelSpec::fundamental().regularized(j).at(xi)?;
    let mut err = None;
    let s = grid.sum_weighted(|i, eta| {
        let p: f64 = basis(eta).iter().zip(&c).map(|(x, y)| x * y).sum();
        match k.value(eta) {
            Ok(g) => g * (vals[i] - p),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(s + (c[3] + c[5]) / 18.0)
}

fn check_grid(grid: &QuadratureGrid, h: &FieldSamples) -> Result<()> {
    if grid.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: h.len(),
        });
    }
    Ok(())
}

const POLAR_ANGLES: usize = 512;

/// Exit distance (1 − cos s) along the geodesic from ξ in direction d, or 2
/// when the geodesic stays inside the cap up to the antipode.
fn exit_depth(cap: &SphericalCap, xi: &UnitVector, d: &Vec3) -> (f64, f64) {
    let a = xi.dot(&cap.center());
    let b = d.dot(&cap.center().into_vec());
    let c = 1.0 - cap.radius();
    let k = a.hypot(b);
    let s_b = if k <= 0.0 || c / k < -1.0 {
        PI
    } else {
        let phi0 = b.atan2(a);
        (phi0 + (c / k).clamp(-1.0, 1.0).acos()).clamp(0.0, PI)
    };
    (s_b, 1.0 - s_b.cos())
}

/// ∫_Γ G(Δ*; ξ·η) dω(η): 0 on the sphere; on caps, exact in the geodesic
/// distance from ξ and trapezoidal in the direction angle (ξ interior).
pub fn fundamental_integral(domain: &Domain, xi: &UnitVector) -> f64 {
    let cap = match domain {
        Domain::Sphere => return 0.0,
        Domain::Cap(c) => c,
    };
    let frame = rotation_to_pole(xi);
    let (u1, u2) = (frame.col(0), frame.col(1));
    let terms: Vec<f64> = (0..POLAR_ANGLES)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / POLAR_ANGLES as f64;
            let d = a.cos() * u1 + a.sin() * u2;
            let (_, x) = exit_depth(cap, xi, &d);
            if x <= 0.0 {
                0.0
            } else {
                INV_4PI * (x * x.ln() - x) + G_CONST * x
            }
        })
        .collect();
    pairwise_sum(&terms) * 2.0 * PI / POLAR_ANGLES as f64
}

fn unit_gauss(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter().zip(&w).map(|(x, w)| (0.5 * (1.0 + x), 0.5 * w)).collect()
}

/// ∫_Γ G(Δ*; ξ·η) H(η) dω(η) for an evaluator H, integrated in geodesic polar
/// coordinates around ξ. Smooth in ξ, which makes it suitable for
/// finite-difference probes.
pub fn surface_potential_adaptive<F>(cap: &SphericalCap, h: F, xi: &UnitVector) -> f64
where
    F: Fn(&UnitVector) -> f64,
{
    let radial = unit_gauss(40);
    let n_alpha = 256;
    let frame = rotation_to_pole(xi);
    let (u1, u2) = (frame.col(0), frame.col(1));
    let x = xi.into_vec();
    let mut terms = Vec::with_capacity(n_alpha);
    for k in 0..n_alpha {
        let a = 2.0 * PI * k as f64 / n_alpha as f64;
        let d = a.cos() * u1 + a.sin() * u2;
        let (s_b, _) = exit_depth(cap, xi, &d);
        // s = s_b u² tames the s ln s behaviour at the origin
        let inner: Vec<f64> = radial
            .iter()
            .map(|&(u, w)| {
                let s = s_b * u * u;
                let eta = UnitVector::new(s.cos() * x + s.sin() * d);
                let g = INV_4PI * (2.0 * (0.5 * s).sin().powi(2)).ln() + G_CONST;
                w * g * h(&eta) * s.sin() * 2.0 * s_b * u
            })
            .collect();
        terms.push(pairwise_sum(&inner));
    }
    pairwise_sum(&terms) * 2.0 * PI / n_alpha as f64
}

/// Five-point stencil in geodesic normal coordinates: O(h²) approximation of Δ*F(ξ).
pub fn beltrami_fd<F>(f: F, xi: &UnitVector, h: f64) -> f64
where
    F: Fn(&UnitVector) -> f64,
{
    let frame = rotation_to_pole(xi);
    let x = xi.into_vec();
    let (c, s) = (h.cos(), h.sin());
    let mut acc = -4.0 * f(xi);
    for e in [frame.col(0), frame.col(1)] {
        acc += f(&UnitVector::new(c * x + s * e));
        acc += f(&UnitVector::new(c * x - s * e));
    }
    acc / (h * h)
}

/// Solution of Δ*U = H on the cap: the surface potential of H − mean_Γ(H) plus
/// −(1/‖Γ‖) ln(1 − ξ·ξ̄) ∫_Γ H dω, with ξ̄ outside the closed cap.
pub fn poisson_solve_cap(
    cap: &SphericalCap,
    h: &FieldSamples,
    xbar: &UnitVector,
    xi: &UnitVector,
    rule: Singular,
) -> Result<f64> {
    poisson_check(cap, h.grid(), xbar)?;
    let grid = h.grid();
    let vals = h.as_scalar()?;
    let total = grid.sum_weighted(|i, _| vals[i]);
    let area = 2.0 * PI * cap.radius();
    let mean = total / area;
    let centred =
        FieldSamples::scalar(grid.clone(), vals.iter().map(|v| v - mean).collect())?;
    let rule = Singular {
        center: rule.center.map(|c| c - mean),
        ..rule
    };
    let u = surface_potential_with(&centred, xi, rule)?;
    Ok(u - xi.one_minus_dot(xbar).ln() * total / area)
}

fn poisson_check(cap: &SphericalCap, grid: &QuadratureGrid, xbar: &UnitVector) -> Result<()> {
    if cap.depth(xbar) <= cap.radius() {
        return Err(Error::InsideCap);
    }
    match grid.kind() {
        GridKind::CapArea(c) if c == *cap => Ok(()),
        _ => Err(Error::InvalidParameter(
            "samples must live on a grid of the same cap".into(),
        )),
    }
}

/// [`poisson_solve_cap`] for an evaluator H, using the polar rule around ξ.
pub fn poisson_solve_cap_adaptive<F>(
    cap: &SphericalCap,
    h: F,
    xbar: &UnitVector,
    xi: &UnitVector,
    mean_grid: &QuadratureGrid,
) -> Result<f64>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    poisson_check(cap, mean_grid, xbar)?;
    let area = 2.0 * PI * cap.radius();
    let total = mean_grid.integrate_fn(&h);
    let mean = total / area;
    let u = surface_potential_adaptive(cap, |e| h(e) - mean, xi);
    Ok(u - xi.one_minus_dot(xbar).ln() * total / area)
}

fn boundary_values<'a>(cap: &SphericalCap, f: &'a FieldSamples) -> Result<&'a [f64]> {
    match f.grid().kind() {
        GridKind::BoundaryLine(c) if c == *cap => f.as_scalar(),
        _ => Err(Error::InvalidParameter(
            "boundary data must live on a boundary grid of the same cap".into(),
        )),
    }
}

/// Poisson-type integral for the Dirichlet problem on a cap.
pub fn dirichlet_solve_cap(cap: &SphericalCap, f: &FieldSamples, xi: &UnitVector) -> Result<f64> {
    let vals = boundary_values(cap, f)?;
    let depth = cap.depth(xi);
    if !(depth < cap.radius() - DIRICHLET_MARGIN) {
        return Err(Error::NearBoundary {
            distance: cap.radius() - depth,
            required: DIRICHLET_MARGIN,
        });
    }
    let s = f.grid().sum_weighted(|i, eta| vals[i] / xi.one_minus_dot(eta));
    Ok((cap.radius() - depth) / (2.0 * PI * cap.s()) * s)
}

/// Neumann representation on a cap: the supplied mean value minus the
/// boundary integral of [(1/2π) ln(1−ξ·η) + ((1−ρ)/(2πρ)) ln(2−ρ)] F(η).
pub fn neumann_solve_cap(
    cap: &SphericalCap,
    f: &FieldSamples,
    mean_value: f64,
    xi: &UnitVector,
) -> Result<f64> {
    let vals = boundary_values(cap, f)?;
    let total = f.grid().sum_weighted(|i, _| vals[i]);
    if !(total.abs() <= NEUMANN_COMPAT_TOL) {
        return Err(Error::Compatibility(total));
    }
    let depth = cap.depth(xi);
    if !(depth < cap.radius() - DIRICHLET_MARGIN) {
        return Err(Error::NearBoundary {
            distance: cap.radius() - depth,
            required: DIRICHLET_MARGIN,
        });
    }
    let rho = cap.radius();
    let c = (1.0 - rho) / (2.0 * PI * rho) * (2.0 - rho).ln();
    let s = f.grid().sum_weighted(|i, eta| {
        (xi.one_minus_dot(eta).ln() / (2.0 * PI) + c) * vals[i]
    });
    Ok(mean_value - s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMode {
    Grad,
    Curl,
}

/// −∫ (D_η K)(ξ, η)·f(η) dω(η) with K = G_N^J on caps and the regularized
/// fundamental solution on the sphere; D = ∇* or L*. The mean term is left to
/// the caller.
pub fn invert_gradient(
    domain: &Domain,
    f: &FieldSamples,
    mode: DerivMode,
    j: u32,
    xi: &UnitVector,
) -> Result<f64> {
    let vals = f.as_tangential()?;
    let spec = match (domain, f.grid().kind()) {
        (Domain::Cap(c), GridKind::CapArea(g)) if *c == g => {
            KernelSpec::neumann(*c).regularized(j)
        }
        (Domain::Sphere, GridKind::SphereArea) => KernelSpec::fundamental().regularized(j),
        _ => {
            return Err(Error::InvalidParameter(
                "domain does not match the sample grid".into(),
            ))
        }
    };
    let k = spec.at(xi)?;
    let mut err = None;
    let s = f.grid().sum_weighted(|i, eta| {
        let d = match mode {
            DerivMode::Grad => k.grad(eta),
            DerivMode::Curl => k.curl(eta),
        };
        match d {
            Ok(d) => d.dot(&vals[i]),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(-s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mvp {
    I,
    II,
}

/// Grid sizes for the probe integrals of [`mvp_residual`].
#[derive(Debug, Clone, Copy)]
pub struct ProbeRule {
    pub n_t: usize,
    pub n_phi: usize,
    pub m: usize,
}

impl Default for ProbeRule {
    fn default() -> Self {
        ProbeRule {
            n_t: 24,
            n_phi: 48,
            m: 64,
        }
    }
}

/// Residual of Mean Value Property I or II on the cap Γ_ρ(ξ) (ξ = cap centre).
pub fn mvp_residual<F>(f: F, cap: &SphericalCap, which: Mvp, rule: ProbeRule) -> Result<f64>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let rho = cap.radius();
    let boundary = build_boundary_grid(cap, rule.m)?;
    let line = boundary.integrate_fn(&f);
    let center = f(&cap.center());
    Ok(match which {
        Mvp::I => {
            let area = build_cap_grid(cap, rule.n_t, rule.n_phi)?.integrate_fn(&f);
            (center
                - INV_4PI * area
                - (2.0 - rho).sqrt() / (4.0 * PI * rho.sqrt()) * line)
                .abs()
        }
        Mvp::II => (center - line / (2.0 * PI * cap.s())).abs(),
    })
}

/// Maximum principle on a cap: interior extrema (over an (n_t, n_φ) grid)
/// do not exceed the boundary extrema (over m nodes) by more than 1e-12.
pub fn max_principle_check<F>(f: F, cap: &SphericalCap, n_t: usize, n_phi: usize, m: usize) -> Result<bool>
where
    F: Fn(&UnitVector) -> f64 + Sync,
{
    let interior: Vec<f64> = build_cap_grid(cap, n_t, n_phi)?.nodes().par_iter().map(&f).collect();
    let boundary: Vec<f64> = build_boundary_grid(cap, m)?.nodes().par_iter().map(&f).collect();
    let (imax, imin) = extrema(&interior);
    let (bmax, bmin) = extrema(&boundary);
    Ok(imax <= bmax + 1e-12 && imin >= bmin - 1e-12)
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), &x| (a.max(x), b.min(x)))
}

/// Probe values of a reconstruction with optional oracle errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub probes: Vec<UnitVector>,
    pub values: Vec<f64>,
    pub oracle: Option<Vec<f64>>,
    pub sup_error: Option<f64>,
    /// Root-mean-square error over the probes.
    pub l2_error: Option<f64>,
    /// ‖error‖₂ / ‖oracle‖₂ over the probes.
    pub rel_l2_error: Option<f64>,
    pub boundary_residual: Option<f64>,
    pub params: Vec<(String, String)>,
}

impl SolveReport {
    pub fn new(probes: Vec<UnitVector>, values: Vec<f64>) -> Self {
        SolveReport {
            probes,
            values,
            oracle: None,
            sup_error: None,
            l2_error: None,
            rel_l2_error: None,
            boundary_residual: None,
            params: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_oracle(mut self, oracle: Vec<f64>) -> Self {
        assert_eq!(oracle.len(), self.values.len());
        let err: Vec<f64> = self.values.iter().zip(&oracle).map(|(a, b)| a - b).collect();
        let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
        let osq: Vec<f64> = oracle.iter().map(|o| o * o).collect();
        let n = err.len().max(1) as f64;
        self.sup_error = Some(err.iter().fold(0.0, |a, e| a.max(e.abs())));
        self.l2_error = Some((pairwise_sum(&sq) / n).sqrt());
        self.rel_l2_error = Some((pairwise_sum(&sq) / pairwise_sum(&osq)).sqrt());
        self.oracle = Some(oracle);
        self
    }

    pub fn errors(&self) -> Option<Vec<f64>> {
        self.oracle
            .as_ref()
            .map(|o| self.values.iter().zip(o).map(|(a, b)| a - b).collect())
    }

    /// Largest |oracle| over the probes.
    pub fn oracle_sup(&self) -> Option<f64> {
        self.oracle
            .as_ref()
            .map(|o| o.iter().fold(0.0, |a: f64, v| a.max(v.abs())))
    }
}

/// Evaluates `f` at every probe in parallel, preserving order.
pub fn evaluate_at<F>(probes: &[UnitVector], f: F) -> Result<Vec<f64>>
where
    F: Fn(&UnitVector) -> Result<f64> + Sync + Send,
{
    probes.par_iter().map(f).collect()
}

/// Nodes of an (n_t, n_φ) grid on the concentric cap of radius `factor`·ρ.
pub fn interior_probes(cap: &SphericalCap, factor: f64, n_t: usize, n_phi: usize) -> Result<Vec<UnitVector>> {
    Ok(build_cap_grid(&cap.shrunk(factor), n_t, n_phi)?.nodes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{sh_basis, InnerHarmonicIndex, inner_harmonic_eval};
    use crate::quadrature::build_sphere_grid;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    #[test]
    fn fd_beltrami_eigenvalues() {
        let xi = UnitVector::from_xyz(0.3, -0.6, 0.2);
        for n in 1..=8 {
            for j in [1, 2 * n, 2 * n + 1] {
                let y = sh_basis(n, j, &xi);
                let fd = beltrami_fd(|e| sh_basis(n, j, e), &xi, 1e-3);
                let ex = -((n * (n + 1)) as f64) * y;
                assert!((fd - ex).abs() <= 1e-3 * ex.abs().max(1e-3), "n={n} j={j} {fd} {ex}");
            }
        }
        assert!(beltrami_fd(|_| 3.7, &xi, 1e-3).abs() < 1e-8);
        let a = Vec3::new(0.3, 0.4, -0.1);
        assert_abs_diff_eq!(beltrami_fd(|e| e.dot(&a), &xi, 1e-3), -2.0 * xi.dot(&a), epsilon = 1e-4);
    }

    #[test]
    fn fundamental_integral_sphere_limit() {
        // a cap of radius close to 2 approaches the zero spherical mean of G
        let cap = SphericalCap::new(UnitVector::from_xyz(0.2, 0.1, 0.9), 2.0 - 1e-9).unwrap();
        let v = fundamental_integral(&Domain::Cap(cap), &UnitVector::from_xyz(0.1, 0.3, 0.8));
        assert!(v.abs() < 1e-6, "{v}");
    }

    #[test]
    fn fundamental_integral_matches_quadrature() {
        let cap = SphericalCap::new(UnitVector::e3(), 0.5).unwrap();
        let xi = cap.center();
        // at the centre ∫ G = 2π[(1/4π)(ρ ln ρ − ρ) + c ρ]
        let rho = 0.5f64;
        let ex = 2.0 * PI * (INV_4PI * (rho * rho.ln() - rho) + G_CONST * rho);
        assert_abs_diff_eq!(fundamental_integral(&Domain::Cap(cap), &xi), ex, epsilon = 1e-14);
        let xi = UnitVector::from_xyz(0.3, 0.2, 0.9);
        let ad = surface_potential_adaptive(&cap, |_| 1.0, &xi);
        assert_abs_diff_eq!(fundamental_integral(&Domain::Cap(cap), &xi), ad, epsilon = 1e-10);
    }

    #[test]
    fn potential_of_constant_on_sphere() {
        let g = Arc::new(build_sphere_grid(64, 128).unwrap());
        let h = FieldSamples::from_fn(g.clone(), |_| 1.0);
        let xi = UnitVector::from_xyz(0.2, 0.5, -0.3);
        let v = surface_potential_with(&h, &xi, Singular::subtracted(12, 1.0)).unwrap();
        assert!(v.abs() < 1e-10, "{v}");
        assert!(surface_potential_corrected(&h, &xi, 12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn corrected_potential_inverts_beltrami() {
        let g = Arc::new(build_sphere_grid(64, 128).unwrap());
        let xi = UnitVector::from_xyz(0.7, -0.2, 0.4);
        for j in 1..=5 {
            let h = FieldSamples::from_fn(g.clone(), |x| sh_basis(2, j, x));
            let u = surface_potential_corrected(&h, &xi, 12).unwrap();
            assert_abs_diff_eq!(u, -sh_basis(2, j, &xi) / 6.0, epsilon = 1e-6);
        }
        let cap = SphericalCap::new(UnitVector::e3(), 0.5).unwrap();
        let c = Arc::new(build_cap_grid(&cap, 8, 16).unwrap());
        let h = FieldSamples::from_fn(c, |_| 1.0);
        assert!(surface_potential_corrected(&h, &cap.center(), 12).is_err());
    }

    #[test]
    fn dirichlet_constant() {
        let cap = SphericalCap::new(UnitVector::from_xyz(0.4, 0.4, 0.2), 0.7).unwrap();
        let b = Arc::new(build_boundary_grid(&cap, 128).unwrap());
        let f = FieldSamples::from_fn(b, |_| 1.0);
        for xi in [cap.center(), UnitVector::from_xyz(0.5, 0.3, 0.3)] {
            assert_abs_diff_eq!(dirichlet_solve_cap(&cap, &f, &xi).unwrap(), 1.0, epsilon = 1e-12);
        }
        let edge = crate::geometry::boundary_frame(&cap, 0.3).eta;
        assert!(matches!(dirichlet_solve_cap(&cap, &f, &edge), Err(Error::NearBoundary { .. })));
    }

    #[test]
    fn neumann_trivial_cases() {
        let cap = SphericalCap::new(UnitVector::e3(), 0.9).unwrap();
        let b = Arc::new(build_boundary_grid(&cap, 64).unwrap());
        let zero = FieldSamples::from_fn(b.clone(), |_| 0.0);
        let xi = UnitVector::from_xyz(0.1, 0.2, 0.9);
        assert_eq!(neumann_solve_cap(&cap, &zero, 0.25, &xi).unwrap(), 0.25);
        let one = FieldSamples::from_fn(b, |_| 1.0);
        assert!(matches!(neumann_solve_cap(&cap, &one, 0.0, &xi), Err(Error::Compatibility(_))));
    }

    #[test]
    fn mvp_constants_and_negative_control() {
        let cap = SphericalCap::new(UnitVector::from_xyz(0.1, -0.3, 0.5), 0.3).unwrap();
        assert!(mvp_residual(|_| 2.5, &cap, Mvp::I, ProbeRule::default()).unwrap() < 1e-12);
        assert!(mvp_residual(|_| 2.5, &cap, Mvp::II, ProbeRule::default()).unwrap() < 1e-12);
        let a = Vec3::new(0.6, 0.0, 0.8);
        assert!(mvp_residual(|e| e.dot(&a).powi(2), &cap, Mvp::II, ProbeRule::default()).unwrap() > 1e-6);
    }

    #[test]
    fn max_principle_inner_harmonics() {
        let cap = SphericalCap::new(UnitVector::from_xyz(0.0, 0.6, 0.8), 0.9).unwrap();
        for n in 0..=5 {
            let h = InnerHarmonicIndex::new(cap, n, 1).unwrap();
            assert!(max_principle_check(|e| inner_harmonic_eval(&h, e).unwrap(), &cap, 16, 32, 128).unwrap());
        }
        assert!(!max_principle_check(|e| -(e.dot(&cap.center()) - 0.55).powi(2), &cap, 16, 32, 128).unwrap());
    }

    #[test]
    fn invert_zero_field() {
        let cap = SphericalCap::new(UnitVector::e3(), 0.5).unwrap();
        let g = Arc::new(build_cap_grid(&cap, 8, 16).unwrap());
        let f = FieldSamples::tangential_from_fn(g, |_| Vec3::zeros());
        let v = invert_gradient(&Domain::Cap(cap), &f, DerivMode::Grad, 8, &cap.center()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn report_errors() {
        let p = vec![UnitVector::e1(), UnitVector::e2()];
        let r = SolveReport::new(p, vec![1.0, 2.0]).with_oracle(vec![1.0, 1.0]);
        assert_eq!(r.sup_error, Some(1.0));
        assert_abs_diff_eq!(r.rel_l2_error.unwrap(), (0.5f64).sqrt(), epsilon = 1e-15);
    }
}
