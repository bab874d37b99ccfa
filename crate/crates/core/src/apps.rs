//! Vertical deflections, geostrophic flow and point vortices on caps, each
//! with a synthetic forward model and an analytic oracle.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{SphericalCap, UnitVector, Vec3};
use crate::harmonics::{sh_eval, sh_grad_eval, ShCoefficients};
use crate::kernels::{fundamental, KernelSpec, INV_4PI};
use crate::mfs::{mfs_eval, mfs_fit, DataKind, FitMode, FundamentalSystem, Variant};
use crate::quadrature::{build_boundary_grid, FieldSamples, GridKind, QuadratureGrid};
use crate::solvers::{evaluate_at, invert_gradient, DerivMode, Domain, SolveReport};

/// Minimum |ξ·ε³| over the cap closure for the geostrophic inversion.
pub const EQUATOR_GUARD: f64 = 0.15;

/// R, GM, |w| and G; dimensionless (all 1) by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub radius: f64,
    pub gm: f64,
    pub omega: f64,
    pub gravity: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            radius: 1.0,
            gm: 1.0,
            omega: 1.0,
            gravity: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("R", self.radius),
            ("GM", self.gm),
            ("|w|", self.omega),
            ("G", self.gravity),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn cap_of(grid: &QuadratureGrid) -> Result<SphericalCap> {
    match grid.kind() {
        GridKind::CapArea(c) => Ok(c),
        _ => Err(Error::WrongKind { expected: "cap grid" }),
    }
}

/// Samples T and Θ = −(R/GM)∇*T on the cap grid.
pub fn vd_forward(
    t: &ShCoefficients,
    grid: &Arc<QuadratureGrid>,
    k: &PhysicalConstants,
) -> Result<(FieldSamples, FieldSamples)> {
    k.validate()?;
    cap_of(grid)?;
    let ts = FieldSamples::from_fn(grid.clone(), |x| sh_eval(t, x));
    let s = -k.radius / k.gm;
    let theta = FieldSamples::tangential_from_fn(grid.clone(), |x| s * sh_grad_eval(t, x));
    Ok((ts, theta))
}

/// T_J(Rξ) = T_mean + (GM/R) ∫ ∇*_η G_N^J(ξ, η)·Θ(η) dω(η) at the probes.
pub fn vd_reconstruct(
    theta: &FieldSamples,
    j: u32,
    t_mean: f64,
    probes: &[UnitVector],
    k: &PhysicalConstants,
) -> Result<SolveReport> {
    k.validate()?;
    let cap = cap_of(theta.grid())?;
    theta.as_tangential()?;
    let domain = Domain::Cap(cap);
    let s = k.gm / k.radius;
    let values = evaluate_at(probes, |x| {
        Ok(t_mean - s * invert_gradient(&domain, theta, DerivMode::Grad, j, x)?)
    })?;
    Ok(SolveReport::new(probes.to_vec(), values)
        .param("app", "vertical-deflections")
        .param("J", j)
        .param("rho", cap.radius()))
}

fn equator_clearance(cap: &SphericalCap) -> f64 {
    // |ξ·ε³| over the closed cap: the extreme latitudes of the cap.
    let (_, lat) = cap.center().lon_lat_deg();
    let a = cap.angular_radius();
    let c = lat.to_radians();
    let hi = c + a;
    let lo = c - a;
    if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        lo.sin().abs().min(hi.sin().abs())
    }
}

fn check_equator(cap: &SphericalCap) -> Result<()> {
    let c = equator_clearance(cap);
    if c < EQUATOR_GUARD {
        return Err(Error::EquatorProximity(c));
    }
    Ok(())
}

/// Samples H and v = G L*H / (2R|w|(ξ·ε³)) on the cap grid.
pub fn geo_forward(
    h: &ShCoefficients,
    grid: &Arc<QuadratureGrid>,
    k: &PhysicalConstants,
) -> Result<(FieldSamples, FieldSamples)> {
    k.validate()?;
    check_equator(&cap_of(grid)?)?;
    let hs = FieldSamples::from_fn(grid.clone(), |x| sh_eval(h, x));
    let c = k.gravity / (2.0 * k.radius * k.omega);
    let v = FieldSamples::tangential_from_fn(grid.clone(), |x| {
        c * x.cross(&sh_grad_eval(h, x)) / x.z
    });
    Ok((hs, v))
}

/// H_J(Rξ) = H_mean − (2R|w|/G) ∫ (η·ε³)(L*_η G_N^J(ξ, η))·v(η) dω(η).
pub fn geo_reconstruct(
    v: &FieldSamples,
    j: u32,
    h_mean: f64,
    probes: &[UnitVector],
    k: &PhysicalConstants,
) -> Result<SolveReport> {
    k.validate()?;
    let cap = cap_of(v.grid())?;
    check_equator(&cap)?;
    let vals = v.as_tangential()?;
    let weighted: Vec<Vec3> = vals
        .iter()
        .zip(v.grid().nodes())
        .map(|(a, x)| a * x.z)
        .collect();
    let g = FieldSamples::vector(v.grid().clone(), weighted, true)?;
    let domain = Domain::Cap(cap);
    let c = 2.0 * k.radius * k.omega / k.gravity;
    let values = evaluate_at(probes, |x| {
        Ok(h_mean + c * invert_gradient(&domain, &g, DerivMode::Curl, j, x)?)
    })?;
    Ok(SolveReport::new(probes.to_vec(), values)
        .param("app", "geostrophic")
        .param("J", j)
        .param("rho", cap.radius()))
}

/// Point vortices η_i with strengths ω̄_i inside a cap; ξ̄ outside.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexSet {
    pub centers: Vec<UnitVector>,
    pub strengths: Vec<f64>,
    pub xbar: UnitVector,
}

impl VortexSet {
    pub fn new(
        cap: &SphericalCap,
        centers: Vec<UnitVector>,
        strengths: Vec<f64>,
        xbar: UnitVector,
    ) -> Result<Self> {
        if centers.len() != strengths.len() {
            return Err(Error::LengthMismatch {
                expected: centers.len(),
                found: strengths.len(),
            });
        }
        for (i, c) in centers.iter().enumerate() {
            if !cap.contains_strictly(c, 0.0) {
                return Err(Error::OutsideCap);
            }
            if centers[..i].iter().any(|d| d.one_minus_dot(c) < 1e-14) {
                return Err(Error::Coincidence);
            }
        }
        if cap.contains(&xbar) {
            return Err(Error::InsideCap);
        }
        Ok(VortexSet {
            centers,
            strengths,
            xbar,
        })
    }

    /// N seeded vortices, uniform in area on the concentric cap of radius
    /// `spread`·ρ, strengths uniform in [−1, 1]; ξ̄ = −ζ.
    pub fn random(cap: &SphericalCap, n: usize, spread: f64, seed: u64) -> Result<Self> {
        if !(spread > 0.0 && spread < 1.0) {
            return Err(Error::InvalidParameter(format!("spread {spread} not in (0, 1)")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = crate::geometry::rotation_to_pole(&cap.center());
        let rmax = spread * cap.radius();
        let mut centers = Vec::with_capacity(n);
        let mut strengths = Vec::with_capacity(n);
        for _ in 0..n {
            let depth = rng.gen_range(0.0..rmax);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = (depth * (2.0 - depth)).sqrt();
            let local = Vec3::new(s * phi.cos(), s * phi.sin(), 1.0 - depth);
            centers.push(UnitVector::new(frame.apply(&local)));
            strengths.push(rng.gen_range(-1.0..=1.0));
        }
        Self::new(cap, centers, strengths, cap.center().neg())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        VortexSet {
            centers: self.centers.clone(),
            strengths: self.strengths.iter().map(|w| w * s).collect(),
            xbar: self.xbar,
        }
    }
}

/// Ψ(Rξ) = Σ (ω̄_i/R) G_D(η_i, ξ).
pub fn vortex_exact(cap: &SphericalCap, v: &VortexSet, xi: &UnitVector, k: &PhysicalConstants) -> Result<f64> {
    let mut s = 0.0;
    for (c, w) in v.centers.iter().zip(&v.strengths) {
        if c.one_minus_dot(xi) < 1e-14 {
            return Err(Error::Coincidence);
        }
        s += w / k.radius * KernelSpec::dirichlet(*cap).at(c)?.value(xi)?;
    }
    Ok(s)
}

/// Σ (ω̄_i/R)[G(ξ·η_i) − (1/4π) ln(1 − ξ·ξ̄)]: the singular part whose
/// boundary trace is the data of the model problem.
pub fn vortex_data(v: &VortexSet, xi: &UnitVector, k: &PhysicalConstants) -> Result<f64> {
    let lbar = v.xbar.one_minus_dot(xi);
    if !(lbar > 0.0) {
        return Err(Error::Coincidence);
    }
    let mut s = 0.0;
    for (c, w) in v.centers.iter().zip(&v.strengths) {
        let g = fundamental(c.dot(xi)).map_err(|_| Error::Coincidence)?;
        s += w / k.radius * (g - INV_4PI * lbar.ln());
    }
    Ok(s)
}

/// MFS settings for [`vortex_mfs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexMfs {
    /// Number of basis functions (G₀ and M − 1 sources).
    pub m: usize,
    pub rho_bar: f64,
    pub lambda: f64,
    /// Collocation nodes per basis function.
    pub oversampling: usize,
}

impl VortexMfs {
    pub fn new(cap: &SphericalCap, m: usize) -> Self {
        VortexMfs {
            m,
            rho_bar: cap.radius() + 0.005,
            lambda: crate::mfs::DEFAULT_LAMBDA,
            oversampling: 4,
        }
    }
}

/// Ψ_{M,N,ρ̄} = data − Ψ̃, with Ψ̃ the gk-mod fit of the boundary data, and
/// errors against [`vortex_exact`] at the probes.
pub fn vortex_mfs(
    cap: &SphericalCap,
    v: &VortexSet,
    opts: VortexMfs,
    probes: &[UnitVector],
    k: &PhysicalConstants,
) -> Result<SolveReport> {
    k.validate()?;
    if opts.oversampling == 0 {
        return Err(Error::InvalidParameter("oversampling must be ≥ 1".into()));
    }
    let system = FundamentalSystem::new(
        *cap,
        Variant::GkMod,
        FundamentalSystem::on_circle(*cap, Variant::GkMod, opts.rho_bar, opts.m, true)?
            .sources()
            .to_vec(),
        v.xbar,
        true,
    )?;
    let coll = Arc::new(build_boundary_grid(cap, opts.m * opts.oversampling)?);
    let data = evaluate_at(coll.nodes(), |x| vortex_data(v, x, k))?;
    let mode = if opts.oversampling == 1 && opts.lambda == 0.0 {
        FitMode::Interpolation
    } else {
        FitMode::Tikhonov(opts.lambda)
    };
    let fit = mfs_fit(&system, &coll, &data, mode, DataKind::Dirichlet)?;
    let values = evaluate_at(probes, |x| Ok(vortex_data(v, x, k)? - mfs_eval(&fit, x)?))?;
    let oracle = evaluate_at(probes, |x| vortex_exact(cap, v, x, k))?;
    let mut r = SolveReport::new(probes.to_vec(), values)
        .with_oracle(oracle)
        .param("app", "vortex")
        .param("M", opts.m)
        .param("rho_bar", opts.rho_bar)
        .param("lambda", opts.lambda)
        .param("N", v.len())
        .param("condition", format!("{:.3e}", fit.condition));
    r.boundary_residual = Some(fit.residual);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::boundary_frame;
    use crate::quadrature::build_cap_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_fields_have_no_deflection_or_flow() {
        let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(165.0, 40.0), 0.1).unwrap();
        let g = Arc::new(build_cap_grid(&cap, 8, 16).unwrap());
        let mut c = ShCoefficients::zeros(2);
        c.set(0, 1, 3.0);
        let k = PhysicalConstants::default();
        let (_, th) = vd_forward(&c, &g, &k).unwrap();
        assert!(th.as_vector().unwrap().iter().all(|v| v.norm() < 1e-14));
        let (_, v) = geo_forward(&c, &g, &k).unwrap();
        assert!(v.as_vector().unwrap().iter().all(|v| v.norm() < 1e-14));
        let probes = vec![cap.center()];
        let r = vd_reconstruct(&th, 10, 2.5, &probes, &k).unwrap();
        assert_eq!(r.values, vec![2.5]);
        let r = geo_reconstruct(&v, 10, -1.0, &probes, &k).unwrap();
        assert_eq!(r.values, vec![-1.0]);
    }

    #[test]
    fn equator_guard() {
        let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(0.0, 5.0), 0.05).unwrap();
        let g = Arc::new(build_cap_grid(&cap, 8, 16).unwrap());
        let c = ShCoefficients::single(2, 1);
        assert!(matches!(
            geo_forward(&c, &g, &PhysicalConstants::default()),
            Err(Error::EquatorProximity(_))
        ));
    }

    #[test]
    fn single_vortex_on_hemisphere() {
        let cap = SphericalCap::new(UnitVector::e3(), 1.0).unwrap();
        let v = VortexSet::new(&cap, vec![UnitVector::e3()], vec![1.0], cap.center().neg()).unwrap();
        let x = UnitVector::from_xyz(0.3, 0.2, 0.6);
        let t = x.z;
        let ex = INV_4PI * ((1.0 - t).ln() - (1.0 + t).ln());
        let k = PhysicalConstants::default();
        assert_abs_diff_eq!(vortex_exact(&cap, &v, &x, &k).unwrap(), ex, epsilon = 1e-14);
        let doubled = vortex_exact(&cap, &v.scaled(2.0), &x, &k).unwrap();
        assert_abs_diff_eq!(doubled, 2.0 * ex, epsilon = 1e-14);
    }

    #[test]
    fn vortex_stream_function_vanishes_on_boundary() {
        let cap = SphericalCap::new(UnitVector::e3(), 0.9).unwrap();
        let v = VortexSet::random(&cap, 5, 0.8, 7).unwrap();
        let k = PhysicalConstants::default();
        for i in 0..8 {
            let b = boundary_frame(&cap, i as f64);
            let x = UnitVector::new(b.eta.into_vec() - 1e-6 * b.nu);
            assert!(vortex_exact(&cap, &v, &x, &k).unwrap().abs() < 1e-6);
        }
    }
}
