//! Fundamental systems on caps and the method of fundamental solutions.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{boundary_frame, BoundaryPoint, SphericalCap, UnitVector, Vec3};
use crate::harmonics::{inner_harmonic_eval, inner_harmonic_grad, InnerHarmonicIndex};
use crate::kernels::INV_4PI;
use crate::quadrature::{GridKind, QuadratureGrid};

/// Minimum chordal gap 1 − ξ·ξ̄ₖ accepted by the evaluators.
pub const COINCIDENCE_TOL: f64 = 1e-13;

/// Default Tikhonov parameter.
pub const DEFAULT_LAMBDA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// G_k = (1/4π) ln(1 − ξₖ·ξ), G₀ = 1/(4π).
    Gk,
    /// G̃_k = (1/4π) ∂/∂ν(ξ) ln(1 − ξₖ·ξ), G̃₀ = 1/(4π); ν is the cap's
    /// outward meridian field, which is the boundary normal on ∂Γ.
    GkNormal,
    /// G_k − (1/4π) ln(1 − ξ·ξ̄), harmonic in Γ.
    GkMod,
    /// H_{n,k} of the source cap, ordered H_{0,1}, H_{1,1}, H_{1,2}, H_{2,1}, …
    InnerHarmonic,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gk" => Ok(Variant::Gk),
            "gk-normal" => Ok(Variant::GkNormal),
            "gk-mod" => Ok(Variant::GkMod),
            "inner-harmonic" => Ok(Variant::InnerHarmonic),
            _ => Err(Error::InvalidParameter(format!("unknown fundamental system {s:?}"))),
        }
    }
}

/// Basis {Φ_k} for a target cap Γ: either source points outside Γ̄ or
/// inner harmonics of a larger concentric cap.
#[derive(Debug, Clone)]
pub struct FundamentalSystem {
    cap: SphericalCap,
    variant: Variant,
    sources: Vec<UnitVector>,
    xbar: UnitVector,
    include_constant: bool,
    harmonics: Vec<InnerHarmonicIndex>,
}

impl FundamentalSystem {
    /// General system; `sources` must lie outside Γ̄ and so must ξ̄.
    pub fn new(
        cap: SphericalCap,
        variant: Variant,
        sources: Vec<UnitVector>,
        xbar: UnitVector,
        include_constant: bool,
    ) -> Result<Self> {
        for s in &sources {
            if !(s.one_minus_dot(&cap.center()) > cap.radius()) {
                return Err(Error::InsideCap);
            }
        }
        if variant == Variant::GkMod && !(xbar.one_minus_dot(&cap.center()) > cap.radius()) {
            return Err(Error::InsideCap);
        }
        Ok(FundamentalSystem {
            cap,
            variant,
            sources,
            xbar,
            include_constant,
            harmonics: Vec::new(),
        })
    }

    /// `m` basis functions: the constant G₀ (when included) followed by
    /// sources equispaced on ∂Γ_ρ̄(ζ), offset by half a step from φ = 0.
    pub fn on_circle(
        cap: SphericalCap,
        variant: Variant,
        rho_bar: f64,
        m: usize,
        include_constant: bool,
    ) -> Result<Self> {
        if !(rho_bar > cap.radius() && rho_bar < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "source radius {rho_bar} must lie in ({}, 2)",
                cap.radius()
            )));
        }
        let outer = SphericalCap::new(cap.center(), rho_bar)?;
        if variant == Variant::InnerHarmonic {
            let mut harmonics = Vec::with_capacity(m);
            let mut n = 0;
            while harmonics.len() < m {
                for k in 1..=if n == 0 { 1 } else { 2 } {
                    if harmonics.len() < m {
                        harmonics.push(InnerHarmonicIndex::new(outer, n, k)?);
                    }
                }
                n += 1;
            }
            return Ok(FundamentalSystem {
                cap,
                variant,
                sources: Vec::new(),
                xbar: cap.center().neg(),
                include_constant: true,
                harmonics,
            });
        }
        let n_src = if include_constant { m.saturating_sub(1) } else { m };
        let sources = (0..n_src)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_src as f64;
                boundary_frame(&outer, phi).eta
            })
            .collect();
        Self::new(cap, variant, sources, cap.center().neg(), include_constant)
    }

    pub fn cap(&self) -> SphericalCap {
        self.cap
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn sources(&self) -> &[UnitVector] {
        &self.sources
    }

    pub fn xbar(&self) -> UnitVector {
        self.xbar
    }

    pub fn len(&self) -> usize {
        match self.variant {
            Variant::InnerHarmonic => self.harmonics.len(),
            _ => self.sources.len() + usize::from(self.include_constant),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Outward meridian direction at ξ (the boundary normal on ∂Γ).
    fn meridian(&self, xi: &UnitVector) -> Result<Vec3> {
        let z = self.cap.center().into_vec();
        let x = xi.into_vec();
        let v = x * x.dot(&z) - z;
        let n = v.norm();
        if n < 1e-14 {
            return Err(Error::Coincidence);
        }
        Ok(v / n)
    }

    fn gap(&self, a: &UnitVector, xi: &UnitVector) -> Result<f64> {
        let g = a.one_minus_dot(xi);
        if g < COINCIDENCE_TOL {
            return Err(Error::Coincidence);
        }
        Ok(g)
    }

    /// ∇*_ξ (1/4π) ln(1 − a·ξ).
    fn log_grad(&self, a: &UnitVector, xi: &UnitVector) -> Result<Vec3> {
        let g = self.gap(a, xi)?;
        let x = xi.into_vec();
        let av = a.into_vec();
        Ok(-INV_4PI * (av - av.dot(&x) * x) / g)
    }

    fn source_index(&self, k: usize) -> Option<usize> {
        if self.include_constant {
            k.checked_sub(1)
        } else {
            Some(k)
        }
    }

    fn value(&self, k: usize, xi: &UnitVector) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!("basis index {k} out of range")));
        }
        if self.variant == Variant::InnerHarmonic {
            return inner_harmonic_eval(&self.harmonics[k], xi);
        }
        let s = match self.source_index(k) {
            None => return Ok(INV_4PI),
            Some(s) => &self.sources[s],
        };
        match self.variant {
            Variant::Gk => Ok(INV_4PI * self.gap(s, xi)?.ln()),
            Variant::GkMod => {
                Ok(INV_4PI * (self.gap(s, xi)?.ln() - self.gap(&self.xbar, xi)?.ln()))
            }
            Variant::GkNormal => Ok(self.meridian(xi)?.dot(&self.log_grad(s, xi)?)),
            Variant::InnerHarmonic => unreachable!(),
        }
    }

    fn grad(&self, k: usize, xi: &UnitVector) -> Result<Vec3> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!("basis index {k} out of range")));
        }
        if self.variant == Variant::InnerHarmonic {
            return inner_harmonic_grad(&self.harmonics[k], xi);
        }
        let s = match self.source_index(k) {
            None => return Ok(Vec3::zeros()),
            Some(s) => self.sources[s],
        };
        match self.variant {
            Variant::Gk => self.log_grad(&s, xi),
            Variant::GkMod => Ok(self.log_grad(&s, xi)? - self.log_grad(&self.xbar, xi)?),
            Variant::GkNormal => {
                // central difference of the smooth extension along a geodesic pair
                let frame = crate::geometry::rotation_to_pole(xi);
                let h: f64 = 1e-5;
                let mut g = Vec3::zeros();
                for c in 0..2 {
                    let d = frame.col(c);
                    let x = xi.into_vec();
                    let p = UnitVector::new(x * h.cos() + d * h.sin());
                    let q = UnitVector::new(x * h.cos() - d * h.sin());
                    g += d * (self.value(k, &p)? - self.value(k, &q)?) / (2.0 * h);
                }
                Ok(g)
            }
            Variant::InnerHarmonic => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisMode {
    Value,
    /// Derivative along the given tangent direction (the normal ν on ∂Γ).
    Normal(Vec3),
}

/// Φ_k(ξ) or its derivative along a tangent direction.
pub fn basis_eval(system: &FundamentalSystem, k: usize, xi: &UnitVector, mode: BasisMode) -> Result<f64> {
    match mode {
        BasisMode::Value => system.value(k, xi),
        BasisMode::Normal(n) => Ok(n.dot(&system.grad(k, xi)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMode {
    Interpolation,
    Tikhonov(f64),
}

/// Whether the boundary samples are values (DP) or normal derivatives (NP).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone)]
pub struct MfsSolution {
    pub system: FundamentalSystem,
    pub coefficients: Vec<f64>,
    pub mode: FitMode,
    pub data: DataKind,
    /// ∞-norm of the collocation residual.
    pub residual: f64,
    /// σ_max / σ_min of the collocation matrix.
    pub condition: f64,
}

fn collocation_matrix(
    system: &FundamentalSystem,
    frames: &[BoundaryPoint],
    data: DataKind,
) -> Result<DMatrix<f64>> {
    let n = system.len();
    let rows: Vec<Result<Vec<f64>>> = frames
        .par_iter()
        .map(|b| {
            let mode = match data {
                DataKind::Dirichlet => BasisMode::Value,
                DataKind::Neumann => BasisMode::Normal(b.nu),
            };
            (0..n).map(|k| basis_eval(system, k, &b.eta, mode)).collect()
        })
        .collect();
    let mut a = DMatrix::zeros(frames.len(), n);
    for (i, r) in rows.into_iter().enumerate() {
        for (k, v) in r?.into_iter().enumerate() {
            a[(i, k)] = v;
        }
    }
    Ok(a)
}

/// Fits Σ a_k Φ_k to boundary data on the collocation grid.
pub fn mfs_fit(
    system: &FundamentalSystem,
    collocation: &Arc<QuadratureGrid>,
    f: &[f64],
    mode: FitMode,
    data: DataKind,
) -> Result<MfsSolution> {
    match collocation.kind() {
        GridKind::BoundaryLine(_) => {}
        _ => {
            return Err(Error::WrongKind {
                expected: "boundary collocation grid",
            })
        }
    }
    if f.len() != collocation.len() {
        return Err(Error::LengthMismatch {
            expected: collocation.len(),
            found: f.len(),
        });
    }
    let n = system.len();
    let m = f.len();
    match mode {
        FitMode::Interpolation if m != n => {
            return Err(Error::LengthMismatch { expected: n, found: m })
        }
        FitMode::Tikhonov(l) if !(l >= 0.0) => {
            return Err(Error::InvalidParameter(format!("λ = {l}")))
        }
        FitMode::Tikhonov(_) if m < n => {
            return Err(Error::LengthMismatch { expected: n, found: m })
        }
        _ => {}
    }
    let a = collocation_matrix(system, collocation.frames(), data)?;
    let rhs = DVector::from_column_slice(f);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let coef = match mode {
        FitMode::Interpolation => {
            if !(condition < 1e15) {
                return Err(Error::SingularSystem(format!(
                    "collocation matrix condition {condition:.3e}; use Tikhonov regularization"
                )));
            }
            a.clone()
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::SingularSystem("use Tikhonov regularization".into()))?
        }
        FitMode::Tikhonov(lambda) => {
            let u = svd.u.as_ref().expect("U requested");
            let v_t = svd.v_t.as_ref().expect("Vᵀ requested");
            let mut proj = u.transpose() * &rhs;
            for (p, s) in proj.iter_mut().zip(svd.singular_values.iter()) {
                let d = s * s + lambda;
                *p = if d > 0.0 { *p * s / d } else { 0.0 };
            }
            v_t.transpose() * proj
        }
    };
    if coef.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularSystem("non-finite coefficients".into()));
    }
    let residual = (&a * &coef - &rhs).amax();
    Ok(MfsSolution {
        system: system.clone(),
        coefficients: coef.as_slice().to_vec(),
        mode,
        data,
        residual,
        condition,
    })
}

/// Σ a_k Φ_k(ξ).
pub fn mfs_eval(sol: &MfsSolution, xi: &UnitVector) -> Result<f64> {
    let mut terms = Vec::with_capacity(sol.coefficients.len());
    for (k, a) in sol.coefficients.iter().enumerate() {
        terms.push(a * basis_eval(&sol.system, k, xi, BasisMode::Value)?);
    }
    Ok(crate::quadrature::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_boundary_grid;
    use crate::solvers::beltrami_fd;
    use approx::assert_abs_diff_eq;

    fn cap() -> SphericalCap {
        SphericalCap::new(UnitVector::e3(), 0.9).unwrap()
    }

    #[test]
    fn gk_mod_cancels_at_regularization_point() {
        let c = cap();
        let s = FundamentalSystem::new(c, Variant::GkMod, vec![c.center().neg()], c.center().neg(), true)
            .unwrap();
        let x = UnitVector::from_xyz(0.2, 0.1, 0.9);
        assert_eq!(basis_eval(&s, 1, &x, BasisMode::Value).unwrap(), 0.0);
        assert_abs_diff_eq!(basis_eval(&s, 0, &x, BasisMode::Value).unwrap(), INV_4PI);
    }

    #[test]
    fn gk_at_antipode_of_source() {
        let c = cap();
        let src = UnitVector::from_xyz(0.0, 0.0, -1.0);
        let s = FundamentalSystem::new(c, Variant::Gk, vec![src], src, true).unwrap();
        let v = basis_eval(&s, 1, &UnitVector::e3(), BasisMode::Value).unwrap();
        assert_abs_diff_eq!(v, INV_4PI * 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn gk_mod_is_harmonic() {
        let s = FundamentalSystem::on_circle(cap(), Variant::GkMod, 0.905, 9, true).unwrap();
        let x = UnitVector::from_xyz(0.3, -0.2, 0.8);
        for k in 1..s.len() {
            let lap = beltrami_fd(|p| basis_eval(&s, k, p, BasisMode::Value).unwrap(), &x, 1e-3);
            assert!(lap.abs() < 1e-3, "{k}: {lap}");
        }
    }

    #[test]
    fn sources_must_be_outside() {
        let c = cap();
        let inside = UnitVector::from_xyz(0.1, 0.0, 1.0);
        assert!(FundamentalSystem::new(c, Variant::Gk, vec![inside], c.center().neg(), true).is_err());
    }

    #[test]
    fn recovers_unit_coefficients() {
        let c = SphericalCap::new(UnitVector::e3(), 0.5).unwrap();
        let s = FundamentalSystem::on_circle(c, Variant::GkMod, 0.8, 6, true).unwrap();
        let g = Arc::new(build_boundary_grid(&c, 24).unwrap());
        for target in 0..s.len() {
            let f: Vec<f64> = g
                .nodes()
                .iter()
                .map(|x| basis_eval(&s, target, x, BasisMode::Value).unwrap())
                .collect();
            let sol = mfs_fit(&s, &g, &f, FitMode::Tikhonov(0.0), DataKind::Dirichlet).unwrap();
            assert!(sol.residual < 1e-10);
            for (k, a) in sol.coefficients.iter().enumerate() {
                let e = if k == target { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(*a, e, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn zero_coefficients_evaluate_to_zero() {
        let s = FundamentalSystem::on_circle(cap(), Variant::Gk, 0.95, 8, true).unwrap();
        let g = Arc::new(build_boundary_grid(&cap(), 8).unwrap());
        let sol = mfs_fit(&s, &g, &[0.0; 8], FitMode::Interpolation, DataKind::Dirichlet).unwrap();
        assert_eq!(mfs_eval(&sol, &UnitVector::e3()).unwrap(), 0.0);
    }

    #[test]
    fn inner_harmonic_ordering() {
        let s = FundamentalSystem::on_circle(cap(), Variant::InnerHarmonic, 1.0, 4, true).unwrap();
        assert_eq!(s.len(), 4);
        let x = UnitVector::from_xyz(0.3, 0.0, 0.95);
        let lap = beltrami_fd(|p| basis_eval(&s, 3, p, BasisMode::Value).unwrap(), &x, 1e-3);
        assert!(lap.abs() < 1e-3);
    }
}
