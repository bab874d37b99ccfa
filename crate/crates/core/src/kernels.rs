//! The fundamental solution of the Beltrami operator, the Dirichlet and
//! Neumann Green functions of a cap, their regularized variants and their
//! tangential derivatives in the second argument η.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{reflect, BoundaryPoint, Reflection, SphericalCap, UnitVector, Vec3};

pub const INV_4PI: f64 = 1.0 / (4.0 * PI);

/// Guard on 1 − ξ·η for the unregularized kernels.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Additive constant of G: (1/4π)(1 − ln 2).
pub const G_CONST: f64 = INV_4PI * (1.0 - LN_2);

/// G(Δ*; t) = (1/4π) ln(1 − t) + (1/4π)(1 − ln 2).
pub fn fundamental(t: f64) -> Result<f64> {
    let x = 1.0 - t;
    if !(x >= SINGULAR_TOL) {
        return Err(Error::Singularity(x));
    }
    Ok(INV_4PI * x.ln() + G_CONST)
}

/// (1/4π) ln x, or its linear replacement below x = 2^{−J}; returns the
/// value and the derivative in x.
#[inline]
fn log_branch(x: f64, scale: Option<u32>) -> Result<(f64, f64)> {
    if let Some(j) = scale {
        let eps = (-(j as f64)).exp2();
        if x < eps {
            let s = INV_4PI / eps;
            return Ok((s * x - INV_4PI * j as f64 * LN_2 - INV_4PI, s));
        }
    } else if !(x >= SINGULAR_TOL) {
        return Err(Error::Singularity(x));
    }
    Ok((INV_4PI * x.ln(), INV_4PI / x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Fundamental,
    DirichletCap,
    NeumannCap,
}

/// Which kernel to evaluate: `G`, `G_D` or `G_N`, optionally regularized at
/// scale J (the first logarithm replaced by its linear branch below 2^{−J}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub cap: Option<SphericalCap>,
    pub scale: Option<u32>,
}

impl KernelSpec {
    pub fn fundamental() -> Self {
        KernelSpec {
            kind: KernelKind::Fundamental,
            cap: None,
            scale: None,
        }
    }

    pub fn dirichlet(cap: SphericalCap) -> Self {
        KernelSpec {
            kind: KernelKind::DirichletCap,
            cap: Some(cap),
            scale: None,
        }
    }

    pub fn neumann(cap: SphericalCap) -> Self {
        KernelSpec {
            kind: KernelKind::NeumannCap,
            cap: Some(cap),
            scale: None,
        }
    }

    pub fn regularized(mut self, j: u32) -> Self {
        self.scale = Some(j);
        self
    }

    /// Fixes the first argument ξ; cap kernels require ξ inside the cap.
    pub fn at(&self, xi: &UnitVector) -> Result<KernelAt> {
        let refl = match (self.kind, self.cap) {
            (KernelKind::Fundamental, _) => None,
            (_, Some(cap)) => Some(reflect(&cap, xi)?),
            (_, None) => {
                return Err(Error::InvalidParameter("cap kernel without a cap".into()))
            }
        };
        Ok(KernelAt {
            spec: *self,
            xi: *xi,
            refl,
        })
    }
}

/// A kernel with its first argument fixed.
#[derive(Debug, Clone, Copy)]
pub struct KernelAt {
    spec: KernelSpec,
    xi: UnitVector,
    refl: Option<Reflection>,
}

impl KernelAt {
    pub fn xi(&self) -> UnitVector {
        self.xi
    }

    pub fn value(&self, eta: &UnitVector) -> Result<f64> {
        let (l, _) = log_branch(self.xi.one_minus_dot(eta), self.spec.scale)?;
        Ok(match self.spec.kind {
            KernelKind::Fundamental => l + G_CONST,
            KernelKind::DirichletCap => l - INV_4PI * self.image_log(eta)?,
            KernelKind::NeumannCap => {
                l + INV_4PI * self.image_log(eta)? + self.pole_coeff() * self.pole_log(eta)?
            }
        })
    }

    /// ∇*_η of the kernel.
    pub fn grad(&self, eta: &UnitVector) -> Result<Vec3> {
        let e = eta.into_vec();
        let (_, dl) = log_branch(self.xi.one_minus_dot(eta), self.spec.scale)?;
        let x = self.xi.into_vec();
        let mut g = -dl * (x - x.dot(&e) * e);
        match self.spec.kind {
            KernelKind::Fundamental => {}
            KernelKind::DirichletCap => g -= INV_4PI * self.image_log_grad(eta)?,
            KernelKind::NeumannCap => {
                g += INV_4PI * self.image_log_grad(eta)?;
                g += self.pole_coeff() * self.pole_log_grad(eta)?;
            }
        }
        Ok(g)
    }

    /// L*_η = η × ∇*_η.
    pub fn curl(&self, eta: &UnitVector) -> Result<Vec3> {
        Ok(eta.cross(&self.grad(eta)?))
    }

    /// ν(η)·∇*_η at a boundary point.
    pub fn normal(&self, b: &BoundaryPoint) -> Result<f64> {
        Ok(b.nu.dot(&self.grad(&b.eta)?))
    }

    fn refl(&self) -> &Reflection {
        self.refl.as_ref().expect("cap kernel carries a reflection")
    }

    fn image_log(&self, eta: &UnitVector) -> Result<f64> {
        let r = self.refl();
        let x = r.point.one_minus_dot(eta);
        if !(x > 0.0) {
            return Err(Error::Singularity(x));
        }
        Ok((r.scale * x).ln())
    }

    /// ∇*_η ln(ř(1 − ξ̌·η)).
    fn image_log_grad(&self, eta: &UnitVector) -> Result<Vec3> {
        let r = self.refl();
        let x = r.point.one_minus_dot(eta);
        if !(x > 0.0) {
            return Err(Error::Singularity(x));
        }
        let p = r.point.into_vec();
        let e = eta.into_vec();
        Ok(-(p - p.dot(&e) * e) / x)
    }

    fn pole_coeff(&self) -> f64 {
        let rho = self.spec.cap.expect("cap kernel").radius();
        (1.0 - rho) / (2.0 * PI * rho)
    }

    fn pole_log(&self, eta: &UnitVector) -> Result<f64> {
        let z = self.spec.cap.expect("cap kernel").center();
        let y = 0.5 * (z.into_vec() + eta.into_vec()).norm_squared();
        if !(y > 0.0) {
            return Err(Error::Antipode);
        }
        Ok(y.ln())
    }

    fn pole_log_grad(&self, eta: &UnitVector) -> Result<Vec3> {
        let z = self.spec.cap.expect("cap kernel").center().into_vec();
        let e = eta.into_vec();
        let y = 0.5 * (z + e).norm_squared();
        if !(y > 0.0) {
            return Err(Error::Antipode);
        }
        Ok((z - z.dot(&e) * e) / y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Value,
    Grad,
    Curl,
    /// Normal derivative along the given unit normal at η.
    Normal(Vec3),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelValue {
    Scalar(f64),
    Vector(Vec3),
}

impl KernelValue {
    pub fn scalar(self) -> f64 {
        match self {
            KernelValue::Scalar(v) => v,
            KernelValue::Vector(_) => panic!("vector kernel value used as scalar"),
        }
    }

    pub fn vector(self) -> Vec3 {
        match self {
            KernelValue::Vector(v) => v,
            KernelValue::Scalar(_) => panic!("scalar kernel value used as vector"),
        }
    }
}

fn eval_mode(k: &KernelAt, eta: &UnitVector, mode: Mode) -> Result<KernelValue> {
    Ok(match mode {
        Mode::Value => KernelValue::Scalar(k.value(eta)?),
        Mode::Grad => KernelValue::Vector(k.grad(eta)?),
        Mode::Curl => KernelValue::Vector(k.curl(eta)?),
        Mode::Normal(nu) => KernelValue::Scalar(nu.dot(&k.grad(eta)?)),
    })
}

pub fn fundamental_deriv(xi: &UnitVector, eta: &UnitVector, mode: Mode) -> Result<KernelValue> {
    eval_mode(&KernelSpec::fundamental().at(xi)?, eta, mode)
}

pub fn dirichlet_green(
    cap: &SphericalCap,
    xi: &UnitVector,
    eta: &UnitVector,
    mode: Mode,
) -> Result<KernelValue> {
    eval_mode(&KernelSpec::dirichlet(*cap).at(xi)?, eta, mode)
}

pub fn neumann_green(
    cap: &SphericalCap,
    xi: &UnitVector,
    eta: &UnitVector,
    mode: Mode,
) -> Result<KernelValue> {
    eval_mode(&KernelSpec::neumann(*cap).at(xi)?, eta, mode)
}

pub fn neumann_green_regularized(
    cap: &SphericalCap,
    xi: &UnitVector,
    eta: &UnitVector,
    j: u32,
    mode: Mode,
) -> Result<KernelValue> {
    eval_mode(&KernelSpec::neumann(*cap).regularized(j).at(xi)?, eta, mode)
}
