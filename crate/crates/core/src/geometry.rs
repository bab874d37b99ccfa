//! Points, caps, rotations, stereographic projection, boundary frames and the
//! Kelvin-type reflection at a cap boundary.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance for the antipode guard of the stereographic projection.
pub const ANTIPODE_TOL: f64 = 1e-14;

/// Margin used by solver preconditions to decide "strictly interior".
pub const INTERIOR_MARGIN: f64 = 1e-14;

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector(Vec3);

impl UnitVector {
    /// Normalizes `v`. Panics on the zero vector.
    pub fn new(v: Vec3) -> Self {
        let n = v.norm();
        assert!(n > 0.0 && n.is_finite(), "cannot normalize {v:?}");
        UnitVector(v / n)
    }

    pub fn try_new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if n > 0.0 && n.is_finite() {
            Ok(UnitVector(v / n))
        } else {
            Err(Error::InvalidParameter(format!("cannot normalize {v:?}")))
        }
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn e1() -> Self {
        UnitVector(Vec3::x())
    }

    pub fn e2() -> Self {
        UnitVector(Vec3::y())
    }

    pub fn e3() -> Self {
        UnitVector(Vec3::z())
    }

    /// Geographic coordinates in degrees.
    pub fn from_lon_lat_deg(lon: f64, lat: f64) -> Self {
        let (lo, la) = (lon.to_radians(), lat.to_radians());
        Self::new(Vec3::new(la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()))
    }

    /// (longitude, latitude) in degrees; longitude in (−180, 180].
    pub fn lon_lat_deg(&self) -> (f64, f64) {
        let v = self.0;
        let lat = v.z.clamp(-1.0, 1.0).asin().to_degrees();
        let lon = v.y.atan2(v.x).to_degrees();
        (lon, lat)
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_vec(self) -> Vec3 {
        self.0
    }

    /// Inner product with a unit vector or a plain 3-vector.
    pub fn dot<V: AsVec3>(&self, other: &V) -> f64 {
        self.0.dot(other.as_vec3())
    }

    /// `1 − self·other`, computed as ½|self − other|² to keep relative precision
    /// for nearby points.
    pub fn one_minus_dot(&self, other: &UnitVector) -> f64 {
        0.5 * (self.0 - other.0).norm_squared()
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(-self.0)
    }
}

pub trait AsVec3 {
    fn as_vec3(&self) -> &Vec3;
}

impl AsVec3 for Vec3 {
    fn as_vec3(&self) -> &Vec3 {
        self
    }
}

impl AsVec3 for UnitVector {
    fn as_vec3(&self) -> &Vec3 {
        &self.0
    }
}

impl std::ops::Deref for UnitVector {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

/// The cap Γ_ρ(ζ) = {η : 1 − η·ζ < ρ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCap {
    center: UnitVector,
    radius: f64,
}

impl SphericalCap {
    pub fn new(center: UnitVector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "cap radius must lie in (0, 2), got {radius}"
            )));
        }
        Ok(SphericalCap { center, radius })
    }

    pub fn center(&self) -> UnitVector {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// √(ρ(2−ρ)): the Euclidean radius of the boundary circle.
    pub fn s(&self) -> f64 {
        (self.radius * (2.0 - self.radius)).sqrt()
    }

    /// Angular radius of the cap, in radians.
    pub fn angular_radius(&self) -> f64 {
        (1.0 - self.radius).clamp(-1.0, 1.0).acos()
    }

    /// 1 − ξ·ζ.
    pub fn depth(&self, xi: &UnitVector) -> f64 {
        xi.one_minus_dot(&self.center)
    }

    pub fn contains(&self, xi: &UnitVector) -> bool {
        self.depth(xi) < self.radius
    }

    pub fn contains_strictly(&self, xi: &UnitVector, margin: f64) -> bool {
        self.depth(xi) < self.radius - margin
    }

    /// Concentric cap with radius scaled by `factor` (the 0.8ρ error-reporting cap).
    pub fn shrunk(&self, factor: f64) -> SphericalCap {
        SphericalCap {
            center: self.center,
            radius: self.radius * factor,
        }
    }

    pub fn frame(&self) -> RotationFrame {
        rotation_to_pole(&self.center)
    }

    /// Geodesic curvature of the boundary circle, (1−ρ)/√(ρ(2−ρ)).
    pub fn geodesic_curvature(&self) -> f64 {
        (1.0 - self.radius) / self.s()
    }
}

/// Area 2πρ and circumference 2π√(ρ(2−ρ)).
pub fn cap_metrics(cap: &SphericalCap) -> (f64, f64) {
    (2.0 * PI * cap.radius(), 2.0 * PI * cap.s())
}

/// Orthonormal, right-handed frame with `t ε³ = ζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFrame {
    pub t: Matrix3<f64>,
}

impl RotationFrame {
    pub fn col(&self, i: usize) -> Vec3 {
        self.t.column(i).into_owned()
    }

    /// Maps local coordinates (a, b, c) to a · tε¹ + b · tε² + c · tε³.
    pub fn apply(&self, local: &Vec3) -> Vec3 {
        self.t * local
    }
}

fn minimal_rotation(from: &Vec3, to: &Vec3) -> Matrix3<f64> {
    let v = from.cross(to);
    let c = from.dot(to);
    let k = Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0);
    Matrix3::identity() + k + k * k / (1.0 + c)
}

pub fn rotation_to_pole(zeta: &UnitVector) -> RotationFrame {
    let z = zeta.into_vec();
    let t = if z.z > -0.5 {
        minimal_rotation(&Vec3::z(), &z)
    } else {
        let flip = Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0));
        minimal_rotation(&(-Vec3::z()), &z) * flip
    };
    RotationFrame { t }
}

/// Stereographic coordinates of ξ with respect to the pole ζ.
pub fn stereographic_project(zeta: &UnitVector, xi: &UnitVector) -> Result<[f64; 2]> {
    stereographic_in_frame(&rotation_to_pole(zeta), zeta, xi)
}

pub(crate) fn stereographic_in_frame(
    frame: &RotationFrame,
    pole: &UnitVector,
    xi: &UnitVector,
) -> Result<[f64; 2]> {
    let denom = 0.5 * (xi.into_vec() + pole.into_vec()).norm_squared();
    if denom < ANTIPODE_TOL {
        return Err(Error::Antipode);
    }
    let f = 2.0 / denom;
    Ok([f * xi.dot(&frame.col(0)), f * xi.dot(&frame.col(1))])
}

/// Inverse of [`stereographic_project`].
pub fn stereographic_inverse(zeta: &UnitVector, p: [f64; 2]) -> UnitVector {
    let frame = rotation_to_pole(zeta);
    let r2 = p[0] * p[0] + p[1] * p[1];
    let z = (4.0 - r2) / (4.0 + r2);
    let h = 0.5 * (1.0 + z);
    UnitVector::new(frame.apply(&Vec3::new(p[0] * h, p[1] * h, z)))
}

/// A node of ∂Γ with its tangent/normal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub eta: UnitVector,
    /// Positively oriented tangent, τ = η × ν.
    pub tau: Vec3,
    /// Outward unit normal.
    pub nu: Vec3,
    pub phi: f64,
}

pub fn boundary_frame(cap: &SphericalCap, phi: f64) -> BoundaryPoint {
    boundary_frame_with(cap, &cap.frame(), phi)
}

pub(crate) fn boundary_frame_with(
    cap: &SphericalCap,
    frame: &RotationFrame,
    phi: f64,
) -> BoundaryPoint {
    let rho = cap.radius();
    let s = cap.s();
    let zeta = *cap.center().as_vec();
    let (sp, cp) = phi.sin_cos();
    let eta_v = (1.0 - rho) * zeta + s * (cp * frame.col(0) + sp * frame.col(1));
    let eta = UnitVector::new(eta_v);
    let nu = ((1.0 - rho) * eta.into_vec() - zeta) / s;
    let tau = eta.cross(&nu);
    BoundaryPoint {
        eta,
        tau,
        nu,
        phi: phi.rem_euclid(2.0 * PI),
    }
}

/// Image point ξ̌ and scale ř with 1 − ξ·η = ř(1 − ξ̌·η) on ∂Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub point: UnitVector,
    pub scale: f64,
}

pub fn reflect(cap: &SphericalCap, xi: &UnitVector) -> Result<Reflection> {
    if !cap.contains(xi) {
        return Err(Error::OutsideCap);
    }
    Ok(reflect_unchecked(cap, xi))
}

pub(crate) fn reflect_unchecked(cap: &SphericalCap, xi: &UnitVector) -> Reflection {
    let rho = cap.radius();
    let s2 = rho * (2.0 - rho);
    let d = cap.depth(xi);
    // 1 + 2t(ρ−1) + (ρ−1)² = ρ² + 2(1−ρ)(1−t)
    let scale = (rho * rho + 2.0 * (1.0 - rho) * d) / s2;
    let c2 = 2.0 * (rho - d) / (scale * s2);
    let point = UnitVector::new(xi.into_vec() / scale - c2 * cap.center().into_vec());
    Reflection { point, scale }
}
