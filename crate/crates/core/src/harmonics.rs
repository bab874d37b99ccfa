//! Real orthonormal spherical harmonics and inner harmonics of spherical caps.
//!
//! `Y_{n,j}` uses fully normalized associated Legendre functions without the
//! Condon–Shortley phase: `j = 1` is the zonal term, `j = 2m` carries `cos mλ`
//! and `j = 2m + 1` carries `sin mλ`, with `∫_Ω Y_{n,j}² dω = 1`. Degrees are
//! capped at [`MAX_DEGREE`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    stereographic_in_frame, RotationFrame, SphericalCap, UnitVector, Vec3,
};
use crate::quadrature::{pairwise_sum, FieldSamples, GridKind};

pub const MAX_DEGREE: usize = 128;

/// Dense coefficients c_{n,j}, 0 ≤ n ≤ L, 1 ≤ j ≤ 2n+1.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    max_degree: usize,
    data: Vec<f64>,
    seed: Option<u64>,
}

impl ShCoefficients {
    pub fn zeros(max_degree: usize) -> Self {
        assert!(max_degree <= MAX_DEGREE, "degree {max_degree} exceeds {MAX_DEGREE}");
        ShCoefficients {
            max_degree,
            data: vec![0.0; (max_degree + 1) * (max_degree + 1)],
            seed: None,
        }
    }

    /// The single basis function Y_{n,j}.
    pub fn single(n: usize, j: usize) -> Self {
        let mut c = Self::zeros(n);
        c.set(n, j, 1.0);
        c
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn index(n: usize, j: usize) -> usize {
        assert!((1..=2 * n + 1).contains(&j), "order index {j} invalid for degree {n}");
        n * n + j - 1
    }

    pub fn get(&self, n: usize, j: usize) -> f64 {
        if n > self.max_degree {
            return 0.0;
        }
        self.data[Self::index(n, j)]
    }

    pub fn set(&mut self, n: usize, j: usize, v: f64) {
        assert!(n <= self.max_degree);
        let k = Self::index(n, j);
        self.data[k] = v;
    }

    /// Multiplies every degree-n block by `f(n)`.
    pub fn map_degrees(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for n in 0..=self.max_degree {
            let s = f(n);
            for v in &mut out.data[n * n..(n + 1) * (n + 1)] {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &ShCoefficients) -> Self {
        let l = self.max_degree.max(other.max_degree);
        let mut out = Self::zeros(l);
        for n in 0..=l {
            for j in 1..=2 * n + 1 {
                out.set(n, j, self.get(n, j) + other.get(n, j));
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_degrees(|_| s)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.data
    }
}

/// Table of Q_nm(z) = P̄_nm(z)/sin^m θ and its z-derivative for n, m ≤ L.
struct LegendreTable {
    l: usize,
    q: Vec<f64>,
    dq: Vec<f64>,
}

impl LegendreTable {
    fn new(l: usize, z: f64) -> Self {
        let w = l + 1;
        let mut q = vec![0.0; w * w];
        let mut dq = vec![0.0; w * w];
        let at = |n: usize, m: usize| n * w + m;
        let mut qmm = 1.0;
        for m in 0..=l {
            if m == 1 {
                qmm = 3f64.sqrt();
            } else if m > 1 {
                qmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            }
            q[at(m, m)] = qmm;
            if m < l {
                let a = ((2 * m + 3) as f64).sqrt();
                q[at(m + 1, m)] = a * z * qmm;
                dq[at(m + 1, m)] = a * qmm;
            }
            for n in m + 2..=l {
                let (nf, mf) = (n as f64, m as f64);
                let a = ((2.0 * nf - 1.0) * (2.0 * nf + 1.0) / ((nf - mf) * (nf + mf))).sqrt();
                let b = ((2.0 * nf + 1.0) * (nf + mf - 1.0) * (nf - mf - 1.0)
                    / ((nf - mf) * (nf + mf) * (2.0 * nf - 3.0)))
                    .sqrt();
                q[at(n, m)] = a * z * q[at(n - 1, m)] - b * q[at(n - 2, m)];
                dq[at(n, m)] =
                    a * (q[at(n - 1, m)] + z * dq[at(n - 1, m)]) - b * dq[at(n - 2, m)];
            }
        }
        LegendreTable { l, q, dq }
    }

    fn q(&self, n: usize, m: usize) -> f64 {
        self.q[n * (self.l + 1) + m]
    }

    fn dq(&self, n: usize, m: usize) -> f64 {
        self.dq[n * (self.l + 1) + m]
    }
}

/// A_m + iB_m = (x + iy)^m for m ≤ l.
fn sectoral(l: usize, x: f64, y: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; l + 1];
    let mut b = vec![0.0; l + 1];
    a[0] = 1.0;
    for m in 1..=l {
        a[m] = x * a[m - 1] - y * b[m - 1];
        b[m] = x * b[m - 1] + y * a[m - 1];
    }
    (a, b)
}

const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;

pub fn sh_eval(c: &ShCoefficients, xi: &UnitVector) -> f64 {
    let l = c.max_degree;
    let tab = LegendreTable::new(l, xi.z);
    let (a, b) = sectoral(l, xi.x, xi.y);
    let mut sum = 0.0;
    for n in 0..=l {
        sum += c.get(n, 1) * tab.q(n, 0);
        for m in 1..=n {
            sum += tab.q(n, m) * (c.get(n, 2 * m) * a[m] + c.get(n, 2 * m + 1) * b[m]);
        }
    }
    sum * INV_SQRT_4PI
}

pub fn sh_grad_eval(c: &ShCoefficients, xi: &UnitVector) -> Vec3 {
    let l = c.max_degree;
    let tab = LegendreTable::new(l, xi.z);
    let (a, b) = sectoral(l, xi.x, xi.y);
    // Gradient of the polynomial extension Q(z)·A(x, y), then tangential projection.
    let mut g = Vec3::zeros();
    for n in 0..=l {
        g.z += c.get(n, 1) * tab.dq(n, 0);
        for m in 1..=n {
            let (ca, cb) = (c.get(n, 2 * m), c.get(n, 2 * m + 1));
            if ca == 0.0 && cb == 0.0 {
                continue;
            }
            let (q, dq) = (tab.q(n, m), tab.dq(n, m));
            let mf = m as f64;
            let (am1, bm1) = (a[m - 1], b[m - 1]);
            g.x += q * mf * (ca * am1 + cb * bm1);
            g.y += q * mf * (-ca * bm1 + cb * am1);
            g.z += dq * (ca * a[m] + cb * b[m]);
        }
    }
    g *= INV_SQRT_4PI;
    let v = xi.into_vec();
    g - g.dot(&v) * v
}

/// Single basis function Y_{n,j}(ξ).
pub fn sh_basis(n: usize, j: usize, xi: &UnitVector) -> f64 {
    sh_eval(&ShCoefficients::single(n, j), xi)
}

/// All Y_{n,j}(ξ) for n ≤ l, in coefficient storage order (n² + j − 1).
pub fn sh_basis_all(l: usize, xi: &UnitVector) -> Vec<f64> {
    let tab = LegendreTable::new(l, xi.z);
    let (a, b) = sectoral(l, xi.x, xi.y);
    let mut out = vec![0.0; (l + 1) * (l + 1)];
    for n in 0..=l {
        out[n * n] = tab.q(n, 0) * INV_SQRT_4PI;
        for m in 1..=n {
            out[n * n + 2 * m - 1] = tab.q(n, m) * a[m] * INV_SQRT_4PI;
            out[n * n + 2 * m] = tab.q(n, m) * b[m] * INV_SQRT_4PI;
        }
    }
    out
}

/// Coefficients ∫_Ω F Y_{n,j} dω up to degree l by the grid's quadrature.
/// Exact for band-limited F when the Gauss–Legendre product grid resolves
/// degree deg F + l.
pub fn sh_project(f: &FieldSamples, l: usize) -> Result<ShCoefficients> {
    if l > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!("degree {l} exceeds {MAX_DEGREE}")));
    }
    if f.grid().kind() != GridKind::SphereArea {
        return Err(Error::WrongKind { expected: "sphere grid samples" });
    }
    let vals = f.as_scalar()?;
    let g = f.grid();
    let rows: Vec<Vec<f64>> = g
        .nodes()
        .par_iter()
        .zip(g.weights().par_iter())
        .zip(vals.par_iter())
        .map(|((x, w), v)| sh_basis_all(l, x).into_iter().map(|y| y * w * v).collect())
        .collect();
    let mut c = ShCoefficients::zeros(l);
    let mut col = vec![0.0; rows.len()];
    for (k, out) in c.data.iter_mut().enumerate() {
        for (dst, r) in col.iter_mut().zip(&rows) {
            *dst = r[k];
        }
        *out = pairwise_sum(&col);
    }
    Ok(c)
}

/// Seeded synthetic field: uniform c_{n,j} ∈ [−1, 1] scaled by (n+1)^(−decay)
/// for n_min ≤ n ≤ n_max, zero below n_min.
pub fn synth_field(seed: u64, n_min: usize, n_max: usize, decay_exponent: f64) -> Result<ShCoefficients> {
    if n_min > n_max || n_max > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "degree range {n_min}..={n_max} invalid (max {MAX_DEGREE})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = ShCoefficients::zeros(n_max);
    for n in n_min..=n_max {
        let s = ((n + 1) as f64).powf(-decay_exponent);
        for j in 1..=2 * n + 1 {
            c.set(n, j, s * rng.gen_range(-1.0..=1.0));
        }
    }
    c.seed = Some(seed);
    Ok(c)
}

/// H_{n,k}^{ρ,ζ}: degree n ≥ 0, order k ∈ {1, 2} (k = 2 needs n ≥ 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerHarmonicIndex {
    pub cap: SphericalCap,
    pub n: usize,
    pub k: usize,
}

impl InnerHarmonicIndex {
    pub fn new(cap: SphericalCap, n: usize, k: usize) -> Result<Self> {
        if !(k == 1 || (k == 2 && n >= 1)) {
            return Err(Error::InvalidParameter(format!(
                "inner harmonic order k={k} invalid for degree {n}"
            )));
        }
        Ok(InnerHarmonicIndex { cap, n, k })
    }
}

/// Pole, in-plane frame and normalisation radius of a family of inner harmonics.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StereoFrame {
    frame: RotationFrame,
    pole: UnitVector,
    radius: f64,
}

impl StereoFrame {
    pub(crate) fn of_cap(cap: &SphericalCap) -> Self {
        StereoFrame {
            frame: cap.frame(),
            pole: cap.center(),
            radius: cap.s().sqrt(),
        }
    }

    /// Frame (tε¹, tε², −ζ) of the complementary cap Γ_{2−ρ}(−ζ); its
    /// stereographic plane is the inversion of the cap's own plane.
    pub(crate) fn complementary(cap: &SphericalCap) -> Self {
        let f = cap.frame();
        let t = nalgebra::Matrix3::from_columns(&[f.col(0), f.col(1), -f.col(2)]);
        StereoFrame {
            frame: RotationFrame { t },
            pole: cap.center().neg(),
            radius: cap.s().sqrt(),
        }
    }

    fn project(&self, xi: &UnitVector) -> Result<[f64; 2]> {
        stereographic_in_frame(&self.frame, &self.pole, xi)
    }

    pub(crate) fn eval(&self, n: usize, k: usize, xi: &UnitVector) -> Result<f64> {
        let p = self.project(xi)?;
        let r = self.radius;
        let (re, im) = cpow(p[0] / r, p[1] / r, n);
        let v = if k == 1 { re } else { im };
        Ok(v / (r * PI.sqrt()))
    }

    pub(crate) fn grad(&self, n: usize, k: usize, xi: &UnitVector) -> Result<Vec3> {
        let p = self.project(xi)?;
        if n == 0 {
            return Ok(Vec3::zeros());
        }
        let r = self.radius;
        let (e1, e2) = (self.frame.col(0), self.frame.col(1));
        let zeta = self.pole.into_vec();
        let x = xi.into_vec();
        let d = 0.5 * (x + zeta).norm_squared();
        let dp1 = 2.0 * e1 / d - 2.0 * x.dot(&e1) * zeta / (d * d);
        let dp2 = 2.0 * e2 / d - 2.0 * x.dot(&e2) * zeta / (d * d);
        // d/dp of (p/R)^n = (n/R)(p/R)^{n−1}; ∂/∂p₂ picks up a factor i.
        let (wr, wi) = cpow(p[0] / r, p[1] / r, n - 1);
        let s = n as f64 / r;
        let (h1, h2) = if k == 1 { (s * wr, -s * wi) } else { (s * wi, s * wr) };
        let g = (h1 * dp1 + h2 * dp2) / (r * PI.sqrt());
        Ok(g - g.dot(&x) * x)
    }

    pub(crate) fn modulus(&self, xi: &UnitVector) -> Result<f64> {
        let p = self.project(xi)?;
        Ok((p[0] * p[0] + p[1] * p[1]).sqrt())
    }
}

fn cpow(x: f64, y: f64, n: usize) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..n {
        let t = re * x - im * y;
        im = re * y + im * x;
        re = t;
    }
    (re, im)
}

/// (1/(R√π)) (r/R)ⁿ cos nφ (k = 1) or sin nφ (k = 2) at the stereographic
/// image of ξ, with R = (ρ(2−ρ))^{1/4}.
pub fn inner_harmonic_eval(idx: &InnerHarmonicIndex, xi: &UnitVector) -> Result<f64> {
    StereoFrame::of_cap(&idx.cap).eval(idx.n, idx.k, xi)
}

pub fn inner_harmonic_grad(idx: &InnerHarmonicIndex, xi: &UnitVector) -> Result<Vec3> {
    StereoFrame::of_cap(&idx.cap).grad(idx.n, idx.k, xi)
}

/// Seeded linear combination of inner harmonics H_{n,k}, n_min ≤ n ≤ n_max,
/// with coefficients uniform in [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct InnerHarmonicSum {
    pub terms: Vec<(InnerHarmonicIndex, f64)>,
}

impl InnerHarmonicSum {
    pub fn random(cap: SphericalCap, seed: u64, n_min: usize, n_max: usize) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!("degree range {n_min}..={n_max} invalid")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for n in n_min..=n_max {
            for k in 1..=if n == 0 { 1 } else { 2 } {
                terms.push((InnerHarmonicIndex::new(cap, n, k)?, rng.gen_range(-1.0..=1.0)));
            }
        }
        Ok(InnerHarmonicSum { terms })
    }

    pub fn eval(&self, xi: &UnitVector) -> Result<f64> {
        self.terms
            .iter()
            .try_fold(0.0, |a, (idx, c)| Ok(a + c * inner_harmonic_eval(idx, xi)?))
    }

    pub fn grad(&self, xi: &UnitVector) -> Result<Vec3> {
        self.terms
            .iter()
            .try_fold(Vec3::zeros(), |a, (idx, c)| Ok(a + *c * inner_harmonic_grad(idx, xi)?))
    }
}

/// Truncated expansion of ln(1 − ξ·η) in inner harmonics of Γ_ρ(ζ) (in ξ) and
/// of the complementary cap Γ_{2−ρ}(−ζ) (in η), valid for |p(ξ)| < |p(η)|.
pub fn log_series(
    xi: &UnitVector,
    eta: &UnitVector,
    zeta: &UnitVector,
    rho: f64,
    n_terms: usize,
) -> Result<f64> {
    let cap = SphericalCap::new(*zeta, rho)?;
    let inner = StereoFrame::of_cap(&cap);
    let outer = StereoFrame::complementary(&cap);
    let (pa, pb) = (inner.modulus(xi)?, inner.modulus(eta)?);
    if !(pa < pb) {
        return Err(Error::Precondition(format!(
            "log series needs |p(xi)| < |p(eta)|, got {pa} >= {pb}"
        )));
    }
    let s = cap.s();
    let base = -std::f64::consts::LN_2
        + (0.5 * (xi.into_vec() + zeta.into_vec()).norm_squared()).ln()
        + eta.one_minus_dot(zeta).ln();
    let mut terms = Vec::with_capacity(n_terms);
    let mut weight = s * PI;
    for n in 1..=n_terms {
        weight *= s / 4.0;
        let mut t = 0.0;
        for k in 1..=2 {
            t += inner.eval(n, k, xi)? * outer.eval(n, k, eta)?;
        }
        terms.push(weight * 2.0 / n as f64 * t);
    }
    Ok(base - crate::quadrature::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_sphere_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_term() {
        let c = ShCoefficients::single(0, 1);
        assert_abs_diff_eq!(sh_eval(&c, &UnitVector::from_xyz(0.3, 0.2, -0.9)), 1.0 / (4.0 * PI).sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn known_low_degrees() {
        let xi = UnitVector::from_xyz(0.3, -0.5, 0.7);
        let k = (3.0 / (4.0 * PI)).sqrt();
        assert_abs_diff_eq!(sh_basis(1, 1, &xi), k * xi.z, epsilon = 1e-15);
        assert_abs_diff_eq!(sh_basis(1, 2, &xi), k * xi.x, epsilon = 1e-15);
        assert_abs_diff_eq!(sh_basis(1, 3, &xi), k * xi.y, epsilon = 1e-15);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * xi.z * xi.z - 1.0);
        assert_abs_diff_eq!(sh_basis(2, 1, &xi), y20, epsilon = 1e-15);
    }

    #[test]
    fn orthonormal_to_degree_ten() {
        let g = build_sphere_grid(24, 48).unwrap();
        let mut idx = Vec::new();
        for n in 0..=10 {
            for j in 1..=2 * n + 1 {
                idx.push((n, j));
            }
        }
        let vals: Vec<Vec<f64>> = idx
            .iter()
            .map(|&(n, j)| g.nodes().iter().map(|e| sh_basis(n, j, e)).collect())
            .collect();
        for a in 0..idx.len() {
            for b in a..idx.len() {
                let s: f64 = g.weights().iter().enumerate().map(|(i, w)| w * vals[a][i] * vals[b][i]).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-12, "{:?} {:?}: {s}", idx[a], idx[b]);
            }
        }
    }

    #[test]
    fn gradient_of_linear_function() {
        let a = Vec3::new(0.2, -0.7, 0.4);
        let k = (4.0 * PI / 3.0).sqrt();
        let mut c = ShCoefficients::zeros(1);
        c.set(1, 1, k * a.z);
        c.set(1, 2, k * a.x);
        c.set(1, 3, k * a.y);
        let xi = UnitVector::from_xyz(-0.4, 0.1, 0.6);
        assert_abs_diff_eq!(sh_eval(&c, &xi), xi.dot(&a), epsilon = 1e-15);
        let v = xi.into_vec();
        assert_abs_diff_eq!(sh_grad_eval(&c, &xi), a - a.dot(&v) * v, epsilon = 1e-15);
    }

    #[test]
    fn synth_is_seeded_and_bounded() {
        let a = synth_field(7, 3, 25, 2.0).unwrap();
        assert_eq!(a, synth_field(7, 3, 25, 2.0).unwrap());
        assert_ne!(a, synth_field(8, 3, 25, 2.0).unwrap());
        assert!(a.coefficients().iter().all(|c| c.is_finite() && c.abs() <= 1.0));
        assert_eq!(a.get(2, 3), 0.0);
        assert!(synth_field(1, 5, 4, 2.0).is_err());
    }

    #[test]
    fn inner_harmonic_basics() {
        let cap = SphericalCap::new(UnitVector::from_xyz(0.1, 0.2, 0.9), 0.6).unwrap();
        let r = cap.s().sqrt();
        let h0 = InnerHarmonicIndex::new(cap, 0, 1).unwrap();
        assert_abs_diff_eq!(inner_harmonic_eval(&h0, &UnitVector::e1()).unwrap(), 1.0 / (r * PI.sqrt()), epsilon = 1e-15);
        let h1 = InnerHarmonicIndex::new(cap, 1, 1).unwrap();
        assert_eq!(inner_harmonic_eval(&h1, &cap.center()).unwrap(), 0.0);
        assert!(InnerHarmonicIndex::new(cap, 0, 2).is_err());
        assert!(matches!(
            inner_harmonic_eval(&h1, &cap.center().neg()),
            Err(Error::Antipode)
        ));
        let h3 = InnerHarmonicIndex::new(cap, 3, 2).unwrap();
        assert!(inner_harmonic_grad(&h3, &cap.center()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn log_series_empty_sum() {
        let z = UnitVector::e3();
        let xi = UnitVector::from_xyz(0.1, 0.0, 1.0);
        let eta = UnitVector::from_xyz(0.9, 0.2, -0.3);
        let v = log_series(&xi, &eta, &z, 0.5, 0).unwrap();
        let expect = -std::f64::consts::LN_2 + (1.0 + xi.z).ln() + (1.0 - eta.z).ln();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
        assert!(log_series(&eta, &xi, &z, 0.5, 3).is_err());
    }
}
