//! Green's surface identities on caps, with ambient polynomials as test
//! functions: A = ξ·a and B = (ξ·b)(ξ·c), whose surface gradients and
//! Beltrami images are known in closed form.

use sphaerica::quadrature::{build_boundary_grid, build_cap_grid};
use sphaerica::{SphericalCap, UnitVector, Vec3};

struct Linear(Vec3);

impl Linear {
    fn value(&self, x: &UnitVector) -> f64 {
        x.dot(&self.0)
    }
    fn grad(&self, x: &UnitVector) -> Vec3 {
        self.0 - x.dot(&self.0) * x.into_vec()
    }
    fn beltrami(&self, x: &UnitVector) -> f64 {
        -2.0 * self.value(x)
    }
}

struct Quadratic(Vec3, Vec3);

impl Quadratic {
    fn value(&self, x: &UnitVector) -> f64 {
        x.dot(&self.0) * x.dot(&self.1)
    }
    fn grad(&self, x: &UnitVector) -> Vec3 {
        let g = x.dot(&self.1) * self.0 + x.dot(&self.0) * self.1;
        g - 2.0 * self.value(x) * x.into_vec()
    }
    fn beltrami(&self, x: &UnitVector) -> f64 {
        // degree-2 part of ξᵀSξ, S = sym(b cᵀ), has eigenvalue −6
        -6.0 * (self.value(x) - self.0.dot(&self.1) / 3.0)
    }
}

fn setup() -> (SphericalCap, Linear, Quadratic) {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(35.0, -20.0), 0.7).unwrap();
    (
        cap,
        Linear(Vec3::new(0.4, -1.1, 0.7)),
        Quadratic(Vec3::new(1.0, 0.5, -0.3), Vec3::new(-0.2, 0.9, 0.6)),
    )
}

#[test]
fn stokes_identity_for_curl_gradient() {
    // ∫_Γ ∇*A · L*B dω = ∫_∂Γ A ν·L*B dσ
    let (cap, a, b) = setup();
    let area = build_cap_grid(&cap, 48, 96).unwrap();
    let line = build_boundary_grid(&cap, 256).unwrap();
    let lhs = area.integrate_fn(|x| a.grad(x).dot(&x.into_vec().cross(&b.grad(x))));
    let rhs = line.sum_weighted(|i, x| {
        let nu = line.frames()[i].nu;
        a.value(x) * nu.dot(&x.into_vec().cross(&b.grad(x)))
    });
    assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    assert!(lhs.abs() > 1e-3);
}

#[test]
fn green_second_identity() {
    let (cap, a, b) = setup();
    let area = build_cap_grid(&cap, 48, 96).unwrap();
    let line = build_boundary_grid(&cap, 256).unwrap();
    let lhs = area.integrate_fn(|x| a.value(x) * b.beltrami(x) - b.value(x) * a.beltrami(x));
    let rhs = line.sum_weighted(|i, x| {
        let nu = line.frames()[i].nu;
        a.value(x) * b.grad(x).dot(&nu) - b.value(x) * a.grad(x).dot(&nu)
    });
    assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
}

#[test]
fn divergence_of_gradient() {
    // ∫_Γ Δ*U dω = ∫_∂Γ ∂U/∂ν dσ
    let (cap, a, b) = setup();
    let area = build_cap_grid(&cap, 48, 96).unwrap();
    let line = build_boundary_grid(&cap, 256).unwrap();
    let lhs = area.integrate_fn(|x| a.beltrami(x) + b.beltrami(x));
    let rhs = line.sum_weighted(|i, x| (a.grad(x) + b.grad(x)).dot(&line.frames()[i].nu));
    assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
}

#[test]
fn beltrami_closed_forms_match_finite_differences() {
    let (_, a, b) = setup();
    let x = UnitVector::from_lon_lat_deg(10.0, 15.0);
    let fd_a = sphaerica::solvers::beltrami_fd(|e| a.value(e), &x, 1e-3);
    let fd_b = sphaerica::solvers::beltrami_fd(|e| b.value(e), &x, 1e-3);
    assert!((fd_a - a.beltrami(&x)).abs() < 1e-5);
    assert!((fd_b - b.beltrami(&x)).abs() < 1e-5);
}
