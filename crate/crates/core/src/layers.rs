//! Single- and double-layer potentials on cap boundaries, limit/jump probes,
//! and Nyström solutions of the integral Dirichlet and Neumann problems.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, SphericalCap, UnitVector, Vec3};
use crate::kernels::{G_CONST, INV_4PI};
use crate::quadrature::{pairwise_sum, FieldSamples, GridKind, QuadratureGrid};

/// Mean-free tolerance for densities of class C₀.
pub const MEAN_FREE_TOL: f64 = 1e-10;

/// Boundary density Q or Q̃ on a cap boundary grid.
#[derive(Debug, Clone)]
pub struct DensitySamples {
    samples: FieldSamples,
    cap: SphericalCap,
    mean_free: bool,
}

impl DensitySamples {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        let cap = match grid.kind() {
            GridKind::BoundaryLine(c) => c,
            _ => {
                return Err(Error::InvalidParameter(
                    "densities live on boundary grids".into(),
                ))
            }
        };
        Ok(DensitySamples {
            samples: FieldSamples::scalar(grid, values)?,
            cap,
            mean_free: false,
        })
    }

    pub fn from_fn<F>(grid: Arc<QuadratureGrid>, f: F) -> Result<Self>
    where
        F: Fn(&BoundaryPoint) -> f64,
    {
        let v = grid.frames().iter().map(f).collect();
        Self::new(grid, v)
    }

    /// Marks the density mean-free after checking |Σ wᵢQᵢ| < 1e-10.
    pub fn into_mean_free(mut self) -> Result<Self> {
        let t = self.integral();
        if !(t.abs() < MEAN_FREE_TOL) {
            return Err(Error::Compatibility(t));
        }
        self.mean_free = true;
        Ok(self)
    }

    pub fn is_mean_free(&self) -> bool {
        self.mean_free
    }

    pub fn values(&self) -> &[f64] {
        self.samples.as_scalar().expect("scalar density")
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        self.samples.grid()
    }

    pub fn cap(&self) -> SphericalCap {
        self.cap
    }

    pub fn integral(&self) -> f64 {
        let v = self.values();
        self.grid().sum_weighted(|i, _| v[i])
    }

    fn check_distance(&self, xi: &UnitVector) -> Result<()> {
        let h = self.grid().spacing();
        let d = self
            .grid()
            .nodes()
            .iter()
            .map(|n| (n.into_vec() - xi.into_vec()).norm())
            .fold(f64::INFINITY, f64::min);
        if d <= h {
            return Err(Error::NearBoundary {
                distance: d,
                required: h,
            });
        }
        Ok(())
    }
}

/// U₁[Q̃](ξ) = Σ wᵢ G(Δ*; ξ·ηᵢ) Q̃ᵢ.
pub fn single_layer(q: &DensitySamples, xi: &UnitVector) -> Result<f64> {
    q.check_distance(xi)?;
    let v = q.values();
    Ok(q.grid().sum_weighted(|i, eta| {
        (INV_4PI * xi.one_minus_dot(eta).ln() + G_CONST) * v[i]
    }))
}

/// U₂[Q](ξ) = Σ wᵢ ∂/∂ν(ηᵢ) G(Δ*; ξ·ηᵢ) Qᵢ.
pub fn double_layer(q: &DensitySamples, xi: &UnitVector) -> Result<f64> {
    q.check_distance(xi)?;
    let v = q.values();
    let frames = q.grid().frames();
    Ok(q.grid().sum_weighted(|i, eta| {
        -INV_4PI * frames[i].nu.dot(xi) / xi.one_minus_dot(eta) * v[i]
    }))
}

/// Derivative of U₁ or U₂ at ξ along the tangent direction `dir`.
fn layer_directional(
    q: &DensitySamples,
    potential: Potential,
    xi: &UnitVector,
    dir: &Vec3,
) -> Result<f64> {
    q.check_distance(xi)?;
    let v = q.values();
    let frames = q.grid().frames();
    let x = xi.into_vec();
    let d = dir - dir.dot(&x) * x;
    Ok(q.grid().sum_weighted(|i, eta| {
        let gap = xi.one_minus_dot(eta);
        let e = eta.into_vec();
        // ∇*_ξ (1 − ξ·η) = −(η − (ξ·η)ξ)
        let dgap = -(e - e.dot(&x) * x).dot(&d);
        let term = match potential {
            Potential::Single => INV_4PI * dgap / gap,
            Potential::Double => {
                let nu = frames[i].nu;
                let dnu = (nu - nu.dot(&x) * x).dot(&d);
                -INV_4PI * (dnu * gap - nu.dot(&x) * dgap) / (gap * gap)
            }
        };
        term * v[i]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Value,
    NormalDerivative,
}

/// One-sided samples and the extrapolated jump (exterior − interior).
#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub taus: Vec<f64>,
    pub interior: Vec<f64>,
    pub exterior: Vec<f64>,
    pub jumps: Vec<f64>,
    pub jump: f64,
    pub interior_limit: f64,
    pub exterior_limit: f64,
    /// log₂ ratio of successive jump increments over the last three τ.
    pub observed_order: f64,
}

/// Quadratic extrapolation to τ = 0 through the last three samples.
fn extrapolate(t: &[f64], f: &[f64]) -> f64 {
    let n = t.len();
    let (t0, t1, t2) = (t[n - 3], t[n - 2], t[n - 1]);
    let (f0, f1, f2) = (f[n - 3], f[n - 2], f[n - 1]);
    f0 * t1 * t2 / ((t0 - t1) * (t0 - t2))
        + f1 * t0 * t2 / ((t1 - t0) * (t1 - t2))
        + f2 * t0 * t1 / ((t2 - t0) * (t2 - t1))
}

/// Resolution floor of the trapezoidal rule for displaced evaluation points.
pub fn jump_resolution_floor(grid: &QuadratureGrid) -> f64 {
    2.0 * grid.spacing()
}

/// Evaluates a layer potential (or its ν-derivative) at (ξ ± τν)/√(1+τ²)
/// for boundary node `node` and each τ, and extrapolates the jump.
pub fn jump_probe(
    potential: Potential,
    quantity: Quantity,
    q: &DensitySamples,
    node: usize,
    taus: &[f64],
) -> Result<JumpReport> {
    if taus.len() < 3 {
        return Err(Error::InvalidParameter("need at least three displacements".into()));
    }
    if taus.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("displacements must decrease".into()));
    }
    let floor = jump_resolution_floor(q.grid());
    let tmin = *taus.last().expect("non-empty");
    if tmin < floor {
        return Err(Error::BelowResolution { tau: tmin, floor });
    }
    let b = q.grid().frames().get(node).copied().ok_or_else(|| {
        Error::InvalidParameter(format!("boundary node {node} out of range"))
    })?;
    let eval = |sign: f64, tau: f64| -> Result<f64> {
        let p = UnitVector::new((b.eta.into_vec() + sign * tau * b.nu) / (1.0 + tau * tau).sqrt());
        match quantity {
            Quantity::Value => match potential {
                Potential::Single => single_layer(q, &p),
                Potential::Double => double_layer(q, &p),
            },
            Quantity::NormalDerivative => layer_directional(q, potential, &p, &b.nu),
        }
    };
    let mut interior = Vec::new();
    let mut exterior = Vec::new();
    for &t in taus {
        interior.push(eval(-1.0, t)?);
        exterior.push(eval(1.0, t)?);
    }
    let jumps: Vec<f64> = exterior.iter().zip(&interior).map(|(e, i)| e - i).collect();
    let n = jumps.len();
    let d1 = (jumps[n - 2] - jumps[n - 3]).abs();
    let d2 = (jumps[n - 1] - jumps[n - 2]).abs();
    Ok(JumpReport {
        jump: extrapolate(taus, &jumps),
        interior_limit: extrapolate(taus, &interior),
        exterior_limit: extrapolate(taus, &exterior),
        observed_order: (d1 / d2).log2(),
        taus: taus.to_vec(),
        interior,
        exterior,
        jumps,
    })
}

fn cap_boundary(grid: &QuadratureGrid) -> Result<SphericalCap> {
    match grid.kind() {
        GridKind::BoundaryLine(c) => Ok(c),
        _ => Err(Error::InvalidParameter("a boundary grid is required".into())),
    }
}

/// Double-layer kernel ∂/∂ν(η) G(ξ·η) on the curve, with the analytic
/// diagonal κ_g/(4π).
fn double_layer_matrix(grid: &QuadratureGrid, kappa: f64) -> DMatrix<f64> {
    let f = grid.frames();
    let w = grid.weights();
    let m = f.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            w[j] * kappa * INV_4PI
        } else {
            -INV_4PI * f[j].nu.dot(&f[i].eta) / f[i].eta.one_minus_dot(&f[j].eta) * w[j]
        }
    })
}

/// Adjoint kernel ∂/∂ν(ξ) G(ξ·η), diagonal κ_g/(4π).
fn adjoint_matrix(grid: &QuadratureGrid, kappa: f64) -> DMatrix<f64> {
    let f = grid.frames();
    let w = grid.weights();
    let m = f.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            w[j] * kappa * INV_4PI
        } else {
            -INV_4PI * f[i].nu.dot(&f[j].eta) / f[i].eta.one_minus_dot(&f[j].eta) * w[j]
        }
    })
}

/// Solution of a boundary integral equation with its interior evaluator.
#[derive(Debug, Clone)]
pub struct LayerSolution {
    pub density: DensitySamples,
    pub potential: Potential,
}

impl LayerSolution {
    pub fn eval(&self, xi: &UnitVector) -> Result<f64> {
        match self.potential {
            Potential::Single => single_layer(&self.density, xi),
            Potential::Double => double_layer(&self.density, xi),
        }
    }
}

fn boundary_data(grid: &Arc<QuadratureGrid>, f: &[f64]) -> Result<SphericalCap> {
    let cap = cap_boundary(grid)?;
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: f.len(),
        });
    }
    Ok(cap)
}

/// Integral Dirichlet problem F = U₂[Q] + Q/2. On a cap the kernel is the
/// constant κ_g/(4π), so (I/2 + c·11ᵀ)Q = F is solved in closed form.
pub fn solve_idp(grid: &Arc<QuadratureGrid>, f: &[f64]) -> Result<LayerSolution> {
    let cap = boundary_data(grid, f)?;
    let m = f.len() as f64;
    let c = grid.weights()[0] * cap.geodesic_curvature() * INV_4PI;
    let denom = 1.0 + 2.0 * c * m;
    if denom.abs() < 1e-14 {
        return Err(Error::SingularSystem("1 + 2cm vanishes".into()));
    }
    let sum = pairwise_sum(f);
    let shift = 4.0 * c * sum / denom;
    let q = f.iter().map(|v| 2.0 * v - shift).collect();
    Ok(LayerSolution {
        density: DensitySamples::new(grid.clone(), q)?,
        potential: Potential::Double,
    })
}

/// Dense Nyström solve of the same equation (LU).
pub fn solve_idp_dense(grid: &Arc<QuadratureGrid>, f: &[f64]) -> Result<LayerSolution> {
    let cap = boundary_data(grid, f)?;
    let a = double_layer_matrix(grid, cap.geodesic_curvature())
        + DMatrix::identity(f.len(), f.len()) * 0.5;
    let q = a
        .lu()
        .solve(&DVector::from_column_slice(f))
        .ok_or_else(|| Error::SingularSystem("IDP matrix".into()))?;
    Ok(LayerSolution {
        density: DensitySamples::new(grid.clone(), q.as_slice().to_vec())?,
        potential: Potential::Double,
    })
}

/// ∞-norm of U₂[Q] + Q/2 − F on the nodes.
pub fn idp_residual(sol: &LayerSolution, f: &[f64]) -> f64 {
    let g = sol.density.grid();
    let a = double_layer_matrix(g, sol.density.cap().geodesic_curvature())
        + DMatrix::identity(f.len(), f.len()) * 0.5;
    let r = a * DVector::from_column_slice(sol.density.values()) - DVector::from_column_slice(f);
    r.amax()
}

/// Circulant operator on an equispaced boundary grid: eigenvalues of the
/// matrix whose first column is `col`.
#[derive(Debug, Clone)]
pub struct Circulant {
    symbol: Vec<Complex<f64>>,
}

impl Circulant {
    pub fn from_column(col: &[f64]) -> Self {
        let mut buf: Vec<Complex<f64>> = col.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        Circulant { symbol: buf }
    }

    pub fn from_symbol(symbol: Vec<f64>) -> Self {
        Circulant {
            symbol: symbol.into_iter().map(|v| Complex::new(v, 0.0)).collect(),
        }
    }

    pub fn symbol(&self) -> &[Complex<f64>] {
        &self.symbol
    }

    fn transform(&self, x: &[f64], f: impl Fn(usize, Complex<f64>) -> Complex<f64>) -> Vec<f64> {
        let m = x.len();
        let mut planner = FftPlanner::new();
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        planner.plan_fft_forward(m).process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            *b = f(k, *b);
        }
        planner.plan_fft_inverse(m).process(&mut buf);
        buf.iter().map(|c| c.re / m as f64).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.transform(x, |k, b| b * self.symbol[k])
    }

    /// Solves with the zero mode pinned to zero.
    pub fn solve_pinned(&self, b: &[f64]) -> Result<Vec<f64>> {
        if let Some(k) = self.symbol.iter().skip(1).position(|s| s.norm() < 1e-14) {
            return Err(Error::SingularSystem(format!("circulant mode {} vanishes", k + 1)));
        }
        Ok(self.transform(b, |k, v| if k == 0 { Complex::new(0.0, 0.0) } else { v / self.symbol[k] }))
    }
}

/// Integral Neumann problem in the interior-limit form F = ∂_ν U₁[Q̃] − Q̃/2
/// for mean-free F, solved by FFT diagonalisation with the zero mode pinned.
pub fn solve_inp(grid: &Arc<QuadratureGrid>, f: &[f64]) -> Result<LayerSolution> {
    let cap = boundary_data(grid, f)?;
    check_mean_free(grid, f)?;
    let adj = adjoint_matrix(grid, cap.geodesic_curvature());
    let mut col: Vec<f64> = adj.column(0).iter().copied().collect();
    col[0] -= 0.5;
    let q = Circulant::from_column(&col).solve_pinned(f)?;
    Ok(LayerSolution {
        density: DensitySamples::new(grid.clone(), q)?.into_mean_free()?,
        potential: Potential::Single,
    })
}

fn check_mean_free(grid: &QuadratureGrid, f: &[f64]) -> Result<()> {
    let t = grid.sum_weighted(|i, _| f[i]);
    if !(t.abs() <= crate::solvers::NEUMANN_COMPAT_TOL) {
        return Err(Error::Compatibility(t));
    }
    Ok(())
}

/// Dense variant of [`solve_inp`]: the system bordered with the mean-free
/// constraint, solved by LU.
pub fn solve_inp_dense(grid: &Arc<QuadratureGrid>, f: &[f64]) -> Result<LayerSolution> {
    let cap = boundary_data(grid, f)?;
    check_mean_free(grid, f)?;
    let m = f.len();
    let adj = adjoint_matrix(grid, cap.geodesic_curvature());
    let w = grid.weights();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    a.view_mut((0, 0), (m, m)).copy_from(&(adj - DMatrix::identity(m, m) * 0.5));
    for i in 0..m {
        a[(i, m)] = 1.0;
        a[(m, i)] = w[i];
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs.rows_mut(0, m).copy_from_slice(f);
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("bordered INP matrix".into()))?;
    Ok(LayerSolution {
        density: DensitySamples::new(grid.clone(), x.as_slice()[..m].to_vec())?,
        potential: Potential::Single,
    })
}

/// ∞-norm of ∂_ν U₁[Q̃] − Q̃/2 − F on the nodes.
pub fn inp_residual(sol: &LayerSolution, f: &[f64]) -> f64 {
    let g = sol.density.grid();
    let m = f.len();
    let a = adjoint_matrix(g, sol.density.cap().geodesic_curvature()) - DMatrix::identity(m, m) * 0.5;
    let r = a * DVector::from_column_slice(sol.density.values()) - DVector::from_column_slice(f);
    r.amax()
}

/// Single layer evaluated on the curve itself. On a cap boundary
/// G = (1/4π)[ln(s²/2) + ln(4 sin²(δ/2))] + const depends only on the node
/// offset δ; the log part has Fourier symbol −2π/|k| (0 for k = 0), giving
/// spectral accuracy for smooth densities.
pub fn single_layer_on_boundary(q: &DensitySamples) -> Vec<f64> {
    let cap = q.cap();
    let s = cap.s();
    let m = q.values().len();
    let k0 = s * 2.0 * PI * (INV_4PI * (0.5 * s * s).ln() + G_CONST);
    let symbol = (0..m)
        .map(|k| {
            let kk = k.min(m - k);
            if kk == 0 {
                k0
            } else {
                -s / (2.0 * kk as f64)
            }
        })
        .collect();
    Circulant::from_symbol(symbol).apply(q.values())
}
