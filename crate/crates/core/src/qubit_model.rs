//! Closed-form linear-response coefficients of the driven qubit.
//!
//! The Hamiltonian is H = B_z σ_z + B_x σ_x with the cold bath coupled
//! through σ_z and the hot bath through σ_x. Vectors and tensors are given
//! in Cartesian (B_z, B_x) components.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius below which tensors are not evaluated.
pub const EPS_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub gamma_bar: f64,
    pub eps_cutoff: f64,
}

impl Default for BathParams {
    fn default() -> Self {
        Self { gamma_bar: 0.2, eps_cutoff: 120.0 }
    }
}

impl BathParams {
    pub fn new(gamma_bar: f64, eps_cutoff: f64) -> Result<Self> {
        let b = Self { gamma_bar, eps_cutoff };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma_bar must be positive, got {}", self.gamma_bar)));
        }
        // an infinite cutoff is allowed
        if !(self.eps_cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!("eps_cutoff must be positive, got {}", self.eps_cutoff)));
        }
        Ok(())
    }

    /// Ohmic spectral density Γ(ε) = Γ̄ ε e^{−ε/ε_C}, zero for ε ≤ 0.
    pub fn spectral_density(&self, eps: f64) -> f64 {
        if eps > 0.0 {
            self.gamma_bar * eps * (-eps / self.eps_cutoff).exp()
        } else {
            0.0
        }
    }
}

pub fn spectral_density(eps: f64, bath: &BathParams) -> f64 {
    bath.spectral_density(eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub b_z: f64,
    pub b_x: f64,
}

impl FieldPoint {
    pub fn new(b_z: f64, b_x: f64) -> Self {
        Self { b_z, b_x }
    }

    pub fn from_polar(b_r: f64, phi: f64) -> Self {
        Self { b_z: b_r * phi.cos(), b_x: b_r * phi.sin() }
    }

    pub fn radius(&self) -> f64 {
        self.b_z.hypot(self.b_x)
    }

    /// Polar angle φ = atan2(B_x, B_z).
    pub fn angle(&self) -> f64 {
        self.b_x.atan2(self.b_z)
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.b_z, self.b_x)
    }

    /// r̂ = (cos φ, sin φ).
    pub fn radial_unit(&self) -> Vector2<f64> {
        let r = self.radius();
        Vector2::new(self.b_z / r, self.b_x / r)
    }

    /// φ̂ = (−sin φ, cos φ).
    pub fn tangential_unit(&self) -> Vector2<f64> {
        let r = self.radius();
        Vector2::new(-self.b_x / r, self.b_z / r)
    }
}

/// The local response tensor Λ̲, pumping vector Λ⃗ and conductance κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsagerCoeffs {
    pub lambda_matrix: Matrix2<f64>,
    pub lambda_vector: Vector2<f64>,
    pub kappa: f64,
}

fn guard(b_r: f64) -> Result<()> {
    if b_r.is_nan() || b_r <= EPS_MIN {
        return Err(Error::OriginGuard { radius: b_r });
    }
    Ok(())
}

/// sech²(r), without overflow for large r.
pub(crate) fn sech2(r: f64) -> f64 {
    let e = (-2.0 * r.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// 1/sinh(2r) for r > 0.
fn inv_sinh2(r: f64) -> f64 {
    if r < 1.0 {
        1.0 / (2.0 * r).sinh()
    } else {
        let e = (-2.0 * r).exp();
        2.0 * e / (1.0 - e * e)
    }
}

/// Radial eigenvalue λ_r = sinh(B_r)/(Γ(2B_r) cosh³(B_r)).
pub fn lambda_radial(b_r: f64, bath: &BathParams) -> Result<f64> {
    guard(b_r)?;
    Ok(b_r.tanh() * sech2(b_r) / bath.spectral_density(2.0 * b_r))
}

/// Tangential eigenvalue λ_φ = Γ(2B_r)/(4B_r³).
pub fn lambda_tangential(b_r: f64, bath: &BathParams) -> Result<f64> {
    guard(b_r)?;
    Ok(bath.spectral_density(2.0 * b_r) / (4.0 * b_r * b_r * b_r))
}

pub fn lambda_matrix(p: &FieldPoint, bath: &BathParams) -> Result<Matrix2<f64>> {
    let r = p.radius();
    let lr = lambda_radial(r, bath)?;
    let lp = lambda_tangential(r, bath)?;
    let (c, s) = (p.b_z / r, p.b_x / r);
    let zz = lr * c * c + lp * s * s;
    let xx = lr * s * s + lp * c * c;
    let zx = (lr - lp) * c * s;
    Ok(Matrix2::new(zz, zx, zx, xx))
}

/// Pumped-heat vector Λ⃗ = B_r sin²φ sech²(B_r) r̂.
pub fn lambda_vector(p: &FieldPoint, _bath: &BathParams) -> Vector2<f64> {
    let r2 = p.b_z * p.b_z + p.b_x * p.b_x;
    if r2 == 0.0 {
        return Vector2::zeros();
    }
    let f = sech2(r2.sqrt()) * p.b_x * p.b_x / r2;
    Vector2::new(f * p.b_z, f * p.b_x)
}

/// Parametric thermal conductance κ = B_r² sin²(2φ) Γ(2B_r)/sinh(2B_r).
pub fn kappa(p: &FieldPoint, bath: &BathParams) -> f64 {
    let r2 = p.b_z * p.b_z + p.b_x * p.b_x;
    if r2 == 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    let s2 = 2.0 * p.b_z * p.b_x / r2;
    r2 * s2 * s2 * bath.spectral_density(2.0 * r) * inv_sinh2(r)
}

/// Curl ∂Λ_x/∂B_z − ∂Λ_z/∂B_x = −sech²(B_r) sin 2φ, taken as 0 at the origin.
pub fn berry_curvature(p: &FieldPoint, _bath: &BathParams) -> f64 {
    let r2 = p.b_z * p.b_z + p.b_x * p.b_x;
    if r2 == 0.0 {
        return 0.0;
    }
    -sech2(r2.sqrt()) * 2.0 * p.b_z * p.b_x / r2
}

pub fn coefficients(p: &FieldPoint, bath: &BathParams) -> Result<OnsagerCoeffs> {
    Ok(OnsagerCoeffs {
        lambda_matrix: lambda_matrix(p, bath)?,
        lambda_vector: lambda_vector(p, bath),
        kappa: kappa(p, bath),
    })
}

/// Everything a line integral needs at one curve node.
#[derive(Debug, Clone, Copy)]
pub struct LocalTerms {
    /// v·Λ̲·v
    pub quad_form: f64,
    /// Λ⃗·v
    pub pumping: f64,
    pub kappa: f64,
}

pub fn local_terms(p: &FieldPoint, v: &Vector2<f64>, bath: &BathParams) -> Result<LocalTerms> {
    let r = p.radius();
    guard(r)?;
    let (c, s) = (p.b_z / r, p.b_x / r);
    let vr = v[0] * c + v[1] * s;
    let vp = -v[0] * s + v[1] * c;
    let g = bath.spectral_density(2.0 * r);
    let sh = sech2(r);
    let lr = r.tanh() * sh / g;
    let lp = g / (4.0 * r * r * r);
    let s2 = 2.0 * c * s;
    Ok(LocalTerms {
        quad_form: lr * vr * vr + lp * vp * vp,
        pumping: r * s * s * sh * vr,
        kappa: r * r * s2 * s2 * g * inv_sinh2(r),
    })
}

fn log_crossover_gap(b: f64, bath: &BathParams) -> f64 {
    // ln(λ_r/λ_φ) = ln(B tanh B sech²B) − ln(Γ̄²) + 4B/ε_C
    let log_sech2 = -2.0 * (b + (-2.0 * b).exp().ln_1p() - std::f64::consts::LN_2);
    b.ln() + b.tanh().ln() + log_sech2 - 2.0 * bath.gamma_bar.ln() + 4.0 * b / bath.eps_cutoff
}

/// Radii where radial and tangential dissipation are equal. Between them the
/// radial (spectral) dissipation dominates; `None` means the rotational part
/// dominates everywhere.
pub fn crossover_radii(bath: &BathParams) -> Option<(f64, f64)> {
    const B_MAX: f64 = 50.0;
    const SCAN: usize = 2000;
    let (lo, hi) = (EPS_MIN.ln(), B_MAX.ln());
    let at = |i: usize| (lo + (hi - lo) * i as f64 / SCAN as f64).exp();
    let mut roots = Vec::new();
    let mut prev = (at(0), log_crossover_gap(at(0), bath));
    for i in 1..=SCAN {
        let b = at(i);
        let g = log_crossover_gap(b, bath);
        if (g > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(|x| log_crossover_gap(x, bath), prev.0, b, 1e-9));
        }
        prev = (b, g);
    }
    match roots.as_slice() {
        [first, .., last] => Some((*first, *last)),
        _ => None,
    }
}

pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fa_pos = f(a) > 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Smallest coupling Γ̄ for which rotational dissipation dominates at every
/// radius, i.e. √(max_u u tanh u sech²u e^{4u/ε_C}).
pub fn threshold_coupling(eps_cutoff: f64) -> f64 {
    let f = |u: f64| u * u.tanh() * sech2(u) * (4.0 * u / eps_cutoff).exp();
    let (mut best_u, mut best) = (0.0, 0.0);
    for i in 1..=1000 {
        let u = 5.0 * i as f64 / 1000.0;
        if f(u) > best {
            best = f(u);
            best_u = u;
        }
    }
    let (mut a, mut b) = (best_u - 0.005, best_u + 0.005);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    while b - a > 1e-12 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).sqrt()
}
