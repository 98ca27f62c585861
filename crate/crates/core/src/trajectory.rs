//! Closed control curves in the (B_z, B_x) plane and speed profiles.
//!
//! Every curve is parametrized by θ ∈ [0, 1]; `Path::eval` returns the
//! position and dB⃗/dθ. Orientation +1 is counterclockwise in the (B_z, B_x)
//! plane for ellipses and Fourier loops, and "out along the first leg, arc
//! towards increasing φ, back along the second leg" for sectors.

use std::f64::consts::{FRAC_PI_4, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadSettings};
use crate::qubit_model::{self, BathParams, FieldPoint, EPS_MIN};

pub type Vec2 = Vector2<f64>;

/// Floor applied to κ when it divides a speed density.
pub const KAPPA_FLOOR: f64 = 1e-15;
/// Number of cells in a sampled speed profile.
pub const PROFILE_CELLS: usize = 1024;

fn default_bisector() -> f64 {
    FRAC_PI_4
}

fn default_orientation() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ellipse { center: FieldPoint, a: f64, b: f64, #[serde(default)] tilt: f64 },
    CircularSector {
        radius: f64,
        aperture: f64,
        #[serde(default = "default_bisector")]
        bisector: f64,
    },
    /// B(θ) = offset + Σ_k cos_k cos(2πkθ) + sin_k sin(2πkθ), k = 1, 2, ...
    FourierLoop {
        offset: FieldPoint,
        #[serde(default)]
        z_cos: Vec<f64>,
        #[serde(default)]
        z_sin: Vec<f64>,
        #[serde(default)]
        x_cos: Vec<f64>,
        #[serde(default)]
        x_sin: Vec<f64>,
    },
    Polyline { vertices: Vec<FieldPoint> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub shape: Shape,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
}

/// A closed path parametrized on [0, 1].
pub trait Path: Sync {
    /// Smooth pieces of [0, 1] to integrate over. Short stubs ending at the
    /// origin are left out.
    fn pieces(&self) -> Vec<(f64, f64)>;
    /// Position and velocity dB⃗/dθ.
    fn eval(&self, t: f64) -> (FieldPoint, Vec2);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub theta: f64,
    pub point: FieldPoint,
    pub velocity: Vec2,
}

fn rot(tilt: f64, v: Vec2) -> Vec2 {
    let (s, c) = tilt.sin_cos();
    Vec2::new(c * v[0] - s * v[1], s * v[0] + c * v[1])
}

impl Curve {
    pub fn new(shape: Shape) -> Self {
        Self { shape, orientation: 1 }
    }

    pub fn ellipse(center: FieldPoint, a: f64, b: f64, tilt: f64) -> Self {
        Self::new(Shape::Ellipse { center, a, b, tilt })
    }

    pub fn circle(center: FieldPoint, radius: f64) -> Self {
        Self::ellipse(center, radius, radius, 0.0)
    }

    /// Sector symmetric about the first-quadrant bisector.
    pub fn sector(radius: f64, aperture: f64) -> Self {
        Self::new(Shape::CircularSector { radius, aperture, bisector: FRAC_PI_4 })
    }

    pub fn polyline(vertices: Vec<FieldPoint>) -> Self {
        Self::new(Shape::Polyline { vertices })
    }

    pub fn reversed(&self) -> Self {
        Self { shape: self.shape.clone(), orientation: -self.orientation }
    }

    pub fn with_orientation(&self, orientation: i8) -> Self {
        Self { shape: self.shape.clone(), orientation: if orientation < 0 { -1 } else { 1 } }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.orientation != 1 && self.orientation != -1 {
            return bad(format!("orientation must be ±1, got {}", self.orientation));
        }
        match &self.shape {
            Shape::Ellipse { center, a, b, tilt } => {
                if !(center.b_z.is_finite() && center.b_x.is_finite() && tilt.is_finite()) {
                    return bad("ellipse parameters must be finite".into());
                }
                if !(*a >= 0.0 && *b >= 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("semi-axes must be non-negative, got ({a}, {b})"));
                }
            }
            Shape::CircularSector { radius, aperture, bisector } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("sector radius must be positive, got {radius}"));
                }
                if !(*aperture > 0.0 && *aperture <= TAU) || !bisector.is_finite() {
                    return bad(format!("sector aperture must lie in (0, 2π], got {aperture}"));
                }
            }
            Shape::FourierLoop { offset, z_cos, z_sin, x_cos, x_sin } => {
                let all = [z_cos, z_sin, x_cos, x_sin];
                if all.iter().all(|v| v.is_empty()) {
                    return bad("Fourier loop needs at least one harmonic".into());
                }
                if !offset.b_z.is_finite() || all.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
                    return bad("Fourier coefficients must be finite".into());
                }
            }
            Shape::Polyline { vertices } => {
                if self.polyline_vertices().len() < 3 {
                    return bad(format!("polyline needs at least 3 distinct vertices, got {}", vertices.len()));
                }
            }
        }
        Ok(())
    }

    fn polyline_vertices(&self) -> Vec<FieldPoint> {
        match &self.shape {
            Shape::Polyline { vertices } => {
                let mut v = vertices.clone();
                while v.len() > 1 && v.first() == v.last() {
                    v.pop();
                }
                v
            }
            _ => Vec::new(),
        }
    }

    /// Breakpoints of the forward parametrization.
    fn forward_breaks(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ellipse { .. } | Shape::FourierLoop { .. } => vec![0.0, 1.0],
            Shape::CircularSector { aperture, .. } => {
                let total = 2.0 + aperture;
                vec![0.0, 1.0 / total, (1.0 + aperture) / total, 1.0]
            }
            Shape::Polyline { .. } => {
                let v = self.polyline_vertices();
                let n = v.len();
                let mut acc = vec![0.0];
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    acc.push(acc[i] + (q.b_z - p.b_z).hypot(q.b_x - p.b_x));
                }
                let total = acc[n];
                acc.iter().map(|s| s / total).collect()
            }
        }
    }

    fn forward_eval(&self, t: f64) -> (FieldPoint, Vec2) {
        match &self.shape {
            Shape::Ellipse { center, a, b, tilt } => {
                let (s, c) = (TAU * t).sin_cos();
                let d = rot(*tilt, Vec2::new(a * c, b * s));
                let v = rot(*tilt, Vec2::new(-a * s * TAU, b * c * TAU));
                (FieldPoint::new(center.b_z + d[0], center.b_x + d[1]), v)
            }
            Shape::CircularSector { radius, aperture, bisector } => {
                let r = *radius;
                let total = r * (2.0 + aperture);
                let s = t * total;
                let (p1, p2) = (bisector - 0.5 * aperture, bisector + 0.5 * aperture);
                if s <= r {
                    let u = Vec2::new(p1.cos(), p1.sin());
                    (FieldPoint::new(s * u[0], s * u[1]), u * total)
                } else if s <= r * (1.0 + aperture) {
                    let phi = p1 + (s - r) / r;
                    let p = FieldPoint::from_polar(r, phi);
                    (p, Vec2::new(-phi.sin(), phi.cos()) * total)
                } else {
                    let u = Vec2::new(p2.cos(), p2.sin());
                    let rr = total - s;
                    (FieldPoint::new(rr * u[0], rr * u[1]), -u * total)
                }
            }
            Shape::FourierLoop { offset, z_cos, z_sin, x_cos, x_sin } => {
                let mut p = Vec2::new(offset.b_z, offset.b_x);
                let mut v = Vec2::zeros();
                let coef = |c: &Vec<f64>, k: usize| c.get(k).copied().unwrap_or(0.0);
                let kmax = z_cos.len().max(z_sin.len()).max(x_cos.len()).max(x_sin.len());
                for k in 0..kmax {
                    let w = TAU * (k + 1) as f64;
                    let (s, c) = (w * t).sin_cos();
                    p[0] += coef(z_cos, k) * c + coef(z_sin, k) * s;
                    p[1] += coef(x_cos, k) * c + coef(x_sin, k) * s;
                    v[0] += w * (-coef(z_cos, k) * s + coef(z_sin, k) * c);
                    v[1] += w * (-coef(x_cos, k) * s + coef(x_sin, k) * c);
                }
                (FieldPoint::new(p[0], p[1]), v)
            }
            Shape::Polyline { .. } => {
                let v = self.polyline_vertices();
                let br = self.forward_breaks();
                let n = v.len();
                let i = match br.iter().position(|&b| b > t) {
                    Some(0) => 0,
                    Some(k) => (k - 1).min(n - 1),
                    None => n - 1,
                };
                let (p, q) = (v[i], v[(i + 1) % n]);
                let w = br[i + 1] - br[i];
                let s = if w > 0.0 { (t - br[i]) / w } else { 0.0 };
                let pos = FieldPoint::new(p.b_z + s * (q.b_z - p.b_z), p.b_x + s * (q.b_x - p.b_x));
                let vel = Vec2::new(q.b_z - p.b_z, q.b_x - p.b_x) / w;
                (pos, vel)
            }
        }
    }

    fn forward_pieces(&self) -> Vec<(f64, f64)> {
        let br = self.forward_breaks();
        let mut out = Vec::with_capacity(br.len() - 1);
        for w in br.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            // straight pieces touching the origin lose an ε_min stub
            let mid = 0.5 * (a + b);
            let speed = self.forward_eval(mid).1.norm();
            if speed > 0.0 {
                let trim = 2.0 * EPS_MIN / speed;
                if self.forward_eval(a).0.radius() < EPS_MIN {
                    a += trim;
                }
                if self.forward_eval(b).0.radius() < EPS_MIN {
                    b -= trim;
                }
            }
            if b > a {
                let mut cuts = self.axis_crossings(a, b);
                cuts.sort_by(f64::total_cmp);
                let mut lo = a;
                for c in cuts {
                    if c - lo > 1e-12 && b - c > 1e-12 {
                        out.push((lo, c));
                        lo = c;
                    }
                }
                out.push((lo, b));
            }
        }
        out
    }

    /// Parameters in (a, b) where the curve crosses a coordinate axis; √κ has
    /// a kink there.
    fn axis_crossings(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if let Shape::Ellipse { center, a: ea, b: eb, tilt } = &self.shape {
            let (s, c) = tilt.sin_cos();
            // component k: c_k + p cos θ + q sin θ, θ = 2πt
            for (ck, p, q) in [(center.b_z, ea * c, -eb * s), (center.b_x, ea * s, eb * c)] {
                let r = p.hypot(q);
                if r > ck.abs() {
                    let base = q.atan2(p);
                    let w = (-ck / r).acos();
                    for th in [base + w, base - w] {
                        let t = (th / TAU).rem_euclid(1.0);
                        if t > a && t < b {
                            out.push(t);
                        }
                    }
                }
            }
            return out;
        }
        const N: usize = 256;
        let comp = |t: f64, k: usize| {
            let p = self.forward_eval(t).0;
            if k == 0 { p.b_z } else { p.b_x }
        };
        for k in 0..2 {
            let mut t0 = a;
            let mut f0 = comp(a, k);
            for j in 1..=N {
                let t1 = a + (b - a) * j as f64 / N as f64;
                let f1 = comp(t1, k);
                if f0 * f1 < 0.0 {
                    let (mut lo, mut hi, flo) = (t0, t1, f0);
                    for _ in 0..60 {
                        let m = 0.5 * (lo + hi);
                        if comp(m, k) * flo > 0.0 {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    out.push(0.5 * (lo + hi));
                }
                t0 = t1;
                f0 = f1;
            }
        }
        out
    }

    /// Closed polygon with about `n` vertices, uniform in θ on each smooth
    /// piece and including every corner. The last vertex is not repeated.
    pub fn polygon(&self, n: usize) -> Vec<FieldPoint> {
        let br = self.forward_breaks();
        let mut out = Vec::with_capacity(n + br.len());
        for w in br.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let k = ((n as f64 * (b - a)).round() as usize).max(1);
            for j in 0..k {
                out.push(self.forward_eval(a + (b - a) * j as f64 / k as f64).0);
            }
        }
        if self.orientation < 0 {
            out[1..].reverse();
        }
        out
    }

    /// Total Euclidean circumference.
    pub fn circumference(&self) -> Result<f64> {
        let r = quad::integrate::<1, _>(&self.pieces(), &QuadSettings::default(), |t| Ok([self.eval(t).1.norm()]))?;
        Ok(r[0])
    }

    /// Smallest distance of the curve from the origin.
    pub fn min_radius(&self) -> f64 {
        let n = if matches!(self.shape, Shape::Ellipse { .. }) { 256 } else { 2048 };
        let r = |t: f64| self.eval(t.clamp(0.0, 1.0)).0.radius();
        let mut best = (0.0, f64::INFINITY);
        for k in 0..n {
            let t = (k as f64 + 0.5) / n as f64;
            let d = r(t);
            if d < best.1 {
                best = (t, d);
            }
        }
        for &b in &self.forward_breaks() {
            if r(b) < best.1 {
                best = (b, r(b));
            }
        }
        let (mut a, mut b) = (best.0 - 1.0 / n as f64, best.0 + 1.0 / n as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if r(c) < r(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best.1.min(r(0.5 * (a + b)))
    }
}

impl Path for Curve {
    fn pieces(&self) -> Vec<(f64, f64)> {
        let p = self.forward_pieces();
        if self.orientation >= 0 {
            p
        } else {
            p.iter().rev().map(|&(a, b)| (1.0 - b, 1.0 - a)).collect()
        }
    }

    fn eval(&self, t: f64) -> (FieldPoint, Vec2) {
        if self.orientation >= 0 {
            self.forward_eval(t)
        } else {
            let (p, v) = self.forward_eval(1.0 - t);
            (p, -v)
        }
    }
}

/// `n` midpoint samples θ_k = (k + ½)/n with positions and velocities.
pub fn sample(c: &Curve, n: usize) -> Result<Vec<Sample>> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("need at least 16 samples, got {n}")));
    }
    c.validate()?;
    let len = c.circumference()?;
    if !(len >= 1e-9) {
        return Err(Error::DegenerateCurve(format!("circumference {len:e} is below 1e-9")));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut theta = (k as f64 + 0.5) / n as f64;
        let (mut p, mut v) = c.eval(theta);
        if p.radius() < EPS_MIN && v.norm() > 0.0 {
            theta += EPS_MIN / v.norm();
            (p, v) = c.eval(theta);
        }
        out.push(Sample { theta, point: p, velocity: v });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Cell {
    theta0: f64,
    theta1: f64,
    t0: f64,
    t1: f64,
    d0: f64,
    d1: f64,
}

impl Cell {
    fn time(&self, theta: f64) -> f64 {
        let h = self.theta1 - self.theta0;
        let s = ((theta - self.theta0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.t0
            + (s3 - 2.0 * s2 + s) * h * self.d0
            + (-2.0 * s3 + 3.0 * s2) * self.t1
            + (s3 - s2) * h * self.d1
    }

    fn rate(&self, theta: f64) -> f64 {
        let h = self.theta1 - self.theta0;
        let s = ((theta - self.theta0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) * (self.t0 - self.t1) / h + (3.0 * s2 - 4.0 * s + 1.0) * self.d0 + (3.0 * s2 - 2.0 * s) * self.d1
    }

    fn invert(&self, t: f64) -> f64 {
        let (mut a, mut b) = (self.theta0, self.theta1);
        let mut x = a + (b - a) * ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0);
        for _ in 0..100 {
            let f = self.time(x) - t;
            if f.abs() <= 1e-16 {
                break;
            }
            if f > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = self.rate(x);
            let newton = x - f / d;
            x = if d > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if b - a < 1e-16 {
                break;
            }
        }
        x
    }
}

/// Monotone time map t(θ) on [0, 1] stored as a table of cubic Hermite cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    cells: Vec<Cell>,
}

impl SpeedProfile {
    pub fn identity() -> Self {
        Self { cells: vec![Cell { theta0: 0.0, theta1: 1.0, t0: 0.0, t1: 1.0, d0: 1.0, d1: 1.0 }] }
    }

    /// Profile whose time density dt/dθ is proportional to `density` on the
    /// path's pieces and zero on the gaps between them.
    pub fn from_density<P, F>(path: &P, cells: usize, density: F) -> Result<Self>
    where
        P: Path + ?Sized,
        F: Fn(f64) -> Result<f64>,
    {
        let pieces = path.pieces();
        let span: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let (gx, gw) = quad::gauss_legendre(10);
        let mut out = Vec::with_capacity(cells);
        let mut acc = 0.0;
        for &(a, b) in &pieces {
            let n = ((cells as f64 * (b - a) / span).round() as usize).max(16);
            let mut prev_d = density(a)?;
            for k in 0..n {
                let th0 = a + (b - a) * k as f64 / n as f64;
                let th1 = if k + 1 == n { b } else { a + (b - a) * (k + 1) as f64 / n as f64 };
                let h = th1 - th0;
                let mut inc = 0.0;
                for half in 0..2 {
                    let lo = th0 + 0.5 * h * half as f64;
                    for (x, w) in gx.iter().zip(&gw) {
                        inc += w * 0.25 * h * density(lo + 0.25 * h * (1.0 + x))?;
                    }
                }
                let d1 = density(th1)?;
                out.push(Cell { theta0: th0, theta1: th1, t0: acc, t1: acc + inc, d0: prev_d, d1 });
                acc += inc;
                prev_d = d1;
            }
        }
        if !(acc > 1e-12) || !acc.is_finite() {
            return Err(Error::ZeroLength(acc));
        }
        for c in &mut out {
            c.t0 /= acc;
            c.t1 /= acc;
            c.d0 /= acc;
            c.d1 /= acc;
            let h = c.theta1 - c.theta0;
            let delta = (c.t1 - c.t0) / h;
            if delta <= 0.0 {
                c.d0 = 0.0;
                c.d1 = 0.0;
                continue;
            }
            let (al, be) = (c.d0 / delta, c.d1 / delta);
            let r2 = al * al + be * be;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                c.d0 = tau * al * delta;
                c.d1 = tau * be * delta;
            }
        }
        if let Some(last) = out.last_mut() {
            last.t1 = 1.0;
        }
        Ok(Self { cells: out })
    }

    fn cell_at_theta(&self, theta: f64) -> Option<&Cell> {
        let i = self.cells.partition_point(|c| c.theta0 <= theta);
        if i == 0 {
            return None;
        }
        Some(&self.cells[i - 1])
    }

    /// t(θ).
    pub fn time_at(&self, theta: f64) -> f64 {
        match self.cell_at_theta(theta) {
            None => 0.0,
            Some(c) if theta >= c.theta1 => c.t1,
            Some(c) => c.time(theta),
        }
    }

    /// dt/dθ, zero on gaps.
    pub fn rate_at(&self, theta: f64) -> f64 {
        match self.cell_at_theta(theta) {
            Some(c) if theta <= c.theta1 => c.rate(theta),
            _ => 0.0,
        }
    }

    /// Inverse map θ(t).
    pub fn param_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let i = self.cells.partition_point(|c| c.t1 < t).min(self.cells.len() - 1);
        self.cells[i].invert(t)
    }

    /// Cell boundaries, useful as integration breakpoints.
    pub fn cell_intervals(&self) -> Vec<(f64, f64)> {
        self.cells.iter().map(|c| (c.theta0, c.theta1)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.cells.len() == 1 && self.cells[0].d0 == 1.0 && self.cells[0].d1 == 1.0
    }
}

/// Metric selector for lengths and optimal profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Λ̲
    Dissipation,
    /// Λ̲·κ
    Efficiency,
}

/// Profile that makes v·Λ̲·v constant in time (dissipation metric) or
/// v·Λ̲·v/κ constant in time (efficiency metric).
pub fn optimal_speed_profile<P: Path + ?Sized>(path: &P, metric: Metric, bath: &BathParams) -> Result<SpeedProfile> {
    let local = |t: f64| {
        let (p, v) = path.eval(t);
        qubit_model::local_terms(&p, &v, bath)
    };
    match metric {
        Metric::Dissipation => SpeedProfile::from_density(path, PROFILE_CELLS, |t| Ok(local(t)?.quad_form.sqrt())),
        Metric::Efficiency => SpeedProfile::from_density(path, PROFILE_CELLS, |t| {
            let l = local(t)?;
            Ok((l.quad_form / l.kappa.max(KAPPA_FLOOR)).sqrt())
        }),
    }
}

/// A path traversed with a speed profile: position at time t is the base
/// position at θ(t).
pub struct Retimed<'a, P: Path + ?Sized> {
    pub base: &'a P,
    pub profile: &'a SpeedProfile,
}

impl<'a, P: Path + ?Sized> Path for Retimed<'a, P> {
    fn pieces(&self) -> Vec<(f64, f64)> {
        // one piece per profile cell keeps the integrand smooth on each
        let cells = self.profile.cell_intervals();
        let mut out = Vec::new();
        for (a, b) in self.base.pieces() {
            for &(c, d) in &cells {
                let (lo, hi) = (a.max(c), b.min(d));
                if hi > lo {
                    let (t0, t1) = (self.profile.time_at(lo), self.profile.time_at(hi));
                    if t1 > t0 {
                        out.push((t0, t1));
                    }
                }
            }
        }
        out
    }

    fn eval(&self, t: f64) -> (FieldPoint, Vec2) {
        let theta = self.profile.param_at(t);
        let (p, v) = self.base.eval(theta);
        (p, v / self.profile.rate_at(theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn closed_by_construction() {
        let curves = [
            Curve::ellipse(FieldPoint::new(1.0, 2.0), 0.5, 0.3, 0.4),
            Curve::sector(5.0, FRAC_PI_2),
            Curve::polyline(vec![FieldPoint::new(1.0, 0.0), FieldPoint::new(2.0, 1.0), FieldPoint::new(0.5, 1.5)]),
        ];
        for c in &curves {
            let (a, _) = c.eval(0.0);
            let (b, _) = c.eval(1.0);
            assert!((a.b_z - b.b_z).abs() < 1e-12 && (a.b_x - b.b_x).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_quarter_turn() {
        let c = Curve::circle(FieldPoint::new(2.0, 2.0), 1.0);
        let (p0, _) = c.eval(0.0);
        let (p1, _) = c.eval(0.25);
        let a0 = (p0.b_x - 2.0).atan2(p0.b_z - 2.0);
        let a1 = (p1.b_x - 2.0).atan2(p1.b_z - 2.0);
        assert!((a1 - a0 - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn sector_velocities() {
        let c = Curve::sector(5.0, FRAC_PI_2);
        for s in sample(&c, 64).unwrap() {
            let r = s.point.radius();
            let radial = s.point.radial_unit().dot(&s.velocity);
            let tang = s.point.tangential_unit().dot(&s.velocity);
            if (r - 5.0).abs() < 1e-9 {
                assert!(radial.abs() < 1e-9 * s.velocity.norm());
            } else {
                assert!(tang.abs() < 1e-9 * s.velocity.norm());
            }
        }
    }

    #[test]
    fn reversal_negates_velocity() {
        let c = Curve::ellipse(FieldPoint::new(1.0, 1.0), 0.7, 0.4, 0.2);
        let f = sample(&c, 32).unwrap();
        let r = sample(&c.reversed(), 32).unwrap();
        for (a, b) in f.iter().zip(r.iter().rev()) {
            assert!((a.velocity + b.velocity).norm() < 1e-12);
        }
    }

    #[test]
    fn sample_rejects_degenerate() {
        let c = Curve::circle(FieldPoint::new(1.0, 1.0), 0.0);
        assert!(matches!(sample(&c, 32), Err(Error::DegenerateCurve(_))));
        assert!(sample(&Curve::circle(FieldPoint::new(1.0, 1.0), 1.0), 8).is_err());
    }

    #[test]
    fn polyline_nodes_avoid_origin() {
        let c = Curve::polyline(vec![FieldPoint::new(-1.0, 0.0), FieldPoint::new(1.0, 0.0), FieldPoint::new(0.0, 1.0)]);
        // the midpoint of the first edge sits at the origin for this n
        let s = sample(&c, 1 << 10).unwrap();
        assert!(s.iter().all(|s| s.point.radius() >= 0.5 * EPS_MIN));
    }

    #[test]
    fn sector_pieces_skip_origin_stub() {
        let c = Curve::sector(20.0, FRAC_PI_2);
        let p = c.pieces();
        assert_eq!(p.len(), 3);
        assert!(p[0].0 > 0.0 && p[2].1 < 1.0);
        assert!(c.eval(p[0].0).0.radius() >= EPS_MIN);
    }

    #[test]
    fn identity_profile() {
        let p = SpeedProfile::identity();
        for &t in &[0.0, 0.3, 0.77, 1.0] {
            assert!((p.time_at(t) - t).abs() < 1e-15);
            assert!((p.param_at(t) - t).abs() < 1e-15);
            assert!((p.rate_at(t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn profile_is_monotone_and_invertible() {
        let c = Curve::ellipse(FieldPoint::new(1.0, 1.0), 0.9, 0.5, 0.3);
        let prof = optimal_speed_profile(&c, Metric::Dissipation, &BathParams::default()).unwrap();
        let mut last = -1.0;
        for k in 0..=500 {
            let th = k as f64 / 500.0;
            let t = prof.time_at(th);
            assert!(t > last || k == 0);
            last = t;
            assert!((prof.param_at(t) - th).abs() < 1e-12);
        }
        assert_eq!(prof.time_at(0.0), 0.0);
        assert!((prof.time_at(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curve_serialization_round_trip() {
        let c = Curve::sector(3.0, 1.0).reversed();
        let s = serde_json::to_string(&c).unwrap();
        let back: Curve = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn fourier_loop_matches_ellipse() {
        let e = Curve::ellipse(FieldPoint::new(1.0, 0.5), 0.6, 0.3, 0.0);
        let f = Curve::new(Shape::FourierLoop {
            offset: FieldPoint::new(1.0, 0.5),
            z_cos: vec![0.6],
            z_sin: vec![],
            x_cos: vec![],
            x_sin: vec![0.3],
        });
        for &t in &[0.1, 0.45, 0.9] {
            let (a, va) = e.eval(t);
            let (b, vb) = f.eval(t);
            assert!((a.b_z - b.b_z).abs() < 1e-14 && (a.b_x - b.b_x).abs() < 1e-14);
            assert!((va - vb).norm() < 1e-12);
        }
    }

    #[test]
    fn minimum_radius() {
        let c = Curve::circle(FieldPoint::new(3.0, 4.0), 1.0);
        assert!((c.min_radius() - 4.0).abs() < 1e-10);
        assert!(Curve::sector(2.0, 1.0).min_radius() < 1e-12);
    }
}
