//! Geometric functionals of a closed cycle: pumped-heat area A, the
//! dissipation functional L² and its geodesic bound ℒ², the efficiency
//! length ℒ_κ² and the heat-leak average ⟨κ⟩.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadSettings};
use crate::qubit_model::{self, BathParams, FieldPoint, LocalTerms};
use crate::trajectory::{Curve, Path, SpeedProfile, KAPPA_FLOOR};

pub use crate::trajectory::Metric;

/// Vertices of the coarse polygon used by the flux form of A.
pub const FLUX_VERTICES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub bath: BathParams,
    pub quad: QuadSettings,
}

/// L² and ⟨κ⟩ of one speed profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub length_l2: f64,
    pub mean_kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTerms {
    pub area: f64,
    /// ℒ
    pub length: f64,
    /// ℒ_κ
    pub length_kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomSummary {
    pub area: f64,
    pub geodesic_l2: f64,
    pub geodesic_lk2: f64,
    pub uniform: ProfileStats,
    pub power_optimal: ProfileStats,
    pub efficiency_optimal: ProfileStats,
    pub kappa_min: f64,
    pub kappa_max: f64,
}

impl GeomSummary {
    pub fn profile(&self, which: ProfileKind) -> ProfileStats {
        match which {
            ProfileKind::Uniform => self.uniform,
            ProfileKind::PowerOptimal => self.power_optimal,
            ProfileKind::EfficiencyOptimal => self.efficiency_optimal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Uniform,
    PowerOptimal,
    EfficiencyOptimal,
}

impl Geometry {
    pub fn new(bath: BathParams) -> Self {
        Self { bath, quad: QuadSettings::default() }
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.quad.rel_tol = rel_tol;
        self
    }

    fn local<P: Path + ?Sized>(&self, path: &P, t: f64) -> Result<LocalTerms> {
        let (p, v) = path.eval(t);
        qubit_model::local_terms(&p, &v, &self.bath)
    }

    /// A = ∮ Λ⃗·dB⃗.
    pub fn area_line<P: Path + ?Sized>(&self, path: &P) -> Result<f64> {
        let r = quad::integrate::<1, _>(&path.pieces(), &self.quad, |t| {
            let (p, v) = path.eval(t);
            Ok([qubit_model::lambda_vector(&p, &self.bath).dot(&v)])
        })?;
        Ok(r[0])
    }

    /// ℒ = ∮ √(dB⃗·Λ̲·dB⃗), or ℒ_κ with the metric Λ̲κ.
    pub fn geodesic_length<P: Path + ?Sized>(&self, path: &P, metric: Metric) -> Result<f64> {
        let r = quad::integrate::<1, _>(&path.pieces(), &self.quad, |t| {
            let l = self.local(path, t)?;
            Ok([match metric {
                Metric::Dissipation => l.quad_form.sqrt(),
                Metric::Efficiency => (l.quad_form * l.kappa).sqrt(),
            }])
        })?;
        Ok(r[0])
    }

    /// A, ℒ and ℒ_κ from one adaptive pass.
    pub fn geodesic_pass<P: Path + ?Sized>(&self, path: &P) -> Result<GeodesicTerms> {
        let r = quad::integrate::<3, _>(&path.pieces(), &self.quad, |t| {
            let l = self.local(path, t)?;
            Ok([l.pumping, l.quad_form.sqrt(), (l.quad_form * l.kappa).sqrt()])
        })?;
        Ok(GeodesicTerms { area: r[0], length: r[1], length_kappa: r[2] })
    }

    /// L² = ∫dθ Ḃ⃗·Λ̲·Ḃ⃗ (or with Λ̲κ) for the path traversed with `profile`.
    pub fn length_l2<P: Path + ?Sized>(&self, path: &P, profile: &SpeedProfile, metric: Metric) -> Result<f64> {
        let cells = clip_cells(&path.pieces(), &profile.cell_intervals());
        let r = quad::integrate::<1, _>(&cells, &self.quad, |t| {
            let l = self.local(path, t)?;
            let w = match metric {
                Metric::Dissipation => l.quad_form,
                Metric::Efficiency => l.quad_form * l.kappa,
            };
            Ok([w / profile.rate_at(t)])
        })?;
        Ok(r[0])
    }

    /// ⟨κ⟩ = ∫dt κ for the path traversed with `profile`.
    pub fn mean_kappa<P: Path + ?Sized>(&self, path: &P, profile: &SpeedProfile) -> Result<f64> {
        let cells = clip_cells(&path.pieces(), &profile.cell_intervals());
        let r = quad::integrate::<1, _>(&cells, &self.quad, |t| {
            let (p, _) = path.eval(t);
            Ok([qubit_model::kappa(&p, &self.bath) * profile.rate_at(t)])
        })?;
        Ok(r[0])
    }

    /// Smallest and largest κ along the path.
    pub fn kappa_range<P: Path + ?Sized>(&self, path: &P) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &(a, b) in &path.pieces() {
            for k in 0..=512 {
                let (p, _) = path.eval(a + (b - a) * k as f64 / 512.0);
                let kp = qubit_model::kappa(&p, &self.bath);
                lo = lo.min(kp);
                hi = hi.max(kp);
            }
        }
        (lo, hi)
    }

    /// All functionals, with L² and ⟨κ⟩ for the uniform, power-optimal and
    /// efficiency-optimal profiles. The optimal-profile values use the closed
    /// forms L² = ℒ², ⟨κ⟩ = ∫κ√q/ℒ and L² = N∫√(qκ), ⟨κ⟩ = ∫κ√(q/κ)/N
    /// with N = ∫√(q/κ).
    pub fn summarize<P: Path + ?Sized>(&self, path: &P) -> Result<GeomSummary> {
        let g = self.geodesic_pass(path)?;
        if !(g.length > 0.0) {
            return Err(Error::DegenerateCurve("zero thermodynamic length".into()));
        }
        let r = quad::integrate::<6, _>(&path.pieces(), &self.quad, |t| {
            let l = self.local(path, t)?;
            let kf = l.kappa.max(KAPPA_FLOOR);
            let sq = l.quad_form.sqrt();
            let slow = (l.quad_form / kf).sqrt();
            Ok([l.quad_form, l.kappa, l.kappa * sq, slow, (l.quad_form * kf).sqrt(), l.kappa * slow])
        })?;
        let (kappa_min, kappa_max) = self.kappa_range(path);
        Ok(GeomSummary {
            area: g.area,
            geodesic_l2: g.length * g.length,
            geodesic_lk2: g.length_kappa * g.length_kappa,
            uniform: ProfileStats { length_l2: r[0], mean_kappa: r[1] },
            power_optimal: ProfileStats { length_l2: g.length * g.length, mean_kappa: r[2] / g.length },
            efficiency_optimal: ProfileStats { length_l2: r[3] * r[4], mean_kappa: r[5] / r[3] },
            kappa_min,
            kappa_max,
        })
    }

    /// A as the flux of the curvature through the enclosed region.
    pub fn area_flux(&self, curve: &Curve) -> Result<f64> {
        let coarse = curve.polygon(FLUX_VERTICES);
        let signed = shoelace(&coarse);
        if signed.abs() < 1e-14 {
            return Ok(0.0);
        }
        check_simple(&coarse)?;
        let sign = signed.signum();
        let i1 = polygon_flux(&coarse, &self.bath);
        let i2 = polygon_flux(&curve.polygon(2 * FLUX_VERTICES), &self.bath);
        Ok(sign * (4.0 * i2 - i1) / 3.0)
    }
}

/// Intersections of the path pieces with the profile cells.
fn clip_cells(pieces: &[(f64, f64)], cells: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in pieces {
        for &(c, d) in cells {
            let (lo, hi) = (a.max(c), b.min(d));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

fn shoelace(v: &[FieldPoint]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p.b_z * q.b_x - q.b_z * p.b_x
        })
        .sum::<f64>()
        * 0.5
}

fn cross(o: FieldPoint, a: FieldPoint, b: FieldPoint) -> f64 {
    (a.b_z - o.b_z) * (b.b_x - o.b_x) - (a.b_x - o.b_x) * (b.b_z - o.b_z)
}

fn on_segment(p: FieldPoint, a: FieldPoint, b: FieldPoint) -> bool {
    p.b_z >= a.b_z.min(b.b_z) && p.b_z <= a.b_z.max(b.b_z) && p.b_x >= a.b_x.min(b.b_x) && p.b_x <= a.b_x.max(b.b_x)
}

fn check_simple(v: &[FieldPoint]) -> Result<()> {
    let n = v.len();
    let scale = v.iter().map(|p| p.b_z.abs().max(p.b_x.abs())).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-13 * scale * scale;
    let sgn = |x: f64| if x > eps { 1 } else if x < -eps { -1 } else { 0 };
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            let (d1, d2) = (sgn(cross(a, b, c)), sgn(cross(a, b, d)));
            let (d3, d4) = (sgn(cross(c, d, a)), sgn(cross(c, d, b)));
            let hit = (d1 * d2 < 0 && d3 * d4 < 0)
                || (d1 == 0 && on_segment(c, a, b))
                || (d2 == 0 && on_segment(d, a, b))
                || (d3 == 0 && on_segment(a, c, d))
                || (d4 == 0 && on_segment(b, c, d));
            if hit {
                return Err(Error::UnsupportedCurve("curve intersects itself".into()));
            }
        }
    }
    Ok(())
}

/// ∬ curvature over the interior of a simple polygon, by Gauss–Legendre
/// integration along vertical scanlines between consecutive vertex abscissae.
fn polygon_flux(v: &[FieldPoint], bath: &BathParams) -> f64 {
    let n = v.len();
    let (ux, uw) = quad::gauss_legendre(6);
    let (wx, ww) = quad::gauss_legendre(8);
    let mut breaks: Vec<f64> = v.iter().map(|p| p.b_z).collect();
    // the curvature is discontinuous at the origin
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    let mut crossings = Vec::new();
    for s in breaks.windows(2) {
        let (u0, u1) = (s[0], s[1]);
        let (um, uh) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
        if uh <= 0.0 {
            continue;
        }
        let active: Vec<usize> = (0..n)
            .filter(|&i| {
                let (a, b) = (v[i].b_z, v[(i + 1) % n].b_z);
                a.min(b) <= u0 && a.max(b) >= u1
            })
            .collect();
        for (xu, wu) in ux.iter().zip(&uw) {
            let u = um + uh * xu;
            crossings.clear();
            for &i in &active {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let f = (u - a.b_z) / (b.b_z - a.b_z);
                crossings.push(a.b_x + f * (b.b_x - a.b_x));
            }
            crossings.sort_by(f64::total_cmp);
            let mut line = 0.0;
            for pair in crossings.chunks_exact(2) {
                line += scanline(u, pair[0], pair[1], &wx, &ww, bath);
            }
            total += wu * uh * line;
        }
    }
    total
}

/// ∫ curvature(u, w) dw over [w0, w1]. Panels are graded towards w = 0,
/// where the curvature varies on the scale |u|.
fn scanline(u: f64, w0: f64, w1: f64, wx: &[f64], ww: &[f64], bath: &BathParams) -> f64 {
    const PANEL: f64 = 0.25;
    let mut cuts = vec![w0, w1];
    let mut k = 0;
    let mut push = |w: f64| {
        if w > w0 && w < w1 {
            cuts.push(w);
        }
    };
    push(0.0);
    let mut d = u.abs().max(1e-12);
    while d < PANEL && k < 60 {
        push(d);
        push(-d);
        d *= 2.0;
        k += 1;
    }
    let first = (w0 / PANEL).ceil() as i64;
    let last = (w1 / PANEL).floor() as i64;
    for j in first..=last {
        push(j as f64 * PANEL);
    }
    cuts.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    for c in cuts.windows(2) {
        let (a, b) = (c[0], c[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        if h <= 0.0 {
            continue;
        }
        for (x, w) in wx.iter().zip(ww) {
            sum += w * h * qubit_model::berry_curvature(&FieldPoint::new(u, m + h * x), bath);
        }
    }
    sum
}
