//! Isoperimetric search: maximize A²/ℒ² (power) or A²/ℒ_κ² (efficiency)
//! over ellipses with a fixed center, plus center scans, the circular-sector
//! family and the uniform-vs-optimal speed comparison.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeodesicTerms, Geometry, GeomSummary};
use crate::performance::{self, Cycle, Drive, Performance};
use crate::qubit_model::{FieldPoint, EPS_MIN};
use crate::trajectory::Curve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// A²/ℒ²
    Power,
    /// A²/ℒ_κ²
    Efficiency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationPolicy {
    AutoFlip,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub orientation_policy: OrientationPolicy,
}

impl Objective {
    pub fn power() -> Self {
        Self { kind: ObjectiveKind::Power, orientation_policy: OrientationPolicy::AutoFlip }
    }

    pub fn efficiency() -> Self {
        Self { kind: ObjectiveKind::Efficiency, orientation_policy: OrientationPolicy::AutoFlip }
    }

    /// Objective from the geodesic terms; infinite when ℒ_κ = 0 and A ≠ 0.
    pub fn value_of(&self, g: &GeodesicTerms) -> f64 {
        let l = match self.kind {
            ObjectiveKind::Power => g.length,
            ObjectiveKind::Efficiency => g.length_kappa,
        };
        if g.area == 0.0 {
            return 0.0;
        }
        g.area * g.area / (l * l)
    }

    pub fn value_of_summary(&self, s: &GeomSummary) -> f64 {
        let l2 = match self.kind {
            ObjectiveKind::Power => s.geodesic_l2,
            ObjectiveKind::Efficiency => s.geodesic_lk2,
        };
        if s.area == 0.0 {
            return 0.0;
        }
        s.area * s.area / l2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub seeds: usize,
    pub max_iterations: usize,
    pub rel_tol: f64,
    pub fd_step: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub stall_limit: usize,
    /// Curves must stay inside this radius.
    pub r_max: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            seeds: 8,
            max_iterations: 500,
            rel_tol: 1e-8,
            fd_step: 1e-4,
            armijo: 1e-4,
            shrink: 0.5,
            stall_limit: 3,
            r_max: 20.0,
            rng_seed: 7,
        }
    }
}

/// Radius below which the origin barrier is active.
pub const BARRIER_RADIUS: f64 = 10.0 * EPS_MIN;
const BARRIER_WEIGHT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub start: [f64; 3],
    pub value: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub used_fallback: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_curve: Curve,
    pub objective_value: f64,
    pub iterations: usize,
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub seeds: Vec<SeedOutcome>,
}

/// Ellipse with a fixed center, encoded as (ln a, ln b, tilt).
struct EllipseProblem<'a> {
    center: FieldPoint,
    objective: Objective,
    geometry: &'a Geometry,
    settings: &'a OptimizerSettings,
}

impl<'a> EllipseProblem<'a> {
    fn curve(&self, x: &[f64; 3]) -> Curve {
        Curve::ellipse(self.center, x[0].exp(), x[1].exp(), x[2])
    }

    /// Penalized objective; `None` where the curve is not admissible.
    fn eval(&self, x: &[f64; 3]) -> Option<f64> {
        if x.iter().any(|v| !v.is_finite()) || x[0] > 10.0 || x[1] > 10.0 {
            return None;
        }
        let c = self.curve(x);
        let outer = self.center.radius() + x[0].exp().max(x[1].exp());
        if outer > self.settings.r_max {
            return None;
        }
        let d = c.min_radius();
        if d <= 2.0 * EPS_MIN {
            return None;
        }
        let g = self.geometry.geodesic_pass(&c).ok()?;
        let mut v = self.objective.value_of(&g);
        if !v.is_finite() {
            return None;
        }
        if d < BARRIER_RADIUS {
            v -= BARRIER_WEIGHT * (BARRIER_RADIUS - d).powi(2);
        }
        Some(v)
    }

    fn gradient(&self, x: &[f64; 3], fx: f64, h: f64) -> [f64; 3] {
        let mut g = [0.0; 3];
        for i in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = match (self.eval(&xp), self.eval(&xm)) {
                (Some(p), Some(m)) => (p - m) / (2.0 * h),
                (Some(p), None) => (p - fx) / h,
                (None, Some(m)) => (fx - m) / h,
                (None, None) => 0.0,
            };
        }
        g
    }

    fn run(&self, start: [f64; 3]) -> (SeedOutcome, [f64; 3], f64, Vec<(usize, f64)>) {
        let s = self.settings;
        let fail = |msg: &str| SeedOutcome {
            start,
            value: None,
            iterations: 0,
            converged: false,
            used_fallback: false,
            error: Some(msg.to_string()),
        };
        let Some(mut fx) = self.eval(&start) else {
            return (fail("start is not admissible"), start, f64::NEG_INFINITY, Vec::new());
        };
        let mut x = start;
        let mut trace = vec![(0, fx)];
        let mut step = 0.5;
        let mut h = s.fd_step;
        let mut stalls = 0;
        let mut converged = false;
        let mut used_fallback = false;
        let mut it = 0;
        while it < s.max_iterations {
            it += 1;
            let g = self.gradient(&x, fx, h);
            let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            let mut accepted = None;
            if gn > 0.0 && gn.is_finite() {
                let mut alpha = step;
                while alpha > 1e-12 {
                    let xn = [x[0] + alpha * g[0] / gn, x[1] + alpha * g[1] / gn, x[2] + alpha * g[2] / gn];
                    if let Some(fnew) = self.eval(&xn) {
                        if fnew >= fx + s.armijo * alpha * gn {
                            accepted = Some((xn, fnew, alpha));
                            break;
                        }
                    }
                    alpha *= s.shrink;
                }
            }
            match accepted {
                Some((xn, fnew, alpha)) => {
                    let rel = (fnew - fx) / fx.abs().max(1e-300);
                    x = xn;
                    fx = fnew;
                    trace.push((it, fx));
                    step = (2.0 * alpha).min(1.0);
                    stalls = 0;
                    if rel < s.rel_tol {
                        converged = true;
                        break;
                    }
                }
                None => {
                    stalls += 1;
                    h = (h * 0.1).max(1e-6);
                    if stalls >= s.stall_limit {
                        used_fallback = true;
                        let (xn, fnew, used, ok) = self.nelder_mead(x, fx, s.max_iterations - it, it, &mut trace);
                        x = xn;
                        fx = fnew;
                        it += used;
                        converged = ok;
                        break;
                    }
                }
            }
        }
        let out = SeedOutcome { start, value: Some(fx), iterations: it, converged, used_fallback, error: None };
        (out, x, fx, trace)
    }

    /// Derivative-free simplex search started at `x0`.
    fn nelder_mead(
        &self,
        x0: [f64; 3],
        f0: f64,
        budget: usize,
        it0: usize,
        trace: &mut Vec<(usize, f64)>,
    ) -> ([f64; 3], f64, usize, bool) {
        // minimize −f, inadmissible points count as +∞
        let cost = |x: &[f64; 3]| self.eval(x).map(|v| -v).unwrap_or(f64::INFINITY);
        let mut simplex: Vec<([f64; 3], f64)> = vec![(x0, -f0)];
        for i in 0..3 {
            let mut x = x0;
            x[i] += 0.1;
            simplex.push((x, cost(&x)));
        }
        let mut best = -f0;
        for k in 0..budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best {
                best = simplex[0].1;
                trace.push((it0 + k, -best));
            }
            let spread = simplex[3].1 - simplex[0].1;
            if spread.is_finite() && spread <= self.settings.rel_tol * simplex[0].1.abs() {
                return (simplex[0].0, -simplex[0].1, k, true);
            }
            let mut c = [0.0; 3];
            for (x, _) in &simplex[..3] {
                for i in 0..3 {
                    c[i] += x[i] / 3.0;
                }
            }
            let towards = |t: f64| {
                let w = simplex[3].0;
                [c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1]), c[2] + t * (w[2] - c[2])]
            };
            let xr = towards(-1.0);
            let fr = cost(&xr);
            if fr < simplex[0].1 {
                let xe = towards(-2.0);
                let fe = cost(&xe);
                simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[2].1 {
                simplex[3] = (xr, fr);
            } else {
                let xc = if fr < simplex[3].1 { towards(-0.5) } else { towards(0.5) };
                let fc = cost(&xc);
                if fc < simplex[3].1.min(fr) {
                    simplex[3] = (xc, fc);
                } else {
                    let b = simplex[0].0;
                    for v in simplex.iter_mut().skip(1) {
                        let x = [b[0] + 0.5 * (v.0[0] - b[0]), b[1] + 0.5 * (v.0[1] - b[1]), b[2] + 0.5 * (v.0[2] - b[2])];
                        *v = (x, cost(&x));
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        (simplex[0].0, -simplex[0].1, budget, false)
    }
}

/// Deterministic start points: semi-axis scale {0.5, 1.5, 3} × tilt {0, π/4}
/// with a 5:4 aspect ratio (circles are stationary points by symmetry), then
/// draws from a fixed-seed generator.
pub fn seed_schedule(n: usize, rng_seed: u64) -> Vec<[f64; 3]> {
    let fixed = if n > 2 { (n - 2).min(6) } else { n };
    let mut out: Vec<[f64; 3]> = [0.5f64, 1.5, 3.0]
        .iter()
        .flat_map(|&s| [0.0, FRAC_PI_4].map(|tilt| [s.ln(), (0.8 * s).ln(), tilt]))
        .take(fixed)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    while out.len() < n {
        let a: f64 = rng.gen_range(0.3f64.ln()..3.0f64.ln());
        let b: f64 = rng.gen_range(0.3f64.ln()..3.0f64.ln());
        let t: f64 = rng.gen_range(0.0..PI);
        out.push([a, b, t]);
    }
    out.truncate(n);
    out
}

fn normalized_ellipse(center: FieldPoint, x: &[f64; 3]) -> Curve {
    let (mut a, mut b, mut tilt) = (x[0].exp(), x[1].exp(), x[2]);
    if b > a {
        std::mem::swap(&mut a, &mut b);
        tilt += 0.5 * PI;
    }
    tilt = tilt.rem_euclid(PI);
    Curve::ellipse(center, a, b, tilt)
}

pub fn optimize_ellipse(
    center: FieldPoint,
    objective: Objective,
    geometry: &Geometry,
    settings: &OptimizerSettings,
) -> Result<OptimizationResult> {
    optimize_ellipse_from(center, objective, geometry, settings, &seed_schedule(settings.seeds, settings.rng_seed))
}

/// Multi-start search from explicit starts (ln a, ln b, tilt).
pub fn optimize_ellipse_from(
    center: FieldPoint,
    objective: Objective,
    geometry: &Geometry,
    settings: &OptimizerSettings,
    starts: &[[f64; 3]],
) -> Result<OptimizationResult> {
    if !(center.b_z.is_finite() && center.b_x.is_finite()) || starts.is_empty() {
        return Err(Error::InvalidParameter("optimizer needs a finite center and at least one seed".into()));
    }
    let problem = EllipseProblem { center, objective, geometry, settings };
    let runs: Vec<_> = starts.par_iter().map(|s| problem.run(*s)).collect();
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.0.value.is_some())
        .max_by(|a, b| a.1 .2.total_cmp(&b.1 .2).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or(Error::AllSeedsFailed)?;
    let (outcome, x, value, trace) = runs[best].clone();
    let mut curve = normalized_ellipse(center, &x);
    if objective.orientation_policy == OrientationPolicy::AutoFlip && geometry.area_line(&curve)? < 0.0 {
        curve = curve.reversed();
    }
    Ok(OptimizationResult {
        best_curve: curve,
        objective_value: value,
        iterations: outcome.iterations,
        trace,
        converged: outcome.converged,
        seeds: runs.into_iter().map(|r| r.0).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterGrid {
    pub z_range: (f64, f64),
    pub x_range: (f64, f64),
    pub nz: usize,
    pub nx: usize,
}

impl CenterGrid {
    pub fn centers(&self) -> Vec<FieldPoint> {
        let lin = |(lo, hi): (f64, f64), n: usize, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.nz * self.nx);
        for i in 0..self.nx {
            for j in 0..self.nz {
                out.push(FieldPoint::new(lin(self.z_range, self.nz, j), lin(self.x_range, self.nx, i)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub center: FieldPoint,
    pub objective_value: Option<f64>,
    pub curve: Option<Curve>,
    pub performance: Option<Performance>,
    pub error: Option<String>,
}

/// Optimizes an ellipse at every grid center. Failed cells are recorded and
/// the scan continues; cells come back in grid order (B_z fastest).
pub fn scan_centers(
    grid: &CenterGrid,
    objective: Objective,
    geometry: &Geometry,
    settings: &OptimizerSettings,
    drive: &Drive,
) -> Result<Vec<ScanCell>> {
    if grid.nz == 0 || grid.nx == 0 {
        return Err(Error::InvalidParameter("scan grid must be non-empty".into()));
    }
    let centers = grid.centers();
    Ok(centers
        .par_iter()
        .map(|&center| {
            let res = optimize_ellipse(center, objective, geometry, settings).and_then(|r| {
                let s = geometry.summarize(&r.best_curve)?;
                let perf = performance::engine_figures(&s, drive).ok();
                Ok((r, perf))
            });
            match res {
                Ok((r, perf)) => {
                    log::info!("cell ({:.3}, {:.3}) -> {:.6e}", center.b_z, center.b_x, r.objective_value);
                    ScanCell {
                        center,
                        objective_value: Some(r.objective_value),
                        curve: Some(r.best_curve),
                        performance: perf,
                        error: None,
                    }
                }
                Err(e) => {
                    log::warn!("cell ({:.3}, {:.3}) failed: {e}", center.b_z, center.b_x);
                    ScanCell { center, objective_value: None, curve: None, performance: None, error: Some(e.to_string()) }
                }
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorRow {
    pub radius: f64,
    pub aperture: f64,
    pub area: f64,
    pub power_objective: f64,
    /// `None` when ℒ_κ vanishes.
    pub efficiency_objective: Option<f64>,
    /// η_max/η_C with the efficiency-optimal profile.
    pub eta_max: f64,
}

/// Sectors symmetric about the first-quadrant bisector on an (R, Ω) grid.
pub fn sector_study(radii: &[f64], apertures: &[f64], geometry: &Geometry) -> Result<Vec<SectorRow>> {
    if radii.iter().any(|&r| !(r > 0.0 && r <= 30.0)) || apertures.iter().any(|&o| !(o > 0.0 && o <= PI)) {
        return Err(Error::InvalidParameter("sector grid must lie in (0, 30] × (0, π]".into()));
    }
    let cells: Vec<(f64, f64)> = radii.iter().flat_map(|&r| apertures.iter().map(move |&o| (r, o))).collect();
    cells
        .par_iter()
        .map(|&(radius, aperture)| {
            let g = geometry.geodesic_pass(&Curve::sector(radius, aperture))?;
            let power_objective = Objective::power().value_of(&g);
            let eff = Objective::efficiency().value_of(&g);
            let efficiency_objective = if eff.is_finite() { Some(eff) } else { None };
            let x = 1.0 + eff;
            let eta_max = if x.is_finite() { 1.0 - 2.0 / (x.sqrt() + 1.0) } else { 1.0 };
            Ok(SectorRow { radius, aperture, area: g.area.abs(), power_objective, efficiency_objective, eta_max })
        })
        .collect()
}

/// Best aperture for each radius.
pub fn sector_ridge(rows: &[SectorRow]) -> Vec<SectorRow> {
    let mut out: Vec<SectorRow> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|o| o.radius == r.radius) {
            Some(o) if r.power_objective > o.power_objective => *o = *r,
            Some(_) => {}
            None => out.push(*r),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileComparison {
    pub taus: Vec<f64>,
    pub uniform_power: Vec<f64>,
    pub optimal_power: Vec<f64>,
    /// η/η_C
    pub uniform_efficiency: Vec<f64>,
    pub optimal_efficiency: Vec<f64>,
    pub power_ratio: f64,
    pub efficiency_ratio: f64,
    pub summary: GeomSummary,
}

/// P(τ) and η(τ) for constant speed versus the optimal profiles (power-
/// optimal for P, efficiency-optimal for η) on a log-spaced τ grid.
pub fn compare_profiles(curve: &Curve, geometry: &Geometry, drive: &Drive, points: usize) -> Result<ProfileComparison> {
    let mut s = geometry.summarize(curve)?;
    if s.area == 0.0 {
        return Err(Error::WrongOrientation { mode: "engine", area: 0.0 });
    }
    if s.area < 0.0 {
        s = geometry.summarize(&curve.reversed())?;
    }
    let b = drive.bias_ratio;
    let uni = Cycle::new(s.area, s.uniform, b);
    let pow = Cycle::new(s.area, s.power_optimal, b);
    let eff = Cycle::new(s.area, s.efficiency_optimal, b);
    let lo = 0.5 * pow.tau_d().min(uni.tau_d());
    let top = [uni.tau_eta(), eff.tau_eta(), uni.tau_p()].iter().copied().filter(|t| t.is_finite()).fold(0.0, f64::max);
    let hi = 20.0 * top.max(lo * 10.0);
    let n = points.max(2);
    let taus: Vec<f64> = (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect();
    Ok(ProfileComparison {
        uniform_power: taus.iter().map(|&t| uni.power(t)).collect(),
        optimal_power: taus.iter().map(|&t| pow.power(t)).collect(),
        uniform_efficiency: taus.iter().map(|&t| uni.efficiency(t)).collect(),
        optimal_efficiency: taus.iter().map(|&t| eff.efficiency(t)).collect(),
        power_ratio: pow.p_max() / uni.p_max(),
        efficiency_ratio: eff.eta_max() / uni.eta_max(),
        taus,
        summary: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit_model::BathParams;

    fn geo() -> Geometry {
        Geometry::new(BathParams::default())
    }

    #[test]
    fn schedule_is_fixed_then_random() {
        let s = seed_schedule(8, 7);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], [0.5f64.ln(), 0.4f64.ln(), 0.0]);
        assert_eq!(s[5], [3f64.ln(), (0.8 * 3f64).ln(), FRAC_PI_4]);
        assert_eq!(s, seed_schedule(8, 7));
        assert_ne!(s[6], seed_schedule(8, 8)[6]);
        assert_eq!(seed_schedule(1, 7).len(), 1);
    }

    #[test]
    fn trace_never_decreases() {
        let g = geo();
        let s = OptimizerSettings::default();
        let r = optimize_ellipse_from(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s, &[[0.2, -0.3, 0.4]]).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 > w[0].0));
        assert!(r.converged);
    }

    #[test]
    fn tiny_seed_escapes() {
        let g = geo();
        let s = OptimizerSettings::default();
        let start = [1e-4f64.ln(), 1e-4f64.ln(), 0.0];
        let r = optimize_ellipse_from(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s, &[start]).unwrap();
        assert!(r.trace[0].1 < 1e-6);
        assert!(r.objective_value > 0.02, "{}", r.objective_value);
    }

    #[test]
    fn reported_value_matches_summary() {
        let g = geo();
        let mut s = OptimizerSettings::default();
        s.seeds = 3;
        let r = optimize_ellipse(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s).unwrap();
        let sum = g.summarize(&r.best_curve).unwrap();
        assert!(sum.area > 0.0);
        let v = Objective::power().value_of_summary(&sum);
        assert!((v - r.objective_value).abs() <= 1e-10 * v);
    }

    #[test]
    fn fixed_policy_keeps_forward_orientation() {
        let g = geo();
        let mut s = OptimizerSettings::default();
        s.seeds = 1;
        let obj = Objective { kind: ObjectiveKind::Power, orientation_policy: OrientationPolicy::Fixed };
        let r = optimize_ellipse(FieldPoint::new(1.0, 1.0), obj, &g, &s).unwrap();
        assert_eq!(r.best_curve.orientation, 1);
    }

    #[test]
    fn seeds_through_the_origin_fail() {
        let g = geo();
        let s = OptimizerSettings::default();
        // circle of radius 1 about (1, 0) passes through the origin
        let r = optimize_ellipse_from(FieldPoint::new(1.0, 0.0), Objective::power(), &g, &s, &[[0.0, 0.0, 0.0]]);
        assert_eq!(r.unwrap_err(), Error::AllSeedsFailed);
    }

    #[test]
    fn rejects_bad_input() {
        let g = geo();
        let s = OptimizerSettings::default();
        assert!(optimize_ellipse_from(FieldPoint::new(f64::NAN, 0.0), Objective::power(), &g, &s, &[[0.0; 3]]).is_err());
        assert!(optimize_ellipse_from(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s, &[]).is_err());
        assert!(sector_study(&[0.0], &[1.0], &g).is_err());
        assert!(sector_study(&[1.0], &[4.0], &g).is_err());
    }

    #[test]
    fn thin_sectors_enclose_nothing() {
        let rows = sector_study(&[5.0], &[1e-4, 0.5, PI / 2.0], &geo()).unwrap();
        assert!(rows[0].area < 1e-3);
        assert!(rows[0].area < rows[1].area && rows[1].area < rows[2].area);
        let ridge = sector_ridge(&rows);
        assert_eq!(ridge.len(), 1);
        assert_eq!(ridge[0].aperture, PI / 2.0);
    }

    #[test]
    fn grid_order_is_z_fastest() {
        let g = CenterGrid { z_range: (0.0, 1.0), x_range: (2.0, 3.0), nz: 2, nx: 2 };
        let c = g.centers();
        assert_eq!((c[1].b_z, c[1].b_x), (1.0, 2.0));
        assert_eq!((c[2].b_z, c[2].b_x), (0.0, 3.0));
    }
}
