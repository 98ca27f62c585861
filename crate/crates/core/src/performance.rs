//! Engine and refrigerator figures of merit in the slow-driving regime.
//!
//! With bias b = ΔT/T a cycle of duration τ produces work
//! W = bA − L²/τ and absorbs heat Q = A + bτ⟨κ⟩ from the hot bath.
//! Efficiencies are reported as fractions of the Carnot value.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeomSummary, ProfileStats};

/// Bias above which linear response is doubtful.
pub const BIAS_WARN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Engine,
    Refrigerator,
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Engine => "engine",
            Mode::Refrigerator => "refrigerator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub bias_ratio: f64,
    pub mode: Mode,
}

impl Drive {
    pub fn new(bias_ratio: f64, mode: Mode) -> Result<Self> {
        if !(bias_ratio > 0.0 && bias_ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("bias ratio must be positive, got {bias_ratio}")));
        }
        if bias_ratio > BIAS_WARN {
            log::warn!("bias ratio {bias_ratio} is outside the linear-response regime");
        }
        Ok(Self { bias_ratio, mode })
    }

    pub fn engine(bias_ratio: f64) -> Result<Self> {
        Self::new(bias_ratio, Mode::Engine)
    }

    /// η_C = ΔT/T.
    pub fn carnot(&self) -> f64 {
        self.bias_ratio
    }

    /// η′_C = T/ΔT.
    pub fn carnot_cop(&self) -> f64 {
        1.0 / self.bias_ratio
    }
}

/// One cycle shape traversed with one speed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub area: f64,
    pub length_l2: f64,
    pub mean_kappa: f64,
    pub bias: f64,
}

/// Durations and figures of merit of one profile. `None` marks an infinite
/// value (no heat leak), with `saturated` set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileFigures {
    pub tau_d: f64,
    pub tau_kappa: Option<f64>,
    pub tau_p: f64,
    pub tau_eta: Option<f64>,
    pub p_max: f64,
    pub eta_pmax: f64,
    pub eta_max: f64,
    pub p_eta_max: f64,
    pub x: Option<f64>,
    pub saturated: bool,
}

impl Cycle {
    pub fn new(area: f64, stats: ProfileStats, bias: f64) -> Self {
        Self { area, length_l2: stats.length_l2, mean_kappa: stats.mean_kappa, bias }
    }

    pub fn work(&self, tau: f64) -> f64 {
        self.bias * self.area - self.length_l2 / tau
    }

    pub fn heat(&self, tau: f64) -> f64 {
        self.area + self.bias * tau * self.mean_kappa
    }

    pub fn power(&self, tau: f64) -> f64 {
        self.work(tau) / tau
    }

    /// η(τ)/η_C.
    pub fn efficiency(&self, tau: f64) -> f64 {
        self.work(tau) / self.heat(tau) / self.bias
    }

    /// τ_D = (T/ΔT) L²/A.
    pub fn tau_d(&self) -> f64 {
        self.length_l2 / (self.bias * self.area)
    }

    /// τ_κ = (T/ΔT) A/⟨κ⟩.
    pub fn tau_kappa(&self) -> f64 {
        self.area / (self.bias * self.mean_kappa)
    }

    /// x = 1 + A²/(L²⟨κ⟩), infinite without heat leak.
    pub fn x(&self) -> f64 {
        if self.area == 0.0 {
            return 1.0;
        }
        1.0 + self.area * self.area / (self.length_l2 * self.mean_kappa)
    }

    pub fn tau_p(&self) -> f64 {
        2.0 * self.tau_d()
    }

    pub fn tau_eta(&self) -> f64 {
        let td = self.tau_d();
        td + (td * (td + self.tau_kappa())).sqrt()
    }

    pub fn p_max(&self) -> f64 {
        0.25 * self.bias * self.bias * self.area * self.area / self.length_l2
    }

    /// η_{P_max}/η_C = (x − 1)/(2(x + 1)).
    pub fn eta_pmax(&self) -> f64 {
        let x = self.x();
        if x.is_infinite() {
            0.5
        } else {
            0.5 * (x - 1.0) / (x + 1.0)
        }
    }

    /// η_max/η_C = 1 − 2/(√x + 1).
    pub fn eta_max(&self) -> f64 {
        let x = self.x();
        if x.is_infinite() {
            1.0
        } else {
            1.0 - 2.0 / (x.sqrt() + 1.0)
        }
    }

    pub fn p_eta_max(&self) -> f64 {
        let x = self.x();
        if x.is_infinite() || self.mean_kappa == 0.0 {
            return 0.0;
        }
        let s = x.sqrt();
        self.bias * self.bias * self.mean_kappa * (s - 1.0) * (s - 1.0) / s
    }

    pub fn figures(&self) -> ProfileFigures {
        let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
        let x = self.x();
        ProfileFigures {
            tau_d: self.tau_d(),
            tau_kappa: finite(self.tau_kappa()),
            tau_p: self.tau_p(),
            tau_eta: finite(self.tau_eta()),
            p_max: self.p_max(),
            eta_pmax: self.eta_pmax(),
            eta_max: self.eta_max(),
            p_eta_max: self.p_eta_max(),
            x: finite(x),
            saturated: !x.is_finite(),
        }
    }
}

/// Engine figures. Power figures come from the power-optimal profile,
/// efficiency figures from the efficiency-optimal profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    pub tau_p: f64,
    pub p_max: f64,
    pub eta_pmax: f64,
    pub tau_eta: Option<f64>,
    pub eta_max: f64,
    pub p_eta_max: f64,
    pub x: Option<f64>,
    pub saturated: bool,
    pub power_profile: ProfileFigures,
    pub efficiency_profile: ProfileFigures,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefrigeratorPerformance {
    pub tau_eta_prime: Option<f64>,
    /// η′_max/η′_C
    pub cop_max: f64,
    pub cooling_power_at_cop_max: f64,
    pub x: Option<f64>,
    pub saturated: bool,
}

/// (W, Q) for a cycle of duration τ.
pub fn work_and_heat(area: f64, stats: ProfileStats, d: &Drive, tau: f64) -> (f64, f64) {
    let c = Cycle::new(area, stats, d.bias_ratio);
    (c.work(tau), c.heat(tau))
}

pub fn engine_figures(g: &GeomSummary, d: &Drive) -> Result<Performance> {
    if !(g.area > 0.0) {
        return Err(Error::WrongOrientation { mode: Mode::Engine.name(), area: g.area });
    }
    let p = Cycle::new(g.area, g.power_optimal, d.bias_ratio).figures();
    let e = Cycle::new(g.area, g.efficiency_optimal, d.bias_ratio).figures();
    Ok(Performance {
        tau_p: p.tau_p,
        p_max: p.p_max,
        eta_pmax: p.eta_pmax,
        tau_eta: e.tau_eta,
        eta_max: e.eta_max,
        p_eta_max: e.p_eta_max,
        x: e.x,
        saturated: e.saturated,
        power_profile: p,
        efficiency_profile: e,
    })
}

pub fn refrigerator_figures(g: &GeomSummary, d: &Drive) -> Result<RefrigeratorPerformance> {
    if !(g.area < 0.0) {
        return Err(Error::WrongOrientation { mode: Mode::Refrigerator.name(), area: g.area });
    }
    let s = g.efficiency_optimal;
    let b = d.bias_ratio;
    // τ_D and τ_κ are negative for A < 0
    let td = s.length_l2 / (b * g.area);
    let tk = g.area / (b * s.mean_kappa);
    let c = Cycle::new(-g.area, s, b);
    let x = c.x();
    let tau = (td * (td + tk)).sqrt() - td.abs();
    let (cop, cooling) = if x.is_infinite() {
        (1.0, if s.mean_kappa > 0.0 { b * s.mean_kappa * x.sqrt() } else { 0.0 })
    } else {
        (1.0 - 2.0 / (x.sqrt() + 1.0), b * s.mean_kappa * x.sqrt())
    };
    Ok(RefrigeratorPerformance {
        tau_eta_prime: if tau.is_finite() { Some(tau) } else { None },
        cop_max: cop,
        cooling_power_at_cop_max: cooling,
        x: if x.is_finite() { Some(x) } else { None },
        saturated: !x.is_finite(),
    })
}

/// P_lim = ln 2 · η_C/(2τ_P), the power of a Landauer-limited cycle run at
/// the same duration.
pub fn limiting_power(g: &GeomSummary, d: &Drive) -> Result<f64> {
    let perf = engine_figures(g, d)?;
    Ok(LN_2 * d.carnot() / (2.0 * perf.tau_p))
}
