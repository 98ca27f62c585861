use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::PathBuf;

use adiacycle_core::optimizer::{
    self, CenterGrid, Objective, ObjectiveKind, OptimizationResult, OptimizerSettings, ProfileComparison, ScanCell,
    SectorRow,
};
use adiacycle_core::performance::{engine_figures, limiting_power, refrigerator_figures};
use adiacycle_core::qubit_model::{self, EPS_MIN};
use adiacycle_core::units::{power_to_si, time_to_si};
use adiacycle_core::{
    BathParams, Curve, FieldPoint, GeomSummary, Geometry, Performance, RefrigeratorPerformance, Shape,
};
use serde::Serialize;

use crate::config::{check_grid, GridSection, RunConfig};
use crate::error::CliError;
use crate::output::{num, opt, out_path, write_json, Header, Table};

pub enum Status {
    Done,
    /// Number of failed cells.
    Partial(usize),
}

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub geometry: Geometry,
}

impl Ctx {
    pub fn new(cfg: RunConfig, out: PathBuf) -> Result<Self, CliError> {
        if !(cfg.numerics.tolerance > 0.0 && cfg.numerics.tolerance < 1.0) {
            return Err(CliError::Config(format!("tolerance must lie in (0, 1), got {}", cfg.numerics.tolerance)));
        }
        cfg.drive()?;
        cfg.units()?;
        let geometry = Geometry::new(cfg.bath()?).with_tolerance(cfg.numerics.tolerance);
        Ok(Self { cfg, out, geometry })
    }

    fn header(&self, command: &str) -> Header {
        Header { command: command.to_string(), config: self.cfg.to_toml() }
    }

    fn path(&self, name: &str) -> Result<PathBuf, CliError> {
        out_path(&self.out, name)
    }

    fn settings(&self) -> OptimizerSettings {
        let o = &self.cfg.optimize;
        OptimizerSettings {
            seeds: o.seeds,
            max_iterations: o.max_iterations,
            r_max: o.r_max,
            rng_seed: self.cfg.seed,
            ..OptimizerSettings::default()
        }
    }

    fn curve(&self) -> Result<Curve, CliError> {
        let c = self.cfg.curve.clone().ok_or_else(|| CliError::Config("this command needs a [curve] section".into()))?;
        c.validate()?;
        Ok(c)
    }
}

fn objective(kind: ObjectiveKind) -> Objective {
    match kind {
        ObjectiveKind::Power => Objective::power(),
        ObjectiveKind::Efficiency => Objective::efficiency(),
    }
}

fn linspace(r: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r[0]];
    }
    (0..n).map(|k| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(r: [f64; 2], n: usize) -> Vec<f64> {
    linspace([r[0].ln(), r[1].ln()], n).into_iter().map(f64::exp).collect()
}

// ---------------------------------------------------------------- coeffs

struct CoeffRow {
    p: FieldPoint,
    lambda_r: f64,
    lambda_phi: f64,
    vec: [f64; 2],
    kappa: f64,
    curvature: f64,
    lk_max: f64,
}

fn coeff_rows(g: &GridSection, bath: &BathParams) -> Result<Vec<CoeffRow>, CliError> {
    check_grid("coeffs", g.z_range, g.x_range, g.nz, g.nx)?;
    let mut out = Vec::with_capacity(g.nz * g.nx);
    for &x in &linspace(g.x_range, g.nx) {
        for &z in &linspace(g.z_range, g.nz) {
            let p = FieldPoint::new(z, x);
            let r = p.radius();
            let (lambda_r, lambda_phi) = if r > EPS_MIN {
                (qubit_model::lambda_radial(r, bath)?, qubit_model::lambda_tangential(r, bath)?)
            } else {
                log::warn!("grid point ({z}, {x}) lies inside the origin guard; metric written as NaN");
                (f64::NAN, f64::NAN)
            };
            let v = qubit_model::lambda_vector(&p, bath);
            let kappa = qubit_model::kappa(&p, bath);
            out.push(CoeffRow {
                p,
                lambda_r,
                lambda_phi,
                vec: [v[0], v[1]],
                kappa,
                curvature: qubit_model::berry_curvature(&p, bath),
                lk_max: kappa * lambda_r.max(lambda_phi),
            });
        }
    }
    Ok(out)
}

pub fn coeffs(ctx: &Ctx) -> Result<Status, CliError> {
    let rows = coeff_rows(&ctx.cfg.coeffs, &ctx.geometry.bath)?;
    let mut t = Table::new(
        &["b_z", "b_x", "lambda_r", "lambda_phi", "lambda_vec_z", "lambda_vec_x", "kappa", "curvature", "lambda_k_max_eigenvalue"],
        "field point, metric eigenvalues, pumped-heat vector, thermal conductance, curvature, largest eigenvalue of kappa times the metric",
    );
    for r in &rows {
        t.push(vec![
            num(r.p.b_z),
            num(r.p.b_x),
            num(r.lambda_r),
            num(r.lambda_phi),
            num(r.vec[0]),
            num(r.vec[1]),
            num(r.kappa),
            num(r.curvature),
            num(r.lk_max),
        ]);
    }
    t.write(&ctx.path("coeffs.csv")?, &ctx.header("coeffs"))?;
    Ok(Status::Done)
}

// ------------------------------------------------------------------ eval

#[derive(Serialize)]
struct StokesCheck {
    area_flux: Option<f64>,
    residual: Option<f64>,
    note: Option<String>,
}

#[derive(Serialize)]
struct EngineSi {
    p_max_watts: f64,
    tau_p_seconds: f64,
    p_eta_max_watts: f64,
    tau_eta_seconds: Option<f64>,
    limiting_power_watts: f64,
}

#[derive(Serialize)]
struct RefrigeratorSi {
    tau_eta_prime_seconds: Option<f64>,
    cooling_power_watts: f64,
}

#[derive(Serialize)]
struct ProfileMeta {
    power_figures: &'static str,
    efficiency_figures: &'static str,
}

const PROFILE_META: ProfileMeta = ProfileMeta { power_figures: "power_optimal", efficiency_figures: "efficiency_optimal" };

#[derive(Serialize)]
struct EvalReport {
    curve: Curve,
    #[serde(rename = "area_A")]
    area_a: f64,
    summary: GeomSummary,
    stokes: StokesCheck,
    profiles: ProfileMeta,
    engine: Option<Performance>,
    engine_error: Option<String>,
    engine_si: Option<EngineSi>,
    p_max_over_p_lim: Option<f64>,
    refrigerator: Option<RefrigeratorPerformance>,
    refrigerator_error: Option<String>,
    refrigerator_si: Option<RefrigeratorSi>,
}

pub fn eval(ctx: &Ctx) -> Result<Status, CliError> {
    let curve = ctx.curve()?;
    let g = &ctx.geometry;
    let s = g.summarize(&curve)?;
    let d = ctx.cfg.drive()?;
    let u = ctx.cfg.units()?;
    let stokes = match g.area_flux(&curve) {
        Ok(f) => StokesCheck {
            area_flux: Some(f),
            residual: Some(if s.area != 0.0 { (s.area - f).abs() / s.area.abs() } else { (s.area - f).abs() }),
            note: None,
        },
        Err(e) => StokesCheck { area_flux: None, residual: None, note: Some(e.to_string()) },
    };
    let (engine, engine_error) = match engine_figures(&s, &d) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut engine_si = None;
    let mut ratio = None;
    if let Some(p) = &engine {
        let lim = limiting_power(&s, &d)?;
        ratio = Some(p.p_max / lim);
        engine_si = Some(EngineSi {
            p_max_watts: power_to_si(p.p_max, &u),
            tau_p_seconds: time_to_si(p.tau_p, &u),
            p_eta_max_watts: power_to_si(p.p_eta_max, &u),
            tau_eta_seconds: p.tau_eta.map(|t| time_to_si(t, &u)),
            limiting_power_watts: power_to_si(lim, &u),
        });
    }
    let (refrigerator, refrigerator_error) = match refrigerator_figures(&s, &d) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let refrigerator_si = refrigerator.as_ref().map(|r| RefrigeratorSi {
        tau_eta_prime_seconds: r.tau_eta_prime.map(|t| time_to_si(t, &u)),
        cooling_power_watts: power_to_si(r.cooling_power_at_cop_max, &u),
    });
    let report = EvalReport {
        curve,
        area_a: s.area,
        summary: s,
        stokes,
        profiles: PROFILE_META,
        engine,
        engine_error,
        engine_si,
        p_max_over_p_lim: ratio,
        refrigerator,
        refrigerator_error,
        refrigerator_si,
    };
    let text = write_json(&ctx.path("eval.json")?, &ctx.header("eval"), &report)?;
    // A closed pipe (e.g. `| head`) is not an error for the run itself.
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{text}");
    Ok(Status::Done)
}

// -------------------------------------------------------------- optimize

#[derive(Serialize)]
struct OptimizeReport {
    result: OptimizationResult,
    summary: GeomSummary,
    profiles: ProfileMeta,
    engine: Option<Performance>,
}

fn run_optimize(ctx: &Ctx, kind: ObjectiveKind) -> Result<(OptimizationResult, GeomSummary), CliError> {
    let c = ctx.cfg.optimize.center;
    if c.iter().any(|v| !v.is_finite()) || ctx.cfg.optimize.seeds == 0 {
        return Err(CliError::Config("[optimize] needs a finite center and seeds ≥ 1".into()));
    }
    let r = optimizer::optimize_ellipse(FieldPoint::new(c[0], c[1]), objective(kind), &ctx.geometry, &ctx.settings())?;
    let s = ctx.geometry.summarize(&r.best_curve)?;
    Ok((r, s))
}

pub fn optimize(ctx: &Ctx) -> Result<Status, CliError> {
    let (r, s) = run_optimize(ctx, ctx.cfg.optimize.objective)?;
    let mut t = Table::new(&["step", "objective"], "accepted iteration, objective value of the best start");
    for &(k, v) in &r.trace {
        t.push(vec![k.to_string(), num(v)]);
    }
    t.write(&ctx.path("optimize_trace.csv")?, &ctx.header("optimize"))?;
    let engine = engine_figures(&s, &ctx.cfg.drive()?).ok();
    let report = OptimizeReport { result: r, summary: s, profiles: PROFILE_META, engine };
    write_json(&ctx.path("optimize.json")?, &ctx.header("optimize"), &report)?;
    Ok(Status::Done)
}

// ------------------------------------------------------------------ scan

fn run_scan(ctx: &Ctx, kind: ObjectiveKind) -> Result<Vec<ScanCell>, CliError> {
    let s = &ctx.cfg.scan;
    check_grid("scan", s.z_range, s.x_range, s.nz, s.nx)?;
    let grid = CenterGrid { z_range: (s.z_range[0], s.z_range[1]), x_range: (s.x_range[0], s.x_range[1]), nz: s.nz, nx: s.nx };
    Ok(optimizer::scan_centers(&grid, objective(kind), &ctx.geometry, &ctx.settings(), &ctx.cfg.drive()?)?)
}

fn ellipse_params(c: &Option<Curve>) -> [f64; 3] {
    match c.as_ref().map(|c| &c.shape) {
        Some(Shape::Ellipse { a, b, tilt, .. }) => [*a, *b, *tilt],
        _ => [f64::NAN; 3],
    }
}

fn scan_table(cells: &[ScanCell], readme: &str) -> Table {
    let mut t = Table::new(
        &["b_z", "b_x", "objective", "a", "b", "tilt", "p_max", "eta_pmax", "eta_max", "status"],
        readme,
    );
    for c in cells {
        let [a, b, tilt] = ellipse_params(&c.curve);
        let p = c.performance.as_ref();
        t.push(vec![
            num(c.center.b_z),
            num(c.center.b_x),
            num(c.objective_value.unwrap_or(f64::NAN)),
            num(a),
            num(b),
            num(tilt),
            num(p.map(|p| p.p_max).unwrap_or(f64::NAN)),
            num(p.map(|p| p.eta_pmax).unwrap_or(f64::NAN)),
            num(p.map(|p| p.eta_max).unwrap_or(f64::NAN)),
            if c.error.is_some() { "failed".into() } else { "ok".into() },
        ]);
    }
    t
}

fn write_failures(ctx: &Ctx, cells: &[ScanCell], command: &str) -> Result<usize, CliError> {
    let failed: Vec<&ScanCell> = cells.iter().filter(|c| c.error.is_some()).collect();
    if failed.is_empty() {
        return Ok(0);
    }
    let mut t = Table::new(&["b_z", "b_x", "error"], "centers whose optimization failed");
    for c in &failed {
        t.push(vec![num(c.center.b_z), num(c.center.b_x), c.error.clone().unwrap_or_default()]);
    }
    t.write(&ctx.path(&format!("{command}_failures.csv"))?, &ctx.header(command))?;
    Ok(failed.len())
}

pub fn scan(ctx: &Ctx) -> Result<Status, CliError> {
    let cells = run_scan(ctx, ctx.cfg.scan.objective)?;
    scan_table(&cells, "ellipse center, best objective, best semi-axes and tilt, engine figures (efficiencies as fractions of Carnot)")
        .write(&ctx.path("scan.csv")?, &ctx.header("scan"))?;
    Ok(match write_failures(ctx, &cells, "scan")? {
        0 => Status::Done,
        n => Status::Partial(n),
    })
}

// ---------------------------------------------------------------- sector

fn sector_grid(ctx: &Ctx) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let s = &ctx.cfg.sector;
    if s.n_radius == 0 || s.n_aperture == 0 {
        return Err(CliError::Config("[sector] needs n_radius, n_aperture ≥ 1".into()));
    }
    let radii = linspace(s.radius_range, s.n_radius);
    let apertures = (1..=s.n_aperture).map(|k| k as f64 * PI / s.n_aperture as f64).collect();
    Ok((radii, apertures))
}

fn sector_table(rows: &[SectorRow]) -> Table {
    let mut t = Table::new(
        &["radius", "aperture", "area", "power_objective", "efficiency_objective", "eta_max"],
        "sector radius R, aperture Omega, enclosed A, A^2/L^2, A^2/L_kappa^2, eta_max/eta_C",
    );
    for r in rows {
        t.push(vec![
            num(r.radius),
            num(r.aperture),
            num(r.area),
            num(r.power_objective),
            opt(r.efficiency_objective),
            num(r.eta_max),
        ]);
    }
    t
}

fn sector_efficiency(ctx: &Ctx) -> Result<Table, CliError> {
    let rows = optimizer::sector_study(&ctx.cfg.sector.efficiency_radii, &[FRAC_PI_2], &ctx.geometry)?;
    let mut t = Table::new(&["radius", "eta_max"], "sector radius R at Omega = pi/2, eta_max/eta_C");
    for r in &rows {
        t.push(vec![num(r.radius), num(r.eta_max)]);
    }
    Ok(t)
}

pub fn sector(ctx: &Ctx) -> Result<Status, CliError> {
    let (radii, apertures) = sector_grid(ctx)?;
    let rows = optimizer::sector_study(&radii, &apertures, &ctx.geometry)?;
    let h = ctx.header("sector");
    sector_table(&rows).write(&ctx.path("sector.csv")?, &h)?;
    let mut ridge = Table::new(&["radius", "aperture", "power_objective"], "best aperture for each radius and its A^2/L^2");
    for r in optimizer::sector_ridge(&rows) {
        ridge.push(vec![num(r.radius), num(r.aperture), num(r.power_objective)]);
    }
    ridge.write(&ctx.path("sector_ridge.csv")?, &h)?;
    sector_efficiency(ctx)?.write(&ctx.path("sector_efficiency.csv")?, &h)?;
    Ok(Status::Done)
}

// -------------------------------------------------------------- profiles

#[derive(Serialize)]
struct ProfilesReport {
    curve: Curve,
    power_ratio: f64,
    efficiency_ratio: f64,
    summary: GeomSummary,
}

fn run_profiles(ctx: &Ctx) -> Result<(Curve, ProfileComparison), CliError> {
    let curve = match &ctx.cfg.curve {
        Some(_) => ctx.curve()?,
        None => run_optimize(ctx, ObjectiveKind::Power)?.0.best_curve,
    };
    let cmp = optimizer::compare_profiles(&curve, &ctx.geometry, &ctx.cfg.drive()?, ctx.cfg.profiles.points)?;
    Ok((curve, cmp))
}

fn profiles_table(cmp: &ProfileComparison) -> Table {
    let mut t = Table::new(
        &["tau", "uniform_power", "optimal_power", "uniform_efficiency", "optimal_efficiency"],
        "cycle duration tau; power for constant speed and for the power-optimal profile; eta/eta_C for constant speed and for the efficiency-optimal profile",
    );
    for i in 0..cmp.taus.len() {
        t.push(vec![
            num(cmp.taus[i]),
            num(cmp.uniform_power[i]),
            num(cmp.optimal_power[i]),
            num(cmp.uniform_efficiency[i]),
            num(cmp.optimal_efficiency[i]),
        ]);
    }
    t
}

pub fn profiles(ctx: &Ctx) -> Result<Status, CliError> {
    let (curve, cmp) = run_profiles(ctx)?;
    let h = ctx.header("profiles");
    profiles_table(&cmp).write(&ctx.path("profiles.csv")?, &h)?;
    let report = ProfilesReport { curve, power_ratio: cmp.power_ratio, efficiency_ratio: cmp.efficiency_ratio, summary: cmp.summary };
    write_json(&ctx.path("profiles.json")?, &h, &report)?;
    Ok(Status::Done)
}

// ------------------------------------------------------ reproduce-figures

pub fn reproduce_figures(ctx: &Ctx) -> Result<Status, CliError> {
    let h = ctx.header("reproduce-figures");
    let bath = ctx.geometry.bath;
    let f = &ctx.cfg.figures;

    let rows = coeff_rows(&ctx.cfg.coeffs, &bath)?;
    let mut fig2 = Table::new(&["b_z", "b_x", "curvature"], "horizontal axis B_z, vertical axis B_x, color: curvature of the pumped-heat vector");
    let mut fig5 = Table::new(&["b_z", "b_x", "lambda_k_max_eigenvalue"], "horizontal axis B_z, vertical axis B_x, color: largest eigenvalue of kappa times the metric");
    for r in &rows {
        fig2.push(vec![num(r.p.b_z), num(r.p.b_x), num(r.curvature)]);
        fig5.push(vec![num(r.p.b_z), num(r.p.b_x), num(r.lk_max)]);
    }
    fig2.write(&ctx.path("fig2.csv")?, &h)?;
    fig5.write(&ctx.path("fig5.csv")?, &h)?;

    let alt = BathParams::new(f.gamma_bar_alt, bath.eps_cutoff)?;
    let mut fig3 = Table::new(
        &["b_r", "lambda_r", "lambda_phi", "lambda_r_alt", "lambda_phi_alt"],
        "horizontal axis B_r, vertical axis metric eigenvalues for the configured coupling and for gamma_bar_alt",
    );
    let mut fig10 = Table::new(
        &["series", "x", "y"],
        "series max_eigenvalue: x = B_r, y = max(lambda_r, lambda_phi); series b_r_low and b_r_high: x = gamma_bar, y = crossover radius",
    );
    for &r in &logspace(f.radial_range, f.radial_points) {
        let (lr, lp) = (qubit_model::lambda_radial(r, &bath)?, qubit_model::lambda_tangential(r, &bath)?);
        let (ar, ap) = (qubit_model::lambda_radial(r, &alt)?, qubit_model::lambda_tangential(r, &alt)?);
        fig3.push(vec![num(r), num(lr), num(lp), num(ar), num(ap)]);
        fig10.push(vec!["max_eigenvalue".into(), num(r), num(lr.max(lp))]);
    }
    fig3.write(&ctx.path("fig3.csv")?, &h)?;
    let mut low = Vec::new();
    let mut high = Vec::new();
    for &gb in &linspace(f.coupling_range, f.coupling_points) {
        if let Some((lo, hi)) = qubit_model::crossover_radii(&BathParams::new(gb, bath.eps_cutoff)?) {
            low.push(vec!["b_r_low".into(), num(gb), num(lo)]);
            high.push(vec!["b_r_high".into(), num(gb), num(hi)]);
        }
    }
    fig10.rows.extend(low);
    fig10.rows.extend(high);
    fig10.write(&ctx.path("fig10.csv")?, &h)?;

    let mut failed = 0;
    for (name, kind) in [("fig4", ObjectiveKind::Power), ("fig6", ObjectiveKind::Efficiency)] {
        let cells = run_scan(ctx, kind)?;
        scan_table(&cells, "horizontal axis: center B_z, vertical axis: center B_x, color: best objective of an ellipse centered there")
            .write(&ctx.path(&format!("{name}.csv"))?, &h)?;
        failed += write_failures(ctx, &cells, name)?;
    }

    let (_, cmp) = run_profiles(ctx)?;
    profiles_table(&cmp).write(&ctx.path("fig7.csv")?, &h)?;

    let (radii, apertures) = sector_grid(ctx)?;
    let rows = optimizer::sector_study(&radii, &apertures, &ctx.geometry)?;
    let mut fig8 = Table::new(&["radius", "aperture", "power_objective"], "axes R and Omega, surface A^2/L^2 of the circular sector");
    for r in &rows {
        fig8.push(vec![num(r.radius), num(r.aperture), num(r.power_objective)]);
    }
    fig8.write(&ctx.path("fig8.csv")?, &h)?;
    sector_efficiency(ctx)?.write(&ctx.path("fig9.csv")?, &h)?;

    Ok(if failed == 0 { Status::Done } else { Status::Partial(failed) })
}
