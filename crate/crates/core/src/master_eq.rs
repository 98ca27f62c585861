//! Numerical oracle for the response coefficients: the adiabatic master
//! equation of the qubit in its instantaneous eigenbasis, with the full
//! four-component state (populations and coherences).
//!
//! State ordering is p = (ρ₁₁, ρ₁₂, ρ₂₁, ρ₂₂) with E₁ = −B_r, E₂ = +B_r.
//! Rates carry ħ = 1.

use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::qubit_model::{BathParams, FieldPoint, OnsagerCoeffs, EPS_MIN};

type C = Complex<f64>;

/// Step for the field derivative of the frozen state.
pub const FIELD_STEP: f64 = 1e-2;
/// Relative step for the temperature derivative of the frozen state.
pub const BIAS_STEP: f64 = 1e-5;
/// Coupling scale used to extrapolate bias responses to weak coupling.
pub const WEAK_COUPLING_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperatures {
    pub cold: f64,
    pub hot: f64,
}

impl Temperatures {
    pub fn equal() -> Self {
        Self { cold: 1.0, hot: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct RateMatrix {
    /// Full generator including the coherent term.
    pub generator: Matrix4<C>,
    /// Cold-bath dissipator alone.
    pub cold: Matrix4<C>,
    /// Hot-bath dissipator alone.
    pub hot: Matrix4<C>,
    pub frozen_energies: (f64, f64),
    /// Rows are the eigenvectors of B⃗·σ⃗ (ground state first).
    pub basis: Matrix2<C>,
}

#[derive(Debug, Clone)]
pub struct FrozenState {
    pub p: Vector4<C>,
    /// |M·p| of the returned solution.
    pub gibbs_check: f64,
}

impl FrozenState {
    pub fn density(&self) -> Matrix2<C> {
        to_matrix(&self.p)
    }
}

#[derive(Debug, Clone)]
pub struct AdiabaticResponse {
    /// M̃⁻¹ ∂p^f/∂B_n for n = z, x.
    pub dp_db: [Vector4<C>; 2],
}

/// Off-diagonal Onsager blocks coupling driving and thermal bias.
#[derive(Debug, Clone, Copy)]
pub struct CrossResponse {
    /// Λ_{ℓ,3}: conservative work response to the bias, −Tr[∂_ℓH δ_Tρ^f].
    pub work_from_bias: Vector2<f64>,
    /// Λ_{3,ℓ}: heat pumped into the biased (hot) reservoir per unit velocity.
    pub heat_from_drive: Vector2<f64>,
}

fn idx(i: usize, j: usize) -> usize {
    2 * i + j
}

fn to_matrix(p: &Vector4<C>) -> Matrix2<C> {
    Matrix2::new(p[0], p[1], p[2], p[3])
}

fn to_vector(m: &Matrix2<C>) -> Vector4<C> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn pauli_z() -> Matrix2<C> {
    Matrix2::new(C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-1.0, 0.0))
}

fn pauli_x() -> Matrix2<C> {
    Matrix2::new(C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0))
}

fn eigenbasis(p: &FieldPoint) -> Matrix2<C> {
    let th = 0.5 * p.angle();
    let (c, s) = (th.cos(), th.sin());
    Matrix2::new(C::new(-s, 0.0), C::new(c, 0.0), C::new(c, 0.0), C::new(s, 0.0))
}

fn bose(eps: f64, temp: f64) -> f64 {
    1.0 / (eps / temp).exp_m1()
}

/// Dissipator of one bath coupled through `op`, in the eigenbasis `u`.
fn dissipator(energies: [f64; 2], u: &Matrix2<C>, op: &Matrix2<C>, temp: f64, bath: &BathParams) -> Matrix4<C> {
    let xi = u * op * u.adjoint();
    // f(j, u) = n(ε_ju)Γ(ε_ju) + (1 + n(ε_uj))Γ(ε_uj), ε_ju = E_j − E_u
    let absorb = |e: f64| if e > 0.0 { bose(e, temp) * bath.spectral_density(e) } else { 0.0 };
    let emit = |e: f64| if e > 0.0 { (1.0 + bose(e, temp)) * bath.spectral_density(e) } else { 0.0 };
    let f = |j: usize, k: usize| {
        let e = energies[j] - energies[k];
        absorb(e) + emit(-e)
    };
    // rate[j][u][m][l] = ξ_ml ξ_ju f(j, u)
    let rate = |j: usize, uu: usize, m: usize, l: usize| xi[(m, l)] * xi[(j, uu)] * f(j, uu);
    let mut d = Matrix4::<C>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let r = idx(i, j);
            for m in 0..2 {
                for n in 0..2 {
                    d[(r, idx(m, n))] += rate(j, n, m, i);
                    d[(r, idx(n, m))] += rate(i, n, j, m);
                    d[(r, idx(i, n))] -= rate(m, n, j, m);
                    d[(r, idx(n, j))] -= rate(m, n, m, i);
                }
            }
        }
    }
    d
}

pub fn build_rate_matrix(p: &FieldPoint, temps: Temperatures, bath: &BathParams) -> Result<RateMatrix> {
    let r = p.radius();
    if !(r > EPS_MIN) {
        return Err(Error::OriginGuard { radius: r });
    }
    if !(temps.cold > 0.0 && temps.hot > 0.0) {
        return Err(Error::InvalidParameter("temperatures must be positive".into()));
    }
    let energies = [-r, r];
    let u = eigenbasis(p);
    let cold = dissipator(energies, &u, &pauli_z(), temps.cold, bath);
    let hot = dissipator(energies, &u, &pauli_x(), temps.hot, bath);
    let mut generator = cold + hot;
    for i in 0..2 {
        for j in 0..2 {
            generator[(idx(i, j), idx(i, j))] += C::new(0.0, energies[i] - energies[j]);
        }
    }
    Ok(RateMatrix { generator, cold, hot, frozen_energies: (-r, r), basis: u })
}

fn with_trace_row(m: &Matrix4<C>) -> Matrix4<C> {
    let mut a = *m;
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    a[(0, 0)] = one;
    a[(0, 1)] = zero;
    a[(0, 2)] = zero;
    a[(0, 3)] = one;
    a
}

fn solve(a: Matrix4<C>, b: Vector4<C>) -> Result<Vector4<C>> {
    a.lu().solve(&b).ok_or(Error::SingularSystem)
}

pub fn frozen_state(m: &RateMatrix) -> Result<FrozenState> {
    let mut sv: Vec<f64> = m.generator.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    if sv[1] <= 1e-12 * sv[3] {
        return Err(Error::DegenerateNullSpace);
    }
    let mut b = Vector4::<C>::zeros();
    b[0] = C::new(1.0, 0.0);
    let p = solve(with_trace_row(&m.generator), b)?;
    let gibbs_check = (m.generator * p).norm();
    Ok(FrozenState { p, gibbs_check })
}

/// Frozen density matrix in the fixed (σ_z) laboratory basis.
pub fn lab_frozen_density(p: &FieldPoint, temps: Temperatures, bath: &BathParams) -> Result<Matrix2<C>> {
    let m = build_rate_matrix(p, temps, bath)?;
    let f = frozen_state(&m)?;
    Ok(m.basis.adjoint() * f.density() * m.basis)
}

/// Heat current into a bath with dissipator `d`, −Tr[H D ρ].
fn heat_current(d: &Matrix4<C>, energies: (f64, f64), rho: &Vector4<C>) -> f64 {
    let dr = d * rho;
    -(energies.0 * dr[0].re + energies.1 * dr[3].re)
}

pub fn adiabatic_response(p: &FieldPoint, bath: &BathParams) -> Result<AdiabaticResponse> {
    let m = build_rate_matrix(p, Temperatures::equal(), bath)?;
    let reduced = with_trace_row(&m.generator);
    let mut dp_db = [Vector4::zeros(); 2];
    // sixth-order central stencil; the step follows the angular scale near
    // the origin
    let h = FIELD_STEP * p.radius().min(1.0);
    for (n, dir) in [(1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
        let at = |k: f64| lab_frozen_density(&FieldPoint::new(p.b_z + k * h * dir.0, p.b_x + k * h * dir.1), Temperatures::equal(), bath);
        let d_lab = ((at(3.0)? - at(-3.0)?) - (at(2.0)? - at(-2.0)?) * C::new(9.0, 0.0) + (at(1.0)? - at(-1.0)?) * C::new(45.0, 0.0))
            / C::new(60.0 * h, 0.0);
        let d_eig = m.basis * d_lab * m.basis.adjoint();
        let mut rhs = to_vector(&d_eig);
        rhs[0] = C::new(0.0, 0.0);
        dp_db[n] = solve(reduced, rhs)?;
    }
    Ok(AdiabaticResponse { dp_db })
}

/// δ_T p^f: derivative of the frozen state with respect to the hot-bath
/// temperature at equal temperatures.
fn bias_derivative(p: &FieldPoint, bath: &BathParams) -> Result<(RateMatrix, Vector4<C>)> {
    let h = BIAS_STEP;
    let up = frozen_state(&build_rate_matrix(p, Temperatures { cold: 1.0, hot: 1.0 + h }, bath)?)?;
    let down = frozen_state(&build_rate_matrix(p, Temperatures { cold: 1.0, hot: 1.0 - h }, bath)?)?;
    let m = build_rate_matrix(p, Temperatures::equal(), bath)?;
    Ok((m, (up.p - down.p) / C::new(2.0 * h, 0.0)))
}

fn field_derivatives(u: &Matrix2<C>) -> [Matrix2<C>; 2] {
    [u * pauli_z() * u.adjoint(), u * pauli_x() * u.adjoint()]
}

pub fn oracle_coefficients(p: &FieldPoint, bath: &BathParams) -> Result<OnsagerCoeffs> {
    let resp = adiabatic_response(p, bath)?;
    let m = build_rate_matrix(p, Temperatures::equal(), bath)?;
    let dh = field_derivatives(&m.basis);
    let mut lambda_matrix = nalgebra::Matrix2::<f64>::zeros();
    let mut lambda_vector = Vector2::<f64>::zeros();
    for l in 0..2 {
        for n in 0..2 {
            lambda_matrix[(l, n)] = (dh[l] * to_matrix(&resp.dp_db[n])).trace().re;
        }
        lambda_vector[l] = heat_current(&m.cold, m.frozen_energies, &resp.dp_db[l]);
    }
    let (m, dt) = bias_derivative(p, bath)?;
    let kappa = heat_current(&m.cold, m.frozen_energies, &dt);
    Ok(OnsagerCoeffs { lambda_matrix, lambda_vector, kappa })
}

fn work_from_bias(p: &FieldPoint, bath: &BathParams) -> Result<Vector2<f64>> {
    let (m, dt) = bias_derivative(p, bath)?;
    let dh = field_derivatives(&m.basis);
    let rho = to_matrix(&dt);
    Ok(Vector2::new(-(dh[0] * rho).trace().re, -(dh[1] * rho).trace().re))
}

/// Cross coefficients at the bath's own coupling strength.
pub fn cross_response(p: &FieldPoint, bath: &BathParams) -> Result<CrossResponse> {
    let resp = adiabatic_response(p, bath)?;
    let m = build_rate_matrix(p, Temperatures::equal(), bath)?;
    let heat = Vector2::new(
        heat_current(&m.hot, m.frozen_energies, &resp.dp_db[0]),
        heat_current(&m.hot, m.frozen_energies, &resp.dp_db[1]),
    );
    Ok(CrossResponse { work_from_bias: work_from_bias(p, bath)?, heat_from_drive: heat })
}

/// Cross coefficients in the weak-coupling limit. The drive response is
/// independent of Γ̄; the bias response picks up O(Γ̄²) corrections from
/// steady-state coherences, removed by Richardson extrapolation in the
/// coupling scale.
pub fn cross_response_weak(p: &FieldPoint, bath: &BathParams) -> Result<CrossResponse> {
    let s = WEAK_COUPLING_SCALE;
    let scaled = |k: f64| BathParams { gamma_bar: bath.gamma_bar * k, ..*bath };
    let w1 = work_from_bias(p, &scaled(s))?;
    let w2 = work_from_bias(p, &scaled(2.0 * s))?;
    let full = cross_response(p, bath)?;
    Ok(CrossResponse { work_from_bias: (4.0 * w1 - w2) / 3.0, heat_from_drive: full.heat_from_drive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit_model::{self, FieldPoint};

    fn bath() -> BathParams {
        BathParams::default()
    }

    #[test]
    fn trace_is_conserved() {
        let m = build_rate_matrix(&FieldPoint::new(0.8, -1.3), Temperatures { cold: 1.0, hot: 1.7 }, &bath()).unwrap();
        for c in 0..4 {
            let s = m.generator[(0, c)] + m.generator[(3, c)];
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn cold_bath_is_diagonal_on_z_axis() {
        let m = build_rate_matrix(&FieldPoint::new(1.2, 0.0), Temperatures::equal(), &bath()).unwrap();
        assert!(m.cold[(0, 3)].norm() < 1e-15 && m.cold[(3, 0)].norm() < 1e-15);
    }

    #[test]
    fn equal_temperatures_give_gibbs() {
        for &(z, x) in &[(1.0, 1.0), (-0.4, 2.2), (3.0, -0.5), (0.2, 0.05)] {
            let p = FieldPoint::new(z, x);
            let f = frozen_state(&build_rate_matrix(&p, Temperatures::equal(), &bath()).unwrap()).unwrap();
            let r = p.radius();
            let z2 = 2.0 * r.cosh();
            assert!((f.p[0].re - r.exp() / z2).abs() < 1e-10);
            assert!((f.p[3].re - (-r).exp() / z2).abs() < 1e-10);
            assert!((f.p[0] + f.p[3] - C::new(1.0, 0.0)).norm() < 1e-14);
            assert!(f.p[1].norm() < 1e-10);
        }
    }

    #[test]
    fn adiabatic_kernels_are_traceless_and_linear() {
        let r = adiabatic_response(&FieldPoint::new(0.7, 0.9), &bath()).unwrap();
        for k in &r.dp_db {
            assert!((k[0] + k[3]).norm() < 1e-12);
        }
        let v = [2.0, 0.0];
        let scaled = r.dp_db[0] * C::new(v[0], 0.0);
        assert!((scaled - r.dp_db[0] * C::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn oracle_reproduces_pumping_and_conductance() {
        for &(z, x) in &[(1.0, 1.0), (0.3, 2.0), (2.5, 0.4), (-1.0, 0.6)] {
            let p = FieldPoint::new(z, x);
            let o = oracle_coefficients(&p, &bath()).unwrap();
            let c = qubit_model::coefficients(&p, &bath()).unwrap();
            assert!((o.lambda_vector - c.lambda_vector).norm() <= 1e-6 * c.lambda_vector.norm());
            assert!((o.kappa - c.kappa).abs() <= 1e-6 * c.kappa);
        }
    }

    #[test]
    fn oracle_tensor_is_symmetric_and_positive() {
        let o = oracle_coefficients(&FieldPoint::new(0.9, 1.7), &bath()).unwrap();
        let m = o.lambda_matrix;
        assert!((m[(0, 1)] - m[(1, 0)]).abs() < 1e-8 * m.norm());
        let eig = m.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > -1e-10));
    }

    #[test]
    fn oracle_tensor_eigenbasis_is_polar() {
        // the oracle's radial eigenvalue is half the closed form and its
        // tangential eigenvalue twice the closed form
        let b = bath();
        let p = FieldPoint::from_polar(1.4, 0.6);
        let o = oracle_coefficients(&p, &b).unwrap();
        let r = p.radial_unit();
        let t = p.tangential_unit();
        let lr = r.dot(&(o.lambda_matrix * r));
        let lp = t.dot(&(o.lambda_matrix * t));
        assert!(r.dot(&(o.lambda_matrix * t)).abs() < 1e-8 * lr.max(lp));
        assert!((lr / qubit_model::lambda_radial(1.4, &b).unwrap() - 0.5).abs() < 1e-6);
        assert!((lp / qubit_model::lambda_tangential(1.4, &b).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn conductance_vanishes_on_axis() {
        let o = oracle_coefficients(&FieldPoint::new(1.3, 0.0), &bath()).unwrap();
        assert!(o.kappa.abs() < 1e-12);
    }

    #[test]
    fn weak_coupling_cross_terms_are_antisymmetric() {
        for &(z, x) in &[(1.0, 0.7), (-0.8, 0.4), (0.3, 2.5), (4.0, 3.0)] {
            let c = cross_response_weak(&FieldPoint::new(z, x), &bath()).unwrap();
            assert!((c.work_from_bias + c.heat_from_drive).norm() < 1e-8, "{z} {x}");
        }
    }

    #[test]
    fn equilibrium_conservative_power_averages_out() {
        // ∮ Tr[∂H/∂B ρ^f]·dB over an ellipse
        let b = bath();
        let n = 256;
        let mut total = 0.0;
        for k in 0..n {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (z, x) = (1.0 + 0.8 * t.cos(), 0.5 + 1.1 * t.sin());
            let (vz, vx) = (-0.8 * t.sin(), 1.1 * t.cos());
            let rho = lab_frozen_density(&FieldPoint::new(z, x), Temperatures::equal(), &b).unwrap();
            let fz = (pauli_z() * rho).trace().re;
            let fx = (pauli_x() * rho).trace().re;
            total += (fz * vz + fx * vx) * 2.0 * std::f64::consts::PI / n as f64;
        }
        assert!(total.abs() < 1e-8, "{total}");
    }
}
