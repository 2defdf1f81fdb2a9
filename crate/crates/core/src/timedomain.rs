//! Time-domain simulation under harmonic input `psi_-(t) = phi e^{izt}`.
//!
//! The state obeys `i dchi/dt + A chi = K J psi_-`, integrated with classical
//! fixed-step RK4, and the output is `psi_+ = psi_- - 2i K* chi`. Along any
//! solution the energy balance
//!
//! ```text
//! d/dt |chi|^2 = 1/2 ((J psi_-, psi_-) - (J psi_+, psi_+))
//! ```
//!
//! holds; [`conservation_residual`] measures how far a sampled trajectory is
//! from it.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c, solve, ComplexMatrix, I};
use crate::systems::{FSystemModel, LSystemModel};

/// Upper bound on `dt * |A|_inf`.
pub const MAX_STEP_NORM: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `x = (A - zI)^-1 K J phi`, the stationary regime.
    Stationary,
    Zero,
    Given(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub z: Complex64,
    pub phi_minus: ComplexMatrix,
    pub t_end: f64,
    pub dt: f64,
    pub initial: InitialState,
}

impl SimulationConfig {
    pub fn new(z: Complex64, phi_minus: ComplexMatrix, t_end: f64, dt: f64, initial: InitialState) -> Self {
        Self { z, phi_minus, t_end, dt, initial }
    }

    fn validate(&self, m: usize) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.dt < self.t_end) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt < t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(Error::NonFinite("drive frequency"));
        }
        if self.phi_minus.shape() != (m, 1) {
            return Err(Error::DimensionMismatch(format!(
                "phi_minus must be {m}x1, got {}x{}",
                self.phi_minus.rows(),
                self.phi_minus.cols()
            )));
        }
        Ok((self.t_end / self.dt).round() as usize)
    }

    pub fn input(&self, t: f64) -> ComplexMatrix {
        self.phi_minus.scale((I * self.z * t).exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub inputs: Vec<ComplexMatrix>,
    pub outputs: Vec<ComplexMatrix>,
    pub norms: Vec<f64>,
}

fn inner_j(j: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    (&(&x.adjoint() * j) * x).get(0, 0).re
}

fn sup_norm(x: &ComplexMatrix) -> f64 {
    x.max_abs()
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t, x{k}_re, x{k}_im, ..., y{k}_re, y{k}_im, ..., norm2`,
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, ComplexMatrix::rows);
        let m = self.outputs.first().map_or(0, ComplexMatrix::rows);
        let mut header = vec!["t".to_string()];
        for k in 1..=n {
            header.push(format!("x{k}_re"));
            header.push(format!("x{k}_im"));
        }
        for k in 1..=m {
            header.push(format!("y{k}_re"));
            header.push(format!("y{k}_im"));
        }
        header.push("norm2".into());
        writeln!(w, "{}", header.join(","))?;
        for idx in 0..self.len() {
            let mut row = vec![format!("{:.16e}", self.times[idx])];
            for vec in [&self.states[idx], &self.outputs[idx]] {
                for k in 0..vec.rows() {
                    let z = vec.get(k, 0);
                    row.push(format!("{:.16e}", z.re));
                    row.push(format!("{:.16e}", z.im));
                }
            }
            row.push(format!("{:.16e}", self.norms[idx]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn integrate(
    a: &ComplexMatrix,
    k: &ComplexMatrix,
    j: &ComplexMatrix,
    cfg: &SimulationConfig,
    steps: usize,
    x0: ComplexMatrix,
) -> Trajectory {
    let kj = k * j;
    let k_adj = k.adjoint();
    let ia = a.scale(I);
    // dchi/dt = i A chi - i K J psi_-(t)
    let rhs = |t: f64, x: &ComplexMatrix| &(&ia * x) - &(&kj * &cfg.input(t)).scale(I);
    let dt = cfg.dt;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        inputs: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
    };
    let mut x = x0;
    for step in 0..=steps {
        let t = step as f64 * dt;
        let input = cfg.input(t);
        let output = &input - &(&k_adj * &x).scale(c(0.0, 2.0));
        traj.times.push(t);
        traj.norms.push((&x.adjoint() * &x).get(0, 0).re);
        traj.states.push(x.clone());
        traj.inputs.push(input);
        traj.outputs.push(output);
        if step == steps {
            break;
        }
        let k1 = rhs(t, &x);
        let k2 = rhs(t + 0.5 * dt, &(&x + &k1.scale(c(0.5 * dt, 0.0))));
        let k3 = rhs(t + 0.5 * dt, &(&x + &k2.scale(c(0.5 * dt, 0.0))));
        let k4 = rhs(t + dt, &(&x + &k3.scale(c(dt, 0.0))));
        let incr = &(&k1 + &k2.scale(c(2.0, 0.0))) + &(&k3.scale(c(2.0, 0.0)) + &k4);
        x = &x + &incr.scale(c(dt / 6.0, 0.0));
    }
    traj
}

fn initial_state(a: &ComplexMatrix, k: &ComplexMatrix, j: &ComplexMatrix, cfg: &SimulationConfig) -> Result<ComplexMatrix> {
    let n = a.rows();
    match &cfg.initial {
        InitialState::Zero => Ok(ComplexMatrix::zeros(n, 1)),
        InitialState::Given(x0) => {
            if x0.shape() != (n, 1) {
                return Err(Error::DimensionMismatch(format!("initial state must be {n}x1")));
            }
            Ok(x0.clone())
        }
        InitialState::Stationary => {
            let pencil = a - &ComplexMatrix::identity(n).scale(cfg.z);
            solve(&pencil, &(&(k * j) * &cfg.phi_minus)).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SpectrumHit { z: cfg.z },
                other => other,
            })
        }
    }
}

pub fn simulate(s: &LSystemModel, cfg: &SimulationConfig) -> Result<Trajectory> {
    let steps = cfg.validate(s.io_dim())?;
    let product = cfg.dt * s.a().norm_inf();
    if product > MAX_STEP_NORM {
        return Err(Error::StepTooLarge { product });
    }
    let x0 = initial_state(s.a(), s.k(), s.j(), cfg)?;
    Ok(integrate(s.a(), s.k(), s.j(), cfg, steps, x0))
}

/// Time simulation of `i F dchi/dt + M chi = K J psi_-` for the two cases
/// that are not differential-algebraic: `F = I` (same as an L-system with
/// `A = M`) and `F = 0` (pointwise `chi = M^-1 K J psi_-`).
pub fn simulate_fsystem(s: &FSystemModel, cfg: &SimulationConfig) -> Result<Trajectory> {
    let steps = cfg.validate(s.io_dim())?;
    let n = s.state_dim();
    if s.f().distance(&ComplexMatrix::identity(n)) <= 1e-12 {
        let product = cfg.dt * s.m().norm_inf();
        if product > MAX_STEP_NORM {
            return Err(Error::StepTooLarge { product });
        }
        let x0 = initial_state(s.m(), s.k(), s.j(), cfg)?;
        return Ok(integrate(s.m(), s.k(), s.j(), cfg, steps, x0));
    }
    if s.f().max_abs() > 1e-12 {
        return Err(Error::UnsupportedProjection);
    }
    let kj = s.k() * s.j();
    let gain = solve(s.m(), &kj).map_err(|_| Error::SpectrumHit { z: cfg.z })?;
    let k_adj = s.k().adjoint();
    let mut traj = Trajectory { times: vec![], states: vec![], inputs: vec![], outputs: vec![], norms: vec![] };
    for step in 0..=steps {
        let t = step as f64 * cfg.dt;
        let input = cfg.input(t);
        let x = &gain * &input;
        traj.outputs.push(&input - &(&k_adj * &x).scale(c(0.0, 2.0)));
        traj.norms.push((&x.adjoint() * &x).get(0, 0).re);
        traj.times.push(t);
        traj.states.push(x);
        traj.inputs.push(input);
    }
    Ok(traj)
}

/// Max over interior samples of
/// `|d/dt |chi|^2 - 1/2 ((J psi_-, psi_-) - (J psi_+, psi_+))|`,
/// the derivative taken by centered differences.
pub fn conservation_residual(traj: &Trajectory, j: &ComplexMatrix, cfg: &SimulationConfig) -> f64 {
    let mut worst: f64 = 0.0;
    for idx in 1..traj.len().saturating_sub(1) {
        let lhs = (traj.norms[idx + 1] - traj.norms[idx - 1]) / (2.0 * cfg.dt);
        let rhs = 0.5 * (inner_j(j, &traj.inputs[idx]) - inner_j(j, &traj.outputs[idx]));
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// `sup_t |psi_+(t) - W(z) phi e^{izt}|`.
pub fn stationary_output_error(traj: &Trajectory, s: &LSystemModel, cfg: &SimulationConfig) -> Result<f64> {
    let w_phi = &s.transfer(cfg.z)? * &cfg.phi_minus;
    Ok(traj
        .times
        .iter()
        .zip(&traj.outputs)
        .map(|(&t, y)| sup_norm(&(y - &w_phi.scale((I * cfg.z * t).exp()))))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_fsystem, make_lsystem, make_lsystem_random, DirectionChoice, DEFAULT_TOLERANCE};

    fn one() -> ComplexMatrix {
        ComplexMatrix::scalar(c(1.0, 0.0))
    }

    fn scalar_l() -> LSystemModel {
        make_lsystem(ComplexMatrix::scalar(I), one(), one(), DEFAULT_TOLERANCE).unwrap()
    }

    fn cfg(z: Complex64, dt: f64, t_end: f64, initial: InitialState) -> SimulationConfig {
        SimulationConfig::new(z, one(), t_end, dt, initial)
    }

    #[test]
    fn stationary_scalar_matches_closed_form() {
        let s = scalar_l();
        let cfg = cfg(c(1.0, 0.0), 1e-3, 10.0, InitialState::Stationary);
        let traj = simulate(&s, &cfg).unwrap();
        assert_eq!(traj.len(), 10_001);
        // chi(t) = -(1+i)/2 e^{it}, psi_+(t) = i e^{it}.
        let mut worst: f64 = 0.0;
        for (t, (x, y)) in traj.times.iter().zip(traj.states.iter().zip(&traj.outputs)) {
            let e = (I * *t).exp();
            worst = worst.max((x.get(0, 0) + c(0.5, 0.5) * e).norm());
            worst = worst.max((y.get(0, 0) - I * e).norm());
        }
        assert!(worst < 1e-6, "{worst}");
        let n0 = traj.norms[0];
        assert!(traj.norms.iter().all(|n| (n - n0).abs() < 1e-8));
        assert!(stationary_output_error(&traj, &s, &cfg).unwrap() < 1e-6);
        assert!(conservation_residual(&traj, s.j(), &cfg) < 1e-6);
    }

    #[test]
    fn energy_law_off_the_real_axis() {
        // A = 1 + i: z = i is a regular point, |chi|^2 = |x|^2 e^{-2t}.
        let s = make_lsystem(ComplexMatrix::scalar(c(1.0, 1.0)), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let cfg = cfg(I, 1e-3, 3.0, InitialState::Stationary);
        let traj = simulate(&s, &cfg).unwrap();
        let x = 1.0 / (c(1.0, 1.0) - I);
        assert!((traj.norms[0] - x.norm_sqr()).abs() < 1e-15);
        let slope = (traj.norms[2] - traj.norms[0]) / (2.0 * cfg.dt);
        assert!(slope.abs() > 0.1);
        assert!(conservation_residual(&traj, s.j(), &cfg) < 1e-5);
    }

    #[test]
    fn zero_initial_random_system() {
        let s = make_lsystem_random(3, 2, DirectionChoice::RandomSignature, 4).unwrap();
        let dt = 1e-3_f64.min(0.1 / s.a().norm_inf());
        let phi = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, -0.5)]]).unwrap();
        let cfg = SimulationConfig::new(c(0.7, 0.2), phi, 2.0, dt, InitialState::Zero);
        let traj = simulate(&s, &cfg).unwrap();
        assert!(traj.outputs.iter().all(ComplexMatrix::is_finite));
        assert!(conservation_residual(&traj, s.j(), &cfg) < 1e-4);
    }

    #[test]
    fn guards() {
        let s = scalar_l();
        let big = cfg(c(1.0, 0.0), 0.5, 10.0, InitialState::Zero);
        assert!(matches!(simulate(&s, &big), Err(Error::StepTooLarge { .. })));
        let spectral = cfg(I, 1e-3, 1.0, InitialState::Stationary);
        assert_eq!(simulate(&s, &spectral).unwrap_err(), Error::SpectrumHit { z: I });
        let inverted = cfg(c(1.0, 0.0), 2.0, 1.0, InitialState::Zero);
        assert!(matches!(simulate(&s, &inverted), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn fsystem_cases() {
        let s = make_fsystem(ComplexMatrix::scalar(I), one(), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let cfg1 = cfg(c(1.0, 0.0), 1e-3, 1.0, InitialState::Stationary);
        let traj = simulate_fsystem(&s, &cfg1).unwrap();
        let last = traj.outputs.last().unwrap().get(0, 0);
        assert!((last - I * (I * 1.0).exp()).norm() < 1e-6);

        let ctrl = make_fsystem(ComplexMatrix::scalar(c(1.0, 1.0)), ComplexMatrix::zeros(1, 1), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let traj = simulate_fsystem(&ctrl, &cfg1).unwrap();
        for (t, y) in traj.times.iter().zip(&traj.outputs) {
            assert!((y.get(0, 0) - (-I) * (I * *t).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn csv_layout() {
        let s = scalar_l();
        let traj = simulate(&s, &cfg(c(1.0, 0.0), 0.05, 0.1, InitialState::Zero)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x1_re,x1_im,y1_re,y1_im,norm2");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], "0.0000000000000000e0");
        assert_eq!(text.lines().count(), 4);
    }
}
