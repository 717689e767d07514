//! Time evolution for the two model systems: a pair of dispersively coupled
//! qubits (closed, exactly solvable) and a single qubit damped by a thermal
//! bath (Lindblad form, solved both analytically and with RK4).
//!
//! Units: hbar = 1. Basis index 0 is the excited level |e>, index 1 is |g>.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, tensor_product, ComplexMatrix, C64};
use crate::states::{validate_density_with, DensityMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Free sigma_z rotation factored out of the state.
    #[default]
    Interaction,
    Lab,
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interaction" => Ok(Frame::Interaction),
            "lab" => Ok(Frame::Lab),
            _ => Err(Error::Config(format!("unknown frame `{s}` (expected interaction|lab)"))),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Interaction => "interaction",
            Frame::Lab => "lab",
        })
    }
}

/// Uniform grid `t_k = k * t_max / steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("grid needs at least one step".into()));
        }
        Ok(TimeGrid { t_max, steps })
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.t_max / self.steps as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.time(k))
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `(omega0 / 2) sigma_z`
pub fn qubit_hamiltonian(omega0: f64) -> ComplexMatrix {
    pauli::sigma_z().scale_real(0.5 * omega0)
}

/// Two qubits with `H = (w0/2) Z_A + (w0/2) Z_B + g Z_A Z_B`; qubit A starts in
/// `[[p, c], [conj c, 1 - p]]`, qubit B maximally mixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveParams {
    pub omega0: f64,
    pub g: f64,
    pub p: f64,
    pub c: C64,
    pub frame: Frame,
}

impl Default for DispersiveParams {
    fn default() -> Self {
        DispersiveParams { omega0: 1.0, g: 1.0, p: 0.5, c: C64::new(0.5, 0.0), frame: Frame::Interaction }
    }
}

impl DispersiveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.g.is_finite()) {
            return Err(Error::InvalidParameter("omega0 and g must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} must lie in [0, 1]", self.p)));
        }
        let bound = (self.p * (1.0 - self.p)).sqrt();
        match DensityMatrix::qubit(self.p, self.c) {
            Ok(_) => Ok(()),
            Err(Error::NotPositive { min_eigenvalue }) => Err(Error::InvalidParameter(format!(
                "positivity violated: |c| = {:.6} > sqrt(p(1-p)) = {bound:.6} (min eigenvalue {min_eigenvalue:.3e})",
                self.c.norm()
            ))),
            Err(e) => Err(e),
        }
    }

    pub fn initial_state_a(&self) -> Result<DensityMatrix> {
        DensityMatrix::qubit(self.p, self.c)
    }

    /// Product state `rho_A(0) ⊗ I/2`.
    pub fn initial_joint_state(&self) -> Result<DensityMatrix> {
        let a = self.initial_state_a()?;
        let b = ComplexMatrix::identity(2).scale_real(0.5);
        crate::states::validate_density(&tensor_product(a.matrix(), &b)?)
    }
}

/// Closed-form reduced state of qubit A.
pub fn dispersive_reduced_a(params: &DispersiveParams, t: f64) -> Result<DensityMatrix> {
    let mut coherence = params.c * (2.0 * params.g * t).cos();
    if params.frame == Frame::Lab {
        coherence *= C64::from_polar(1.0, -params.omega0 * t);
    }
    DensityMatrix::qubit(params.p, coherence)
}

fn spin(index: usize) -> f64 {
    if index == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `U rho U^dagger` for the diagonal dispersive Hamiltonian, applied entrywise.
pub fn dispersive_joint_evolve(params: &DispersiveParams, rho_ab0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho_ab0.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho_ab0.dim() });
    }
    let energy = |k: usize| {
        let (sa, sb) = (spin(k / 2), spin(k % 2));
        let free = match params.frame {
            Frame::Interaction => 0.0,
            Frame::Lab => 0.5 * params.omega0 * (sa + sb),
        };
        free + params.g * sa * sb
    };
    let rho0 = rho_ab0.matrix();
    let mut out = ComplexMatrix::zeros(4);
    for k in 0..4 {
        for l in 0..4 {
            out[(k, l)] = rho0[(k, l)] * C64::from_polar(1.0, -(energy(k) - energy(l)) * t);
        }
    }
    crate::states::validate_density(&out)
}

/// Thermal damping of a qubit at mean bath occupation `nbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladParams {
    pub gamma: f64,
    pub nbar: f64,
    pub omega0: f64,
}

impl Default for LindbladParams {
    fn default() -> Self {
        LindbladParams { gamma: 1.0, nbar: 0.0, omega0: 1.0 }
    }
}

impl LindbladParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be positive", self.gamma)));
        }
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!("nbar = {} must be non-negative", self.nbar)));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidParameter("omega0 must be finite".into()));
        }
        Ok(())
    }

    /// Excited-state population of the stationary state, `nbar / (2 nbar + 1)`.
    pub fn stationary_excitation(&self) -> f64 {
        self.nbar / (2.0 * self.nbar + 1.0)
    }
}

/// The master-equation generator applied to an arbitrary 2x2 matrix.
pub fn lindblad_generator(params: &LindbladParams, rho: &ComplexMatrix) -> ComplexMatrix {
    let lower = pauli::sigma_minus();
    let raise = pauli::sigma_plus();
    let absorb = &lower * &raise;
    let emit = &raise * &lower;

    let pump = &(&(&absorb * rho) - &(&(&raise * rho) * &lower).scale_real(2.0)) + &(rho * &absorb);
    let decay = &(&(&emit * rho) - &(&(&lower * rho) * &raise).scale_real(2.0)) + &(rho * &emit);

    let half_gamma = 0.5 * params.gamma;
    (&pump.scale_real(-half_gamma * params.nbar)) - &decay.scale_real(half_gamma * (params.nbar + 1.0))
}

pub fn lindblad_rhs(params: &LindbladParams, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
    }
    Ok(lindblad_generator(params, rho.matrix()))
}

/// Exact solution of the damped-qubit master equation.
pub fn lindblad_analytic(params: &LindbladParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho0.dim() });
    }
    let m = rho0.matrix();
    let n = params.nbar;
    let rate = (2.0 * n + 1.0) * params.gamma;
    let ee0 = m[(0, 0)].re;
    let ee = ((2.0 * n + 1.0) * ee0 - n) * (-rate * t).exp() / (2.0 * n + 1.0) + n / (2.0 * n + 1.0);
    let eg = m[(0, 1)] * (-(n + 0.5) * params.gamma * t).exp();
    DensityMatrix::qubit(ee, eg)
}

/// Classic fourth-order Runge-Kutta on [`lindblad_generator`]. Returns one
/// state per grid point, starting with `rho0`.
pub fn rk4_evolve(params: &LindbladParams, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Vec<DensityMatrix>> {
    rk4_evolve_with(params, rho0, grid, &Tolerances::default())
}

pub fn rk4_evolve_with(
    params: &LindbladParams,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    tol: &Tolerances,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho0.dim() });
    }
    let dt = grid.dt();
    let step_tol = Tolerances { positivity: tol.integration_positivity, ..*tol };
    let f = |m: &ComplexMatrix| lindblad_generator(params, m);

    let mut states = Vec::with_capacity(grid.len());
    states.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    for k in 1..=grid.steps {
        let k1 = f(&rho);
        let k2 = f(&(&rho + &k1.scale_real(0.5 * dt)));
        let k3 = f(&(&rho + &k2.scale_real(0.5 * dt)));
        let k4 = f(&(&rho + &k3.scale_real(dt)));
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        rho = &rho + &incr.scale_real(dt / 6.0);

        rho = rho.hermitian_part();
        let trace = rho.trace().re;
        rho = rho.scale_real(1.0 / trace);

        let state = validate_density_with(&rho, &step_tol).map_err(|e| match e {
            Error::NotPositive { min_eigenvalue } => Error::IntegrationFailure { t: grid.time(k), min_eigenvalue },
            other => other,
        })?;
        states.push(state);
    }
    Ok(states)
}
