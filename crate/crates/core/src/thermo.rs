//! Heat, work, internal energy and entropy along a trajectory.
//!
//! Two ways of splitting `dU` are tracked side by side:
//!
//! * eigenbasis split: with `rho = sum_i p_i P_i`,
//!   `dQ = sum_i dp_i tr(P_i H)` and `dW = sum_i p_i d tr(P_i H)`;
//! * Alicki split: `dQ = tr(drho H)`, `dW = tr(rho dH)`.
//!
//! Increments use the midpoint rule on the grid, so for each definition
//! `dQ + dW` telescopes to `U(t_next) - U(t_prev)`. Positive Q and W mean
//! energy flowing into the system.

use serde::{Deserialize, Serialize};

use crate::dynamics::Frame;
use crate::error::{Error, Result};
use crate::linalg::{expectation, ComplexMatrix};
use crate::states::{BranchTracker, DensityMatrix, SpectralDecomposition};
use crate::tolerance::{self, Tolerances};

fn trace_re(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(a.trace_product(b)?.re)
}

fn ensure_matched(prev: &SpectralDecomposition, next: &SpectralDecomposition) -> Result<()> {
    if prev.dim() != next.dim() {
        return Err(Error::DimensionMismatch { expected: prev.dim(), got: next.dim() });
    }
    if prev.branch_ids() != next.branch_ids() {
        return Err(Error::UnmatchedBranches);
    }
    Ok(())
}

/// `tr(rho H)`
pub fn internal_energy(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    expectation(rho.matrix(), h)
}

/// `sum_i (p_i' - p_i) tr(Pbar_i H)` with `Pbar_i` the midpoint projector.
pub fn heat_increment_new(
    prev: &SpectralDecomposition,
    next: &SpectralDecomposition,
    h: &ComplexMatrix,
) -> Result<f64> {
    ensure_matched(prev, next)?;
    let mut total = 0.0;
    for i in 0..prev.dim() {
        let dp = next.probabilities()[i] - prev.probabilities()[i];
        if dp == 0.0 {
            continue;
        }
        let energy =
            0.5 * (trace_re(&prev.projectors()[i], h)? + trace_re(&next.projectors()[i], h)?);
        total += dp * energy;
    }
    Ok(total)
}

/// `sum_i pbar_i (tr(P_i' H') - tr(P_i H))`
pub fn work_increment_new(
    prev: &SpectralDecomposition,
    next: &SpectralDecomposition,
    h_prev: &ComplexMatrix,
    h_next: &ComplexMatrix,
) -> Result<f64> {
    ensure_matched(prev, next)?;
    let mut total = 0.0;
    for i in 0..prev.dim() {
        let p_mid = 0.5 * (prev.probabilities()[i] + next.probabilities()[i]);
        let d_energy = trace_re(&next.projectors()[i], h_next)? - trace_re(&prev.projectors()[i], h_prev)?;
        total += p_mid * d_energy;
    }
    Ok(total)
}

/// `tr(rho_dot H)`
pub fn heat_rate_alicki(rho_dot: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    trace_re(rho_dot, h)
}

/// `tr(rho H_dot)`
pub fn work_rate_alicki(rho: &DensityMatrix, h_dot: &ComplexMatrix) -> Result<f64> {
    trace_re(rho.matrix(), h_dot)
}

/// Midpoint entropy change `-sum_i dp_i ln pbar_i` over one step.
///
/// Branches whose probability is below `zero_probability` at both ends are
/// skipped.
pub fn entropy_increment(
    prev: &SpectralDecomposition,
    next: &SpectralDecomposition,
    zero_probability: f64,
) -> Result<f64> {
    ensure_matched(prev, next)?;
    let mut total = 0.0;
    for i in 0..prev.dim() {
        let (a, b) = (prev.probabilities()[i], next.probabilities()[i]);
        if a < zero_probability && b < zero_probability {
            continue;
        }
        let p_mid = 0.5 * (a + b);
        if p_mid > 0.0 {
            total -= (b - a) * p_mid.ln();
        }
    }
    Ok(total)
}

/// [`entropy_increment`] divided by the step length.
pub fn entropy_rate(prev: &SpectralDecomposition, next: &SpectralDecomposition, dt: f64) -> Result<f64> {
    Ok(entropy_increment(prev, next, tolerance::ZERO_PROBABILITY)? / dt)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoSample {
    pub t: f64,
    /// Eigenvalues indexed by branch id.
    pub probabilities: Vec<f64>,
    pub internal_energy: f64,
    pub entropy: f64,
    /// Midpoint entropy increment over the preceding step.
    pub ds: f64,
    pub dq_new: f64,
    pub dw_new: f64,
    pub dq_alicki: f64,
    pub dw_alicki: f64,
    pub q_new: f64,
    pub w_new: f64,
    pub q_alicki: f64,
    pub w_alicki: f64,
    pub residual_new: f64,
    pub residual_alicki: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerMeta {
    pub scenario: String,
    pub subsystem: String,
    pub frame: Frame,
    pub t_max: f64,
    pub steps: usize,
    pub omega0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoLedger {
    pub meta: LedgerMeta,
    pub samples: Vec<ThermoSample>,
}

impl ThermoLedger {
    pub fn internal_energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.internal_energy).collect()
    }

    /// Largest absolute value of `field` over all samples.
    pub fn max_abs(&self, field: impl Fn(&ThermoSample) -> f64) -> f64 {
        self.samples.iter().map(|s| field(s).abs()).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &ThermoSample {
        self.samples.last().expect("ledger has at least one sample")
    }
}

struct Previous {
    t: f64,
    rho: ComplexMatrix,
    decomposition: SpectralDecomposition,
    hamiltonian: ComplexMatrix,
}

/// Sequential fold that turns a state trajectory into a [`ThermoLedger`].
pub struct Accountant {
    tracker: BranchTracker,
    hamiltonian: ComplexMatrix,
    zero_probability: f64,
    previous: Option<Previous>,
    initial_energy: f64,
    samples: Vec<ThermoSample>,
}

impl Accountant {
    pub fn new(hamiltonian: ComplexMatrix, tol: &Tolerances) -> Self {
        Accountant {
            tracker: BranchTracker::new(tol.degeneracy),
            hamiltonian,
            zero_probability: tol.zero_probability,
            previous: None,
            initial_energy: 0.0,
            samples: Vec::new(),
        }
    }

    pub fn record(&mut self, t: f64, rho: &DensityMatrix) -> Result<&ThermoSample> {
        let h = self.hamiltonian.clone();
        self.record_with_hamiltonian(t, rho, h)
    }

    pub fn record_with_hamiltonian(&mut self, t: f64, rho: &DensityMatrix, h: ComplexMatrix) -> Result<&ThermoSample> {
        if let Some(prev) = &self.previous {
            if t <= prev.t {
                return Err(Error::InvalidParameter(format!("sample times must increase ({} after {})", t, prev.t)));
            }
        }
        let decomposition = self.tracker.observe(rho)?;
        let energy = internal_energy(rho, &h)?;

        let sample = match (&self.previous, self.samples.last()) {
            (Some(prev), Some(last)) => {
                let h_mid = (&prev.hamiltonian + &h).scale_real(0.5);
                let ds = entropy_increment(&prev.decomposition, &decomposition, self.zero_probability)?;
                let dq_new = heat_increment_new(&prev.decomposition, &decomposition, &h_mid)?;
                let dw_new = work_increment_new(&prev.decomposition, &decomposition, &prev.hamiltonian, &h)?;
                let rho_mid = (&prev.rho + rho.matrix()).scale_real(0.5);
                let dq_alicki = heat_rate_alicki(&(rho.matrix() - &prev.rho), &h_mid)?;
                let dw_alicki = trace_re(&rho_mid, &(&h - &prev.hamiltonian))?;

                let q_new = last.q_new + dq_new;
                let w_new = last.w_new + dw_new;
                let q_alicki = last.q_alicki + dq_alicki;
                let w_alicki = last.w_alicki + dw_alicki;
                let du = energy - self.initial_energy;
                ThermoSample {
                    t,
                    probabilities: decomposition.probabilities_by_branch(),
                    internal_energy: energy,
                    entropy: decomposition.entropy(),
                    ds,
                    dq_new,
                    dw_new,
                    dq_alicki,
                    dw_alicki,
                    q_new,
                    w_new,
                    q_alicki,
                    w_alicki,
                    residual_new: (du - q_new - w_new).abs(),
                    residual_alicki: (du - q_alicki - w_alicki).abs(),
                }
            }
            _ => {
                self.initial_energy = energy;
                ThermoSample {
                    t,
                    probabilities: decomposition.probabilities_by_branch(),
                    internal_energy: energy,
                    entropy: decomposition.entropy(),
                    ds: 0.0,
                    dq_new: 0.0,
                    dw_new: 0.0,
                    dq_alicki: 0.0,
                    dw_alicki: 0.0,
                    q_new: 0.0,
                    w_new: 0.0,
                    q_alicki: 0.0,
                    w_alicki: 0.0,
                    residual_new: 0.0,
                    residual_alicki: 0.0,
                }
            }
        };

        self.previous = Some(Previous { t, rho: rho.matrix().clone(), decomposition, hamiltonian: h });
        self.samples.push(sample);
        Ok(self.samples.last().unwrap())
    }

    pub fn finish(self, meta: LedgerMeta) -> ThermoLedger {
        ThermoLedger { meta, samples: self.samples }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitionAudit {
    pub max_residual: f64,
    pub t_at_max: f64,
    /// Sample indices whose residual exceeds the tolerance.
    pub violations: Vec<usize>,
}

impl DefinitionAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstLawAudit {
    pub tolerance: f64,
    pub new: DefinitionAudit,
    pub alicki: DefinitionAudit,
}

/// Recomputes `|(U - U_0) - Q - W|` for both definitions from an independent
/// energy series and flags samples above `tolerance * max(1, max |U|)`.
pub fn audit_first_law(ledger: &ThermoLedger, u_series: &[f64], tolerance: f64) -> Result<FirstLawAudit> {
    if u_series.len() != ledger.samples.len() {
        return Err(Error::DimensionMismatch { expected: ledger.samples.len(), got: u_series.len() });
    }
    let scale = u_series.iter().fold(1.0_f64, |m, u| m.max(u.abs()));
    let bound = tolerance * scale;
    let u0 = u_series.first().copied().unwrap_or(0.0);

    let audit = |q: &dyn Fn(&ThermoSample) -> f64, w: &dyn Fn(&ThermoSample) -> f64| {
        let mut out = DefinitionAudit { max_residual: 0.0, t_at_max: 0.0, violations: Vec::new() };
        for (k, (s, u)) in ledger.samples.iter().zip(u_series).enumerate() {
            let residual = ((u - u0) - q(s) - w(s)).abs();
            if residual > out.max_residual {
                out.max_residual = residual;
                out.t_at_max = s.t;
            }
            if residual > bound {
                out.violations.push(k);
            }
        }
        out
    };
    Ok(FirstLawAudit {
        tolerance: bound,
        new: audit(&|s| s.q_new, &|s| s.w_new),
        alicki: audit(&|s| s.q_alicki, &|s| s.w_alicki),
    })
}
