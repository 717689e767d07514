use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, ScenarioKind};
use crate::dynamics::{
    dispersive_joint_evolve, dispersive_reduced_a, lindblad_analytic, qubit_hamiltonian, rk4_evolve_with,
};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, Subsystem};
use crate::states::{bloch_vector, entropy_of, validate_density_with, DensityMatrix};
use crate::thermo::{audit_first_law, Accountant, FirstLawAudit, LedgerMeta, ThermoLedger};

/// Thresholds used when naming the qualitative features of a run.
const ZERO_EXCHANGE: f64 = 1e-9;
const ZERO_ENERGY_CHANGE: f64 = 1e-12;
const CATALYST_LEDGER: f64 = 1e-10;
const CATALYST_STATE: f64 = 1e-12;
const BALANCE: f64 = 1e-6;
const VARYING: f64 = 1e-6;

/// Ledger entries that are reported with a name in [`Summary::flags`].
pub mod flags {
    pub const NO_HEAT_NO_WORK_ENTROPY_VARIES: &str = "no_heat_no_work_entropy_varies";
    pub const SUBSYSTEM_B_CATALYST: &str = "subsystem_b_catalyst";
    pub const HEAT_BALANCES_WORK: &str = "heat_balances_work";
    pub const HEAT_POSITIVE_INITIALLY: &str = "heat_positive_initially";
    pub const ENERGY_STRICTLY_DECREASING: &str = "internal_energy_strictly_decreasing";
    pub const FIRST_LAW_VIOLATED_NEW: &str = "first_law_violated_new";
    pub const FIRST_LAW_VIOLATED_ALICKI: &str = "first_law_violated_alicki";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ScenarioConfig,
    pub flags: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub audit: FirstLawAudit,
    pub audit_b: Option<FirstLawAudit>,
}

impl Summary {
    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.iter().any(|f| f == name)
    }

    pub fn metric(&self, name: &str) -> f64 {
        self.metrics[name]
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Ledger of the audited qubit (A, or the damped qubit).
    pub ledger: ThermoLedger,
    /// Ledger of qubit B in the two-qubit scenario.
    pub ledger_b: Option<ThermoLedger>,
    /// Reduced state of the audited qubit on every grid point.
    pub states: Vec<DensityMatrix>,
    pub summary: Summary,
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    match cfg.scenario {
        ScenarioKind::TwoQubit => run_two_qubit(cfg),
        ScenarioKind::Dissipative => run_dissipative(cfg),
    }
}

fn meta(cfg: &ScenarioConfig, subsystem: &str) -> LedgerMeta {
    LedgerMeta {
        scenario: cfg.scenario.to_string(),
        subsystem: subsystem.to_string(),
        frame: cfg.frame,
        t_max: cfg.grid.t_max,
        steps: cfg.grid.steps,
        omega0: cfg.omega0,
    }
}

fn energy_drift(ledger: &ThermoLedger) -> f64 {
    let u0 = ledger.samples[0].internal_energy;
    ledger.max_abs(|s| s.internal_energy - u0)
}

fn entropy_span(ledger: &ThermoLedger) -> f64 {
    let (lo, hi) = ledger
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.entropy), hi.max(s.entropy)));
    hi - lo
}

/// Max deviation between the tabulated entropy and `S(0) + sum dS`.
fn integrated_entropy_deviation(ledger: &ThermoLedger) -> f64 {
    let mut integrated = ledger.samples[0].entropy;
    let mut worst = 0.0_f64;
    for s in &ledger.samples[1..] {
        integrated += s.ds;
        worst = worst.max((integrated - s.entropy).abs());
    }
    worst
}

fn common_metrics(cfg: &ScenarioConfig, ledger: &ThermoLedger, audit: &FirstLawAudit, out: &mut BTreeMap<String, f64>, flags: &mut Vec<String>) {
    out.insert("max_abs_delta_u".into(), energy_drift(ledger));
    out.insert("entropy_span".into(), entropy_span(ledger));
    out.insert("entropy_integration_max_deviation".into(), integrated_entropy_deviation(ledger));
    if cfg.definitions.includes_new() {
        out.insert("max_abs_q_new".into(), ledger.max_abs(|s| s.q_new));
        out.insert("max_abs_w_new".into(), ledger.max_abs(|s| s.w_new));
        out.insert("final_q_new".into(), ledger.last().q_new);
        out.insert("final_w_new".into(), ledger.last().w_new);
        out.insert("max_residual_new".into(), audit.new.max_residual);
        if !audit.new.passed() {
            flags.push(flags::FIRST_LAW_VIOLATED_NEW.into());
        }
    }
    if cfg.definitions.includes_alicki() {
        out.insert("max_abs_q_alicki".into(), ledger.max_abs(|s| s.q_alicki));
        out.insert("max_abs_w_alicki".into(), ledger.max_abs(|s| s.w_alicki));
        out.insert("max_residual_alicki".into(), audit.alicki.max_residual);
        if !audit.alicki.passed() {
            flags.push(flags::FIRST_LAW_VIOLATED_ALICKI.into());
        }
    }
}

/// Two qubits under `g Z_A Z_B`: qubit A from the closed form, qubit B from
/// the joint evolution, which also cross-checks A at every grid point.
pub fn run_two_qubit(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let tol = &cfg.tolerances;
    let params = cfg.dispersive_params();
    let joint0 = params.initial_joint_state()?;
    let h = qubit_hamiltonian(cfg.omega0);
    let mixed = ComplexMatrix::identity(2).scale_real(0.5);

    let mut acc_a = Accountant::new(h.clone(), tol);
    let mut acc_b = Accountant::new(h, tol);
    let mut states = Vec::with_capacity(cfg.grid.len());
    let mut bloch_entropy_dev = 0.0_f64;
    let mut b_state_dev = 0.0_f64;

    for t in cfg.grid.times() {
        let rho_a = dispersive_reduced_a(&params, t)?;
        let joint = dispersive_joint_evolve(&params, &joint0, t)?;

        let deviation = partial_trace(joint.matrix(), Subsystem::A)?.max_abs_diff(rho_a.matrix());
        if deviation > tol.crosscheck {
            return Err(Error::CrossCheck { t, deviation, tolerance: tol.crosscheck });
        }
        let rho_b = validate_density_with(&partial_trace(joint.matrix(), Subsystem::B)?, tol)?;
        b_state_dev = b_state_dev.max(rho_b.matrix().max_abs_diff(&mixed));

        let bloch = bloch_vector(&rho_a)?;
        let s = acc_a.record(t, &rho_a)?.entropy;
        bloch_entropy_dev = bloch_entropy_dev.max((s - entropy_of(&bloch.eigenvalues())).abs());
        acc_b.record(t, &rho_b)?;
        states.push(rho_a);
    }

    let ledger = acc_a.finish(meta(cfg, "A"));
    let ledger_b = acc_b.finish(meta(cfg, "B"));
    let audit = audit_first_law(&ledger, &ledger.internal_energies(), tol.first_law)?;
    let audit_b = audit_first_law(&ledger_b, &ledger_b.internal_energies(), tol.first_law)?;

    let mut metrics = BTreeMap::new();
    let mut flag_list = Vec::new();
    common_metrics(cfg, &ledger, &audit, &mut metrics, &mut flag_list);
    metrics.insert("entropy_bloch_max_deviation".into(), bloch_entropy_dev);
    metrics.insert("max_abs_rho_b_minus_mixed".into(), b_state_dev);
    let b_ledger_max = [
        ledger_b.max_abs(|s| s.q_new),
        ledger_b.max_abs(|s| s.w_new),
        ledger_b.max_abs(|s| s.q_alicki),
        ledger_b.max_abs(|s| s.w_alicki),
        energy_drift(&ledger_b),
        entropy_span(&ledger_b),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    metrics.insert("max_abs_ledger_b".into(), b_ledger_max);

    let q_max = ledger.max_abs(|s| s.q_new);
    let w_max = ledger.max_abs(|s| s.w_new);
    let du = energy_drift(&ledger);
    let balance = ledger.max_abs(|s| s.q_new + s.w_new);
    metrics.insert("max_abs_q_plus_w_new".into(), balance);

    if q_max < ZERO_EXCHANGE && w_max < ZERO_EXCHANGE && du < ZERO_ENERGY_CHANGE && entropy_span(&ledger) > VARYING {
        flag_list.push(flags::NO_HEAT_NO_WORK_ENTROPY_VARIES.into());
    }
    if du < ZERO_ENERGY_CHANGE && balance < BALANCE && q_max > VARYING {
        flag_list.push(flags::HEAT_BALANCES_WORK.into());
    }
    if b_ledger_max < CATALYST_LEDGER && b_state_dev < CATALYST_STATE {
        flag_list.push(flags::SUBSYSTEM_B_CATALYST.into());
    }

    Ok(RunOutput {
        summary: Summary { config: cfg.clone(), flags: flag_list, metrics, audit, audit_b: Some(audit_b) },
        ledger,
        ledger_b: Some(ledger_b),
        states,
    })
}

/// Damped qubit from the exact solution, optionally cross-checked against RK4.
pub fn run_dissipative(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let tol = &cfg.tolerances;
    let params = cfg.lindblad_params();
    let rho0 = cfg.initial_qubit()?;

    let states: Vec<DensityMatrix> =
        cfg.grid.times().map(|t| lindblad_analytic(&params, &rho0, t)).collect::<Result<_>>()?;

    let mut metrics = BTreeMap::new();
    if cfg.crosscheck {
        let numeric = rk4_evolve_with(&params, &rho0, &cfg.grid, tol)?;
        let mut worst = 0.0_f64;
        for (k, (a, b)) in states.iter().zip(&numeric).enumerate() {
            let deviation = a.matrix().max_abs_diff(b.matrix());
            if deviation > tol.crosscheck {
                return Err(Error::CrossCheck { t: cfg.grid.time(k), deviation, tolerance: tol.crosscheck });
            }
            worst = worst.max(deviation);
        }
        metrics.insert("rk4_max_deviation".into(), worst);
    }

    let mut acc = Accountant::new(qubit_hamiltonian(cfg.omega0), tol);
    for (t, rho) in cfg.grid.times().zip(&states) {
        acc.record(t, rho)?;
    }
    let ledger = acc.finish(meta(cfg, "A"));
    let audit = audit_first_law(&ledger, &ledger.internal_energies(), tol.first_law)?;

    let mut flag_list = Vec::new();
    common_metrics(cfg, &ledger, &audit, &mut metrics, &mut flag_list);

    // Length of the opening run of strictly positive Q_new (sample 0 is Q = 0).
    let positive_run = ledger.samples[1..].iter().take_while(|s| s.q_new > 0.0).count();
    let (peak_k, peak) = ledger
        .samples
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, s)| if s.q_new > best.1 { (k, s.q_new) } else { best });
    metrics.insert("initial_positive_heat_samples".into(), positive_run as f64);
    metrics.insert("q_new_peak".into(), peak);
    metrics.insert("t_q_new_peak".into(), ledger.samples[peak_k].t);
    if positive_run > 0 && peak > 0.0 {
        flag_list.push(flags::HEAT_POSITIVE_INITIALLY.into());
    }
    let decreasing = ledger.samples.windows(2).all(|w| w[1].internal_energy < w[0].internal_energy);
    if decreasing {
        flag_list.push(flags::ENERGY_STRICTLY_DECREASING.into());
    }

    Ok(RunOutput {
        summary: Summary { config: cfg.clone(), flags: flag_list, metrics, audit, audit_b: None },
        ledger,
        ledger_b: None,
        states,
    })
}
