//! Acceptance criteria for the two model scenarios. Runs as a plain binary so
//! every criterion prints a PASS/FAIL line even when all of them pass.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qthermo_core::dynamics::{
    dispersive_reduced_a, lindblad_analytic, rk4_evolve, DispersiveParams, LindbladParams, TimeGrid,
};
use qthermo_core::linalg::{partial_trace, tensor_product, ComplexMatrix, Subsystem, C64};
use qthermo_core::scenario::{run_dissipative, run_two_qubit, RunOutput, ScenarioConfig, ScenarioKind};
use qthermo_core::states::{
    bloch_vector, match_branches, spectral_decompose, validate_density, von_neumann_entropy, DensityMatrix,
};
use qthermo_core::thermo::{audit_first_law, entropy_rate};

/// Closed-form peak of Q_new for p = 0.3, c = 0.35 at gt = pi/4:
/// (w0/2) z ln(r(pi/4)/r(0)) with z = -0.4, r(0) = sqrt(0.65), r(pi/4) = 0.4.
/// Evaluated with 30-digit arithmetic and cross-checked by dense numeric
/// diagonalization (0.14017985481764).
const Q_PEAK_GENERAL: f64 = 0.140179854765586;

/// Q_new(gamma t) for the damped superposition at nbar = 0, from 30-digit
/// quadrature of (w0/2)(z/r) dr/dt built from the exact Bloch components.
const Q_DISSIPATIVE: [(f64, f64); 5] = [
    (0.5, 0.0110741357939148),
    (1.0, 0.00930374693798737),
    (2.0, -0.0174760852088838),
    (3.0, -0.0347329488353898),
    (5.0, -0.0448770475357601),
];

struct Report {
    results: Vec<(String, bool, String)>,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), pass, detail));
    }
}

fn two_qubit(p: f64, c: f64, t_max: f64, steps: usize) -> RunOutput {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::TwoQubit);
    cfg.p = p;
    cfg.c = C64::new(c, 0.0);
    cfg.grid = TimeGrid { t_max, steps };
    run_two_qubit(&cfg).expect("two-qubit run")
}

fn dissipative(steps: usize) -> RunOutput {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::Dissipative);
    cfg.grid.steps = steps;
    run_dissipative(&cfg).expect("dissipative run")
}

fn closed_form_entropy(gt: f64) -> f64 {
    let c2 = gt.cos().powi(2);
    let s2 = gt.sin().powi(2);
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(c2) + term(s2)
}

/// Bloch components of the damped superposition (nbar = 0, rho_ee(0) = rho_eg(0) = 1/2)
/// and the heat density (w0/2)(z/r) dr/dt.
fn heat_density(t: f64) -> f64 {
    let x = (-t / 2.0).exp();
    let z = (-t).exp() - 1.0;
    let r = x.hypot(z);
    let dx = -x / 2.0;
    let dz = -(-t).exp();
    let dr = (x * dx + z * dz) / r;
    0.5 * z / r * dr
}

/// Composite Simpson integral of `heat_density` on `[a, b]`.
fn simpson(a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = heat_density(a) + heat_density(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * heat_density(a + k as f64 * h);
    }
    s * h / 3.0
}

fn criterion_1_2_3(report: &mut Report) {
    let start = Instant::now();
    let out = two_qubit(0.5, 0.5, PI, 2000);
    let elapsed = start.elapsed().as_secs_f64();
    let ledger = &out.ledger;
    let u0 = ledger.samples[0].internal_energy;
    let q = ledger.max_abs(|s| s.q_new);
    let w = ledger.max_abs(|s| s.w_new);
    let du = ledger.max_abs(|s| s.internal_energy - u0);
    report.check(
        "C1 two-qubit p=c=1/2: no heat, no work, constant U",
        q < 1e-9 && w < 1e-9 && du < 1e-12 && elapsed < 1.0,
        format!("max|Q_new|={q:.2e} max|W_new|={w:.2e} max|dU|={du:.2e} runtime={elapsed:.3}s"),
    );

    let s_dev = ledger
        .samples
        .iter()
        .map(|s| (s.entropy - closed_form_entropy(s.t)).abs())
        .fold(0.0, f64::max);
    let quarter = &ledger.samples[500];
    let s_quarter = quarter.entropy;
    // The literal typesetting -2 ln cos - sin^2 ln sin^2 / cos^2 gives 2 ln 2 here.
    let literal = -2.0 * FRAC_PI_4.cos().ln() - FRAC_PI_4.sin().powi(2) * FRAC_PI_4.sin().powi(2).ln() / FRAC_PI_4.cos().powi(2);
    report.check(
        "C2 entropy follows -cos^2 ln cos^2 - sin^2 ln sin^2",
        s_dev < 1e-9 && (quarter.t - FRAC_PI_4).abs() < 1e-15 && (s_quarter - LN_2).abs() < 1e-9,
        format!("max dev={s_dev:.2e} S(pi/4)={s_quarter:.12} (literal reading gives {literal:.6})"),
    );

    let exact = 3.0_f64.sqrt() / 2.0 * 3.0_f64.ln();
    let params = DispersiveParams::default();
    let rate = |dt: f64| {
        let gt = PI / 6.0;
        let prev = spectral_decompose(&dispersive_reduced_a(&params, gt - dt / 2.0).unwrap());
        let next = match_branches(&prev, &spectral_decompose(&dispersive_reduced_a(&params, gt + dt / 2.0).unwrap())).unwrap();
        entropy_rate(&prev, &next, dt).unwrap()
    };
    let e1 = (rate(PI / 2000.0) - exact).abs();
    let e2 = (rate(PI / 4000.0) - exact).abs();
    let ratio = e1 / e2;
    report.check(
        "C3 entropy rate at gt=pi/6 -> (sqrt3/2) ln 3",
        e1 < 1e-4 && ratio >= 3.9,
        format!("err(2000 steps)={e1:.3e} err(4000 steps)={e2:.3e} ratio={ratio:.3} target={exact:.9}"),
    );
}

fn criterion_4(report: &mut Report) {
    let out = two_qubit(0.3, 0.35, FRAC_PI_2, 1000);
    let ledger = &out.ledger;
    let u0 = ledger.samples[0].internal_energy;
    let du = ledger.max_abs(|s| s.internal_energy - u0);
    let q = ledger.max_abs(|s| s.q_new);
    let w = ledger.max_abs(|s| s.w_new);
    let balance = ledger.max_abs(|s| s.q_new + s.w_new);
    let peak = &ledger.samples[500];
    let oracle_dev = (peak.q_new - Q_PEAK_GENERAL).abs();
    report.check(
        "C4 two-qubit p=0.3 c=0.35: dU=0, Q=-W!=0",
        du < 1e-12 && q > 1e-3 && w > 1e-3 && balance < 1e-6 && oracle_dev < 1e-6,
        format!(
            "max|dU|={du:.2e} max|Q|={q:.6} max|W|={w:.6} max|Q+W|={balance:.2e} Q(pi/4)={:.9} oracle={Q_PEAK_GENERAL:.9}",
            peak.q_new
        ),
    );
}

fn criterion_5(report: &mut Report) {
    let mut worst_ledger = 0.0_f64;
    let mut worst_state = 0.0_f64;
    let mixed = ComplexMatrix::identity(2).scale_real(0.5);
    for (p, c, t_max) in [(0.5, 0.5, PI), (0.3, 0.35, FRAC_PI_2)] {
        let out = two_qubit(p, c, t_max, 2000);
        let b = out.ledger_b.as_ref().unwrap();
        let u0 = b.samples[0].internal_energy;
        for s in &b.samples {
            for v in [s.q_new, s.w_new, s.q_alicki, s.w_alicki, s.dq_new, s.dw_new, s.internal_energy - u0] {
                worst_ledger = worst_ledger.max(v.abs());
            }
        }
        // rho_B straight from the joint evolution.
        let params = DispersiveParams { p, c: C64::new(c, 0.0), ..Default::default() };
        let joint0 = params.initial_joint_state().unwrap();
        for t in (TimeGrid { t_max, steps: 200 }).times() {
            let joint = qthermo_core::dynamics::dispersive_joint_evolve(&params, &joint0, t).unwrap();
            let rho_b = partial_trace(joint.matrix(), Subsystem::B).unwrap();
            worst_state = worst_state.max(rho_b.max_abs_diff(&mixed));
        }
        worst_state = worst_state.max(out.summary.metric("max_abs_rho_b_minus_mixed"));
    }
    report.check(
        "C5 qubit B is a catalyst",
        worst_ledger < 1e-10 && worst_state < 1e-12,
        format!("max|ledger_B|={worst_ledger:.2e} max|rho_B - I/2|={worst_state:.2e}"),
    );
}

fn criterion_6(report: &mut Report) {
    let out = dissipative(5000);
    let samples = &out.ledger.samples;
    let positive_run = samples[1..].iter().take_while(|s| s.q_new > 0.0).count();
    let peak = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.q_new.total_cmp(&b.1.q_new))
        .map(|(k, _)| k)
        .unwrap();
    let decreasing_after_peak = samples[peak..].windows(2).all(|w| w[1].q_new < w[0].q_new);
    let u_decreasing = samples.windows(2).all(|w| w[1].internal_energy < w[0].internal_energy);

    // Dense-grid oracle: 20 Simpson panels per ledger step.
    let mut integral = 0.0;
    let mut oracle_dev = 0.0_f64;
    for w in samples.windows(2) {
        integral += simpson(w[0].t, w[1].t, 20);
        oracle_dev = oracle_dev.max((w[1].q_new - integral).abs());
    }
    let frozen_dev = Q_DISSIPATIVE
        .iter()
        .map(|&(t, q)| (samples[(t * 1000.0).round() as usize].q_new - q).abs())
        .fold(0.0, f64::max);
    report.check(
        "C6 damped superposition draws heat from the vacuum, then releases it",
        positive_run >= 100 && peak <= positive_run && decreasing_after_peak && u_decreasing && oracle_dev < 1e-5 && frozen_dev < 1e-5,
        format!(
            "positive samples={positive_run} peak Q={:.9} at t={:.3} decreasing after peak={decreasing_after_peak} U strictly decreasing={u_decreasing} oracle dev={oracle_dev:.2e} frozen dev={frozen_dev:.2e}",
            samples[peak].q_new, samples[peak].t
        ),
    );
}

fn rk4_error(nbar: f64, steps: usize) -> f64 {
    let params = LindbladParams { gamma: 1.0, nbar, omega0: 1.0 };
    let rho0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
    let grid = TimeGrid::new(5.0, steps).unwrap();
    let numeric = rk4_evolve(&params, &rho0, &grid).unwrap();
    grid.times()
        .zip(&numeric)
        .map(|(t, rho)| rho.matrix().max_abs_diff(lindblad_analytic(&params, &rho0, t).unwrap().matrix()))
        .fold(0.0, f64::max)
}

fn criterion_7(report: &mut Report) {
    let mut detail = Vec::new();
    let mut pass = true;
    for nbar in [0.0, 0.5, 2.0] {
        let fine = rk4_error(nbar, 5000);
        let order = (rk4_error(nbar, 50) / rk4_error(nbar, 100)).log2();
        pass &= fine < 1e-9 && order >= 3.8;
        detail.push(format!("nbar={nbar}: err={fine:.2e} order={order:.3}"));
    }
    report.check("C7 RK4 matches the exact damped-qubit solution", pass, detail.join("; "));
}

/// Residuals that are pure round-off: the midpoint increments telescope to
/// dU exactly, so there is no discretization term left to shrink.
const ROUND_OFF_FLOOR: f64 = 1e-12;

fn criterion_8(report: &mut Report) {
    let mut pass = true;
    let mut detail = Vec::new();
    type Run<'a> = (&'a str, Box<dyn Fn(usize) -> RunOutput>, usize);
    let runs: [Run; 2] = [
        ("two-qubit", Box::new(|n| two_qubit(0.3, 0.35, PI, n)), 2000),
        ("dissipative", Box::new(dissipative), 5000),
    ];
    for (name, make, steps) in runs.iter() {
        let coarse = make(*steps);
        let fine = make(2 * steps);
        let audit = |o: &RunOutput| audit_first_law(&o.ledger, &o.ledger.internal_energies(), 1e-6).unwrap();
        let (a, b) = (audit(&coarse), audit(&fine));
        let ok_levels = a.new.max_residual < 1e-6 && a.alicki.max_residual < 1e-9 && a.new.passed();
        let order_ok = |r1: f64, r2: f64| r2 <= r1 / 4.0 || r2.max(r1) < ROUND_OFF_FLOOR;
        let ok_order = order_ok(a.new.max_residual, b.new.max_residual)
            && order_ok(a.alicki.max_residual, b.alicki.max_residual);
        pass &= ok_levels && ok_order;
        detail.push(format!(
            "{name}: new {:.2e} -> {:.2e}, alicki {:.2e} -> {:.2e}",
            a.new.max_residual, b.new.max_residual, a.alicki.max_residual, b.alicki.max_residual
        ));
    }
    // The heat itself carries an O(dt^2) discretization error; check its order.
    let q_err = |steps: usize| {
        let out = dissipative(steps);
        let t = 2.0;
        let k = (t * steps as f64 / 5.0).round() as usize;
        (out.ledger.samples[k].q_new - Q_DISSIPATIVE[2].1).abs()
    };
    let heat_ratio = q_err(500) / q_err(1000);
    pass &= heat_ratio >= 3.5;
    detail.push(format!("Q_new discretization error ratio under halving={heat_ratio:.2}"));
    report.check("C8 first law holds for both definitions", pass, detail.join("; "));
}

fn random_density(rng: &mut StdRng, dim: usize, rank: usize) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for _ in 0..rank {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        m = &m + &ComplexMatrix::projector(&v);
    }
    let tr = m.trace().re;
    validate_density(&m.scale_real(1.0 / tr)).unwrap()
}

fn criterion_9(report: &mut Report) {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut bump = |key, v: f64| {
        let e = worst.entry(key).or_insert(0.0);
        *e = e.max(v);
    };
    let mut entropy_ok = true;

    let mut qubits = Vec::new();
    for k in 0..1000 {
        let rho = random_density(&mut rng, 2, if k % 10 == 0 { 1 } else { 2 });
        let dec = spectral_decompose(&rho);
        bump("reconstruction", dec.reconstruct().max_abs_diff(rho.matrix()));
        let s = von_neumann_entropy(&rho);
        entropy_ok &= (0.0..=LN_2 + 1e-12).contains(&s);
        let bloch = bloch_vector(&rho).unwrap();
        let [hi, lo] = bloch.eigenvalues();
        bump("bloch", (hi - dec.probabilities()[0]).abs().max((lo - dec.probabilities()[1]).abs()));
        qubits.push(rho);
    }
    for k in 0..100 {
        let rho = random_density(&mut rng, 4, 1 + k % 4);
        let dec = spectral_decompose(&rho);
        bump("reconstruction", dec.reconstruct().max_abs_diff(rho.matrix()));
        let s = von_neumann_entropy(&rho);
        entropy_ok &= (0.0..=4.0_f64.ln() + 1e-12).contains(&s);
    }
    for pair in qubits.chunks(2) {
        let (a, b) = (pair[0].matrix(), pair[1].matrix());
        let ab = tensor_product(a, b).unwrap();
        bump("partial_trace", partial_trace(&ab, Subsystem::A).unwrap().max_abs_diff(a));
        bump("partial_trace", partial_trace(&ab, Subsystem::B).unwrap().max_abs_diff(b));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst["reconstruction"] < 1e-10
        && worst["bloch"] < 1e-10
        && worst["partial_trace"] < 1e-13
        && entropy_ok
        && elapsed < 10.0;
    report.check(
        "C9 random-state property suite",
        pass,
        format!(
            "reconstruction={:.2e} bloch={:.2e} partial_trace={:.2e} entropy bounds ok={entropy_ok} runtime={elapsed:.2}s",
            worst["reconstruction"], worst["bloch"], worst["partial_trace"]
        ),
    );
}

fn main() {
    let mut report = Report { results: Vec::new() };
    criterion_1_2_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);

    let failed: Vec<&str> = report.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!("acceptance: {} passed, {} failed", report.results.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
