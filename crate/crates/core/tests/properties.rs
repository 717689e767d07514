use proptest::prelude::*;

use qthermo_core::dynamics::{
    dispersive_joint_evolve, dispersive_reduced_a, DispersiveParams, Frame, TimeGrid,
};
use qthermo_core::linalg::{hermitian_eig_2x2, hermitian_eig_jacobi};
use qthermo_core::linalg::{partial_trace, tensor_product, ComplexMatrix, Subsystem, C64};
use qthermo_core::states::{
    bloch_vector, match_branches, spectral_decompose, validate_density, von_neumann_entropy, DensityMatrix,
};
use qthermo_core::thermo::entropy_rate;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Random density matrix `G G^dagger / tr` with `rank` rows in `G`.
fn density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    (1..=dim)
        .prop_flat_map(move |rank| prop::collection::vec(prop::collection::vec(complex(), dim), rank))
        .prop_filter_map("degenerate draw", |vs| {
            let mut m = ComplexMatrix::zeros(vs[0].len());
            for v in &vs {
                m = &m + &ComplexMatrix::projector(v);
            }
            let tr = m.trace().re;
            (tr > 1e-6).then(|| validate_density(&m.scale_real(1.0 / tr)).unwrap())
        })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| {
        let m = ComplexMatrix::from_vec(dim, v).unwrap();
        (&m + &m.adjoint()).scale_real(0.5)
    })
}

/// A valid qubit `(p, c)` with `|c|` strictly inside the positivity bound.
fn qubit_params() -> impl Strategy<Value = (f64, C64)> {
    (0.05..0.95f64, 0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(p, frac, phase)| {
        let bound = (p * (1.0 - p)).sqrt();
        (p, C64::from_polar(frac * bound, phase))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_reconstruction(rho in prop_oneof![density(2), density(4)]) {
        let dec = spectral_decompose(&rho);
        prop_assert!(dec.reconstruct().max_abs_diff(rho.matrix()) < 1e-10);
        let total: f64 = dec.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for p in dec.projectors() {
            prop_assert!((p * p).max_abs_diff(p) < 1e-10);
        }
    }

    #[test]
    fn entropy_within_bounds(rho in prop_oneof![density(2), density(4)]) {
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= 0.0);
        prop_assert!(s <= (rho.dim() as f64).ln() + 1e-12);
    }

    #[test]
    fn bloch_eigenvalues_agree(rho in density(2)) {
        let b = bloch_vector(&rho).unwrap();
        prop_assert!(b.r <= 1.0 + 1e-12);
        let [hi, lo] = b.eigenvalues();
        let vals = rho.eigenvalues();
        prop_assert!((hi - vals[0]).abs() < 1e-10 && (lo - vals[1]).abs() < 1e-10);
    }

    #[test]
    fn jacobi_agrees_with_closed_form(m in hermitian(2)) {
        let a = hermitian_eig_2x2(&m).unwrap();
        let b = hermitian_eig_jacobi(&m).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!(b.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_4x4(m in hermitian(4)) {
        let e = hermitian_eig_jacobi(&m).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tensor_is_bilinear(a in hermitian(2), b in hermitian(2), c in hermitian(2), s in -2.0..2.0f64) {
        let lhs = tensor_product(&(&a + &c.scale_real(s)), &b).unwrap();
        let rhs = &tensor_product(&a, &b).unwrap() + &tensor_product(&c, &b).unwrap().scale_real(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn partial_trace_of_product(a in density(2), b in density(2)) {
        let ab = tensor_product(a.matrix(), b.matrix()).unwrap();
        prop_assert!(partial_trace(&ab, Subsystem::A).unwrap().max_abs_diff(a.matrix()) < 1e-13);
        prop_assert!(partial_trace(&ab, Subsystem::B).unwrap().max_abs_diff(b.matrix()) < 1e-13);
    }

    #[test]
    fn joint_evolution_is_unitary((p, c) in qubit_params(), g in -2.0..2.0f64, t in 0.0..4.0f64) {
        let params = DispersiveParams { p, c, g, ..Default::default() };
        let rho0 = params.initial_joint_state().unwrap();
        let rho = dispersive_joint_evolve(&params, &rho0, t).unwrap();
        for (x, y) in rho.eigenvalues().iter().zip(rho0.eigenvalues()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let reduced = partial_trace(rho.matrix(), Subsystem::A).unwrap();
        let closed = dispersive_reduced_a(&params, t).unwrap();
        prop_assert!(reduced.max_abs_diff(closed.matrix()) < 1e-12);
    }

    #[test]
    fn frame_leaves_spectrum_unchanged((p, c) in qubit_params(), t in 0.0..4.0f64) {
        let interaction = DispersiveParams { p, c, ..Default::default() };
        let lab = DispersiveParams { frame: Frame::Lab, ..interaction };
        let a = dispersive_reduced_a(&interaction, t).unwrap();
        let b = dispersive_reduced_a(&lab, t).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-12);
    }

    /// Halving dt halves the projector jump between neighbouring samples.
    #[test]
    fn projectors_vary_continuously((p, c) in qubit_params(), t in 0.1..1.4f64) {
        // Keep the spectral gap open: |2p - 1| >= 0.2.
        let p = if (p - 0.5).abs() < 0.1 { p - 0.3 } else { p };
        let c = c * 0.5;
        let params = DispersiveParams { p, c, frame: Frame::Lab, ..Default::default() };
        let jump = |dt: f64| {
            let a = spectral_decompose(&dispersive_reduced_a(&params, t).unwrap());
            let b = match_branches(&a, &spectral_decompose(&dispersive_reduced_a(&params, t + dt).unwrap())).unwrap();
            a.projectors()[0].max_abs_diff(&b.projectors()[0])
        };
        let (j1, j2) = (jump(1e-3), jump(5e-4));
        prop_assert!(j1 < 1e-2);
        prop_assert!(j2 < 0.6 * j1 + 1e-12);
    }
}

/// Accumulated entropy increments vs. the exact entropy difference on a grid
/// of `steps` intervals over `[0, t_max]`.
fn entropy_integration_error(params: &DispersiveParams, t_max: f64, steps: usize) -> f64 {
    let grid = TimeGrid::new(t_max, steps).unwrap();
    let mut prev = spectral_decompose(&dispersive_reduced_a(params, 0.0).unwrap());
    let s0 = prev.entropy();
    let mut total = 0.0;
    for k in 1..grid.len() {
        let next = match_branches(&prev, &spectral_decompose(&dispersive_reduced_a(params, grid.time(k)).unwrap())).unwrap();
        total += entropy_rate(&prev, &next, grid.dt()).unwrap() * grid.dt();
        prev = next;
    }
    (total - (prev.entropy() - s0)).abs()
}

#[test]
fn entropy_integration_is_second_order() {
    for (p, c) in [(0.5, 0.5), (0.3, 0.35), (0.6, 0.2)] {
        let params = DispersiveParams { p, c: C64::new(c, 0.0), ..Default::default() };
        let e1 = entropy_integration_error(&params, 1.2, 400);
        let e2 = entropy_integration_error(&params, 1.2, 800);
        assert!(e2 < e1 / 3.5, "p={p} c={c}: {e1:e} -> {e2:e}");
    }
}
