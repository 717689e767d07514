//! Hermitian eigensolvers: closed form for 2x2, cyclic complex Jacobi otherwise.
//!
//! Output ordering is by descending eigenvalue. Each eigenvector is scaled so
//! its first non-negligible component is real and positive.

use super::{ComplexMatrix, C64, MAX_DIM};
use crate::error::{Error, Result};
use crate::tolerance;

/// Components smaller than this are skipped when fixing the phase.
const PHASE_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<C64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `sum_i values[i] |v_i><v_i|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (val, v) in self.values.iter().zip(&self.vectors) {
            out = &out + &ComplexMatrix::projector(v).scale_real(*val);
        }
        out
    }

    fn sort_descending(&mut self) {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]));
        self.values = order.iter().map(|&i| self.values[i]).collect();
        self.vectors = order.iter().map(|&i| self.vectors[i].clone()).collect();
    }

    fn fix_phases(&mut self) {
        for v in &mut self.vectors {
            if let Some(lead) = v.iter().copied().find(|z| z.norm() > PHASE_EPS) {
                let phase = lead.conj() / lead.norm();
                for z in v.iter_mut() {
                    *z *= phase;
                }
            }
        }
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation > tolerance::HERMITIAN {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
pub fn hermitian_eig_2x2(m: &ComplexMatrix) -> Result<EigenSystem> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: m.dim() });
    }
    check_hermitian(m)?;

    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let radius = half_diff.hypot(b.norm());

    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    if 2.0 * radius < tolerance::DEGENERACY {
        return Ok(EigenSystem {
            values: vec![mean + radius, mean - radius],
            vectors: vec![vec![one, zero], vec![zero, one]],
        });
    }

    // Two equivalent null vectors of (m - lambda_max); take the better conditioned one.
    let mut top = if half_diff >= 0.0 {
        vec![C64::new(radius + half_diff, 0.0), b.conj()]
    } else {
        vec![b, C64::new(radius - half_diff, 0.0)]
    };
    normalize(&mut top);
    let bottom = vec![-top[1].conj(), top[0].conj()];

    let mut sys = EigenSystem { values: vec![mean + radius, mean - radius], vectors: vec![top, bottom] };
    sys.fix_phases();
    Ok(sys)
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix of any supported size.
pub fn hermitian_eig_jacobi(m: &ComplexMatrix) -> Result<EigenSystem> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    check_hermitian(m)?;

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..tolerance::JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > threshold {
            return Err(Error::NoConvergence { sweeps: tolerance::JACOBI_MAX_SWEEPS, off_norm: off });
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    let vectors = (0..n).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    let mut sys = EigenSystem { values, vectors };
    sys.sort_descending();
    sys.fix_phases();
    Ok(sys)
}

/// One Jacobi rotation annihilating `a[p][q]`: `a <- u^dagger a u`, `v <- v u`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / magnitude;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * magnitude);
    let t = if theta >= 0.0 {
        1.0 / (theta + theta.hypot(1.0))
    } else {
        -1.0 / (-theta + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

pub fn hermitian_eig_4x4(m: &ComplexMatrix) -> Result<EigenSystem> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: m.dim() });
    }
    hermitian_eig_jacobi(m)
}

/// Closed form for qubits, Jacobi for everything else.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    match m.dim() {
        2 => hermitian_eig_2x2(m),
        _ => hermitian_eig_jacobi(m),
    }
}
