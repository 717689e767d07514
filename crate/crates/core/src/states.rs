//! Validated density matrices, their spectral decomposition, and eigenbranch
//! tracking along a trajectory.
//!
//! Eigenobjects are stored as projectors rather than kets so that no global
//! phase gauge leaks into differentials of |psi><psi|.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenSystem, C64};
use crate::tolerance::{self, Tolerances};

/// Two clusters of degenerate projectors are considered to span the same
/// subspace when their sums agree to this max-abs distance.
const SPAN_TOL: f64 = 1e-6;

/// A Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigen: EigenSystem,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues in descending order, as computed during validation.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        validate_density(&ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `[[p, c], [conj(c), 1 - p]]`, the general qubit state with excited
    /// population `p` and coherence `c`.
    pub fn qubit(p: f64, c: C64) -> Result<Self> {
        let m = ComplexMatrix::from_rows(&[[C64::new(p, 0.0), c], [c.conj(), C64::new(1.0 - p, 0.0)]])?;
        validate_density(&m)
    }
}

pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    validate_density_with(m, &Tolerances::default())
}

pub fn validate_density_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    if !matches!(m.dim(), 2 | 4) {
        return Err(Error::UnsupportedDimension(m.dim()));
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(Error::NonHermitian { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > tol.trace {
        return Err(Error::TraceNotOne { trace, deviation: (trace - 1.0).abs() });
    }
    let matrix = m.hermitian_part();
    let eigen = hermitian_eig(&matrix)?;
    let min_eigenvalue = eigen.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol.positivity {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { matrix, eigen })
}

/// `rho = sum_i p_i P_i` with branch labels that persist along a trajectory.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    probabilities: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    branch_ids: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn branch_ids(&self) -> &[usize] {
        &self.branch_ids
    }

    /// Probabilities indexed by branch id rather than by slot.
    pub fn probabilities_by_branch(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (&id, &p) in self.branch_ids.iter().zip(&self.probabilities) {
            out[id] = p;
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (p, proj) in self.probabilities.iter().zip(&self.projectors) {
            out = &out + &proj.scale_real(*p);
        }
        out
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probabilities)
    }
}

/// Diagonalizes `rho`; branch ids follow descending probability.
pub fn spectral_decompose(rho: &DensityMatrix) -> SpectralDecomposition {
    let probabilities = rho.eigen.values.iter().map(|&p| p.clamp(0.0, 1.0)).collect();
    let projectors = rho.eigen.vectors.iter().map(|v| ComplexMatrix::projector(v)).collect();
    SpectralDecomposition { probabilities, projectors, branch_ids: (0..rho.dim()).collect() }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

pub fn match_branches(prev: &SpectralDecomposition, next: &SpectralDecomposition) -> Result<SpectralDecomposition> {
    match_branches_with(prev, next, tolerance::DEGENERACY)
}

/// Relabels `next` so that each of `prev`'s branches continues into the
/// eigenprojector it overlaps most with (maximizing the summed overlap).
///
/// Inside a degenerate cluster of `next` the eigenbasis is arbitrary, so the
/// cluster keeps `prev`'s projectors as long as both span the same subspace.
pub fn match_branches_with(
    prev: &SpectralDecomposition,
    next: &SpectralDecomposition,
    degeneracy: f64,
) -> Result<SpectralDecomposition> {
    let n = prev.dim();
    if next.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: next.dim() });
    }

    let overlap: Vec<Vec<f64>> = prev
        .projectors
        .iter()
        .map(|a| next.projectors.iter().map(|b| a.trace_product(b).map(|z| z.re).unwrap_or(0.0)).collect())
        .collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in permutations(n) {
        let score: f64 = perm.iter().enumerate().map(|(i, &j)| overlap[i][j]).sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s + 1e-15) {
            best = Some((score, perm));
        }
    }
    let (_, perm) = best.expect("at least one permutation");

    let mut out = SpectralDecomposition {
        probabilities: perm.iter().map(|&j| next.probabilities[j]).collect(),
        projectors: perm.iter().map(|&j| next.projectors[j].clone()).collect(),
        branch_ids: prev.branch_ids.clone(),
    };

    for cluster in degenerate_clusters(&out.probabilities, degeneracy) {
        let sum = |ps: &[ComplexMatrix]| {
            cluster.iter().fold(ComplexMatrix::zeros(n), |acc, &i| &acc + &ps[i])
        };
        if sum(&prev.projectors).max_abs_diff(&sum(&out.projectors)) < SPAN_TOL {
            for &i in &cluster {
                out.projectors[i] = prev.projectors[i].clone();
            }
        }
    }
    Ok(out)
}

/// Groups of slot indices (size >= 2) whose probabilities chain together
/// within `gap`.
fn degenerate_clusters(probabilities: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    order.sort_by(|&a, &b| probabilities[a].total_cmp(&probabilities[b]));
    let mut clusters = Vec::new();
    let mut current = vec![order[0]];
    for w in order.windows(2) {
        if probabilities[w[1]] - probabilities[w[0]] < gap {
            current.push(w[1]);
        } else {
            if current.len() > 1 {
                clusters.push(std::mem::take(&mut current));
            }
            current = vec![w[1]];
        }
    }
    if current.len() > 1 {
        clusters.push(current);
    }
    clusters
}

/// Caller-owned accumulator that keeps branch labels continuous across a
/// sequence of states.
#[derive(Debug, Clone)]
pub struct BranchTracker {
    previous: Option<SpectralDecomposition>,
    degeneracy: f64,
}

impl Default for BranchTracker {
    fn default() -> Self {
        Self::new(tolerance::DEGENERACY)
    }
}

impl BranchTracker {
    pub fn new(degeneracy: f64) -> Self {
        BranchTracker { previous: None, degeneracy }
    }

    pub fn observe(&mut self, rho: &DensityMatrix) -> Result<SpectralDecomposition> {
        let fresh = spectral_decompose(rho);
        let decomposition = match &self.previous {
            None => fresh,
            Some(prev) => match_branches_with(prev, &fresh, self.degeneracy)?,
        };
        self.previous = Some(decomposition.clone());
        Ok(decomposition)
    }
}

/// `-sum p ln p` in nats, with `0 ln 0 = 0`.
pub fn entropy_of(probabilities: &[f64]) -> f64 {
    let s: f64 = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let probs: Vec<f64> = rho.eigen.values.iter().map(|&p| p.clamp(0.0, 1.0)).collect();
    entropy_of(&probs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub r: f64,
}

impl BlochVector {
    /// Closed-form eigenvalues `(1 + r)/2`, `(1 - r)/2`.
    pub fn eigenvalues(&self) -> [f64; 2] {
        [0.5 * (1.0 + self.r), 0.5 * (1.0 - self.r)]
    }
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
    }
    let m = rho.matrix();
    let coherence = m[(0, 1)];
    let x = 2.0 * coherence.re;
    let y = -2.0 * coherence.im;
    let z = m[(0, 0)].re - m[(1, 1)].re;
    Ok(BlochVector { x, y, z, r: (x * x + y * y + z * z).sqrt() })
}
