use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use super::{CrbMatrix, FisherMatrix, NoiseModel, Target};
use crate::channels::steering;
use crate::error::{JrcError, Result};
use crate::waveforms::SampledWaveform;

/// Largest L·N the dense Fisher path accepts by default.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

const MAX_CONDITION: f64 = 1e12;

/// Noise-free radar return.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarReturn {
    /// α·y′ ⊗ a, entry ℓ·N + n.
    pub stacked: Vec<Complex64>,
    /// y′[ℓ] = e^{jωt_ℓ}·Σ_i s_i(t_ℓ − τ).
    pub temporal: Vec<Complex64>,
    pub n_rx: usize,
}

fn check_delay(target: &Target, w: &SampledWaveform) -> Result<()> {
    if !(0.0..w.geometry.t_r).contains(&target.tau) {
        return Err(JrcError::Domain(format!(
            "delay {} s shifts the return outside the grid (needs 0 <= tau < T_R = {} s)",
            target.tau, w.geometry.t_r
        )));
    }
    Ok(())
}

/// Sample the return of `target` on the waveform grid at `n_rx` antennas.
pub fn radar_return_samples(target: &Target, w: &SampledWaveform, n_rx: usize) -> Result<RadarReturn> {
    check_delay(target, w)?;
    let a = steering(target.theta, n_rx)?;
    let temporal: Vec<Complex64> = (0..w.len())
        .map(|l| {
            let t = w.time(l);
            Complex64::from_polar(1.0, target.omega * t) * w.sum_at(t - target.tau)
        })
        .collect();
    let mut stacked = Vec::with_capacity(temporal.len() * n_rx);
    for y in &temporal {
        for av in &a.values {
            stacked.push(target.alpha * y * av);
        }
    }
    Ok(RadarReturn {
        stacked,
        temporal,
        n_rx,
    })
}

enum CovSolver {
    Diagonal(Vec<f64>),
    Dense(Cholesky<Complex64, Dyn>),
}

impl CovSolver {
    fn new(m: &DMatrix<Complex64>, name: &'static str) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(JrcError::NotPositiveDefinite(name));
        }
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
        if diagonal {
            let d: Vec<f64> = (0..n).map(|i| m[(i, i)]).map(|c| c.re).collect();
            if (0..n).any(|i| !(d[i] > 0.0) || m[(i, i)].im != 0.0) {
                return Err(JrcError::NotPositiveDefinite(name));
            }
            return Ok(Self::Diagonal(d));
        }
        m.clone()
            .cholesky()
            .map(Self::Dense)
            .ok_or(JrcError::NotPositiveDefinite(name))
    }

    /// Left-multiply by the inverse.
    fn solve(&self, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match self {
            Self::Diagonal(d) => {
                let mut out = b.clone();
                for (i, mut row) in out.row_iter_mut().enumerate() {
                    row /= Complex64::new(d[i], 0.0);
                }
                out
            }
            Self::Dense(c) => c.solve(b),
        }
    }
}

/// Full Fisher information for one target in Kronecker noise.
pub fn assemble_fim(target: &Target, w: &SampledWaveform, noise: &NoiseModel) -> Result<FisherMatrix> {
    assemble_fim_with_limit(target, w, noise, DEFAULT_DENSE_LIMIT)
}

/// [`assemble_fim`] with an explicit bound on L·N.
pub fn assemble_fim_with_limit(
    target: &Target,
    w: &SampledWaveform,
    noise: &NoiseModel,
    limit: usize,
) -> Result<FisherMatrix> {
    let n = noise.spatial.nrows();
    let l = w.len();
    if l * n > limit {
        return Err(JrcError::DenseLimit { size: l * n, limit });
    }
    if noise.temporal.nrows() != l || noise.temporal.ncols() != l {
        return Err(JrcError::Validation(format!(
            "temporal covariance is {}x{}, waveform has {l} samples",
            noise.temporal.nrows(),
            noise.temporal.ncols()
        )));
    }
    let gamma = CovSolver::new(&noise.temporal, "temporal")?;
    let lambda = CovSolver::new(&noise.spatial, "spatial")?;

    let a = steering(target.theta, n)?;
    let y = radar_return_samples(target, w, n)?.temporal;
    let j = Complex64::new(0.0, 1.0);
    // ∂/∂τ of s(t − τ) is −s′(t − τ).
    let dy_tau: Vec<Complex64> = (0..l)
        .map(|k| {
            let t = w.time(k);
            -Complex64::from_polar(1.0, target.omega * t) * w.sum_derivative_at(t - target.tau)
        })
        .collect();
    let dy_omega: Vec<Complex64> = (0..l).map(|k| j * w.time(k) * y[k]).collect();

    let outer =
        |u: &[Complex64], v: &[Complex64], c: Complex64| DMatrix::from_fn(l, n, |r, k| c * u[r] * v[k]);
    let alpha = target.alpha;
    let derivs = [
        outer(&y, &a.values, Complex64::new(1.0, 0.0)),
        outer(&y, &a.values, j),
        outer(&y, &a.derivative, alpha),
        outer(&dy_tau, &a.values, alpha),
        outer(&dy_omega, &a.values, alpha),
    ];
    // (Γ⁻¹ ⊗ Λ⁻¹) vec(D) = vec(Γ⁻¹ D Λ⁻ᵀ) for row-major time ⊗ space stacking.
    let whitened: Vec<DMatrix<Complex64>> = derivs
        .iter()
        .map(|d| lambda.solve(&gamma.solve(d).transpose()).transpose())
        .collect();

    let mut m = [[0.0; 5]; 5];
    for p in 0..5 {
        for q in p..5 {
            let v: Complex64 = derivs[p]
                .iter()
                .zip(whitened[q].iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            m[p][q] = 2.0 * v.re;
            m[q][p] = m[p][q];
        }
    }
    Ok(FisherMatrix { m })
}

/// Invert a symmetric matrix after scaling it to unit diagonal, refusing
/// when the scaled condition number exceeds the limit.
fn checked_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    if diag.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(JrcError::Singular {
            condition: f64::INFINITY,
        });
    }
    let s: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| s[i] * m[(i, j)] * s[j]);
    let sv = scaled.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(JrcError::Singular { condition });
    }
    let inv = scaled.try_inverse().ok_or(JrcError::Singular { condition })?;
    Ok(DMatrix::from_fn(n, n, |i, j| s[i] * inv[(i, j)] * s[j]))
}

/// Schur-reduce the α block and invert the remaining 3×3.
pub fn reduce_crb(fim: &FisherMatrix) -> Result<CrbMatrix> {
    let f = DMatrix::from_fn(5, 5, |i, j| fim.m[i][j]);
    let f_aa = f.view((0, 0), (2, 2)).into_owned();
    let f_ae = f.view((0, 2), (2, 3)).into_owned();
    let f_ee = f.view((2, 2), (3, 3)).into_owned();
    let reduced = &f_ee - f_ae.transpose() * checked_inverse(&f_aa)? * &f_ae;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let c = checked_inverse(&reduced)?;
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (c[(i, j)] + c[(j, i)]);
        }
    }
    Ok(CrbMatrix { m })
}
