//! Concurrence and negativity of two-qubit states.

use nalgebra::{Matrix4, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::overlaps::OverlapQuad;
use crate::photon::{assemble_density_matrix, Basis, TwoQubitDM, PSD_TOL};

/// Eigenvalues of ρ below this are treated as exact zeros.
pub const CLIP_TOL: f64 = 1e-12;

/// `σ_y ⊗ σ_y`, real in the computational basis.
fn spin_flip() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, descending.
///
/// With `ρ = W W†` from the clipped eigendecomposition, these are the
/// singular values of `Wᵀ (σ_y⊗σ_y) W`, so no square root of a noisy
/// eigenvalue is ever taken.
pub fn wootters_spectrum(dm: &TwoQubitDM) -> Result<[f64; 4]> {
    dm.check_state()?;
    let e = dm.entries();
    let herm = (e + e.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut w = eig.eigenvectors;
    for (i, &p) in eig.eigenvalues.iter().enumerate() {
        if p < -PSD_TOL {
            return Err(Error::Domain(format!("state has negative eigenvalue {p:e}")));
        }
        let root = if p <= CLIP_TOL { 0.0 } else { p.sqrt() };
        w.column_mut(i).scale_mut(root);
    }
    let tau = w.transpose() * spin_flip() * w;
    let svd = SVD::new(tau, false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok([s[0], s[1], s[2], s[3]])
}

/// Wootters concurrence `max(0, λ₁ - λ₂ - λ₃ - λ₄)` of a normalized state.
pub fn concurrence(dm: &TwoQubitDM) -> Result<f64> {
    let l = wootters_spectrum(dm)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Closed-form concurrence of the normalized X state assembled from `q`:
/// `max(0, (MM̃ - (L-M)(L̃-M̃)) / ((L-M)(L̃-M̃) + LL̃))`.
pub fn concurrence_x_state(q: &OverlapQuad) -> Result<f64> {
    q.validate()?;
    let outer = (q.l - q.m) * (q.l_tilde - q.m_tilde);
    let inner = q.l * q.l_tilde;
    let coupling = q.m * q.m_tilde;
    let half_trace = outer + inner;
    if !(half_trace > 0.0) {
        return Err(Error::DegenerateState { trace: 2.0 * half_trace });
    }
    Ok(((coupling - outer) / half_trace).max(0.0))
}

/// Concurrence for equal electron and hole ratios `r = M/L = M̃/L̃`.
pub fn concurrence_from_ratio(r: f64) -> f64 {
    ((2.0 * r - 1.0) / ((1.0 - r) * (1.0 - r) + 1.0)).max(0.0)
}

/// Momentum mismatch beyond which equal-width Lorentzian pairs give a
/// separable photon state: `2δ·sqrt(√2 - 1)`.
pub fn lorentzian_threshold(delta: f64) -> f64 {
    2.0 * delta * (2f64.sqrt() - 1.0).sqrt()
}

/// Partial transpose over the second qubit.
pub fn partial_transpose_second(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| {
        let (a, b) = (i >> 1, i & 1);
        let (ap, bp) = (j >> 1, j & 1);
        m[(2 * a + bp, 2 * ap + b)]
    })
}

/// Partial transpose over the first qubit.
pub fn partial_transpose_first(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| {
        let (a, b) = (i >> 1, i & 1);
        let (ap, bp) = (j >> 1, j & 1);
        m[(2 * ap + b, 2 * a + bp)]
    })
}

fn negative_mass(m: Matrix4<Complex64>) -> f64 {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .filter(|&&v| v < 0.0)
        .map(|v| -v)
        .sum()
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_B}`.
pub fn negativity(dm: &TwoQubitDM) -> Result<f64> {
    dm.check_state()?;
    Ok(negative_mass(partial_transpose_second(dm.entries())))
}

/// Same quantity computed from the transpose over the first qubit.
pub fn negativity_first(dm: &TwoQubitDM) -> Result<f64> {
    dm.check_state()?;
    Ok(negative_mass(partial_transpose_first(dm.entries())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub concurrence_x_form: f64,
    pub negativity: f64,
    /// Wootters λ values, descending.
    pub spectrum: [f64; 4],
}

impl EntanglementReport {
    /// Both concurrence routes and the negativity of the normalized state
    /// built from `q`. The photon relabeling is a basis permutation, so the
    /// spin-basis state gives the same numbers.
    pub fn from_quad(q: &OverlapQuad) -> Result<Self> {
        let dm = assemble_density_matrix(q)?.normalize()?;
        Self::from_state(&dm, q)
    }

    pub fn from_state(dm: &TwoQubitDM, q: &OverlapQuad) -> Result<Self> {
        let spectrum = wootters_spectrum(dm)?;
        Ok(EntanglementReport {
            concurrence: (spectrum[0] - spectrum[1] - spectrum[2] - spectrum[3]).max(0.0),
            concurrence_x_form: concurrence_x_state(q)?,
            negativity: negativity(dm)?,
            spectrum,
        })
    }
}

/// `|ψ⟩⟨ψ|` for a normalized two-qubit vector, as a density matrix.
pub fn pure_state(psi: [Complex64; 4], basis: Basis) -> Result<TwoQubitDM> {
    let v = nalgebra::Vector4::from(psi);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateState { trace: 0.0 });
    }
    let v = v / Complex64::new(norm, 0.0);
    TwoQubitDM::normalized(v * v.adjoint(), basis)
}
