//! Two-qubit spin and polarization density matrices.

use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::overlaps::OverlapQuad;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
/// Traces at or below this, relative to the largest entry magnitude, cannot
/// be normalized. Relative because overlaps shrink like `width⁻²` per pair.
pub const MIN_TRACE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `|s₁ s₂⟩`, logical spins of pair 1 and pair 2.
    Spin,
    /// `|p₁ p₂⟩`, photon polarizations with 0 ↔ σ₋ and 1 ↔ σ₊.
    Photon,
}

impl Basis {
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            Basis::Spin => ["|00>", "|01>", "|10>", "|11>"],
            Basis::Photon => ["|s-s->", "|s-s+>", "|s+s->", "|s+s+>"],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Spin => "spin",
            Basis::Photon => "photon",
        })
    }
}

/// 4×4 Hermitian matrix over a fixed product basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDM {
    entries: Matrix4<Complex64>,
    basis: Basis,
    normalized: bool,
}

impl TwoQubitDM {
    pub fn unnormalized(entries: Matrix4<Complex64>, basis: Basis) -> Self {
        TwoQubitDM {
            entries,
            basis,
            normalized: false,
        }
    }

    /// Wrap a matrix that is already a density matrix; checks Hermiticity,
    /// positivity and unit trace.
    pub fn normalized(entries: Matrix4<Complex64>, basis: Basis) -> Result<Self> {
        let dm = TwoQubitDM {
            entries,
            basis,
            normalized: true,
        };
        dm.check_state()?;
        Ok(dm)
    }

    pub fn from_real_diagonal(diag: [f64; 4], basis: Basis) -> Self {
        let d = Vector4::from_iterator(diag.iter().map(|&x| Complex64::new(x, 0.0)));
        TwoQubitDM::unnormalized(Matrix4::from_diagonal(&d), basis)
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermitian_defect(&self) -> f64 {
        (self.entries - self.entries.adjoint()).map(|z| z.norm()).max()
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Hermitian and positive semidefinite within tolerance.
    pub fn check_physical(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL * self.scale() {
            return Err(Error::Domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL * self.scale() {
            return Err(Error::Domain(format!("matrix is not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(())
    }

    /// A physical, unit-trace state.
    pub fn check_state(&self) -> Result<()> {
        self.check_physical()?;
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain(format!("density matrix has trace {tr}, expected 1")));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        if self.normalized {
            1.0
        } else {
            self.entries.map(|z| z.norm()).max().max(f64::MIN_POSITIVE)
        }
    }

    pub fn normalize(&self) -> Result<TwoQubitDM> {
        let trace = self.trace();
        let scale = self.entries.map(|z| z.norm()).max();
        if !(trace > MIN_TRACE * scale) || scale == 0.0 {
            return Err(Error::DegenerateState { trace });
        }
        Ok(TwoQubitDM {
            entries: self.entries / Complex64::new(trace, 0.0),
            basis: self.basis,
            normalized: true,
        })
    }

    /// Conjugate by a 4×4 unitary.
    pub fn transformed(&self, unitary: &Matrix4<Complex64>) -> TwoQubitDM {
        TwoQubitDM {
            entries: unitary * self.entries * unitary.adjoint(),
            basis: self.basis,
            normalized: self.normalized,
        }
    }

    pub fn to_record(&self) -> MatrixRecord {
        MatrixRecord {
            basis: self.basis,
            labels: self.basis.labels(),
            normalized: self.normalized,
            entries: self.entries.transpose().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Serialized form: row-major `[re, im]` pairs with the basis tag.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixRecord {
    pub basis: Basis,
    pub labels: [&'static str; 4],
    pub normalized: bool,
    pub entries: Vec<[f64; 2]>,
}

/// Unnormalized spin-basis X state
/// `diag((L-M)(L̃-M̃), LL̃, LL̃, (L-M)(L̃-M̃))` with `MM̃` coupling `|01⟩` and
/// `|10⟩`.
pub fn assemble_density_matrix(q: &OverlapQuad) -> Result<TwoQubitDM> {
    q.validate()?;
    let outer = ((q.l - q.m) * (q.l_tilde - q.m_tilde)).max(0.0);
    let inner = q.l * q.l_tilde;
    let coupling = q.m * q.m_tilde;
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = outer.into();
    m[(1, 1)] = inner.into();
    m[(2, 2)] = inner.into();
    m[(3, 3)] = outer.into();
    m[(1, 2)] = coupling.into();
    m[(2, 1)] = coupling.into();
    Ok(TwoQubitDM::unnormalized(m, Basis::Spin))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Polarization {
    SigmaPlus,
    SigmaMinus,
    Forbidden,
}

impl Polarization {
    fn bit(self) -> Option<usize> {
        match self {
            Polarization::SigmaMinus => Some(0),
            Polarization::SigmaPlus => Some(1),
            Polarization::Forbidden => None,
        }
    }
}

/// Physical angular-momentum projections of the logical spin states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCorrespondence {
    pub electron: [f64; 2],
    pub hole: [f64; 2],
}

impl Default for SpinCorrespondence {
    fn default() -> Self {
        SpinCorrespondence {
            electron: [-0.5, 0.5],
            hole: [-1.5, 1.5],
        }
    }
}

/// Which photon an (electron spin, hole spin) pair emits on recombination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionRuleTable {
    rules: [[Polarization; 2]; 2],
    pub spins: SpinCorrespondence,
}

impl Default for SelectionRuleTable {
    /// `(-1/2, -3/2) → σ₋`, `(+1/2, +3/2) → σ₊`, mixed pairs dark.
    fn default() -> Self {
        use Polarization::*;
        SelectionRuleTable {
            rules: [[SigmaMinus, Forbidden], [Forbidden, SigmaPlus]],
            spins: SpinCorrespondence::default(),
        }
    }
}

impl SelectionRuleTable {
    pub fn new(rules: [[Polarization; 2]; 2], spins: SpinCorrespondence) -> Self {
        SelectionRuleTable { rules, spins }
    }

    /// Default table with σ₊ and σ₋ exchanged.
    pub fn swapped() -> Self {
        use Polarization::*;
        SelectionRuleTable {
            rules: [[SigmaPlus, Forbidden], [Forbidden, SigmaMinus]],
            spins: SpinCorrespondence::default(),
        }
    }

    pub fn rule(&self, electron_spin: u8, hole_spin: u8) -> Polarization {
        self.rules[electron_spin as usize][hole_spin as usize]
    }

    /// `(J_z electron, J_z hole)` for a logical spin pair.
    pub fn physical(&self, electron_spin: u8, hole_spin: u8) -> (f64, f64) {
        (
            self.spins.electron[electron_spin as usize],
            self.spins.hole[hole_spin as usize],
        )
    }
}

/// Relabel a spin-basis state into the photon basis. Each pair carries equal
/// electron and hole spin, so spin state `|s₁ s₂⟩` becomes
/// `|rule(s₁,s₁) rule(s₂,s₂)⟩`; entries are permuted, never altered.
pub fn map_to_polarization(dm: &TwoQubitDM, rules: &SelectionRuleTable) -> Result<TwoQubitDM> {
    if dm.basis != Basis::Spin {
        return Err(Error::Domain("map_to_polarization expects a spin-basis matrix".into()));
    }
    let e = &dm.entries;
    let zero = Complex64::new(0.0, 0.0);
    let mut target: [Option<usize>; 4] = [None; 4];
    for (i, slot) in target.iter_mut().enumerate() {
        let supported = (0..4).any(|j| e[(i, j)] != zero || e[(j, i)] != zero);
        if !supported {
            continue;
        }
        let (s1, s2) = ((i >> 1) as u8, (i & 1) as u8);
        let (p1, p2) = (rules.rule(s1, s1), rules.rule(s2, s2));
        match (p1.bit(), p2.bit()) {
            (Some(b1), Some(b2)) => *slot = Some(2 * b1 + b2),
            _ => {
                return Err(Error::SelectionRule(format!(
                    "spin state |{s1}{s2}> is populated but recombines into {p1:?}, {p2:?}"
                )))
            }
        }
    }
    let mut used = [false; 4];
    for t in target.iter().flatten() {
        if std::mem::replace(&mut used[*t], true) {
            return Err(Error::SelectionRule(
                "selection rules send two populated spin states to the same photon state".into(),
            ));
        }
    }
    let mut out = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if let (Some(ti), Some(tj)) = (target[i], target[j]) {
                out[(ti, tj)] = e[(i, j)];
            }
        }
    }
    Ok(TwoQubitDM {
        entries: out,
        basis: Basis::Photon,
        normalized: dm.normalized,
    })
}
