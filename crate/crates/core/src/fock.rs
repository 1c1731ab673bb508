//! Sparse second-quantized simulator for electrons and holes on a momentum
//! grid.
//!
//! Modes are totally ordered by (species, spin, k-index); a creation or
//! annihilation operator acting on mode `m` picks up `(-1)^n` where `n` is
//! the number of occupied modes preceding `m` in that order. States are
//! stored as maps from occupation patterns to complex amplitudes, so only
//! the populated few-particle sectors cost memory.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::overlaps::{MomentumProfile, PairProfiles};
use crate::photon::{Basis, TwoQubitDM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    Electron,
    Hole,
}

/// A single fermionic orbital. Field order gives the mode ordering used for
/// signs: species first, then spin, then grid index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub species: Species,
    pub spin: u8,
    pub k_index: usize,
}

impl Mode {
    pub fn new(species: Species, spin: u8, k_index: usize) -> Self {
        assert!(spin < 2, "logical spin is a bit");
        Mode {
            species,
            spin,
            k_index,
        }
    }

    pub fn electron(spin: u8, k_index: usize) -> Self {
        Mode::new(Species::Electron, spin, k_index)
    }

    pub fn hole(spin: u8, k_index: usize) -> Self {
        Mode::new(Species::Hole, spin, k_index)
    }
}

/// Uniformly spaced momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    start: f64,
    spacing: f64,
    len: usize,
}

impl MomentumGrid {
    pub fn new(start: f64, spacing: f64, len: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite() && start.is_finite()) {
            return Err(Error::InvalidGrid(format!("start {start}, spacing {spacing}")));
        }
        if len == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Ok(MomentumGrid {
            start,
            spacing,
            len,
        })
    }

    /// `len` points from `-span` to `+span` inclusive, symmetric about zero.
    pub fn symmetric(span: f64, len: usize) -> Result<Self> {
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::InvalidGrid(format!("span must be positive, got {span}")));
        }
        if len < 2 {
            return Err(Error::InvalidGrid("symmetric grid needs at least two points".into()));
        }
        MomentumGrid::new(-span, 2.0 * span / (len - 1) as f64, len)
    }

    /// Span of twenty widths beyond the outermost centre, 1001 points.
    pub fn default_for(profiles: &PairProfiles) -> Result<Self> {
        let all = profiles.electron.iter().chain(&profiles.hole);
        let width = all.clone().map(|p| p.width()).fold(0.0, f64::max);
        let reach = all.map(|p| p.center().abs()).fold(0.0, f64::max);
        MomentumGrid::symmetric(20.0 * width + reach, 1001)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.spacing * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// Index of the point `-k_i`, when the grid is symmetric about zero.
    pub fn mirror(&self, i: usize) -> Option<usize> {
        let j = self.len.checked_sub(1)?.checked_sub(i)?;
        let tol = 1e-9 * self.spacing;
        ((self.point(i) + self.point(j)).abs() <= tol).then_some(j)
    }
}

/// Occupied mode ordinals in increasing order; the sparse form of an
/// occupation bitstring.
pub type Occupation = SmallVec<[u32; 4]>;

type Terms = HashMap<Occupation, Complex64, BuildHasherDefault<DefaultHasher>>;

/// Sparse superposition of occupation patterns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockState {
    terms: Terms,
}

impl FockState {
    pub fn vacuum() -> Self {
        let mut terms = Terms::default();
        terms.insert(Occupation::new(), Complex64::new(1.0, 0.0));
        FockState { terms }
    }

    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Occupation, Complex64)>>(terms: I) -> Self {
        let mut state = FockState::zero();
        for (occ, amp) in terms {
            debug_assert!(occ.windows(2).all(|w| w[0] < w[1]), "occupation must be sorted");
            *state.terms.entry(occ).or_default() += amp;
        }
        state.prune();
        state
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        acc
    }

    pub fn scaled(&self, c: Complex64) -> FockState {
        FockState::from_terms(self.terms.iter().map(|(o, a)| (o.clone(), a * c)))
    }

    pub fn add(&self, other: &FockState) -> FockState {
        let mut out = self.clone();
        for (occ, a) in &other.terms {
            *out.terms.entry(occ.clone()).or_default() += a;
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
    }
}

/// Mode space over a momentum grid: two species, two spins, `grid.len()`
/// momenta each.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    grid: MomentumGrid,
}

impl FockSpace {
    pub fn new(grid: MomentumGrid) -> Self {
        FockSpace { grid }
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn mode_count(&self) -> usize {
        4 * self.grid.len()
    }

    /// Position of `mode` in the (species, spin, k-index) order.
    pub fn ordinal(&self, mode: Mode) -> Result<u32> {
        let n = self.grid.len();
        if mode.k_index >= n {
            return Err(Error::GridBounds {
                index: mode.k_index,
                len: n,
            });
        }
        let species = match mode.species {
            Species::Electron => 0,
            Species::Hole => 1,
        };
        let ord = (species * 2 + mode.spin as usize) * n + mode.k_index;
        u32::try_from(ord).map_err(|_| Error::InvalidGrid(format!("{n} grid points overflow mode index")))
    }

    pub fn mode_at(&self, ordinal: u32) -> Mode {
        let n = self.grid.len();
        let ord = ordinal as usize;
        let block = ord / n;
        let species = if block < 2 { Species::Electron } else { Species::Hole };
        Mode::new(species, (block % 2) as u8, ord % n)
    }

    pub fn basis_state(&self, modes: &[Mode]) -> Result<FockState> {
        let mut state = FockState::vacuum();
        for &m in modes.iter().rev() {
            state = self.apply_creation(&state, m)?;
        }
        Ok(state)
    }

    pub fn apply_creation(&self, state: &FockState, mode: Mode) -> Result<FockState> {
        self.apply_smeared_creation(state, &[(mode, Complex64::new(1.0, 0.0))])
    }

    pub fn apply_annihilation(&self, state: &FockState, mode: Mode) -> Result<FockState> {
        let ord = self.ordinal(mode)?;
        let mut out = Terms::default();
        for (occ, amp) in &state.terms {
            let Ok(pos) = occ.binary_search(&ord) else {
                continue;
            };
            let mut next = occ.clone();
            next.remove(pos);
            *out.entry(next).or_default() += parity(pos) * amp;
        }
        let mut out = FockState { terms: out };
        out.prune();
        Ok(out)
    }

    /// Apply `Σ w_j a†_{m_j}` in one pass.
    pub fn apply_smeared_creation(&self, state: &FockState, weighted: &[(Mode, Complex64)]) -> Result<FockState> {
        let ords = weighted
            .iter()
            .map(|(m, w)| Ok((self.ordinal(*m)?, *w)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Terms::default();
        out.reserve(state.len().saturating_mul(ords.len()));
        for (occ, amp) in &state.terms {
            for &(ord, w) in &ords {
                let Err(pos) = occ.binary_search(&ord) else {
                    continue; // occupied: Pauli exclusion
                };
                let mut next = occ.clone();
                next.insert(pos, ord);
                *out.entry(next).or_default() += parity(pos) * w * amp;
            }
        }
        let mut out = FockState { terms: out };
        out.prune();
        Ok(out)
    }
}

fn parity(preceding: usize) -> f64 {
    if preceding % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_j w_j a†(species, spin, k_j)`: one broadened creation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SmearedCreation {
    terms: Vec<(Mode, Complex64)>,
}

impl SmearedCreation {
    /// Continuum `∫ f(q - center) c†(q) dq` on the grid. With
    /// `{c(q), c†(q')} = δ(q - q')` a grid operator is `c(q_j) = a_j/√Δ`, so
    /// each mode carries `f(q_j - center)·√Δ`.
    pub fn from_profile(species: Species, spin: u8, profile: &MomentumProfile, grid: &MomentumGrid) -> Result<Self> {
        let root = grid.spacing().sqrt();
        let mut terms = Vec::with_capacity(grid.len());
        for (j, q) in grid.points().enumerate() {
            let f = match profile.table() {
                // tables vanish outside their sampled range
                Some(_) => profile.eval(q).unwrap_or(0.0),
                None => profile.eval(q)?,
            };
            let w = f * root;
            if w != 0.0 {
                terms.push((Mode::new(species, spin, j), Complex64::new(w, 0.0)));
            }
        }
        if terms.is_empty() {
            return Err(Error::DegenerateProfile);
        }
        Ok(SmearedCreation { terms })
    }

    pub fn from_weights(terms: Vec<(Mode, Complex64)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|(_, w)| *w != Complex64::new(0.0, 0.0)).collect();
        if terms.is_empty() {
            return Err(Error::DegenerateProfile);
        }
        Ok(SmearedCreation { terms })
    }

    pub fn terms(&self) -> &[(Mode, Complex64)] {
        &self.terms
    }

    pub fn apply(&self, space: &FockSpace, state: &FockState) -> Result<FockState> {
        space.apply_smeared_creation(state, &self.terms)
    }
}

/// Broadened pair creation `Ψ†_ss = E†_s H†_s`: an electron and a hole of
/// equal logical spin, each spread over the grid by its profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCreation {
    pub electron: SmearedCreation,
    pub hole: SmearedCreation,
}

impl PairCreation {
    /// Sharp pair `e†_s(k_i) h†_s(-k_i)`; the hole sits on the mirrored grid
    /// point.
    pub fn sharp(spin: u8, k_index: usize, grid: &MomentumGrid) -> Result<Self> {
        if k_index >= grid.len() {
            return Err(Error::GridBounds {
                index: k_index,
                len: grid.len(),
            });
        }
        let mirrored = grid
            .mirror(k_index)
            .ok_or_else(|| Error::InvalidGrid("grid is not symmetric about zero".into()))?;
        let one = Complex64::new(1.0, 0.0);
        Ok(PairCreation {
            electron: SmearedCreation::from_weights(vec![(Mode::electron(spin, k_index), one)])?,
            hole: SmearedCreation::from_weights(vec![(Mode::hole(spin, mirrored), one)])?,
        })
    }

    /// Apply `E† H†` to `state` (hole first, as the operator product acts).
    pub fn apply(&self, space: &FockSpace, state: &FockState) -> Result<FockState> {
        let with_hole = self.hole.apply(space, state)?;
        self.electron.apply(space, &with_hole)
    }
}

/// Discretized broadened pair creation. `profile_h` is centred on the hole
/// momentum, which is `-k` for an electron centred on `k`.
pub fn discretized_pair_creation(
    profile_e: &MomentumProfile,
    profile_h: &MomentumProfile,
    spin: u8,
    grid: &MomentumGrid,
) -> Result<PairCreation> {
    Ok(PairCreation {
        electron: SmearedCreation::from_profile(Species::Electron, spin, profile_e, grid)?,
        hole: SmearedCreation::from_profile(Species::Hole, spin, profile_h, grid)?,
    })
}

fn pair_ops(profiles: &PairProfiles, grid: &MomentumGrid) -> Result<[[PairCreation; 2]; 2]> {
    // indexed [spin][0 = centre k, 1 = centre k']
    let build = |spin: u8, which: usize| {
        discretized_pair_creation(&profiles.electron[which], &profiles.hole[which], spin, grid)
    };
    Ok([[build(0, 0)?, build(0, 1)?], [build(1, 0)?, build(1, 1)?]])
}

/// Two-pair correlation matrix evaluated literally in the full Fock space:
/// entry `(2r + r', 2s + s')` is `⟨0|Ψ_r(k) Ψ_r'(k') Ψ†_s(k) Ψ†_s'(k')|0⟩`.
///
/// Four-particle states carry `len⁴` terms, so this is only practical on
/// small grids; [`oracle_density_matrix`] factorizes by species instead.
pub fn oracle_density_matrix_full(profiles: &PairProfiles, grid: &MomentumGrid) -> Result<TwoQubitDM> {
    let space = FockSpace::new(grid.clone());
    let ops = pair_ops(profiles, grid)?;
    let vac = FockState::vacuum();
    let mut kets = Vec::with_capacity(4);
    let mut bras = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            // Ψ†_a(k) Ψ†_b(k')|0⟩
            let inner = ops[b][1].apply(&space, &vac)?;
            kets.push(ops[a][0].apply(&space, &inner)?);
            // (⟨0|Ψ_a(k) Ψ_b(k'))† = Ψ†_b(k') Ψ†_a(k)|0⟩
            let inner = ops[a][0].apply(&space, &vac)?;
            bras.push(ops[b][1].apply(&space, &inner)?);
        }
    }
    let mut m = Matrix4::zeros();
    for row in 0..4 {
        for col in 0..4 {
            m[(row, col)] = bras[row].inner(&kets[col]);
        }
    }
    Ok(TwoQubitDM::unnormalized(m, Basis::Spin))
}

/// Species-factorized two-pair correlation matrix.
///
/// With every electron mode ordered before every hole mode,
/// `E†_s H†_s E†_s' H†_s' = -(E†_s E†_s')(H†_s H†_s')`. The same sign appears
/// on bra and ket, so each entry is the product of an electron and a hole
/// two-particle amplitude, each with only `len²` terms. Matches
/// [`oracle_density_matrix_full`] exactly on small grids.
pub fn oracle_density_matrix(profiles: &PairProfiles, grid: &MomentumGrid) -> Result<TwoQubitDM> {
    let space = FockSpace::new(grid.clone());
    let ops = pair_ops(profiles, grid)?;
    let electron = species_block(&space, |spin, which| &ops[spin][which].electron)?;
    let hole = species_block(&space, |spin, which| &ops[spin][which].hole)?;
    let m = electron.component_mul(&hole);
    Ok(TwoQubitDM::unnormalized(m, Basis::Spin))
}

fn species_block<'a, F>(space: &FockSpace, op: F) -> Result<Matrix4<Complex64>>
where
    F: Fn(usize, usize) -> &'a SmearedCreation + Sync,
{
    let vac = FockState::vacuum();
    let single: Vec<Vec<FockState>> = (0..2)
        .map(|spin| (0..2).map(|which| op(spin, which).apply(space, &vac)).collect())
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).collect();
    // c†_a(k) c†_b(k')|0⟩ and the bra states c†_b(k') c†_a(k)|0⟩
    let kets = pairs
        .par_iter()
        .map(|&(a, b)| op(a, 0).apply(space, &single[b][1]))
        .collect::<Result<Vec<_>>>()?;
    let bras = pairs
        .par_iter()
        .map(|&(a, b)| op(b, 1).apply(space, &single[a][0]))
        .collect::<Result<Vec<_>>>()?;

    let entries: Vec<Complex64> = (0..16)
        .into_par_iter()
        .map(|idx| bras[idx / 4].inner(&kets[idx % 4]))
        .collect();
    Ok(Matrix4::from_row_slice(&entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlaps::ProfileShape;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(MomentumGrid::symmetric(1.0, n).unwrap())
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn creation_on_vacuum() {
        let sp = space(3);
        let m = Mode::electron(1, 2);
        let s = sp.apply_creation(&FockState::vacuum(), m).unwrap();
        assert_eq!(s.len(), 1);
        let ord = sp.ordinal(m).unwrap();
        assert_eq!(s.amplitude(&[ord]), one());
    }

    #[test]
    fn pauli_exclusion() {
        let sp = space(3);
        let m = Mode::hole(0, 1);
        let s = sp.apply_creation(&FockState::vacuum(), m).unwrap();
        assert!(sp.apply_creation(&s, m).unwrap().is_zero());
    }

    #[test]
    fn creation_sign_follows_mode_order() {
        let sp = space(3);
        let m0 = Mode::electron(0, 0);
        let m1 = Mode::electron(0, 1);
        let m2 = Mode::hole(0, 0);
        assert!(m0 < m1 && m1 < m2);
        let s1 = sp.apply_creation(&FockState::vacuum(), m1).unwrap();
        let (o0, o1, o2) = (sp.ordinal(m0).unwrap(), sp.ordinal(m1).unwrap(), sp.ordinal(m2).unwrap());
        let lower = sp.apply_creation(&s1, m0).unwrap();
        assert_eq!(lower.amplitude(&[o0, o1]), one());
        let upper = sp.apply_creation(&s1, m2).unwrap();
        assert_eq!(upper.amplitude(&[o1, o2]), -one());

        // ⟨0|a₂ a₁ a†₁ a†₂|0⟩ = +1
        let ket = sp.apply_creation(&sp.apply_creation(&FockState::vacuum(), m2).unwrap(), m1).unwrap();
        let back = sp.apply_annihilation(&sp.apply_annihilation(&ket, m1).unwrap(), m2).unwrap();
        assert_eq!(FockState::vacuum().inner(&back), one());
    }

    #[test]
    fn annihilation_basics() {
        let sp = space(2);
        let m = Mode::electron(0, 1);
        assert!(sp.apply_annihilation(&FockState::vacuum(), m).unwrap().is_zero());
        let s = sp.apply_creation(&FockState::vacuum(), m).unwrap();
        assert_eq!(sp.apply_annihilation(&s, m).unwrap(), FockState::vacuum());
    }

    #[test]
    fn single_particle_contractions_are_kronecker() {
        // 4-mode system: one grid point, two species, two spins
        let sp = FockSpace::new(MomentumGrid::new(0.0, 1.0, 1).unwrap());
        let modes: Vec<Mode> = (0..4).map(|o| sp.mode_at(o)).collect();
        for &r in &modes {
            for &s in &modes {
                let ket = sp.apply_creation(&FockState::vacuum(), s).unwrap();
                let v = FockState::vacuum().inner(&sp.apply_annihilation(&ket, r).unwrap());
                let want = if r == s { 1.0 } else { 0.0 };
                assert_eq!(v, Complex64::new(want, 0.0), "{r:?} {s:?}");
            }
        }
    }

    #[test]
    fn out_of_grid_mode() {
        let sp = space(3);
        let err = sp.apply_creation(&FockState::vacuum(), Mode::electron(0, 3)).unwrap_err();
        assert!(matches!(err, Error::GridBounds { index: 3, len: 3 }));
        assert!(sp.apply_annihilation(&FockState::vacuum(), Mode::hole(1, 9)).is_err());
    }

    #[test]
    fn ordinals_roundtrip() {
        let sp = space(5);
        for o in 0..sp.mode_count() as u32 {
            assert_eq!(sp.ordinal(sp.mode_at(o)).unwrap(), o);
        }
    }

    #[test]
    fn grid_mirror() {
        let g = MomentumGrid::symmetric(40.0, 1001).unwrap();
        assert!((g.spacing() - 0.08).abs() < 1e-15);
        assert_eq!(g.mirror(0), Some(1000));
        assert_eq!(g.mirror(500), Some(500));
        let off = MomentumGrid::new(0.0, 1.0, 3).unwrap();
        assert_eq!(off.mirror(0), None);
    }

    #[test]
    fn sharp_pair_is_single_term() {
        let g = MomentumGrid::symmetric(2.0, 5).unwrap();
        let sp = FockSpace::new(g.clone());
        let pair = PairCreation::sharp(1, 1, &g).unwrap();
        let s = pair.apply(&sp, &FockState::vacuum()).unwrap();
        let e = sp.ordinal(Mode::electron(1, 1)).unwrap();
        let h = sp.ordinal(Mode::hole(1, 3)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&[e, h]), one());
    }

    #[test]
    fn delta_like_profile_recovers_sharp_pair() {
        let g = MomentumGrid::symmetric(2.0, 5).unwrap();
        let sp = FockSpace::new(g.clone());
        let h = g.spacing();
        // triangle narrower than the grid spacing, peaked on k_1 = -1
        let table = crate::overlaps::ProfileTable::new(vec![-0.5 * h, 0.0, 0.5 * h], vec![0.0, 1.0, 0.0]).unwrap();
        let shape = ProfileShape::tabulated(table).unwrap();
        let k = g.point(1);
        let pair = discretized_pair_creation(&shape.at(k), &shape.at(-k), 0, &g).unwrap();
        let s = pair.apply(&sp, &FockState::vacuum()).unwrap();
        let sharp = PairCreation::sharp(0, 1, &g).unwrap().apply(&sp, &FockState::vacuum()).unwrap();
        assert_eq!(s.len(), 1);
        let scale = s.inner(&sharp);
        assert_eq!(s, sharp.scaled(scale));
        assert!((scale.re - h).abs() < 1e-15);
    }

    #[test]
    fn degenerate_profile_rejected() {
        let g = MomentumGrid::symmetric(1.0, 5).unwrap();
        let table = crate::overlaps::ProfileTable::new(vec![0.0, 0.1], vec![1.0, 1.0]).unwrap();
        let far = ProfileShape::tabulated(table).unwrap().at(100.0);
        let lor = ProfileShape::lorentzian(1.0).unwrap().at(0.0);
        let err = discretized_pair_creation(&far, &lor, 0, &g).unwrap_err();
        assert!(matches!(err, Error::DegenerateProfile));
        assert!(SmearedCreation::from_weights(vec![(Mode::electron(0, 0), Complex64::new(0.0, 0.0))]).is_err());
    }

    #[test]
    fn factorized_oracle_matches_full_fock_space() {
        let g = MomentumGrid::symmetric(6.0, 9).unwrap();
        let shape = ProfileShape::lorentzian(1.5).unwrap();
        for d in [0.0, 1.5, 3.0] {
            let pp = PairProfiles::symmetric(&shape, &shape, d).unwrap();
            let full = oracle_density_matrix_full(&pp, &g).unwrap();
            let fact = oracle_density_matrix(&pp, &g).unwrap();
            let diff = (full.entries() - fact.entries()).map(|z| z.norm()).max();
            let scale = full.entries().map(|z| z.norm()).max();
            assert!(diff <= 1e-12 * scale, "d = {d}: {diff:e}");
        }
    }
}
