//! Entanglement extracted from fermionic exchange symmetry.
//!
//! Two electron-hole pairs are created in momentum-broadened modes. Their
//! spin correlations are computed twice, once by brute force in a sparse
//! fermionic Fock space ([`fock`]) and once by Wick contraction ([`wick`])
//! reduced to the overlap integrals of [`overlaps`]. The resulting X-shaped
//! two-qubit matrix ([`photon`]) is mapped to photon polarizations and
//! scored with concurrence and negativity ([`measures`]). [`sweep`] drives
//! parameter scans for the command-line front end.

pub mod error;
pub mod fock;
pub mod measures;
pub mod overlaps;
pub mod photon;
pub mod quadrature;
pub mod sweep;
pub mod wick;

pub use error::{Error, Result};
pub use fock::{FockSpace, FockState, Mode, MomentumGrid, PairCreation, Species};
pub use measures::{concurrence, concurrence_x_state, negativity, EntanglementReport};
pub use overlaps::{MomentumProfile, OverlapMethod, OverlapQuad, ProfileFamily};
pub use photon::{Basis, Polarization, SelectionRuleTable, TwoQubitDM};
