//! Discretized field–reservoir phase space on a periodic 1D box.
//!
//! The electromagnetic field (one transverse scalar polarization) is placed
//! on a grid of sites; at every lossy site a frequency-discretized harmonic
//! reservoir is attached, one oscillator per bath node, with couplings set by
//! the local absorption. The resulting quadratic Hamiltonian H = ½ zᵀMz is
//! diagonalized symplectically, and the module certifies the operator-level
//! claims of the quantization: the polariton map is bosonic, the macroscopic
//! Ampère–Maxwell relation holds between the spectral field operators, and a
//! material-only mode family fails to span the normal-mode space whenever the
//! absorber does not fill all of space.

mod ampere;
mod defect;
mod diag;
mod model;
mod polariton;

pub use ampere::maxwell_ampere_check;
pub use defect::lnf_defect;
pub use diag::{diagonalize, BogoliubovModes};
pub use model::{build_model, BathSpec, PhaseSpaceModel};
pub use polariton::{
    bosonicity_check, bracket_ann, bracket_cross, polariton_vectors, PolaritonEntry,
    PolaritonKind, PolaritonVectors,
};
