//! Simulation kernels for a quantum-injected optical parametric amplifier
//! macro-qubit interacting with a Bragg-structured Bose-Einstein condensate
//! mirror.
//!
//! The crate is organized around four independent layers:
//!
//! * [`opa`] — exact Fock-space series and closed forms for the amplified
//!   macro-qubit: amplitudes, photon-number statistics, interference fringes,
//!   and the heralding map induced by the micro-macro singlet.
//! * [`bragg`] — classical quarter-wave-stack model of the patterned
//!   condensate: two-level-atom index contrast, exact stack reflectivity,
//!   spectra over detuning, and active-photon bookkeeping.
//! * [`carl`] — split-step spectral integrator for the one-dimensional
//!   condensate wavefunction coupled to the self-consistent reflected-field
//!   amplitude, plus momentum-space observables and recoil constants.
//! * [`recoil`] — discrete bookkeeping of the measurement geometry: macrostate
//!   splitting, mirror interaction, momentum-peak transfer, and the
//!   outcome-correlation table.
//!
//! All operations are pure functions of their inputs; no global state, no
//! randomness. Results are deterministic across runs.

pub mod bragg;
pub mod carl;
pub mod constants;
pub mod opa;
pub mod recoil;

pub use bragg::{AtomSpecies, BraggStack, EpsilonVariant, ReflectivitySpectrum};
pub use carl::{CarlParams, CondensateField, EvolutionMode, EvolutionTrace, GridSpec};
pub use opa::{Basis, FockAmplitudeTable, FringeCurve, MacrostateLabel, OpaParams};
pub use recoil::{MomentumPeakModel, PolarizationMacrostate, RecoilDirection, ScenarioOutcome};
