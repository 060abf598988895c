//! Multi-level systems driven through an avoided crossing.
//!
//! A system is a pair of Hermitian operators with `H(eps) = H0 + eps D`. Its
//! static spectrum versus `eps` shows avoided crossings (ACs). Near an
//! isolated AC the two levels involved form a two-level system with gap
//! `delta_M` centered at `eps_c`, so driving with
//! `eps(t) = eps_c + A cos(omega t)` at `omega = delta_M` puts the two-level
//! results to work. The remaining levels (spectators) perturb this picture,
//! increasingly so at high drive frequency.

mod drive;
mod spectrum;
mod system;

pub use drive::{
    driven_dynamics, floquet_sweep_multilevel, multilevel_sweep_options, AcFrame, InitialState, MultilevelSweep,
    PopulationBasis, PopulationTraces, MIN_PAIR_WEIGHT,
};
pub use spectrum::{find_acs, refine_ac, static_spectrum, ACDescriptor, SpectrumTable};
pub use system::{synthetic_ac, LoadError, MultiLevelSystem, Spectator, SyntheticAcSpec, INGEST_HERMITIAN_TOL};
