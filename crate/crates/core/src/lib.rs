//! Driven two-mode gain/loss bosonic Hamiltonians on truncated Fock spaces:
//! symmetry certification by explicit antiunitary conjugation, analytic and
//! numeric spectra, symmetry-breaking classification, and exceptional-point
//! localization.
//!
//! The crate is organised around six pieces:
//!
//! * [`fock`] — the truncated Fock space and dense operator algebra;
//! * [`hamiltonian`] — declarative term lists and the `H1`/`H2`/`H3` builders;
//! * [`symmetry`] — parity/rotation/exchange operators and antiunitary
//!   certification;
//! * [`spectrum`] — eigendecomposition, classification, analytic levels,
//!   exceptional points, and the splitting law;
//! * [`diag`] — the bosonic-algebra diagonalisation used as an independent
//!   oracle;
//! * [`sweep`] — parameter sweeps with deterministic CSV/JSON emission.
//!
//! All values are immutable after construction and operations are pure, so
//! everything can be shared read-only across parallel workers.

pub mod diag;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod spectrum;
pub mod sweep;
pub mod symmetry;

pub use error::{Error, Result};
pub use fock::{FockSpace, Operator};
pub use hamiltonian::{
    assemble, build_h1, build_h2, build_h3, build_table_term, HamiltonianSpec, TableKind, Term,
};
pub use spectrum::{
    analytic_spectrum, classify_spectrum, coalescence_measure, eigenspectrum, locate_ep,
    splitting_law, AnalyticSpectrum, Classification, CoalescenceMetrics, EpResult, SpectrumReport,
    Splitting,
};
pub use sweep::{
    emit, load_config, preset_fig2, preset_fig3, run_sweep, OutputFormat, SweepConfig,
    SweepOutcome, SweepRow,
};
pub use symmetry::{
    classify_state_symmetry, exchange_op, find_rt_angle, is_symmetric, parity_op, rotation_op,
    wrap_angle, AntiunitarySpec, Certification, RtAngle, StateSymmetry,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
