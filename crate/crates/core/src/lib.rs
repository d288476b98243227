//! Quantum-jump simulation of coherent probe scattering from bosons on a
//! one-dimensional lattice, including the measurement backaction of both
//! scattering and non-scattering detection events.
//!
//! The crate is organised around the stages of the simulation:
//!
//! * [`fock`] — bosonic number basis over `M` sites and `N` atoms, plus the
//!   pair-correlation equivalence structure that groups basis states with
//!   identical scattering patterns.
//! * [`hamiltonian`] — sparse Bose-Hubbard Hamiltonian, ground states and
//!   unitary evolution between detection events.
//! * [`scattering`] — angular detection density, non-scattering amplitudes
//!   and the two measurement projections.
//! * [`jump`] — a single stochastic trajectory: sample, project, normalize,
//!   evolve.
//! * [`ensemble`] — many independent trajectories, histogram aggregation and
//!   the reconstruction / scaling / evolution-degradation studies.
//!
//! The crate is `no_std` + `alloc`; the default `std` feature only adds the
//! multi-threaded ensemble runner. All floating-point special functions go
//! through `libm`, so results are bit-reproducible across platforms.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod ensemble;
pub mod fock;
pub mod hamiltonian;
pub mod jump;
pub mod linalg;
pub mod scattering;
pub mod stats;

pub use fock::{EquivalenceClasses, FockBasis, OccupationVector, PairCorrelationSignature};
pub use hamiltonian::{BoseHubbardParams, HamiltonianOperator, ManyBodyState, Propagator};
pub use jump::{EventKind, EventRecord, Trajectory, TrajectoryConfig};
pub use scattering::{ScatteringConfig, ScatteringKernel};
