//! Exact, desk-scale multiple recurrence.
//!
//! Everything in the averaging core is computed over [`Rational`]: finite
//! groups given by multiplication tables, probability measures on them,
//! finite measure-preserving systems with commuting actions, the cube and
//! Furstenberg self-couplings, almost-periodic weights and the
//! `mu(A)^4 - eps` lower bound for `mu(A ∩ T1^g A ∩ T1^g T2^g A)`.
//!
//! Two infinite systems are handled exactly as well: Bernoulli shifts through
//! cylinder functions ([`symbolic`]) and circle rotations through rational
//! interval unions ([`rotation`]).

pub mod cube;
pub mod density;
pub mod error;
pub mod generate;
pub mod group;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod partition;
pub mod rational;
pub mod recurrence;
pub mod rotation;
pub mod symbolic;
pub mod system;
pub mod vdc;

pub use error::{Error, Result};
pub use group::{DiscreteGroup, FiniteGroup, GroupDescriptor, IntegerLattice};
pub use measure::{GroupMeasure, ReiterSequence};
pub use partition::Partition;
pub use rational::Rational;
pub use system::{FiniteMPS, Observable};
