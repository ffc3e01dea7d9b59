//! Encode classical integers into cross-field correlations of two bosonic
//! fields, push them through an arbitrary symmetric Bogolyubov channel, and
//! decode them by measuring an invariant observable.
//!
//! The crate keeps two representations of every quadratic operator side by
//! side: an exact coefficient algebra ([`coeff`]) in which commutators are
//! evaluated in closed form, and a truncated Fock realization ([`fock`])
//! used for state evolution. Channels ([`channels`]) cover seeded random
//! symmetric and asymmetric generators, the expanding-universe mode mixing,
//! and the accelerated-observer kernel. The communication experiment itself
//! lives in [`protocol`]; [`cli`] exposes it as a reproducible command line.
//!
//! Natural units throughout: `c = hbar = 1`.
//!
//! See the `examples/` directory for one runnable demonstration per
//! capability.

pub mod channels;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod generators;
pub mod grid;
pub mod invariant;
pub mod protocol;
pub mod special;

pub use coeff::{bogoliubov_of, quad_bracket, BogolyubovMap, CoefficientMatrix};
pub use error::{Error, Result};
pub use evolve::{exp_evolve, EvolveOptions, Evolved};
pub use fock::{embed_operator, ladder_matrix, Field, FockOperator, FockVector, ModeSet};
pub use generators::{assemble_hamiltonian, generator_coeff, generator_fock, GeneratorTable, QuadKind};
pub use invariant::{build_invariant, commutation_residual, schwinger_eigenstate, InvariantObservable};
