//! Exact computation of orbit-space stratifications for compact linear
//! groups, starting from a user-supplied minimal integrity basis, and
//! rational parametrizations of singular strata.
//!
//! Layers, bottom-up:
//! - [`exactalg`]: scalars in `Q(√D)`, sparse polynomials, polynomial matrices.
//! - [`invariants`]: the P̂-matrix, decomposition over a basis, relations.
//! - [`groups`]: finite orthogonal groups, fixed spaces, stabilizers.
//! - [`parametrize`]: the stratum parametrization pipeline.
//! - [`strata`]: numeric classification, eigenvalues, region sampling.
//! - [`io`]: problem files, expression grammar, reports and commands.

pub mod exactalg;
pub mod groups;
pub mod invariants;
pub mod io;
pub mod parametrize;
pub mod strata;
