//! Exact and numeric enumeration of k-connected chordal graphs with
//! tree-width at most t.
//!
//! * [`mps`]: truncated multivariate power series over the rationals.
//! * [`gfsystem`]: the level system producing the generating functions `G_k`.
//! * [`oracle`]: brute-force enumeration and decomposition checks on small graphs.
//! * [`singularity`]: numerical evaluation, branch points and coefficient asymptotics.

pub mod gfsystem;
pub mod mps;
pub mod oracle;
pub mod singularity;
