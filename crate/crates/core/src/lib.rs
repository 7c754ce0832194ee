//! Exact-arithmetic workbench for the algebra of jet-space Noether symmetries.
//!
//! Everything here is computed over exact scalars (arbitrary-precision
//! rationals, Gaussian rationals where a factor of `i` is unavoidable, and
//! polynomials over these). There is no floating point anywhere: every
//! identity the crate checks is checked as exact equality.
//!
//! The main pieces:
//!
//! * [`multiindex`] — multi-index arithmetic, graded-lexicographic
//!   enumeration of truncated jet index sets and the binomial identities the
//!   charge calculus rests on.
//! * [`repkit`] — `gl(N) ⊕ g` representation blocks (tensor densities and
//!   gauge irreps with explicit matrices) and their scalar invariants,
//!   computed by direct supertrace and by closed forms.
//! * [`jetops`] — the jet-operator matrices attached to polynomial vector
//!   fields and gauge maps, their composition identities and the summed
//!   supertrace lemmas.
//! * [`obsalg`] — symbolic local functionals of an observer trajectory,
//!   the extended diffeomorphism/gauge/reparametrization brackets with
//!   formal abelian charges, Jacobi verification, Dirac gauge fixing and
//!   the Virasoro restriction.
//! * [`charges`] — the abelian-charge calculus: base tables, reduction
//!   identities, per-sector model accounting, large-truncation asymptotics
//!   and the finiteness scanner.
//! * [`fock`] — an exact Fock-space oracle for normal-ordered bilinears:
//!   commutator anomalies by finite contraction and Virasoro central-charge
//!   measurement.
//! * [`ktcomplex`] — desk-scale Koszul-Tate complexes for toy actions:
//!   generator assembly, bigrading, nilpotency and cohomology dimensions by
//!   exact rank computation.
//! * [`modelio`] — the model-file format, validation diagnostics, command
//!   dispatch and deterministic JSON/CSV reports.

pub mod charges;
pub mod commands;
pub mod fock;
pub mod jetops;
pub mod ktcomplex;
pub mod linalg;
pub mod modelio;
pub mod multiindex;
pub mod obsalg;
pub mod poly;
pub mod repkit;
pub mod scalar;

pub use scalar::{GaussRat, Rat};
