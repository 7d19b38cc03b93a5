//! Exact-arithmetic toolkit for:
//!
//! - Conley-Zehnder indices of iterated elliptic symplectic paths and the
//!   loop/short-path decomposition ([`index`]);
//! - superadditivity-extremal partitions of an iterate ([`index`]);
//! - Diophantine search for torus-orbit returns and small-angle iterates
//!   with a divisibility certificate ([`orbit`]);
//! - generalized Laurent series over the two-element field with rational
//!   exponents and explicit truncation bookkeeping, plus a Laurent ring in a
//!   graded formal variable ([`novikov`]);
//! - finite-basis graded quantum product rings, the projective-space family,
//!   and the degree replay that pins their Betti data ([`qh`]).
//!
//! Everything is exact: rational arithmetic throughout, no floating point.

pub mod index;
pub mod novikov;
pub mod orbit;
pub mod qh;
pub mod rat;

pub use index::{cz_index, decompose, is_extremal, mean_index, Partition, RotationNumbers};
pub use orbit::{find_lemma_iterate, orbit_hits, LemmaWitness, TorusPoint, Window};
pub use qh::{
    cp_spec, cp_spec_with_omega, orbit_class_degree, power, product, replay_theorem,
    verify_point_identity, GradedClass, RingSpec, TheoremOutcome, TheoremVerdict,
};
