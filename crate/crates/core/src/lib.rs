//! Finite hidden-variable representations of quantum experiments, checked
//! against several generalizations of classical probability.
//!
//! The crate covers exact arithmetic ([`exactnum`]), finite-dimensional
//! projectors and contexts ([`quantum`]), finite measure spaces and their
//! axiom checkers ([`spaces`]), Kochen-Specker colorability search ([`ks`]),
//! the reduction from weakly classical representations to finite null covers
//! and Dutch books ([`nogo`]), bundled models ([`models`]) and the on-disk
//! formats ([`io`]).

pub mod exactnum;
pub mod io;
pub mod ks;
pub mod models;
pub mod nogo;
pub mod quantum;
pub mod spaces;
