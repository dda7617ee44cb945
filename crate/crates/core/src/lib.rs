//! Paradoxical subshifts on free groups and Turing machines compiled to Wang
//! tiles, combined into a finite-window model of an SFT on `F2 x F2` that
//! factors onto an effectively closed action.

pub mod error;
pub mod groups;
pub mod machine;
pub mod mirror;
pub mod paradox;
pub mod render;
pub mod selfsim;
pub mod tilespace;

pub use error::{Error, Result};
pub use groups::{ball, coding_consistent, Factor, GroupElement, GroupSpec, PatternCoding, Word};
