//! Finite group cohomology and its profinite limits.

pub mod cohomology;
pub mod exact_algebra;
pub mod gmodules;
pub mod groups;
pub mod limits;
pub mod par;
pub mod profinite;
