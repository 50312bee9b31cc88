//! Encodings of other logics as O-models.

pub mod awareness;
pub mod deontic;
pub mod justification;
pub mod knowing_what;
