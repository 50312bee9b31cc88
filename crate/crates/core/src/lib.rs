//! O-models: Kripke models in which every agent holds a set of objects at
//! every world, event models that add and remove objects, and the tools to
//! evaluate, transform and check them.

pub mod bitset;
pub mod catalog;
pub mod cli;
pub mod closure;
pub mod error;
pub mod formula;
pub mod generation;
pub mod instantiations;
pub mod model;
pub mod properties;
pub mod reduction;
pub mod semantics;
pub mod syntax;
pub mod update;
pub mod workspace;

pub use bitset::IdSet;
pub use error::{Error, Result};
pub use formula::{Formula, Name};
pub use model::{EventModel, OModel, Signature, Violation};
pub use semantics::Registry;
pub use syntax::{parse_formula, print_formula};
pub use workspace::Workspace;
