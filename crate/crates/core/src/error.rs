use crate::model::Violation;
use crate::syntax::SyntaxError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unresolved event model `{0}`")]
    UnresolvedEventModel(String),
    #[error("event model `{model}` has no event `{event}`")]
    UnknownEvent { model: String, event: String },
    #[error("product update undefined: no world satisfies any precondition")]
    Undefined,
    #[error("model and event model declare different agent sets")]
    AgentSetMismatch,
    #[error("model and event model declare different object universes")]
    UniverseMismatch,
    #[error("focus mentions unknown agent `{0}`")]
    UnknownAgentInFocus(String),
    #[error("invalid focus: {0}")]
    InvalidFocus(String),
    #[error("relation of agent `{agent}` is not reflexive at world `{world}`")]
    NotReflexive { agent: String, world: String },
    #[error("closure theorem violated: {0}")]
    TheoremViolation(String),
    #[error("repair did not reach a fixpoint within {rounds} rounds")]
    Unrepairable { rounds: usize },
    #[error("enumeration would produce {count} models, above the ceiling of {ceiling}")]
    EnumerationTooLarge { count: u128, ceiling: u128 },
    #[error("translation exceeded the size cap of {cap} nodes")]
    TranslationTooLarge { cap: usize },
    #[error("universe object `{0}` is not an atom of the signature")]
    UniverseNotAtoms(String),
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("format error: {0}")]
    Format(String),
    #[error("validation failed for `{name}`: {}", list(.violations))]
    Validation { name: String, violations: Vec<Violation> },
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
