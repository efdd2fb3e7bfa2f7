use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected 8 comma-separated coefficients, found {0}")]
    Arity(usize),

    #[error("invalid coefficient `{text}`: {reason}")]
    Coefficient { text: String, reason: String },

    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },

    #[error("stage {index} ({name}) expects {expected} input lanes but receives {found}")]
    DimensionChain {
        index: usize,
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("pipeline must map 8 lanes to 8 lanes, got {input} -> {output}")]
    PipelineShape { input: usize, output: usize },

    #[error("stage {index} ({name}) is malformed: {reason}")]
    MalformedStage { index: usize, name: String, reason: String },

    #[error("slot {slot} ({name}): recipe evaluates to {recipe} but the slot is declared as {declared}")]
    SlotRecipe {
        slot: usize,
        name: String,
        recipe: String,
        declared: String,
    },

    #[error("data-dependent stages {first} and {second} would multiply, giving entries of degree 2 in b")]
    Structural { first: usize, second: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
