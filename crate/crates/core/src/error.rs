use thiserror::Error;

/// Errors raised by the width laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("graph is disconnected into {} components: {components:?}", components.len())]
    Disconnected { components: Vec<Vec<usize>> },

    #[error("point list is empty")]
    EmptyPointList,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("class {0} has no sample points at this resolution")]
    EmptyClass(usize),

    #[error("margin violated between classes {i} and {j}: distance {distance} is not greater than gamma {gamma}")]
    MarginViolated {
        i: usize,
        j: usize,
        distance: f64,
        gamma: f64,
    },

    #[error("candidate family cannot cover {} safe points: {uncovered:?}", uncovered.len())]
    Uncoverable { uncovered: Vec<usize> },

    #[error("label {label} outside concept space of {num_labels} labels")]
    LabelOutOfRange { label: usize, num_labels: usize },

    #[error("not a bijection on {0} elements")]
    NotBijection(usize),

    #[error("ground set of {size} points exceeds the cap of {cap}")]
    GroundSetTooLarge { size: usize, cap: usize },

    #[error("multiclass hypothesis table: use the log2-cardinality bound instead")]
    MulticlassTable,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
