use thiserror::Error;

/// Errors produced anywhere in the modelling pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MprError {
    #[error("csv error: {0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("row {row}: non-positive time {value}")]
    NonPositiveTime { row: usize, value: f64 },
    #[error("row {row}: status `{value}` is not 0 or 1")]
    InvalidStatus { row: usize, value: String },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    UnparsableNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column `{column}`: empty cell in numeric column")]
    EmptyNumeric { row: usize, column: String },
    #[error("dataset has no events; the likelihood is degenerate")]
    NoEvents,
    #[error("dataset is empty")]
    EmptyData,
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("unknown level `{level}` for factor `{factor}`")]
    UnknownLevel { factor: String, level: String },
    #[error("{component} design is rank deficient; collinear columns: {columns:?}")]
    RankDeficient {
        component: String,
        columns: Vec<String>,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("overflow evaluating the cumulative hazard of subject {subject}")]
    Overflow { subject: usize },
    #[error("observed information is singular")]
    SingularInformation,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("unknown coefficient `{0}`")]
    UnknownCoefficient(String),
    #[error("covariate `{0}` is not present in both the scale and shape components")]
    NotInBothComponents(String),
    #[error("covariate `{0}` is not in the scale component; fit it with a zero scale effect explicitly if that is intended")]
    NotInScale(String),
    #[error("effect `{0}` must be a single binary/dummy column")]
    NotScalarEffect(String),
    #[error("models are not nested")]
    NotNested,
    #[error("model did not converge")]
    NotConverged,
    #[error("likelihood ratio statistic {0} is negative; the fits are not at their optima")]
    NegativeLrStatistic(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular time t = 0 for a hazard with shape < 1")]
    SingularHazard,
    #[error("censoring target {0} cannot be reached")]
    UnreachableCensoring(f64),
    #[error("selection did not terminate within {0} iterations")]
    SelectionBound(usize),
    #[error("{dropped} of {total} replicates failed, above the 5% limit")]
    TooManyFailures { dropped: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, MprError>;
