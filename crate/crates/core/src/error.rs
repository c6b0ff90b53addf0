use std::fmt;

use thiserror::Error;

/// Which expanded form of the total-population rate an operation needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateForm {
    Prey,
    Predator,
}

impl fmt::Display for RateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateForm::Prey => f.write_str("prey"),
            RateForm::Predator => f.write_str("predator"),
        }
    }
}

/// A parameter combination that appears as a divisor in the closure algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Denominator {
    Lambda1,
    Lambda2Nu,
    XiP,
    XiD,
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Denominator::Lambda1 => f.write_str("lambda1"),
            Denominator::Lambda2Nu => f.write_str("lambda2*nu"),
            Denominator::XiP => f.write_str("xi_p"),
            Denominator::XiD => f.write_str("xi_d"),
        }
    }
}

fn join(items: &[Denominator]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{field}` = {value} violates {constraint}")]
    RangeViolation {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("interaction matrix is not antisymmetric at ({i}, {j})")]
    AntisymmetryViolation { i: usize, j: usize },

    #[error("{form} rate form is singular: zero {}", join(.zero))]
    SingularForm { form: RateForm, zero: Vec<Denominator> },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("species index {index} out of range for {count} species")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("population became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("species {species} went negative ({value}) at t = {t}")]
    NegativePopulation { t: f64, species: usize, value: f64 },

    #[error("species {species} has non-positive population {value}")]
    NonPositivePopulation { species: usize, value: f64 },

    #[error("non-positive count {value} at t = {t}")]
    NonPositiveCount { t: f64, value: f64 },

    #[error("a series needs at least two samples")]
    FewerThanTwoSamples,

    #[error("gestation period #{index} is {value}; must be positive")]
    NonPositiveGestation { index: usize, value: f64 },

    #[error("system is not a classic two-species prey-predator system: {0}")]
    NotClassicForm(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
