//! Instance files, seeded generators, bound arithmetic and run reports.

mod bounds;
mod generate;
mod instance;
mod report;

use thiserror::Error;

use crate::cascade::CascadeError;
use crate::matroid::MatroidError;
use crate::rainbow::ModelError;

pub use bounds::{theorem_bounds, BoundRecord};
pub use generate::{generate_instance, generate_with_ground, overlapping_ground, Family, Mode};
pub use instance::{emit_instance, parse_instance, Declared, Instance, Source, FORMAT_VERSION};
pub use report::{parse_report, solve_instance, Report, Solved, Status, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("matroid: {0}")]
    Matroid(MatroidError),
    #[error("base of colour {colour} has {size} elements, rank is {rank}")]
    BaseSize { colour: usize, size: usize, rank: usize },
    #[error("base of colour {colour}: {reason}")]
    BaseInvalid { colour: usize, reason: String },
    #[error("declared kappa {declared} is below the actual overlap {actual} (element {element})")]
    KappaTooSmall {
        declared: usize,
        actual: usize,
        element: usize,
    },
    #[error("declared beta {declared} is below {required}, required by girth {girth}")]
    BetaTooSmall {
        declared: usize,
        required: usize,
        girth: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("inconsistent report: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solver(#[from] CascadeError),
}
