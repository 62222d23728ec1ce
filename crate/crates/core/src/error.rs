use core::fmt;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::space::SpaceError;

/// One failed invariant found by a validator.
///
/// `level` is a grid index, `block` indexes the blocks of the partition at
/// that level and `outcome` indexes the outcome set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// A table does not have the `outcomes x grid` shape of the space.
    Shape { expected: (usize, usize), found: (usize, usize) },
    /// A stop index points past the end of the grid.
    IndexOutOfRange { outcome: usize, index: usize },
    /// Process values differ inside a block.
    NotAdapted { level: usize, block: usize },
    /// `{stop <= t_level}` is not a union of blocks.
    NotStopping { level: usize, block: usize },
    /// A section of a mixed stopping time is not a well-formed step function on the grid.
    MalformedSection { outcome: usize },
    /// Some `r`-section (on a set of positive length) is not a pure stopping time.
    SectionNotStopping { level: usize, block: usize },
    /// `{(w, r) : mu(w, r) <= t_level}` is not product-measurable on this block.
    NotJointlyMeasurable { level: usize, block: usize },
    /// A randomized path value lies outside `[0, 1]`.
    PathOutOfRange { outcome: usize, level: usize },
    NotMonotone { outcome: usize, level: usize },
    TerminalNotOne { outcome: usize },
    NegativeMass { outcome: usize, level: usize },
    MarginalMismatch { outcome: usize },
    /// The cumulative density up to `t_level` is not constant on a block.
    DensityNotAdapted { level: usize, block: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { expected, found } => write!(
                f,
                "table shape {}x{} does not match space shape {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::IndexOutOfRange { outcome, index } => {
                write!(f, "outcome {outcome}: grid index {index} out of range")
            }
            Violation::NotAdapted { level, block } => {
                write!(f, "not adapted at level {level}, block {block}")
            }
            Violation::NotStopping { level, block } => {
                write!(f, "stopping event not measurable at level {level}, block {block}")
            }
            Violation::MalformedSection { outcome } => {
                write!(f, "outcome {outcome}: malformed section")
            }
            Violation::SectionNotStopping { level, block } => write!(
                f,
                "a section of positive length is not a stopping time at level {level}, block {block}"
            ),
            Violation::NotJointlyMeasurable { level, block } => write!(
                f,
                "sections disagree on a set of positive length at level {level}, block {block}"
            ),
            Violation::PathOutOfRange { outcome, level } => {
                write!(f, "outcome {outcome}: path value outside [0,1] at level {level}")
            }
            Violation::NotMonotone { outcome, level } => {
                write!(f, "outcome {outcome}: path decreases at level {level}")
            }
            Violation::TerminalNotOne { outcome } => {
                write!(f, "outcome {outcome}: terminal path value is not 1")
            }
            Violation::NegativeMass { outcome, level } => {
                write!(f, "outcome {outcome}: negative mass at level {level}")
            }
            Violation::MarginalMismatch { outcome } => {
                write!(f, "outcome {outcome}: masses do not sum to the outcome probability")
            }
            Violation::DensityNotAdapted { level, block } => {
                write!(f, "cumulative density not adapted at level {level}, block {block}")
            }
        }
    }
}

/// Result of a validator: empty iff the object is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, violation: Violation) {
        self.violations.push(violation);
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has_shape_error(&self) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Shape { .. }))
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl From<Vec<Violation>> for Report {
    fn from(violations: Vec<Violation>) -> Self {
        Self { violations }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl core::error::Error for Report {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    InvalidSpace(Vec<SpaceError>),
    /// The input stopping time or process failed validation.
    Invalid(Report),
    /// The two arguments do not live on the same space.
    IncompatibleSpaces,
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    /// Two independent computations of the same quantity disagreed.
    RouteMismatch { outcome: usize, level: usize, left: Box<Rational>, right: Box<Rational> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpace(errors) => {
                f.write_str("invalid space: ")?;
                for (i, e) in errors.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            Error::Invalid(report) => write!(f, "invalid input: {report}"),
            Error::IncompatibleSpaces => f.write_str("arguments live on incompatible spaces"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::RouteMismatch { outcome, level, left, right } => write!(
                f,
                "internal routes disagree at outcome {outcome}, level {level}: {left} vs {right}"
            ),
        }
    }
}

impl core::error::Error for Error {}

impl From<Vec<SpaceError>> for Error {
    fn from(errors: Vec<SpaceError>) -> Self {
        Error::InvalidSpace(errors)
    }
}
