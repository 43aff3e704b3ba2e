//! Finitely supported probability measures with exact rational weights.
//!
//! A [`DiscreteMeasure`] is a list of support points together with positive
//! rational weights that sum to exactly 1. The common-denominator form
//! (`k_i / B` with `B` the lcm of the reduced denominators) is what the
//! replication construction in [`crate::expansion`] consumes.

mod rational;

pub use rational::{Rational, RationalError};

use num::bigint::{BigInt, BigUint};
use num::Integer;
use thiserror::Error;

/// A support point: fixed-dimension coordinates plus an optional label.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
    pub label: Option<String>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point {
            coords,
            label: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

/// The first violated measure invariant, in a fixed check order.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("measure must contain at least one point")]
    Empty,
    #[error("points and weights have different lengths ({points} vs {weights})")]
    LengthMismatch { points: usize, weights: usize },
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("non-positive weight at index {index}")]
    NonPositiveWeight { index: usize },
    #[error("weights sum to {sum}, expected 1")]
    WeightSumNotOne { sum: Rational },
}

/// A finitely supported probability measure with rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Point>,
    weights: Vec<Rational>,
}

/// Weights rewritten over one denominator: `weight_i = multiplicities[i] / denominator`.
///
/// The denominator is the lcm of the reduced weight denominators, so the
/// multiplicities are positive integers summing to it.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonDenominatorForm {
    pub denominator: BigUint,
    pub multiplicities: Vec<BigUint>,
}

impl DiscreteMeasure {
    /// Builds and validates a measure.
    pub fn new(
        points: Vec<Point>,
        weights: Vec<Rational>,
    ) -> Result<Self, MeasureError> {
        let measure = Self::from_parts_unchecked(points, weights);
        measure.validate()?;
        Ok(measure)
    }

    /// Builds without validation; callers must uphold the invariants or
    /// run [`DiscreteMeasure::validate`] themselves.
    pub fn from_parts_unchecked(points: Vec<Point>, weights: Vec<Rational>) -> Self {
        DiscreteMeasure { points, weights }
    }

    /// The uniform measure: every point gets weight `1/m` exactly.
    pub fn uniform(points: Vec<Point>) -> Result<Self, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::Empty);
        }
        let m = points.len();
        let w = Rational::new(1, m as i64).expect("m > 0");
        Self::new(points, vec![w; m])
    }

    /// Checks every invariant and reports the first violation.
    pub fn validate(&self) -> Result<(), MeasureError> {
        if self.points.is_empty() {
            return Err(MeasureError::Empty);
        }
        if self.points.len() != self.weights.len() {
            return Err(MeasureError::LengthMismatch {
                points: self.points.len(),
                weights: self.weights.len(),
            });
        }
        let dim = self.points[0].dim();
        for (index, point) in self.points.iter().enumerate() {
            if point.dim() != dim {
                return Err(MeasureError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: point.dim(),
                });
            }
            if point.coords.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::NonFiniteCoordinate { index });
            }
        }
        for (index, weight) in self.weights.iter().enumerate() {
            if !weight.is_positive() {
                return Err(MeasureError::NonPositiveWeight { index });
            }
        }
        let sum = Rational::sum(&self.weights);
        if !sum.is_one() {
            return Err(MeasureError::WeightSumNotOne { sum });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Point::dim)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// True when every weight equals the first (hence each is `1/m`).
    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Rewrites the weights over their least common denominator.
    ///
    /// Requires a valid measure; the result satisfies
    /// `multiplicities[i] / denominator == weight_i` exactly and the
    /// multiplicities sum to the denominator.
    pub fn common_denominator(&self) -> CommonDenominatorForm {
        let denominator = self
            .weights
            .iter()
            .map(Rational::denom_unsigned)
            .fold(BigUint::from(1u32), |acc, d| acc.lcm(&d));
        let big_b = BigInt::from(denominator.clone());
        let multiplicities = self
            .weights
            .iter()
            .map(|w| {
                let scaled = w.numer() * (&big_b / w.denom());
                scaled
                    .to_biguint()
                    .expect("weights are positive in a valid measure")
            })
            .collect();
        CommonDenominatorForm {
            denominator,
            multiplicities,
        }
    }
}
