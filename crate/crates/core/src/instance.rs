//! Instance files: a pair of measures plus a ground cost, as JSON.
//!
//! Weights travel as exact strings ("2/3"); a measure without a "weights"
//! key is uniform. The cost is a named kind or an explicit matrix.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{DiscreteMeasure, MeasureError, Point, Rational};
use crate::solver::{CostKind, CostMatrix, CostSpec, SolverError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid {side} measure: {source}")]
    Measure {
        side: &'static str,
        source: MeasureError,
    },
    #[error("invalid cost matrix: {0}")]
    Cost(#[from] SolverError),
}

/// A solvable problem: source measure, target measure, ground cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub cost: CostSpec,
}

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    mu: MeasureDto,
    nu: MeasureDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<CostDto>,
}

#[derive(Serialize, Deserialize)]
struct MeasureDto {
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CostDto {
    Named(CostKind),
    Matrix { matrix: Vec<Vec<f64>> },
}

fn measure_from_dto(dto: MeasureDto, side: &'static str) -> Result<DiscreteMeasure, InstanceError> {
    let points: Vec<Point> = dto.points.into_iter().map(Point::new).collect();
    let result = match dto.weights {
        Some(weights) => DiscreteMeasure::new(points, weights),
        None => DiscreteMeasure::uniform(points),
    };
    result.map_err(|source| InstanceError::Measure { side, source })
}

fn measure_to_dto(measure: &DiscreteMeasure) -> MeasureDto {
    MeasureDto {
        points: measure.points().iter().map(|p| p.coords.clone()).collect(),
        weights: Some(measure.weights().to_vec()),
    }
}

impl Instance {
    pub fn new(mu: DiscreteMeasure, nu: DiscreteMeasure, cost: CostSpec) -> Self {
        Instance { mu, nu, cost }
    }

    /// Parses and validates an instance document. A missing "cost" key
    /// defaults to euclidean.
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let dto: InstanceDto = serde_json::from_str(text)?;
        let mu = measure_from_dto(dto.mu, "mu")?;
        let nu = measure_from_dto(dto.nu, "nu")?;
        let cost = match dto.cost {
            None => CostSpec::Euclidean,
            Some(CostDto::Named(kind)) => CostSpec::from_kind(kind),
            Some(CostDto::Matrix { matrix }) => {
                CostSpec::Explicit(CostMatrix::from_rows(matrix)?)
            }
        };
        Ok(Instance { mu, nu, cost })
    }

    pub fn to_json_pretty(&self) -> String {
        let cost = match &self.cost {
            CostSpec::Euclidean => CostDto::Named(CostKind::Euclidean),
            CostSpec::SqEuclidean => CostDto::Named(CostKind::SqEuclidean),
            CostSpec::Manhattan => CostDto::Named(CostKind::Manhattan),
            CostSpec::Explicit(matrix) => CostDto::Matrix { matrix: matrix.to_rows() },
        };
        let dto = InstanceDto {
            mu: measure_to_dto(&self.mu),
            nu: measure_to_dto(&self.nu),
            cost: Some(cost),
        };
        serde_json::to_string_pretty(&dto).expect("instance DTO always serializes")
    }
}
