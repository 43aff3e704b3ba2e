//! Seeded random instances: points i.i.d. uniform in the unit hypercube,
//! weights either uniform or random rationals with bounded denominators.
//! The same seed always produces the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::Instance;
use crate::measures::{DiscreteMeasure, Point, Rational};
use crate::solver::{CostKind, CostSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("need at least one point per measure, got m={m}, n={n}")]
    EmptySide { m: usize, n: usize },
    #[error("points need at least one coordinate")]
    ZeroDimension,
    #[error("denominator cap {cap} cannot split mass into {count} positive weights")]
    CapTooSmall { cap: u64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Uniform,
    /// Random positive rationals summing to 1 whose reduced denominators
    /// divide a random total of at most `max_denominator`.
    RandomRational { max_denominator: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub m: usize,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    pub weights: WeightMode,
    pub cost: CostKind,
}

pub fn generate_instance(config: &GenConfig) -> Result<Instance, GenerateError> {
    if config.m == 0 || config.n == 0 {
        return Err(GenerateError::EmptySide { m: config.m, n: config.n });
    }
    if config.dim == 0 {
        return Err(GenerateError::ZeroDimension);
    }
    if let WeightMode::RandomRational { max_denominator } = config.weights {
        let needed = config.m.max(config.n) as u64;
        if max_denominator < needed {
            return Err(GenerateError::CapTooSmall {
                cap: max_denominator,
                count: config.m.max(config.n),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mu_points = sample_points(&mut rng, config.m, config.dim);
    let nu_points = sample_points(&mut rng, config.n, config.dim);
    let (mu, nu) = match config.weights {
        WeightMode::Uniform => (
            DiscreteMeasure::uniform(mu_points),
            DiscreteMeasure::uniform(nu_points),
        ),
        WeightMode::RandomRational { max_denominator } => {
            let mu_weights = random_weights(&mut rng, config.m, max_denominator);
            let nu_weights = random_weights(&mut rng, config.n, max_denominator);
            (
                DiscreteMeasure::new(mu_points, mu_weights),
                DiscreteMeasure::new(nu_points, nu_weights),
            )
        }
    };
    Ok(Instance::new(
        mu.expect("generated weights satisfy the measure invariants"),
        nu.expect("generated weights satisfy the measure invariants"),
        CostSpec::from_kind(config.cost),
    ))
}

fn sample_points(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Point> {
    (0..count)
        .map(|_| Point::new((0..dim).map(|_| rng.gen::<f64>()).collect()))
        .collect()
}

/// `count` positive rationals with exact sum 1: split a random total
/// T <= cap at `count - 1` distinct interior cut points, so every part is a
/// positive integer and every reduced denominator divides T.
fn random_weights(rng: &mut ChaCha8Rng, count: usize, cap: u64) -> Vec<Rational> {
    let total = rng.gen_range(count as u64..=cap);
    let mut cuts = Vec::with_capacity(count + 1);
    cuts.push(0);
    while cuts.len() < count {
        let cut = rng.gen_range(1..total);
        if !cuts.contains(&cut) {
            cuts.push(cut);
        }
    }
    cuts.push(total);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| Rational::new(w[1] - w[0], total).expect("total > 0"))
        .collect()
}
