//! Point-replication: turns a pair of measures into two equal-cardinality
//! lists of equal-weight atoms with provenance back to the original indices.
//!
//! Uniform case: each of the `m` sources is copied `n/gcd(m,n)` times and
//! each of the `n` targets `m/gcd(m,n)` times, giving `mn/gcd(m,n)` atoms of
//! mass `gcd(m,n)/(mn)` per side. Rational case: with `B` and `D` the common
//! denominators of the two weight vectors and `L = lcm(B, D)`, source `i`
//! becomes `k_i·L/B` atoms of mass `1/L` (targets analogously). `L` can blow
//! up for unrelated denominators, so expansion is guarded by an atom budget
//! and fails with the exact lcm instead of attempting the allocation.

use num::bigint::BigUint;
use num::{Integer, ToPrimitive};
use thiserror::Error;

use crate::measures::{DiscreteMeasure, Rational};

/// Default cap on atoms per side for [`expand_rational`] / [`expand_uniform`].
pub const DEFAULT_MAX_ATOMS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("expansion requires {required} atoms per side, over the budget of {budget}")]
    AtomBudgetExceeded { required: BigUint, budget: u64 },
    #[error("expand_uniform requires uniform weights on both measures")]
    NotUniform,
}

/// Replication counts for the uniform case.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCounts {
    /// gcd(m, n).
    pub gcd: u64,
    /// Copies made of each source point: n / gcd(m, n).
    pub src_copies: u64,
    /// Copies made of each target point: m / gcd(m, n).
    pub dst_copies: u64,
    /// Atoms per side: m·n / gcd(m, n).
    pub atoms: u64,
    /// Mass of every atom: gcd(m, n) / (m·n); `atom_mass · atoms = 1`.
    pub atom_mass: Rational,
}

/// Replication counts for uniform measures over `m` and `n` points.
pub fn expansion_counts(m: usize, n: usize) -> ExpansionCounts {
    assert!(m >= 1 && n >= 1, "measures are nonempty");
    let (m, n) = (m as u64, n as u64);
    let gcd = m.gcd(&n);
    let src_copies = n / gcd;
    let dst_copies = m / gcd;
    let atoms = m.checked_mul(src_copies).expect("atom count fits in u64");
    // gcd/(m·n) in lowest terms is exactly 1/atoms.
    let atom_mass = Rational::new(1u64, atoms).expect("atoms > 0");
    ExpansionCounts {
        gcd,
        src_copies,
        dst_copies,
        atoms,
        atom_mass,
    }
}

/// Two equal-cardinality lists of equal-weight atoms with provenance.
///
/// `src_atoms[p]` is the original source index behind atom `p`; atoms of
/// index `i` are contiguous and precede those of `i+1`, so the layout is
/// deterministic. Index `i` occurs exactly `weight_i / atom_mass` times.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedInstance {
    pub src_atoms: Vec<usize>,
    pub dst_atoms: Vec<usize>,
    pub atom_mass: Rational,
    pub src_measure: DiscreteMeasure,
    pub dst_measure: DiscreteMeasure,
}

impl ExpandedInstance {
    /// Atoms per side.
    pub fn atoms(&self) -> usize {
        self.src_atoms.len()
    }

    /// Number of atoms carrying each source index.
    pub fn src_multiplicities(&self) -> Vec<u64> {
        index_counts(&self.src_atoms, self.src_measure.len())
    }

    /// Number of atoms carrying each target index.
    pub fn dst_multiplicities(&self) -> Vec<u64> {
        index_counts(&self.dst_atoms, self.dst_measure.len())
    }
}

fn index_counts(atoms: &[usize], len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; len];
    for &i in atoms {
        counts[i] += 1;
    }
    counts
}

fn repeat_indices(multiplicities: &[u64], total: usize) -> Vec<usize> {
    let mut atoms = Vec::with_capacity(total);
    for (index, &count) in multiplicities.iter().enumerate() {
        atoms.extend(std::iter::repeat_n(index, count as usize));
    }
    atoms
}

/// Fast path for two uniform measures; no big-integer lcm involved.
pub fn expand_uniform(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    max_atoms: u64,
) -> Result<ExpandedInstance, ExpansionError> {
    if !mu.is_uniform() || !nu.is_uniform() {
        return Err(ExpansionError::NotUniform);
    }
    let counts = expansion_counts(mu.len(), nu.len());
    if counts.atoms > max_atoms {
        return Err(ExpansionError::AtomBudgetExceeded {
            required: BigUint::from(counts.atoms),
            budget: max_atoms,
        });
    }
    let total = counts.atoms as usize;
    Ok(ExpandedInstance {
        src_atoms: repeat_indices(&vec![counts.src_copies; mu.len()], total),
        dst_atoms: repeat_indices(&vec![counts.dst_copies; nu.len()], total),
        atom_mass: counts.atom_mass,
        src_measure: mu.clone(),
        dst_measure: nu.clone(),
    })
}

/// General rational-weight expansion through the common-denominator form.
///
/// `L = lcm(B, D)` atoms per side, each of mass `1/L`; source `i` appears
/// `k_i·L/B` times and target `j` appears `l_j·L/D` times. Fails with the
/// exact `L` when it exceeds `max_atoms`.
pub fn expand_rational(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    max_atoms: u64,
) -> Result<ExpandedInstance, ExpansionError> {
    let src_form = mu.common_denominator();
    let dst_form = nu.common_denominator();
    let lcm = src_form.denominator.lcm(&dst_form.denominator);
    let total = match lcm.to_u64() {
        Some(total) if total <= max_atoms => total,
        _ => {
            return Err(ExpansionError::AtomBudgetExceeded {
                required: lcm,
                budget: max_atoms,
            })
        }
    };

    let scale_multiplicities = |form: &crate::measures::CommonDenominatorForm| {
        let factor = &lcm / &form.denominator;
        form.multiplicities
            .iter()
            .map(|k| (k * &factor).to_u64().expect("bounded by lcm"))
            .collect::<Vec<u64>>()
    };

    Ok(ExpandedInstance {
        src_atoms: repeat_indices(&scale_multiplicities(&src_form), total as usize),
        dst_atoms: repeat_indices(&scale_multiplicities(&dst_form), total as usize),
        atom_mass: Rational::from(lcm).recip().expect("lcm > 0"),
        src_measure: mu.clone(),
        dst_measure: nu.clone(),
    })
}

/// Dispatches to the uniform fast path when both measures are uniform.
pub fn expand(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    max_atoms: u64,
) -> Result<ExpandedInstance, ExpansionError> {
    if mu.is_uniform() && nu.is_uniform() {
        expand_uniform(mu, nu, max_atoms)
    } else {
        expand_rational(mu, nu, max_atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Point;
    use num::bigint::BigUint;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pts(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::new(vec![i as f64])).collect()
    }

    fn uniform(n: usize) -> DiscreteMeasure {
        DiscreteMeasure::uniform(pts(n)).unwrap()
    }

    fn weighted(weights: &[&str]) -> DiscreteMeasure {
        let weights: Vec<Rational> = weights.iter().map(|w| rat(w)).collect();
        DiscreteMeasure::new(pts(weights.len()), weights).unwrap()
    }

    #[test]
    fn counts_for_figure_sizes() {
        let counts = expansion_counts(20, 30);
        assert_eq!(counts.gcd, 10);
        assert_eq!(counts.src_copies, 3);
        assert_eq!(counts.dst_copies, 2);
        assert_eq!(counts.atoms, 60);
        assert_eq!(counts.atom_mass, rat("1/60"));
    }

    #[test]
    fn counts_degenerate_and_coprime() {
        for n in 1..=6 {
            let counts = expansion_counts(n, n);
            assert_eq!(
                (counts.gcd, counts.src_copies, counts.dst_copies, counts.atoms),
                (n as u64, 1, 1, n as u64)
            );
        }
        let counts = expansion_counts(2, 3);
        assert_eq!(counts.gcd, 1);
        assert_eq!(counts.src_copies, 3);
        assert_eq!(counts.dst_copies, 2);
        assert_eq!(counts.atoms, 6);
    }

    #[test]
    fn counts_identities() {
        for m in 1..=12usize {
            for n in 1..=12usize {
                let c = expansion_counts(m, n);
                assert_eq!(c.src_copies * m as u64, c.atoms);
                assert_eq!(c.dst_copies * n as u64, c.atoms);
                let total = &c.atom_mass * &Rational::from(c.atoms);
                assert!(total.is_one());
            }
        }
    }

    #[test]
    fn uniform_two_by_three() {
        let inst = expand_uniform(&uniform(2), &uniform(3), DEFAULT_MAX_ATOMS).unwrap();
        assert_eq!(inst.src_atoms, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(inst.dst_atoms, vec![0, 0, 1, 1, 2, 2]);
        assert_eq!(inst.atom_mass, rat("1/6"));
    }

    #[test]
    fn uniform_square_is_identity_layout() {
        let inst = expand_uniform(&uniform(4), &uniform(4), DEFAULT_MAX_ATOMS).unwrap();
        assert_eq!(inst.src_atoms, vec![0, 1, 2, 3]);
        assert_eq!(inst.dst_atoms, vec![0, 1, 2, 3]);
        assert_eq!(inst.atom_mass, rat("1/4"));
    }

    #[test]
    fn uniform_figure_sizes() {
        let inst = expand_uniform(&uniform(20), &uniform(30), DEFAULT_MAX_ATOMS).unwrap();
        assert_eq!(inst.atoms(), 60);
        assert!(inst.src_multiplicities().iter().all(|&c| c == 3));
        assert!(inst.dst_multiplicities().iter().all(|&c| c == 2));
    }

    #[test]
    fn uniform_rejects_weighted_input() {
        let mu = weighted(&["2/3", "1/3"]);
        assert_eq!(
            expand_uniform(&mu, &uniform(3), DEFAULT_MAX_ATOMS),
            Err(ExpansionError::NotUniform)
        );
    }

    #[test]
    fn rational_example_shared_denominator() {
        let mu = weighted(&["2/3", "1/3"]);
        let nu = uniform(3);
        let inst = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
        assert_eq!(inst.src_atoms, vec![0, 0, 1]);
        assert_eq!(inst.dst_atoms, vec![0, 1, 2]);
        assert_eq!(inst.atom_mass, rat("1/3"));
    }

    #[test]
    fn rational_example_mixed_denominators() {
        let mu = weighted(&["1/2", "1/2"]);
        let nu = weighted(&["1/3", "2/3"]);
        let inst = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
        assert_eq!(inst.atoms(), 6);
        assert_eq!(inst.src_multiplicities(), vec![3, 3]);
        assert_eq!(inst.dst_multiplicities(), vec![2, 4]);
        assert_eq!(inst.atom_mass, rat("1/6"));
    }

    #[test]
    fn budget_guard_reports_exact_lcm() {
        let mu = weighted(&["1/97", "1/89", "1/101", "844514/871933"]);
        let nu = uniform(2);
        let err = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap_err();
        assert_eq!(
            err,
            ExpansionError::AtomBudgetExceeded {
                required: BigUint::from(1_743_866u64),
                budget: DEFAULT_MAX_ATOMS,
            }
        );
        assert!(err.to_string().contains("1743866"));
    }

    #[test]
    fn budget_guard_applies_to_uniform_path() {
        let err = expand_uniform(&uniform(997), &uniform(1009), 1000).unwrap_err();
        assert!(matches!(err, ExpansionError::AtomBudgetExceeded { .. }));
    }

    fn check_mass_conservation(inst: &ExpandedInstance) {
        for (i, &count) in inst.src_multiplicities().iter().enumerate() {
            let mass = &Rational::from(count) * &inst.atom_mass;
            assert_eq!(&mass, &inst.src_measure.weights()[i]);
        }
        for (j, &count) in inst.dst_multiplicities().iter().enumerate() {
            let mass = &Rational::from(count) * &inst.atom_mass;
            assert_eq!(&mass, &inst.dst_measure.weights()[j]);
        }
    }

    #[test]
    fn uniform_reduction_matches_rational_path() {
        for (m, n) in [(1, 1), (2, 3), (4, 4), (6, 9), (5, 12)] {
            let mu = uniform(m);
            let nu = uniform(n);
            let fast = expand_uniform(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
            let general = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
            assert_eq!(fast, general);
            check_mass_conservation(&fast);
        }
    }

    #[test]
    fn count_identity_for_rational_expansion() {
        let mu = weighted(&["1/2", "1/2"]);
        let nu = weighted(&["1/3", "2/3"]);
        let b = mu.common_denominator().denominator;
        let d = nu.common_denominator().denominator;
        let lcm = b.lcm(&d);
        let gcd = b.gcd(&d);
        assert_eq!(&lcm / &b, &d / &gcd);
        assert_eq!(&lcm / &d, &b / &gcd);
    }

    /// Random positive weight vectors with denominators small enough that
    /// the lcm stays within budget.
    fn small_weights() -> impl Strategy<Value = Vec<Rational>> {
        (1usize..7).prop_flat_map(|m| {
            prop::collection::vec(1u32..12, m).prop_map(|raw| {
                let parts: Vec<Rational> =
                    raw.iter().map(|&p| Rational::from(p as u64)).collect();
                let total = Rational::sum(&parts);
                parts.iter().map(|p| p / &total).collect()
            })
        })
    }

    proptest! {
        #[test]
        fn mass_conservation_on_random_instances(
            src in small_weights(),
            dst in small_weights(),
        ) {
            let mu = DiscreteMeasure::new(pts(src.len()), src).unwrap();
            let nu = DiscreteMeasure::new(pts(dst.len()), dst).unwrap();
            let inst = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
            check_mass_conservation(&inst);
            prop_assert_eq!(inst.src_atoms.len(), inst.dst_atoms.len());
            let total = &inst.atom_mass * &Rational::from(inst.atoms() as u64);
            prop_assert!(total.is_one());
        }

        #[test]
        fn count_identity_holds(src in small_weights(), dst in small_weights()) {
            let mu = DiscreteMeasure::new(pts(src.len()), src).unwrap();
            let nu = DiscreteMeasure::new(pts(dst.len()), dst).unwrap();
            let b = mu.common_denominator().denominator;
            let d = nu.common_denominator().denominator;
            let lcm = b.lcm(&d);
            let gcd = b.gcd(&d);
            prop_assert_eq!(&lcm / &b, &d / &gcd);
            prop_assert_eq!(&lcm / &d, &b / &gcd);
        }

        #[test]
        fn atom_order_is_contiguous_by_index(src in small_weights(), dst in small_weights()) {
            let mu = DiscreteMeasure::new(pts(src.len()), src).unwrap();
            let nu = DiscreteMeasure::new(pts(dst.len()), dst).unwrap();
            let inst = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
            prop_assert!(inst.src_atoms.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(inst.dst_atoms.windows(2).all(|w| w[0] <= w[1]));
            let again = expand_rational(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
            prop_assert_eq!(inst, again);
        }
    }
}
