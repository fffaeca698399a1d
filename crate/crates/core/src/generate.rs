//! Clause universes, the extremal constructions, and seeded sampling.
//!
//! Random draws use ChaCha8 (`rand_chacha`, whose output stream is stable
//! across platforms and releases) seeded through `SeedableRng::seed_from_u64`.
//! Subsets are drawn by index over the canonically ordered universe with
//! Floyd's algorithm; bounded integers come from rejection sampling on
//! `next_u64`. Both are spelled out here so seeds reproduce everywhere.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::formula::{universe_mask, Assignment, Clause, FormulaError, PcnfFormula};

/// Largest `n` whose clause universe is materialized.
pub const MAX_ENUMERATION_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("n = {n} is outside the enumerable range 1..={max}")]
    EnumerationCap { n: usize, max: usize },
    #[error("the double-satisfiability construction needs n >= 2")]
    NeedsTwoVariables,
    #[error("flip variable {var} is outside 0..{n}")]
    FlipOutOfRange { var: usize, n: usize },
    #[error("{requested} clauses requested but only {available} exist")]
    TooManyClauses { requested: usize, available: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

fn check_enumerable(n: usize) -> Result<(), GenerateError> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(GenerateError::EnumerationCap {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

/// Every PCNF clause over `n` variables in canonical order: for each
/// nonempty variable set, each of its `2^k` polarity patterns.
pub fn enumerate_clauses(n: usize) -> Result<Vec<Clause>, GenerateError> {
    check_enumerable(n)?;
    let full = universe_mask(n);
    let mut clauses = Vec::new();
    for vars in 1..=full {
        // Walk all submasks of `vars` as the positive part.
        let mut pos = vars;
        loop {
            clauses.push(Clause::from_masks(pos, vars & !pos)?);
            if pos == 0 {
                break;
            }
            pos = (pos - 1) & vars;
        }
    }
    clauses.sort_unstable();
    Ok(clauses)
}

/// Clause-universe histogram by width, index 0 holding width 1.
pub fn width_histogram(clauses: &[Clause], n: usize) -> Vec<usize> {
    let mut hist = vec![0; n];
    for c in clauses {
        hist[c.width() - 1] += 1;
    }
    hist
}

fn check_witness(n: usize, witness: Assignment) -> Result<(), GenerateError> {
    Assignment::new(witness.bits(), n)?;
    Ok(())
}

/// All clauses over `n` variables satisfied by `witness`.
pub fn max_sat_construction(n: usize, witness: Assignment) -> Result<PcnfFormula, GenerateError> {
    check_witness(n, witness)?;
    let clauses = enumerate_clauses(n)?
        .into_iter()
        .filter(|c| c.satisfied_by(witness))
        .collect();
    Ok(PcnfFormula::from_sorted_unchecked(n, clauses))
}

/// All clauses satisfied by both `witness` and `witness` with `flip_var`
/// toggled.
pub fn double_sat_construction(
    n: usize,
    witness: Assignment,
    flip_var: usize,
) -> Result<PcnfFormula, GenerateError> {
    if n < 2 {
        return Err(GenerateError::NeedsTwoVariables);
    }
    if flip_var >= n {
        return Err(GenerateError::FlipOutOfRange { var: flip_var, n });
    }
    check_witness(n, witness)?;
    let other = witness.flipped(flip_var);
    let clauses = enumerate_clauses(n)?
        .into_iter()
        .filter(|c| c.satisfied_by(witness) && c.satisfied_by(other))
        .collect();
    Ok(PcnfFormula::from_sorted_unchecked(n, clauses))
}

/// Uniform integer in `0..bound` by rejection on the top of the u64 range.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// `amount` distinct indices from `0..population`, sorted ascending
/// (Floyd's algorithm).
pub fn sample_indices(rng: &mut impl RngCore, population: usize, amount: usize) -> Vec<usize> {
    assert!(amount <= population);
    let mut chosen = HashSet::with_capacity(amount);
    let mut out = Vec::with_capacity(amount);
    for j in population - amount..population {
        let t = uniform_below(rng, j as u64 + 1) as usize;
        let pick = if chosen.contains(&t) { j } else { t };
        chosen.insert(pick);
        out.push(pick);
    }
    out.sort_unstable();
    out
}

/// RNG for draw `index` of a run seeded with `seed`; each index gets its own
/// ChaCha stream so draws can be made in any order.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The canonical clause universe for `n`, kept around for repeated sampling.
#[derive(Debug, Clone)]
pub struct ClauseUniverse {
    n: usize,
    clauses: Vec<Clause>,
}

impl ClauseUniverse {
    pub fn new(n: usize) -> Result<Self, GenerateError> {
        Ok(ClauseUniverse {
            n,
            clauses: enumerate_clauses(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Formula made of the universe clauses at `indices` (ascending).
    pub fn select(&self, indices: &[usize]) -> PcnfFormula {
        let clauses = indices.iter().map(|&i| self.clauses[i]).collect();
        PcnfFormula::from_sorted_unchecked(self.n, clauses)
    }

    /// Uniform `m_clauses`-subset of the universe.
    pub fn sample(&self, m_clauses: usize, rng: &mut impl RngCore) -> Result<PcnfFormula, GenerateError> {
        if m_clauses > self.len() {
            return Err(GenerateError::TooManyClauses {
                requested: m_clauses,
                available: self.len(),
            });
        }
        Ok(self.select(&sample_indices(rng, self.len(), m_clauses)))
    }
}

/// Uniform random `m_clauses`-subset of the clause universe over `n`
/// variables, reproducible from `seed`.
pub fn sample_pcnf(n: usize, m_clauses: usize, seed: u64) -> Result<PcnfFormula, GenerateError> {
    ClauseUniverse::new(n)?.sample(m_clauses, &mut stream_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(f: &PcnfFormula) -> Vec<String> {
        f.clauses()
            .iter()
            .map(|c| c.display(f.num_vars()).to_string())
            .collect()
    }

    #[test]
    fn universe_for_one_and_two_variables() {
        let one = enumerate_clauses(1).unwrap();
        let one: Vec<String> = one.iter().map(|c| c.display(1).to_string()).collect();
        assert_eq!(one, vec!["(~a)", "(a)"]);

        let two = enumerate_clauses(2).unwrap();
        assert_eq!(two.len(), 8);
        assert_eq!(width_histogram(&two, 2), vec![4, 4]);
        assert_eq!(width_histogram(&enumerate_clauses(3).unwrap(), 3), vec![6, 12, 8]);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(enumerate_clauses(0), Err(GenerateError::EnumerationCap { .. })));
        assert!(matches!(enumerate_clauses(13), Err(GenerateError::EnumerationCap { .. })));
    }

    #[test]
    fn max_sat_small_cases() {
        let f = max_sat_construction(2, Assignment::all_true(2)).unwrap();
        assert_eq!(names(&f), vec!["(a)", "(b)", "(a v ~b)", "(~a v b)", "(a v b)"]);
        let f = max_sat_construction(1, Assignment::all_true(1)).unwrap();
        assert_eq!(names(&f), vec!["(a)"]);
        let f = max_sat_construction(3, Assignment::all_true(3)).unwrap();
        assert_eq!(width_histogram(f.clauses(), 3), vec![3, 9, 7]);
    }

    #[test]
    fn double_sat_small_cases() {
        let w = Assignment::all_true(2);
        let f = double_sat_construction(2, w, 0).unwrap();
        assert_eq!(names(&f), vec!["(b)", "(~a v b)", "(a v b)"]);
        let f = double_sat_construction(3, Assignment::all_true(3), 0).unwrap();
        assert_eq!(width_histogram(f.clauses(), 3), vec![2, 7, 6]);
        let f = double_sat_construction(5, Assignment::all_true(5), 0).unwrap();
        assert_eq!(width_histogram(f.clauses(), 5), vec![4, 26, 64, 71, 30]);

        assert_eq!(
            double_sat_construction(1, Assignment::all_true(1), 0),
            Err(GenerateError::NeedsTwoVariables)
        );
        assert_eq!(
            double_sat_construction(2, w, 2),
            Err(GenerateError::FlipOutOfRange { var: 2, n: 2 })
        );
    }

    #[test]
    fn witness_must_fit_universe() {
        let w = Assignment::all_true(3);
        assert!(matches!(
            max_sat_construction(2, w),
            Err(GenerateError::Formula(FormulaError::AssignmentOutOfRange { .. }))
        ));
    }

    #[test]
    fn sampling_edge_cases() {
        assert_eq!(sample_pcnf(3, 26, 7).unwrap().len(), 26);
        assert!(sample_pcnf(2, 0, 7).unwrap().is_empty());
        let f = sample_pcnf(3, 17, 42).unwrap();
        assert_eq!(f.len(), 17);
        assert!(f.clauses().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            sample_pcnf(2, 9, 1),
            Err(GenerateError::TooManyClauses {
                requested: 9,
                available: 8
            })
        );
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_pcnf(4, 30, 99).unwrap(), sample_pcnf(4, 30, 99).unwrap());
        assert_ne!(sample_pcnf(4, 30, 99).unwrap(), sample_pcnf(4, 30, 100).unwrap());
    }

    #[test]
    fn floyd_sampling_covers_population_uniformly() {
        // Each index of 0..10 should be picked in about 3/10 of the draws.
        let mut counts = [0usize; 10];
        let mut rng = stream_rng(5, 0);
        for _ in 0..20_000 {
            for i in sample_indices(&mut rng, 10, 3) {
                counts[i] += 1;
            }
        }
        for c in counts {
            assert!((5_700..6_300).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = stream_rng(1, 2);
        for bound in [1u64, 2, 3, 7, 1 << 40, u64::MAX] {
            for _ in 0..100 {
                assert!(uniform_below(&mut rng, bound) < bound);
            }
        }
    }
}
