//! CNF to PCNF in one pass over the input literals.
//!
//! Each clause is reduced to its literal set, dropped if that set mentions a
//! variable in both polarities, and otherwise added to the output set, which
//! absorbs repeated clauses.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{check_num_vars, Clause, FormulaError, PcnfFormula, RawCnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("input contains an empty clause and has no PCNF image")]
    EmptyClausePresent,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationStats {
    pub input_clauses: usize,
    pub duplicate_literals_removed: usize,
    pub tautologies_dropped: usize,
    pub duplicate_clauses_dropped: usize,
    pub output_clauses: usize,
    /// Number of literal visits performed; equals the input literal count.
    pub literal_visits: usize,
}

pub fn normalize(input: &RawCnf) -> Result<(PcnfFormula, NormalizationStats), NormalizeError> {
    if input.contains_empty_clause() {
        return Err(NormalizeError::EmptyClausePresent);
    }
    check_num_vars(input.num_vars())?;

    let mut stats = NormalizationStats {
        input_clauses: input.clauses().len(),
        ..Default::default()
    };
    let mut seen: HashSet<Clause> = HashSet::with_capacity(input.clauses().len());
    let mut out = Vec::with_capacity(input.clauses().len());

    for lits in input.clauses() {
        let (mut pos, mut neg) = (0u64, 0u64);
        for lit in lits {
            stats.literal_visits += 1;
            let bit = 1u64 << lit.var;
            let side = if lit.negated { &mut neg } else { &mut pos };
            if *side & bit != 0 {
                stats.duplicate_literals_removed += 1;
            }
            *side |= bit;
        }
        if pos & neg != 0 {
            stats.tautologies_dropped += 1;
            continue;
        }
        let clause = Clause::from_masks(pos, neg)?;
        if seen.insert(clause) {
            out.push(clause);
        } else {
            stats.duplicate_clauses_dropped += 1;
        }
    }

    out.sort_unstable();
    stats.output_clauses = out.len();
    Ok((PcnfFormula::from_sorted_unchecked(input.num_vars(), out), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Assignment, Literal};

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    fn raw(n: usize, clauses: &[&[i64]]) -> RawCnf {
        RawCnf::new(
            n,
            clauses
                .iter()
                .map(|c| c.iter().copied().map(lit).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn repeated_literal_collapses() {
        let (f, stats) = normalize(&raw(2, &[&[1, 1, 2]])).unwrap();
        assert_eq!(f.to_string(), "(a v b)");
        assert_eq!(stats.duplicate_literals_removed, 1);
    }

    #[test]
    fn tautology_dropped() {
        let (f, stats) = normalize(&raw(2, &[&[1, -1, 2]])).unwrap();
        assert!(f.is_empty());
        assert_eq!(f.num_vars(), 2);
        assert_eq!(stats.tautologies_dropped, 1);
    }

    #[test]
    fn all_three_rules_together() {
        let input = raw(2, &[&[1, 2], &[2, 1], &[1, 1, -1]]);
        let (f, stats) = normalize(&input).unwrap();
        assert_eq!(f.to_string(), "(a v b)");
        assert_eq!(
            stats,
            NormalizationStats {
                input_clauses: 3,
                duplicate_literals_removed: 1,
                tautologies_dropped: 1,
                duplicate_clauses_dropped: 1,
                output_clauses: 1,
                literal_visits: 7,
            }
        );
        for bits in 0..4 {
            let a = Assignment::new(bits, 2).unwrap();
            assert_eq!(input.satisfied_by(a), f.satisfied_by(a), "bits={bits:02b}");
        }
    }

    #[test]
    fn empty_clause_rejected() {
        let input = RawCnf::new(1, vec![vec![lit(1)], vec![]]).unwrap();
        assert_eq!(normalize(&input), Err(NormalizeError::EmptyClausePresent));
    }

    #[test]
    fn too_many_variables_rejected() {
        let input = RawCnf::new(64, vec![vec![lit(1)]]).unwrap();
        assert!(matches!(
            normalize(&input),
            Err(NormalizeError::Formula(FormulaError::TooManyVariables { .. }))
        ));
    }

    #[test]
    fn normalizing_pcnf_is_identity() {
        let input = raw(3, &[&[-1, 2, -3], &[3], &[1, 2]]);
        let (f, _) = normalize(&input).unwrap();
        let (again, stats) = normalize(&f.to_raw()).unwrap();
        assert_eq!(f, again);
        assert_eq!(stats.duplicate_literals_removed, 0);
        assert_eq!(stats.tautologies_dropped, 0);
        assert_eq!(stats.duplicate_clauses_dropped, 0);
    }
}
