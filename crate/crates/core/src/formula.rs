//! Literals, clauses, formulas and assignments.
//!
//! A [`Clause`] is stored as two variable masks, one per polarity, so every
//! counting and evaluation routine in the crate works on machine words.
//! Variables are 0-indexed; DIMACS 1-indexing is handled in [`crate::dimacs`].

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Largest variable count a mask-backed formula can hold.
pub const MAX_VARS: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{num_vars} variables exceeds the supported maximum of {max}")]
    TooManyVariables { num_vars: usize, max: usize },
    #[error("variable index {var} is outside the universe of {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("a clause needs at least one literal")]
    EmptyClause,
    #[error("variable {var} appears in both polarities")]
    ComplementaryLiterals { var: usize },
    #[error("variable {var} appears more than once")]
    DuplicateLiteral { var: usize },
    #[error("clause {0} appears more than once")]
    DuplicateClause(String),
    #[error("assignment sets bits above variable {num_vars}")]
    AssignmentOutOfRange { num_vars: usize },
}

pub(crate) fn check_num_vars(num_vars: usize) -> Result<(), FormulaError> {
    if num_vars > MAX_VARS {
        return Err(FormulaError::TooManyVariables {
            num_vars,
            max: MAX_VARS,
        });
    }
    Ok(())
}

/// Mask with the low `num_vars` bits set.
pub fn universe_mask(num_vars: usize) -> u64 {
    if num_vars >= 64 {
        u64::MAX
    } else {
        (1u64 << num_vars) - 1
    }
}

/// Human-readable variable name: `a`..`z` while the universe fits the
/// alphabet, otherwise the 1-based DIMACS index.
pub fn var_name(var: usize, num_vars: usize) -> String {
    if num_vars <= 26 {
        char::from(b'a' + var as u8).to_string()
    } else {
        (var + 1).to_string()
    }
}

/// Concatenated variable names of a mask, e.g. `abc`; used as the clause
/// class key in reports.
pub fn mask_name(mask: u64, num_vars: usize) -> String {
    let names = bits(mask).map(|v| var_name(v, num_vars));
    if num_vars <= 26 {
        names.collect()
    } else {
        names.collect::<Vec<_>>().join(",")
    }
}

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn negative(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Converts a nonzero signed DIMACS literal.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        let var = (lit.unsigned_abs() - 1) as usize;
        Some(Literal {
            var,
            negated: lit < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn name(self, num_vars: usize) -> String {
        let v = var_name(self.var, num_vars);
        if self.negated {
            format!("~{v}")
        } else {
            v
        }
    }
}

/// A PCNF clause: a nonempty set of literals with no variable in both
/// polarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    pos: u64,
    neg: u64,
}

impl Clause {
    pub fn from_masks(pos: u64, neg: u64) -> Result<Self, FormulaError> {
        if pos & neg != 0 {
            return Err(FormulaError::ComplementaryLiterals {
                var: (pos & neg).trailing_zeros() as usize,
            });
        }
        if pos | neg == 0 {
            return Err(FormulaError::EmptyClause);
        }
        if (pos | neg) >> MAX_VARS != 0 {
            return Err(FormulaError::VariableOutOfRange {
                var: 63,
                num_vars: MAX_VARS,
            });
        }
        Ok(Clause { pos, neg })
    }

    /// Builds a clause from distinct literals. Repeated or complementary
    /// literals are rejected; use [`crate::normalize`] for raw input.
    pub fn from_literals(lits: &[Literal]) -> Result<Self, FormulaError> {
        let (mut pos, mut neg) = (0u64, 0u64);
        for lit in lits {
            if lit.var >= MAX_VARS {
                return Err(FormulaError::VariableOutOfRange {
                    var: lit.var,
                    num_vars: MAX_VARS,
                });
            }
            let bit = 1u64 << lit.var;
            if (pos | neg) & bit != 0 {
                return Err(if (lit.negated && pos & bit != 0) || (!lit.negated && neg & bit != 0) {
                    FormulaError::ComplementaryLiterals { var: lit.var }
                } else {
                    FormulaError::DuplicateLiteral { var: lit.var }
                });
            }
            if lit.negated {
                neg |= bit;
            } else {
                pos |= bit;
            }
        }
        Clause::from_masks(pos, neg)
    }

    pub fn pos_mask(&self) -> u64 {
        self.pos
    }

    pub fn neg_mask(&self) -> u64 {
        self.neg
    }

    /// Polarity-stripped variable set.
    pub fn var_mask(&self) -> u64 {
        self.pos | self.neg
    }

    pub fn width(&self) -> usize {
        self.var_mask().count_ones() as usize
    }

    /// Highest variable index mentioned.
    pub fn max_var(&self) -> usize {
        63 - self.var_mask().leading_zeros() as usize
    }

    pub fn satisfied_by(&self, a: Assignment) -> bool {
        a.0 & self.pos != 0 || !a.0 & self.neg != 0
    }

    /// Variables of the clause in ascending order with negations removed.
    pub fn canonical_key(&self) -> Vec<usize> {
        bits(self.var_mask()).collect()
    }

    /// Literals in ascending variable order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        bits(self.var_mask()).map(move |var| Literal {
            var,
            negated: self.neg >> var & 1 == 1,
        })
    }

    pub fn display(&self, num_vars: usize) -> ClauseDisplay {
        ClauseDisplay {
            clause: *self,
            num_vars,
        }
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.width(), self.pos, self.neg).cmp(&(other.width(), other.pos, other.neg))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct ClauseDisplay {
    clause: Clause,
    num_vars: usize,
}

impl fmt::Display for ClauseDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self
            .clause
            .literals()
            .map(|l| l.name(self.num_vars))
            .collect();
        write!(f, "({})", lits.join(" v "))
    }
}

/// Truth assignment; bit `i` is the value of variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(u64);

impl Assignment {
    pub fn new(bits: u64, num_vars: usize) -> Result<Self, FormulaError> {
        check_num_vars(num_vars)?;
        if bits & !universe_mask(num_vars) != 0 {
            return Err(FormulaError::AssignmentOutOfRange { num_vars });
        }
        Ok(Assignment(bits))
    }

    pub(crate) fn from_bits_unchecked(bits: u64) -> Self {
        Assignment(bits)
    }

    pub fn all_true(num_vars: usize) -> Self {
        Assignment(universe_mask(num_vars))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn value(self, var: usize) -> bool {
        self.0 >> var & 1 == 1
    }

    pub fn flipped(self, var: usize) -> Self {
        Assignment(self.0 ^ (1u64 << var))
    }

    /// Renders as `a=1 b=0 ...` style bits, lowest variable first.
    pub fn to_bit_string(self, num_vars: usize) -> String {
        (0..num_vars)
            .map(|v| if self.value(v) { '1' } else { '0' })
            .collect()
    }
}

/// Unprocessed CNF as read from input: literal lists may repeat literals,
/// contain complementary pairs, or repeat whole clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCnf {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
    contains_empty_clause: bool,
}

impl RawCnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        for lit in clauses.iter().flatten() {
            if lit.var >= num_vars {
                return Err(FormulaError::VariableOutOfRange {
                    var: lit.var,
                    num_vars,
                });
            }
        }
        let contains_empty_clause = clauses.iter().any(Vec::is_empty);
        Ok(RawCnf {
            num_vars,
            clauses,
            contains_empty_clause,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn contains_empty_clause(&self) -> bool {
        self.contains_empty_clause
    }

    /// Same formula with every empty clause removed.
    pub fn without_empty_clauses(&self) -> RawCnf {
        RawCnf {
            num_vars: self.num_vars,
            clauses: self
                .clauses
                .iter()
                .filter(|c| !c.is_empty())
                .cloned()
                .collect(),
            contains_empty_clause: false,
        }
    }

    /// Literal-by-literal evaluation; independent of the mask encoding.
    pub fn satisfied_by(&self, a: Assignment) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| a.value(l.var) != l.negated))
    }
}

/// A conjunction of unique PCNF clauses over `num_vars` variables, kept in
/// canonical `(width, pos_mask, neg_mask)` order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PcnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl PcnfFormula {
    pub fn new<I>(num_vars: usize, clauses: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = Clause>,
    {
        check_num_vars(num_vars)?;
        let universe = universe_mask(num_vars);
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        for c in &clauses {
            if c.var_mask() & !universe != 0 {
                return Err(FormulaError::VariableOutOfRange {
                    var: c.max_var(),
                    num_vars,
                });
            }
        }
        clauses.sort_unstable();
        if let Some(w) = clauses.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormulaError::DuplicateClause(
                w[0].display(num_vars).to_string(),
            ));
        }
        Ok(PcnfFormula { num_vars, clauses })
    }

    /// Caller guarantees the clauses are in range, sorted and unique.
    pub(crate) fn from_sorted_unchecked(num_vars: usize, clauses: Vec<Clause>) -> Self {
        debug_assert!(clauses.windows(2).all(|w| w[0] < w[1]));
        PcnfFormula { num_vars, clauses }
    }

    pub fn empty(num_vars: usize) -> Result<Self, FormulaError> {
        PcnfFormula::new(num_vars, [])
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
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

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.binary_search(clause).is_ok()
    }

    /// Returns a copy with `clause` added, or `None` if it is already present.
    pub fn with_clause(&self, clause: Clause) -> Result<Option<Self>, FormulaError> {
        if self.contains(&clause) {
            return Ok(None);
        }
        let mut clauses = self.clauses.clone();
        clauses.push(clause);
        PcnfFormula::new(self.num_vars, clauses).map(Some)
    }

    pub fn satisfied_by(&self, a: Assignment) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(a))
    }

    /// Union of the variable sets of all clauses.
    pub fn occurring_vars(&self) -> u64 {
        self.clauses.iter().fold(0, |acc, c| acc | c.var_mask())
    }

    pub fn distinct_var_count(&self) -> usize {
        self.occurring_vars().count_ones() as usize
    }

    pub fn to_raw(&self) -> RawCnf {
        RawCnf {
            num_vars: self.num_vars,
            clauses: self.clauses.iter().map(|c| c.literals().collect()).collect(),
            contains_empty_clause: false,
        }
    }
}

impl fmt::Display for PcnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| c.display(self.num_vars).to_string())
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn clause(lits: &[(usize, bool)]) -> Clause {
        let lits: Vec<Literal> = lits
            .iter()
            .map(|&(var, negated)| Literal { var, negated })
            .collect();
        Clause::from_literals(&lits).unwrap()
    }

    #[test]
    fn unit_clause_semantics() {
        let a_true = Assignment::new(0b1, 1).unwrap();
        assert!(clause(&[(A, false)]).satisfied_by(a_true));
        assert!(!clause(&[(A, true)]).satisfied_by(a_true));
    }

    #[test]
    fn all_negative_clause_falsified_by_all_true() {
        let c = clause(&[(A, true), (B, true), (C, true)]);
        assert!(!c.satisfied_by(Assignment::all_true(3)));
    }

    #[test]
    fn canonical_key_strips_polarity() {
        assert_eq!(clause(&[(A, false), (B, true)]).canonical_key(), vec![A, B]);
        assert_eq!(clause(&[(C, true)]).canonical_key(), vec![C]);
        assert_eq!(
            clause(&[(C, true), (A, true), (B, false)]).canonical_key(),
            vec![A, B, C]
        );
    }

    #[test]
    fn rejects_invalid_clauses() {
        assert_eq!(Clause::from_masks(0, 0), Err(FormulaError::EmptyClause));
        assert_eq!(
            Clause::from_masks(0b10, 0b10),
            Err(FormulaError::ComplementaryLiterals { var: 1 })
        );
        assert_eq!(
            Clause::from_literals(&[Literal::positive(0), Literal::positive(0)]),
            Err(FormulaError::DuplicateLiteral { var: 0 })
        );
        assert_eq!(
            Clause::from_literals(&[Literal::positive(2), Literal::negative(2)]),
            Err(FormulaError::ComplementaryLiterals { var: 2 })
        );
    }

    #[test]
    fn full_positive_clause_satisfied_by_every_nonzero_assignment() {
        for n in 1..=6 {
            let c = Clause::from_masks(universe_mask(n), 0).unwrap();
            assert!(!c.satisfied_by(Assignment::new(0, n).unwrap()));
            for bits in 1..(1u64 << n) {
                assert!(c.satisfied_by(Assignment::new(bits, n).unwrap()));
            }
        }
    }

    #[test]
    fn each_assignment_falsifies_exactly_one_pattern_of_a_class() {
        for k in 1..=4usize {
            let vars = universe_mask(k);
            for bits in 0..(1u64 << k) {
                let a = Assignment::new(bits, k).unwrap();
                let falsified = (0..=vars)
                    .filter(|p| p & !vars == 0)
                    .map(|p| Clause::from_masks(p, vars & !p).unwrap())
                    .filter(|c| !c.satisfied_by(a))
                    .count();
                assert_eq!(falsified, 1, "k={k} a={bits:b}");
            }
        }
    }

    #[test]
    fn formula_rejects_duplicates_and_out_of_range() {
        let ab = clause(&[(A, false), (B, false)]);
        assert!(matches!(
            PcnfFormula::new(2, [ab, ab]),
            Err(FormulaError::DuplicateClause(_))
        ));
        assert_eq!(
            PcnfFormula::new(1, [ab]),
            Err(FormulaError::VariableOutOfRange { var: 1, num_vars: 1 })
        );
        assert!(matches!(
            PcnfFormula::empty(64),
            Err(FormulaError::TooManyVariables { .. })
        ));
    }

    #[test]
    fn canonical_order_is_width_then_masks() {
        let f = PcnfFormula::new(
            2,
            [
                clause(&[(A, false), (B, false)]),
                clause(&[(B, true)]),
                clause(&[(A, false)]),
            ],
        )
        .unwrap();
        let widths: Vec<usize> = f.clauses().iter().map(Clause::width).collect();
        assert_eq!(widths, vec![1, 1, 2]);
        assert_eq!(f.clauses()[0], clause(&[(B, true)]));
        assert_eq!(f.to_string(), "(~b) & (a) & (a v b)");
    }

    #[test]
    fn dimacs_literal_conversion() {
        assert_eq!(Literal::from_dimacs(-3), Some(Literal::negative(2)));
        assert_eq!(Literal::from_dimacs(0), None);
        assert_eq!(Literal::negative(2).to_dimacs(), -3);
    }

    #[test]
    fn names_switch_to_indices_past_the_alphabet() {
        assert_eq!(var_name(2, 3), "c");
        assert_eq!(var_name(2, 27), "3");
        assert_eq!(mask_name(0b101, 3), "ac");
        assert_eq!(mask_name(0b101, 30), "1,3");
    }

    #[test]
    fn raw_cnf_validates_range_and_flags_empty() {
        let raw = RawCnf::new(1, vec![vec![Literal::positive(0)], vec![]]).unwrap();
        assert!(raw.contains_empty_clause());
        assert!(!raw.without_empty_clauses().contains_empty_clause());
        assert!(RawCnf::new(1, vec![vec![Literal::negative(1)]]).is_err());
    }
}
