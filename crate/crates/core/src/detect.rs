//! Polynomial-time unsatisfiability screens for PCNF formulas.
//!
//! Three sound rules, each of which can only ever answer "unsatisfiable" or
//! "don't know":
//!
//! * a variable occurring (in either polarity) more than `v(n)` times;
//! * a literal occurring exactly `p(n)` times while its complement occurs
//!   more than `q(n)` times;
//! * a clause class (all clauses over one exact variable set) that contains
//!   all `2^k` polarity patterns, since every assignment falsifies one of them.
//!
//! [`screen_all`] adds the clause-count rule `M > f(n)` on top.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::{classify_range, small, BoundsTable, RangeClass, VarConvention};
use crate::formula::{mask_name, var_name, Literal, PcnfFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Unsatisfiable,
    Unknown,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Unsatisfiable => "unsatisfiable",
            Outcome::Unknown => "unknown",
        }
    }
}

/// Why a rule declared the formula unsatisfiable, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// More clauses than `f(n)`.
    BeyondFinalPoint { clauses: usize, f: u64 },
    /// Variable occurs more than `v(n)` times.
    VariableOccurrence { var: usize, count: usize, v: u64 },
    /// Literal occurs exactly `p(n)` times, its complement more than `q(n)`.
    LiteralOccurrence {
        literal: Literal,
        count: usize,
        complement_count: usize,
        q: u64,
    },
    /// Every polarity pattern over the variable set `key` is present.
    FullClauseClass { key: u64 },
}

impl Reason {
    pub fn describe(&self, num_vars: usize) -> String {
        match self {
            Reason::BeyondFinalPoint { clauses, f } => {
                format!("beyond_f clauses={clauses} f={f}")
            }
            Reason::VariableOccurrence { var, count, v } => {
                format!("variable_occurrence var={} count={count} v={v}", var_name(*var, num_vars))
            }
            Reason::LiteralOccurrence {
                literal,
                count,
                complement_count,
                q,
            } => format!(
                "literal_occurrence literal={} count={count} complement={complement_count} q={q}",
                literal.name(num_vars)
            ),
            Reason::FullClauseClass { key } => {
                format!("clause_class key={}", mask_name(*key, num_vars))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorVerdict {
    pub outcome: Outcome,
    pub reasons: Vec<Reason>,
}

impl DetectorVerdict {
    fn from_reasons(reasons: Vec<Reason>) -> Self {
        let outcome = if reasons.is_empty() {
            Outcome::Unknown
        } else {
            Outcome::Unsatisfiable
        };
        DetectorVerdict { outcome, reasons }
    }
}

/// Per-literal occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OccurrenceCensus {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl OccurrenceCensus {
    pub fn num_vars(&self) -> usize {
        self.positive.len()
    }

    /// Occurrences of `var` in either polarity, i.e. the number of clauses
    /// mentioning it.
    pub fn variable(&self, var: usize) -> usize {
        self.positive[var] + self.negative[var]
    }

    pub fn literal(&self, lit: Literal) -> usize {
        if lit.negated {
            self.negative[lit.var]
        } else {
            self.positive[lit.var]
        }
    }

    pub fn max_literal(&self) -> usize {
        self.positive
            .iter()
            .chain(&self.negative)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Combines counts from two disjoint clause sets.
    pub fn merge(mut self, other: &OccurrenceCensus) -> Self {
        for (a, b) in self.positive.iter_mut().zip(&other.positive) {
            *a += b;
        }
        for (a, b) in self.negative.iter_mut().zip(&other.negative) {
            *a += b;
        }
        self
    }
}

pub fn occurrence_census(formula: &PcnfFormula) -> OccurrenceCensus {
    let n = formula.num_vars();
    let mut census = OccurrenceCensus {
        positive: vec![0; n],
        negative: vec![0; n],
    };
    for c in formula.clauses() {
        for lit in c.literals() {
            if lit.negated {
                census.negative[lit.var] += 1;
            } else {
                census.positive[lit.var] += 1;
            }
        }
    }
    census
}

/// Occurrence-count screen at the formula's declared `n`.
pub fn corollary_screen(formula: &PcnfFormula) -> DetectorVerdict {
    let (_, table) = classify_range(formula, VarConvention::Declared);
    corollary_screen_with(formula, &occurrence_census(formula), &table)
}

/// Occurrence-count screen against an explicit bounds table. The table's `n`
/// must not be smaller than the number of variables occurring in `formula`.
pub fn corollary_screen_with(
    formula: &PcnfFormula,
    census: &OccurrenceCensus,
    table: &BoundsTable,
) -> DetectorVerdict {
    let mut reasons = Vec::new();
    if formula.is_empty() {
        return DetectorVerdict::from_reasons(reasons);
    }
    // Thresholds too large for u64 cannot be reached by any clause count.
    let v = small(&table.v);
    let p = small(&table.p);
    let q = small(&table.q);

    if let Some(p) = p {
        assert!(
            census.max_literal() as u64 <= p,
            "literal occurs more than p(n) = {p} times in a PCNF formula"
        );
    }

    for var in 0..census.num_vars() {
        let count = census.variable(var);
        if let Some(v) = v {
            if count as u64 > v {
                reasons.push(Reason::VariableOccurrence { var, count, v });
            }
        }
        if let (Some(p), Some(q)) = (p, q) {
            for literal in [Literal::positive(var), Literal::negative(var)] {
                let lit_count = census.literal(literal);
                let comp_count = census.literal(literal.complement());
                if lit_count as u64 == p && comp_count as u64 > q {
                    reasons.push(Reason::LiteralOccurrence {
                        literal,
                        count: lit_count,
                        complement_count: comp_count,
                        q,
                    });
                }
            }
        }
    }
    DetectorVerdict::from_reasons(reasons)
}

/// Clause-class counts: `classes` maps a variable set to the number of
/// clauses over exactly that set, `capacity` maps a width `k` to `2^k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClauseClassTable {
    pub classes: BTreeMap<u64, u64>,
    pub capacity: BTreeMap<usize, u64>,
    /// Clauses visited while building the table.
    pub clauses_scanned: usize,
}

impl ClauseClassTable {
    /// `classes` keyed by variable names (`"ab"`), for reports.
    pub fn named_classes(&self, num_vars: usize) -> BTreeMap<String, u64> {
        self.classes
            .iter()
            .map(|(&k, &v)| (mask_name(k, num_vars), v))
            .collect()
    }

    pub fn named_capacity(&self) -> BTreeMap<String, u64> {
        self.capacity
            .iter()
            .map(|(k, &v)| (k.to_string(), v))
            .collect()
    }

    /// Keys whose count reaches their width's capacity, ascending by mask.
    pub fn full_classes(&self) -> Vec<u64> {
        self.classes
            .iter()
            .filter(|(&key, &count)| self.capacity.get(&(key.count_ones() as usize)) == Some(&count))
            .map(|(&key, _)| key)
            .collect()
    }

    fn record(&mut self, key: u64) -> bool {
        self.clauses_scanned += 1;
        let width = key.count_ones() as usize;
        let cap = *self.capacity.entry(width).or_insert(1u64 << width);
        let count = self.classes.entry(key).or_insert(0);
        *count += 1;
        *count == cap
    }

    pub fn merge(mut self, other: &ClauseClassTable) -> Self {
        for (&k, &v) in &other.classes {
            *self.classes.entry(k).or_insert(0) += v;
        }
        for (&k, &v) in &other.capacity {
            self.capacity.insert(k, v);
        }
        self.clauses_scanned += other.clauses_scanned;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassScreenMode {
    /// Stop scanning as soon as a class fills up.
    pub early_exit: bool,
}

/// Builds the clause-class table in one pass, then reports every class that
/// holds all of its polarity patterns.
pub fn clause_class_screen(
    formula: &PcnfFormula,
    mode: ClassScreenMode,
) -> (DetectorVerdict, ClauseClassTable) {
    let mut table = ClauseClassTable::default();
    for c in formula.clauses() {
        if table.record(c.var_mask()) && mode.early_exit {
            let reasons = vec![Reason::FullClauseClass { key: c.var_mask() }];
            return (DetectorVerdict::from_reasons(reasons), table);
        }
    }
    let reasons = table
        .full_classes()
        .into_iter()
        .map(|key| Reason::FullClauseClass { key })
        .collect();
    (DetectorVerdict::from_reasons(reasons), table)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScreenOptions {
    pub convention: VarConvention,
    pub early_exit: bool,
}

/// Combined result of all screens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Screening {
    pub range: RangeClass,
    pub bounds: BoundsTable,
    pub census: OccurrenceCensus,
    pub corollary: DetectorVerdict,
    pub clause_class: DetectorVerdict,
    pub class_table: ClauseClassTable,
    pub outcome: Outcome,
    /// Every fired rule: clause count first, then occurrences, then classes.
    pub reasons: Vec<Reason>,
}

pub fn screen_all(formula: &PcnfFormula, options: ScreenOptions) -> Screening {
    let (range, bounds) = classify_range(formula, options.convention);
    let census = occurrence_census(formula);
    let corollary = corollary_screen_with(formula, &census, &bounds);
    let (clause_class, class_table) = clause_class_screen(
        formula,
        ClassScreenMode {
            early_exit: options.early_exit,
        },
    );

    let mut reasons = Vec::new();
    if range == RangeClass::BeyondF {
        reasons.push(Reason::BeyondFinalPoint {
            clauses: formula.len(),
            f: small(&bounds.f).expect("f(n) below a clause count fits in u64"),
        });
    }
    reasons.extend(corollary.reasons.iter().cloned());
    reasons.extend(clause_class.reasons.iter().cloned());
    let outcome = if reasons.is_empty() {
        Outcome::Unknown
    } else {
        Outcome::Unsatisfiable
    };
    Screening {
        range,
        bounds,
        census,
        corollary,
        clause_class,
        class_table,
        outcome,
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn clause(lits: &[i64]) -> Clause {
        let lits: Vec<Literal> = lits.iter().map(|&l| Literal::from_dimacs(l).unwrap()).collect();
        Clause::from_literals(&lits).unwrap()
    }

    fn formula(n: usize, clauses: &[&[i64]]) -> PcnfFormula {
        PcnfFormula::new(n, clauses.iter().map(|c| clause(c))).unwrap()
    }

    #[test]
    fn census_of_empty_formula_is_zero() {
        let census = occurrence_census(&PcnfFormula::empty(3).unwrap());
        assert_eq!(census.positive, vec![0; 3]);
        assert_eq!(census.negative, vec![0; 3]);
    }

    #[test]
    fn all_clauses_on_one_variable_trip_the_variable_rule() {
        // Every clause over {a, b} that mentions a: 2 * 3^(n-1) = 6 of them.
        let f = formula(2, &[&[1], &[-1], &[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        let verdict = corollary_screen(&f);
        assert_eq!(verdict.outcome, Outcome::Unsatisfiable);
        assert_eq!(
            verdict.reasons[0],
            Reason::VariableOccurrence {
                var: 0,
                count: 6,
                v: 4
            }
        );
        assert_eq!(verdict.reasons[0].describe(2), "variable_occurrence var=a count=6 v=4");
    }

    #[test]
    fn saturated_literal_with_heavy_complement_trips_the_literal_rule() {
        // n = 2: p = 3, q = 1. All three clauses containing a, plus two
        // containing ~a; b occurs only 4 times so the variable rule stays
        // quiet for b but a reaches 5 > v = 4 as well.
        let f = formula(2, &[&[1], &[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        let verdict = corollary_screen(&f);
        assert!(verdict.reasons.contains(&Reason::LiteralOccurrence {
            literal: Literal::positive(0),
            count: 3,
            complement_count: 2,
            q: 1,
        }));
    }

    #[test]
    fn unit_clause_is_unknown() {
        let f = formula(1, &[&[1]]);
        assert_eq!(corollary_screen(&f).outcome, Outcome::Unknown);
        assert_eq!(clause_class_screen(&f, ClassScreenMode::default()).0.outcome, Outcome::Unknown);
        assert_eq!(screen_all(&f, ScreenOptions::default()).outcome, Outcome::Unknown);
    }

    #[test]
    fn complementary_units_fill_class_a() {
        let f = formula(1, &[&[1], &[-1]]);
        let (verdict, table) = clause_class_screen(&f, ClassScreenMode::default());
        assert_eq!(verdict.outcome, Outcome::Unsatisfiable);
        assert_eq!(verdict.reasons, vec![Reason::FullClauseClass { key: 0b1 }]);
        assert_eq!(verdict.reasons[0].describe(1), "clause_class key=a");
        assert_eq!(table.named_classes(1), BTreeMap::from([("a".into(), 2)]));
        assert_eq!(table.named_capacity(), BTreeMap::from([("1".into(), 2)]));
    }

    #[test]
    fn full_width_three_class() {
        let clauses: Vec<Clause> = (0u64..8)
            .map(|pos| Clause::from_masks(pos, 0b111 & !pos).unwrap())
            .collect();
        let f = PcnfFormula::new(3, clauses).unwrap();
        let (verdict, table) = clause_class_screen(&f, ClassScreenMode::default());
        assert_eq!(verdict.outcome, Outcome::Unsatisfiable);
        assert_eq!(table.named_classes(3), BTreeMap::from([("abc".into(), 8)]));
        assert_eq!(table.named_capacity(), BTreeMap::from([("3".into(), 8)]));
    }

    #[test]
    fn reports_every_full_class_or_stops_at_first() {
        let f = formula(2, &[&[1], &[-1], &[2], &[-2]]);
        let (all, table) = clause_class_screen(&f, ClassScreenMode::default());
        assert_eq!(all.reasons.len(), 2);
        assert_eq!(table.clauses_scanned, 4);

        let (first, partial) = clause_class_screen(&f, ClassScreenMode { early_exit: true });
        assert_eq!(first.reasons.len(), 1);
        assert!(partial.clauses_scanned < 4);
    }

    #[test]
    fn beyond_f_fires_in_screen_all() {
        // Six of the eight clauses over two variables; f(2) = 5.
        let f = formula(2, &[&[1], &[2], &[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        let s = screen_all(&f, ScreenOptions::default());
        assert_eq!(s.range, RangeClass::BeyondF);
        assert_eq!(s.outcome, Outcome::Unsatisfiable);
        assert_eq!(s.reasons[0], Reason::BeyondFinalPoint { clauses: 6, f: 5 });
    }

    #[test]
    fn occurring_convention_tightens_bounds() {
        // Over a declared universe of 4 variables, 6 clauses on {a, b} are
        // below f(4); recounting n as 2 puts them beyond f(2).
        let f = formula(4, &[&[1], &[2], &[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        let declared = screen_all(&f, ScreenOptions::default());
        assert_eq!(declared.range, RangeClass::BelowRange);
        let recounted = screen_all(
            &f,
            ScreenOptions {
                convention: VarConvention::Occurring,
                early_exit: false,
            },
        );
        assert_eq!(recounted.range, RangeClass::BeyondF);
        assert_eq!(recounted.outcome, Outcome::Unsatisfiable);
    }

    #[test]
    fn merges_are_associative_with_scan() {
        let f = formula(3, &[&[1], &[-2], &[1, 3], &[-1, -3], &[1, 2, 3], &[-1, 2, -3]]);
        let (left, right) = f.clauses().split_at(2);
        let lf = PcnfFormula::new(3, left.iter().copied()).unwrap();
        let rf = PcnfFormula::new(3, right.iter().copied()).unwrap();
        assert_eq!(
            occurrence_census(&lf).merge(&occurrence_census(&rf)),
            occurrence_census(&f)
        );
        let mode = ClassScreenMode::default();
        assert_eq!(
            clause_class_screen(&lf, mode).1.merge(&clause_class_screen(&rf, mode).1),
            clause_class_screen(&f, mode).1
        );
    }
}
