//! Clause-count bounds for PCNF formulas over `n` variables.
//!
//! | quantity | closed form | meaning |
//! |---|---|---|
//! | `m` | `3^n - 1` | size of the clause universe |
//! | `r` | `2^n - 1` | clauses falsified by one fixed assignment |
//! | `f` | `3^n - 2^n` | more clauses than this: unsatisfiable |
//! | `s` | `2^(n-1)` | further clauses falsified by flipping one variable |
//! | `g` | `3^n - 2^n - 2^(n-1)` | more clauses than this: at most one model |
//! | `v` | `2*3^(n-1) - 2^(n-1)` | max occurrences of a variable in a satisfiable formula |
//! | `p` | `3^(n-1)` | max occurrences of a literal |
//! | `q` | `3^(n-1) - 2^(n-1)` | complement threshold paired with `p` |
//!
//! Every value is an exact big integer so the table stays valid far past the
//! 63-variable limit of the mask encoding.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formula::PcnfFormula;

/// Largest `n` accepted by [`bounds_for`].
pub const MAX_BOUNDS_N: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("bounds need at least one variable")]
    ZeroVariables,
    #[error("n = {n} exceeds the supported maximum of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("the double-satisfiability construction needs n >= 2")]
    DoubleSatNeedsTwoVariables,
    #[error("closed form and summation form of {0} disagree")]
    Inconsistent(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsTable {
    pub n: usize,
    pub m: BigUint,
    pub f: BigUint,
    pub g: BigUint,
    pub r: BigUint,
    pub s: BigUint,
    pub v: BigUint,
    pub p: BigUint,
    pub q: BigUint,
}

fn check_n(n: usize) -> Result<(), BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroVariables);
    }
    if n > MAX_BOUNDS_N {
        return Err(BoundsError::TooLarge {
            n,
            max: MAX_BOUNDS_N,
        });
    }
    Ok(())
}

fn pow(base: u32, exp: usize) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

impl BoundsTable {
    /// Builds the table from closed forms only.
    pub fn closed_form(n: usize) -> Result<Self, BoundsError> {
        check_n(n)?;
        let three_n = pow(3, n);
        let two_n = pow(2, n);
        let three_prev = pow(3, n - 1);
        let two_prev = pow(2, n - 1);

        let m = &three_n - 1u32;
        let f = &three_n - &two_n;
        let g = &f - &two_prev;
        Ok(BoundsTable {
            n,
            r: &two_n - 1u32,
            s: two_prev.clone(),
            v: &three_prev * 2u32 - &two_prev,
            q: &three_prev - &two_prev,
            p: three_prev,
            m,
            f,
            g,
        })
    }

    pub fn classify(&self, num_clauses: usize) -> RangeClass {
        let count = BigUint::from(num_clauses);
        if count > self.f {
            RangeClass::BeyondF
        } else if count > self.g {
            RangeClass::NaturalRange
        } else {
            RangeClass::BelowRange
        }
    }
}

/// `[C(n,0), ..., C(n,n)]`.
pub fn pascal_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
    row
}

/// The counting sums as they arise from the clause-by-width argument,
/// without using any closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummationForms {
    pub m: BigUint,
    pub r: BigUint,
    pub s: BigUint,
    pub f: BigUint,
    pub g: BigUint,
}

pub fn summation_forms(n: usize) -> Result<SummationForms, BoundsError> {
    check_n(n)?;
    let row = pascal_row(n);
    let prev = pascal_row(n - 1);

    let mut m = BigUint::zero();
    let mut r = BigUint::zero();
    let mut two_i = BigUint::one();
    for c in row.iter().skip(1) {
        two_i <<= 1;
        m += &two_i * c;
        r += c;
    }
    let s: BigUint = prev.iter().sum();
    let f = &m - &r;
    let g = &f - &s;
    Ok(SummationForms { m, r, s, f, g })
}

/// Full table for `n`, with the summation forms cross-checked against the
/// closed forms.
pub fn bounds_for(n: usize) -> Result<BoundsTable, BoundsError> {
    let table = BoundsTable::closed_form(n)?;
    let sums = summation_forms(n)?;
    let checks = [
        ("m", &sums.m, &table.m),
        ("r", &sums.r, &table.r),
        ("s", &sums.s, &table.s),
        ("f", &sums.f, &table.f),
        ("g", &sums.g, &table.g),
    ];
    for (name, sum, closed) in checks {
        if sum != closed {
            return Err(BoundsError::Inconsistent(name));
        }
    }
    if table.v != &table.p + &table.q {
        return Err(BoundsError::Inconsistent("v"));
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeClass {
    /// `M > f(n)`: no model.
    BeyondF,
    /// `g(n) < M <= f(n)`: at most one model.
    NaturalRange,
    /// `M <= g(n)`: the count alone says nothing about the models.
    BelowRange,
}

impl RangeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RangeClass::BeyondF => "beyond_f",
            RangeClass::NaturalRange => "natural_range",
            RangeClass::BelowRange => "below_range",
        }
    }
}

/// Which `n` the bounds are evaluated at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VarConvention {
    /// The declared variable universe.
    #[default]
    Declared,
    /// Only variables that occur in some clause.
    Occurring,
}

/// Variable count used for classification. An empty universe is treated as
/// `n = 1`, where `g(1) = 0` puts the empty formula below the range.
pub fn effective_n(formula: &PcnfFormula, convention: VarConvention) -> usize {
    let n = match convention {
        VarConvention::Declared => formula.num_vars(),
        VarConvention::Occurring => formula.distinct_var_count(),
    };
    n.max(1)
}

pub fn classify_range(
    formula: &PcnfFormula,
    convention: VarConvention,
) -> (RangeClass, BoundsTable) {
    let n = effective_n(formula, convention);
    // n <= 63 for any PcnfFormula, well inside the table's limit.
    let table = BoundsTable::closed_form(n).expect("formula variable count is within bounds");
    (table.classify(formula.len()), table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Every PCNF clause.
    All,
    /// Clauses satisfied by one assignment.
    MaxSat,
    /// Clauses satisfied by two assignments differing in one variable.
    DoubleSat,
}

/// Clause counts by width `1..=n` for one of the extremal constructions.
pub fn clause_distribution(n: usize, construction: Construction) -> Result<Vec<BigUint>, BoundsError> {
    check_n(n)?;
    if construction == Construction::DoubleSat && n < 2 {
        return Err(BoundsError::DoubleSatNeedsTwoVariables);
    }
    let row = pascal_row(n);
    let prev = pascal_row(n - 1);
    Ok((1..=n)
        .map(|k| {
            let all = pow(2, k) * &row[k];
            match construction {
                Construction::All => all,
                Construction::MaxSat => all - &row[k],
                Construction::DoubleSat => all - &row[k] - &prev[k - 1],
            }
        })
        .collect())
}

/// Converts a bound to `u64`, `None` when it does not fit.
pub fn small(value: &BigUint) -> Option<u64> {
    value.to_u64()
}
