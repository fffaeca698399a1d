//! Exhaustive model counting.
//!
//! Assignments are visited in blocks of 64: variables `0..6` vary inside a
//! block and are represented by fixed bit patterns, higher variables are
//! constant across the block. Each clause is reduced to a 64-bit word of the
//! assignments in the block that satisfy it, and the block's model word is
//! the AND over all clauses, stopping at the first clause that empties it.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Assignment, Clause, PcnfFormula, MAX_VARS};

pub const DEFAULT_ORACLE_MAX_N: usize = 24;
pub const DEFAULT_MODEL_RETENTION: usize = 4;

/// Blocks per parallel work unit.
const CHUNK_BLOCKS: u64 = 1 << 10;

/// Value of variable `i < 6` at each position of a 64-assignment block.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{num_vars} variables exceeds the oracle limit of {max_n}")]
    TooManyVariables { num_vars: usize, max_n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_n: usize,
    /// Models are listed only while the count stays at or below this.
    pub retain: usize,
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: DEFAULT_ORACLE_MAX_N,
            retain: DEFAULT_MODEL_RETENTION,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVerdict {
    Unsat,
    Unique,
    Multiple,
}

impl ModelVerdict {
    pub fn from_count(count: u64) -> Self {
        match count {
            0 => ModelVerdict::Unsat,
            1 => ModelVerdict::Unique,
            _ => ModelVerdict::Multiple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub model_count: u64,
    /// All models in ascending order when `model_count <= retain`, else empty.
    pub models: Vec<Assignment>,
}

impl OracleResult {
    pub fn verdict(&self) -> ModelVerdict {
        ModelVerdict::from_count(self.model_count)
    }
}

pub fn solve(formula: &PcnfFormula, config: &OracleConfig) -> Result<OracleResult, OracleError> {
    let max_n = config.max_n.min(MAX_VARS);
    if formula.num_vars() > max_n {
        return Err(OracleError::TooManyVariables {
            num_vars: formula.num_vars(),
            max_n,
        });
    }
    Ok(count_models(
        formula.num_vars(),
        formula.clauses(),
        config.retain,
        config.parallel,
    ))
}

#[derive(Clone, Copy)]
struct PackedClause {
    hi_pos: u64,
    hi_neg: u64,
    low_word: u64,
}

impl PackedClause {
    fn new(c: &Clause) -> Self {
        let mut low_word = 0;
        for (i, pattern) in LOW_PATTERNS.iter().enumerate() {
            if c.pos_mask() >> i & 1 == 1 {
                low_word |= pattern;
            }
            if c.neg_mask() >> i & 1 == 1 {
                low_word |= !pattern;
            }
        }
        PackedClause {
            hi_pos: c.pos_mask() >> 6,
            hi_neg: c.neg_mask() >> 6,
            low_word,
        }
    }
}

struct Partial {
    count: u64,
    models: Vec<Assignment>,
}

fn scan_blocks(clauses: &[PackedClause], valid: u64, blocks: std::ops::Range<u64>, keep: usize) -> Partial {
    let mut out = Partial {
        count: 0,
        models: Vec::new(),
    };
    for block in blocks {
        let mut alive = valid;
        for c in clauses {
            if block & c.hi_pos != 0 || !block & c.hi_neg != 0 {
                continue;
            }
            alive &= c.low_word;
            if alive == 0 {
                break;
            }
        }
        out.count += alive.count_ones() as u64;
        let mut rest = alive;
        while rest != 0 && out.models.len() < keep {
            let j = rest.trailing_zeros() as u64;
            rest &= rest - 1;
            out.models.push(Assignment::from_bits_unchecked(block << 6 | j));
        }
    }
    out
}

/// Counts models of the conjunction of `clauses` over `num_vars` variables.
/// No size limit beyond the mask width; callers enforce their own caps.
pub fn count_models(num_vars: usize, clauses: &[Clause], retain: usize, parallel: bool) -> OracleResult {
    assert!(num_vars <= MAX_VARS, "oracle called with {num_vars} variables");
    let packed: Vec<PackedClause> = clauses.iter().map(PackedClause::new).collect();
    let (valid, blocks) = if num_vars < 6 {
        ((1u64 << (1u32 << num_vars)) - 1, 1u64)
    } else {
        (u64::MAX, 1u64 << (num_vars - 6))
    };
    // One model past the retention cap is enough to know the list is not kept.
    let keep = retain.saturating_add(1);

    let merged = if parallel && blocks > CHUNK_BLOCKS {
        let chunks: Vec<Partial> = (0..blocks.div_ceil(CHUNK_BLOCKS))
            .into_par_iter()
            .map(|i| {
                let start = i * CHUNK_BLOCKS;
                let end = (start + CHUNK_BLOCKS).min(blocks);
                scan_blocks(&packed, valid, start..end, keep)
            })
            .collect();
        let mut merged = Partial {
            count: 0,
            models: Vec::new(),
        };
        for chunk in chunks {
            merged.count += chunk.count;
            let room = keep - merged.models.len().min(keep);
            merged.models.extend(chunk.models.into_iter().take(room));
        }
        merged
    } else {
        scan_blocks(&packed, valid, 0..blocks, keep)
    };

    let models = if merged.count <= retain as u64 {
        merged.models
    } else {
        Vec::new()
    };
    OracleResult {
        model_count: merged.count,
        models,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Literal;

    fn clause(lits: &[i64]) -> Clause {
        let lits: Vec<Literal> = lits.iter().map(|&l| Literal::from_dimacs(l).unwrap()).collect();
        Clause::from_literals(&lits).unwrap()
    }

    fn solve_default(f: &PcnfFormula) -> OracleResult {
        solve(f, &OracleConfig::default()).unwrap()
    }

    #[test]
    fn empty_formula_counts_every_assignment() {
        let r = solve_default(&PcnfFormula::empty(3).unwrap());
        assert_eq!(r.model_count, 8);
        assert_eq!(r.verdict(), ModelVerdict::Multiple);
        assert!(r.models.is_empty());
        assert_eq!(solve_default(&PcnfFormula::empty(0).unwrap()).model_count, 1);
        assert_eq!(solve_default(&PcnfFormula::empty(10).unwrap()).model_count, 1024);
    }

    #[test]
    fn contradiction_has_no_models() {
        let f = PcnfFormula::new(1, [clause(&[1]), clause(&[-1])]).unwrap();
        let r = solve_default(&f);
        assert_eq!(r.model_count, 0);
        assert_eq!(r.verdict(), ModelVerdict::Unsat);
    }

    #[test]
    fn retains_models_up_to_cap() {
        let f = PcnfFormula::new(3, [clause(&[1]), clause(&[-2])]).unwrap();
        let r = solve_default(&f);
        assert_eq!(r.model_count, 2);
        let bits: Vec<u64> = r.models.iter().map(|a| a.bits()).collect();
        assert_eq!(bits, vec![0b001, 0b101]);

        let cfg = OracleConfig {
            retain: 1,
            ..OracleConfig::default()
        };
        assert!(solve(&f, &cfg).unwrap().models.is_empty());
    }

    #[test]
    fn high_variables_are_evaluated() {
        // x10 & ~x8 & (x1 | x9) over 10 variables.
        let f = PcnfFormula::new(10, [clause(&[10]), clause(&[-8]), clause(&[1, 9])]).unwrap();
        let expected = (0u64..1024)
            .filter(|&a| a >> 9 & 1 == 1 && a >> 7 & 1 == 0 && (a & 1 == 1 || a >> 8 & 1 == 1))
            .count() as u64;
        assert_eq!(solve_default(&f).model_count, expected);
    }

    #[test]
    fn refuses_above_cap() {
        let f = PcnfFormula::empty(25).unwrap();
        assert_eq!(
            solve(&f, &OracleConfig::default()),
            Err(OracleError::TooManyVariables {
                num_vars: 25,
                max_n: 24
            })
        );
    }

    #[test]
    fn parallel_matches_sequential() {
        let f = PcnfFormula::new(
            18,
            [clause(&[1, -17]), clause(&[-2, 18, 7]), clause(&[12]), clause(&[-5, -6])],
        )
        .unwrap();
        let seq = count_models(18, f.clauses(), 4, false);
        let par = count_models(18, f.clauses(), 4, true);
        assert_eq!(seq, par);
        // Disjoint clauses: 2^18 * 3/4 * 7/8 * 1/2 * 3/4.
        assert_eq!(seq.model_count, 64512);

        // Pin 17 variables so exactly two models remain, in different chunks.
        let units = (1..=17).map(|v| clause(&[if v % 3 == 0 { -v } else { v }]));
        let f = PcnfFormula::new(18, units).unwrap();
        let seq = count_models(18, f.clauses(), 4, false);
        assert_eq!(seq, count_models(18, f.clauses(), 4, true));
        assert_eq!(seq.model_count, 2);
        assert_eq!(seq.models[1].bits() - seq.models[0].bits(), 1 << 17);
    }
}
