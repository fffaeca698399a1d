//! DIMACS CNF reading and writing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Literal, PcnfFormula, RawCnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: second problem header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: clause data before the problem header")]
    MissingHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer literal")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} outside 1..={num_vars}")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("line {line}: clause is not terminated by 0 before end of input")]
    UnterminatedClause { line: usize },
}

/// A parsed DIMACS file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsCnf {
    pub cnf: RawCnf,
    pub declared_clauses: usize,
    /// Set when the header's clause count differs from the clauses read.
    pub clause_count_mismatch: bool,
}

fn parse_header(tokens: &[&str], line: usize) -> Result<(usize, usize), DimacsError> {
    let bad = DimacsError::MalformedHeader { line };
    match tokens {
        ["p", "cnf", vars, clauses] => {
            let vars = vars.parse().map_err(|_| bad.clone())?;
            let clauses = clauses.parse().map_err(|_| bad.clone())?;
            Ok((vars, clauses))
        }
        _ => Err(bad),
    }
}

/// Parses DIMACS CNF text. Clauses may span lines; a `%` line ends the
/// input. Empty clauses (a bare `0`) are kept and flagged.
pub fn parse_dimacs(text: &str) -> Result<DimacsCnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            header = Some(parse_header(&tokens, line)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::MissingHeader { line });
        };
        for token in tokens {
            let literal: i64 = token.parse().map_err(|_| DimacsError::InvalidToken {
                line,
                token: token.to_string(),
            })?;
            match Literal::from_dimacs(literal) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(lit) => {
                    if lit.var >= num_vars {
                        return Err(DimacsError::LiteralOutOfRange {
                            line,
                            literal,
                            num_vars,
                        });
                    }
                    if current.is_empty() {
                        current_start = line;
                    }
                    current.push(lit);
                }
            }
        }
    }

    let Some((num_vars, declared_clauses)) = header else {
        return Err(DimacsError::MissingHeader { line: last_line.max(1) });
    };
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: current_start });
    }
    let clause_count_mismatch = clauses.len() != declared_clauses;
    let cnf = RawCnf::new(num_vars, clauses).expect("literals were range-checked while parsing");
    Ok(DimacsCnf {
        cnf,
        declared_clauses,
        clause_count_mismatch,
    })
}

/// Writes `formula` in canonical clause order, literals by ascending variable.
pub fn write_dimacs(formula: &PcnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.len());
    for c in formula.clauses() {
        for lit in c.literals() {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}
