#![allow(dead_code)]

use pcnf::formula::{Clause, Literal, PcnfFormula, RawCnf};
use pcnf::generate::uniform_below;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    uniform_below(rng, bound as u64) as usize
}

/// Literal-by-literal evaluation on plain lists; shares nothing with the
/// mask encoding.
pub fn naive_satisfies(clauses: &[Vec<(usize, bool)>], assignment: u64) -> bool {
    clauses.iter().all(|clause| {
        clause
            .iter()
            .any(|&(var, negated)| (assignment >> var & 1 == 1) != negated)
    })
}

pub fn naive_models(num_vars: usize, clauses: &[Vec<(usize, bool)>]) -> Vec<u64> {
    (0..1u64 << num_vars)
        .filter(|&bits| naive_satisfies(clauses, bits))
        .collect()
}

pub fn raw_lists(raw: &RawCnf) -> Vec<Vec<(usize, bool)>> {
    raw.clauses()
        .iter()
        .map(|c| c.iter().map(|l| (l.var, l.negated)).collect())
        .collect()
}

pub fn formula_lists(f: &PcnfFormula) -> Vec<Vec<(usize, bool)>> {
    f.clauses()
        .iter()
        .map(|c| c.literals().map(|l| (l.var, l.negated)).collect())
        .collect()
}

/// Random CNF with deliberately injected repeated literals, tautologies and
/// repeated clauses.
pub fn messy_raw_cnf(rng: &mut ChaCha8Rng, num_vars: usize) -> RawCnf {
    let num_clauses = below(rng, 3 * num_vars + 4);
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    for _ in 0..num_clauses {
        let width = 1 + below(rng, num_vars.min(5));
        let mut clause: Vec<Literal> = (0..width)
            .map(|_| Literal {
                var: below(rng, num_vars),
                negated: rng.next_u32() & 1 == 1,
            })
            .collect();
        match below(rng, 6) {
            0 => {
                let l = clause[below(rng, clause.len())];
                clause.push(l);
            }
            1 => {
                let l = clause[below(rng, clause.len())];
                clause.push(l.complement());
            }
            2 if !clauses.is_empty() => {
                let mut copy = clauses[below(rng, clauses.len())].clone();
                copy.reverse();
                clause = copy;
            }
            _ => {}
        }
        clauses.push(clause);
    }
    RawCnf::new(num_vars, clauses).unwrap()
}

/// The unsatisfiable 17-clause formula shipped as a fixture.
pub fn fixture_17() -> &'static str {
    include_str!("../fixtures/seventeen_clauses.cnf")
}

pub fn clause(lits: &[i64]) -> Clause {
    let lits: Vec<Literal> = lits.iter().map(|&l| Literal::from_dimacs(l).unwrap()).collect();
    Clause::from_literals(&lits).unwrap()
}
