//! Precise CNF (PCNF) normalization, clause-count bounds, polynomial-time
//! unsatisfiability screens, and an exhaustive model-counting oracle to
//! check them against.
//!
//! A PCNF formula has no repeated clauses, no repeated literal inside a
//! clause, and no clause containing both a variable and its complement.
//! Over `n` variables there are `m(n) = 3^n - 1` such clauses; a PCNF
//! formula with more than `f(n) = 3^n - 2^n` clauses is unsatisfiable, and
//! one with more than `g(n) = 3^n - 2^n - 2^(n-1)` clauses has at most one
//! model.

pub mod analysis;
pub mod bounds;
pub mod detect;
pub mod dimacs;
pub mod formula;
pub mod generate;
pub mod normalize;
pub mod oracle;
pub mod verify;

pub use analysis::{analyze, AnalysisOptions, AnalysisReport};
pub use bounds::{bounds_for, classify_range, clause_distribution, BoundsTable, Construction, RangeClass, VarConvention};
pub use detect::{clause_class_screen, corollary_screen, occurrence_census, screen_all, Outcome};
pub use dimacs::{parse_dimacs, write_dimacs};
pub use formula::{Assignment, Clause, Literal, PcnfFormula, RawCnf};
pub use normalize::normalize;
pub use oracle::{solve, OracleConfig, OracleResult};
