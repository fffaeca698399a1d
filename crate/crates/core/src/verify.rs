//! Campaigns that check the clause-count theorems against the oracle.
//!
//! Two strata of clause counts are checked: `f(n) < M <= m(n)` (every formula
//! must be unsatisfiable) and the natural range `g(n) < M <= f(n)` (every
//! formula must have at most one model). Tightness is checked on the two
//! extremal constructions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{bounds_for, BoundsError};
use crate::formula::{Assignment, Clause};
use crate::generate::{
    double_sat_construction, max_sat_construction, sample_indices, stream_rng, uniform_below,
    width_histogram, ClauseUniverse, GenerateError,
};
use crate::oracle::count_models;

pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 10_000_000;
/// Counterexamples kept per stratum in a report.
pub const MAX_REPORTED_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("exhaustive check needs {required} formulas, over the budget of {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every formula in each selected stratum.
    Exhaustive { budget: u64 },
    /// `count` random formulas per stratum, clause count uniform over the
    /// stratum, clauses uniform given the count.
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strata {
    #[default]
    All,
    BeyondF,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    BeyondF,
    NaturalRange,
}

impl StratumKind {
    /// Most models a formula in the stratum may have.
    pub fn allowed_models(self) -> u64 {
        match self {
            StratumKind::BeyondF => 0,
            StratumKind::NaturalRange => 1,
        }
    }

    fn stream_tag(self) -> u64 {
        match self {
            StratumKind::BeyondF => 0,
            StratumKind::NaturalRange => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub model_count: u64,
    /// Clauses as DIMACS literal lists.
    pub clauses: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub kind: StratumKind,
    pub min_clauses: u64,
    pub max_clauses: u64,
    pub formulas_checked: u64,
    /// Number of formulas per observed model count.
    pub model_count_histogram: BTreeMap<u64, u64>,
    pub counterexample_count: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl StratumReport {
    fn empty(kind: StratumKind, min_clauses: u64, max_clauses: u64) -> Self {
        StratumReport {
            kind,
            min_clauses,
            max_clauses,
            formulas_checked: 0,
            model_count_histogram: BTreeMap::new(),
            counterexample_count: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, clauses: &[Clause], model_count: u64) {
        self.formulas_checked += 1;
        *self.model_count_histogram.entry(model_count).or_insert(0) += 1;
        if model_count > self.kind.allowed_models() {
            self.counterexample_count += 1;
            if self.counterexamples.len() < MAX_REPORTED_COUNTEREXAMPLES {
                self.counterexamples.push(Counterexample {
                    model_count,
                    clauses: clauses
                        .iter()
                        .map(|c| c.literals().map(|l| l.to_dimacs()).collect())
                        .collect(),
                });
            }
        }
    }

    fn merge(mut self, other: StratumReport) -> Self {
        self.formulas_checked += other.formulas_checked;
        for (k, v) in other.model_count_histogram {
            *self.model_count_histogram.entry(k).or_insert(0) += v;
        }
        self.counterexample_count += other.counterexample_count;
        self.counterexamples.extend(other.counterexamples);
        self.normalize();
        self
    }

    fn normalize(&mut self) {
        self.counterexamples.sort();
        self.counterexamples.truncate(MAX_REPORTED_COUNTEREXAMPLES);
    }

    pub fn max_models_seen(&self) -> Option<u64> {
        self.model_count_histogram.keys().next_back().copied()
    }

    pub fn holds(&self) -> bool {
        self.counterexample_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionCheck {
    pub clauses: u64,
    pub expected_clauses: u64,
    pub model_count: u64,
    pub width_histogram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    /// Clauses satisfied by the all-true assignment.
    pub max_sat: ConstructionCheck,
    /// Clauses satisfied by all-true and by all-true with `a` flipped;
    /// absent for `n = 1`.
    pub double_sat: Option<ConstructionCheck>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub m: u64,
    pub f: u64,
    pub g: u64,
    pub strata: Vec<StratumReport>,
    pub tightness: TightnessReport,
    pub formulas_checked: u64,
    pub counterexamples: u64,
    pub holds: bool,
    pub summary: String,
}

impl VerificationReport {
    pub fn stratum(&self, kind: StratumKind) -> Option<&StratumReport> {
        self.strata.iter().find(|s| s.kind == kind)
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}  m = {}  f = {}  g = {}  mode = {}", self.n, self.m, self.f, self.g, self.mode);
        let _ = writeln!(
            out,
            "{:<14} {:>10} {:>12} {:>10} {:>16}",
            "stratum", "clauses", "formulas", "max models", "counterexamples"
        );
        for s in &self.strata {
            let kind = match s.kind {
                StratumKind::BeyondF => "beyond_f",
                StratumKind::NaturalRange => "natural_range",
            };
            let max_models = s
                .max_models_seen()
                .map_or_else(|| "-".to_string(), |m| m.to_string());
            let _ = writeln!(
                out,
                "{:<14} {:>10} {:>12} {:>10} {:>16}",
                kind,
                format!("{}..={}", s.min_clauses, s.max_clauses),
                s.formulas_checked,
                max_models,
                s.counterexample_count
            );
        }
        let t = &self.tightness;
        let _ = writeln!(out, "tightness:");
        let _ = writeln!(
            out,
            "  max-sat     {:>6} clauses (expected {:>6})  models {:>3}  by width {:?}",
            t.max_sat.clauses, t.max_sat.expected_clauses, t.max_sat.model_count, t.max_sat.width_histogram
        );
        if let Some(d) = &t.double_sat {
            let _ = writeln!(
                out,
                "  double-sat  {:>6} clauses (expected {:>6})  models {:>3}  by width {:?}",
                d.clauses, d.expected_clauses, d.model_count, d.width_histogram
            );
        }
        let _ = writeln!(out, "{}", self.summary);
        out
    }
}

fn to_u64(v: &BigUint) -> u64 {
    v.to_u64().expect("bounds of an enumerable n fit in u64")
}

/// Number of formulas with a clause count in `lo..=hi` drawn from a universe
/// of `m` clauses. Walks `C(m, k)` down from `k = m`, which is cheap because
/// both strata sit at the top of the range.
pub fn stratum_size(m: u64, lo: u64, hi: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for k in (lo..=m).rev() {
        if k <= hi {
            total += &binom;
        }
        if k > 0 {
            binom = binom * k / (m - k + 1);
        }
    }
    total
}

/// Checks every `k`-subset of the universe, in parallel over the first
/// chosen index.
fn exhaustive_size(universe: &ClauseUniverse, k: usize, report: StratumReport) -> StratumReport {
    let m = universe.len();
    let n = universe.n();
    if k == 0 {
        let mut report = report;
        let count = count_models(n, &[], 0, false).model_count;
        report.record(&[], count);
        return report;
    }
    let empty = StratumReport::empty(report.kind, report.min_clauses, report.max_clauses);
    let partial = (0..=m - k)
        .into_par_iter()
        .map(|first| {
            let mut local = empty.clone();
            let mut idx: Vec<usize> = (first..first + k).collect();
            let mut buf: Vec<Clause> = idx.iter().map(|&i| universe.clauses()[i]).collect();
            loop {
                let count = count_models(n, &buf, 0, false).model_count;
                local.record(&buf, count);
                // Advance positions 1..k to the next combination; position 0
                // stays fixed at `first`.
                let mut pos = k;
                while pos > 1 && idx[pos - 1] == m - k + pos - 1 {
                    pos -= 1;
                }
                if pos == 1 {
                    break;
                }
                idx[pos - 1] += 1;
                for j in pos..k {
                    idx[j] = idx[j - 1] + 1;
                }
                for j in pos - 1..k {
                    buf[j] = universe.clauses()[idx[j]];
                }
            }
            local
        })
        .reduce(|| empty.clone(), StratumReport::merge);
    report.merge(partial)
}

fn sampled_stratum(universe: &ClauseUniverse, report: StratumReport, count: u64, seed: u64) -> StratumReport {
    let m = universe.len();
    let n = universe.n();
    let (lo, hi) = (report.min_clauses, report.max_clauses);
    let tag = report.kind.stream_tag();
    let empty = StratumReport::empty(report.kind, lo, hi);
    let partial = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i << 1 | tag);
            let size = (lo + uniform_below(&mut rng, hi - lo + 1)) as usize;
            let indices = if size * 2 > m {
                // Draw the excluded clauses instead; cheaper near the top.
                let excluded = sample_indices(&mut rng, m, m - size);
                let mut keep = Vec::with_capacity(size);
                let mut ex = excluded.iter().peekable();
                for j in 0..m {
                    if ex.peek() == Some(&&j) {
                        ex.next();
                    } else {
                        keep.push(j);
                    }
                }
                keep
            } else {
                sample_indices(&mut rng, m, size)
            };
            let formula = universe.select(&indices);
            let mut local = empty.clone();
            let count = count_models(n, formula.clauses(), 0, false).model_count;
            local.record(formula.clauses(), count);
            local
        })
        .reduce(|| empty.clone(), StratumReport::merge);
    report.merge(partial)
}

fn tightness(n: usize, f: u64, g: u64) -> Result<TightnessReport, VerifyError> {
    let witness = Assignment::all_true(n);
    let max_sat = max_sat_construction(n, witness)?;
    let max_sat = ConstructionCheck {
        clauses: max_sat.len() as u64,
        expected_clauses: f,
        model_count: count_models(n, max_sat.clauses(), 0, true).model_count,
        width_histogram: width_histogram(max_sat.clauses(), n),
    };
    let double_sat = if n >= 2 {
        let d = double_sat_construction(n, witness, 0)?;
        Some(ConstructionCheck {
            clauses: d.len() as u64,
            expected_clauses: g,
            model_count: count_models(n, d.clauses(), 0, true).model_count,
            width_histogram: width_histogram(d.clauses(), n),
        })
    } else {
        None
    };
    let holds = max_sat.clauses == f
        && max_sat.model_count >= 1
        && double_sat
            .as_ref()
            .is_none_or(|d| d.clauses == g && d.model_count == 2);
    Ok(TightnessReport {
        max_sat,
        double_sat,
        holds,
    })
}

pub fn verify_bounds(n: usize, mode: VerifyMode, strata: Strata) -> Result<VerificationReport, VerifyError> {
    let table = bounds_for(n)?;
    let universe = ClauseUniverse::new(n)?;
    let (m, f, g) = (to_u64(&table.m), to_u64(&table.f), to_u64(&table.g));

    let mut reports = Vec::new();
    if matches!(strata, Strata::All | Strata::Natural) {
        reports.push(StratumReport::empty(StratumKind::NaturalRange, g + 1, f));
    }
    if matches!(strata, Strata::All | Strata::BeyondF) {
        reports.push(StratumReport::empty(StratumKind::BeyondF, f + 1, m));
    }

    let (mode_name, seed) = match mode {
        VerifyMode::Exhaustive { budget } => {
            let required: BigUint = reports
                .iter()
                .map(|r| stratum_size(m, r.min_clauses, r.max_clauses))
                .sum();
            if required > BigUint::from(budget) {
                return Err(VerifyError::BudgetExceeded { required, budget });
            }
            reports = reports
                .into_iter()
                .map(|r| {
                    (r.min_clauses..=r.max_clauses).fold(r, |acc, k| exhaustive_size(&universe, k as usize, acc))
                })
                .collect();
            ("exhaustive", None)
        }
        VerifyMode::Sample { count, seed } => {
            reports = reports
                .into_iter()
                .map(|r| sampled_stratum(&universe, r, count, seed))
                .collect();
            ("sample", Some(seed))
        }
    };
    let tightness = tightness(n, f, g)?;
    let formulas_checked = reports.iter().map(|r| r.formulas_checked).sum();
    let counterexamples = reports.iter().map(|r| r.counterexample_count).sum();
    let holds = counterexamples == 0 && tightness.holds;
    let summary = format!(
        "checked {formulas_checked} formulas above g({n}), {counterexamples} counterexamples; tightness {}",
        if tightness.holds { "holds" } else { "FAILS" }
    );
    Ok(VerificationReport {
        n,
        mode: mode_name,
        seed,
        m,
        f,
        g,
        strata: reports,
        tightness,
        formulas_checked,
        counterexamples,
        holds,
        summary,
    })
}
