//! Full analysis of one formula: range classification, every screen, and the
//! oracle when the formula is small enough.

use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

use crate::bounds::{BoundsTable, RangeClass, VarConvention};
use crate::detect::{screen_all, Outcome, ScreenOptions, Screening};
use crate::formula::{var_name, PcnfFormula, RawCnf};
use crate::normalize::{normalize, NormalizationStats, NormalizeError};
use crate::oracle::{solve, OracleConfig, OracleResult, DEFAULT_MODEL_RETENTION};

pub const DEFAULT_ANALYZE_ORACLE_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// The oracle runs only when the formula has at most this many variables.
    pub oracle_max_n: usize,
    pub convention: VarConvention,
    pub early_exit: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            oracle_max_n: DEFAULT_ANALYZE_ORACLE_MAX_N,
            convention: VarConvention::Declared,
            early_exit: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// A sound screening rule fired.
    Unsatisfiable,
    UnsatisfiableByOracle,
    /// The input held an empty clause.
    UnsatisfiableEmptyClause,
    SatisfiableByOracle,
    /// No clauses at all.
    SatisfiableTrivially,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unsatisfiable => "unsatisfiable",
            Verdict::UnsatisfiableByOracle => "unsatisfiable (oracle)",
            Verdict::UnsatisfiableEmptyClause => "unsatisfiable (empty clause)",
            Verdict::SatisfiableByOracle => "satisfiable (oracle)",
            Verdict::SatisfiableTrivially => "satisfiable (trivially)",
            Verdict::Unknown => "unknown",
        }
    }

    /// SAT-competition style status: 20 unsatisfiable, 10 satisfiable,
    /// 0 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Unsatisfiable | Verdict::UnsatisfiableByOracle | Verdict::UnsatisfiableEmptyClause => 20,
            Verdict::SatisfiableByOracle | Verdict::SatisfiableTrivially => 10,
            Verdict::Unknown => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub formula: PcnfFormula,
    pub screening: Screening,
    pub oracle: Option<OracleResult>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

pub fn analyze(formula: &PcnfFormula, options: &AnalysisOptions) -> AnalysisReport {
    let screening = screen_all(
        formula,
        ScreenOptions {
            convention: options.convention,
            early_exit: options.early_exit,
        },
    );
    let oracle_config = OracleConfig {
        max_n: options.oracle_max_n,
        retain: DEFAULT_MODEL_RETENTION,
        parallel: true,
    };
    let oracle = solve(formula, &oracle_config).ok();

    let n = formula.num_vars();
    let mut reasons: Vec<String> = screening.reasons.iter().map(|r| r.describe(n)).collect();
    let verdict = if screening.outcome == Outcome::Unsatisfiable {
        if let Some(o) = &oracle {
            assert_eq!(o.model_count, 0, "screen reported unsatisfiable on a satisfiable formula");
        }
        Verdict::Unsatisfiable
    } else if formula.is_empty() {
        reasons.push("no clauses".to_string());
        Verdict::SatisfiableTrivially
    } else if let Some(o) = &oracle {
        reasons.push(format!("oracle model_count={}", o.model_count));
        if o.model_count == 0 {
            Verdict::UnsatisfiableByOracle
        } else {
            Verdict::SatisfiableByOracle
        }
    } else {
        Verdict::Unknown
    };

    AnalysisReport {
        formula: formula.clone(),
        screening,
        oracle,
        verdict,
        reasons,
    }
}

/// Normalizes and analyzes raw input. An empty clause makes the verdict
/// unsatisfiable outright; the rest of the report then describes the
/// remaining clauses.
pub fn analyze_raw(
    raw: &RawCnf,
    options: &AnalysisOptions,
) -> Result<(AnalysisReport, NormalizationStats), NormalizeError> {
    if raw.contains_empty_clause() {
        let (formula, stats) = normalize(&raw.without_empty_clauses())?;
        let mut report = analyze(&formula, options);
        report.verdict = Verdict::UnsatisfiableEmptyClause;
        report.reasons.insert(0, "empty_clause".to_string());
        report.reasons.retain(|r| r != "no clauses");
        return Ok((report, stats));
    }
    let (formula, stats) = normalize(raw)?;
    Ok((analyze(&formula, options), stats))
}

fn big(v: &num_bigint::BigUint) -> Value {
    Value::Number(v.to_string().parse::<Number>().expect("integer literal"))
}

fn bounds_json(b: &BoundsTable) -> Value {
    json!({
        "m": big(&b.m),
        "f": big(&b.f),
        "g": big(&b.g),
        "v": big(&b.v),
        "p": big(&b.p),
        "q": big(&b.q),
    })
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn range(&self) -> RangeClass {
        self.screening.range
    }

    pub fn to_json_value(&self) -> Value {
        let n = self.formula.num_vars();
        let table = &self.screening.class_table;
        let mut oracle = Map::new();
        oracle.insert("run".into(), Value::Bool(self.oracle.is_some()));
        if let Some(o) = &self.oracle {
            oracle.insert("model_count".into(), json!(o.model_count));
        }
        json!({
            "n": self.screening.bounds.n,
            "num_clauses": self.formula.len(),
            "bounds": bounds_json(&self.screening.bounds),
            "range_class": self.screening.range.as_str(),
            "detectors": {
                "corollary": self.screening.corollary.outcome.as_str(),
                "clause_class": {
                    "verdict": self.screening.clause_class.outcome.as_str(),
                    "C": table.named_classes(n),
                    "U": table.named_capacity(),
                },
            },
            "oracle": Value::Object(oracle),
            "verdict": self.verdict.as_str(),
            "reasons": self.reasons,
        })
    }

    /// Pretty JSON with sorted keys; identical input gives identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let n = self.formula.num_vars();
        let s = &self.screening;
        let b = &s.bounds;
        let mut out = String::new();
        let _ = writeln!(out, "variables      {}", n);
        let _ = writeln!(out, "bounds at n    {}", b.n);
        let _ = writeln!(out, "clauses        {}", self.formula.len());
        let _ = writeln!(out, "m f g          {} {} {}", b.m, b.f, b.g);
        let _ = writeln!(out, "v p q          {} {} {}", b.v, b.p, b.q);
        let _ = writeln!(out, "range          {}", s.range.as_str());
        let _ = writeln!(out, "{:<8} {:>8} {:>8} {:>8}", "var", "total", "pos", "neg");
        for var in 0..n {
            let _ = writeln!(
                out,
                "{:<8} {:>8} {:>8} {:>8}",
                var_name(var, n),
                s.census.variable(var),
                s.census.positive[var],
                s.census.negative[var]
            );
        }
        let _ = writeln!(out, "corollaries    {}", s.corollary.outcome.as_str());
        let _ = writeln!(out, "clause classes {}", s.clause_class.outcome.as_str());
        for (key, count) in s.class_table.named_classes(n) {
            let width = if n <= 26 { key.len() } else { key.split(',').count() };
            let _ = writeln!(out, "  {:<12} {:>4} / {}", key, count, 1u64 << width);
        }
        match &self.oracle {
            Some(o) => {
                let _ = writeln!(out, "oracle         {} models", o.model_count);
            }
            None => {
                let _ = writeln!(out, "oracle         not run");
            }
        }
        let _ = writeln!(out, "verdict        {}", self.verdict.as_str());
        for r in &self.reasons {
            let _ = writeln!(out, "  {r}");
        }
        out
    }
}
