//! Welfare optimum, bound checkers over traces, Monte Carlo estimates and
//! named reproductions.

mod bounds;
mod hard;
mod monte_carlo;
mod named;
mod opt;

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::value::Value;

pub use bounds::{check_aux_variant, check_average, check_lemmas, check_pointwise, check_safety_report, measure};
pub use hard::{check_hard_instance, check_no_pne_lemmas, grand_no_overbid_row};
pub use monte_carlo::monte_carlo_random_activation;
pub use named::{
    experiment_names, lazy_xos_setup, mph3_setup, random_instance, run_named_experiment, tightness_setup, ExperimentParams,
    NamedRun,
};
pub use opt::{compute_opt, Opt, MAX_OPT_ITEMS};

/// Direction of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Ge,
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "==",
        }
    }
}

/// One exact comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub lhs: Value,
    pub relation: Relation,
    pub rhs: Value,
    pub pass: bool,
}

/// A statistical comparison: `mean − 3·SE` against a relaxed target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatCheck {
    pub name: String,
    pub mean: Value,
    pub standard_error: f64,
    /// `mean − 3·SE`.
    pub lower_confidence: f64,
    pub target: Value,
    pub relaxed_target: f64,
    pub pass: bool,
}

/// Parameters the bounds were evaluated with.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Value>,
    pub n: usize,
    pub m: usize,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<Value>,
    /// The theorem constant multiplying `OPT`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: String,
    pub params: BoundParams,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stats: Vec<StatCheck>,
    pub passed: bool,
    /// Smallest observed `SW / OPT`, where meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_ratio: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(theorem: impl Into<String>, params: BoundParams) -> Self {
        BoundReport {
            theorem: theorem.into(),
            params,
            checks: Vec::new(),
            stats: Vec::new(),
            passed: true,
            worst_ratio: None,
            notes: Vec::new(),
        }
    }

    /// Records `lhs relation rhs` and returns whether it holds.
    pub fn check(&mut self, name: &str, t: Option<usize>, lhs: Value, relation: Relation, rhs: Value) -> bool {
        let pass = relation.holds(&lhs, &rhs);
        self.passed &= pass;
        self.checks.push(Check { name: name.to_string(), t, lhs, relation, rhs, pass });
        pass
    }

    pub fn stat(&mut self, check: StatCheck) {
        self.passed &= check.pass;
        self.stats.push(check);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Keeps the smaller of the current and the given ratio.
    pub fn observe_ratio(&mut self, ratio: Value) {
        match &self.worst_ratio {
            Some(r) if *r <= ratio => {}
            _ => self.worst_ratio = Some(ratio),
        }
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, other: BoundReport) {
        let prefix = other.theorem.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.passed &= c.pass;
            self.checks.push(c);
        }
        for mut s in other.stats {
            s.name = format!("{prefix}/{}", s.name);
            self.passed &= s.pass;
            self.stats.push(s);
        }
        if let Some(r) = other.worst_ratio {
            self.observe_ratio(r);
        }
        self.notes.extend(other.notes);
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Plain-text table; long runs of passing checks with the same name are
    /// folded into one line.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.theorem, if self.passed { "PASS" } else { "FAIL" });
        let p = &self.params;
        let _ = write!(out, "  n={} m={} T={}", p.n, p.m, p.steps);
        for (label, v) in [("alpha", &p.alpha), ("beta", &p.beta), ("OPT", &p.opt), ("factor", &p.factor)] {
            if let Some(v) = v {
                let _ = write!(out, " {label}={v}");
            }
        }
        if let Some(r) = &self.worst_ratio {
            let _ = write!(out, " worst_ratio={r} (~{:.6})", r.to_f64());
        }
        out.push('\n');
        let mut i = 0;
        while i < self.checks.len() {
            let c = &self.checks[i];
            let mut j = i + 1;
            while c.pass && j < self.checks.len() && self.checks[j].pass && self.checks[j].name == c.name {
                j += 1;
            }
            if j - i > 1 {
                let _ = writeln!(out, "  ok   {} ({} checks)", c.name, j - i);
            } else {
                let _ = writeln!(out, "  {} {}", if c.pass { "ok  " } else { "FAIL" }, c);
            }
            i = j;
        }
        for s in &self.stats {
            let _ = writeln!(
                out,
                "  {} {}: mean={} (~{:.6}) se={:.6} mean-3se={:.6} target={} relaxed={:.6}",
                if s.pass { "ok  " } else { "FAIL" },
                s.name,
                s.mean,
                s.mean.to_f64(),
                s.standard_error,
                s.lower_confidence,
                s.target,
                s.relaxed_target
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(t) = self.t {
            write!(f, " t={t}")?;
        }
        write!(f, ": {} {} {}", self.lhs, self.relation.symbol(), self.rhs)
    }
}

/// Sample mean (exact) and standard error of the mean (floating point).
pub(crate) fn mean_and_se(xs: &[Value]) -> (Value, f64) {
    let n = xs.len();
    if n == 0 {
        return (Value::zero(), 0.0);
    }
    let mean = xs.iter().sum::<Value>() / Value::from_usize(n);
    if n < 2 {
        return (mean, 0.0);
    }
    let mf = mean.to_f64();
    let var = xs.iter().map(|x| (x.to_f64() - mf).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
