//! Scenario files: an instance, a run configuration and output paths.
//!
//! Parsing is strict. Unknown fields are rejected, and errors carry the JSON
//! path of the offending field. Defaults (ascending ties, `T = 10n`, eager
//! updates, seed 0) are filled in, so serializing a parsed scenario echoes them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{RunConfig, Schedule};
use crate::error::{Error, Result};
use crate::experiments::random_instance;
use crate::gf2::build_hard_instance;
use crate::mechanism::{AuctionRules, BidProfile, Instance, TieBreak};
use crate::strategies::Strategy;
use crate::valuations::{GeneratorParams, Valuation, ValuationSpec};

/// Where the valuations come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Valuations written out in full.
    Inline { items: usize, valuations: Vec<ValuationSpec> },
    /// `bidders` draws from a seeded generator; bidder `i` uses seed
    /// `64·seed + i`, with `seed` the scenario seed.
    Generator { bidders: usize, params: GeneratorParams },
    /// The two-bidder subspace instance for `k ∈ {2, 4, 8, 16}`.
    HardInstance { k: usize },
}

/// Tie-break: the ascending default or explicit 1-based priority lists per item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TieBreakSpec {
    Named(TieBreakName),
    Orders(Vec<Vec<usize>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakName {
    Ascending,
}

/// One strategy for everybody, or one per bidder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategySpec {
    PerBidder(Vec<Strategy>),
    All(Strategy),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

impl OutputPaths {
    fn is_empty(&self) -> bool {
        self.trace.is_none() && self.summary.is_none()
    }
}

/// The file as written: everything but `instance` and `strategies` optional.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    name: Option<String>,
    instance: InstanceSpec,
    strategies: StrategySpec,
    #[serde(default)]
    initial_bids: Option<BidProfile>,
    #[serde(default)]
    schedule: Option<Schedule>,
    #[serde(default)]
    tie_break: Option<TieBreakSpec>,
    #[serde(default)]
    allocate_zero_bids: Option<bool>,
    #[serde(default)]
    steps: Option<usize>,
    #[serde(default)]
    lazy: Option<bool>,
    #[serde(default)]
    stop_on_fixed_point: Option<bool>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<OutputPaths>,
}

/// A parsed scenario with every default resolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub instance: InstanceSpec,
    pub strategies: Vec<Strategy>,
    pub initial_bids: BidProfile,
    pub schedule: Schedule,
    pub tie_break: TieBreakSpec,
    pub allocate_zero_bids: bool,
    pub steps: usize,
    pub lazy: bool,
    pub stop_on_fixed_point: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "OutputPaths::is_empty")]
    pub output: OutputPaths,
}

fn field_error(field: impl std::fmt::Display, e: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("{field}: {e}"))
}

impl InstanceSpec {
    pub fn build(&self, seed: u64) -> Result<Instance> {
        match self {
            InstanceSpec::Inline { items, valuations } => {
                let vals = valuations
                    .iter()
                    .enumerate()
                    .map(|(i, v)| Valuation::from_spec(v).map_err(|e| field_error(format!("instance.inline.valuations[{i}]"), e)))
                    .collect::<Result<Vec<_>>>()?;
                Instance::new(*items, vals).map_err(|e| field_error("instance.inline", e))
            }
            InstanceSpec::Generator { bidders, params } => {
                if *bidders == 0 {
                    return Err(field_error("instance.generator.bidders", "must be at least 1"));
                }
                random_instance(params, *bidders, seed).map_err(|e| field_error("instance.generator.params", e))
            }
            InstanceSpec::HardInstance { k } => build_hard_instance(*k)
                .and_then(|h| h.instance())
                .map_err(|e| field_error("instance.hard_instance.k", e)),
        }
    }
}

impl Scenario {
    /// Strict parse of scenario JSON; the instance is built once to resolve
    /// the size-dependent defaults and check dimensions.
    pub fn from_json(text: &str) -> Result<(Scenario, Instance)> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Scenario(format!("{path} (line {}, column {}): {inner}", inner.line(), inner.column()))
        })?;
        de.end().map_err(|e| Error::Scenario(format!("trailing input: {e}")))?;
        let seed = file.seed.unwrap_or(0);
        let instance = file.instance.build(seed)?;
        let (n, m) = (instance.n(), instance.m());
        let strategies = match file.strategies {
            StrategySpec::All(s) => vec![s; n],
            StrategySpec::PerBidder(list) => {
                if list.len() != n {
                    return Err(field_error("strategies", format!("{} strategies for {n} bidders", list.len())));
                }
                list
            }
        };
        let initial_bids = match file.initial_bids {
            Some(b) => {
                if b.n() != n {
                    return Err(field_error("initial_bids", format!("{} rows for {n} bidders", b.n())));
                }
                for (i, row) in b.rows().iter().enumerate() {
                    if row.len() != m {
                        return Err(field_error(format!("initial_bids[{i}]"), format!("{} entries for {m} items", row.len())));
                    }
                    if let Some(j) = row.iter().position(|x| x.is_negative()) {
                        return Err(field_error(format!("initial_bids[{i}][{j}]"), format!("negative bid {}", row[j])));
                    }
                }
                b
            }
            None => BidProfile::zeros(n, m),
        };
        let scenario = Scenario {
            name: file.name,
            instance: file.instance,
            strategies,
            initial_bids,
            schedule: file.schedule.unwrap_or(Schedule::RoundRobin),
            tie_break: file.tie_break.unwrap_or(TieBreakSpec::Named(TieBreakName::Ascending)),
            allocate_zero_bids: file.allocate_zero_bids.unwrap_or(true),
            steps: file.steps.unwrap_or(10 * n),
            lazy: file.lazy.unwrap_or(false),
            stop_on_fixed_point: file.stop_on_fixed_point.unwrap_or(false),
            seed,
            output: file.output.unwrap_or_default(),
        };
        scenario.run_config(&instance)?;
        Ok((scenario, instance))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize")
    }

    pub fn instance(&self) -> Result<Instance> {
        self.instance.build(self.seed)
    }

    /// The run configuration, validated against `instance`.
    pub fn run_config(&self, instance: &Instance) -> Result<RunConfig> {
        let (n, m) = (instance.n(), instance.m());
        let tie_break = match &self.tie_break {
            TieBreakSpec::Named(TieBreakName::Ascending) => TieBreak::ascending(n, m),
            TieBreakSpec::Orders(orders) => {
                let orders = orders
                    .iter()
                    .enumerate()
                    .map(|(j, o)| {
                        o.iter()
                            .map(|&i| i.checked_sub(1).ok_or_else(|| field_error(format!("tie_break[{j}]"), "bidders are 1-based")))
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<usize>>>>()?;
                TieBreak::from_orders(n, orders).map_err(|e| field_error("tie_break", e))?
            }
        };
        if tie_break.items() != m {
            return Err(field_error("tie_break", format!("{} orders for {m} items", tie_break.items())));
        }
        let config = RunConfig {
            steps: self.steps,
            lazy: self.lazy,
            stop_on_fixed_point: self.stop_on_fixed_point,
            rules: AuctionRules { tie_break, allocate_zero_bids: self.allocate_zero_bids },
            strategies: self.strategies.clone(),
            schedule: self.schedule.clone(),
            initial: self.initial_bids.clone(),
        };
        config.validate(instance).map_err(|e| match e {
            Error::InvalidParam(msg) if msg.contains("step budget") => field_error("steps", msg),
            Error::InvalidParam(msg) if msg.contains("schedule") => field_error("schedule", msg),
            other => Error::Scenario(other.to_string()),
        })?;
        Ok(config)
    }
}

/// Reads and parses a scenario file.
pub fn parse_scenario(path: &Path) -> Result<(Scenario, Instance)> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "instance": {"inline": {"items": 2, "valuations": [
            {"kind": "additive", "weights": ["1/2", 1]},
            {"kind": "unit_demand", "weights": [2, "3/4"]}
        ]}},
        "strategies": {"kind": "xos_update"}
    }"#;

    #[test]
    fn defaults_are_filled_and_echoed() {
        let (s, inst) = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(s.steps, 20);
        assert_eq!(s.seed, 0);
        assert!(!s.lazy);
        assert_eq!(s.tie_break, TieBreakSpec::Named(TieBreakName::Ascending));
        let echoed = s.to_json();
        assert!(echoed.contains("\"steps\": 20") && echoed.contains("\"seed\": 0"), "{echoed}");
        assert!(echoed.contains("\"ascending\""));
    }

    #[test]
    fn round_trip() {
        let (s, _) = Scenario::from_json(MINIMAL).unwrap();
        let (back, _) = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn negative_bid_names_the_field() {
        let text = MINIMAL.replace(
            "\"strategies\"",
            "\"initial_bids\": [[0, 0], [\"-1/2\", 0]], \"strategies\"",
        );
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("initial_bids[1][0]"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected_with_path() {
        let text = MINIMAL.replace("\"strategies\"", "\"stepz\": 3, \"strategies\"");
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("stepz"), "{err}");
        let text = MINIMAL.replace("\"weights\": [2,", "\"weights\": [\"x\",");
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("instance.inline.valuations[1]"), "{err}");
    }

    #[test]
    fn bad_dimensions() {
        let text = MINIMAL.replace("\"strategies\"", "\"initial_bids\": [[0, 0, 0], [0, 0, 0]], \"strategies\"");
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("initial_bids[0]"), "{err}");
        let text = MINIMAL.replace("{\"kind\": \"xos_update\"}", "[{\"kind\": \"hold\"}]");
        assert!(Scenario::from_json(&text).unwrap_err().to_string().contains("strategies"));
    }

    #[test]
    fn generator_and_hard_instances() {
        let text = r#"{"instance": {"generator": {"bidders": 3, "params": {"kind": "xos", "items": 4}}},
                       "strategies": {"kind": "xos_update"}, "seed": 7}"#;
        let (s, inst) = Scenario::from_json(text).unwrap();
        assert_eq!((inst.n(), inst.m(), s.steps), (3, 4, 30));
        let again = s.instance().unwrap();
        assert_eq!(again.valuation(2).value_table().unwrap(), inst.valuation(2).value_table().unwrap());
        let text = r#"{"instance": {"hard_instance": {"k": 2}}, "strategies": {"kind": "surplus_split"}}"#;
        let (_, inst) = Scenario::from_json(text).unwrap();
        assert_eq!((inst.n(), inst.m()), (2, 3));
    }
}
