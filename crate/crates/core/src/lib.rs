//! Best-response dynamics in simultaneous second-price item auctions.
//!
//! The crate simulates bidders who update their bids in turn, records every
//! step, and checks welfare guarantees on the recorded traces with exact
//! rational arithmetic.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod items;
pub mod lp;
pub mod mechanism;
pub mod scenario;
pub mod strategies;
pub mod valuations;
pub mod value;

pub use error::{Error, Result};
pub use items::ItemSet;
pub use dynamics::{run, RunConfig, Schedule, Trace};
pub use experiments::{compute_opt, run_named_experiment, BoundReport};
pub use scenario::{parse_scenario, Scenario};
pub use mechanism::{allocate, AuctionRules, BidProfile, Instance, Outcome, TieBreak};
pub use valuations::Valuation;
pub use value::{q, Value};
pub use strategies::{Aggressiveness, Strategy};
