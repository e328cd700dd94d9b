//! Seeded suite runner, instance generators and counterexample search.

pub mod gen;
pub mod search;
pub mod suites;

pub use search::{find_counterexample, Target, SEARCH_THRESHOLD};
pub use suites::{replay_witness, run_one, run_suite, Suite, SuiteConfig};
