//! Concrete values, seeded assignment generation and three-valued evaluation.

mod config;
mod evaluate;
mod gen;
mod rng;
mod value;

pub use config::{ConfigError, EvalConfig};
pub use evaluate::{evaluate, values_equal, EvalResult, UndefReason};
pub use gen::{gen_assignment, gen_value};
pub use rng::SplitMix64;
pub use value::{Assignment, Value};
