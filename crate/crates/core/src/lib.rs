//! Learning minimal metric temporal logic formulas that separate labeled
//! signal prefixes, by reduction to linear real arithmetic.

pub mod cli;
pub mod encoder;
pub mod formula;
pub mod interval;
pub mod lra;
pub mod monitor;
pub mod parser;
pub mod rational;
pub mod separability;
pub mod signal;
pub mod solver;
pub mod synth;

pub use formula::{Formula, TimeBound};
pub use interval::{Interval, IntervalSet};
pub use parser::{parse, print};
pub use rational::Rational;
pub use signal::{Sample, SignalPrefix};
