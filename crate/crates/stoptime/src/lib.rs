//! File formats, sampling, fuzzing and the experiment harness for
//! [`stoptime_core`].

pub mod experiment;
pub mod fixtures;
pub mod format;
pub mod fuzz;
pub mod rng;
pub mod sample;
