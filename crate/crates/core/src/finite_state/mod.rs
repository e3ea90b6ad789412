//! Finite-state transducers, normal-sequence sources, and frequency
//! statistics of transducer outputs.

mod sources;
mod stats;
mod transducer;

pub use sources::{champernowne, example_no_limit_freq, Champernowne, NoLimitFrequency};
pub use stats::{
    block_freq, convergence_report, empirical_symbol_freq, estimate_pi, frequency_report, predicted_symbol_freq,
    stationary_pi_analytic, ConvergenceReport, Distribution, FrequencyReport, PiEstimate,
};
pub use transducer::{
    a_ab, doubling, eraser, flip, identity, parity, sample_machine, sample_machines, RunStats, Transducer,
    TransducerSpec, TransitionSpec,
};
