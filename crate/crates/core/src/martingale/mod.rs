//! Exact betting strategies and their combinators.
//!
//! A [`Martingale`] is evaluated through a [`Cursor`], an incremental
//! evaluator positioned at some prefix `w` that can be extended one bit at a
//! time and cloned to explore both children. Every built-in satisfies
//! `2·d(w) = d(w0) + d(w1)` exactly.

mod mixture;
mod savings;
mod spec;
mod strategies;
mod validate;

use std::fmt;
use std::sync::Arc;

use crate::numeric::{BitString, ExactRational};

pub use mixture::{mixture, Mixture, MixtureConfig, StepBudget};
pub use savings::{savings_transform, Savings, SavingsState};
pub use spec::{CostModel, MartingaleSpec};
pub use strategies::{
    all_in, bias_bettor, faulty_wrapper, kt_bettor, priced, uniform, AllIn, Bias, Faulty, Kt,
    Priced, Uniform,
};
pub use validate::{validate_martingale, ValidationReport, Violation, ViolationKind};

/// Shared handle to a strategy.
pub type MartingaleRef = Arc<dyn Martingale>;

pub trait Martingale: Send + Sync + fmt::Debug {
    /// Descriptor: kind plus parameters, serializable as a spec file.
    fn spec(&self) -> MartingaleSpec;

    /// Evaluator positioned at the empty word.
    fn cursor(&self) -> Box<dyn Cursor>;

    fn eval(&self, w: &BitString) -> ExactRational {
        let mut c = self.cursor();
        for b in w.iter() {
            c.push(b);
        }
        c.value()
    }
}

/// Incremental evaluator of a martingale along one path.
pub trait Cursor: Send {
    /// Length of the prefix this cursor sits on.
    fn len(&self) -> usize;

    fn value(&self) -> ExactRational;

    fn push(&mut self, bit: bool);

    fn boxed(&self) -> Box<dyn Cursor>;

    /// `[d(w0)/d(w), d(w1)/d(w)]` when the strategy bets multiplicatively
    /// and `d(w) > 0`. Combinators use it to skip full child evaluations.
    fn factors(&self) -> Option<[ExactRational; 2]> {
        None
    }

    /// Declared step cost of evaluating the current prefix, if modelled.
    fn cost(&self) -> Option<u64> {
        None
    }
}

impl Clone for Box<dyn Cursor> {
    fn clone(&self) -> Self {
        self.boxed()
    }
}

/// `m(w↾j)` for `j = 0..=|w|`.
pub fn capital_trace(m: &dyn Martingale, w: &BitString) -> Vec<ExactRational> {
    let mut c = m.cursor();
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(c.value());
    for b in w.iter() {
        c.push(b);
        out.push(c.value());
    }
    out
}

/// CSV rendering of a capital trace:
/// `prefix_length,numerator,denominator,decimal_approx`.
pub fn capital_trace_csv(trace: &[ExactRational]) -> String {
    let mut out = String::from("prefix_length,numerator,denominator,decimal_approx\n");
    for (j, v) in trace.iter().enumerate() {
        out.push_str(&format!(
            "{j},{},{},{}\n",
            v.numer(),
            v.denom(),
            v.to_decimal(12)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn trace_contract() {
        let w: BitString = "010".parse().unwrap();
        let t = capital_trace(uniform().as_ref(), &w);
        assert_eq!(t, vec![ExactRational::one(); 4]);

        let b = bias_bettor(rat(3, 4).unwrap()).unwrap();
        let t = capital_trace(b.as_ref(), &"11".parse().unwrap());
        assert_eq!(t, vec![ExactRational::one(), rat(3, 2).unwrap(), rat(9, 4).unwrap()]);
    }

    #[test]
    fn trace_csv_layout() {
        let b = bias_bettor(rat(3, 4).unwrap()).unwrap();
        let csv = capital_trace_csv(&capital_trace(b.as_ref(), &"1".parse().unwrap()));
        assert_eq!(
            csv,
            "prefix_length,numerator,denominator,decimal_approx\n\
             0,1,1,1.000000000000\n\
             1,3,2,1.500000000000\n"
        );
    }
}
