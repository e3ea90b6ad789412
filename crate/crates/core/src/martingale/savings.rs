//! Savings-account transform.
//!
//! Working capital `c` follows the inner strategy's bets; whenever it
//! reaches 2, half of it is banked irrevocably into `s`. The output value
//! is `s + c`. Since a transfer moves value from `c` to `s` without
//! changing the sum, `s + c` moves by exactly the inner ratio and the
//! output stays a martingale.

use std::sync::Arc;

use super::{Cursor, Martingale, MartingaleRef, MartingaleSpec};
use crate::numeric::{BitString, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SavingsState {
    pub savings: ExactRational,
    pub working: ExactRational,
}

impl SavingsState {
    pub fn value(&self) -> ExactRational {
        &self.savings + &self.working
    }
}

#[derive(Debug, Clone)]
pub struct Savings {
    inner: MartingaleRef,
}

pub fn savings_transform(inner: MartingaleRef) -> MartingaleRef {
    Arc::new(Savings { inner })
}

impl Savings {
    pub fn new(inner: MartingaleRef) -> Self {
        Self { inner }
    }

    fn savings_cursor(&self) -> SavingsCursor {
        let inner = self.inner.cursor();
        let inner_value = inner.value();
        SavingsCursor {
            inner,
            working: inner_value.clone(),
            inner_value,
            savings: ExactRational::zero(),
            transfers: 0,
        }
    }

    /// Account state at every prefix `w↾0..=|w|`.
    pub fn states(&self, w: &BitString) -> Vec<SavingsState> {
        let mut c = self.savings_cursor();
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(c.state());
        for b in w.iter() {
            c.push(b);
            out.push(c.state());
        }
        out
    }

    /// Number of transfers into savings along `w`.
    pub fn transfers(&self, w: &BitString) -> usize {
        let mut c = self.savings_cursor();
        for b in w.iter() {
            c.push(b);
        }
        c.transfers
    }
}

impl Martingale for Savings {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Savings {
            inner: Box::new(self.inner.spec()),
        }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(self.savings_cursor())
    }
}

struct SavingsCursor {
    inner: Box<dyn Cursor>,
    inner_value: ExactRational,
    savings: ExactRational,
    working: ExactRational,
    transfers: usize,
}

impl SavingsCursor {
    fn state(&self) -> SavingsState {
        SavingsState {
            savings: self.savings.clone(),
            working: self.working.clone(),
        }
    }
}

impl Cursor for SavingsCursor {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn value(&self) -> ExactRational {
        &self.savings + &self.working
    }

    fn push(&mut self, bit: bool) {
        let positive = self.inner_value.is_positive();
        match self.inner.factors().filter(|_| positive) {
            Some(f) => {
                let f = &f[bit as usize];
                self.working *= f;
                self.inner_value *= f;
                self.inner.push(bit);
            }
            None => {
                self.inner.push(bit);
                let next = self.inner.value();
                if positive {
                    self.working = &(&self.working * &next) / &self.inner_value;
                }
                self.inner_value = next;
            }
        }
        if self.working >= ExactRational::from(2i64) {
            self.working = self.working.mul_pow2(-1);
            self.savings += &self.working;
            self.transfers += 1;
        }
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(SavingsCursor {
            inner: self.inner.boxed(),
            inner_value: self.inner_value.clone(),
            savings: self.savings.clone(),
            working: self.working.clone(),
            transfers: self.transfers,
        })
    }
}
