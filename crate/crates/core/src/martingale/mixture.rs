//! Weighted mixture over a finite registered family with activation and
//! freezing.
//!
//! For `2^n ≤ |x| < 2^(n+1)` and `m = min(n, k)`:
//!
//! ```text
//! d(x) = Σ_{i=1..m} 2^-i · M_i'(x) + 2^-m
//! ```
//!
//! `M_i'(x) = M_i(x) / M_i(x↾2^i)` while `M_i` stays well-behaved (one if
//! the anchor capital is zero). Member `i` is checked at every prefix
//! `x↾j` it passes through: declared cost within budget, nonnegative
//! capital, `d(λ) ≤ 1`, and exact fairness over the two children. At the
//! first failing `j` the member is frozen: `M_i' = 1` if `j < 2^i`,
//! otherwise the normalized ratio at `x↾j`. Members beyond `m` bet evenly
//! through the `2^-m` tail.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cursor, Martingale, MartingaleRef, MartingaleSpec};
use crate::error::{Error, Result};
use crate::numeric::ExactRational;

/// Step budget `t(j)` a member's declared cost must respect at prefix
/// length `j`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepBudget {
    #[default]
    Unlimited,
    /// `t(j) = coefficient · (j + 1)^exponent`.
    Polynomial { coefficient: u64, exponent: u32 },
}

impl StepBudget {
    pub fn allows(&self, j: usize, cost: u64) -> bool {
        match *self {
            StepBudget::Unlimited => true,
            StepBudget::Polynomial {
                coefficient,
                exponent,
            } => {
                let limit = (j as u64 + 1)
                    .saturating_pow(exponent)
                    .saturating_mul(coefficient);
                cost <= limit
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixtureConfig {
    members: Vec<MartingaleRef>,
    budget: StepBudget,
}

impl MixtureConfig {
    pub fn new(members: Vec<MartingaleRef>, budget: StepBudget) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Parameter("mixture family must be nonempty".into()));
        }
        if members.len() >= 63 {
            return Err(Error::Parameter("mixture family limited to 62 members".into()));
        }
        Ok(Self { members, budget })
    }

    pub fn members(&self) -> &[MartingaleRef] {
        &self.members
    }

    pub fn budget(&self) -> StepBudget {
        self.budget
    }
}

#[derive(Debug, Clone)]
pub struct Mixture {
    cfg: MixtureConfig,
}

pub fn mixture(cfg: MixtureConfig) -> MartingaleRef {
    Arc::new(Mixture { cfg })
}

impl Mixture {
    pub fn new(cfg: MixtureConfig) -> Self {
        Self { cfg }
    }
}

impl Martingale for Mixture {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Mixture {
            members: self.cfg.members.iter().map(|m| m.spec()).collect(),
            budget: match self.cfg.budget {
                StepBudget::Unlimited => None,
                b => Some(b),
            },
        }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(MixtureCursor {
            len: 0,
            budget: self.cfg.budget,
            members: self
                .cfg
                .members
                .iter()
                .enumerate()
                .map(|(k, m)| Member {
                    activation: 1usize << (k + 1),
                    cursor: m.cursor(),
                    anchor: None,
                    frozen: None,
                })
                .collect(),
        })
    }
}

#[derive(Clone)]
struct Member {
    /// `2^i` for the 1-based member index `i`.
    activation: usize,
    cursor: Box<dyn Cursor>,
    /// `M_i(x↾2^i)`, set once the prefix reaches the activation length.
    anchor: Option<ExactRational>,
    frozen: Option<ExactRational>,
}

impl Member {
    fn normalized(&self) -> ExactRational {
        let anchor = self.anchor.as_ref().expect("member is active");
        if anchor.is_zero() {
            ExactRational::one()
        } else {
            &self.cursor.value() / anchor
        }
    }

    /// `M_i'` at the current prefix; only meaningful once active.
    fn contribution(&self) -> ExactRational {
        match &self.frozen {
            Some(v) => v.clone(),
            None => self.normalized(),
        }
    }

    /// Checks the member at the current prefix and advances it by `bit`.
    /// Returns false (leaving the cursor unadvanced) on a violation.
    fn check_and_push(&mut self, bit: bool, budget: StepBudget) -> bool {
        let j = self.cursor.len();
        if let Some(cost) = self.cursor.cost() {
            if !budget.allows(j, cost) {
                return false;
            }
        }
        let v = self.cursor.value();
        if v.is_negative() || (j == 0 && v > ExactRational::one()) {
            return false;
        }
        if let Some([f0, f1]) = self.cursor.factors() {
            let fair = !f0.is_negative() && !f1.is_negative() && &f0 + &f1 == ExactRational::from(2i64);
            if !fair && !v.is_zero() {
                return false;
            }
            self.cursor.push(bit);
            return true;
        }
        let mut left = self.cursor.boxed();
        let mut right = self.cursor.boxed();
        left.push(false);
        right.push(true);
        let (v0, v1) = (left.value(), right.value());
        if v0.is_negative() || v1.is_negative() || &v0 + &v1 != v.mul_pow2(1) {
            return false;
        }
        self.cursor = if bit { right } else { left };
        true
    }
}

#[derive(Clone)]
struct MixtureCursor {
    len: usize,
    budget: StepBudget,
    members: Vec<Member>,
}

impl MixtureCursor {
    /// `min(⌊log2 |x|⌋, k)`, with 0 for `|x| < 2`.
    fn active_count(&self) -> usize {
        let n = if self.len < 2 {
            0
        } else {
            self.len.ilog2() as usize
        };
        n.min(self.members.len())
    }
}

impl Cursor for MixtureCursor {
    fn len(&self) -> usize {
        self.len
    }

    fn value(&self) -> ExactRational {
        let m = self.active_count();
        let mut total = ExactRational::pow2(-(m as i64));
        for (k, member) in self.members.iter().take(m).enumerate() {
            total += member.contribution().mul_pow2(-(k as i64 + 1));
        }
        total
    }

    fn push(&mut self, bit: bool) {
        let j = self.len;
        for member in &mut self.members {
            if member.frozen.is_some() {
                continue;
            }
            if !member.check_and_push(bit, self.budget) {
                member.frozen = Some(if j < member.activation {
                    ExactRational::one()
                } else {
                    member.normalized()
                });
            }
        }
        self.len += 1;
        for member in &mut self.members {
            if member.frozen.is_none() && member.anchor.is_none() && self.len == member.activation {
                member.anchor = Some(member.cursor.value());
            }
        }
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}
