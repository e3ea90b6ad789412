use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    all_in, bias_bettor, faulty_wrapper, kt_bettor, mixture, priced, savings_transform, uniform,
    MartingaleRef, MixtureConfig, StepBudget,
};
use crate::error::{Error, Result};
use crate::numeric::ExactRational;

/// JSON-serializable strategy description.
///
/// ```json
/// {"kind": "savings", "inner": {"kind": "mixture", "members": [
///     {"kind": "kt"}, {"kind": "bias", "beta": "2/3"}]}}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MartingaleSpec {
    Uniform {},
    Bias {
        beta: ExactRational,
    },
    Kt {},
    AllIn {
        bit: u8,
    },
    /// Members are `M_1..M_k` in order.
    Mixture {
        members: Vec<MartingaleSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<StepBudget>,
    },
    Savings {
        inner: Box<MartingaleSpec>,
    },
    Faulty {
        inner: Box<MartingaleSpec>,
        violate_at: usize,
    },
    Priced {
        inner: Box<MartingaleSpec>,
        cost: CostModel,
    },
}

/// Declared cost `coefficient · (|w| + 1)^exponent` of evaluating `d(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub coefficient: u64,
    pub exponent: u32,
}

impl CostModel {
    pub fn at(&self, len: usize) -> u64 {
        (len as u64 + 1)
            .saturating_pow(self.exponent)
            .saturating_mul(self.coefficient)
    }
}

impl MartingaleSpec {
    pub fn build(&self) -> Result<MartingaleRef> {
        Ok(match self {
            MartingaleSpec::Uniform {} => uniform(),
            MartingaleSpec::Bias { beta } => bias_bettor(beta.clone())?,
            MartingaleSpec::Kt {} => kt_bettor(),
            MartingaleSpec::AllIn { bit } => match bit {
                0 | 1 => all_in(*bit == 1),
                other => return Err(Error::Parameter(format!("all_in bit must be 0 or 1, got {other}"))),
            },
            MartingaleSpec::Mixture { members, budget } => {
                let members = members.iter().map(|m| m.build()).collect::<Result<Vec<_>>>()?;
                mixture(MixtureConfig::new(members, budget.unwrap_or_default())?)
            }
            MartingaleSpec::Savings { inner } => savings_transform(inner.build()?),
            MartingaleSpec::Faulty { inner, violate_at } => faulty_wrapper(inner.build()?, *violate_at)?,
            MartingaleSpec::Priced { inner, cost } => priced(inner.build()?, *cost),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
