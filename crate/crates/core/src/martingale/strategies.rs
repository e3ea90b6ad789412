use std::sync::Arc;

use super::{CostModel, Cursor, Martingale, MartingaleRef, MartingaleSpec};
use crate::error::{Error, Result};
use crate::numeric::ExactRational;

/// Even bets everywhere: `d(w) = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uniform;

pub fn uniform() -> MartingaleRef {
    Arc::new(Uniform)
}

impl Martingale for Uniform {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Uniform {}
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(UniformCursor { len: 0 })
    }
}

#[derive(Clone)]
struct UniformCursor {
    len: usize,
}

impl Cursor for UniformCursor {
    fn len(&self) -> usize {
        self.len
    }

    fn value(&self) -> ExactRational {
        ExactRational::one()
    }

    fn push(&mut self, _bit: bool) {
        self.len += 1;
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }

    fn factors(&self) -> Option<[ExactRational; 2]> {
        Some([ExactRational::one(), ExactRational::one()])
    }
}

/// Stakes a fixed fraction on the next bit being 1:
/// `d(w1) = 2β·d(w)`, `d(w0) = 2(1−β)·d(w)`.
#[derive(Debug, Clone)]
pub struct Bias {
    beta: ExactRational,
    factors: [ExactRational; 2],
}

impl Bias {
    pub fn new(beta: ExactRational) -> Result<Self> {
        if !beta.is_positive() || beta >= ExactRational::one() {
            return Err(Error::Parameter(format!("bias {beta} outside (0, 1)")));
        }
        let one_minus = ExactRational::one() - &beta;
        let factors = [one_minus.mul_pow2(1), beta.mul_pow2(1)];
        Ok(Self { beta, factors })
    }

    pub fn beta(&self) -> &ExactRational {
        &self.beta
    }
}

pub fn bias_bettor(beta: ExactRational) -> Result<MartingaleRef> {
    Ok(Arc::new(Bias::new(beta)?))
}

impl Martingale for Bias {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Bias {
            beta: self.beta.clone(),
        }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(ProductCursor {
            len: 0,
            value: ExactRational::one(),
            rule: ProductRule::Fixed(self.factors.clone()),
        })
    }
}

/// Krichevsky–Trofimov bettor:
/// `d(wb) = 2·d(w)·(#_b(w) + 1/2)/(|w| + 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kt;

pub fn kt_bettor() -> MartingaleRef {
    Arc::new(Kt)
}

impl Martingale for Kt {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Kt {}
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(ProductCursor {
            len: 0,
            value: ExactRational::one(),
            rule: ProductRule::Counts([0, 0]),
        })
    }
}

/// Stakes everything on `bit` at every step: `d(w) = 2^|w|` while `w` is
/// all `bit`, zero afterwards. The one shipped strategy whose capital can
/// reach zero.
#[derive(Debug, Clone, Copy)]
pub struct AllIn {
    pub bit: bool,
}

pub fn all_in(bit: bool) -> MartingaleRef {
    Arc::new(AllIn { bit })
}

impl Martingale for AllIn {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::AllIn { bit: self.bit as u8 }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        let mut f = [ExactRational::zero(), ExactRational::zero()];
        f[self.bit as usize] = ExactRational::from(2i64);
        Box::new(ProductCursor {
            len: 0,
            value: ExactRational::one(),
            rule: ProductRule::Fixed(f),
        })
    }
}

#[derive(Clone)]
enum ProductRule {
    Fixed([ExactRational; 2]),
    /// Occurrence counts of 0 and 1 so far.
    Counts([u64; 2]),
}

/// Capital evolving by a per-bit multiplicative factor.
#[derive(Clone)]
struct ProductCursor {
    len: usize,
    value: ExactRational,
    rule: ProductRule,
}

impl ProductCursor {
    fn factor(&self, bit: bool) -> ExactRational {
        match &self.rule {
            ProductRule::Fixed(f) => f[bit as usize].clone(),
            ProductRule::Counts(c) => {
                ExactRational::new(2 * c[bit as usize] + 1, self.len as u64 + 1)
                    .expect("positive denominator")
            }
        }
    }
}

impl Cursor for ProductCursor {
    fn len(&self) -> usize {
        self.len
    }

    fn value(&self) -> ExactRational {
        self.value.clone()
    }

    fn push(&mut self, bit: bool) {
        let f = self.factor(bit);
        self.value *= f;
        if let ProductRule::Counts(c) = &mut self.rule {
            c[bit as usize] += 1;
        }
        self.len += 1;
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }

    fn factors(&self) -> Option<[ExactRational; 2]> {
        Some([self.factor(false), self.factor(true)])
    }
}

/// Test hook: behaves as the wrapped strategy but adds one unit of capital
/// to every word `v` with `|v| > violate_at` and `v[violate_at] = 0`, so the
/// fairness condition first fails at prefixes of length `violate_at`.
#[derive(Debug, Clone)]
pub struct Faulty {
    inner: MartingaleRef,
    violate_at: usize,
}

pub fn faulty_wrapper(inner: MartingaleRef, violate_at: usize) -> Result<MartingaleRef> {
    if violate_at < 1 {
        return Err(Error::Parameter("violate_at must be at least 1".into()));
    }
    Ok(Arc::new(Faulty { inner, violate_at }))
}

impl Martingale for Faulty {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Faulty {
            inner: Box::new(self.inner.spec()),
            violate_at: self.violate_at,
        }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(FaultyCursor {
            inner: self.inner.cursor(),
            violate_at: self.violate_at,
            bumped: false,
        })
    }
}

struct FaultyCursor {
    inner: Box<dyn Cursor>,
    violate_at: usize,
    bumped: bool,
}

impl Cursor for FaultyCursor {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn value(&self) -> ExactRational {
        let v = self.inner.value();
        if self.bumped {
            v + ExactRational::one()
        } else {
            v
        }
    }

    fn push(&mut self, bit: bool) {
        if self.inner.len() == self.violate_at && !bit {
            self.bumped = true;
        }
        self.inner.push(bit);
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(FaultyCursor {
            inner: self.inner.boxed(),
            violate_at: self.violate_at,
            bumped: self.bumped,
        })
    }

    fn cost(&self) -> Option<u64> {
        self.inner.cost()
    }
}

/// Attaches a declared step-cost model to a strategy without changing its
/// values.
#[derive(Debug, Clone)]
pub struct Priced {
    inner: MartingaleRef,
    cost: CostModel,
}

pub fn priced(inner: MartingaleRef, cost: CostModel) -> MartingaleRef {
    Arc::new(Priced { inner, cost })
}

impl Martingale for Priced {
    fn spec(&self) -> MartingaleSpec {
        MartingaleSpec::Priced {
            inner: Box::new(self.inner.spec()),
            cost: self.cost,
        }
    }

    fn cursor(&self) -> Box<dyn Cursor> {
        Box::new(PricedCursor {
            inner: self.inner.cursor(),
            cost: self.cost,
        })
    }
}

struct PricedCursor {
    inner: Box<dyn Cursor>,
    cost: CostModel,
}

impl Cursor for PricedCursor {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn value(&self) -> ExactRational {
        self.inner.value()
    }

    fn push(&mut self, bit: bool) {
        self.inner.push(bit);
    }

    fn boxed(&self) -> Box<dyn Cursor> {
        Box::new(PricedCursor {
            inner: self.inner.boxed(),
            cost: self.cost,
        })
    }

    fn factors(&self) -> Option<[ExactRational; 2]> {
        self.inner.factors()
    }

    fn cost(&self) -> Option<u64> {
        Some(self.cost.at(self.inner.len()))
    }
}
