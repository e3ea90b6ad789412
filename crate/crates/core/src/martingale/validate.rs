use std::fmt;

use super::{Cursor, Martingale};
use crate::numeric::{BitString, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// `d(λ) > 1`.
    InitialCapital(ExactRational),
    Negative(ExactRational),
    /// `2·d(w) ≠ d(w0) + d(w1)`.
    Unfair {
        parent: ExactRational,
        left: ExactRational,
        right: ExactRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Word at which the check failed; for fairness this is the parent.
    pub prefix: BitString,
    pub kind: ViolationKind,
}

impl Violation {
    pub fn length(&self) -> usize {
        self.prefix.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub depth: usize,
    /// Number of words whose checks ran.
    pub checked: usize,
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "pass: {} words checked to depth {}", self.checked, self.depth),
            Some(v) => {
                write!(f, "violation at length {} (prefix {}): ", v.length(), v.prefix)?;
                match &v.kind {
                    ViolationKind::InitialCapital(c) => write!(f, "d(λ) = {c} exceeds 1"),
                    ViolationKind::Negative(c) => write!(f, "negative capital {c}"),
                    ViolationKind::Unfair { parent, left, right } => {
                        write!(f, "2·{parent} ≠ {left} + {right}")
                    }
                }
            }
        }
    }
}

/// Exhaustive breadth-first scan of every `w` with `|w| < depth`: checks
/// `d(λ) ≤ 1`, nonnegativity and exact fairness. Reports the first
/// violation in length-lexicographic order.
pub fn validate_martingale(m: &dyn Martingale, depth: usize) -> ValidationReport {
    let root = m.cursor();
    let v = root.value();
    let fail = |prefix: BitString, kind, checked| ValidationReport {
        depth,
        checked,
        violation: Some(Violation { prefix, kind }),
    };
    if v > ExactRational::one() {
        return fail(BitString::new(), ViolationKind::InitialCapital(v), 0);
    }
    if v.is_negative() {
        return fail(BitString::new(), ViolationKind::Negative(v), 0);
    }
    let mut level: Vec<(BitString, Box<dyn Cursor>, ExactRational)> = vec![(BitString::new(), root, v)];
    let mut checked = 0;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (word, cursor, parent) in level {
            checked += 1;
            let mut left = cursor.boxed();
            let mut right = cursor;
            left.push(false);
            right.push(true);
            let (lv, rv) = (left.value(), right.value());
            for (bit, val) in [(false, &lv), (true, &rv)] {
                if val.is_negative() {
                    let mut child = word.clone();
                    child.push(bit);
                    return fail(child, ViolationKind::Negative(val.clone()), checked);
                }
            }
            if &lv + &rv != parent.mul_pow2(1) {
                let kind = ViolationKind::Unfair {
                    parent,
                    left: lv,
                    right: rv,
                };
                return fail(word, kind, checked);
            }
            let mut lw = word.clone();
            lw.push(false);
            let mut rw = word;
            rw.push(true);
            next.push((lw, left, lv));
            next.push((rw, right, rv));
        }
        level = next;
    }
    ValidationReport {
        depth,
        checked,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{
        bias_bettor, faulty_wrapper, kt_bettor, mixture, uniform, MixtureConfig, StepBudget,
    };
    use crate::numeric::rat;

    #[test]
    fn uniform_passes() {
        let r = validate_martingale(uniform().as_ref(), 8);
        assert!(r.passed());
        assert_eq!(r.checked, 255);
    }

    #[test]
    fn faulty_reports_length_three() {
        let f = faulty_wrapper(uniform(), 3).unwrap();
        let r = validate_martingale(f.as_ref(), 8);
        let v = r.violation.unwrap();
        assert_eq!(v.length(), 3);
        assert!(matches!(v.kind, ViolationKind::Unfair { .. }));
    }

    #[test]
    fn kt_bias_mixture_passes() {
        let m = mixture(
            MixtureConfig::new(
                vec![kt_bettor(), bias_bettor(rat(2, 3).unwrap()).unwrap()],
                StepBudget::Unlimited,
            )
            .unwrap(),
        );
        assert!(validate_martingale(m.as_ref(), 10).passed());
    }

    #[test]
    fn mixture_with_faulty_member_stays_fair() {
        let m = mixture(
            MixtureConfig::new(
                vec![faulty_wrapper(uniform(), 3).unwrap(), kt_bettor()],
                StepBudget::Unlimited,
            )
            .unwrap(),
        );
        assert!(validate_martingale(m.as_ref(), 16).passed());
    }

    #[test]
    fn report_text() {
        let f = faulty_wrapper(uniform(), 1).unwrap();
        let r = validate_martingale(f.as_ref(), 4);
        assert!(r.to_string().starts_with("violation at length 1"));
    }
}
