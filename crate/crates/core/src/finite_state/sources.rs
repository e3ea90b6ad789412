use crate::numeric::{BitSource, BitString};

/// Binary expansions of 1, 2, 3, … concatenated.
#[derive(Debug, Clone, Copy, Default)]
pub struct Champernowne;

impl BitSource for Champernowne {
    fn get(&self, i: usize) -> Option<bool> {
        let mut offset = i as u128;
        let mut len = 1u32;
        loop {
            let block = (1u128 << (len - 1)) * len as u128;
            if offset < block {
                break;
            }
            offset -= block;
            len += 1;
        }
        let number = (1u128 << (len - 1)) + offset / len as u128;
        let bit = len - 1 - (offset % len as u128) as u32;
        Some((number >> bit) & 1 == 1)
    }

    fn name(&self) -> String {
        "champernowne".into()
    }
}

pub fn champernowne(n: usize) -> BitString {
    let mut out = BitString::with_capacity(n);
    let mut k = 1u64;
    while out.len() < n {
        for b in BitString::from_uint(k).iter() {
            if out.len() == n {
                break;
            }
            out.push(b);
        }
        k += 1;
    }
    out
}

/// `X[0] = 0`; bits in `[k!, (k+1)!)` are 1 exactly when `k` is odd.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoLimitFrequency;

impl BitSource for NoLimitFrequency {
    fn get(&self, i: usize) -> Option<bool> {
        if i == 0 {
            return Some(false);
        }
        let i = i as u128;
        let (mut k, mut fact) = (1u128, 1u128);
        while fact * (k + 1) <= i {
            k += 1;
            fact *= k;
        }
        Some(k % 2 == 1)
    }

    fn name(&self) -> String {
        "example51".into()
    }
}

pub fn example_no_limit_freq(n: usize) -> BitString {
    let mut out = BitString::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(false);
    let (mut k, mut start) = (1usize, 1usize);
    while out.len() < n {
        let end = (start * (k + 1)).min(n);
        for _ in start..end {
            out.push(k % 2 == 1);
        }
        start *= k + 1;
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn champernowne_examples() {
        assert_eq!(champernowne(10).to_string(), "1101110010");
        let long = champernowne(5000);
        assert_eq!(Champernowne.prefix(5000).unwrap(), long);
        assert_eq!(champernowne(300), long.prefix(300).unwrap());
        assert_eq!(Champernowne.get(1_000_000), Champernowne.prefix(1_000_001).unwrap().get(1_000_000));
    }

    #[test]
    fn champernowne_one_bias_is_visible() {
        let x = champernowne(2_000_000);
        let f = x.count_ones() as f64 / x.len() as f64;
        assert!((f - 0.525752).abs() < 1e-6, "{f}");
        let y = champernowne(1_000_000);
        let g = y.count_ones() as f64 / y.len() as f64;
        assert!((g - 0.530199).abs() < 1e-6, "{g}");
    }

    #[test]
    fn no_limit_sequence() {
        assert_eq!(example_no_limit_freq(6).to_string(), "010000");
        let nine = 362_880;
        let x = example_no_limit_freq(nine);
        assert_eq!(x.count_ones(), 35_899);
        assert_eq!(NoLimitFrequency.prefix(5_100).unwrap(), x.prefix(5_100).unwrap());
        let eight = x.prefix(40_320).unwrap();
        assert!(eight.count_ones() * 8 >= 40_320 * 7);
        assert_eq!(example_no_limit_freq(0).len(), 0);
    }
}
