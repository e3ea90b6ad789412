use std::collections::BTreeSet;

use super::transducer::{RunStats, Transducer};
use crate::error::{Error, Result};
use crate::numeric::{BitSource, ExactRational};

/// Weights over labelled outcomes, in a fixed label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    entries: Vec<(String, ExactRational)>,
}

impl Distribution {
    pub fn new(entries: Vec<(String, ExactRational)>) -> Self {
        Self { entries }
    }

    pub fn get(&self, label: &str) -> Option<&ExactRational> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, w)| w)
    }

    pub fn total(&self) -> ExactRational {
        self.entries.iter().fold(ExactRational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ExactRational)> {
        self.entries.iter().map(|(l, w)| (l.as_str(), w))
    }

    pub fn weights(&self) -> Vec<ExactRational> {
        self.entries.iter().map(|(_, w)| w.clone()).collect()
    }

    /// Largest per-label absolute difference.
    pub fn max_gap(&self, other: &Distribution) -> Result<f64> {
        self.entries
            .iter()
            .map(|(l, w)| {
                let v = other
                    .get(l)
                    .ok_or_else(|| Error::Parameter(format!("label {l:?} missing from the other distribution")))?;
                Ok((w.to_f64() - v.to_f64()).abs())
            })
            .try_fold(0.0f64, |m, g: Result<f64>| Ok(m.max(g?)))
    }
}

/// Fraction of the aligned, disjoint `|u|`-blocks of `w` equal to `u`.
pub fn block_freq<T: PartialEq>(u: &[T], w: &[T]) -> Result<ExactRational> {
    if u.is_empty() || w.is_empty() || w.len() % u.len() != 0 {
        return Err(Error::Parameter(format!(
            "block length {} must be positive and divide word length {}",
            u.len(),
            w.len()
        )));
    }
    let k = w.len() / u.len();
    let hits = w.chunks(u.len()).filter(|c| *c == u).count();
    ExactRational::new(hits as u64, k as u64)
}

#[derive(Debug, Clone)]
pub struct PiEstimate {
    pub pi: Distribution,
    /// `max_{q,u} |N_m(q,u)/m − π̂(q)/|Σ||`.
    pub residual: f64,
    pub stats: RunStats,
}

/// Empirical state occupation on the first `m` bits of `source`.
pub fn estimate_pi(t: &Transducer, source: &dyn BitSource, m: usize) -> Result<PiEstimate> {
    if m == 0 {
        return Err(Error::Parameter("estimate_pi needs m ≥ 1".into()));
    }
    let stats = t.run_bits(&source.prefix(m)?)?;
    let sigma = t.input_alphabet().len() as u64;
    let mut entries = Vec::with_capacity(t.states().len());
    let mut residual = ExactRational::zero();
    for (q, name) in t.states().iter().enumerate() {
        let row = &stats.counts[q];
        let pi_q = ExactRational::new(row.iter().sum::<u64>(), m as u64)?;
        let share = &pi_q * &ExactRational::new(1, sigma)?;
        for &n in row {
            let mut gap = ExactRational::new(n, m as u64)? - &share;
            if gap.is_negative() {
                gap = -gap;
            }
            if gap > residual {
                residual = gap;
            }
        }
        entries.push((name.clone(), pi_q));
    }
    Ok(PiEstimate {
        pi: Distribution::new(entries),
        residual: residual.to_f64(),
        stats,
    })
}

fn reachable(t: &Transducer) -> Vec<bool> {
    let mut seen = vec![false; t.states().len()];
    let mut stack = vec![t.start()];
    seen[t.start()] = true;
    while let Some(q) = stack.pop() {
        for u in 0..t.input_alphabet().len() {
            let r = t.next_state(q, u);
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen
}

/// States reachable from `q` (including `q`).
fn closure(t: &Transducer, q: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([q]);
    let mut stack = vec![q];
    while let Some(p) = stack.pop() {
        for u in 0..t.input_alphabet().len() {
            let r = t.next_state(p, u);
            if seen.insert(r) {
                stack.push(r);
            }
        }
    }
    seen
}

/// Exact stationary distribution of the uniform-input chain on states
/// reachable from the start state. Transient states get weight 0.
pub fn stationary_pi_analytic(t: &Transducer) -> Result<Distribution> {
    let reach = reachable(t);
    let live: Vec<usize> = (0..t.states().len()).filter(|&q| reach[q]).collect();
    // a state is recurrent iff everything it reaches reaches it back
    let closures: Vec<(usize, BTreeSet<usize>)> = live.iter().map(|&q| (q, closure(t, q))).collect();
    let recurrent: Vec<usize> = closures
        .iter()
        .filter(|(q, c)| c.iter().all(|&r| closure(t, r).contains(q)))
        .map(|(q, _)| *q)
        .collect();
    let classes: BTreeSet<BTreeSet<usize>> = closures
        .into_iter()
        .filter(|(q, _)| recurrent.contains(q))
        .map(|(_, c)| c)
        .collect();
    if classes.len() != 1 {
        return Err(Error::Ambiguous(format!(
            "{} recurrent classes under uniform input; use the empirical estimate",
            classes.len()
        )));
    }
    let class: Vec<usize> = classes.into_iter().next().expect("one class").into_iter().collect();
    let sigma = t.input_alphabet().len() as u64;
    let k = class.len();
    let pos = |q: usize| class.iter().position(|&c| c == q).expect("closed class");
    // rows: balance equations π_j = Σ_i π_i P(i→j) for j < k−1, then Σ π = 1
    let mut a = vec![vec![ExactRational::zero(); k + 1]; k];
    for (row, coeffs) in a.iter_mut().enumerate().take(k - 1) {
        coeffs[row] = ExactRational::from(-1i64);
    }
    for (i, &q) in class.iter().enumerate() {
        for u in 0..sigma as usize {
            let j = pos(t.next_state(q, u));
            if j < k - 1 {
                a[j][i] += ExactRational::new(1, sigma)?;
            }
        }
    }
    for col in 0..=k {
        a[k - 1][col] = ExactRational::one();
    }
    let solution = solve(a)?;
    let mut weights = vec![ExactRational::zero(); t.states().len()];
    for (i, &q) in class.iter().enumerate() {
        weights[q] = solution[i].clone();
    }
    Ok(Distribution::new(t.states().iter().cloned().zip(weights).collect()))
}

/// Gauss–Jordan elimination on an augmented `k × (k+1)` system.
fn solve(mut a: Vec<Vec<ExactRational>>) -> Result<Vec<ExactRational>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Ambiguous("singular stationary system".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for c in col..=k {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=k {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[k].clone()).collect())
}

/// `p(a) = Σ #_a(τ(q,u))·π(q) / Σ |τ(q,u)|·π(q)` over the output alphabet.
pub fn predicted_symbol_freq(t: &Transducer, pi: &Distribution) -> Result<Distribution> {
    let mut numer = vec![ExactRational::zero(); t.output_alphabet().len()];
    let mut denom = ExactRational::zero();
    for (q, name) in t.states().iter().enumerate() {
        let w = pi
            .get(name)
            .ok_or_else(|| Error::Parameter(format!("distribution lacks state {name:?}")))?;
        if w.is_zero() {
            continue;
        }
        for u in 0..t.input_alphabet().len() {
            let word = t.output_word(q, u);
            denom += w * &ExactRational::from(word.chars().count() as u64);
            for (ai, &a) in t.output_alphabet().iter().enumerate() {
                let hits = word.chars().filter(|&c| c == a).count() as u64;
                numer[ai] += w * &ExactRational::from(hits);
            }
        }
    }
    if denom.is_zero() {
        return Err(Error::DegenerateOutput(format!("{} emits nothing under π", t.name())));
    }
    let inv = denom.recip()?;
    Ok(Distribution::new(
        t.output_alphabet()
            .iter()
            .zip(numer)
            .map(|(a, n)| (a.to_string(), n * &inv))
            .collect(),
    ))
}

/// Symbol frequencies of a finished output word over `alphabet`.
pub fn empirical_symbol_freq(output: &str, alphabet: &[char]) -> Result<Distribution> {
    let n = output.chars().count() as u64;
    if n == 0 {
        return Err(Error::DegenerateOutput("empty output".into()));
    }
    alphabet
        .iter()
        .map(|&a| {
            let hits = output.chars().filter(|&c| c == a).count() as u64;
            Ok((a.to_string(), ExactRational::new(hits, n)?))
        })
        .collect::<Result<Vec<_>>>()
        .map(Distribution::new)
}

#[derive(Debug, Clone)]
pub struct FrequencyReport {
    pub machine: String,
    pub input_len: usize,
    pub output_len: usize,
    pub empirical: Distribution,
    pub predicted: Distribution,
    pub pi_analytic: Distribution,
    pub pi_estimate: PiEstimate,
}

impl FrequencyReport {
    pub fn max_gap(&self) -> f64 {
        self.empirical.max_gap(&self.predicted).expect("same alphabet")
    }

    /// `n,symbol,empirical,predicted` with `n` the output length.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,symbol,empirical,predicted\n");
        for ((a, e), (_, p)) in self.empirical.iter().zip(self.predicted.iter()) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.output_len,
                a,
                e.to_decimal(6),
                p.to_decimal(6)
            ));
        }
        out
    }
}

/// Runs `t` on `m` source bits and compares output frequencies with the
/// analytic prediction.
pub fn frequency_report(t: &Transducer, source: &dyn BitSource, m: usize) -> Result<FrequencyReport> {
    let pi_analytic = stationary_pi_analytic(t)?;
    let predicted = predicted_symbol_freq(t, &pi_analytic)?;
    let pi_estimate = estimate_pi(t, source, m)?;
    let empirical = empirical_symbol_freq(&pi_estimate.stats.output, t.output_alphabet())?;
    Ok(FrequencyReport {
        machine: t.name().to_string(),
        input_len: m,
        output_len: pi_estimate.stats.output_len(),
        empirical,
        predicted,
        pi_analytic,
        pi_estimate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub symbol: bool,
    /// `(n, P(symbol, X↾n))`.
    pub points: Vec<(usize, ExactRational)>,
    pub tail_min: f64,
    pub tail_max: f64,
    pub gap: f64,
    pub oscillating: bool,
}

impl ConvergenceReport {
    /// `n,count,frequency`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count,frequency\n");
        for (n, p) in &self.points {
            let count = p * &ExactRational::from(*n as u64);
            out.push_str(&format!("{},{},{}\n", n, count, p.to_decimal(6)));
        }
        out
    }
}

/// Frequency of `symbol` at each checkpoint; oscillation is flagged when
/// the spread over the later half of the checkpoints exceeds `gap`.
pub fn convergence_report(x: &dyn BitSource, checkpoints: &[usize], symbol: bool, gap: f64) -> Result<ConvergenceReport> {
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("checkpoints must be positive and strictly ascending".into()));
    }
    let mut points = Vec::with_capacity(checkpoints.len());
    let (mut hits, mut i) = (0u64, 0usize);
    for &n in checkpoints {
        while i < n {
            let bit = x
                .get(i)
                .ok_or_else(|| Error::Range(format!("source ends before bit {i}")))?;
            hits += (bit == symbol) as u64;
            i += 1;
        }
        points.push((n, ExactRational::new(hits, n as u64)?));
    }
    let tail: Vec<f64> = points[points.len() / 2..].iter().map(|(_, p)| p.to_f64()).collect();
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvergenceReport {
        symbol,
        points,
        tail_min,
        tail_max,
        gap,
        oscillating: tail_max - tail_min > gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_state::sources::{champernowne, Champernowne, NoLimitFrequency};
    use crate::finite_state::transducer::*;
    use crate::numeric::{rat, BitString, ConstantBits};

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn block_freq_examples() {
        assert_eq!(block_freq(&chars("1"), &chars("1010")).unwrap(), rat(1, 2).unwrap());
        assert_eq!(block_freq(&chars("01"), &chars("0101")).unwrap(), ExactRational::one());
        assert_eq!(block_freq(&chars("11"), &chars("0101")).unwrap(), ExactRational::zero());
        assert!(block_freq(&chars("11"), &chars("010")).is_err());
        assert!(block_freq::<char>(&[], &chars("01")).is_err());
    }

    #[test]
    fn analytic_pi_examples() {
        let one = stationary_pi_analytic(&identity()).unwrap();
        assert_eq!(one.weights(), vec![ExactRational::one()]);
        let half = rat(1, 2).unwrap();
        assert_eq!(stationary_pi_analytic(&flip()).unwrap().weights(), vec![half.clone(), half.clone()]);
        assert_eq!(stationary_pi_analytic(&parity()).unwrap().weights(), vec![half.clone(), half]);
    }

    #[test]
    fn transient_states_and_ambiguity() {
        // start → sink on any symbol: start is transient
        let spec = r#"{"name":"sink","states":["s","t"],"input_alphabet":["0","1"],"output_alphabet":["0"],
            "start":"s","transitions":[
              {"state":"s","in_symbol":"0","next_state":"t","out_word":""},
              {"state":"s","in_symbol":"1","next_state":"t","out_word":""},
              {"state":"t","in_symbol":"0","next_state":"t","out_word":"0"},
              {"state":"t","in_symbol":"1","next_state":"t","out_word":"0"}]}"#;
        let t = Transducer::from_json(spec).unwrap();
        assert_eq!(stationary_pi_analytic(&t).unwrap().weights(), vec![ExactRational::zero(), ExactRational::one()]);
        // 0 → absorbing a, 1 → absorbing b
        let spec = r#"{"name":"fork","states":["s","a","b"],"input_alphabet":["0","1"],"output_alphabet":["0"],
            "start":"s","transitions":[
              {"state":"s","in_symbol":"0","next_state":"a","out_word":""},
              {"state":"s","in_symbol":"1","next_state":"b","out_word":""},
              {"state":"a","in_symbol":"0","next_state":"a","out_word":""},
              {"state":"a","in_symbol":"1","next_state":"a","out_word":""},
              {"state":"b","in_symbol":"0","next_state":"b","out_word":""},
              {"state":"b","in_symbol":"1","next_state":"b","out_word":""}]}"#;
        let t = Transducer::from_json(spec).unwrap();
        assert!(matches!(stationary_pi_analytic(&t), Err(Error::Ambiguous(_))));
        assert!(estimate_pi(&t, &Champernowne, 100).is_ok());
    }

    #[test]
    fn predicted_frequency_examples() {
        let id = identity();
        let p = predicted_symbol_freq(&id, &stationary_pi_analytic(&id).unwrap()).unwrap();
        assert_eq!(p.weights(), vec![rat(1, 2).unwrap(), rat(1, 2).unwrap()]);
        let ab = a_ab();
        let p = predicted_symbol_freq(&ab, &stationary_pi_analytic(&ab).unwrap()).unwrap();
        assert_eq!(p.get("a"), Some(&rat(2, 3).unwrap()));
        assert_eq!(p.get("b"), Some(&rat(1, 3).unwrap()));
        let er = eraser();
        assert!(matches!(
            predicted_symbol_freq(&er, &stationary_pi_analytic(&er).unwrap()),
            Err(Error::DegenerateOutput(_))
        ));
        for t in sample_machines().into_iter().filter(|t| t.max_output_len() > 0) {
            let p = predicted_symbol_freq(&t, &stationary_pi_analytic(&t).unwrap()).unwrap();
            assert_eq!(p.total(), ExactRational::one(), "{}", t.name());
        }
    }

    #[test]
    fn estimate_pi_single_state() {
        let x = champernowne(1000);
        let est = estimate_pi(&identity(), &x, 1000).unwrap();
        assert_eq!(est.pi.weights(), vec![ExactRational::one()]);
        let ones = x.count_ones() as f64 / 1000.0;
        assert!((est.residual - (ones - 0.5).abs()).abs() < 1e-12);
        for t in sample_machines() {
            assert_eq!(estimate_pi(&t, &x, 1000).unwrap().pi.total(), ExactRational::one());
        }
        assert!(estimate_pi(&identity(), &x, 0).is_err());
    }

    #[test]
    fn measured_champernowne_statistics() {
        // base-2 Champernowne prefixes lean towards 1; these are the measured values
        let x = champernowne(1_000_000);
        let residual = |t: Transducer| estimate_pi(&t, &x, 1_000_000).unwrap().residual;
        assert!((residual(identity()) - 0.0302).abs() < 5e-4);
        assert!((residual(flip()) - 0.0203).abs() < 5e-4);
        assert!((residual(parity()) - 0.0234).abs() < 5e-4);
        let report = frequency_report(&a_ab(), &x, 1_000_000).unwrap();
        assert!(report.max_gap() < 0.02);
    }

    #[test]
    fn output_length_sandwich() {
        let x = champernowne(500);
        for t in sample_machines().into_iter().filter(|t| t.max_output_len() > 0) {
            let full = t.run_bits(&x).unwrap().output_len();
            for n in [1usize, 17, full / 2, full] {
                let m = (1..=500).find(|&m| t.run_bits(&x.prefix(m).unwrap()).unwrap().output_len() >= n).unwrap();
                let len = t.run_bits(&x.prefix(m).unwrap()).unwrap().output_len();
                assert!(n <= len && len < n + t.max_output_len(), "{}: n = {n}", t.name());
            }
        }
    }

    #[test]
    fn convergence_examples() {
        let facts = [5040, 40_320, 362_880, 3_628_800];
        let r = convergence_report(&NoLimitFrequency, &facts, true, 0.7).unwrap();
        assert!(r.oscillating);
        assert_eq!(r.points[2].1, rat(35_899, 362_880).unwrap());
        assert!(r.points[1].1 >= rat(7, 8).unwrap());
        let ones = convergence_report(&ConstantBits(true), &facts, true, 0.7).unwrap();
        assert!(!ones.oscillating);
        assert_eq!(ones.tail_min, 1.0);
        let doubled = doubling().run_bits(&champernowne(200_000)).unwrap().output_bits().unwrap();
        let r = convergence_report(&doubled, &[50_000, 100_000, 200_000, 400_000], true, 0.1).unwrap();
        assert!(!r.oscillating);
        assert!(convergence_report(&ConstantBits(true), &[5, 3], true, 0.1).is_err());
        assert!(matches!(
            convergence_report(&BitString::zeros(3), &[5], true, 0.1),
            Err(Error::Range(_))
        ));
        assert!(r.to_csv().starts_with("n,count,frequency\n50000,"));
    }
}
