use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::BitString;

/// One `(state, in_symbol) → (next_state, out_word)` entry of a machine file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub state: String,
    pub in_symbol: String,
    pub next_state: String,
    pub out_word: String,
}

/// On-disk form of a transducer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerSpec {
    pub name: String,
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub start: String,
    pub transitions: Vec<TransitionSpec>,
}

/// Deterministic finite transducer with total transition and output maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    name: String,
    states: Vec<String>,
    input: Vec<char>,
    output: Vec<char>,
    start: usize,
    /// Indexed `[state][input symbol]`.
    next: Vec<Vec<usize>>,
    out: Vec<Vec<String>>,
}

fn single_char(s: &str, what: &str) -> Result<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Input(format!("{what} {s:?} is not a single symbol"))),
    }
}

fn index_of<T: PartialEq + std::fmt::Debug>(items: &[T], item: &T, what: &str) -> Result<usize> {
    items
        .iter()
        .position(|x| x == item)
        .ok_or_else(|| Error::Input(format!("unknown {what} {item:?}")))
}

impl Transducer {
    pub fn from_spec(spec: &TransducerSpec) -> Result<Self> {
        let input = spec
            .input_alphabet
            .iter()
            .map(|s| single_char(s, "input symbol"))
            .collect::<Result<Vec<_>>>()?;
        let output = spec
            .output_alphabet
            .iter()
            .map(|s| single_char(s, "output symbol"))
            .collect::<Result<Vec<_>>>()?;
        if spec.states.is_empty() || input.is_empty() {
            return Err(Error::Input("a transducer needs states and input symbols".into()));
        }
        for (what, len, dedup) in [
            ("state", spec.states.len(), spec.states.iter().collect::<std::collections::HashSet<_>>().len()),
            ("input symbol", input.len(), input.iter().collect::<std::collections::HashSet<_>>().len()),
            ("output symbol", output.len(), output.iter().collect::<std::collections::HashSet<_>>().len()),
        ] {
            if len != dedup {
                return Err(Error::Input(format!("duplicate {what}")));
            }
        }
        let start = index_of(&spec.states, &spec.start, "start state")?;
        let (q, s) = (spec.states.len(), input.len());
        let mut next: Vec<Vec<Option<usize>>> = vec![vec![None; s]; q];
        let mut out: Vec<Vec<String>> = vec![vec![String::new(); s]; q];
        for t in &spec.transitions {
            let from = index_of(&spec.states, &t.state, "state")?;
            let sym = index_of(&input, &single_char(&t.in_symbol, "input symbol")?, "input symbol")?;
            let to = index_of(&spec.states, &t.next_state, "state")?;
            if let Some(c) = t.out_word.chars().find(|c| !output.contains(c)) {
                return Err(Error::Input(format!("output word {:?} uses symbol {c:?} outside Γ", t.out_word)));
            }
            if next[from][sym].replace(to).is_some() {
                return Err(Error::Input(format!("duplicate transition for ({}, {})", t.state, t.in_symbol)));
            }
            out[from][sym] = t.out_word.clone();
        }
        let next = next
            .into_iter()
            .enumerate()
            .map(|(qi, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(si, to)| {
                        to.ok_or_else(|| {
                            Error::Input(format!("missing transition for ({}, {})", spec.states[qi], input[si]))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: spec.name.clone(),
            states: spec.states.clone(),
            input,
            output,
            start,
            next,
            out,
        })
    }

    pub fn to_spec(&self) -> TransducerSpec {
        let mut transitions = Vec::new();
        for (q, name) in self.states.iter().enumerate() {
            for (u, sym) in self.input.iter().enumerate() {
                transitions.push(TransitionSpec {
                    state: name.clone(),
                    in_symbol: sym.to_string(),
                    next_state: self.states[self.next[q][u]].clone(),
                    out_word: self.out[q][u].clone(),
                });
            }
        }
        TransducerSpec {
            name: self.name.clone(),
            states: self.states.clone(),
            input_alphabet: self.input.iter().map(char::to_string).collect(),
            output_alphabet: self.output.iter().map(char::to_string).collect(),
            start: self.states[self.start].clone(),
            transitions,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TransducerSpec = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("transducer serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn input_alphabet(&self) -> &[char] {
        &self.input
    }

    pub fn output_alphabet(&self) -> &[char] {
        &self.output
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn next_state(&self, q: usize, u: usize) -> usize {
        self.next[q][u]
    }

    pub fn output_word(&self, q: usize, u: usize) -> &str {
        &self.out[q][u]
    }

    /// Longest single-step output.
    pub fn max_output_len(&self) -> usize {
        self.out.iter().flatten().map(|w| w.chars().count()).max().unwrap_or(0)
    }

    fn symbol_index(&self) -> HashMap<char, usize> {
        self.input.iter().enumerate().map(|(i, &c)| (c, i)).collect()
    }

    pub fn run<I: IntoIterator<Item = char>>(&self, input: I) -> Result<RunStats> {
        let index = self.symbol_index();
        let mut counts = vec![vec![0u64; self.input.len()]; self.states.len()];
        let mut q = self.start;
        let mut output = String::new();
        let mut m = 0u64;
        for c in input {
            let u = *index
                .get(&c)
                .ok_or_else(|| Error::Input(format!("symbol {c:?} outside the input alphabet")))?;
            counts[q][u] += 1;
            output.push_str(&self.out[q][u]);
            q = self.next[q][u];
            m += 1;
        }
        Ok(RunStats {
            m,
            end_state: q,
            output,
            counts,
        })
    }

    pub fn run_bits(&self, w: &BitString) -> Result<RunStats> {
        self.run(w.iter().map(|b| if b { '1' } else { '0' }))
    }
}

/// Result of one run: `counts[q][u]` is how often symbol `u` was read in
/// state `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStats {
    pub m: u64,
    pub end_state: usize,
    pub output: String,
    pub counts: Vec<Vec<u64>>,
}

impl RunStats {
    pub fn output_len(&self) -> usize {
        self.output.chars().count()
    }

    /// The output as bits when it only uses `0` and `1`.
    pub fn output_bits(&self) -> Result<BitString> {
        BitString::from_ascii(&self.output)
    }
}

fn machine(name: &str, states: &[&str], output: &[&str], rows: &[(&str, &str, &str, &str)]) -> Transducer {
    let spec = TransducerSpec {
        name: name.into(),
        states: states.iter().map(|s| s.to_string()).collect(),
        input_alphabet: vec!["0".into(), "1".into()],
        output_alphabet: output.iter().map(|s| s.to_string()).collect(),
        start: states[0].into(),
        transitions: rows
            .iter()
            .map(|&(state, in_symbol, next_state, out_word)| TransitionSpec {
                state: state.into(),
                in_symbol: in_symbol.into(),
                next_state: next_state.into(),
                out_word: out_word.into(),
            })
            .collect(),
    };
    Transducer::from_spec(&spec).expect("sample machine is total")
}

pub fn identity() -> Transducer {
    machine("identity", &["q"], &["0", "1"], &[("q", "0", "q", "0"), ("q", "1", "q", "1")])
}

pub fn doubling() -> Transducer {
    machine("doubling", &["q"], &["0", "1"], &[("q", "0", "q", "00"), ("q", "1", "q", "11")])
}

pub fn eraser() -> Transducer {
    machine("eraser", &["q"], &["0", "1"], &[("q", "0", "q", ""), ("q", "1", "q", "")])
}

/// Emits the running parity of the ones read so far.
pub fn parity() -> Transducer {
    machine(
        "parity",
        &["even", "odd"],
        &["0", "1"],
        &[
            ("even", "0", "even", "0"),
            ("even", "1", "odd", "1"),
            ("odd", "0", "odd", "1"),
            ("odd", "1", "even", "0"),
        ],
    )
}

/// Alternates states on every symbol; copies in one state, complements in the other.
pub fn flip() -> Transducer {
    machine(
        "flip",
        &["a", "b"],
        &["0", "1"],
        &[("a", "0", "b", "0"), ("a", "1", "b", "1"), ("b", "0", "a", "1"), ("b", "1", "a", "0")],
    )
}

/// `0 ↦ a`, `1 ↦ ab`.
pub fn a_ab() -> Transducer {
    machine("a_ab", &["q"], &["a", "b"], &[("q", "0", "q", "a"), ("q", "1", "q", "ab")])
}

/// Every shipped machine, in a fixed order.
pub fn sample_machines() -> Vec<Transducer> {
    vec![identity(), doubling(), parity(), flip(), a_ab(), eraser()]
}

pub fn sample_machine(name: &str) -> Result<Transducer> {
    sample_machines()
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::Input(format!("no sample machine named {name:?}")))
}
