use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use kgc_core::finite_state::{
    convergence_report, empirical_symbol_freq, estimate_pi, frequency_report, sample_machine, Champernowne,
    NoLimitFrequency, Transducer,
};
use kgc_core::hybrid::{build_oracle, checkpoint_schedule, decode_oracle, describer_by_name, kg_pipeline, SourceReader};
use kgc_core::kg::{decode, delta_product, encode, StageParams};
use kgc_core::martingale::{validate_martingale, MartingaleRef, MartingaleSpec};
use kgc_core::numeric::{BitSource, BitString, ConstantBits, SeededBits};
use kgc_core::Error;

use crate::settings::Settings;

/// Additive slack in the decoder's oracle-use bound; the largest excess
/// over `n + √(2n)·log2(2n)` is 1.75, at `n = 7`.
pub const USE_BOUND_SLACK: f64 = 2.0;

const DEFAULT_SCHEDULE: [u64; 4] = [2, 9, 121, 17424];

pub fn use_bound(n: usize) -> f64 {
    let n = n as f64;
    n + (2.0 * n).sqrt() * (2.0 * n).log2() + USE_BOUND_SLACK
}

fn redundancy_bound(n: u64) -> f64 {
    let n = n as f64;
    n + (2.0 * n).sqrt() * (2.0 * n).log2()
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| anyhow!("{flag} is required"))
}

fn martingale(s: &Settings) -> Result<MartingaleRef> {
    let raw = require(&s.martingale, "--martingale")?;
    let spec = if raw.trim_start().starts_with('{') {
        MartingaleSpec::from_json(raw)?
    } else {
        MartingaleSpec::load(raw).with_context(|| format!("loading martingale spec {raw}"))?
    };
    Ok(spec.build()?)
}

fn source(s: &Settings, default: &str) -> Result<Box<dyn BitSource>> {
    let name = s.source.as_deref().unwrap_or(default);
    Ok(match name {
        "seeded" => Box::new(SeededBits::new(s.seed.unwrap_or(0))),
        "zeros" => Box::new(ConstantBits(false)),
        "ones" => Box::new(ConstantBits(true)),
        "champernowne" => Box::new(Champernowne),
        "example51" => Box::new(NoLimitFrequency),
        other => match other.strip_prefix("file:") {
            Some(path) => Box::new(BitString::read_file(path).with_context(|| format!("reading {path}"))?),
            None => bail!("unknown source {other:?}"),
        },
    })
}

fn schedule(s: &Settings) -> Result<Vec<u64>> {
    let candidates = s.schedule.as_ref().map_or(DEFAULT_SCHEDULE.to_vec(), |c| c.0.clone());
    Ok(checkpoint_schedule(&candidates)?)
}

fn transducer(s: &Settings) -> Result<Transducer> {
    let name = require(&s.transducer, "--transducer")?;
    if Path::new(name).is_file() {
        Ok(Transducer::load(name).with_context(|| format!("loading transducer {name}"))?)
    } else {
        Ok(sample_machine(name)?)
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

/// Payload checksum stored next to a codeword.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub n: usize,
    pub checksum: String,
}

impl Sidecar {
    pub fn of(payload: &BitString) -> Self {
        Self {
            n: payload.len(),
            checksum: format!("{:016x}", payload.checksum()),
        }
    }

    pub fn path_for(codeword: &Path) -> PathBuf {
        with_suffix(codeword, ".sum")
    }
}

pub fn encode_cmd(s: &Settings) -> Result<bool> {
    let d = martingale(s)?;
    let output = require(&s.output, "--output")?;
    let (x, n): (Box<dyn BitSource>, usize) = match &s.input {
        Some(path) => {
            let bits = BitString::read_file(path).with_context(|| format!("reading {}", path.display()))?;
            let n = s.n.unwrap_or(bits.len());
            (Box::new(bits), n)
        }
        None => (source(s, "seeded")?, *require(&s.n, "--n")?),
    };
    let encoded = encode(d.as_ref(), x.as_ref(), n)?;
    encoded.codeword.write_file(output)?;
    let sidecar = Sidecar::of(&x.prefix(n)?);
    write(&Sidecar::path_for(output), serde_json::to_string(&sidecar)? + "\n")?;
    if let Some(trace) = &s.trace {
        write(trace, encoded.trace.to_csv())?;
    }

    let mut capital_ok = true;
    let mut redundancy_ok = true;
    for stage in &encoded.trace.stages {
        capital_ok &= stage.capital < delta_product(stage.i);
        redundancy_ok &= (stage.output_total as f64) <= redundancy_bound(stage.input_total);
    }
    let last = encoded.trace.stages.last().expect("n ≥ 1 gives a stage");
    println!("stages: {}", encoded.trace.stages.len());
    println!("n_i: {}", last.input_total);
    println!("k_i: {}", last.output_total);
    println!("final capital: {}", last.capital.to_decimal(12));
    println!("capital below stage products: {}", verdict(capital_ok));
    println!("redundancy bound: {}", verdict(redundancy_ok));
    println!("codeword: {} ({} bits)", output.display(), encoded.codeword.len());
    Ok(capital_ok && redundancy_ok)
}

pub fn decode_cmd(s: &Settings) -> Result<bool> {
    let d = martingale(s)?;
    let input = require(&s.input, "--input")?;
    let codeword = BitString::read_file(input).with_context(|| format!("reading {}", input.display()))?;
    let sidecar_path = Sidecar::path_for(input);
    let sidecar: Option<Sidecar> = if sidecar_path.is_file() {
        Some(serde_json::from_str(&fs::read_to_string(&sidecar_path)?).context("parsing checksum sidecar")?)
    } else {
        None
    };
    let n = match (s.n, &sidecar) {
        (Some(n), _) => n,
        (None, Some(side)) => side.n,
        (None, None) => bail!("--n is required without a checksum sidecar"),
    };
    let decoded = decode(d.as_ref(), &codeword, n)?;
    if let Some(side) = &sidecar {
        if side.n == n && Sidecar::of(&decoded.bits) != *side {
            bail!("checksum mismatch: decoded payload differs from the encoded one");
        }
    }
    if let Some(out) = &s.output {
        decoded.bits.write_file(out)?;
    }
    let bound = use_bound(n);
    let ok = decoded.used as f64 <= bound;
    println!("n: {n}");
    println!("u_n: {}", decoded.used);
    println!("use bound: {bound:.3} {}", verdict(ok));
    if sidecar.is_some() {
        println!("checksum: ok");
    }
    Ok(ok)
}

pub fn hybrid_cmd(s: &Settings) -> Result<bool> {
    let x = source(s, "seeded")?;
    let schedule = schedule(s)?;
    let describer = describer_by_name(s.describer.as_deref().unwrap_or("best"))?;
    let (y, layout) = build_oracle(x.as_ref(), &schedule, describer.as_ref())?;
    let mut ok = true;
    let mut lengths = Vec::new();
    let mut prev = 0u64;
    for (i, (&m, block)) in schedule.iter().zip(&layout.blocks).enumerate() {
        let run = decode_oracle(&mut SourceReader::new(&y), m as usize)?;
        let round_trip = run.output == x.prefix(m as usize)?;
        let cost = layout.prefix_cost(i);
        let bound = layout.use_bound(i);
        let accounted = run.used <= cost && cost as f64 <= bound;
        let mut local = true;
        if block.covered > prev {
            let mid = decode_oracle(&mut SourceReader::new(&y), block.covered as usize)?;
            local = mid.used <= block.pi_start && mid.output == x.prefix(block.covered as usize)?;
            lengths.push(block.covered as usize);
        }
        lengths.push(m as usize);
        ok &= round_trip && accounted && local;
        println!(
            "checkpoint {m}: used {} <= {cost} <= {bound:.1} {}, |v| {}, |pi| {}, s_i {:.6}, round trip {}, chunk reads {}",
            run.used,
            verdict(accounted),
            block.v_len,
            block.pi_len,
            block.pi_len as f64 / m as f64,
            verdict(round_trip),
            verdict(local)
        );
        prev = m;
    }
    println!("s: {:.6}", layout.s_approx);
    println!("oracle bits: {}", y.len());
    if let Some(out) = &s.output {
        y.write_file(out)?;
        write(&with_suffix(out, ".layout.json"), layout.to_json() + "\n")?;
    }
    if let Some(trace) = &s.trace {
        write(trace, kgc_core::hybrid::use_report(&y, &lengths)?)?;
    }
    Ok(ok)
}

pub fn pipeline_cmd(s: &Settings) -> Result<bool> {
    let x = source(s, "seeded")?;
    let schedule = schedule(s)?;
    let describer = describer_by_name(s.describer.as_deref().unwrap_or("best"))?;
    let d = martingale(s)?;
    let n = s.n.unwrap_or(*schedule.last().expect("nonempty schedule") as usize);
    let run = kg_pipeline(x.as_ref(), &schedule, describer.as_ref(), d.as_ref(), n)?;
    let mut ok = true;
    for u in &run.uses {
        let within = u.codeword_used as f64 <= use_bound(u.oracle_used);
        let stage = StageParams::covering_stage(u.oracle_used as u64);
        let exact = u.codeword_used as u64 == StageParams::output_total(stage);
        ok &= within && exact;
        println!(
            "n {}: oracle use {}, codeword use {}, ratio {:.6} {}",
            u.n,
            u.oracle_used,
            u.codeword_used,
            u.ratio(),
            verdict(within && exact)
        );
    }
    println!("s: {:.6}", run.layout.s_approx);
    println!("codeword bits: {}", run.codeword.len());
    if let Some(out) = &s.output {
        run.codeword.write_file(out)?;
        write(&with_suffix(out, ".layout.json"), run.layout.to_json() + "\n")?;
    }
    if let Some(trace) = &s.trace {
        write(trace, run.report_csv())?;
    }
    Ok(ok)
}

pub fn fs_cmd(s: &Settings) -> Result<bool> {
    let src = source(s, "champernowne")?;
    if let Some(cps) = &s.checkpoints {
        let gap = s.tolerance_or(0.5)?;
        let points: Vec<usize> = cps.0.iter().map(|&c| c as usize).collect();
        let bits: Box<dyn BitSource> = match &s.transducer {
            Some(_) => {
                let t = transducer(s)?;
                let m = *require(&s.steps, "--steps")?;
                Box::new(t.run_bits(&src.prefix(m)?)?.output_bits()?)
            }
            None => src,
        };
        let report = convergence_report(bits.as_ref(), &points, true, gap)?;
        for (n, p) in &report.points {
            println!("P(1, X|{n}) = {}", p.to_decimal(6));
        }
        println!("tail range: [{:.6}, {:.6}]", report.tail_min, report.tail_max);
        println!("oscillating: {}", if report.oscillating { "yes" } else { "no" });
        if let Some(out) = s.output.as_ref().or(s.trace.as_ref()) {
            write(out, report.to_csv())?;
        }
        return Ok(true);
    }

    let t = transducer(s)?;
    let m = s.steps.unwrap_or(100_000);
    let tol = s.tolerance_or(0.02)?;
    match frequency_report(&t, src.as_ref(), m) {
        Ok(report) => {
            let gap = report.max_gap();
            let normalized = report.predicted.total() == kgc_core::ExactRational::one();
            let pi_gap = report.pi_estimate.pi.max_gap(&report.pi_analytic)?;
            println!("machine: {}", report.machine);
            println!("input symbols: {m}, output symbols: {}", report.output_len);
            println!("residual: {:.6}", report.pi_estimate.residual);
            for ((q, est), (_, exact)) in report.pi_estimate.pi.iter().zip(report.pi_analytic.iter()) {
                println!("pi({q}): empirical {} analytic {exact}", est.to_decimal(6));
            }
            println!("pi gap: {pi_gap:.6}");
            for ((a, e), (_, p)) in report.empirical.iter().zip(report.predicted.iter()) {
                println!("p({a}): empirical {} predicted {p}", e.to_decimal(6));
            }
            let ok = gap <= tol && normalized;
            println!("frequency gap: {gap:.6} (tolerance {tol}) {}", verdict(ok));
            if let Some(out) = &s.output {
                write(out, report.to_csv())?;
            }
            Ok(ok)
        }
        Err(Error::Ambiguous(why)) => {
            let est = estimate_pi(&t, src.as_ref(), m)?;
            println!("machine: {}", t.name());
            println!("analytic pi unavailable: {why}");
            println!("residual: {:.6}", est.residual);
            for (q, w) in est.pi.iter() {
                println!("pi({q}): empirical {}", w.to_decimal(6));
            }
            let emp = empirical_symbol_freq(&est.stats.output, t.output_alphabet())?;
            let mut csv = String::from("n,symbol,empirical,predicted\n");
            for (a, e) in emp.iter() {
                println!("p({a}): empirical {}", e.to_decimal(6));
                csv.push_str(&format!("{},{},{},\n", est.stats.output_len(), a, e.to_decimal(6)));
            }
            if let Some(out) = &s.output {
                write(out, csv)?;
            }
            Ok(true)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn validate_cmd(s: &Settings) -> Result<bool> {
    let d = martingale(s)?;
    let depth = s.steps.unwrap_or(10);
    let report = validate_martingale(d.as_ref(), depth);
    println!("{report}");
    if let Some(v) = &report.violation {
        println!("first violation at prefix length {}", v.length());
    }
    Ok(report.passed())
}
