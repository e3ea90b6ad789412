use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

/// Comma-separated counts on the command line, a string or an array in
/// config files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountList(pub Vec<u64>);

impl FromStr for CountList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| t.trim().replace('_', "").parse::<u64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(CountList)
    }
}

impl<'de> Deserialize<'de> for CountList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Counts(Vec<u64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Counts(v) => Ok(CountList(v)),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Subcommand this config file is meant for (config files only).
    #[arg(skip)]
    pub command: Option<String>,

    /// Input bit file (`.bin` packed, otherwise ASCII 0/1).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Output file.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Martingale spec: a JSON file path or inline JSON.
    #[arg(long)]
    pub martingale: Option<String>,

    /// Number of bits to encode, decode or reconstruct.
    #[arg(long)]
    pub n: Option<usize>,

    /// Seed for the `seeded` source.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Ascending checkpoint candidates, e.g. `2,9,121,17424`.
    #[arg(long)]
    pub schedule: Option<CountList>,

    /// literal, runlength, lz or best.
    #[arg(long)]
    pub describer: Option<String>,

    /// Sample machine name or transducer JSON file.
    #[arg(long)]
    pub transducer: Option<String>,

    /// seeded, zeros, ones, champernowne, example51 or file:PATH.
    #[arg(long)]
    pub source: Option<String>,

    /// Input symbols for `fs`, search depth for `validate`.
    #[arg(long)]
    pub steps: Option<usize>,

    /// Ascending prefix lengths for convergence reports.
    #[arg(long)]
    pub checkpoints: Option<CountList>,

    /// Frequency tolerance for `fs`; oscillation gap with `--checkpoints`.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Trace or report CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

impl Settings {
    /// Command-line values win over config-file values.
    pub fn over(self, file: Settings) -> Settings {
        Settings {
            command: file.command,
            input: self.input.or(file.input),
            output: self.output.or(file.output),
            martingale: self.martingale.or(file.martingale),
            n: self.n.or(file.n),
            seed: self.seed.or(file.seed),
            schedule: self.schedule.or(file.schedule),
            describer: self.describer.or(file.describer),
            transducer: self.transducer.or(file.transducer),
            source: self.source.or(file.source),
            steps: self.steps.or(file.steps),
            checkpoints: self.checkpoints.or(file.checkpoints),
            tolerance: self.tolerance.or(file.tolerance),
            trace: self.trace.or(file.trace),
        }
    }

    pub fn load(path: &Path, command: &str) -> Result<Settings> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let file: Settings =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(c) = &file.command {
            if c != command {
                bail!("config {} is for `{c}`, not `{command}`", path.display());
            }
        }
        Ok(file)
    }

    /// `--tolerance`, else `KGC_DEFAULT_TOLERANCE`, else `default`.
    pub fn tolerance_or(&self, default: f64) -> Result<f64> {
        let tol = match self.tolerance {
            Some(t) => t,
            None => match std::env::var("KGC_DEFAULT_TOLERANCE") {
                Ok(v) => v
                    .trim()
                    .parse()
                    .with_context(|| format!("KGC_DEFAULT_TOLERANCE={v:?} is not a number"))?,
                Err(_) => default,
            },
        };
        if !(tol.is_finite() && tol >= 0.0) {
            bail!("tolerance must be a nonnegative number, got {tol}");
        }
        Ok(tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_lists() {
        assert_eq!("4, 25,1_000".parse::<CountList>().unwrap(), CountList(vec![4, 25, 1000]));
        assert!("4,x".parse::<CountList>().is_err());
        let s: Settings = serde_json::from_str(r#"{"schedule":[2,9],"checkpoints":"5,6"}"#).unwrap();
        assert_eq!(s.schedule, Some(CountList(vec![2, 9])));
        assert_eq!(s.checkpoints, Some(CountList(vec![5, 6])));
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"seeds":3}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings {
            n: Some(5),
            seed: Some(1),
            ..Default::default()
        };
        let flags = Settings {
            n: Some(9),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!((merged.n, merged.seed), (Some(9), Some(1)));
    }
}
