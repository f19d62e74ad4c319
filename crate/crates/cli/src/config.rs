use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::Args;
use serde::Deserialize;
use strfp::optimizer::TieBreak;
use strfp::workload::RowPolicy;
use strfp::Alphabet;

use crate::UsageError;

/// Options shared by every subcommand. Each may also be set in a `--config`
/// file of `key = value` lines using the same names; flags win.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Opts {
    /// Newline-delimited corpus, one column value per line
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Workload TSV (read by train/export-lp/import-solution/eval/bench)
    #[arg(long, global = true)]
    pub workload: Option<PathBuf>,
    /// Partition file (read by eval/bench)
    #[arg(long, global = true)]
    pub partition: Option<PathBuf>,
    /// Main output file; stdout when absent
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Solve trace CSV written by train
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    /// Solver solution file read by import-solution
    #[arg(long, global = true)]
    pub solution: Option<PathBuf>,
    /// Write the rendered fingerprint column here (eval)
    #[arg(long, global = true)]
    pub dump_column: Option<PathBuf>,

    /// `printable`, `all`, `chars:<bytes>`, or decimal ranges like `32-126`
    #[arg(long, global = true)]
    pub alphabet: Option<String>,
    /// Rows with bytes outside the alphabet: `drop-row` or `keep-total`
    #[arg(long, global = true)]
    pub policy: Option<String>,
    /// Fingerprint width in bits (number of bins)
    #[arg(long, short = 'n', global = true)]
    pub bits: Option<usize>,

    /// Gram lengths, e.g. `1-10` or `1,2,4`
    #[arg(long, global = true)]
    pub ks: Option<String>,
    /// Grams per frequency class and gram length
    #[arg(long, global = true)]
    pub per_class: Option<usize>,
    /// Number of queries marked seen
    #[arg(long, global = true)]
    pub seen: Option<usize>,
    /// Seed for choosing the seen queries
    #[arg(long, global = true)]
    pub split_seed: Option<u64>,

    /// Training rows are sampled from the first `block` corpus rows
    #[arg(long, global = true)]
    pub block: Option<usize>,
    /// Training sample size
    #[arg(long, global = true)]
    pub sample: Option<usize>,
    /// Seed for drawing the training sample
    #[arg(long, global = true)]
    pub sample_seed: Option<u64>,

    /// Local search seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Search time limit in seconds
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    /// Cap on candidate evaluations; makes the search reproducible
    #[arg(long, global = true)]
    pub iters: Option<u64>,
    /// `round-robin`, `random`, or a partition file to start from
    #[arg(long, global = true)]
    pub init: Option<String>,
    /// Secondary score among equal objectives: `sample-grams` or `none`
    #[arg(long, global = true)]
    pub tie_break: Option<String>,
    /// Enumerate all partitions instead of local search (small alphabets only)
    #[arg(long, global = true)]
    #[serde(default)]
    pub exact: bool,

    /// Timing repeats per query (bench)
    #[arg(long, global = true)]
    pub repeats: Option<usize>,

    /// TOML file of option values; command-line flags take precedence
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($flags:ident, $file:ident; $($f:ident),*) => {
        $( if $flags.$f.is_none() { $flags.$f = $file.$f.take(); } )*
    };
}

impl Opts {
    /// Fills unset flags from the `--config` file, if any.
    pub fn with_config_file(mut self) -> anyhow::Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut file: Opts = toml::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        merge_fields!(self, file; corpus, workload, partition, out, trace, solution, dump_column,
            alphabet, policy, bits, ks, per_class, seen, split_seed, block, sample, sample_seed,
            seed, time_limit, iters, init, tie_break, repeats);
        self.exact |= file.exact;
        Ok(self)
    }
}

/// Fully resolved settings with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub opts: Opts,
    pub alphabet: Alphabet,
    pub policy: RowPolicy,
    pub bits: usize,
    pub ks: Vec<usize>,
    pub per_class: usize,
    pub seen: usize,
    pub split_seed: u64,
    pub block: usize,
    pub sample: usize,
    pub sample_seed: u64,
    pub seed: u64,
    pub time_limit: Duration,
    pub iters: Option<u64>,
    pub tie_break: TieBreak,
    pub repeats: usize,
}

pub fn parse_ks(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut ks = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || UsageError(format!("bad gram length list {s:?}"));
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                ks.extend(lo..=hi);
            }
            None => ks.push(part.parse().map_err(|_| bad())?),
        }
    }
    if ks.is_empty() || ks.contains(&0) {
        bail!(UsageError(format!("gram lengths must be positive: {s:?}")));
    }
    Ok(ks)
}

impl RunConfig {
    pub fn resolve(opts: Opts) -> anyhow::Result<Self> {
        let opts = opts.with_config_file()?;
        let alphabet = opts
            .alphabet
            .as_deref()
            .unwrap_or("printable")
            .parse()
            .map_err(|e: strfp::Error| UsageError(e.to_string()))?;
        let policy = match opts.policy.as_deref().unwrap_or("drop-row") {
            "drop-row" => RowPolicy::DropRow,
            "keep-total" => RowPolicy::KeepTotal,
            other => bail!(UsageError(format!("unknown row policy {other:?}"))),
        };
        let time_limit = opts
            .time_limit
            .unwrap_or(strfp::optimizer::DEFAULT_TIME_LIMIT.as_secs_f64());
        if !(time_limit >= 0.0 && time_limit.is_finite()) {
            bail!(UsageError(format!("bad time limit {time_limit}")));
        }
        let tie_break = match opts.tie_break.as_deref().unwrap_or("sample-grams") {
            "sample-grams" => TieBreak::SampleGrams,
            "none" => TieBreak::None,
            other => bail!(UsageError(format!("unknown tie-break {other:?}"))),
        };
        Ok(Self {
            tie_break,
            alphabet,
            policy,
            bits: opts.bits.unwrap_or(16),
            ks: parse_ks(opts.ks.as_deref().unwrap_or("1-10"))?,
            per_class: opts.per_class.unwrap_or(10),
            seen: opts.seen.unwrap_or(20),
            split_seed: opts.split_seed.unwrap_or(0),
            block: opts.block.unwrap_or(1 << 16),
            sample: opts.sample.unwrap_or(50),
            sample_seed: opts.sample_seed.unwrap_or(0),
            seed: opts.seed.unwrap_or(0),
            time_limit: Duration::from_secs_f64(time_limit),
            iters: opts.iters,
            repeats: opts.repeats.unwrap_or(5),
            opts,
        })
    }

    pub fn require<'a>(&self, path: &'a Option<PathBuf>, flag: &str) -> anyhow::Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| UsageError(format!("--{flag} is required")).into())
    }

    pub fn ks_text(&self) -> String {
        self.ks
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_forms() {
        assert_eq!(parse_ks("1-3").unwrap(), [1, 2, 3]);
        assert_eq!(parse_ks("1,4, 6-7").unwrap(), [1, 4, 6, 7]);
        assert!(parse_ks("0-2").is_err());
        assert!(parse_ks("x").is_err());
        assert!(parse_ks("").is_err());
    }

    #[test]
    fn config_file_fills_gaps_and_flags_win() {
        let dir = std::env::temp_dir().join(format!("strfp-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "bits = 8\nseed = 5\nks = \"1-2\"\nexact = true\n").unwrap();
        let opts = Opts {
            bits: Some(4),
            config: Some(path),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(opts).unwrap();
        assert_eq!(cfg.bits, 4);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.ks, [1, 2]);
        assert!(cfg.opts.exact);
        assert_eq!(cfg.per_class, 10);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = std::env::temp_dir().join(format!("strfp-cfg-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "colour = 1\n").unwrap();
        let err = RunConfig::resolve(Opts {
            config: Some(path),
            ..Default::default()
        })
        .unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
    }
}
