//! False positive rates and scan timings for a partition over a full corpus.

use std::hint::black_box;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use memchr::memmem;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::partition::Partition;
use crate::workload::{Corpus, FreqClass, Query, Role, Workload};

/// Fingerprints of every corpus row, in corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintColumn {
    bits: Vec<u64>,
    partition: Partition,
}

impl FingerprintColumn {
    pub fn build(corpus: &Corpus, partition: &Partition) -> Self {
        let bits = corpus
            .words()
            .iter()
            .map(|w| partition.mask_of(w))
            .collect();
        Self {
            bits,
            partition: partition.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Fingerprint {
        self.partition.fingerprint_from_mask(self.bits[i])
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn masks(&self) -> &[u64] {
        &self.bits
    }

    /// Rows whose fingerprint admits `mask`.
    pub fn count_candidates(&self, mask: u64) -> usize {
        self.bits.iter().filter(|&&b| b & mask == mask).count()
    }

    /// One rendered bitstring per row.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.len() {
            writeln!(out, "{}", self.get(i))?;
        }
        Ok(())
    }
}

pub fn build_column(corpus: &Corpus, partition: &Partition) -> FingerprintColumn {
    FingerprintColumn::build(corpus, partition)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub candidates: usize,
    pub matches: Vec<u32>,
}

/// Mask test on every row, exact containment only on rows that pass.
pub fn filtered_scan(
    column: &FingerprintColumn,
    corpus: &Corpus,
    pattern: &[u8],
) -> Result<ScanResult> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    assert_eq!(
        column.len(),
        corpus.len(),
        "column does not belong to this corpus"
    );
    let mask = column.partition.mask_of(pattern);
    let finder = memmem::Finder::new(pattern);
    let mut candidates = 0;
    let mut matches = Vec::new();
    for (i, (&bits, word)) in column.bits.iter().zip(corpus.words()).enumerate() {
        if bits & mask == mask {
            candidates += 1;
            if finder.find(word).is_some() {
                matches.push(i as u32);
            }
        }
    }
    Ok(ScanResult {
        candidates,
        matches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRow {
    pub pattern: Vec<u8>,
    pub role: Role,
    pub k: usize,
    pub class: FreqClass,
    pub true_matches: usize,
    pub candidates: usize,
    pub false_positives: usize,
    /// `false_positives / (corpus_size - true_matches)`, 0 when undefined.
    pub fpr: f64,
}

/// Pair-weighted totals for one role.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoleAggregate {
    pub queries: usize,
    pub false_positives: u64,
    pub negatives: u64,
}

impl RoleAggregate {
    pub fn fpr(&self) -> f64 {
        if self.negatives == 0 {
            0.0
        } else {
            self.false_positives as f64 / self.negatives as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub corpus_size: usize,
    pub rows: Vec<QueryRow>,
}

impl EvalReport {
    pub fn aggregate(&self, role: Role) -> RoleAggregate {
        let mut agg = RoleAggregate::default();
        for r in self.rows.iter().filter(|r| r.role == role) {
            agg.queries += 1;
            agg.false_positives += r.false_positives as u64;
            agg.negatives += (self.corpus_size - r.true_matches) as u64;
        }
        agg
    }

    /// CSV `pattern,role,k,freq_class,true_matches,candidates,false_positives,fpr`
    /// preceded by `#` comment lines from `header`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[(String, String)]) -> Result<()> {
        write_comments(&mut out, header)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "pattern",
            "role",
            "k",
            "freq_class",
            "true_matches",
            "candidates",
            "false_positives",
            "fpr",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.pattern.clone(),
                r.role.as_str().into(),
                r.k.to_string().into_bytes(),
                r.class.as_str().into(),
                r.true_matches.to_string().into_bytes(),
                r.candidates.to_string().into_bytes(),
                r.false_positives.to_string().into_bytes(),
                format!("{:.6}", r.fpr).into_bytes(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn write_comments<W: Write>(out: &mut W, header: &[(String, String)]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(io::Error::new(io::ErrorKind::Other, e))
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn query_row(column: &FingerprintColumn, corpus: &Corpus, q: &Query) -> QueryRow {
    let mask = column.partition.mask_of(&q.pattern);
    let finder = memmem::Finder::new(&q.pattern);
    let mut candidates = 0;
    let mut true_matches = 0;
    for (&bits, word) in column.bits.iter().zip(corpus.words()) {
        if bits & mask == mask {
            candidates += 1;
            true_matches += finder.find(word).is_some() as usize;
        }
    }
    let false_positives = candidates - true_matches;
    QueryRow {
        pattern: q.pattern.clone(),
        role: q.role,
        k: q.k,
        class: q.class,
        true_matches,
        candidates,
        false_positives,
        fpr: ratio(false_positives, corpus.len() - true_matches),
    }
}

/// Per-query and per-role false positive rates of `partition` on `corpus`.
pub fn evaluate(corpus: &Corpus, partition: &Partition, workload: &Workload) -> EvalReport {
    let column = FingerprintColumn::build(corpus, partition);
    let rows = workload
        .queries
        .par_iter()
        .map(|q| query_row(&column, corpus, q))
        .collect();
    EvalReport {
        corpus_size: corpus.len(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub query: QueryRow,
    pub t_full: Duration,
    pub t_filtered: Duration,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.t_full.as_secs_f64() / self.t_filtered.as_secs_f64().max(1e-12)
    }

    pub fn candidate_fraction(&self, corpus_size: usize) -> f64 {
        ratio(self.query.candidates, corpus_size)
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

fn full_scan(words: &[Vec<u8>], finder: &memmem::Finder<'_>) -> usize {
    words.iter().filter(|w| finder.find(w).is_some()).count()
}

fn masked_scan(masks: &[u64], words: &[Vec<u8>], mask: u64, finder: &memmem::Finder<'_>) -> usize {
    masks
        .iter()
        .zip(words)
        .filter(|&(&bits, w)| bits & mask == mask && finder.find(w).is_some())
        .count()
}

/// Median wall time per query of a plain scan against a fingerprint-masked
/// scan, both counting exact matches. Runs sequentially on the calling
/// thread, alternating the two scans within each repeat. The fingerprint
/// column is built once up front and not timed.
pub fn bench_scan(
    corpus: &Corpus,
    partition: &Partition,
    workload: &Workload,
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let column = FingerprintColumn::build(corpus, partition);
    let words = corpus.words();
    let mut rows = Vec::with_capacity(workload.len());
    for q in &workload.queries {
        let query = query_row(&column, corpus, q);
        let finder = memmem::Finder::new(&q.pattern);
        let mask = partition.mask_of(&q.pattern);
        let mut full = Vec::with_capacity(repeats);
        let mut filtered = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let t = Instant::now();
            let a = black_box(full_scan(black_box(words), &finder));
            full.push(t.elapsed());
            let t = Instant::now();
            let b = black_box(masked_scan(
                black_box(column.masks()),
                words,
                black_box(mask),
                &finder,
            ));
            filtered.push(t.elapsed());
            debug_assert_eq!(a, b);
        }
        rows.push(BenchRow {
            query,
            t_full: median(full),
            t_filtered: median(filtered),
        });
    }
    Ok(rows)
}

/// Report CSV columns followed by `t_full_ms,t_filtered_ms,speedup`.
pub fn write_bench_csv<W: Write>(
    rows: &[BenchRow],
    mut out: W,
    header: &[(String, String)],
) -> Result<()> {
    write_comments(&mut out, header)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "pattern",
        "role",
        "k",
        "freq_class",
        "true_matches",
        "candidates",
        "false_positives",
        "fpr",
        "t_full_ms",
        "t_filtered_ms",
        "speedup",
    ])
    .map_err(csv_err)?;
    for row in rows {
        let r = &row.query;
        w.write_record([
            r.pattern.clone(),
            r.role.as_str().into(),
            r.k.to_string().into_bytes(),
            r.class.as_str().into(),
            r.true_matches.to_string().into_bytes(),
            r.candidates.to_string().into_bytes(),
            r.false_positives.to_string().into_bytes(),
            format!("{:.6}", r.fpr).into_bytes(),
            format!("{:.4}", row.t_full.as_secs_f64() * 1e3).into_bytes(),
            format!("{:.4}", row.t_filtered.as_secs_f64() * 1e3).into_bytes(),
            format!("{:.3}", row.speedup()).into_bytes(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
