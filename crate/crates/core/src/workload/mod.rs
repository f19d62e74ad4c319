//! Corpus ingestion, k-gram statistics, and query workload generation.
//!
//! A workload is built per gram length `k` from the corpus itself: the
//! highest-, mid-, and lowest-frequency grams, where frequency is the number
//! of words containing the gram. A seeded split then marks a subset of the
//! queries as seen (used for training); the rest stay unseen.

mod corpus;
mod oracle;

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use corpus::{Corpus, RowPolicy};
#[cfg(test)]
pub(crate) use oracle::matching_indices;
pub use oracle::MatchOracle;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FreqClass {
    High,
    Mid,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Seen,
    Unseen,
}

macro_rules! text_enum {
    ($ty:ty { $($variant:ident => $s:literal),* $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $s),* }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok(Self::$variant),)*
                    other => Err(format!("unknown {} {other:?}", stringify!($ty))),
                }
            }
        }
    };
}

text_enum!(FreqClass { High => "high", Mid => "mid", Low => "low" });
text_enum!(Role { Seen => "seen", Unseen => "unseen" });

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub pattern: Vec<u8>,
    pub k: usize,
    pub class: FreqClass,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Workload {
    pub queries: Vec<Query>,
    /// Seed of the seen/unseen split, if one was applied.
    pub seed: Option<u64>,
}

/// Document frequency of every `k`-gram: the number of words containing it
/// at least once. Words shorter than `k` contribute nothing.
pub fn kgram_frequencies(corpus: &Corpus, k: usize) -> HashMap<Vec<u8>, usize> {
    assert!(k >= 1, "gram length must be at least 1");
    let mut freq: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut grams: Vec<&[u8]> = Vec::new();
    for w in corpus.words() {
        grams.clear();
        grams.extend(w.windows(k));
        grams.sort_unstable();
        grams.dedup();
        for g in &grams {
            match freq.get_mut(*g) {
                Some(n) => *n += 1,
                None => {
                    freq.insert(g.to_vec(), 1);
                }
            }
        }
    }
    freq
}

/// `(frequency desc, bytes asc)` order used for class selection.
pub fn ranked_grams(corpus: &Corpus, k: usize) -> Vec<(Vec<u8>, usize)> {
    let mut ranked: Vec<_> = kgram_frequencies(corpus, k).into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

impl Workload {
    /// Per `k`: the top `per_class` grams as high, `per_class` grams centred on
    /// rank `count / 2` as mid, and the bottom `per_class` as low. A gram
    /// claimed by a higher class is not repeated in a lower one. All queries
    /// start out unseen.
    pub fn generate(corpus: &Corpus, ks: &[usize], per_class: usize) -> Result<Self> {
        if per_class == 0 {
            return Err(Error::InvalidArgument(
                "per_class must be at least 1".into(),
            ));
        }
        if ks.contains(&0) {
            return Err(Error::InvalidArgument(
                "gram lengths must be at least 1".into(),
            ));
        }
        let mut queries = Vec::new();
        for &k in ks {
            let ranked = ranked_grams(corpus, k);
            let count = ranked.len();
            let high = 0..per_class.min(count);
            let mid_start = (count / 2)
                .saturating_sub(per_class / 2)
                .min(count.saturating_sub(per_class));
            let mid = mid_start..(mid_start + per_class).min(count);
            let low = count.saturating_sub(per_class)..count;

            let mut taken = vec![false; count];
            for (class, range) in [
                (FreqClass::High, high),
                (FreqClass::Mid, mid),
                (FreqClass::Low, low),
            ] {
                for rank in range {
                    if std::mem::replace(&mut taken[rank], true) {
                        continue;
                    }
                    queries.push(Query {
                        pattern: ranked[rank].0.clone(),
                        k,
                        class,
                        role: Role::Unseen,
                    });
                }
            }
        }
        Ok(Self {
            queries,
            seed: None,
        })
    }

    /// Marks a uniformly random subset of `n_seen` queries as seen, the rest
    /// unseen. Deterministic in `seed`.
    pub fn split(mut self, n_seen: usize, seed: u64) -> Result<Self> {
        let total = self.queries.len();
        if n_seen > total {
            return Err(Error::SplitOutOfRange { n_seen, total });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in &mut self.queries {
            q.role = Role::Unseen;
        }
        for i in index::sample(&mut rng, total, n_seen) {
            self.queries[i].role = Role::Seen;
        }
        self.seed = Some(seed);
        Ok(self)
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &Query> {
        self.queries.iter().filter(move |q| q.role == role)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Writes the TSV form: `pattern<TAB>k<TAB>freq_class<TAB>role`, one query
    /// per line, preceded by `#` comment lines built from `header`. The split
    /// seed is added as `# split_seed=<n>` unless `header` already has it.
    pub fn write_tsv<W: Write>(&self, mut out: W, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(out, "# {k}={v}")?;
        }
        if let Some(seed) = self.seed {
            if !header.iter().any(|(k, _)| k == "split_seed") {
                writeln!(out, "# split_seed={seed}")?;
            }
        }
        for q in &self.queries {
            out.write_all(&escape_pattern(&q.pattern))?;
            writeln!(out, "\t{}\t{}\t{}", q.k, q.class, q.role)?;
        }
        Ok(())
    }

    /// Parses the TSV form. `#` lines and blank lines are skipped; a
    /// `# split_seed=<n>` comment restores [`Workload::seed`].
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut queries = Vec::new();
        let mut seed = None;
        for (i, line) in input.split(b'\n').enumerate() {
            let ln = i + 1;
            let mut line = line?;
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            let err = |reason: String| Error::WorkloadFormat { line: ln, reason };
            if line.is_empty() {
                continue;
            }
            if line[0] == b'#' {
                let text = String::from_utf8_lossy(&line[1..]);
                if let Some(s) = text.trim().strip_prefix("split_seed=") {
                    seed = s.parse().ok();
                }
                continue;
            }
            let fields: Vec<&[u8]> = line.split(|&b| b == b'\t').collect();
            let [pattern, k, class, role] = fields[..] else {
                return Err(err(format!(
                    "expected 4 tab-separated fields, got {}",
                    fields.len()
                )));
            };
            let pattern = unescape_pattern(pattern).map_err(err)?;
            if pattern.is_empty() {
                return Err(err("empty pattern".into()));
            }
            let text = |f: &[u8]| String::from_utf8_lossy(f).into_owned();
            let k = text(k)
                .parse()
                .map_err(|_| err(format!("bad k {:?}", text(k))))?;
            let class = text(class).parse().map_err(err)?;
            let role = text(role).parse().map_err(err)?;
            queries.push(Query {
                pattern,
                k,
                class,
                role,
            });
        }
        Ok(Self { queries, seed })
    }
}

/// Tab, newline, carriage return, and backslash become `\t`, `\n`, `\r`,
/// `\\`; a leading `#` becomes `\#` so it cannot read as a comment.
pub fn escape_pattern(p: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(p.len());
    for (i, &b) in p.iter().enumerate() {
        match b {
            b'\t' => out.extend_from_slice(b"\\t"),
            b'\n' => out.extend_from_slice(b"\\n"),
            b'\r' => out.extend_from_slice(b"\\r"),
            b'\\' => out.extend_from_slice(b"\\\\"),
            b'#' if i == 0 => out.extend_from_slice(b"\\#"),
            _ => out.push(b),
        }
    }
    out
}

pub fn unescape_pattern(p: &[u8]) -> Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(p.len());
    let mut it = p.iter();
    while let Some(&b) = it.next() {
        if b != b'\\' {
            out.push(b);
            continue;
        }
        match it.next() {
            Some(b't') => out.push(b'\t'),
            Some(b'n') => out.push(b'\n'),
            Some(b'r') => out.push(b'\r'),
            Some(b'\\') => out.push(b'\\'),
            Some(b'#') => out.push(b'#'),
            Some(&c) => return Err(format!("unknown escape \\{}", c as char)),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}
