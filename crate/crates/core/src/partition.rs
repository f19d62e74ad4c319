//! Letter-to-bin partitions and their text file format.
//!
//! A partition is total over all 256 byte values. Bytes outside the alphabet
//! fall back to bin `byte mod width`, so fingerprints never produce false
//! negatives even on rows the optimizer never saw.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::fingerprint::{check_width, Fingerprint};

/// How a partition came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProvenanceKind {
    RoundRobin,
    LocalSearch,
    Exact,
    Imported,
}

impl ProvenanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RoundRobin => "round_robin",
            Self::LocalSearch => "local_search",
            Self::Exact => "exact",
            Self::Imported => "imported",
        }
    }
}

impl fmt::Display for ProvenanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProvenanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "round_robin" => Self::RoundRobin,
            "local_search" => Self::LocalSearch,
            "exact" => Self::Exact,
            "imported" => Self::Imported,
            other => return Err(format!("unknown provenance {other:?}")),
        })
    }
}

/// Provenance tag plus free-form `key=value` metadata (seeds, limits, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    pub meta: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(kind: ProvenanceKind) -> Self {
        Self {
            kind,
            meta: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Partition {
    width: u8,
    bins: [u8; 256],
    alphabet: Alphabet,
    provenance: Provenance,
}

impl Partition {
    /// Builds a partition from an explicit bin for each alphabet member.
    /// Non-members get the `byte mod width` fallback.
    pub fn from_fn<F>(
        alphabet: Alphabet,
        width: usize,
        provenance: Provenance,
        mut bin_of: F,
    ) -> Result<Self>
    where
        F: FnMut(u8) -> usize,
    {
        let w = check_width(width)?;
        let mut bins = [0u8; 256];
        for b in 0..=255u8 {
            let bin = if alphabet.contains(b) {
                bin_of(b)
            } else {
                b as usize % width
            };
            if bin >= width {
                return Err(Error::PartitionFormat {
                    line: 0,
                    reason: format!("bin {bin} for byte {b} exceeds width {width}"),
                });
            }
            bins[b as usize] = bin as u8;
        }
        Ok(Self {
            width: w,
            bins,
            alphabet,
            provenance,
        })
    }

    /// The i-th alphabet member (ascending) goes to bin `i mod width`.
    pub fn round_robin(alphabet: &Alphabet, width: usize) -> Result<Self> {
        let prov = Provenance::new(ProvenanceKind::RoundRobin);
        Self::from_fn(alphabet.clone(), width, prov, |b| {
            alphabet.index_of(b).unwrap() % width
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn bin_of(&self, byte: u8) -> usize {
        self.bins[byte as usize] as usize
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub(crate) fn set_bin(&mut self, byte: u8, bin: usize) {
        debug_assert!(bin < self.width());
        self.bins[byte as usize] = bin as u8;
    }

    #[inline]
    pub(crate) fn mask_of(&self, s: &[u8]) -> u64 {
        s.iter()
            .fold(0u64, |acc, &b| acc | 1u64 << self.bins[b as usize])
    }

    pub(crate) fn fingerprint_from_mask(&self, bits: u64) -> Fingerprint {
        Fingerprint::from_parts(bits, self.width)
    }

    pub fn fingerprint(&self, s: &[u8]) -> Fingerprint {
        Fingerprint::from_parts(self.mask_of(s), self.width)
    }

    /// Same bin for every byte (provenance and alphabet ignored).
    pub fn same_bins(&self, other: &Partition) -> bool {
        self.width == other.width && self.bins == other.bins
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "width {}", self.width)?;
        write!(out, "provenance {}", self.provenance.kind)?;
        write!(out, " alphabet={}", self.alphabet)?;
        for (k, v) in &self.provenance.meta {
            if k != "alphabet" {
                write!(out, " {k}={v}")?;
            }
        }
        writeln!(out)?;
        for b in 0..=255usize {
            writeln!(out, "map {b} {}", self.bins[b])?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the format produced by [`Partition::write_to`]. Missing
    /// `alphabet=` metadata means all 256 bytes.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let err = |line: usize, reason: String| Error::PartitionFormat { line, reason };
        let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (ln, first) = lines
            .next()
            .ok_or_else(|| err(1, "missing width line".into()))?;
        let first = first?;
        let width: usize = first
            .strip_prefix("width ")
            .and_then(|w| w.trim().parse().ok())
            .ok_or_else(|| err(ln, format!("expected `width <n>`, got {first:?}")))?;
        let w = check_width(width).map_err(|e| err(ln, e.to_string()))?;

        let (ln, second) = lines
            .next()
            .ok_or_else(|| err(2, "missing provenance line".into()))?;
        let second = second?;
        let mut tokens = second.split_whitespace();
        if tokens.next() != Some("provenance") {
            return Err(err(
                ln,
                format!("expected `provenance <tag>`, got {second:?}"),
            ));
        }
        let kind: ProvenanceKind = tokens
            .next()
            .ok_or_else(|| err(ln, "missing provenance tag".into()))?
            .parse()
            .map_err(|e| err(ln, e))?;
        let mut provenance = Provenance::new(kind);
        let mut alphabet = Alphabet::all_bytes();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| err(ln, format!("bad metadata {tok:?}")))?;
            if k == "alphabet" {
                alphabet = v.parse().map_err(|e: Error| err(ln, e.to_string()))?;
            } else {
                provenance.meta.insert(k.to_owned(), v.to_owned());
            }
        }

        let mut bins = [0u8; 256];
        let mut seen = [false; 256];
        for (ln, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [tag, byte, bin] = parts[..] else {
                return Err(err(
                    ln,
                    format!("expected `map <byte> <bin>`, got {line:?}"),
                ));
            };
            if tag != "map" {
                return Err(err(ln, format!("expected `map`, got {tag:?}")));
            }
            let byte: u8 = byte
                .parse()
                .map_err(|_| err(ln, format!("bad byte {byte:?}")))?;
            let bin: usize = bin
                .parse()
                .map_err(|_| err(ln, format!("bad bin {bin:?}")))?;
            if bin >= width {
                return Err(err(ln, format!("bin {bin} exceeds width {width}")));
            }
            if std::mem::replace(&mut seen[byte as usize], true) {
                return Err(err(ln, format!("duplicate byte {byte}")));
            }
            bins[byte as usize] = bin as u8;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(err(0, format!("missing map line for byte {missing}")));
        }
        Ok(Self {
            width: w,
            bins,
            alphabet,
            provenance,
        })
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut groups: Vec<Vec<u8>> = vec![Vec::new(); self.width()];
        for &b in self.alphabet.bytes() {
            groups[self.bin_of(b)].push(b);
        }
        let groups: Vec<String> = groups
            .iter()
            .map(|g| String::from_utf8_lossy(g).into_owned())
            .collect();
        f.debug_struct("Partition")
            .field("width", &self.width)
            .field("provenance", &self.provenance.kind)
            .field("bins", &groups)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::is_candidate;
    use crate::fixtures::nutella_partition;

    fn abcd() -> Alphabet {
        "chars:abcd".parse().unwrap()
    }

    #[test]
    fn round_robin_small() {
        let p = Partition::round_robin(&abcd(), 2).unwrap();
        let bins: Vec<usize> = b"abcd".iter().map(|&b| p.bin_of(b)).collect();
        assert_eq!(bins, [0, 1, 0, 1]);
    }

    #[test]
    fn round_robin_singleton() {
        let p = Partition::round_robin(&"chars:a".parse().unwrap(), 4).unwrap();
        assert_eq!(p.bin_of(b'a'), 0);
        for w in ["", "a", "aaaa"] {
            assert!(p.fingerprint(w.as_bytes()).bits() <= 1);
        }
    }

    #[test]
    fn round_robin_printable_16() {
        let p = Partition::round_robin(&Alphabet::printable_ascii(), 16).unwrap();
        for (i, b) in (0x20u8..=0x7E).enumerate() {
            assert_eq!(p.bin_of(b), i % 16);
        }
        assert_eq!(p.bin_of(0x20), 0);
        assert_eq!(p.bin_of(0x21), 1);
        assert_eq!(p.bin_of(0x30), 0);
        // fallback for non-members
        assert_eq!(p.bin_of(0xC3), 0xC3 % 16);
    }

    #[test]
    fn width_out_of_range() {
        assert!(matches!(
            Partition::round_robin(&abcd(), 0),
            Err(Error::WidthOutOfRange(0))
        ));
        assert!(matches!(
            Partition::round_robin(&abcd(), 65),
            Err(Error::WidthOutOfRange(65))
        ));
        assert!(Partition::round_robin(&abcd(), 64).is_ok());
    }

    #[test]
    fn worked_example() {
        let p = nutella_partition();
        let nutella = p.fingerprint(b"nutella");
        let utn = p.fingerprint(b"utn");
        let tone = p.fingerprint(b"tone");
        assert_eq!(nutella.render(), "1010");
        assert_eq!(utn.render(), "1010");
        assert_eq!(tone.render(), "0110");
        assert_eq!(p.fingerprint(b"").render(), "0000");
        assert!(is_candidate(utn, nutella).unwrap());
        assert!(!is_candidate(tone, nutella).unwrap());
    }

    #[test]
    fn file_roundtrip() {
        let p = Partition::round_robin(&Alphabet::printable_ascii(), 16)
            .unwrap()
            .with_provenance(Provenance::new(ProvenanceKind::LocalSearch).with("seed", 7));
        let text = p.to_text();
        assert!(
            text.starts_with("width 16\nprovenance local_search alphabet=32-126 seed=7\nmap 0 0\n")
        );
        assert_eq!(text.lines().count(), 258);
        let back = Partition::read_from(text.as_bytes()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn file_rejects_duplicates_and_gaps() {
        let p = Partition::round_robin(&abcd(), 2).unwrap();
        let text = p.to_text();
        let dup = text.replace("map 5 1\n", "map 4 1\n");
        assert!(matches!(
            Partition::read_from(dup.as_bytes()),
            Err(Error::PartitionFormat { reason, .. }) if reason.contains("duplicate")
        ));
        let gap = text.replace("map 5 1\n", "");
        assert!(matches!(
            Partition::read_from(gap.as_bytes()),
            Err(Error::PartitionFormat { reason, .. }) if reason.contains("missing map line for byte 5")
        ));
        let big = text.replace("map 5 1\n", "map 5 2\n");
        assert!(Partition::read_from(big.as_bytes()).is_err());
        assert!(Partition::read_from("width 0\n".as_bytes()).is_err());
        assert!(Partition::read_from("width 2\nprovenance bogus\n".as_bytes()).is_err());
    }
}
