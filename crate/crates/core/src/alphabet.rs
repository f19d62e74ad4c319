//! Byte alphabets: the character set a partition is optimized over.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Printable ASCII, `0x20..=0x7E`.
pub const PRINTABLE_ASCII: std::ops::RangeInclusive<u8> = 0x20..=0x7E;

/// An ordered, duplicate-free set of byte values with at least one member.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    members: [bool; 256],
    bytes: Vec<u8>,
}

impl Alphabet {
    pub fn from_bytes<I: IntoIterator<Item = u8>>(bytes: I) -> Result<Self> {
        let mut members = [false; 256];
        for b in bytes {
            members[b as usize] = true;
        }
        let bytes: Vec<u8> = (0..=255u8).filter(|&b| members[b as usize]).collect();
        if bytes.is_empty() {
            return Err(Error::InvalidAlphabet(
                "alphabet must have at least one member".into(),
            ));
        }
        Ok(Self { members, bytes })
    }

    pub fn printable_ascii() -> Self {
        Self::from_bytes(PRINTABLE_ASCII).expect("non-empty range")
    }

    pub fn all_bytes() -> Self {
        Self::from_bytes(0..=255u8).expect("non-empty range")
    }

    /// Bytes occurring anywhere in `strings`.
    pub fn observed<'a, I>(strings: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [u8]>,
    {
        Self::from_bytes(strings.into_iter().flat_map(|s| s.iter().copied()))
    }

    #[inline]
    pub fn contains(&self, byte: u8) -> bool {
        self.members[byte as usize]
    }

    pub fn contains_all(&self, s: &[u8]) -> bool {
        s.iter().all(|&b| self.contains(b))
    }

    /// Members in ascending byte order.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `byte` within the ascending member list.
    pub fn index_of(&self, byte: u8) -> Option<usize> {
        self.bytes.binary_search(&byte).ok()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({self})")
    }
}

/// Compact decimal range list, e.g. `9,32-126`.
impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.bytes.len() {
            let start = self.bytes[i];
            let mut end = start;
            while i + 1 < self.bytes.len() && self.bytes[i + 1] == end.wrapping_add(1) {
                i += 1;
                end = self.bytes[i];
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if start == end {
                write!(f, "{start}")?;
            } else {
                write!(f, "{start}-{end}")?;
            }
            i += 1;
        }
        Ok(())
    }
}

/// Accepts `printable`, `all`, `chars:<literal bytes>`, or a decimal range list
/// such as `9,32-126`.
impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printable" => return Ok(Self::printable_ascii()),
            "all" => return Ok(Self::all_bytes()),
            _ => {}
        }
        if let Some(chars) = s.strip_prefix("chars:") {
            return Self::from_bytes(chars.bytes());
        }
        let bad = |part: &str| Error::InvalidAlphabet(format!("bad range {part:?} in {s:?}"));
        let mut bytes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lo, hi) = match part.split_once('-') {
                Some((lo, hi)) => (lo, hi),
                None => (part, part),
            };
            let lo: u8 = lo.trim().parse().map_err(|_| bad(part))?;
            let hi: u8 = hi.trim().parse().map_err(|_| bad(part))?;
            if lo > hi {
                return Err(bad(part));
            }
            bytes.extend(lo..=hi);
        }
        Self::from_bytes(bytes)
    }
}
