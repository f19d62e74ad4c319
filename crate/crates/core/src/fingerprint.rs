//! Fixed-width bin masks and the conservative subset test.
//!
//! Bin `j` corresponds to integer bit `1 << j`. The textual form lists bin 0
//! leftmost, so bins `{0, 2}` of a 4-bit fingerprint render as `"1010"`.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 64;

pub(crate) fn check_width(width: usize) -> Result<u8> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(width as u8)
    } else {
        Err(Error::WidthOutOfRange(width))
    }
}

#[inline]
pub(crate) fn width_mask(width: u8) -> u64 {
    if width as usize == MAX_WIDTH {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    bits: u64,
    width: u8,
}

impl Fingerprint {
    /// Fails if `width` is out of range or `bits` has bits at or above `width`.
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        let width = check_width(width)?;
        if bits & !width_mask(width) != 0 {
            return Err(Error::BadFingerprint {
                text: format!("{bits:#x}"),
                reason: "bits set beyond the fingerprint width",
            });
        }
        Ok(Self { bits, width })
    }

    #[inline]
    pub(crate) fn from_parts(bits: u64, width: u8) -> Self {
        debug_assert_eq!(bits & !width_mask(width), 0);
        Self { bits, width }
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn is_set(self, bin: usize) -> bool {
        bin < self.width() && self.bits >> bin & 1 == 1
    }

    /// Whether a string with fingerprint `word` may contain a pattern with
    /// fingerprint `self`. `false` is a definite answer; `true` is not.
    pub fn is_candidate_for(self, word: Fingerprint) -> Result<bool> {
        if self.width != word.width {
            return Err(Error::WidthMismatch {
                left: self.width(),
                right: word.width(),
            });
        }
        Ok(self.bits & word.bits == self.bits)
    }

    pub fn render(self) -> String {
        (0..self.width())
            .map(|j| if self.is_set(j) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(text: &str, width: usize) -> Result<Self> {
        let w = check_width(width)?;
        let bad = |reason| Error::BadFingerprint {
            text: text.to_owned(),
            reason,
        };
        if text.len() != width {
            return Err(bad("length differs from the width"));
        }
        let mut bits = 0u64;
        for (j, c) in text.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => bits |= 1 << j,
                _ => return Err(bad("only '0' and '1' are allowed")),
            }
        }
        Ok(Self { bits, width: w })
    }
}

/// Subset test `query ⊆ word`, i.e. `word & query == query`.
pub fn is_candidate(query: Fingerprint, word: Fingerprint) -> Result<bool> {
    query.is_candidate_for(word)
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", self.render())
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
