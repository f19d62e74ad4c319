use std::io::BufRead;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// What to do with rows containing bytes outside the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowPolicy {
    /// Exclude the row and count it in [`Corpus::dropped_count`].
    #[default]
    DropRow,
    /// Keep every row; foreign bytes use the partition's fallback bins.
    KeepTotal,
}

/// An ordered column of string values. Duplicates and order are preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    words: Vec<Vec<u8>>,
    alphabet: Alphabet,
    dropped: usize,
}

impl Corpus {
    pub fn from_words<I, W>(words: I, alphabet: Alphabet, policy: RowPolicy) -> Self
    where
        I: IntoIterator<Item = W>,
        W: Into<Vec<u8>>,
    {
        let mut kept = Vec::new();
        let mut dropped = 0;
        for w in words {
            let w = w.into();
            if policy == RowPolicy::DropRow && !alphabet.contains_all(&w) {
                dropped += 1;
            } else {
                kept.push(w);
            }
        }
        Self {
            words: kept,
            alphabet,
            dropped,
        }
    }

    /// Reads newline-delimited rows. A trailing newline is optional and a
    /// `\r\n` terminator counts as a plain line break.
    pub fn load<R: BufRead>(mut source: R, alphabet: Alphabet, policy: RowPolicy) -> Result<Self> {
        let mut rows = Vec::new();
        let mut buf = Vec::new();
        loop {
            buf.clear();
            if source.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            if buf.last() == Some(&b'\n') {
                buf.pop();
                if buf.last() == Some(&b'\r') {
                    buf.pop();
                }
            }
            rows.push(buf.clone());
        }
        Ok(Self::from_words(rows, alphabet, policy))
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &[u8] {
        &self.words[i]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dropped_count(&self) -> usize {
        self.dropped
    }

    /// Uniform sample without replacement of `min(sample_size, available)`
    /// words from the first `block_size` rows. The sample keeps corpus order.
    pub fn sample_training(
        &self,
        block_size: usize,
        sample_size: usize,
        seed: u64,
    ) -> Result<Corpus> {
        if self.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if block_size == 0 || sample_size == 0 {
            return Err(Error::InvalidArgument(
                "block and sample sizes must be at least 1".into(),
            ));
        }
        let block = block_size.min(self.len());
        let take = sample_size.min(block);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, block, take).into_vec();
        picked.sort_unstable();
        Ok(Corpus {
            words: picked.into_iter().map(|i| self.words[i].clone()).collect(),
            alphabet: self.alphabet.clone(),
            dropped: 0,
        })
    }
}
