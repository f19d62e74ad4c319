use memchr::memmem;
use rayon::prelude::*;

use super::Corpus;

/// Exact substring ground truth: for each query, the ascending indices of
/// the corpus words that contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOracle {
    matches: Vec<Vec<u32>>,
}

impl MatchOracle {
    pub fn build<P: AsRef<[u8]> + Sync>(corpus: &Corpus, queries: &[P]) -> Self {
        let matches = queries
            .par_iter()
            .map(|q| matching_indices(corpus.words(), q.as_ref()))
            .collect();
        Self { matches }
    }

    /// Indices for query `q`, ascending.
    pub fn matches(&self, q: usize) -> &[u32] {
        &self.matches[q]
    }

    pub fn contains(&self, q: usize, word: usize) -> bool {
        self.matches[q].binary_search(&(word as u32)).is_ok()
    }

    pub fn num_queries(&self) -> usize {
        self.matches.len()
    }
}

pub(crate) fn matching_indices(words: &[Vec<u8>], pattern: &[u8]) -> Vec<u32> {
    let finder = memmem::Finder::new(pattern);
    words
        .iter()
        .enumerate()
        .filter(|(_, w)| finder.find(w).is_some())
        .map(|(i, _)| i as u32)
        .collect()
}
