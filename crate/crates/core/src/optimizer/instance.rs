use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::fingerprint::check_width;
use crate::partition::Partition;
use crate::workload::{Corpus, MatchOracle};

/// Training words, seen queries, and the (query, word) pairs where the word
/// does not contain the query. Those pairs are what the optimizer tries to
/// classify correctly.
#[derive(Debug, Clone)]
pub struct TrainingInstance {
    words: Vec<Vec<u8>>,
    queries: Vec<Vec<u8>>,
    alphabet: Alphabet,
    width: u8,
    oracle: MatchOracle,
    negative_pairs: Vec<(u32, u32)>,
    word_bytes: Vec<Vec<u8>>,
    query_bytes: Vec<Vec<u8>>,
}

/// Correctly classified negative pairs out of all negative pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Objective {
    pub correct: u64,
    pub total_negatives: u64,
}

impl Objective {
    /// `1 - correct / total`, with `0/0` read as 0.
    pub fn fpr(self) -> f64 {
        if self.total_negatives == 0 {
            0.0
        } else {
            1.0 - self.correct as f64 / self.total_negatives as f64
        }
    }
}

fn distinct_bytes(s: &[u8]) -> Vec<u8> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl TrainingInstance {
    /// Every byte of every word and query must be an alphabet member.
    pub fn new(
        words: Vec<Vec<u8>>,
        queries: Vec<Vec<u8>>,
        alphabet: Alphabet,
        width: usize,
    ) -> Result<Self> {
        let width = check_width(width)?;
        for (role, strings) in [("word", &words), ("query", &queries)] {
            for (index, s) in strings.iter().enumerate() {
                if let Some(&byte) = s.iter().find(|&&b| !alphabet.contains(b)) {
                    return Err(Error::ByteOutsideAlphabet { role, index, byte });
                }
            }
        }
        let corpus = Corpus::from_words(
            words.iter().cloned(),
            alphabet.clone(),
            crate::workload::RowPolicy::KeepTotal,
        );
        let oracle = MatchOracle::build(&corpus, &queries);
        let mut negative_pairs = Vec::new();
        for q in 0..queries.len() {
            let mut hits = oracle.matches(q).iter().peekable();
            for w in 0..words.len() as u32 {
                if hits.peek() == Some(&&w) {
                    hits.next();
                } else {
                    negative_pairs.push((q as u32, w));
                }
            }
        }
        let word_bytes = words.iter().map(|w| distinct_bytes(w)).collect();
        let query_bytes = queries.iter().map(|q| distinct_bytes(q)).collect();
        Ok(Self {
            words,
            queries,
            alphabet,
            width,
            oracle,
            negative_pairs,
            word_bytes,
            query_bytes,
        })
    }

    /// Uses the corpus's own alphabet.
    pub fn from_corpus(words: &Corpus, queries: Vec<Vec<u8>>, width: usize) -> Result<Self> {
        Self::new(
            words.words().to_vec(),
            queries,
            words.alphabet().clone(),
            width,
        )
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn queries(&self) -> &[Vec<u8>] {
        &self.queries
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn oracle(&self) -> &MatchOracle {
        &self.oracle
    }

    /// `(query index, word index)` pairs, sorted, with the word not containing the query.
    pub fn negative_pairs(&self) -> &[(u32, u32)] {
        &self.negative_pairs
    }

    /// Distinct bytes of word `i`, ascending.
    pub fn word_bytes(&self, i: usize) -> &[u8] {
        &self.word_bytes[i]
    }

    pub fn query_bytes(&self, i: usize) -> &[u8] {
        &self.query_bytes[i]
    }

    /// Alphabet bytes that occur in some training string. Moving any other
    /// byte cannot change the objective.
    pub fn active_bytes(&self) -> Vec<u8> {
        let mut present = [false; 256];
        for s in self.word_bytes.iter().chain(&self.query_bytes) {
            for &b in s {
                present[b as usize] = true;
            }
        }
        self.alphabet
            .bytes()
            .iter()
            .copied()
            .filter(|&b| present[b as usize])
            .collect()
    }

    pub fn objective(&self, partition: &Partition) -> Result<Objective> {
        if partition.width() != self.width() {
            return Err(Error::WidthMismatch {
                left: partition.width(),
                right: self.width(),
            });
        }
        Ok(self.evaluator().evaluate(partition))
    }

    pub(crate) fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            inst: self,
            word_masks: vec![0; self.words.len()],
            query_masks: vec![0; self.queries.len()],
            pseudo: Vec::new(),
        }
    }

    /// Evaluator that can also score the distinct 1- and 2-grams of the
    /// training words as extra queries against those same words.
    pub(crate) fn evaluator_with_sample_grams(&self) -> Evaluator<'_> {
        let mut grams: Vec<&[u8]> = self
            .words
            .iter()
            .flat_map(|w| w.windows(1).chain(w.windows(2)))
            .collect();
        grams.sort_unstable();
        grams.dedup();
        let pseudo = grams
            .into_iter()
            .map(|g| {
                let finder = memchr::memmem::Finder::new(g);
                let negatives = (0..self.words.len() as u32)
                    .filter(|&w| finder.find(&self.words[w as usize]).is_none())
                    .collect();
                (distinct_bytes(g), negatives)
            })
            .collect();
        Evaluator {
            pseudo,
            ..self.evaluator()
        }
    }
}

/// Objective of `partition` on `inst`: the number of negative pairs whose
/// query fingerprint has a bin the word fingerprint lacks.
pub fn objective(partition: &Partition, inst: &TrainingInstance) -> Result<Objective> {
    inst.objective(partition)
}

/// Reusable scratch space for repeated full objective evaluations.
pub(crate) struct Evaluator<'a> {
    inst: &'a TrainingInstance,
    word_masks: Vec<u64>,
    query_masks: Vec<u64>,
    /// Extra (distinct bytes, non-containing word indices) pairs for the tie-break score.
    pseudo: Vec<(Vec<u8>, Vec<u32>)>,
}

impl Evaluator<'_> {
    pub(crate) fn evaluate(&mut self, partition: &Partition) -> Objective {
        let inst = self.inst;
        for (m, bytes) in self.word_masks.iter_mut().zip(&inst.word_bytes) {
            *m = partition.mask_of(bytes);
        }
        for (m, bytes) in self.query_masks.iter_mut().zip(&inst.query_bytes) {
            *m = partition.mask_of(bytes);
        }
        let correct = inst
            .negative_pairs
            .iter()
            .filter(|&&(q, w)| self.query_masks[q as usize] & !self.word_masks[w as usize] != 0)
            .count();
        Objective {
            correct: correct as u64,
            total_negatives: inst.negative_pairs.len() as u64,
        }
    }

    /// Correctly classified (sample gram, training word) pairs. Reuses the
    /// word masks of the last [`Evaluator::evaluate`] call.
    pub(crate) fn sample_gram_score(&self, partition: &Partition) -> u64 {
        self.pseudo
            .iter()
            .map(|(gram, negatives)| {
                let q = partition.mask_of(gram);
                negatives
                    .iter()
                    .filter(|&&w| q & !self.word_masks[w as usize] != 0)
                    .count() as u64
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_letter_instance, split_partition};

    #[test]
    fn negative_pair_count_matches_eta_dimension() {
        let inst = TrainingInstance::new(
            vec![b"nutella".to_vec(), b"tone".to_vec(), b"net".to_vec()],
            vec![b"ne".to_vec(), b"t".to_vec(), b"utn".to_vec()],
            "chars:nutelao".parse().unwrap(),
            4,
        )
        .unwrap();
        let matched: usize = (0..3).map(|q| inst.oracle().matches(q).len()).sum();
        assert_eq!(inst.negative_pairs().len(), 3 * 3 - matched);
        for &(q, w) in inst.negative_pairs() {
            assert!(!inst.oracle().contains(q as usize, w as usize));
        }
    }

    #[test]
    fn four_letter_objectives() {
        let inst = four_letter_instance();
        let good = split_partition();
        assert_eq!(
            objective(&good, &inst).unwrap(),
            Objective {
                correct: 2,
                total_negatives: 2
            }
        );
        assert_eq!(objective(&good, &inst).unwrap().fpr(), 0.0);

        let rr = Partition::round_robin(inst.alphabet(), 2).unwrap();
        let o = objective(&rr, &inst).unwrap();
        assert_eq!(
            o,
            Objective {
                correct: 0,
                total_negatives: 2
            }
        );
        assert_eq!(o.fpr(), 1.0);
    }

    #[test]
    fn no_queries_means_empty_sum() {
        let inst =
            TrainingInstance::new(vec![b"ab".to_vec()], vec![], "chars:ab".parse().unwrap(), 2)
                .unwrap();
        let rr = Partition::round_robin(inst.alphabet(), 2).unwrap();
        let o = objective(&rr, &inst).unwrap();
        assert_eq!(
            o,
            Objective {
                correct: 0,
                total_negatives: 0
            }
        );
        assert_eq!(o.fpr(), 0.0);
    }

    #[test]
    fn rejects_width_mismatch_and_foreign_bytes() {
        let inst = four_letter_instance();
        let p = Partition::round_robin(inst.alphabet(), 3).unwrap();
        assert!(matches!(
            objective(&p, &inst),
            Err(Error::WidthMismatch { left: 3, right: 2 })
        ));
        let err = TrainingInstance::new(
            vec![b"abz".to_vec()],
            vec![],
            "chars:ab".parse().unwrap(),
            2,
        );
        assert!(matches!(
            err,
            Err(Error::ByteOutsideAlphabet {
                role: "word",
                index: 0,
                byte: b'z'
            })
        ));
    }

    #[test]
    fn active_bytes_ignores_unused_letters() {
        let inst = TrainingInstance::new(
            vec![b"ba".to_vec()],
            vec![b"d".to_vec()],
            "chars:abcd".parse().unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(inst.active_bytes(), b"abd");
    }
}
