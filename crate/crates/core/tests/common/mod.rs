//! Test-only oracles, kept independent of the library's evaluation paths.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use strfp::optimizer::TrainingInstance;
use strfp::Alphabet;

pub fn bundled_corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/web2-80k.txt")
}

pub fn naive_contains(word: &[u8], pattern: &[u8]) -> bool {
    pattern.is_empty()
        || (pattern.len() <= word.len()
            && (0..=word.len() - pattern.len()).any(|i| &word[i..i + pattern.len()] == pattern))
}

/// Objective recomputed from bin sets: negative pairs whose query touches a
/// bin the word does not.
pub fn brute_objective(
    words: &[Vec<u8>],
    queries: &[Vec<u8>],
    bin_of: &dyn Fn(u8) -> usize,
) -> u64 {
    let bins = |s: &[u8]| s.iter().map(|&b| bin_of(b)).collect::<BTreeSet<usize>>();
    let mut correct = 0;
    for q in queries {
        let qb = bins(q);
        for w in words {
            if !naive_contains(w, q) && !qb.is_subset(&bins(w)) {
                correct += 1;
            }
        }
    }
    correct
}

/// Best objective over every map from alphabet members to `0..width`.
pub fn brute_force_optimum(
    letters: &[u8],
    width: usize,
    words: &[Vec<u8>],
    queries: &[Vec<u8>],
) -> u64 {
    let total = width.pow(letters.len() as u32);
    let mut best = 0;
    for code in 0..total {
        let mut digits = HashMap::new();
        let mut c = code;
        for &l in letters {
            digits.insert(l, c % width);
            c /= width;
        }
        best = best.max(brute_objective(words, queries, &|b| digits[&b]));
    }
    best
}

/// Random tiny instance: alphabet of at most 8 letters, 2 or 3 bins, at most
/// 10 words of length 1..=6 and at most 5 queries. Half of the queries are
/// cut from words so that some pairs are positive.
pub fn random_tiny_instance<R: Rng>(rng: &mut R) -> TrainingInstance {
    let size = rng.gen_range(2..=8);
    let mut pool: Vec<u8> = (b'a'..=b'z').collect();
    pool.shuffle(rng);
    let letters: Vec<u8> = pool[..size].to_vec();
    let width = rng.gen_range(2..=3);
    let word = |rng: &mut R, max: usize| -> Vec<u8> {
        let len = rng.gen_range(1..=max);
        (0..len).map(|_| *letters.choose(rng).unwrap()).collect()
    };
    let n_words = rng.gen_range(1..=10);
    let words: Vec<Vec<u8>> = (0..n_words).map(|_| word(rng, 6)).collect();
    let n_queries = rng.gen_range(1..=5);
    let queries = (0..n_queries)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let w = words.choose(rng).unwrap();
                let i = rng.gen_range(0..w.len());
                let j = rng.gen_range(i + 1..=w.len().min(i + 3));
                w[i..j].to_vec()
            } else {
                word(rng, 3)
            }
        })
        .collect();
    TrainingInstance::new(
        words,
        queries,
        Alphabet::from_bytes(letters).unwrap(),
        width,
    )
    .unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Debug, Default)]
pub struct LpFile {
    pub objective: Vec<(i64, String)>,
    pub constraints: Vec<LpConstraint>,
    pub binaries: Vec<String>,
    pub saw_end: bool,
}

fn parse_terms(tokens: &[&str]) -> Vec<(i64, String)> {
    let mut terms = Vec::new();
    let mut sign = 1;
    let mut coef = None;
    for &t in tokens {
        match t {
            "+" => sign = 1,
            "-" => sign = -1,
            "0" if coef.is_none() && terms.is_empty() => {}
            _ => {
                if let Ok(c) = t.parse::<i64>() {
                    coef = Some(c);
                } else {
                    assert!(
                        t.chars().next().unwrap().is_ascii_alphabetic(),
                        "bad token {t:?}"
                    );
                    terms.push((sign * coef.take().unwrap_or(1), t.to_owned()));
                    sign = 1;
                }
            }
        }
    }
    terms
}

/// Minimal reader for the subset of CPLEX LP format the exporter writes:
/// `\` comments, one objective, named constraints possibly spanning lines,
/// a `Binary` section, and `End`.
pub fn parse_lp(text: &str) -> LpFile {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Objective,
        Constraints,
        Binary,
        End,
    }
    let mut lp = LpFile::default();
    let mut section = Section::Start;
    let mut pending = String::new();
    let flush = |pending: &mut String, section: &Section, lp: &mut LpFile| {
        if pending.trim().is_empty() {
            return;
        }
        let (name, body) = pending.split_once(':').expect("labelled row");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match section {
            Section::Objective => lp.objective = parse_terms(&tokens),
            Section::Constraints => {
                let pos = tokens
                    .iter()
                    .position(|t| ["<=", ">=", "="].contains(t))
                    .expect("sense");
                let sense = match tokens[pos] {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    _ => Sense::Eq,
                };
                assert_eq!(pos + 2, tokens.len(), "rhs must end the row");
                lp.constraints.push(LpConstraint {
                    name: name.trim().to_owned(),
                    terms: parse_terms(&tokens[..pos]),
                    sense,
                    rhs: tokens[pos + 1].parse().unwrap(),
                });
            }
            _ => unreachable!(),
        }
        pending.clear();
    };
    for line in text.lines() {
        if line.starts_with('\\') {
            continue;
        }
        let keyword = line.trim();
        let next = match keyword {
            "Maximize" => Some(Section::Objective),
            "Subject To" => Some(Section::Constraints),
            "Binary" => Some(Section::Binary),
            "End" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            if section == Section::Objective || section == Section::Constraints {
                flush(&mut pending, &section, &mut lp);
            }
            section = next;
            if section == Section::End {
                lp.saw_end = true;
            }
            continue;
        }
        match section {
            Section::Objective | Section::Constraints => {
                if line.starts_with("   ") {
                    pending.push(' ');
                    pending.push_str(keyword);
                } else {
                    flush(&mut pending, &section, &mut lp);
                    pending.push_str(keyword);
                }
            }
            Section::Binary => lp
                .binaries
                .extend(keyword.split_whitespace().map(str::to_owned)),
            Section::Start | Section::End => assert!(keyword.is_empty(), "stray line {line:?}"),
        }
    }
    lp
}

impl LpConstraint {
    pub fn holds(&self, values: &HashMap<String, i64>) -> bool {
        let lhs: i64 = self.terms.iter().map(|(c, v)| c * values[v]).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}
