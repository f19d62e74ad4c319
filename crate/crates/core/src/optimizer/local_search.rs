use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Objective, SolveStatus, SolveTrace, TrainingInstance};
use crate::error::{Error, Result};
use crate::partition::{Partition, Provenance, ProvenanceKind};

/// Default search budget, matching the solver time limit used for training.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone)]
pub enum Init {
    RoundRobin,
    Random,
    Given(Partition),
}

/// Secondary criterion among partitions with equal objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Plain objective; plateau moves are never taken.
    None,
    /// Prefer partitions that also rule out more (gram, word) pairs, where the
    /// grams are the distinct 1- and 2-grams of the training words and the
    /// words are the training words lacking them. Stands in for queries the
    /// training workload does not contain.
    #[default]
    SampleGrams,
}

#[derive(Debug, Clone)]
pub struct LocalSearchConfig {
    pub time_limit: Duration,
    pub seed: u64,
    /// Cap on candidate evaluations. With a cap that binds before the time
    /// limit, the result depends only on the instance and the seed.
    pub max_evaluations: Option<u64>,
    pub init: Init,
    pub tie_break: TieBreak,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            time_limit: DEFAULT_TIME_LIMIT,
            seed: 0,
            max_evaluations: None,
            init: Init::RoundRobin,
            tie_break: TieBreak::default(),
        }
    }
}

struct Budget {
    start: Instant,
    time_limit: Duration,
    max_evaluations: Option<u64>,
    used: u64,
}

impl Budget {
    /// Claims one evaluation, or reports why none is left.
    fn take(&mut self) -> Option<SolveStatus> {
        if self.max_evaluations.is_some_and(|cap| self.used >= cap) {
            return Some(SolveStatus::IterationLimit);
        }
        if self.start.elapsed() >= self.time_limit {
            return Some(SolveStatus::TimeLimit);
        }
        self.used += 1;
        None
    }
}

/// Steepest-ascent hill climbing over single-byte moves with random restarts.
///
/// Each step re-evaluates the full objective for every move of an active
/// byte (one occurring in the training strings) to another bin and applies
/// the best strict improvement. At a local optimum the active bytes are
/// reassigned uniformly at random. Bytes that never occur in training keep
/// their initial bins. Stops at the time limit or the evaluation cap; with
/// [`TieBreak::None`] also once every negative pair is classified correctly.
pub fn local_search(
    inst: &TrainingInstance,
    config: &LocalSearchConfig,
) -> Result<(Partition, SolveTrace)> {
    if config.time_limit.is_zero() && config.max_evaluations.is_none() {
        return Err(Error::InvalidArgument("time limit must be positive".into()));
    }
    let width = inst.width();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = match &config.init {
        Init::RoundRobin => Partition::round_robin(inst.alphabet(), width)?,
        Init::Random => {
            let mut p = Partition::round_robin(inst.alphabet(), width)?;
            for &b in inst.alphabet().bytes() {
                p.set_bin(b, rng.gen_range(0..width));
            }
            p
        }
        Init::Given(p) => {
            if p.width() != width {
                return Err(Error::WidthMismatch {
                    left: p.width(),
                    right: width,
                });
            }
            p.clone()
        }
    };
    let mut provenance = Provenance::new(ProvenanceKind::LocalSearch)
        .with("seed", config.seed)
        .with("time_limit_s", config.time_limit.as_secs_f64());
    if let Some(cap) = config.max_evaluations {
        provenance = provenance.with("max_evaluations", cap);
    }
    if config.tie_break == TieBreak::None {
        provenance = provenance.with("tie_break", "none");
    }
    current = current.with_provenance(provenance);

    let mut budget = Budget {
        start: Instant::now(),
        time_limit: config.time_limit,
        max_evaluations: config.max_evaluations,
        used: 0,
    };
    let mut eval = match config.tie_break {
        TieBreak::None => inst.evaluator(),
        TieBreak::SampleGrams => inst.evaluator_with_sample_grams(),
    };
    let tie_break = config.tie_break;
    // (objective, secondary score) compared lexicographically
    let mut score = |p: &Partition| {
        let obj = eval.evaluate(p);
        let secondary = match tie_break {
            TieBreak::None => 0,
            TieBreak::SampleGrams => eval.sample_gram_score(p),
        };
        (obj, secondary)
    };
    let key = |(obj, sec): (Objective, u64)| (obj.correct, sec);

    let mut trace = SolveTrace::new();
    let mut current_score = score(&current);
    let total = current_score.0.total_negatives;
    trace.record(budget.start.elapsed(), current_score.0, &current);
    let mut best = current.clone();
    let mut best_score = current_score;
    // With a tie-break there is always something left to improve.
    let done = |s: (Objective, u64)| tie_break == TieBreak::None && s.0.correct == total;

    let active = inst.active_bytes();
    let status = 'search: loop {
        if done(best_score) {
            break SolveStatus::Optimal;
        }
        // climb
        loop {
            let mut best_move: Option<(u8, usize)> = None;
            let mut best_move_score = current_score;
            for &b in &active {
                let home = current.bin_of(b);
                for bin in (0..width).filter(|&bin| bin != home) {
                    if let Some(stop) = budget.take() {
                        current.set_bin(b, home);
                        break 'search stop;
                    }
                    current.set_bin(b, bin);
                    let s = score(&current);
                    if key(s) > key(best_move_score) {
                        best_move = Some((b, bin));
                        best_move_score = s;
                    }
                }
                current.set_bin(b, home);
            }
            let Some((b, bin)) = best_move else { break };
            current.set_bin(b, bin);
            current_score = best_move_score;
            if key(current_score) > key(best_score) {
                best_score = current_score;
                best = current.clone();
                trace.record(budget.start.elapsed(), best_score.0, &best);
                if done(best_score) {
                    break 'search SolveStatus::Optimal;
                }
            }
        }
        // restart
        if let Some(stop) = budget.take() {
            break stop;
        }
        for &b in &active {
            current.set_bin(b, rng.gen_range(0..width));
        }
        current_score = score(&current);
        if key(current_score) > key(best_score) {
            best_score = current_score;
            best = current.clone();
            trace.record(budget.start.elapsed(), best_score.0, &best);
        }
    };
    trace.status = if best_score.0.correct == total {
        SolveStatus::Optimal
    } else {
        status
    };
    trace.evaluations = budget.used;
    Ok((best, trace))
}
