use std::time::Instant;

use super::{Objective, SolveStatus, SolveTrace, TrainingInstance};
use crate::error::{Error, Result};
use crate::partition::{Partition, Provenance, ProvenanceKind};

/// Largest alphabet accepted by [`exact_solve`].
pub const MAX_EXACT_ALPHABET: usize = 14;

/// Enumerates every partition of the alphabet into at most `width` bins as a
/// restricted growth string (block labels appear in first-use order, so bin
/// relabelings are visited once) and returns the first one found with the
/// maximum objective.
pub fn exact_solve(inst: &TrainingInstance) -> Result<(Partition, SolveTrace)> {
    let letters = inst.alphabet().bytes();
    if letters.len() > MAX_EXACT_ALPHABET {
        return Err(Error::AlphabetTooLarge {
            size: letters.len(),
            max: MAX_EXACT_ALPHABET,
        });
    }
    let width = inst.width();
    let start = Instant::now();
    let mut trace = SolveTrace::new();
    let mut eval = inst.evaluator();

    let provenance = Provenance::new(ProvenanceKind::Exact);
    let mut current = Partition::from_fn(inst.alphabet().clone(), width, provenance, |_| 0)?;
    let mut best: Option<(Partition, Objective)> = None;

    let m = letters.len();
    // rgs[i] is the block of letter i; prefix_max[i] = max(rgs[..=i])
    let mut rgs = vec![0usize; m];
    let mut prefix_max = vec![0usize; m];
    loop {
        for (&b, &bin) in letters.iter().zip(&rgs) {
            current.set_bin(b, bin);
        }
        let obj = eval.evaluate(&current);
        trace.evaluations += 1;
        if best.as_ref().map_or(true, |(_, o)| obj.correct > o.correct) {
            trace.record(start.elapsed(), obj, &current);
            best = Some((current.clone(), obj));
        }

        // next restricted growth string, rightmost position first
        let mut i = m;
        loop {
            if i <= 1 {
                let (partition, _) = best.expect("at least one partition enumerated");
                trace.status = SolveStatus::Optimal;
                return Ok((partition, trace));
            }
            i -= 1;
            let limit = (prefix_max[i - 1] + 1).min(width - 1);
            if rgs[i] < limit {
                rgs[i] += 1;
                prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
                for j in i + 1..m {
                    rgs[j] = 0;
                    prefix_max[j] = prefix_max[i];
                }
                break;
            }
        }
    }
}
