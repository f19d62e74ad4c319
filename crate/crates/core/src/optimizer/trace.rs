use std::fmt;
use std::io::{self, Write};
use std::time::Duration;

use super::Objective;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal: full enumeration, or every negative pair classified.
    Optimal,
    TimeLimit,
    IterationLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::TimeLimit => "time_limit",
            Self::IterationLimit => "iteration_limit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Incumbent {
    pub elapsed: Duration,
    pub objective: Objective,
    pub partition: Partition,
}

/// Incumbent stream of a solve. Objectives never decrease along `entries`.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub entries: Vec<Incumbent>,
    pub status: SolveStatus,
    /// Candidate partitions evaluated.
    pub evaluations: u64,
}

impl SolveTrace {
    pub(crate) fn new() -> Self {
        Self {
            entries: Vec::new(),
            status: SolveStatus::Optimal,
            evaluations: 0,
        }
    }

    pub(crate) fn record(
        &mut self,
        elapsed: Duration,
        objective: Objective,
        partition: &Partition,
    ) {
        debug_assert!(self
            .entries
            .last()
            .map_or(true, |e| e.objective.correct <= objective.correct));
        self.entries.push(Incumbent {
            elapsed,
            objective,
            partition: partition.clone(),
        });
    }

    pub fn best(&self) -> Option<&Incumbent> {
        self.entries.last()
    }

    /// CSV `elapsed_s,objective,fpr`, preceded by `#` comment lines from `header`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "# status={}", self.status)?;
        writeln!(out, "elapsed_s,objective,fpr")?;
        for e in &self.entries {
            writeln!(
                out,
                "{:.6},{},{:.6}",
                e.elapsed.as_secs_f64(),
                e.objective.correct,
                e.objective.fpr()
            )?;
        }
        Ok(())
    }
}
