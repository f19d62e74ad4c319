//! Linearized mixed-integer model of the partition problem and its LP-format
//! export.
//!
//! Variables, all binary:
//! - `x_<byte>_<bin>`: byte is assigned to bin
//! - `d_w<i>_<bin>`, `d_q<i>_<bin>`: fingerprint bit of word `i` / query `i`
//! - `eta_<q>_<w>`: negative pair (q, w) is classified correctly
//! - `z_<q>_<w>_<bin>`: linearizes `d_q * (1 - d_w)` for that bin
//!
//! The no-false-negative constraints `d_q <= d_w` for words containing the
//! query are left out: they follow from the fingerprint constraints.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use super::TrainingInstance;
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X {
        byte: u8,
        bin: usize,
    },
    DWord {
        word: usize,
        bin: usize,
    },
    DQuery {
        query: usize,
        bin: usize,
    },
    Eta {
        query: usize,
        word: usize,
    },
    Z {
        query: usize,
        word: usize,
        bin: usize,
    },
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::X { byte, bin } => write!(f, "x_{byte}_{bin}"),
            Var::DWord { word, bin } => write!(f, "d_w{word}_{bin}"),
            Var::DQuery { query, bin } => write!(f, "d_q{query}_{bin}"),
            Var::Eta { query, word } => write!(f, "eta_{query}_{word}"),
            Var::Z { query, word, bin } => write!(f, "z_{query}_{word}_{bin}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintFamily {
    /// `sum_j x_{a,j} = 1`
    Assignment,
    /// `x_{c,j} <= d^s_j` per distinct character `c` of `s`
    FingerprintLower,
    /// `d^s_j <= sum_c x_{c,j}`
    FingerprintUpper,
    /// `z <= d^q_j`
    ZQuery,
    /// `z <= 1 - d^w_j`
    ZWord,
    /// `z >= d^q_j - d^w_j`
    ZLower,
    /// `eta <= sum_j z_j`
    Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub family: ConstraintFamily,
    /// `(variable index, coefficient)`
    pub terms: Vec<(usize, i32)>,
    pub sense: Sense,
    pub rhs: i32,
}

impl Constraint {
    pub fn is_satisfied(&self, values: &[u8]) -> bool {
        let lhs: i64 = self
            .terms
            .iter()
            .map(|&(v, c)| c as i64 * values[v] as i64)
            .sum();
        let rhs = self.rhs as i64;
        match self.sense {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarCounts {
    pub x: usize,
    pub d: usize,
    pub eta: usize,
    pub z: usize,
}

impl VarCounts {
    pub fn total(&self) -> usize {
        self.x + self.d + self.eta + self.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConstraintCounts {
    pub assignment: usize,
    pub fingerprint_lower: usize,
    pub fingerprint_upper: usize,
    /// All three `z` bound families.
    pub linearization: usize,
    pub eta: usize,
}

impl ConstraintCounts {
    pub fn total(&self) -> usize {
        self.assignment
            + self.fingerprint_lower
            + self.fingerprint_upper
            + self.linearization
            + self.eta
    }
}

#[derive(Debug, Clone)]
pub struct ModelInstance {
    alphabet: Alphabet,
    width: usize,
    vars: Vec<Var>,
    index: HashMap<Var, usize>,
    names: HashMap<String, usize>,
    constraints: Vec<Constraint>,
    objective: Vec<usize>,
    var_counts: VarCounts,
    constraint_counts: ConstraintCounts,
}

struct Builder {
    vars: Vec<Var>,
    index: HashMap<Var, usize>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, v: Var) -> usize {
        let id = self.vars.len();
        self.vars.push(v);
        self.index.insert(v, id);
        id
    }

    fn id(&self, v: Var) -> usize {
        self.index[&v]
    }

    fn push(
        &mut self,
        name: String,
        family: ConstraintFamily,
        terms: Vec<(usize, i32)>,
        sense: Sense,
        rhs: i32,
    ) {
        self.constraints.push(Constraint {
            name,
            family,
            terms,
            sense,
            rhs,
        });
    }
}

/// Builds the linearized model for `inst`. Every word and query must be
/// non-empty.
pub fn build_mip(inst: &TrainingInstance) -> Result<ModelInstance> {
    for (role, strings) in [("word", inst.words()), ("query", inst.queries())] {
        if let Some(index) = strings.iter().position(|s| s.is_empty()) {
            return Err(Error::EmptyModelString { role, index });
        }
    }
    let n = inst.width();
    let letters = inst.alphabet().bytes();
    let pairs = inst.negative_pairs();
    let mut b = Builder {
        vars: Vec::new(),
        index: HashMap::new(),
        constraints: Vec::new(),
    };

    for &byte in letters {
        for bin in 0..n {
            b.var(Var::X { byte, bin });
        }
    }
    for word in 0..inst.words().len() {
        for bin in 0..n {
            b.var(Var::DWord { word, bin });
        }
    }
    for query in 0..inst.queries().len() {
        for bin in 0..n {
            b.var(Var::DQuery { query, bin });
        }
    }
    let mut objective = Vec::with_capacity(pairs.len());
    for &(q, w) in pairs {
        objective.push(b.var(Var::Eta {
            query: q as usize,
            word: w as usize,
        }));
    }
    for &(q, w) in pairs {
        for bin in 0..n {
            b.var(Var::Z {
                query: q as usize,
                word: w as usize,
                bin,
            });
        }
    }

    for &byte in letters {
        let terms = (0..n).map(|bin| (b.id(Var::X { byte, bin }), 1)).collect();
        b.push(
            format!("assign_{byte}"),
            ConstraintFamily::Assignment,
            terms,
            Sense::Eq,
            1,
        );
    }

    // (tag, distinct bytes, d variable) for every word then every query
    let strings: Vec<(String, &[u8], Box<dyn Fn(usize) -> Var>)> = (0..inst.words().len())
        .map(|i| {
            (
                format!("w{i}"),
                inst.word_bytes(i),
                Box::new(move |bin| Var::DWord { word: i, bin }) as Box<dyn Fn(usize) -> Var>,
            )
        })
        .chain((0..inst.queries().len()).map(|i| {
            (
                format!("q{i}"),
                inst.query_bytes(i),
                Box::new(move |bin| Var::DQuery { query: i, bin }) as Box<dyn Fn(usize) -> Var>,
            )
        }))
        .collect();
    for (tag, bytes, d) in &strings {
        for &byte in *bytes {
            for bin in 0..n {
                let terms = vec![(b.id(Var::X { byte, bin }), 1), (b.id(d(bin)), -1)];
                b.push(
                    format!("fplo_{tag}_{byte}_{bin}"),
                    ConstraintFamily::FingerprintLower,
                    terms,
                    Sense::Le,
                    0,
                );
            }
        }
    }
    for (tag, bytes, d) in &strings {
        for bin in 0..n {
            let mut terms = vec![(b.id(d(bin)), 1)];
            terms.extend(bytes.iter().map(|&byte| (b.id(Var::X { byte, bin }), -1)));
            b.push(
                format!("fpup_{tag}_{bin}"),
                ConstraintFamily::FingerprintUpper,
                terms,
                Sense::Le,
                0,
            );
        }
    }

    for &(q, w) in pairs {
        let (query, word) = (q as usize, w as usize);
        for bin in 0..n {
            let z = b.id(Var::Z { query, word, bin });
            let dq = b.id(Var::DQuery { query, bin });
            let dw = b.id(Var::DWord { word, bin });
            b.push(
                format!("zq_{q}_{w}_{bin}"),
                ConstraintFamily::ZQuery,
                vec![(z, 1), (dq, -1)],
                Sense::Le,
                0,
            );
            b.push(
                format!("zw_{q}_{w}_{bin}"),
                ConstraintFamily::ZWord,
                vec![(z, 1), (dw, 1)],
                Sense::Le,
                1,
            );
            b.push(
                format!("zl_{q}_{w}_{bin}"),
                ConstraintFamily::ZLower,
                vec![(z, 1), (dq, -1), (dw, 1)],
                Sense::Ge,
                0,
            );
        }
    }
    for &(q, w) in pairs {
        let (query, word) = (q as usize, w as usize);
        let mut terms = vec![(b.id(Var::Eta { query, word }), 1)];
        terms.extend((0..n).map(|bin| (b.id(Var::Z { query, word, bin }), -1)));
        b.push(
            format!("ceta_{q}_{w}"),
            ConstraintFamily::Eta,
            terms,
            Sense::Le,
            0,
        );
    }

    let mut var_counts = VarCounts::default();
    for v in &b.vars {
        match v {
            Var::X { .. } => var_counts.x += 1,
            Var::DWord { .. } | Var::DQuery { .. } => var_counts.d += 1,
            Var::Eta { .. } => var_counts.eta += 1,
            Var::Z { .. } => var_counts.z += 1,
        }
    }
    let mut constraint_counts = ConstraintCounts::default();
    for c in &b.constraints {
        match c.family {
            ConstraintFamily::Assignment => constraint_counts.assignment += 1,
            ConstraintFamily::FingerprintLower => constraint_counts.fingerprint_lower += 1,
            ConstraintFamily::FingerprintUpper => constraint_counts.fingerprint_upper += 1,
            ConstraintFamily::ZQuery | ConstraintFamily::ZWord | ConstraintFamily::ZLower => {
                constraint_counts.linearization += 1
            }
            ConstraintFamily::Eta => constraint_counts.eta += 1,
        }
    }
    let names = b
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.to_string(), i))
        .collect();

    Ok(ModelInstance {
        alphabet: inst.alphabet().clone(),
        width: n,
        vars: b.vars,
        index: b.index,
        names,
        constraints: b.constraints,
        objective,
        var_counts,
        constraint_counts,
    })
}

const TERMS_PER_LINE: usize = 8;

fn write_terms<W: Write>(out: &mut W, vars: &[Var], terms: &[(usize, i32)]) -> io::Result<()> {
    for (i, &(v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            write!(out, "\n   ")?;
        }
        let sign = if c < 0 {
            "-"
        } else if i > 0 {
            "+"
        } else {
            ""
        };
        let mag = c.unsigned_abs();
        let sep = if i > 0 { " " } else { "" };
        match (sign.is_empty(), mag) {
            (true, 1) => write!(out, "{sep}{}", vars[v])?,
            (true, _) => write!(out, "{sep}{mag} {}", vars[v])?,
            (false, 1) => write!(out, "{sep}{sign} {}", vars[v])?,
            (false, _) => write!(out, "{sep}{sign} {mag} {}", vars[v])?,
        }
    }
    Ok(())
}

impl ModelInstance {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Indices of the `eta` variables; the objective is their sum.
    pub fn objective_vars(&self) -> &[usize] {
        &self.objective
    }

    pub fn var_counts(&self) -> VarCounts {
        self.var_counts
    }

    pub fn constraint_counts(&self) -> ConstraintCounts {
        self.constraint_counts
    }

    pub fn var_index(&self, v: Var) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.names.get(name).map(|&i| self.vars[i])
    }

    /// The 0/1 point induced by `partition`: `x` from the bins, `d` as the
    /// fingerprints, `z = d_q (1 - d_w)`, and `eta` set wherever the pair is
    /// classified correctly.
    pub fn assignment_for(&self, partition: &Partition, inst: &TrainingInstance) -> Vec<u8> {
        let word_fp: Vec<u64> = (0..inst.words().len())
            .map(|i| partition.mask_of(inst.word_bytes(i)))
            .collect();
        let query_fp: Vec<u64> = (0..inst.queries().len())
            .map(|i| partition.mask_of(inst.query_bytes(i)))
            .collect();
        let bit = |m: u64, j: usize| (m >> j & 1) as u8;
        self.vars
            .iter()
            .map(|v| match *v {
                Var::X { byte, bin } => (partition.bin_of(byte) == bin) as u8,
                Var::DWord { word, bin } => bit(word_fp[word], bin),
                Var::DQuery { query, bin } => bit(query_fp[query], bin),
                Var::Eta { query, word } => (query_fp[query] & !word_fp[word] != 0) as u8,
                Var::Z { query, word, bin } => {
                    bit(query_fp[query], bin) & (1 - bit(word_fp[word], bin))
                }
            })
            .collect()
    }

    /// Writes CPLEX LP format. `header` lines become `\` comments.
    pub fn write_lp<W: Write>(&self, mut out: W, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(out, "\\ {k}={v}")?;
        }
        writeln!(out, "Maximize")?;
        if self.objective.is_empty() {
            writeln!(out, " obj: 0")?;
        } else {
            write!(out, " obj: ")?;
            let terms: Vec<(usize, i32)> = self.objective.iter().map(|&v| (v, 1)).collect();
            write_terms(&mut out, &self.vars, &terms)?;
            writeln!(out)?;
        }
        writeln!(out, "Subject To")?;
        for c in &self.constraints {
            write!(out, " {}: ", c.name)?;
            write_terms(&mut out, &self.vars, &c.terms)?;
            writeln!(out, " {} {}", c.sense.symbol(), c.rhs)?;
        }
        writeln!(out, "Binary")?;
        for chunk in self.vars.chunks(TERMS_PER_LINE) {
            let names: Vec<String> = chunk.iter().map(Var::to_string).collect();
            writeln!(out, " {}", names.join(" "))?;
        }
        writeln!(out, "End")
    }

    pub fn lp_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_lp(&mut buf, &[]).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Writes `model` in LP format to `sink`.
pub fn export_lp<W: Write>(model: &ModelInstance, sink: W) -> Result<()> {
    model.write_lp(sink, &[])?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_letter_instance, split_partition};

    #[test]
    fn four_letter_counts() {
        let inst = four_letter_instance();
        let m = build_mip(&inst).unwrap();
        assert_eq!(
            m.var_counts(),
            VarCounts {
                x: 8,
                d: 8,
                eta: 2,
                z: 4
            }
        );
        assert_eq!(m.var_counts().total(), 22);
        assert_eq!(
            m.constraint_counts(),
            ConstraintCounts {
                assignment: 4,
                fingerprint_lower: 12,
                fingerprint_upper: 8,
                linearization: 12,
                eta: 2
            }
        );
        assert_eq!(m.constraint_counts().total(), 38);
    }

    #[test]
    fn no_negative_pairs_means_no_eta() {
        let inst = TrainingInstance::new(
            vec![b"ab".to_vec(), b"ba".to_vec()],
            vec![b"a".to_vec()],
            "chars:ab".parse().unwrap(),
            2,
        )
        .unwrap();
        let m = build_mip(&inst).unwrap();
        assert_eq!(m.var_counts().eta, 0);
        assert_eq!(m.var_counts().z, 0);
        assert!(m.objective_vars().is_empty());
        assert!(m.lp_text().contains("Maximize\n obj: 0\n"));
    }

    #[test]
    fn empty_queries_give_constant_objective() {
        let inst =
            TrainingInstance::new(vec![b"ab".to_vec()], vec![], "chars:ab".parse().unwrap(), 2)
                .unwrap();
        let text = build_mip(&inst).unwrap().lp_text();
        assert!(
            text.starts_with("Maximize\n obj: 0\nSubject To\n assign_97: x_97_0 + x_97_1 = 1\n")
        );
    }

    #[test]
    fn repeated_letters_counted_once() {
        let inst = TrainingInstance::new(
            vec![b"aaab".to_vec()],
            vec![],
            "chars:ab".parse().unwrap(),
            3,
        )
        .unwrap();
        let m = build_mip(&inst).unwrap();
        assert_eq!(m.constraint_counts().fingerprint_lower, 2 * 3);
    }

    #[test]
    fn rejects_empty_strings() {
        let inst = TrainingInstance::new(
            vec![b"ab".to_vec(), vec![]],
            vec![],
            "chars:ab".parse().unwrap(),
            2,
        )
        .unwrap();
        assert!(matches!(
            build_mip(&inst),
            Err(Error::EmptyModelString {
                role: "word",
                index: 1
            })
        ));
        let inst = TrainingInstance::new(
            vec![b"ab".to_vec()],
            vec![vec![]],
            "chars:ab".parse().unwrap(),
            2,
        )
        .unwrap();
        assert!(matches!(
            build_mip(&inst),
            Err(Error::EmptyModelString {
                role: "query",
                index: 0
            })
        ));
    }

    #[test]
    fn induced_point_is_feasible() {
        let inst = four_letter_instance();
        let m = build_mip(&inst).unwrap();
        for p in [
            split_partition(),
            Partition::round_robin(inst.alphabet(), 2).unwrap(),
        ] {
            let values = m.assignment_for(&p, &inst);
            assert!(m.constraints().iter().all(|c| c.is_satisfied(&values)));
            let eta: u64 = m.objective_vars().iter().map(|&v| values[v] as u64).sum();
            assert_eq!(eta, inst.objective(&p).unwrap().correct);
        }
    }

    #[test]
    fn names_and_layout() {
        let inst = four_letter_instance();
        let m = build_mip(&inst).unwrap();
        let text = m.lp_text();
        assert!(text.contains(" obj: eta_0_1 + eta_1_0\n"));
        assert!(text.contains(" fplo_w0_97_1: x_97_1 - d_w0_1 <= 0\n"));
        assert!(text.contains(" fpup_q1_0: d_q1_0 - x_99_0 <= 0\n"));
        assert!(text.contains(" zw_0_1_0: z_0_1_0 + d_w1_0 <= 1\n"));
        assert!(text.contains(" zl_0_1_0: z_0_1_0 - d_q0_0 + d_w1_0 >= 0\n"));
        assert!(text.contains(" ceta_1_0: eta_1_0 - z_1_0_0 - z_1_0_1 <= 0\n"));
        assert!(text.ends_with("End\n"));
        assert_eq!(
            m.var_by_name("z_1_0_1"),
            Some(Var::Z {
                query: 1,
                word: 0,
                bin: 1
            })
        );
        assert_eq!(m.var_by_name("x_300_0"), None);
    }
}
