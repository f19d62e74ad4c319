mod common;

use std::io::Cursor;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strfp::evaluation::evaluate;
use strfp::optimizer::{build_mip, exact_solve, import_solution, objective};
use strfp::workload::{Corpus, FreqClass, Query, Role, RowPolicy, Workload};
use strfp::{Alphabet, Partition, Provenance, ProvenanceKind};

use common::*;

fn arb_partition() -> impl Strategy<Value = Partition> {
    (1usize..=64, prop::collection::vec(any::<u8>(), 256), any::<bool>()).prop_map(
        |(width, bins, printable)| {
            let alphabet = if printable {
                Alphabet::printable_ascii()
            } else {
                Alphabet::all_bytes()
            };
            let prov = Provenance::new(ProvenanceKind::LocalSearch)
                .with("seed", 7)
                .with("note", "x");
            Partition::from_fn(alphabet, width, prov, |b| {
                bins[b as usize] as usize % width
            })
            .unwrap()
        },
    )
}

fn arb_query() -> impl Strategy<Value = Query> {
    (
        prop::collection::vec(any::<u8>(), 1..12),
        1usize..=10,
        prop::sample::select(vec![FreqClass::High, FreqClass::Mid, FreqClass::Low]),
        prop::sample::select(vec![Role::Seen, Role::Unseen]),
    )
        .prop_map(|(pattern, k, class, role)| Query {
            pattern,
            k,
            class,
            role,
        })
}

proptest! {
    #[test]
    fn partition_file_round_trip(p in arb_partition()) {
        let back = Partition::read_from(Cursor::new(p.to_text())).unwrap();
        prop_assert!(back.same_bins(&p));
        prop_assert_eq!(back.width(), p.width());
        prop_assert_eq!(back.alphabet(), p.alphabet());
        prop_assert_eq!(back.provenance(), p.provenance());
    }

    #[test]
    fn workload_tsv_round_trip(
        queries in prop::collection::vec(arb_query(), 0..20),
        seed in any::<u64>(),
    ) {
        let w = Workload { queries, seed: Some(seed) };
        let mut buf = Vec::new();
        w.write_tsv(&mut buf, &[("k".into(), "v".into())]).unwrap();
        prop_assert_eq!(Workload::read_tsv(Cursor::new(buf)).unwrap(), w);
    }

    #[test]
    fn fingerprint_is_union_of_parts(
        p in arb_partition(),
        a in prop::collection::vec(any::<u8>(), 0..16),
        b in prop::collection::vec(any::<u8>(), 0..16),
    ) {
        let joined = [a.clone(), b.clone()].concat();
        prop_assert_eq!(
            p.fingerprint(&joined).bits(),
            p.fingerprint(&a).bits() | p.fingerprint(&b).bits()
        );
    }

    #[test]
    fn report_counts_are_consistent(
        p in arb_partition(),
        words in prop::collection::vec(prop::collection::vec(b'a'..=b'f', 1..8), 1..20),
        patterns in prop::collection::vec(prop::collection::vec(b'a'..=b'f', 1..4), 1..6),
    ) {
        let corpus = Corpus::from_words(words.clone(), Alphabet::printable_ascii(), RowPolicy::DropRow);
        let queries = patterns
            .iter()
            .map(|q| Query { pattern: q.clone(), k: q.len(), class: FreqClass::High, role: Role::Seen })
            .collect();
        let report = evaluate(&corpus, &p, &Workload { queries, seed: None });
        for (row, q) in report.rows.iter().zip(&patterns) {
            let truth = words.iter().filter(|w| naive_contains(w, q)).count();
            prop_assert_eq!(row.true_matches, truth);
            prop_assert!(row.candidates >= truth);
            prop_assert_eq!(row.false_positives, row.candidates - truth);
            let negatives = words.len() - truth;
            let fpr = if negatives == 0 { 0.0 } else { row.false_positives as f64 / negatives as f64 };
            prop_assert!((row.fpr - fpr).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_optimum_survives_lp_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let inst = random_tiny_instance(&mut rng);
        let (best, _) = exact_solve(&inst).unwrap();
        let model = build_mip(&inst).unwrap();
        let names: Vec<String> = model.vars().iter().map(|v| v.to_string()).collect();
        let solution: String = names
            .iter()
            .zip(model.assignment_for(&best, &inst))
            .map(|(n, v)| format!("{n} {v}\n"))
            .collect();
        let back = import_solution(&model, &solution).unwrap();
        assert!(back.same_bins(&best));
        assert_eq!(
            objective(&back, &inst).unwrap(),
            objective(&best, &inst).unwrap()
        );
    }
}

#[test]
fn lp_text_parses_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = random_tiny_instance(&mut rng);
    let model = build_mip(&inst).unwrap();
    let lp = parse_lp(&model.lp_text());
    assert!(lp.saw_end);
    assert_eq!(lp.binaries.len(), model.vars().len());
    assert_eq!(lp.constraints.len(), model.constraints().len());
    for (parsed, built) in lp.constraints.iter().zip(model.constraints()) {
        assert_eq!(parsed.name, built.name);
        assert_eq!(parsed.terms.len(), built.terms.len());
    }
}
