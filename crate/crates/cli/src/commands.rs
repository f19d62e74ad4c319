use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use strfp::evaluation::{bench_scan, evaluate, write_bench_csv, FingerprintColumn};
use strfp::optimizer::{
    build_mip, exact_solve, import_solution as import, local_search, Init, LocalSearchConfig,
    ModelInstance, SolveTrace, TrainingInstance,
};
use strfp::workload::{Corpus, Role, Workload};
use strfp::{Partition, Provenance};

use crate::config::RunConfig;
use crate::UsageError;

type Header = Vec<(String, String)>;

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_owned(), v.to_string())
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_corpus(cfg: &RunConfig) -> anyhow::Result<Corpus> {
    let path = cfg.require(&cfg.opts.corpus, "corpus")?;
    let corpus = Corpus::load(open(path)?, cfg.alphabet.clone(), cfg.policy)
        .with_context(|| format!("reading corpus {}", path.display()))?;
    eprintln!(
        "corpus: {} rows kept, {} dropped",
        corpus.len(),
        corpus.dropped_count()
    );
    Ok(corpus)
}

fn load_workload(cfg: &RunConfig) -> anyhow::Result<Workload> {
    let path = cfg.require(&cfg.opts.workload, "workload")?;
    Ok(Workload::read_tsv(open(path)?)
        .with_context(|| format!("reading workload {}", path.display()))?)
}

fn load_partition(cfg: &RunConfig) -> anyhow::Result<Partition> {
    let path = cfg.require(&cfg.opts.partition, "partition")?;
    let p = Partition::read_from(open(path)?)
        .with_context(|| format!("reading partition {}", path.display()))?;
    if cfg.opts.bits.is_some_and(|b| b != p.width()) {
        return Err(strfp::Error::WidthMismatch {
            left: cfg.bits,
            right: p.width(),
        })
        .with_context(|| format!("--bits disagrees with {}", path.display()));
    }
    Ok(p)
}

fn corpus_header(cfg: &RunConfig, corpus: &Corpus) -> Header {
    vec![
        kv("alphabet", &cfg.alphabet),
        kv("policy", cfg.opts.policy.as_deref().unwrap_or("drop-row")),
        kv("corpus_rows", corpus.len()),
        kv("dropped_rows", corpus.dropped_count()),
    ]
}

fn training_header(cfg: &RunConfig, workload: &Workload) -> Header {
    let mut h = vec![
        kv("bits", cfg.bits),
        kv("block", cfg.block),
        kv("sample", cfg.sample),
        kv("sample_seed", cfg.sample_seed),
    ];
    if let Some(s) = workload.seed {
        h.push(kv("split_seed", s));
    }
    h
}

fn search_header(cfg: &RunConfig) -> Header {
    let mut h = vec![
        kv("seed", cfg.seed),
        kv("time_limit_s", cfg.time_limit.as_secs_f64()),
    ];
    if let Some(i) = cfg.iters {
        h.push(kv("iters", i));
    }
    h.push(kv(
        "init",
        cfg.opts.init.as_deref().unwrap_or("round-robin"),
    ));
    h.push(kv(
        "tie_break",
        cfg.opts.tie_break.as_deref().unwrap_or("sample-grams"),
    ));
    h.push(kv("exact", cfg.opts.exact));
    h
}

pub fn workload(cfg: &RunConfig) -> anyhow::Result<()> {
    let corpus = load_corpus(cfg)?;
    let w = Workload::generate(&corpus, &cfg.ks, cfg.per_class)?.split(cfg.seen, cfg.split_seed)?;
    let mut header = corpus_header(cfg, &corpus);
    header.extend([
        kv("ks", cfg.ks_text()),
        kv("per_class", cfg.per_class),
        kv("seen", cfg.seen),
        kv("split_seed", cfg.split_seed),
    ]);
    let mut out = create(cfg.opts.out.as_deref())?;
    w.write_tsv(&mut out, &header)?;
    out.flush()?;
    eprintln!(
        "workload: {} queries, {} seen",
        w.len(),
        w.with_role(Role::Seen).count()
    );
    Ok(())
}

fn training_instance(cfg: &RunConfig) -> anyhow::Result<(TrainingInstance, Workload)> {
    let corpus = load_corpus(cfg)?;
    let workload = load_workload(cfg)?;
    let sample = corpus.sample_training(cfg.block, cfg.sample, cfg.sample_seed)?;
    let seen: Vec<Vec<u8>> = workload
        .with_role(Role::Seen)
        .map(|q| q.pattern.clone())
        .collect();
    let inst = TrainingInstance::from_corpus(&sample, seen, cfg.bits)?;
    eprintln!(
        "instance: {} words, {} seen queries, {} negative pairs",
        inst.words().len(),
        inst.queries().len(),
        inst.negative_pairs().len()
    );
    Ok((inst, workload))
}

fn with_meta(p: Partition, extra: &Header) -> Partition {
    let mut prov: Provenance = p.provenance().clone();
    for (k, v) in extra {
        prov.meta.entry(k.clone()).or_insert_with(|| v.clone());
    }
    p.with_provenance(prov)
}

pub fn train(cfg: &RunConfig) -> anyhow::Result<()> {
    let (inst, workload) = training_instance(cfg)?;
    let (partition, trace): (Partition, SolveTrace) = if cfg.opts.exact {
        exact_solve(&inst)?
    } else {
        let init = match cfg.opts.init.as_deref().unwrap_or("round-robin") {
            "round-robin" => Init::RoundRobin,
            "random" => Init::Random,
            path => Init::Given(
                Partition::read_from(open(Path::new(path))?)
                    .with_context(|| format!("reading initial partition {path}"))?,
            ),
        };
        let ls = LocalSearchConfig {
            time_limit: cfg.time_limit,
            seed: cfg.seed,
            max_evaluations: cfg.iters,
            init,
            tie_break: cfg.tie_break,
        };
        local_search(&inst, &ls)?
    };
    let header = training_header(cfg, &workload);
    let partition = with_meta(partition, &header);

    let mut out = create(cfg.opts.out.as_deref())?;
    partition.write_to(&mut out)?;
    out.flush()?;
    if let Some(path) = &cfg.opts.trace {
        let mut header = header.clone();
        header.extend(search_header(cfg));
        let mut t = create(Some(path))?;
        trace.write_csv(&mut t, &header)?;
        t.flush()?;
    }
    let best = trace
        .best()
        .expect("trace holds the initial incumbent")
        .objective;
    eprintln!(
        "train: objective {} of {} (training FPR {:.4}), status {}, {} evaluations",
        best.correct,
        best.total_negatives,
        best.fpr(),
        trace.status,
        trace.evaluations
    );
    Ok(())
}

pub fn baseline(cfg: &RunConfig) -> anyhow::Result<()> {
    let p = Partition::round_robin(&cfg.alphabet, cfg.bits)?;
    let mut out = create(cfg.opts.out.as_deref())?;
    p.write_to(&mut out)?;
    out.flush()?;
    Ok(())
}

fn model(cfg: &RunConfig) -> anyhow::Result<(ModelInstance, TrainingInstance, Workload)> {
    let (inst, workload) = training_instance(cfg)?;
    let m = build_mip(&inst)?;
    Ok((m, inst, workload))
}

pub fn export_lp(cfg: &RunConfig) -> anyhow::Result<()> {
    let (m, _, workload) = model(cfg)?;
    let mut header = training_header(cfg, &workload);
    header.push(kv("alphabet", m.alphabet()));
    let mut out = create(cfg.opts.out.as_deref())?;
    m.write_lp(&mut out, &header)?;
    out.flush()?;
    let (v, c) = (m.var_counts(), m.constraint_counts());
    eprintln!(
        "model: {} variables (x {}, d {}, eta {}, z {}), {} constraints",
        v.total(),
        v.x,
        v.d,
        v.eta,
        v.z,
        c.total()
    );
    Ok(())
}

pub fn import_solution(cfg: &RunConfig) -> anyhow::Result<()> {
    let (m, inst, workload) = model(cfg)?;
    let path = cfg.require(&cfg.opts.solution, "solution")?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading solution {}", path.display()))?;
    let p = import(&m, &text).with_context(|| format!("importing {}", path.display()))?;
    let p = with_meta(p, &training_header(cfg, &workload));
    let obj = inst.objective(&p)?;
    let mut out = create(cfg.opts.out.as_deref())?;
    p.write_to(&mut out)?;
    out.flush()?;
    eprintln!(
        "import: objective {} of {} (training FPR {:.4})",
        obj.correct,
        obj.total_negatives,
        obj.fpr()
    );
    Ok(())
}

fn eval_header(cfg: &RunConfig, corpus: &Corpus, p: &Partition) -> Header {
    let mut h = corpus_header(cfg, corpus);
    h.push(kv("bits", p.width()));
    h.push(kv("partition", p.provenance().kind));
    for (k, v) in &p.provenance().meta {
        h.push(kv(&format!("partition.{k}"), v));
    }
    h
}

pub fn eval(cfg: &RunConfig) -> anyhow::Result<()> {
    let corpus = load_corpus(cfg)?;
    let p = load_partition(cfg)?;
    let workload = load_workload(cfg)?;
    let report = evaluate(&corpus, &p, &workload);
    let mut header = eval_header(cfg, &corpus, &p);
    for role in [Role::Seen, Role::Unseen] {
        let agg = report.aggregate(role);
        header.push(kv(
            &format!("aggregate_fpr_{role}"),
            format!("{:.6}", agg.fpr()),
        ));
        eprintln!("{role}: {} queries, pair FPR {:.6}", agg.queries, agg.fpr());
    }
    let mut out = create(cfg.opts.out.as_deref())?;
    report.write_csv(&mut out, &header)?;
    out.flush()?;
    if let Some(path) = &cfg.opts.dump_column {
        let mut d = create(Some(path))?;
        FingerprintColumn::build(&corpus, &p).write_dump(&mut d)?;
        d.flush()?;
    }
    Ok(())
}

pub fn bench(cfg: &RunConfig) -> anyhow::Result<()> {
    if cfg.repeats == 0 {
        anyhow::bail!(UsageError("--repeats must be at least 1".into()));
    }
    let corpus = load_corpus(cfg)?;
    let p = load_partition(cfg)?;
    let workload = load_workload(cfg)?;
    let rows = bench_scan(&corpus, &p, &workload, cfg.repeats)?;
    let mut header = eval_header(cfg, &corpus, &p);
    header.push(kv("repeats", cfg.repeats));
    for role in [Role::Seen, Role::Unseen] {
        let (full, filtered) = rows
            .iter()
            .filter(|r| r.query.role == role)
            .fold((0.0, 0.0), |(a, b), r| {
                (a + r.t_full.as_secs_f64(), b + r.t_filtered.as_secs_f64())
            });
        if filtered > 0.0 {
            eprintln!(
                "{role}: total full {:.2} ms, filtered {:.2} ms, speedup {:.3}x",
                full * 1e3,
                filtered * 1e3,
                full / filtered
            );
        }
    }
    let mut out = create(cfg.opts.out.as_deref())?;
    write_bench_csv(&rows, &mut out, &header)?;
    out.flush()?;
    Ok(())
}
