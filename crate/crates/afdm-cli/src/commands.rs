use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde_json::json;

use afdm_core::data::{
    balance_transactions, canonical_schema, parse_csv, to_features, write_csv, LabeledDataset,
    Transaction,
};
use afdm_core::eval::{
    compare, prequential_evaluate, render_table, ClassifierSpec, CostParams, EvalReport,
};
use afdm_core::snapshot::{build_incremental, ModelSnapshot};
use afdm_core::synth::{generate as synth_generate, GeneratorConfig};

use crate::{EvalArgs, GenerateArgs, PreprocessArgs, ScoreArgs, StreamArgs};

const DEFAULT_SEED: u64 = 42;

/// --seed flag, then the AFDM_SEED environment variable, then 42.
fn resolve_seed(flag: Option<u64>) -> anyhow::Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("AFDM_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| anyhow!("AFDM_SEED must be an integer, got `{text}`")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_weights(text: &str) -> anyhow::Result<CostParams> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("--weights expects \"w_fn,w_fp\", got `{text}`");
    }
    let w_fn: f64 = parts[0].trim().parse().context("bad w_fn")?;
    let w_fp: f64 = parts[1].trim().parse().context("bad w_fp")?;
    if w_fn < 0.0 || w_fp < 0.0 {
        bail!("weights must be non-negative");
    }
    Ok(CostParams { w_fn, w_fp })
}

/// Load a canonical CSV. Row errors abort unless `skip_bad_rows`, in which
/// case they are counted and reported on stderr.
fn load_transactions(path: &Path, skip_bad_rows: bool) -> anyhow::Result<Vec<Transaction>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let reader = parse_csv(BufReader::new(file))?;
    let mut txs = Vec::new();
    let mut skipped = 0u64;
    for row in reader {
        match row {
            Ok(tx) => txs.push(tx),
            Err(err) if skip_bad_rows && err.is_row_error() => skipped += 1,
            Err(err) => return Err(err.into()),
        }
    }
    if skipped > 0 {
        eprintln!("afdm: skipped {skipped} bad rows in {}", path.display());
    }
    Ok(txs)
}

fn to_dataset(txs: &[Transaction]) -> LabeledDataset {
    let schema = canonical_schema();
    let rows = txs.iter().map(|tx| to_features(tx, &schema)).collect();
    LabeledDataset::new(schema, rows).expect("encoded transactions conform")
}

pub fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut config: GeneratorConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).context("parsing generator config")?
        }
        None => GeneratorConfig {
            seed: resolve_seed(None)?,
            ..GeneratorConfig::default()
        },
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let txs = synth_generate(&config)?;
    let out = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&txs, out)?;
    let fraud = txs.iter().filter(|t| t.is_fraud).count();
    println!("rows={} fraud={}", txs.len(), fraud);
    Ok(())
}

pub fn preprocess(args: PreprocessArgs) -> anyhow::Result<()> {
    let seed = resolve_seed(args.seed)?;
    let txs = load_transactions(&args.data, args.skip_bad_rows)?;
    let kept = balance_transactions(&txs, args.ratio, seed)?;
    let out = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&kept, out)?;
    let fraud = kept.iter().filter(|t| t.is_fraud).count();
    println!(
        "rows={} fraud={} legal={} ratio={} seed={seed}",
        kept.len(),
        fraud,
        kept.len() - fraud,
        args.ratio
    );
    Ok(())
}

pub fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let seed = resolve_seed(args.seed)?;
    let weights = parse_weights(&args.weights)?;
    let specs: Vec<ClassifierSpec> = args
        .classifiers
        .split(',')
        .map(|name| {
            ClassifierSpec::from_cli_name(name.trim(), args.bag_size)
                .ok_or_else(|| anyhow!("unknown classifier `{}`", name.trim()))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut txs = load_transactions(&args.data, args.skip_bad_rows)?;
    if let Some(ratio) = args.balance {
        txs = balance_transactions(&txs, ratio, seed)?;
    }
    let ds = to_dataset(&txs);
    let reports = compare(&specs, &ds, args.k, seed, weights, args.shuffle_train)?;

    print!("{}", render_table(&reports));
    if let (Some(afdm), Some(tree)) = (find(&reports, "afdm"), find(&reports, "j48tree")) {
        println!(
            "informational: batch tree rmse <= afdm rmse: {} ({:.4} vs {:.4})",
            tree.rmse <= afdm.rmse,
            tree.rmse,
            afdm.rmse
        );
    }

    if let Some(out_path) = &args.out {
        let doc = json!({
            "data": args.data.display().to_string(),
            "k": args.k,
            "seed": seed,
            "weights": weights,
            "balance": args.balance,
            "shuffle_train": args.shuffle_train,
            "rows": reports,
        });
        let mut out = BufWriter::new(
            File::create(out_path).with_context(|| format!("creating {}", out_path.display()))?,
        );
        serde_json::to_writer_pretty(&mut out, &doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn find<'a>(reports: &'a [EvalReport], name: &str) -> Option<&'a EvalReport> {
    reports.iter().find(|r| r.classifier == name)
}

pub fn stream(args: StreamArgs) -> anyhow::Result<()> {
    let seed = resolve_seed(args.seed)?;
    let weights = parse_weights(&args.weights)?;
    let spec = ClassifierSpec::from_cli_name(&args.classifier, args.bag_size)
        .ok_or_else(|| anyhow!("unknown classifier `{}`", args.classifier))?;
    if !spec.is_incremental() {
        bail!("classifier `{}` is batch-only and cannot stream", args.classifier);
    }
    let txs = load_transactions(&args.data, args.skip_bad_rows)?;
    let schema = canonical_schema();
    let rows = txs.iter().map(|tx| to_features(tx, &schema));

    let mut model = build_incremental(&spec, schema.clone(), seed).expect("incremental spec");
    let started = Instant::now();
    let snapshots = prequential_evaluate(
        &mut model,
        rows,
        weights,
        args.report_every,
        spec.cli_name(),
        serde_json::to_value(&spec)?,
    )?;

    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let last = snapshots.len() - 1;
    for (i, snap) in snapshots.iter().enumerate() {
        let line = json!({
            "instances": snap.instances(),
            "final": i == last,
            "tp": snap.confusion.tp,
            "fp": snap.confusion.fp,
            "tn": snap.confusion.tn,
            "fn": snap.confusion.fn_,
            "accuracy": snap.accuracy,
            "detection_rate": snap.detection_rate,
            "precision": snap.precision,
            "f1": snap.f1,
            "rmse": snap.rmse,
            "cost": snap.cost,
            "elapsed_secs": snap.wall_clock_secs,
            "instances_per_sec": snap.instances_per_sec,
        });
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    eprintln!(
        "afdm: streamed {} instances in {:.3}s ({:.0} instances/sec)",
        txs.len(),
        started.elapsed().as_secs_f64(),
        snapshots[last].instances_per_sec
    );

    if let Some(path) = &args.snapshot_out {
        ModelSnapshot::capture(&model, &schema).save(path)?;
        eprintln!("afdm: snapshot written to {}", path.display());
    }
    Ok(())
}

pub fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let snapshot = ModelSnapshot::load(&args.snapshot)?;
    let schema = canonical_schema();
    if snapshot.schema != schema {
        bail!(
            "snapshot schema (trained on `{}`) does not match the canonical data schema",
            snapshot.schema.class_name()
        );
    }
    let model = snapshot.restore()?;
    let txs = load_transactions(&args.data, args.skip_bad_rows)?;
    let mut out = BufWriter::new(
        File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?,
    );
    writeln!(out, "row,p_fraud,verdict")?;
    for (i, tx) in txs.iter().enumerate() {
        let features = to_features(tx, &schema);
        let dist = model.predict_proba(&features)?;
        let verdict = u8::from(dist.p_fraud > args.threshold);
        // exponent form for tiny probabilities; both forms reparse exactly
        if dist.p_fraud < 1e-6 {
            writeln!(out, "{i},{:e},{verdict}", dist.p_fraud)?;
        } else {
            writeln!(out, "{i},{},{verdict}", dist.p_fraud)?;
        }
    }
    out.flush()?;
    println!("scored={} threshold={}", txs.len(), args.threshold);
    Ok(())
}
