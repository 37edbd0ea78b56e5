use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use groundfact_checker::{check_batch_llm, ThresholdPolicy};
use groundfact_core::{BenchRow, EvidenceDoc, GroundedClaim, Split, SupportLabel};
use groundfact_llm::{Gateway, GatewayConfig, PriceTable};
use groundfact_synth::batch::{c2d_batch, c2d_simp_batch, d2c_batch, d2c_simp_batch, BatchReport};
use groundfact_synth::c2d::{C2dClaim, C2dConfig};
use groundfact_synth::d2c::{D2cConfig, SourceDoc};
use groundfact_synth::export::write_jsonl;
use serde::Serialize;
use serde_json::json;

use crate::cli::*;
use crate::engine::{Engine, RecordOptions};
use crate::eval::{attach_bootstrap, evaluate, EvalOptions, EvalReport};
use crate::ingest::{ingest, render_stats, stats};
use crate::io::{read_bench, read_jsonl, read_to_string, sha256_hex, sibling, to_jsonl, write_file};
use crate::manifest::RunManifest;
use crate::report::render_table;
use crate::split::split_by_dataset;
use crate::tune::{tune, ThresholdFile};
use crate::BenchError;

struct LoadedGateway {
    gateway: Arc<Gateway>,
    prices: PriceTable,
    digest: String,
}

fn load_gateway(path: &Path) -> Result<LoadedGateway, BenchError> {
    let cfg = GatewayConfig::load(path)?;
    Ok(LoadedGateway {
        gateway: Arc::new(cfg.build()?),
        prices: cfg.prices.clone(),
        digest: cfg.digest(),
    })
}

fn settings_digest(value: &impl Serialize) -> String {
    sha256_hex(serde_json::to_string(value).expect("settings serialize").as_bytes())[..16].to_string()
}

fn engine_for(args: &CheckerArgs) -> Result<(Engine, Option<String>), BenchError> {
    let gateway = args.gateway.as_deref().map(load_gateway).transpose()?;
    let digest = gateway.as_ref().map(|g| g.digest.clone());
    let engine = Engine::from_spec(
        &args.checker,
        gateway.map(|g| (g.gateway, g.prices)),
        args.plan,
        Duration::from_secs(args.timeout_secs),
    )?;
    Ok((engine, digest))
}

/// Dispatches a parsed command line. `argv` is recorded in run manifests.
pub fn run(cli: Cli, argv: Vec<String>) -> Result<(), BenchError> {
    match cli.command {
        Command::Ingest(a) => cmd_ingest(a, argv),
        Command::Split(a) => cmd_split(a, argv),
        Command::Synth(s) => cmd_synth(s, argv),
        Command::Tune(a) => cmd_tune(a, argv),
        Command::Check(a) => cmd_check(a),
        Command::Eval(a) => cmd_eval(a, argv),
        Command::Report(a) => cmd_report(a),
        Command::AnnotateServe(a) => cmd_annotate(a),
    }
}

fn cmd_ingest(a: IngestArgs, argv: Vec<String>) -> Result<(), BenchError> {
    let mut manifest = RunManifest::start(argv, settings_digest(&json!({"dataset": a.dataset})));
    for p in &a.inputs {
        manifest.input(p)?;
    }
    let records = ingest(&a.inputs, a.dataset.as_deref())?;
    let rows: Vec<BenchRow> = records.iter().map(BenchRow::from_unsplit).collect();
    write_file(&a.out, &to_jsonl(&rows))?;
    let table = render_stats(&stats(&records));
    print!("{table}");
    manifest.finish(&[&a.out])?;
    Ok(())
}

fn cmd_split(a: SplitArgs, argv: Vec<String>) -> Result<(), BenchError> {
    let mut manifest =
        RunManifest::start(argv, settings_digest(&json!({"fraction": a.fraction}))).seed("split", a.seed);
    manifest.input(&a.input)?;
    let mut unsplit = Vec::new();
    for (line, row) in read_jsonl::<BenchRow>(&a.input)? {
        unsplit.push(row.into_unsplit().map_err(|e| BenchError::Schema {
            path: a.input.clone(),
            line,
            message: e.to_string(),
        })?);
    }
    let records = split_by_dataset(unsplit, a.seed, a.fraction)?;
    let rows: Vec<BenchRow> = records.iter().map(BenchRow::from_record).collect();
    write_file(&a.out, &to_jsonl(&rows))?;
    let validation = records.iter().filter(|r| r.split == Split::Validation).count();
    println!("validation {validation}, test {}", records.len() - validation);
    manifest.finish(&[&a.out])?;
    Ok(())
}

fn cmd_tune(a: TuneArgs, argv: Vec<String>) -> Result<(), BenchError> {
    let (engine, gw_digest) = engine_for(&a.checker)?;
    let settings = json!({"checker": engine.identity(), "plan": a.checker.plan, "gateway": gw_digest});
    let mut manifest = RunManifest::start(argv, settings_digest(&settings))
        .backend(engine.gateway.as_ref().map(|g| g.backend_identity()));
    manifest.input(&a.bench)?;
    let records = read_bench(&a.bench)?;
    let file = tune(&engine, &records, a.workers)?;
    file.save(&a.out)?;
    for (ds, e) in &file.thresholds {
        println!(
            "{ds}: t={} validation BAcc {:.4} (midpoint {:.4})",
            e.threshold, e.validation_bacc, e.midpoint_bacc
        );
    }
    manifest.finish(&[&a.out])?;
    Ok(())
}

fn cmd_eval(a: EvalArgs, argv: Vec<String>) -> Result<(), BenchError> {
    let (engine, gw_digest) = engine_for(&a.checker)?;
    let thresholds = a.thresholds.as_deref().map(ThresholdFile::load).transpose()?;
    let opts = EvalOptions {
        split: a.split,
        workers: a.workers,
        policy: a.policy.clone(),
        record: RecordOptions {
            decompose: a.decompose,
            decontextualize: a.decontextualize,
        },
    };
    let settings = json!({
        "checker": engine.identity(),
        "plan": a.checker.plan,
        "policy": a.policy,
        "split": a.split,
        "decompose": a.decompose,
        "decontextualize": a.decontextualize,
        "gateway": gw_digest,
        "bootstrap_runs": a.champion.as_ref().map(|_| a.bootstrap_runs),
        "alpha": a.alpha,
    });
    let mut manifest = RunManifest::start(argv, settings_digest(&settings))
        .backend(engine.gateway.as_ref().map(|g| g.backend_identity()));
    if a.champion.is_some() {
        manifest = manifest.seed("bootstrap", a.seed);
    }
    manifest.input(&a.bench)?;
    for p in a.thresholds.iter().chain(a.champion.iter()) {
        manifest.input(p)?;
    }

    let records = read_bench(&a.bench)?;
    let mut report = evaluate(&engine, &records, &opts, thresholds.as_ref())?;
    if let Some(path) = &a.champion {
        let champion = EvalReport::load(path)?;
        attach_bootstrap(&mut report, &champion, a.bootstrap_runs, a.seed, a.alpha)?;
    }
    report.save(&a.out)?;
    print!("{}", render_table(&[(report_label(&a.out), &report)]));
    manifest.finish(&[&a.out])?;
    Ok(())
}

fn report_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_report(a: ReportArgs) -> Result<(), BenchError> {
    let loaded: Vec<(String, EvalReport)> = a
        .inputs
        .iter()
        .map(|p| Ok((report_label(p), EvalReport::load(p)?)))
        .collect::<Result<_, BenchError>>()?;
    let rows: Vec<(String, &EvalReport)> = loaded.iter().map(|(l, r)| (l.clone(), r)).collect();
    let table = render_table(&rows);
    match &a.out {
        Some(out) => write_file(out, table.as_bytes())?,
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<(), BenchError> {
    let (engine, _) = engine_for(&a.checker)?;
    let texts: Vec<String> = a.docs.iter().map(|p| read_to_string(p)).collect::<Result<_, _>>()?;
    let evidence: Vec<EvidenceDoc> = texts
        .iter()
        .zip(&a.docs)
        .map(|(t, p)| EvidenceDoc::new(p.display().to_string(), t.clone()))
        .collect::<Result<_, _>>()?;

    if let Some(path) = &a.claims {
        if evidence.len() != 1 {
            return Err(BenchError::Usage("--claims checks against exactly one --doc".into()));
        }
        let claims: Vec<String> = read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        let gw = engine.gateway("--claims")?;
        let labels = check_batch_llm(gw, &evidence[0].text, &claims)?;
        for (claim, label) in claims.iter().zip(labels) {
            println!("{}", json!({"claim": claim, "label": label}));
        }
        return Ok(());
    }

    let claim = a.claim.clone().unwrap_or_default();
    let thresholds = a.thresholds.as_deref().map(ThresholdFile::load).transpose()?;
    let dataset = match &a.policy {
        crate::engine::PolicyChoice::Tuned { dataset: Some(d) } => d.clone(),
        crate::engine::PolicyChoice::Tuned { dataset: None } => {
            return Err(BenchError::Usage("check needs --policy tuned:DATASET".into()))
        }
        _ => String::new(),
    };
    let policy: ThresholdPolicy = a
        .policy
        .resolve([dataset.as_str()], thresholds.as_ref(), &engine)?
        .remove(&dataset)
        .expect("one policy per dataset");
    let grounded = GroundedClaim::new("cli", claim, Vec::new(), evidence, "cli")?;
    let record = groundfact_core::UnsplitRecord {
        dataset,
        grounded,
        gold: SupportLabel::Unsupported,
        raw_label: String::new(),
    }
    .with_split(Split::Test);
    let result = engine
        .evaluate_record(
            &record,
            &policy,
            RecordOptions {
                decompose: a.decompose,
                decontextualize: false,
            },
        )
        .map_err(|source| BenchError::Record {
            id: "cli".into(),
            source,
        })?;
    let mut out = json!({
        "claim": record.grounded.text,
        "checker": engine.identity(),
        "score": result.score,
        "threshold": result.threshold,
        "label": result.pred,
    });
    if let Some(facts) = result.facts {
        out["facts"] = json!(facts);
    }
    println!("{out}");
    Ok(())
}

fn synth_outputs(report: &BatchReport, common: &SynthCommon, extra: serde_json::Value) -> Result<PathBuf, BenchError> {
    let mut buf = Vec::new();
    write_jsonl(&report.tuples, common.seed, &mut buf).map_err(|source| BenchError::Write {
        path: common.out.clone(),
        source,
    })?;
    write_file(&common.out, &buf)?;
    let stats_path = sibling(&common.out, ".stats.json");
    let mut stats = json!({
        "tuples": report.tuples.len(),
        "rejections": report.stats,
        "dropped": report.dropped,
        "failed": report.failed,
    });
    if let serde_json::Value::Object(m) = extra {
        for (k, v) in m {
            stats[k] = v;
        }
    }
    let mut text = serde_json::to_string_pretty(&stats).expect("stats serialize");
    text.push('\n');
    write_file(&stats_path, text.as_bytes())?;
    eprintln!(
        "{} tuple(s), {} dropped, {} failed -> {}",
        report.tuples.len(),
        report.dropped.len(),
        report.failed.len(),
        common.out.display()
    );
    Ok(stats_path)
}

fn read_inputs<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, BenchError> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, v)| v).collect())
}

fn cmd_synth(s: SynthCommand, argv: Vec<String>) -> Result<(), BenchError> {
    let splitter = groundfact_core::text::RuleSplitter;
    let (common, input, settings) = match &s {
        SynthCommand::C2d {
            claims,
            attempts,
            atom_cap,
            common,
        } => (common, claims, json!({"pipeline": "c2d", "attempts": attempts, "atom_cap": atom_cap})),
        SynthCommand::D2c { docs, atom_cap, common } => (common, docs, json!({"pipeline": "d2c", "atom_cap": atom_cap})),
        SynthCommand::C2dSimp { claims, common } => (common, claims, json!({"pipeline": "c2d-simp"})),
        SynthCommand::D2cSimp { docs, common } => (common, docs, json!({"pipeline": "d2c-simp"})),
    };
    let gw = load_gateway(&common.gateway)?;
    let mut settings = settings;
    settings["gateway"] = json!(gw.digest);
    let mut manifest = RunManifest::start(argv, settings_digest(&settings))
        .seed("shuffle", common.seed)
        .backend(Some(gw.gateway.backend_identity()));
    manifest.input(input)?;
    manifest.input(&common.gateway)?;

    let (report, total) = match &s {
        SynthCommand::C2d { attempts, atom_cap, .. } => {
            let claims: Vec<C2dClaim> = read_inputs(input)?;
            let cfg = C2dConfig {
                attempts: *attempts,
                atom_cap: *atom_cap,
            };
            (c2d_batch(&gw.gateway, &claims, &cfg, common.workers), claims.len())
        }
        SynthCommand::D2c { atom_cap, .. } => {
            let docs: Vec<SourceDoc> = read_inputs(input)?;
            let cfg = D2cConfig { atom_cap: *atom_cap };
            (d2c_batch(&gw.gateway, &docs, &splitter, &cfg, common.workers).0, docs.len())
        }
        SynthCommand::C2dSimp { .. } => {
            let claims: Vec<C2dClaim> = read_inputs(input)?;
            (c2d_simp_batch(&gw.gateway, &claims, common.workers), claims.len())
        }
        SynthCommand::D2cSimp { .. } => {
            let docs: Vec<SourceDoc> = read_inputs(input)?;
            (d2c_simp_batch(&gw.gateway, &docs, &splitter, common.workers), docs.len())
        }
    };
    let usage = gw.gateway.ledger().snapshot();
    let stats_path = synth_outputs(&report, common, json!({"usage": usage}))?;
    manifest.finish(&[&common.out, &stats_path])?;
    if let Some((id, err)) = report.failed.first() {
        return Err(BenchError::Synth {
            failed: report.failed.len(),
            total,
            first: format!("{id}: {err}"),
        });
    }
    Ok(())
}

fn cmd_annotate(a: AnnotateArgs) -> Result<(), BenchError> {
    let config = groundfact_annotate::AnnotateConfig::load(&a.config)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| BenchError::Annotate(e.into()))?;
    runtime.block_on(groundfact_annotate::serve(config, a.addr))?;
    Ok(())
}
