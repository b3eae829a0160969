use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use biotok::analysis::{
    annotations, dissect_scores, overlap as vocab_overlap, seg_stats as stats_of, segment_annotations, task_token_set,
};
use biotok::bpe::{load_vocab, BpeVocab};
use biotok::ner::{parse_conll, read_conll, score, TaggedSentence};
use biotok::report::{
    aggregate_table, build_tables, per_type_table, plot_table, read_artifact, write_report, Artifact, Labeled,
    NerEvalReport, ARTIFACT_KINDS,
};
use log::debug;

use super::{create_output, dir_name, ensure_distinct, finish, non_empty, stem, to_json, write_text};
use crate::config::{pick, require, AnalysisSection, NerEvalSection, ReportFormat, ReportSection};
use crate::{AnalysisArgs, DissectArgs, NerEvalArgs, OverlapArgs, ReportArgs, SegStatsArgs, UsageError};

fn load(path: &Path) -> anyhow::Result<BpeVocab> {
    load_vocab(path).with_context(|| format!("cannot load vocabulary from {}", path.display()))
}

fn read_gold(path: &Path) -> anyhow::Result<Vec<TaggedSentence>> {
    Ok(parse_conll(path)?)
}

/// Labels and output directory shared by the analysis commands.
struct Common {
    vocab_dir: PathBuf,
    model: String,
    task: String,
    mode: biotok::ner::SchemeMode,
    out: Option<PathBuf>,
}

impl Common {
    /// Fail early, before other inputs are looked at, when no vocabulary is set.
    fn check_vocab(args: &AnalysisArgs, cfg: &AnalysisSection) -> Result<(), UsageError> {
        require(args.vocab.as_ref(), cfg.vocab.as_ref(), "--vocab <DIR>").map(|_| ())
    }

    fn resolve(args: AnalysisArgs, cfg: &AnalysisSection, first_input: &Path) -> Result<Self, UsageError> {
        let vocab_dir = require(args.vocab, cfg.vocab.clone(), "--vocab <DIR>")?;
        Ok(Common {
            model: pick(args.model, cfg.model.clone(), dir_name(&vocab_dir)),
            task: pick(args.task_name, cfg.task_name.clone(), stem(first_input)),
            mode: pick(args.mode, cfg.mode, Default::default()),
            out: args.out.or_else(|| cfg.out.clone()),
            vocab_dir,
        })
    }

    /// Write `name.json` plus the artifact's CSV tables into the output
    /// directory, or print the JSON when there is none.
    fn emit(
        &self,
        name: &str,
        artifact: &Artifact,
        extra: &[biotok::report::Table],
        inputs: &[&Path],
    ) -> anyhow::Result<()> {
        let json = to_json(artifact);
        let Some(dir) = &self.out else {
            print!("{json}");
            return Ok(());
        };
        let tables = build_tables(std::slice::from_ref(artifact))?;
        let mut files = vec![(dir.join(format!("{name}.json")), json)];
        for table in tables.iter().chain(extra) {
            files.push((dir.join(format!("{}.csv", table.name)), table.to_csv_string()));
        }
        for (path, _) in &files {
            ensure_distinct(inputs, Some(path))?;
        }
        for (path, text) in &files {
            write_text(path, text)?;
        }
        Ok(())
    }
}

pub fn overlap(args: OverlapArgs, cfg: &AnalysisSection) -> anyhow::Result<()> {
    Common::check_vocab(&args.common, cfg)?;
    let tasks = require(non_empty(args.tasks), cfg.tasks.clone(), "--task <PATH>")?;
    let common = Common::resolve(args.common, cfg, &tasks[0])?;
    let vocab = load(&common.vocab_dir)?;
    let mut sentences = Vec::new();
    for path in &tasks {
        sentences.extend(read_gold(path)?);
    }
    let set = task_token_set(&sentences, &vocab);
    let report = vocab_overlap(&common.model, &common.task, &vocab, &set);
    let inputs: Vec<&Path> = tasks.iter().map(PathBuf::as_path).collect();
    common.emit("overlap", &Artifact::Overlap(report), &[], &inputs)
}

pub fn seg_stats(args: SegStatsArgs, cfg: &AnalysisSection) -> anyhow::Result<()> {
    Common::check_vocab(&args.common, cfg)?;
    let gold_paths = require(non_empty(args.gold), cfg.gold.clone(), "--gold <PATH>")?;
    let common = Common::resolve(args.common, cfg, &gold_paths[0])?;
    let context = pick(args.context, cfg.context, Default::default());
    let unique = args.unique || cfg.unique.unwrap_or(false);
    let vocab = load(&common.vocab_dir)?;
    let mut gold = Vec::new();
    for path in &gold_paths {
        gold.extend(read_gold(path)?);
    }
    let surfaces = annotations(&gold, common.mode, unique)?;
    let counts = segment_annotations(&surfaces, &vocab, context)?;
    let report = stats_of(&counts)?;
    let artifact = Artifact::SegStats(Labeled {
        model: common.model.clone(),
        task: common.task.clone(),
        report,
    });
    let inputs: Vec<&Path> = gold_paths.iter().map(PathBuf::as_path).collect();
    common.emit("seg_stats", &artifact, &[], &inputs)
}

pub fn dissect(args: DissectArgs, cfg: &AnalysisSection) -> anyhow::Result<()> {
    Common::check_vocab(&args.common, cfg)?;
    let gold_path = match (args.gold, cfg.gold.as_deref()) {
        (Some(p), _) => p,
        (None, Some([p])) => p.clone(),
        (None, Some(_)) => return Err(UsageError("dissect takes exactly one gold file".into()).into()),
        (None, None) => {
            return Err(UsageError("the following required argument was not provided: --gold <PATH>".into()).into())
        }
    };
    let pred_path = require(args.pred, cfg.pred.clone(), "--pred <PATH>")?;
    let common = Common::resolve(args.common, cfg, &gold_path)?;
    let max_bucket = pick(args.max_bucket, cfg.max_bucket, 10);
    if max_bucket == 0 {
        return Err(UsageError("--max-bucket must be at least 1".into()).into());
    }
    let context = pick(args.context, cfg.context, Default::default());
    let vocab = load(&common.vocab_dir)?;
    let gold = read_gold(&gold_path)?;
    let pred = read_conll(&pred_path, Some(&gold))?;
    let report = dissect_scores(&gold, &pred, &vocab, max_bucket, common.mode, context)?;
    let plot = plot_table(&report);
    let artifact = Artifact::Dissection(Labeled {
        model: common.model.clone(),
        task: common.task.clone(),
        report,
    });
    common.emit("dissection", &artifact, &[plot], &[&gold_path, &pred_path])
}

pub fn ner_eval(args: NerEvalArgs, cfg: &NerEvalSection, labels: &AnalysisSection) -> anyhow::Result<()> {
    let gold_path = require(args.gold, cfg.gold.clone(), "--gold <PATH>")?;
    let preds = require(non_empty(args.pred), cfg.pred.clone(), "--pred <PATH>")?;
    let mode = pick(args.mode, cfg.mode, Default::default());
    let format = pick(args.report, cfg.report, ReportFormat::Json);
    let with_macro = args.macro_average || cfg.macro_average.unwrap_or(false);
    let out = args.out.or_else(|| cfg.out.clone());
    let mut inputs: Vec<&Path> = preds.iter().map(PathBuf::as_path).collect();
    inputs.push(&gold_path);
    ensure_distinct(&inputs, out.as_deref())?;

    let gold = read_gold(&gold_path)?;
    let mut runs = Vec::with_capacity(preds.len());
    for path in &preds {
        let pred = read_conll(path, Some(&gold))?;
        runs.push(score(&gold, &pred, mode).with_context(|| format!("scoring {}", path.display()))?);
    }
    let report = NerEvalReport::new(runs, with_macro)?;
    let text = match format {
        ReportFormat::Json => to_json(&Artifact::NerEval(Labeled {
            model: pick(args.model, labels.model.clone(), stem(&preds[0])),
            task: pick(args.task_name, labels.task_name.clone(), stem(&gold_path)),
            report,
        })),
        ReportFormat::Csv if report.runs.len() == 1 => per_type_table(&report.runs[0]).to_csv_string(),
        ReportFormat::Csv => aggregate_table(&report.aggregate).to_csv_string(),
    };
    let mut w = create_output(out.as_deref())?;
    w.write_all(text.as_bytes())?;
    finish(w, out.as_deref())
}

/// Artifacts under `path`: the file itself, or every JSON file in the
/// directory whose `kind` names an artifact.
fn collect(path: &Path, into: &mut Vec<Artifact>) -> anyhow::Result<()> {
    if !path.is_dir() {
        into.push(read_artifact(path)?);
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("cannot list {}", path.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .with_context(|| format!("cannot list {}", path.display()))?;
    entries.sort();
    for file in entries {
        if file.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let text = fs::read_to_string(&file).with_context(|| format!("cannot read {}", file.display()))?;
        let kind = serde_json::from_str::<serde_json::Value>(&text)
            .ok()
            .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_string));
        match kind {
            Some(k) if ARTIFACT_KINDS.contains(&k.as_str()) => into.push(read_artifact(&file)?),
            _ => debug!("skipping {}: not an analysis artifact", file.display()),
        }
    }
    Ok(())
}

pub fn report(args: ReportArgs, cfg: &ReportSection) -> anyhow::Result<()> {
    let inputs = require(non_empty(args.input), cfg.input.clone(), "--input <PATH>")?;
    let out = require(args.out, cfg.out.clone(), "--out <DIR>")?;
    let mut artifacts = Vec::new();
    for path in &inputs {
        collect(path, &mut artifacts)?;
    }
    write_report(&artifacts, &out)?;
    Ok(())
}
