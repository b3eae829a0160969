use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use biotok::bpe::{load_vocab, save_vocab, BpeVocab, Segmentation, TrainerConfig, DEFAULT_SPECIALS};
use biotok::corpus::{
    read_jsonl, read_txt, supported_languages, write_stats_csv, CleanConfig, Cleaner, DedupOptions, FilterConfig,
    LanguageGate, RawDocument, ReadIssue,
};
use biotok::masking::{make_example, masking_stats, pack_document, MaskingConfig, TokenSpace};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_fraction, create, create_output, ensure_distinct, finish, non_empty, open, open_input, stem, to_json,
    write_text,
};
use crate::config::{pick, require, CleanSection, EncodeSection, InputFormat, MaskSection, TrainSection};
use crate::{CleanArgs, EncodeArgs, MaskArgs, TrainArgs, UsageError};

fn clean_config(args: &CleanArgs, cfg: &CleanSection) -> Result<CleanConfig, UsageError> {
    let defaults = FilterConfig::default();
    let default_gate = defaults.language.clone().expect("default filter has a language gate");
    let lang = pick(args.lang.clone(), cfg.lang.clone(), default_gate.lang);
    let min_score = pick(args.min_lang_score, cfg.min_lang_score, default_gate.min_score);
    check_fraction("--min-lang-score", min_score)?;
    let language = match lang.as_str() {
        "none" => None,
        code if supported_languages().contains(&code) => Some(LanguageGate {
            lang: code.to_string(),
            min_score,
        }),
        other => {
            return Err(UsageError(format!(
                "unsupported language {other:?}; expected one of {} or none",
                supported_languages().join(", ")
            )))
        }
    };
    let alpha_ratio = pick(args.alpha_ratio, cfg.alpha_ratio, defaults.alpha_ratio);
    check_fraction("--alpha-ratio", alpha_ratio)?;
    let mut passthrough: BTreeSet<String> = cfg.passthrough.clone().unwrap_or_default();
    passthrough.extend(args.passthrough.iter().cloned());
    let case_insensitive = args.case_insensitive || cfg.case_insensitive.unwrap_or(false);
    Ok(CleanConfig {
        filter: FilterConfig {
            min_chars: pick(args.min_chars, cfg.min_chars, defaults.min_chars),
            min_tokens: pick(args.min_tokens, cfg.min_tokens, defaults.min_tokens),
            alpha_ratio,
            language,
        },
        dedup: pick(args.dedup, cfg.dedup, Default::default()),
        dedup_options: DedupOptions {
            granularity: pick(args.granularity, cfg.granularity, Default::default()),
            case_sensitive: !case_insensitive,
        },
        passthrough_sources: passthrough,
        abbreviations: cfg.abbreviations.clone(),
    })
}

pub fn clean(args: CleanArgs, cfg: &CleanSection) -> anyhow::Result<()> {
    let input = require(args.input.clone(), cfg.input.clone(), "--input <PATH>")?;
    let format = args.format.or(cfg.format).unwrap_or_else(|| {
        let txt = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("txt"));
        if txt {
            InputFormat::Txt
        } else {
            InputFormat::Jsonl
        }
    });
    let config = clean_config(&args, cfg)?;
    let out = args.out.clone().or_else(|| cfg.out.clone());
    let stats_out = args.stats_out.clone().or_else(|| cfg.stats_out.clone());
    let drops_out = args.drops_out.clone().or_else(|| cfg.drops_out.clone());
    for target in [&out, &stats_out, &drops_out] {
        ensure_distinct(&[&input], target.as_deref())?;
    }

    let reader = open(&input)?;
    let records: Box<dyn Iterator<Item = Result<RawDocument, ReadIssue>>> = match format {
        InputFormat::Jsonl => Box::new(read_jsonl(reader)),
        InputFormat::Txt => {
            let source = pick(args.source.clone(), cfg.source.clone(), stem(&input));
            let prefix = format!("{source}-");
            Box::new(read_txt(reader, &source, &prefix))
        }
    };

    let mut writer = create_output(out.as_deref())?;
    let mut cleaner = Cleaner::new(config);
    let mut kept = 0usize;
    for record in records {
        match record {
            Ok(raw) => {
                if let Some(doc) = cleaner.push(raw) {
                    serde_json::to_writer(&mut writer, &doc)?;
                    writer.write_all(b"\n")?;
                    kept += 1;
                }
            }
            Err(issue) => cleaner.record_issue(&issue),
        }
    }
    finish(writer, out.as_deref())?;
    let (stats, drops) = cleaner.finish();
    info!("kept {kept} documents, {} drop records", drops.len());

    if let Some(path) = &stats_out {
        let mut csv = Vec::new();
        write_stats_csv(&mut csv, &stats)?;
        write_text(path, std::str::from_utf8(&csv)?)?;
        write_text(&path.with_extension("json"), &to_json(&stats))?;
    }
    if let Some(path) = &drops_out {
        let mut w = create(path)?;
        biotok::corpus::write_drop_log(&mut w, &drops).with_context(|| format!("cannot write {}", path.display()))?;
        finish(w, Some(path))?;
    }
    Ok(())
}

/// Training texts from a file: sentences of cleaned JSON lines, texts of raw
/// JSON lines, or lines of plain text.
fn training_texts(path: &Path) -> anyhow::Result<Vec<String>> {
    #[derive(Deserialize)]
    struct Record {
        #[serde(default)]
        sentences: Option<Vec<String>>,
        #[serde(default)]
        text: Option<String>,
    }
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json"));
    let mut texts = Vec::new();
    for (idx, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}: cannot read line", path.display(), idx + 1))?;
        if !json {
            texts.push(line);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: invalid JSON record", path.display(), idx + 1))?;
        match (record.sentences, record.text) {
            (Some(sentences), _) => texts.extend(sentences),
            (None, Some(text)) => texts.push(text),
            (None, None) => warn!("{}:{}: record has neither sentences nor text", path.display(), idx + 1),
        }
    }
    Ok(texts)
}

pub fn train_bpe(args: TrainArgs, cfg: &TrainSection) -> anyhow::Result<()> {
    let inputs = require(non_empty(args.input), cfg.input.clone(), "--input <PATH>")?;
    let out = require(args.out, cfg.out.clone(), "--out <DIR>")?;
    let vocab_size = pick(args.vocab_size, cfg.vocab_size, 52_000);
    let minimum = 256 + DEFAULT_SPECIALS.len() + 1;
    if vocab_size < minimum {
        return Err(UsageError(format!("--vocab-size must be at least {minimum}, got {vocab_size}")).into());
    }
    let vocab_file = out.join(biotok::bpe::VOCAB_FILE);
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    ensure_distinct(&input_refs, Some(&vocab_file))?;

    let mut texts = Vec::new();
    for path in &inputs {
        texts.extend(training_texts(path)?);
    }
    info!("training on {} texts", texts.len());
    let vocab = biotok::bpe::train_bpe(&texts, &TrainerConfig::new(vocab_size))?;
    if vocab.size() < vocab_size {
        warn!(
            "corpus supports only {} of the requested {vocab_size} entries",
            vocab.size()
        );
    }
    save_vocab(&vocab, &out)?;
    Ok(())
}

/// One encoded sentence, as written by `encode` and read by `mask`.
#[derive(Debug, Serialize, Deserialize)]
struct EncodedSentence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(flatten)]
    seg: Segmentation,
}

fn load(path: &Path) -> anyhow::Result<BpeVocab> {
    load_vocab(path).with_context(|| format!("cannot load vocabulary from {}", path.display()))
}

pub fn encode(args: EncodeArgs, cfg: &EncodeSection) -> anyhow::Result<()> {
    let vocab_dir = require(args.vocab, cfg.vocab.clone(), "--vocab <DIR>")?;
    let input = args.input.or_else(|| cfg.input.clone());
    let out = args.out.or_else(|| cfg.out.clone());
    if let Some(i) = &input {
        ensure_distinct(&[i], out.as_deref())?;
    }
    let vocab = load(&vocab_dir)?;
    let documents = input
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("jsonl")));

    let mut sentences: Vec<(Option<String>, String)> = Vec::new();
    for (idx, line) in open_input(input.as_deref())?.lines().enumerate() {
        let line = line.with_context(|| format!("line {}: cannot read input", idx + 1))?;
        if documents {
            if line.trim().is_empty() {
                continue;
            }
            let doc: biotok::corpus::CleanDocument =
                serde_json::from_str(&line).with_context(|| format!("line {}: invalid cleaned document", idx + 1))?;
            sentences.extend(doc.sentences.into_iter().map(|s| (Some(doc.id.clone()), s)));
        } else {
            sentences.push((None, line));
        }
    }

    let mut w = create_output(out.as_deref())?;
    for (id, text) in sentences {
        let seg = vocab.encode(&text);
        if args.ids {
            let ids: Vec<String> = seg.ids.iter().map(u32::to_string).collect();
            writeln!(w, "{}", ids.join(" "))?;
        } else if args.pieces {
            writeln!(w, "{}", seg.subwords.join(" "))?;
        } else {
            serde_json::to_writer(&mut w, &EncodedSentence { id, seg })?;
            w.write_all(b"\n")?;
        }
    }
    finish(w, out.as_deref())
}

fn masking_config(args: &MaskArgs, cfg: &MaskSection, seed: u64) -> Result<MaskingConfig, UsageError> {
    let d = MaskingConfig::default();
    let config = MaskingConfig {
        strategy: pick(args.strategy, cfg.strategy, d.strategy),
        mask_prob: pick(args.mask_prob, cfg.mask_prob, d.mask_prob),
        replace_mask: pick(args.replace_mask, cfg.replace_mask, d.replace_mask),
        replace_random: pick(args.replace_random, cfg.replace_random, d.replace_random),
        keep: pick(args.keep, cfg.keep, d.keep),
        budget_unit: pick(args.budget_unit, cfg.budget_unit, d.budget_unit),
        seed,
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(config)
}

pub fn mask(args: MaskArgs, cfg: &MaskSection, seed: u64) -> anyhow::Result<()> {
    let vocab_dir = require(args.vocab.clone(), cfg.vocab.clone(), "--vocab <DIR>")?;
    let input = require(args.input.clone(), cfg.input.clone(), "--input <PATH>")?;
    let config = masking_config(&args, cfg, seed)?;
    let pack = args.pack.or(cfg.pack);
    if pack == Some(0) {
        return Err(UsageError("--pack must be at least 1".into()).into());
    }
    let out = args.out.clone().or_else(|| cfg.out.clone());
    let stats_out = args.stats_out.clone().or_else(|| cfg.stats_out.clone());
    ensure_distinct(&[&input], out.as_deref())?;
    ensure_distinct(&[&input], stats_out.as_deref())?;

    let vocab = load(&vocab_dir)?;
    let space = TokenSpace::from_vocab(&vocab)?;

    let mut units: Vec<(Option<String>, Segmentation)> = Vec::new();
    for (idx, line) in open(&input)?.lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}: cannot read line", input.display(), idx + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EncodedSentence = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: invalid encoded sentence", input.display(), idx + 1))?;
        if let Some(&bad) = rec.seg.ids.iter().find(|&&id| id as usize >= vocab.size()) {
            anyhow::bail!("{}:{}: id {bad} is outside the vocabulary", input.display(), idx + 1);
        }
        units.push((rec.id, rec.seg));
    }
    if let Some(max_len) = pack {
        // Consecutive sentences of the same document are packed together.
        let mut documents: Vec<(Option<String>, Vec<Segmentation>)> = Vec::new();
        for (id, seg) in units {
            match documents.last_mut() {
                Some((last, segs)) if id.is_some() && *last == id => segs.push(seg),
                _ => documents.push((id, vec![seg])),
            }
        }
        units = documents
            .into_iter()
            .flat_map(|(id, segs)| pack_document(&segs, max_len).into_iter().map(move |s| (id.clone(), s)))
            .collect();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut examples = Vec::with_capacity(units.len());
    let mut w = create_output(out.as_deref())?;
    for (_, seg) in &units {
        if seg.is_empty() {
            warn!("skipping an empty sentence");
            continue;
        }
        let ex = make_example(seg, &config, &space, &mut rng)?;
        serde_json::to_writer(&mut w, &ex)?;
        w.write_all(b"\n")?;
        examples.push(ex);
    }
    finish(w, out.as_deref())?;
    if let Some(path) = stats_out {
        let stats = masking_stats(&examples)?;
        write_text(&path, &to_json(&stats))?;
    }
    Ok(())
}
