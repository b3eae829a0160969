use biotok::analysis::{dissect_scores, seg_stats, segment_annotations, Context};
use biotok::bpe::{token_to_bytes, train_bpe, BpeVocab, TrainerConfig};
use biotok::ner::{score, Counts, SchemeMode, TaggedSentence};
use biotok::report::{Artifact, Labeled, NerEvalReport};
use biotok_oracles::{bpe as bpe_oracle, gen, ner as ner_oracle};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: [&str; 10] = [
    "insulina",
    "HBsAg",
    "dolor",
    "de",
    "hidrocortisona",
    "x",
    "ácido",
    "acetilsalicílico",
    "VIH",
    "ab",
];

const TERMS: [&str; 20] = [
    "HBsAg",
    "insulina",
    "hidrocortisona",
    "ácido acetilsalicílico",
    "VIH",
    "hepatitis C",
    "dolor abdominal",
    "metformina",
    "paracetamol",
    "carcinoma",
    "ADN",
    "glucemia",
    "IL-6",
    "anti-TNF",
    "5-fluorouracilo",
    "cáncer de mama",
    "x",
    "ab",
    "fiebre",
    "omeprazol",
];

fn vocab() -> BpeVocab {
    let text = "La insulina y la hidrocortisona. El dolor de la insulina. ácido acetilsalicílico \
                insulina insulina dolor dolor de de VIH VIH HBsAg";
    train_bpe([text], &TrainerConfig::new(320)).unwrap()
}

fn merges(vocab: &BpeVocab) -> Vec<(Vec<u8>, Vec<u8>)> {
    vocab
        .merges()
        .map(|(l, r)| (token_to_bytes(l).unwrap(), token_to_bytes(r).unwrap()))
        .collect()
}

fn sentences(rng: &mut ChaCha8Rng, tags: &[Vec<String>]) -> Vec<TaggedSentence> {
    tags.iter()
        .map(|t| {
            let tokens: Vec<String> = t.iter().map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
            TaggedSentence::new(tokens, t.iter().map(|x| x.parse().unwrap()).collect())
        })
        .collect()
}

fn with_tags(tokens: &[TaggedSentence], tags: &[Vec<String>]) -> Vec<TaggedSentence> {
    tokens
        .iter()
        .zip(tags)
        .map(|(s, t)| TaggedSentence::new(s.tokens.clone(), t.iter().map(|x| x.parse().unwrap()).collect()))
        .collect()
}

#[test]
fn annotation_lengths_match_brute_force_segmentation() {
    let vocab = vocab();
    let m = merges(&vocab);
    for context in [Context::WordInitial, Context::MidSentence] {
        let counts = segment_annotations(&TERMS, &vocab, context).unwrap();
        for (term, n) in TERMS.iter().zip(counts) {
            assert_eq!(n, bpe_oracle::count(&context.apply(term), &m), "{term} {context}");
            assert!(n >= 1);
        }
    }
}

#[test]
fn dissection_matches_bucketed_span_sets() {
    let vocab = vocab();
    let m = merges(&vocab);
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for case in 0..200 {
        let gold_tags = gen::tag_corpus(&mut rng, 4, 7, true);
        let pred_tags = gen::perturb(&mut rng, &gold_tags, 0.4, true);
        let gold = sentences(&mut rng, &gold_tags);
        let pred = with_tags(&gold, &pred_tags);
        let max_bucket = rng.gen_range(1..8);
        let report = dissect_scores(
            &gold,
            &pred,
            &vocab,
            max_bucket,
            SchemeMode::Strict,
            Context::WordInitial,
        )
        .unwrap();

        let bucket = |s: &ner_oracle::Span| {
            let surface = gold[s.0].tokens[s.1..s.2].join(" ");
            bpe_oracle::count(&surface, &m).clamp(1, max_bucket)
        };
        let g: Vec<Vec<&str>> = gold_tags
            .iter()
            .map(|s| s.iter().map(String::as_str).collect())
            .collect();
        let p: Vec<Vec<&str>> = pred_tags
            .iter()
            .map(|s| s.iter().map(String::as_str).collect())
            .collect();
        let expected = ner_oracle::bucketed(&g, &p, bucket);
        let got: Vec<(usize, Counts)> = report.buckets.iter().map(|b| (b.bucket, b.scores.counts)).collect();
        let want: Vec<(usize, Counts)> = expected
            .iter()
            .map(|(k, c)| {
                (
                    *k,
                    Counts {
                        tp: c.tp,
                        fp: c.fp,
                        fn_: c.fn_,
                    },
                )
            })
            .collect();
        assert_eq!(got, want, "case {case}");

        let tp: usize = report.buckets.iter().map(|b| b.scores.counts.tp).sum();
        let fn_: usize = report.buckets.iter().map(|b| b.scores.counts.fn_).sum();
        let fp: usize = report.buckets.iter().map(|b| b.scores.counts.fp).sum();
        assert_eq!(
            (tp, fp, fn_),
            (
                report.overall.micro.counts.tp,
                report.overall.micro.counts.fp,
                report.overall.micro.counts.fn_
            )
        );
    }
}

#[test]
fn one_bucket_reproduces_the_scorer() {
    let vocab = vocab();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..50 {
        let gold_tags = gen::tag_corpus(&mut rng, 4, 7, true);
        let pred_tags = gen::perturb(&mut rng, &gold_tags, 0.4, true);
        let gold = sentences(&mut rng, &gold_tags);
        let pred = with_tags(&gold, &pred_tags);
        let report = dissect_scores(&gold, &pred, &vocab, 1, SchemeMode::Strict, Context::WordInitial).unwrap();
        let direct = score(&gold, &pred, SchemeMode::Strict).unwrap();
        match report.buckets.as_slice() {
            [] => assert_eq!(direct.micro.counts, Counts::default()),
            [only] => assert_eq!(only.scores, direct.micro),
            more => panic!("{} buckets", more.len()),
        }
    }
}

#[test]
fn bucket_fractions_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..200 {
        let counts: Vec<usize> = (0..rng.gen_range(1..50)).map(|_| rng.gen_range(1..12)).collect();
        let s = seg_stats(&counts).unwrap();
        let total: f64 = s.buckets.as_array().iter().sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(s.mean >= 1.0 && s.median >= 1.0);
        let pct: f64 = s.buckets.percentages().iter().sum();
        assert!((pct - 100.0).abs() <= 0.01 + 1e-9, "{pct}");
    }
}

#[test]
fn every_artifact_kind_round_trips() {
    let vocab = vocab();
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let tags = gen::tag_corpus(&mut rng, 3, 6, true);
    let gold = sentences(&mut rng, &tags);
    let label = |report| Labeled {
        model: "m".to_string(),
        task: "t".to_string(),
        report,
    };
    let scores = score(&gold, &gold, SchemeMode::Strict).unwrap();
    let artifacts = vec![
        Artifact::SegStats(label(seg_stats(&[1, 2, 5]).unwrap())).clone(),
        Artifact::Dissection(Labeled {
            model: "m".into(),
            task: "t".into(),
            report: dissect_scores(&gold, &gold, &vocab, 4, SchemeMode::Strict, Context::WordInitial).unwrap(),
        }),
        Artifact::NerEval(Labeled {
            model: "m".into(),
            task: "t".into(),
            report: NerEvalReport::new(vec![scores.clone(), scores], true).unwrap(),
        }),
    ];
    for a in artifacts {
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Artifact>(&text).unwrap(), a, "{text}");
    }
}
