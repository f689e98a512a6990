//! Acceptance suite: one test per release criterion, each printing a
//! `ACCEPTANCE n <name>: PASS` line when it holds (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use omrag_core::bench::{
    level_histogram, load_benchmark, type_histogram, validate_distribution, FieldMap, LEVEL_COUNTS,
    TYPE_COUNTS,
};
use omrag_core::fixture::{answer_pairs, generate_benchmark, released_scores};
use omrag_core::inference::{Condition, InferenceMode, InferenceRecord};
use omrag_core::kb::{build_kb, FilterList};
use omrag_core::metrics::{
    accuracy, attempts_ratio, coverage_report, delta_accuracy, delta_attempts, mean_attempts,
};
use omrag_core::mocks::{AnswerPolicy, MockContext, MockGenerationService, ScriptEntry};
use omrag_core::normalize::{
    latex_valid, normalize_kb, normalize_with_fallback, pattern_normalize, Corrections, NormPath,
    NormalizeOptions,
};
use omrag_core::pipeline::{Pipeline, PipelineConfig, RUNS_DIR};
use omrag_core::rerank::{
    filter_problems_by_threshold, select_symbols, ScoredPair, HIGH_SCORE_THRESHOLD, MIN_SELECTED,
};
use omrag_core::retrieval::{rrf_fuse, Bm25Index, Bm25Params};
use omrag_core::util;
use omrag_core::verify::{
    answers_equivalent, numeric_equivalence, parse_expression, DEFAULT_TOL, DEFAULT_TRIALS,
};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn assets() -> PathBuf {
    repo_root().join("assets")
}

/// Problem ids in benchmark order, matching the released score table rows.
fn benchmark_ids() -> Vec<String> {
    (1..=500).map(|i| format!("math500_{i:04}")).collect()
}

fn symbol_pool() -> Vec<String> {
    (0..200)
        .map(|i| format!("cd{}:sym{}", i / 8, i % 8))
        .collect()
}

// ---------------------------------------------------------------------------
// 1. Knowledge-base construction
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_kb_construction() {
    let assets = assets();
    let filters = FilterList::load(&assets.join("filters.json")).unwrap();
    let started = Instant::now();
    let kb = build_kb(&assets.join("cds"), &filters).unwrap();
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "KB build took {elapsed:?}, budget is 60s"
    );

    let pinned_fp = std::fs::read_to_string(assets.join("released/corpus.fingerprint"))
        .map(|s| s.trim().to_string())
        .unwrap_or_default();
    let corpus_matches = kb.source_fingerprint == pinned_fp;
    let expect = [
        ("parsed", kb.counts.symbols, 1138usize),
        ("filtered", kb.counts.filtered, 98),
        ("indexed", kb.counts.indexed, 1040),
    ];
    for (what, got, want) in expect {
        if corpus_matches {
            assert_eq!(got, want, "{what} count off on the pinned corpus");
        } else {
            let tolerance = (want as f64 * 0.05).ceil() as usize;
            assert!(
                got.abs_diff(want) <= tolerance,
                "{what} count {got} outside {want} +/- 5% (corpus fingerprint changed)"
            );
        }
    }
    println!("ACCEPTANCE 1 KB construction counts 1138/98/1040 in {elapsed:?}: PASS");
}

// ---------------------------------------------------------------------------
// 2. Normalization coverage and published conversions
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_normalization_coverage_and_conversions() {
    let assets = assets();
    let filters = FilterList::load(&assets.join("filters.json")).unwrap();
    let kb = build_kb(&assets.join("cds"), &filters).unwrap();
    let corrections = Corrections::load(&assets.join("corrections.json")).unwrap();
    let opts = NormalizeOptions {
        offline: true,
        ..Default::default()
    };
    let (_, report) = normalize_kb(&kb, &corrections, None, &opts).unwrap();
    assert!(
        report.coverage >= 0.82,
        "pattern + corrections coverage {:.4} below the 0.82 floor",
        report.coverage
    );

    // The three published conversion fixtures, reproduced verbatim: two on
    // the deterministic pattern path, one on the model-fallback path.
    let (out, _) = pattern_normalize("sin(x)^2 + cos(x)^2 = 1").unwrap();
    assert_eq!(out, "\\sin^{2}(x) + \\cos^{2}(x) = 1");
    assert!(latex_valid(&out));

    let (out, _) =
        pattern_normalize("If is_commutative(G) then for all a,b in carrier(G) a*b = b*a").unwrap();
    assert_eq!(
        out,
        "\\text{is\\_commutative}(G) \\Rightarrow \\forall a, b \\in \\text{carrier}(G): a \\cdot b = b \\cdot a"
    );
    assert!(latex_valid(&out));

    let mut ctx = MockContext::default();
    ctx.scripts.push(ScriptEntry {
        contains: "diff(lambda y:integral(lambda z:f(z))(y)) = f".into(),
        response: r#"{"latex": "\\frac{d}{dy}(\\int f(z) \\, dz) = f"}"#.into(),
    });
    let svc = MockGenerationService::new(AnswerPolicy::AlwaysWrong, ctx);
    let fallback_opts = NormalizeOptions {
        offline: false,
        fewshot_template: "Convert to LaTeX: {input}".into(),
        ..Default::default()
    };
    let result = normalize_with_fallback(
        "diff(lambda y:integral(lambda z:f(z))(y)) = f",
        &svc,
        &fallback_opts,
    )
    .unwrap();
    assert_eq!(result.normalized, "\\frac{d}{dy}(\\int f(z) \\, dz) = f");
    assert_eq!(result.path, NormPath::Model);
    assert!(result.valid);

    println!(
        "ACCEPTANCE 2 normalization coverage {:.1}% (>= 82%) + 3 published conversions: PASS",
        report.coverage * 100.0
    );
}

// ---------------------------------------------------------------------------
// 3. Reciprocal-rank fusion against a brute-force oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_rrf_oracle() {
    // Hand case: one list, weight 1, k = 60 -> top item scores 1/61.
    let fused = rrf_fuse(&[vec!["a".to_string()]], &[1.0f64], 60.0);
    assert_eq!(fused.len(), 1);
    assert!((fused[0].1 - 1.0 / 61.0).abs() <= 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let mut max_diff = 0.0f64;
    for _ in 0..1000 {
        let pool: Vec<String> = (0..rng.random_range(2..=30))
            .map(|i| format!("id{i}"))
            .collect();
        let make_list = |rng: &mut ChaCha8Rng| {
            let mut ids = pool.clone();
            // Fisher-Yates shuffle, then truncate to a random prefix.
            for i in (1..ids.len()).rev() {
                ids.swap(i, rng.random_range(0..=i));
            }
            ids.truncate(rng.random_range(1..=ids.len()));
            ids
        };
        let lists = [make_list(&mut rng), make_list(&mut rng)];
        let weights = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let k = 60.0f64;

        // Independent direct evaluation: sum of w / (k + rank) per id.
        let mut oracle: BTreeMap<&str, f64> = BTreeMap::new();
        for (list, w) in lists.iter().zip(weights) {
            for (i, id) in list.iter().enumerate() {
                *oracle.entry(id.as_str()).or_default() += w / (k + (i + 1) as f64);
            }
        }

        let fused = rrf_fuse(&lists, &weights, k);
        assert_eq!(fused.len(), oracle.len());
        for (id, score) in &fused {
            let want = oracle[id.as_str()];
            max_diff = max_diff.max((score - want).abs());
        }
        // Descending scores, ties broken by id.
        for pair in fused.windows(2) {
            assert!(
                pair[0].1 > pair[1].1 || (pair[0].1 == pair[1].1 && pair[0].0 < pair[1].0),
                "fusion output not sorted"
            );
        }
    }
    assert!(max_diff <= 1e-12, "max fusion deviation {max_diff}");
    println!("ACCEPTANCE 3 RRF oracle, 1000 randomized pairs (max diff {max_diff:.2e}) + 1/61 hand case: PASS");
}

// ---------------------------------------------------------------------------
// 4. BM25 against a direct-formula oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_bm25_oracle() {
    let vocab: Vec<String> = (0..15).map(|i| format!("t{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0004);
    let (k1, b) = (1.5f64, 0.75f64);
    let mut max_diff = 0.0f64;

    for _ in 0..200 {
        let n_docs = rng.random_range(1..=20);
        let docs: Vec<(String, Vec<String>)> = (0..n_docs)
            .map(|d| {
                let len = rng.random_range(1..=12);
                let tokens = (0..len)
                    .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                    .collect();
                (format!("doc{d}"), tokens)
            })
            .collect();
        let query: Vec<String> = {
            let len = rng.random_range(1..=6);
            (0..len)
                .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                .collect()
        };

        // Direct evaluation from the document structures: Okapi BM25 with
        // idf = ln(1 + (N - df + 0.5)/(df + 0.5)), distinct query terms.
        let n = docs.len() as f64;
        let avgdl = docs.iter().map(|(_, t)| t.len()).sum::<usize>() as f64 / n;
        let distinct: BTreeSet<&str> = query.iter().map(String::as_str).collect();
        let mut oracle: BTreeMap<&str, f64> = BTreeMap::new();
        for term in distinct {
            let df = docs
                .iter()
                .filter(|(_, t)| t.iter().any(|x| x == term))
                .count();
            if df == 0 {
                continue;
            }
            let idf = (1.0 + (n - df as f64 + 0.5) / (df as f64 + 0.5)).ln();
            for (id, tokens) in &docs {
                let tf = tokens.iter().filter(|x| x.as_str() == term).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                let dl = tokens.len() as f64;
                let score = idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
                *oracle.entry(id.as_str()).or_default() += score;
            }
        }

        let index = Bm25Index::build(&docs, Bm25Params::default());
        let ranked = index.rank(&query);
        assert_eq!(
            ranked.len(),
            oracle.len(),
            "zero-score documents must be omitted"
        );
        for (id, score) in &ranked {
            let want = oracle[id.as_str()];
            max_diff = max_diff.max((score - want).abs());
        }
    }
    assert!(max_diff <= 1e-9, "max BM25 deviation {max_diff}");
    println!("ACCEPTANCE 4 BM25 direct-formula oracle, 200 random corpora <= 20 docs (max diff {max_diff:.2e}): PASS");
}

// ---------------------------------------------------------------------------
// 5. Selection-rule property suite
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_selection_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    let mut violations = 0usize;
    for round in 0..10_000 {
        let n = rng.random_range(1..=50);
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let pairs: Vec<ScoredPair> = ids
            .iter()
            .map(|id| ScoredPair {
                problem_id: "p".into(),
                symbol_id: id.clone(),
                score: rng.random_range(0.0..=1.0),
            })
            .collect();
        let mut rrf_order = ids.clone();
        for i in (1..rrf_order.len()).rev() {
            rrf_order.swap(i, rng.random_range(0..=i));
        }

        let selection = select_symbols(&pairs, &rrf_order);
        let selected: BTreeSet<&str> = selection
            .selected_symbol_ids
            .iter()
            .map(String::as_str)
            .collect();

        // Superset of everything above the high-score threshold.
        let high: BTreeSet<&str> = pairs
            .iter()
            .filter(|p| p.score > HIGH_SCORE_THRESHOLD)
            .map(|p| p.symbol_id.as_str())
            .collect();
        if !high.is_subset(&selected) {
            violations += 1;
            eprintln!("round {round}: high-score candidates dropped");
            continue;
        }
        // At least min(3, n) selected, no duplicates, all from the pool.
        if selection.selected_symbol_ids.len() < MIN_SELECTED.min(n) {
            violations += 1;
            eprintln!("round {round}: under-selected");
            continue;
        }
        if selected.len() != selection.selected_symbol_ids.len()
            || !selected.iter().all(|s| ids.iter().any(|i| i == s))
        {
            violations += 1;
            eprintln!("round {round}: duplicate or foreign symbol selected");
        }
    }
    assert_eq!(
        violations, 0,
        "{violations} selection-property violations in 10000 rounds"
    );
    println!("ACCEPTANCE 5 selection properties over 10000 randomized sets, 0 violations: PASS");
}

// ---------------------------------------------------------------------------
// 6. Threshold filtering on the released scores
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_threshold_counts() {
    let ids = benchmark_ids();
    let set = released_scores(&ids, &symbol_pool());
    let expected = [
        (0.0, 500usize),
        (0.1, 201),
        (0.3, 151),
        (0.5, 121),
        (0.7, 105),
        (0.9, 75),
    ];
    for (threshold, want) in expected {
        let kept = filter_problems_by_threshold(&ids, &set.pairs, threshold);
        assert_eq!(
            kept.len(),
            want,
            "threshold {threshold}: kept {} problems, expected {want}",
            kept.len()
        );
    }
    // Partition sanity: raising the threshold never admits new problems.
    let mut prev: Option<BTreeSet<String>> = None;
    for (threshold, _) in expected {
        let kept: BTreeSet<String> = filter_problems_by_threshold(&ids, &set.pairs, threshold)
            .into_iter()
            .collect();
        if let Some(p) = &prev {
            assert!(kept.is_subset(p), "threshold {threshold} not monotone");
        }
        prev = Some(kept);
    }
    println!("ACCEPTANCE 6 threshold counts 500/201/151/121/105/75 exact + monotone: PASS");
}

// ---------------------------------------------------------------------------
// 7. Coverage analytics on the released scores
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_coverage_analytics() {
    let problems = generate_benchmark();
    let ids = benchmark_ids();
    let set = released_scores(&ids, &symbol_pool());
    let report = coverage_report(&set.pairs, &problems);

    assert_eq!(report.n_problems, 500);
    let one_decimal = |x: f64| (x * 10.0).round() / 10.0;
    assert_eq!(one_decimal(report.high_pct), 24.2, "high-coverage share");
    assert_eq!(one_decimal(report.poor_pct), 65.8, "poor-coverage share");
    assert!(
        (report.mean_max_score - 0.2715).abs() <= 1e-4,
        "mean max score {} outside 0.2715 +/- 0.0001",
        report.mean_max_score
    );
    let by_name: BTreeMap<&str, f64> = report
        .by_type
        .iter()
        .map(|t| (t.subject_type.as_str(), t.high_pct))
        .collect();
    assert_eq!(one_decimal(by_name["Geometry"]), 14.6);
    assert_eq!(one_decimal(by_name["Precalculus"]), 37.5);
    println!(
        "ACCEPTANCE 7 coverage high 24.2% / poor 65.8% / mean {:.4}, Geometry 14.6% & Precalculus 37.5%: PASS",
        report.mean_max_score
    );
}

// ---------------------------------------------------------------------------
// 8. Benchmark ingestion distributions
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_benchmark_distributions() {
    let path = assets().join("released/math500.jsonl");
    let problems = load_benchmark(&path, &FieldMap::default()).unwrap();
    assert_eq!(problems.len(), 500);
    assert_eq!(level_histogram(&problems), LEVEL_COUNTS);
    assert_eq!(type_histogram(&problems), TYPE_COUNTS);
    validate_distribution(&problems).unwrap();
    println!(
        "ACCEPTANCE 8 level histogram {LEVEL_COUNTS:?} + type histogram {TYPE_COUNTS:?} exact: PASS"
    );
}

// ---------------------------------------------------------------------------
// 9. Metric fixtures and antisymmetry
// ---------------------------------------------------------------------------

fn record(mode: InferenceMode, correct: bool, attempts: u32) -> InferenceRecord {
    InferenceRecord {
        problem_id: "p".into(),
        model_tag: "m".into(),
        condition: Condition::Baseline,
        mode,
        threshold: 0.0,
        attempts_used: attempts,
        attempt_outputs: vec![],
        extracted_answer: None,
        correct,
        timing_ms: 0,
    }
}

#[test]
fn acceptance_09_metric_fixtures() {
    let tol = 1e-12;
    // Accuracy: 3 of 4 correct.
    let recs: Vec<InferenceRecord> = [true, true, false, true]
        .iter()
        .map(|&c| record(InferenceMode::Greedy, c, 1))
        .collect();
    assert!((accuracy(&recs).unwrap() - 0.75).abs() <= tol);
    assert_eq!(accuracy(&[]), None);

    // Delta accuracy in percentage points.
    assert!((delta_accuracy(Some(0.75), Some(0.5)).unwrap() - 25.0).abs() <= tol);

    // Mean attempts over best-of-n records: (1 + 3 + 5) / 3 = 3.
    let recs: Vec<InferenceRecord> = [1u32, 3, 5]
        .iter()
        .map(|&a| record(InferenceMode::BestOfN, true, a))
        .collect();
    assert!((mean_attempts(&recs).unwrap().unwrap() - 3.0).abs() <= tol);

    // Attempts ratio baseline/openmath and delta attempts openmath-baseline.
    assert!((attempts_ratio(Some(4.0), Some(2.5)).unwrap() - 1.6).abs() <= tol);
    assert!((delta_attempts(Some(2.5), Some(4.0)).unwrap() - (-1.5)).abs() <= tol);

    // Antisymmetry of delta accuracy on randomized accuracy pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0009);
    for _ in 0..1000 {
        let n1 = rng.random_range(1..=50);
        let n2 = rng.random_range(1..=50);
        let a: Vec<InferenceRecord> = (0..n1)
            .map(|_| record(InferenceMode::Greedy, rng.random::<bool>(), 1))
            .collect();
        let b: Vec<InferenceRecord> = (0..n2)
            .map(|_| record(InferenceMode::Greedy, rng.random::<bool>(), 1))
            .collect();
        let (aa, ab) = (accuracy(&a), accuracy(&b));
        let fwd = delta_accuracy(aa, ab).unwrap();
        let rev = delta_accuracy(ab, aa).unwrap();
        assert!(
            (fwd + rev).abs() <= tol,
            "antisymmetry violated: {fwd} vs {rev}"
        );
    }
    println!("ACCEPTANCE 9 metric fixtures to 1e-12 + delta-accuracy antisymmetry: PASS");
}

// ---------------------------------------------------------------------------
// 10. Answer verifier golden fixture and numeric oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_answer_verifier() {
    let pairs = answer_pairs();
    let equivalent = pairs.iter().filter(|p| p.equivalent).count();
    let inequivalent = pairs.len() - equivalent;
    assert!(
        equivalent >= 40 && inequivalent >= 40,
        "fixture must hold 40 + 40 pairs"
    );
    let mut wrong = 0usize;
    for pair in &pairs {
        if answers_equivalent(&pair.a, &pair.b) != pair.equivalent {
            wrong += 1;
            eprintln!(
                "mismatch: {:?} vs {:?} (want equivalent={})",
                pair.a, pair.b, pair.equivalent
            );
        }
    }
    assert_eq!(
        wrong,
        0,
        "verifier disagreed on {wrong} of {} golden pairs",
        pairs.len()
    );

    // Numeric sampling oracle, directly.
    let e1 = parse_expression("x^2-1").unwrap();
    let e2 = parse_expression("(x-1)(x+1)").unwrap();
    assert!(numeric_equivalence(&e1, &e2, DEFAULT_TRIALS, DEFAULT_TOL));
    let e1 = parse_expression("x+1").unwrap();
    let e2 = parse_expression("x+1.0000002").unwrap();
    assert!(
        !numeric_equivalence(&e1, &e2, DEFAULT_TRIALS, 1e-6),
        "near-miss constant offset must be rejected at tol 1e-6"
    );
    println!(
        "ACCEPTANCE 10 answer fixture {equivalent}+{inequivalent} pairs 100% + numeric oracle accept/reject: PASS"
    );
}

// ---------------------------------------------------------------------------
// 11. Offline end-to-end run
// ---------------------------------------------------------------------------

/// Offline mock-backed config over the 20-problem benchmark subset.
fn offline_config(out_dir: &Path, profile: &str, tag: &str) -> PipelineConfig {
    let assets = assets();
    let mut cfg = PipelineConfig {
        offline: true,
        ..PipelineConfig::default()
    };
    cfg.paths.cds_dir = assets.join("cds");
    cfg.paths.filters = assets.join("filters.json");
    cfg.paths.corrections = assets.join("corrections.json");
    cfg.paths.stopwords = assets.join("stopwords.json");
    cfg.paths.benchmark = assets.join("released/math20.jsonl");
    cfg.paths.out_dir = out_dir.to_path_buf();
    cfg.endpoints.generation.profile = profile.to_string();
    cfg.endpoints.generation.model_tag = tag.to_string();
    cfg
}

#[test]
fn acceptance_11_offline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let started = Instant::now();
    let mut pipeline =
        Pipeline::new(offline_config(&out, "mock:correct_on_attempt_3", "mock-a3")).unwrap();
    pipeline.run_all().unwrap();
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 30,
        "offline run-all took {elapsed:?}, budget is 30s"
    );

    let runs: Vec<PathBuf> = std::fs::read_dir(out.join(RUNS_DIR))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    assert_eq!(
        runs.len(),
        24,
        "2 conditions x 2 modes x 6 thresholds for one model"
    );

    // Scripted-policy arithmetic: correct on the third generation call means
    // greedy (one attempt) never succeeds and best-of-n succeeds on attempt 3.
    let greedy: Vec<InferenceRecord> = util::read_jsonl(
        &out.join(RUNS_DIR)
            .join("mock-a3_openmath_greedy_T0.0.jsonl"),
    )
    .unwrap();
    assert_eq!(greedy.len(), 20);
    assert!((accuracy(&greedy).unwrap() - 0.0).abs() <= 1e-12);

    let best: Vec<InferenceRecord> = util::read_jsonl(
        &out.join(RUNS_DIR)
            .join("mock-a3_openmath_bestofn_T0.0.jsonl"),
    )
    .unwrap();
    assert_eq!(best.len(), 20);
    assert!((accuracy(&best).unwrap() - 1.0).abs() <= 1e-12);
    assert!((mean_attempts(&best).unwrap().unwrap() - 3.0).abs() <= 1e-12);

    assert!(out.join("reports/report.json").exists());
    println!(
        "ACCEPTANCE 11 offline run-all in {elapsed:.1?}, 24 run files, greedy 0% / best-of-n attempts 3.0: PASS"
    );
}

// ---------------------------------------------------------------------------
// 12. Resume safety across an interrupted inference stage
// ---------------------------------------------------------------------------

/// `(file name, sorted problem ids)` for every record file of a run directory.
fn run_keys(out: &Path) -> BTreeMap<String, Vec<String>> {
    let mut keys = BTreeMap::new();
    for entry in std::fs::read_dir(out.join(RUNS_DIR)).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "jsonl") {
            continue;
        }
        let records: Vec<InferenceRecord> = util::read_jsonl(&path).unwrap();
        let mut ids: Vec<String> = records.into_iter().map(|r| r.problem_id).collect();
        ids.sort();
        keys.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            ids,
        );
    }
    keys
}

#[test]
fn acceptance_12_resume_without_duplicates() {
    // Uninterrupted reference run.
    let dir_a = tempfile::tempdir().unwrap();
    let out_a = dir_a.path().join("out");
    Pipeline::new(offline_config(&out_a, "mock:always_correct", "mock-model"))
        .unwrap()
        .run_all()
        .unwrap();
    let reference = run_keys(&out_a);

    // Second run, then rewind it to the state an inference-stage kill leaves
    // behind: some record files complete, one with a torn trailing record,
    // the rest missing, and no completion entry in the manifest.
    let dir_b = tempfile::tempdir().unwrap();
    let out_b = dir_b.path().join("out");
    Pipeline::new(offline_config(&out_b, "mock:always_correct", "mock-model"))
        .unwrap()
        .run_all()
        .unwrap();

    let mut files: Vec<PathBuf> = std::fs::read_dir(out_b.join(RUNS_DIR))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    assert_eq!(files.len(), 24);
    // Find a file with records to tear (high thresholds may be empty).
    let torn_index = files
        .iter()
        .position(|p| std::fs::read_to_string(p).unwrap().lines().count() >= 3)
        .expect("at least one populated run file");
    let torn = &files[torn_index];
    let text = std::fs::read_to_string(torn).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut rewound = lines[..2].join("\n");
    rewound.push('\n');
    // Torn tail: the first half of the next record, no trailing newline.
    rewound.push_str(&lines[2][..lines[2].len() / 2]);
    std::fs::write(torn, rewound).unwrap();
    for path in &files[torn_index + 1..] {
        std::fs::remove_file(path).unwrap();
    }
    let manifest_path = out_b.join("manifest.json");
    let mut manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    let stages = manifest["stages"].as_object_mut().unwrap();
    stages.remove("infer");
    stages.remove("evaluate");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .unwrap();

    // Restart: the driver must resume, re-running only what is missing.
    Pipeline::new(offline_config(&out_b, "mock:always_correct", "mock-model"))
        .unwrap()
        .run_all()
        .unwrap();

    let resumed = run_keys(&out_b);
    assert_eq!(
        resumed.keys().collect::<Vec<_>>(),
        reference.keys().collect::<Vec<_>>(),
        "run file sets differ"
    );
    for (file, ids) in &resumed {
        let unique: BTreeSet<&String> = ids.iter().collect();
        assert_eq!(
            unique.len(),
            ids.len(),
            "{file}: duplicate records after resume"
        );
        assert_eq!(
            ids, &reference[file],
            "{file}: record keys differ from uninterrupted run"
        );
    }
    println!(
        "ACCEPTANCE 12 resume after interrupted inference: {} files, record keys set-equal, zero duplicates: PASS",
        resumed.len()
    );
}
