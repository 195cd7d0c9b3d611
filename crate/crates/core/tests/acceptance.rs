//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use altgen::cli::{AnnotateOptions, MockFixture, MockRule, WatchConfig, WatchSession};
use altgen::dataset::{build_icon_dataset, load_captions, load_rico_dir, load_splits, write_manifest, Split};
use altgen::genai::{account_costs, build_prompt, export_finetune_dataset, validate_chat_line, FinetuneExample, PriceTable, PromptBuilder, Provenance};
use altgen::layout::parse_layout_file;
use altgen::metrics::{bleu_n, cider, meteor_lite, rouge_l, tokenize, CiderParams, SynonymTable};
use altgen::pipeline::IconImages;
use altgen::ui_model::{AblationConfig, GenerationMode, IconContext, NodeProps, TokenUsage};
use altgen::{detect_icons, extract_context, SizeFilter};
use common::corpus::{constant_fixture, echo_fixture, eval_icons, write_mini_rico};
use common::{fixtures, mock_runtime, mode_config, oracles, read_fixture, requests, NS, TEXTT};
use proptest::test_runner::{Config, TestRunner};
use rust_decimal::Decimal;
use serde_json::Value;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Check {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} vs {b}"))
}

fn rewind_context() -> Result<IconContext, String> {
    let layout = parse_layout_file(&fixtures().join("rewind_project/res/layout/activity_player.xml"), None).map_err(|e| e.to_string())?;
    let cand = detect_icons(&layout.screen)
        .into_iter()
        .find(|c| c.node.resource_id.as_deref() == Some("rewind_button"))
        .ok_or("rewind_button not detected")?;
    Ok(extract_context(&layout.screen, &cand))
}

fn ac1_context_json() -> Check {
    let t = Instant::now();
    let json = rewind_context()?.to_canonical_json();
    ensure(json == read_fixture("rewind_context.json"), || format!("context differs:\n{json}"))?;
    ensure(t.elapsed() < Duration::from_secs(1), || format!("took {:?}", t.elapsed()))
}

fn ac2_prompt_goldens() -> Check {
    let mut ctx = rewind_context()?;
    let mmt = build_prompt(&ctx, GenerationMode::MMT_ICON, AblationConfig::FULL).map_err(|e| e.to_string())?;
    ensure(mmt.text == read_fixture("rewind_prompt_mmt.txt"), || "MMT prompt differs".into())?;
    ctx.icon_label = Some("rewind".into());
    let textt = build_prompt(&ctx, GenerationMode::TEXT_T, AblationConfig::FULL).map_err(|e| e.to_string())?;
    ensure(textt.text == read_fixture("rewind_prompt_textt.txt"), || "TextT prompt differs".into())
}

fn ac3_metric_oracles() -> Check {
    let t = Instant::now();
    let cases = common::cases::cases();
    ensure(cases.len() >= 20, || "fewer than 20 cases".into())?;
    let none = SynonymTable::default();
    let items: Vec<(Vec<String>, Vec<Vec<String>>)> =
        cases.iter().map(|(c, r)| (tokenize(c), r.iter().map(|x| tokenize(x)).collect())).collect();
    for (c, r) in &items {
        let what = c.join(" ");
        close(bleu_n(c, r, 1), oracles::bleu(c, r, 1), 1e-9, &format!("BLEU-1 {what}"))?;
        close(bleu_n(c, r, 2), oracles::bleu(c, r, 2), 1e-9, &format!("BLEU-2 {what}"))?;
        close(rouge_l(c, r), oracles::rouge_l(c, r), 1e-9, &format!("ROUGE-L {what}"))?;
        close(meteor_lite(c, r, &none), oracles::meteor(c, r), 1e-9, &format!("METEOR {what}"))?;
    }
    let (cands, refs): (Vec<_>, Vec<_>) = items.iter().cloned().unzip();
    for (i, (a, b)) in cider(&cands, &refs, &CiderParams::default()).iter().zip(oracles::cider(&items)).enumerate() {
        close(*a, b, 1e-9, &format!("CIDEr item {i}"))?;
    }
    close(bleu_n(&tokenize("go back"), &[tokenize("go back 15 seconds")], 2), (-1.0f64).exp(), 1e-9, "BLEU-2 go back")?;
    close(rouge_l(&tokenize("select angola"), &[tokenize("set your location to angola")]), 0.2652, 5e-5, "ROUGE-L angola")?;
    ensure(t.elapsed() < Duration::from_secs(10), || format!("took {:?}", t.elapsed()))
}

fn corpus_scores(path: &Path) -> Result<[f64; 5], String> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let c = &v["corpus"];
    let get = |k: &str| c[k].as_f64().ok_or(format!("missing {k}"));
    Ok([get("bleu1")?, get("bleu2")?, get("rouge_l")?, get("meteor_lite")?, get("cider")?])
}

fn run_eval(dir: &Path, manifest: &Path, fixture: &MockFixture, name: &str) -> Result<[f64; 5], String> {
    let fx = dir.join(format!("{name}.mock.json"));
    std::fs::write(&fx, serde_json::to_vec(fixture).unwrap()).map_err(|e| e.to_string())?;
    let out = dir.join(format!("{name}.report.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_altgen"))
        .args(["--mode", "textt", "--mock"])
        .arg(&fx)
        .args(["eval", "--manifest"])
        .arg(manifest)
        .arg("--out")
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.code() == Some(0), || String::from_utf8_lossy(&status.stderr).into_owned())?;
    corpus_scores(&out)
}

fn ac4_eval_end_to_end() -> Check {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let icons = eval_icons(50);
    let manifest = dir.path().join("icons.jsonl");
    write_manifest(&manifest, &icons).map_err(|e| e.to_string())?;
    let good = run_eval(dir.path(), &manifest, &echo_fixture(&icons), "echo")?;
    ensure(good[0] == 1.0, || format!("BLEU-1 {}", good[0]))?;
    close(good[4], 10.0, 1e-9, "CIDEr")?;
    let bad = run_eval(dir.path(), &manifest, &constant_fixture("volume up"), "wrong")?;
    for (name, (g, b)) in ["BLEU-1", "BLEU-2", "ROUGE-L", "METEOR", "CIDEr"].iter().zip(good.iter().zip(&bad)) {
        ensure(b < g, || format!("{name} did not drop: {b} vs {g}"))?;
    }
    ensure(t.elapsed() < Duration::from_secs(30), || format!("took {:?}", t.elapsed()))
}

fn ac5_sentinel_ablation() -> Check {
    let ctx = IconContext {
        app_activity_name: "com.example.SentinelActivity".into(),
        ui_element_info: NodeProps::new(Some("ImageButton"), Some("sentinel_rid_x1"), None),
        parent_node: Some(NodeProps::new(Some("LinearLayout"), Some("sentinel_parent_x2"), None)),
        sibling_nodes: vec![NodeProps::new(Some("TextView"), Some("sentinel_sibling_x3"), None)],
        in_icon_text: vec!["SENTINEL_OCR_X4".into()],
        icon_label: Some("play".into()),
    };
    let groups = [("ocr", vec!["SENTINEL_OCR_X4"]), ("rid", vec!["sentinel_rid_x1"]), ("dom", vec!["sentinel_parent_x2", "sentinel_sibling_x3"])];
    for mode in [GenerationMode::TEXT_T, GenerationMode::MMT_ICON] {
        for (row, removed) in AblationConfig::table_rows()[1..].iter().zip(["ocr", "rid", "dom"]) {
            let text = build_prompt(&ctx, mode, *row).map_err(|e| e.to_string())?.text;
            for (group, tokens) in &groups {
                for t in tokens {
                    ensure(text.contains(t) == (*group != removed), || format!("{mode} / {}: {t}", row.label()))?;
                }
            }
        }
    }
    Ok(())
}

fn ac6_injection_property() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&common::xmlgen::injection_case(), |(root, prolog, pick, alt)| {
            common::xmlgen::check_injection(&root, prolog, &pick, &alt).map_err(proptest::test_runner::TestCaseError::fail)
        })
        .map_err(|e| e.to_string())
}

fn ac7_mini_rico() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let want = write_mini_rico(dir.path());
    let (screens, _) = load_rico_dir(&dir.path().join("rico")).map_err(|e| e.to_string())?;
    let captions = load_captions(&dir.path().join("captions.csv")).map_err(|e| e.to_string())?;
    let splits = load_splits(&dir.path().join("splits.csv")).map_err(|e| e.to_string())?;
    let b = build_icon_dataset(&screens, &captions, &splits, &SizeFilter::default());
    let got = |s: Split| (b.stats.split(s).icons, b.stats.split(s).labels);
    ensure(got(Split::Train) == want.train && got(Split::Valid) == want.valid && got(Split::Test) == want.test, || format!("{:?}", b.stats))?;
    ensure(b.stats.screens == want.screens, || format!("screens {}", b.stats.screens))?;
    let r = &b.report;
    ensure(
        (r.unknown_screen_captions, r.unmatched_captions, r.size_filtered_icons, r.unsplit_icons, r.truncated_label_sets)
            == (want.unknown_screen_captions, want.unmatched_captions, want.size_filtered_icons, want.unsplit_icons, want.truncated_label_sets),
        || format!("{r:?}"),
    )?;
    let test: HashMap<&str, Vec<&str>> = b
        .icons
        .iter()
        .filter(|i| i.split == Split::Test)
        .filter_map(|i| Some((i.context.ui_element_info.resource_id()?, i.labels.iter().map(String::as_str).collect())))
        .collect();
    ensure(test == want.test_labels.iter().cloned().collect(), || format!("test labels {test:?}"))
}

fn watch_layout(extra: &str) -> String {
    format!("<LinearLayout {NS}\n    android:id=\"@+id/toolbar\">\n    <ImageButton\n        android:id=\"@+id/back\"\n        android:contentDescription=\"go back\" />\n{extra}</LinearLayout>\n")
}

fn ac8_watch() -> Check {
    let new_button = "    <ImageButton\n        android:id=\"@+id/play\"\n        android:src=\"@drawable/ic_play\" />\n";
    let options = AnnotateOptions {
        mode: GenerationMode::MMT_ICON,
        ablation: AblationConfig::FULL,
        force: false,
        dry_run: false,
    };
    let config = WatchConfig {
        debounce_ms: 100,
        ..WatchConfig::default()
    };
    let settle = || std::thread::sleep(Duration::from_millis(600));

    let dir = common::project(&[("activity_player", &watch_layout(""))], &["ic_play"]);
    let file = dir.path().join("res/layout/activity_player.xml");
    let rt = mock_runtime(constant_fixture("start playback"), mode_config(GenerationMode::MMT_ICON));
    let session = WatchSession::start(dir.path(), rt.pipeline.clone(), options, &config).map_err(|e| e.to_string())?;
    settle();
    let t = Instant::now();
    std::fs::write(&file, watch_layout(new_button)).map_err(|e| e.to_string())?;
    while session.log().injections() < 1 && t.elapsed() < Duration::from_secs(5) {
        std::thread::sleep(Duration::from_millis(20));
    }
    let latency = t.elapsed();
    settle();
    let log = session.stop();
    ensure(log.injections() == 1 && requests(&rt) == 1, || format!("{} injections, {} requests", log.injections(), requests(&rt)))?;
    ensure(latency < Duration::from_secs(5), || format!("latency {latency:?}"))?;

    let dir = common::project(&[("activity_player", &watch_layout(""))], &[]);
    let file = dir.path().join("res/layout/activity_player.xml");
    let rt = mock_runtime(constant_fixture("unused"), mode_config(GenerationMode::MMT_ICON));
    let session = WatchSession::start(dir.path(), rt.pipeline.clone(), options, &config).map_err(|e| e.to_string())?;
    settle();
    std::fs::write(&file, watch_layout("").replace('\n', "\n\n")).map_err(|e| e.to_string())?;
    settle();
    session.stop();
    ensure(requests(&rt) == 0, || format!("whitespace save sent {} requests", requests(&rt)))
}

fn ac9_cost() -> Check {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = mode_config(TEXTT);
    cfg.cache_dir = Some(cache.path().to_path_buf());
    let rule = |rid: &str, p: u64, c: u64| MockRule {
        pattern: Some(format!("\"resource_id\": \"{rid}\"")),
        reply: format!("reply for {rid}"),
        usage: Some(TokenUsage {
            prompt_tokens: p,
            completion_tokens: c,
        }),
        ..Default::default()
    };
    let fixture = MockFixture {
        rules: vec![rule("icon_a", 1000, 10), rule("icon_b", 2000, 20), rule("icon_c", 500, 0)],
        ..Default::default()
    };
    let rt = mock_runtime(fixture, cfg);
    let mut results = Vec::new();
    for _ in 0..2 {
        for rid in ["icon_a", "icon_b", "icon_c"] {
            let ctx = IconContext {
                app_activity_name: "com.example.MainActivity".into(),
                ui_element_info: NodeProps::new(Some("ImageButton"), Some(rid), None),
                ..Default::default()
            };
            results.push(rt.pipeline.generate(rid, &ctx, &IconImages::default(), TEXTT, AblationConfig::FULL).map_err(|e| e.to_string())?.result);
        }
    }
    let s = account_costs(&results, None);
    let want: Decimal = "0.00905".parse().unwrap();
    ensure(s.total_usd == want, || format!("total {} != {want}", s.total_usd))?;
    ensure(s.cached.requests == 3 && s.cached.usd.is_zero(), || format!("cached {:?}", s.cached))?;
    ensure(requests(&rt) == 3, || format!("{} backend requests", requests(&rt)))
}

fn ac10_finetune() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let builder = PromptBuilder {
        allow_unlabeled: true,
        ..Default::default()
    };
    let example = |class: &str, i: usize| FinetuneExample {
        icon_ref: format!("{class}#{i}"),
        class: class.into(),
        context: IconContext {
            app_activity_name: "com.example.MainActivity".into(),
            ui_element_info: NodeProps::new(Some("ImageButton"), Some(&format!("{class}_button_{i}")), None),
            ..Default::default()
        },
        image: None,
        label: format!("{class} item {i}"),
    };
    let provenance = Provenance {
        source: "acceptance".into(),
        seed: Some(1),
        population: 20,
        sampled: 18,
    };
    let ok: Vec<_> = (0..15).map(|i| example("play", i)).chain((0..3).map(|i| example("pause", i))).collect();
    let out = dir.path().join("ok.jsonl");
    export_finetune_dataset(&ok, TEXTT, &builder, "m", &PriceTable::default(), &provenance, &out).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    ensure(text.lines().count() == 18, || "wrong line count".into())?;
    for line in text.lines() {
        validate_chat_line(&serde_json::from_str(line).map_err(|e| e.to_string())?)?;
    }
    let over: Vec<_> = (0..16).map(|i| example("play", i)).collect();
    let out = dir.path().join("over.jsonl");
    ensure(export_finetune_dataset(&over, TEXTT, &builder, "m", &PriceTable::default(), &provenance, &out).is_err(), || "16 records of one class accepted".into())?;
    ensure(!out.exists(), || "oversized export wrote a file".into())
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 10] = [
        ("context JSON matches the golden within 1 s", ac1_context_json),
        ("prompts match the goldens byte for byte", ac2_prompt_goldens),
        ("metrics agree with oracles within 1e-9", ac3_metric_oracles),
        ("eval: echo scores perfect, wrong label scores lower", ac4_eval_end_to_end),
        ("each ablation removes exactly its component", ac5_sentinel_ablation),
        ("injection is reversible and refuses doubles", ac6_injection_property),
        ("mini corpus counts are exact", ac7_mini_rico),
        ("watch: one request per new icon, none for whitespace", ac8_watch),
        ("cost summary is exact, cached repeats cost nothing", ac9_cost),
        ("fine-tune export validates and enforces the cap", ac10_finetune),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(()) => println!("PASS AC{:<2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL AC{:<2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
