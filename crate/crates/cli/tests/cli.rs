//! End-to-end tests of the `concord` binary: exit codes, output files, and
//! stdout/stderr separation.

use std::io::{Cursor, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_concord"))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn analyze_bundled_corpus_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));
    for name in [
        "pairs_sections.csv",
        "pairs_documents.csv",
        "scatter.json",
        "distributions.json",
        "agenda.md",
        "bundle.json",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    // Data goes to files; stdout stays clean.
    assert!(stdout_of(&output).is_empty());
    assert!(stderr_of(&output).contains("wrote"));
}

#[test]
fn analyze_empty_directory_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["analyze"])
        .arg(tmp.path())
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("no parsable documents"));
}

#[test]
fn analyze_unreachable_remote_endpoint_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(tmp.path().join("out"))
        .args(["--backend-embed", "remote", "--endpoint", "http://127.0.0.1:1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr_of(&output));
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let output = bin()
            .args(["analyze"])
            .arg(fixtures_dir().join("corpus"))
            .arg("--out")
            .arg(tmp.path().join(out))
            .args(["--jobs", jobs])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0));
    }
    for name in ["bundle.json", "agenda.md", "pairs_sections.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across --jobs");
    }
}

#[test]
fn print_config_shows_effective_values_and_runs_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(&out)
        .args(["--weights", "0.7", "--seed", "9", "--print-config"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let config: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(config["heading_weight"], 0.7);
    assert_eq!(config["seed"], 9);
    assert!(!out.exists(), "print-config must not run the analysis");
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("run.json");
    std::fs::write(&config_path, r#"{"seed": 5, "k": 4}"#).unwrap();
    let output = bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(tmp.path().join("out"))
        .arg("--config")
        .arg(&config_path)
        .args(["--seed", "11", "--print-config"])
        .output()
        .unwrap();
    let config: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(config["seed"], 11, "flag overrides file");
    assert_eq!(config["k"], 4, "file value survives");
}

#[test]
fn eval_reproduces_published_correlations() {
    let eval_dir = fixtures_dir().join("eval");
    let expected = [
        ("table3", "r = 0.98", ""),
        ("table4", "r = 0.49", ""),
        ("table5", "r = 0.99", ""),
        ("table6", "r = 0.67", "n_dropped = 3"),
    ];
    for (table, want, extra) in expected {
        let output = bin()
            .args(["eval"])
            .arg(eval_dir.join(format!("{table}_algorithm.csv")))
            .arg(eval_dir.join(format!("{table}_human.csv")))
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0));
        let stdout = stdout_of(&output);
        assert!(stdout.contains(want), "{table}: {stdout}");
        if !extra.is_empty() {
            assert!(stdout.contains(extra), "{table}: {stdout}");
        }
    }
}

#[test]
fn eval_with_unknown_pair_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let algo = tmp.path().join("algo.csv");
    let human = tmp.path().join("human.csv");
    std::fs::write(&algo, "pair_id,score\nPA-1,0.9\n").unwrap();
    std::fs::write(&human, "pair_id,score\nPA-9,0.5\n").unwrap();
    let output = bin().args(["eval"]).arg(&algo).arg(&human).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("PA-9"));
}

#[test]
fn eval_with_too_few_joined_rows_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let algo = tmp.path().join("algo.csv");
    let human = tmp.path().join("human.csv");
    std::fs::write(&algo, "pair_id,score\nPA-1,0.9\nPA-2,0.5\n").unwrap();
    std::fs::write(&human, "pair_id,score\nPA-1,0.5\nPA-2,NA\n").unwrap();
    let output = bin().args(["eval"]).arg(&algo).arg(&human).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn eval_accepts_emitted_pairs_csv() {
    // The combined column of pairs_sections.csv joins directly.
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let pairs_csv = out.join("pairs_sections.csv");
    let text = std::fs::read_to_string(&pairs_csv).unwrap();
    let mut human = String::from("pair_id,score\n");
    for line in text.lines().skip(1).take(4) {
        let id = line.split(',').next().unwrap();
        human.push_str(&format!("{id},0.5\n"));
    }
    // Vary one row so variance is non-zero.
    let human = human.replacen("0.5\n", "0.9\n", 1);
    let human_path = tmp.path().join("human.csv");
    std::fs::write(&human_path, human).unwrap();
    let output = bin()
        .args(["eval"])
        .arg(&pairs_csv)
        .arg(&human_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));
    assert!(stdout_of(&output).starts_with("r = "));
}

#[test]
fn summarize_markdown_file_prints_one_block_per_section() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("Acme_single.md");
    std::fs::write(
        &file,
        "## Narrow bandwidth\n\nProposal 1: keep 20MHz. The narrow option saves power. Wider options cost more.\n",
    )
    .unwrap();
    let output = bin().args(["summarize"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = stdout_of(&output);
    assert_eq!(stdout.matches("## ").count(), 1);
    assert!(stdout.contains("Proposals: 1"));
}

#[test]
fn summarize_docx_prints_sections_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("Acme_doc.docx");
    let body = format!(
        "{}{}{}{}",
        heading_xml(1, "First topic"),
        para_xml("Text about the first topic sits here. It uses several sentences for flavour."),
        heading_xml(1, "Second topic"),
        para_xml("Text about the second topic follows after. More words arrive here."),
    );
    std::fs::write(&file, docx_bytes(&body)).unwrap();
    let output = bin().args(["summarize"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));
    let stdout = stdout_of(&output);
    let first = stdout.find("First topic").expect("first section");
    let second = stdout.find("Second topic").expect("second section");
    assert!(first < second, "sections out of order");
}

#[test]
fn summarize_non_document_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("broken.docx");
    std::fs::write(&file, b"this is not a zip archive").unwrap();
    let output = bin().args(["summarize"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let missing = tmp.path().join("nothing.md");
    let output = bin().args(["summarize"]).arg(&missing).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn report_command_reemits_from_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("one");
    let out2 = tmp.path().join("two");
    bin()
        .args(["analyze"])
        .arg(fixtures_dir().join("corpus"))
        .arg("--out")
        .arg(&out1)
        .output()
        .unwrap();
    let output = bin()
        .args(["report"])
        .arg(out1.join("bundle.json"))
        .arg("--out")
        .arg(&out2)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));
    for name in ["agenda.md", "pairs_sections.csv", "scatter.json", "bundle.json"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs after report round-trip");
    }
}

#[test]
fn report_rejects_garbage_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = tmp.path().join("bundle.json");
    std::fs::write(&bundle, "{\"not\": \"a bundle\"}").unwrap();
    let output = bin()
        .args(["report"])
        .arg(&bundle)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

// Minimal OOXML fixture builder, mirroring the core test helper.
fn docx_bytes(body_xml: &str) -> Vec<u8> {
    let document = format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<w:document xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main"><w:body>{body_xml}</w:body></w:document>"#
    );
    let content_types = r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="xml" ContentType="application/xml"/><Override PartName="/word/document.xml" ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/></Types>"#;
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut zip = zip::ZipWriter::new(&mut cursor);
        let opts = zip::write::FileOptions::default();
        zip.start_file("[Content_Types].xml", opts).unwrap();
        zip.write_all(content_types.as_bytes()).unwrap();
        zip.start_file("word/document.xml", opts).unwrap();
        zip.write_all(document.as_bytes()).unwrap();
        zip.finish().unwrap();
    }
    cursor.into_inner()
}

fn para_xml(text: &str) -> String {
    format!("<w:p><w:r><w:t xml:space=\"preserve\">{text}</w:t></w:r></w:p>")
}

fn heading_xml(level: usize, text: &str) -> String {
    format!(
        "<w:p><w:pPr><w:pStyle w:val=\"Heading{level}\"/></w:pPr><w:r><w:t>{text}</w:t></w:r></w:p>"
    )
}
