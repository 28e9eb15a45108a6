#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adavu_core::events::{read_annotation_csv, read_onsets_csv};
use adavu_core::labanxml::parse_xml;
use adavu_core::recognizer::write_skeleton_csv;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn adavu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adavu")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn transcribe_natta_writes_score_staff_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (xml, svg, report) = (dir.path().join("n.xml"), dir.path().join("n.svg"), dir.path().join("r.json"));
    let annotation = data("fixtures/natta1_annotation.csv");
    let o = adavu(&[
        "transcribe",
        "--annotation",
        p(&annotation),
        "--adavu",
        "natta_1",
        "--out-xml",
        p(&xml),
        "--out-svg",
        p(&svg),
        "--report",
        p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let parsed = parse_xml(&fs::read_to_string(&xml).unwrap()).unwrap();
    assert_eq!(parsed.score.title, "natta_1");
    let ids: Vec<&str> = parsed.score.frames.iter().map(|f| f.posture_id.as_deref().unwrap()).collect();
    assert_eq!(ids, ["Natta1P1", "Natta1P2", "Natta1P1", "Natta1P3", "Natta1P1"]);
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("class=\"cell\"").count(), 5);

    let r = json(&report);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["measures"], 5);
    assert_eq!(r["validation"]["beats_checked"], 5);
    assert!(r["errors"].as_array().unwrap().is_empty());
    // The one bol deviation is reported, not fatal.
    assert!(stderr(&o).contains("beat 2"));
}

#[test]
fn missing_mapping_db_is_an_environment_error() {
    let o = adavu(&[
        "transcribe",
        "--annotation",
        p(&data("fixtures/natta1_annotation.csv")),
        "--mapping-db",
        "/nonexistent/natta.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mapping database /nonexistent/natta.json not found"));
}

#[test]
fn unknown_posture_is_a_validation_error_naming_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let annotation = dir.path().join("a.csv");
    fs::write(
        &annotation,
        "posture_name,start_frame,end_frame,beat_number,bols\nNatta1P1,0,9,0,\nNoSuchPosture,20,29,1,tei\n",
    )
    .unwrap();
    let (xml, report) = (dir.path().join("x.xml"), dir.path().join("r.json"));
    let o = adavu(&["transcribe", "--annotation", p(&annotation), "--out-xml", p(&xml), "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&report);
    assert_eq!(r["status"], "validation_failed");
    let errors = r["errors"].as_array().unwrap();
    assert_eq!(errors.len(), 1);
    let e = errors[0].as_str().unwrap();
    assert!(e.contains("record 2") && e.contains("NoSuchPosture"), "{e}");
    assert!(!xml.exists());
}

#[test]
fn transcribe_needs_some_posture_input() {
    let o = adavu(&["transcribe"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(adavu(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(adavu(&["analyze-sync"]).status.code(), Some(1));
    assert_eq!(adavu(&["--help"]).status.code(), Some(0));
}

#[test]
fn analyze_sync_kuditta_mettu() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("s.json");
    let o = adavu(&[
        "analyze-sync",
        "--audio-events",
        p(&data("fixtures/kuditta_mettu_audio.csv")),
        "--annotation",
        p(&data("fixtures/kuditta_mettu_annotation.csv")),
        "--report",
        p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&report);
    assert_eq!((r["synced"].as_u64(), r["unsynced"].as_u64()), (Some(16), Some(0)));
    let period = r["meter"]["period_s"].as_f64().unwrap();
    assert!((1.10..=1.25).contains(&period), "{period}");
    assert_eq!(r["bars"]["bar_count"], 2);
    assert_eq!(r["bars"]["downbeat_ids"], serde_json::json!([1, 9]));
    let lag = &r["lag"];
    assert!(lag["min_s"].as_f64() <= lag["median_s"].as_f64() && lag["median_s"].as_f64() <= lag["max_s"].as_f64());
    assert!(r["beats"].as_array().unwrap().iter().all(|b| b["synced"] == true));
}

#[test]
fn shifted_annotation_reports_unsynced_beats() {
    let dir = tempfile::tempdir().unwrap();
    let original = fs::read_to_string(data("fixtures/kuditta_mettu_annotation.csv")).unwrap();
    let mut records = read_annotation_csv(original.as_bytes()).unwrap();
    let mut shifted = String::from("posture_name,start_frame,end_frame,beat_number,bols\n");
    for r in &mut records {
        r.start_frame += 30;
        r.end_frame += 30;
        shifted.push_str(&format!("{},{},{},{},{}\n", r.posture_name, r.start_frame, r.end_frame, r.beat_number, r.bols));
    }
    let annotation = dir.path().join("shifted.csv");
    fs::write(&annotation, shifted).unwrap();

    let audio = data("fixtures/kuditta_mettu_audio.csv");
    let onsets = read_onsets_csv(fs::File::open(&audio).unwrap()).unwrap();
    let expected_synced = onsets
        .iter()
        .filter(|o| {
            let frame = (o.time_s * 30.0).round() as u64;
            records.iter().any(|r| (r.start_frame..=r.end_frame).contains(&frame))
        })
        .count();

    let o = adavu(&["analyze-sync", "--audio-events", p(&audio), "--annotation", p(&annotation)]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["synced"].as_u64().unwrap() as usize, expected_synced);
    assert_eq!(r["unsynced"].as_u64().unwrap() as usize, 16 - expected_synced);
    assert!(expected_synced < 16);
}

#[test]
fn empty_audio_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("empty.csv");
    fs::write(&audio, "id,time_s,bol\n").unwrap();
    let o = adavu(&[
        "analyze-sync",
        "--audio-events",
        p(&audio),
        "--annotation",
        p(&data("fixtures/kuditta_mettu_annotation.csv")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["beats"].as_array().unwrap().is_empty());
    assert_eq!(r["meter"], Value::Null);
}

#[test]
fn malformed_audio_is_an_environment_error() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("bad.csv");
    fs::write(&audio, "id,time_s,bol\n1,abc,tei\n").unwrap();
    let o = adavu(&[
        "analyze-sync",
        "--audio-events",
        p(&audio),
        "--annotation",
        p(&data("fixtures/kuditta_mettu_annotation.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn render_reproduces_the_transcribed_staff() {
    let dir = tempfile::tempdir().unwrap();
    let (xml, svg) = (dir.path().join("n.xml"), dir.path().join("n.svg"));
    let o = adavu(&[
        "transcribe",
        "--annotation",
        p(&data("fixtures/natta1_annotation.csv")),
        "--title",
        "natta_1",
        "--out-xml",
        p(&xml),
        "--out-svg",
        p(&svg),
        "--report",
        p(&dir.path().join("r.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = adavu(&["render", "--xml", p(&xml)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), fs::read_to_string(&svg).unwrap());
}

#[test]
fn render_rejects_malformed_xml() {
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("bad.xml");
    fs::write(&xml, "<laban><attribute>").unwrap();
    assert_eq!(adavu(&["render", "--xml", p(&xml)]).status.code(), Some(1));
}

#[test]
fn validate_ontology_shipped_and_broken() {
    let o = adavu(&["validate-ontology"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r["sollukattus"].as_u64(), r["adavus"].as_u64()), (Some(23), Some(58)));
    assert!(r["errors"].as_array().unwrap().is_empty());

    // An Adavu naming a sollukattu that does not exist.
    let dir = tempfile::tempdir().unwrap();
    for f in ["sollukattus.json", "postures.json"] {
        fs::copy(data("ontology").join(f), dir.path().join(f)).unwrap();
    }
    let adavus = fs::read_to_string(data("ontology/adavus.json")).unwrap();
    fs::write(dir.path().join("adavus.json"), adavus.replacen("\"Joining A\"", "\"Joining Z\"", 1)).unwrap();
    let report = dir.path().join("r.json");
    let o = adavu(&["validate-ontology", "--ontology", p(dir.path()), "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&report);
    assert_eq!(r["status"], "validation_failed");
    assert!(r["errors"].to_string().contains("Joining Z"));

    // A mapping database without a posture that natta_1 uses.
    let mut db: Value = serde_json::from_str(&fs::read_to_string(data("mapping/natta_laban.json")).unwrap()).unwrap();
    db["records"].as_array_mut().unwrap().retain(|r| r["posture_id"] != "Natta1P3");
    let db_path = dir.path().join("db.json");
    fs::write(&db_path, db.to_string()).unwrap();
    let o = adavu(&["validate-ontology", "--mapping-db", p(&db_path)]);
    assert_eq!(o.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["errors"].to_string().contains("Natta1P3"));
}

#[test]
fn train_predict_and_transcribe_from_skeletons() {
    use common::{perturb, template};
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Natta postures are held on frames 0-9, 20-29, 40-49; moving in between.
    let held = [(0u64, "Natta1P1", 0usize), (20, "Natta1P2", 5), (40, "Natta1P3", 14)];
    let mut frames = Vec::new();
    for f in 0..50u64 {
        let mut s = match held.iter().find(|(start, _, _)| (*start..*start + 10).contains(&f)) {
            Some((_, _, k)) => perturb(&template(*k), 0.002, &mut rng),
            None => perturb(&template(20), 0.3, &mut rng),
        };
        s.frame = f;
        frames.push(s);
    }
    let mut csv = Vec::new();
    write_skeleton_csv(&mut csv, &frames).unwrap();
    let skeleton = dir.path().join("skel.csv");
    fs::write(&skeleton, csv).unwrap();
    let mut annotation = String::from("posture_name,start_frame,end_frame,beat_number,bols\n");
    for (i, (start, id, _)) in held.iter().enumerate() {
        annotation.push_str(&format!("{id},{start},{},{i},\n", start + 9));
    }
    let annotation_path = dir.path().join("a.csv");
    fs::write(&annotation_path, annotation).unwrap();

    let model = dir.path().join("model.json");
    let o = adavu(&["train", "--skeleton", p(&skeleton), "--annotation", p(&annotation_path), "--model", p(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["frames_used"], 30);
    assert_eq!(r["training_accuracy"], 1.0);

    let o = adavu(&["predict", "--skeleton", p(&skeleton), "--model", p(&model), "--max-distance", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let segments: Vec<(String, u64, u64)> = r["key_postures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            (
                s["posture_name"].as_str().unwrap().to_string(),
                s["start_frame"].as_u64().unwrap(),
                s["end_frame"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        segments,
        [("Natta1P1".to_string(), 0, 9), ("Natta1P2".to_string(), 20, 29), ("Natta1P3".to_string(), 40, 49)]
    );
    assert_eq!(r["frames"].as_array().unwrap().len(), 50);

    let xml = dir.path().join("rec.xml");
    let o = adavu(&[
        "transcribe",
        "--skeleton",
        p(&skeleton),
        "--model",
        p(&model),
        "--out-xml",
        p(&xml),
        "--report",
        p(&dir.path().join("r.json")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let parsed = parse_xml(&fs::read_to_string(&xml).unwrap()).unwrap();
    assert!(parsed.score.frames.len() >= 3);
}

#[test]
fn train_without_overlap_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = common::template(0);
    s.frame = 100;
    let mut csv = Vec::new();
    write_skeleton_csv(&mut csv, &[s]).unwrap();
    let skeleton = dir.path().join("s.csv");
    fs::write(&skeleton, csv).unwrap();
    let o = adavu(&[
        "train",
        "--skeleton",
        p(&skeleton),
        "--annotation",
        p(&data("fixtures/natta1_annotation.csv")),
        "--model",
        p(&dir.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
