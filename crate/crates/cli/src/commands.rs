use std::path::Path;

use adavu_core::events::{
    build_video_events, classify_onsets, detect_sync, estimate_period, estimate_tempo, label_bar_structure,
    read_annotation_csv, read_onsets_csv, AnnotationRecord, AudioEvent, AudioEventKind, BarLabel, LagStats,
    MeterEstimate, Onset, SyncEvent, SyncEventKind, TempoEstimate, VideoEvent,
};
use adavu_core::laban::{build_score, MappingDb};
use adavu_core::labanxml::{generate_xml, parse_xml};
use adavu_core::ontology::{validate_performance, BolToken, OntologyError, PerformanceReport, Registry};
use adavu_core::recognizer::{
    evaluate, label_frames, read_skeleton_csv, segment_key_postures, train, CentroidModel, FramePrediction,
    PostureClassifier,
};
use adavu_core::staff::{render_svg, StaffLayout};
use serde::Serialize;

use crate::{
    load_mapping_db, load_registry, open, read_text, write_json, write_output, AnalyzeSyncArgs, CmdResult, Failure,
    PredictArgs, RenderArgs, TrainArgs, TranscribeArgs, ValidateOntologyArgs,
};

const DEFAULT_BAR_LENGTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarSummary {
    pub bar_length: usize,
    pub complete_bars: usize,
    pub bar_count: usize,
    pub downbeat_ids: Vec<u32>,
    pub upbeat_ids: Vec<u32>,
}

/// One audio event and, for full and half beats, whether a key posture holds on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeatStatus {
    pub id: u32,
    pub kind: AudioEventKind,
    pub time_s: f64,
    pub bol: Option<BolToken>,
    pub bar_index: Option<u32>,
    pub beat_in_bar: Option<u32>,
    pub bar_label: Option<BarLabel>,
    /// None for events that are not checked (quarter beats, bol-only events).
    pub synced: Option<bool>,
    pub video_id: Option<u32>,
    pub posture_id: Option<String>,
    pub lag_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnalyzeSyncReport {
    pub meter: Option<MeterEstimate>,
    pub bars: Option<BarSummary>,
    pub beats_checked: usize,
    pub synced: usize,
    pub unsynced: usize,
    pub lag: Option<LagStats>,
    pub beats: Vec<BeatStatus>,
    pub sync_events: Vec<SyncEvent>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscribeReport {
    pub status: &'static str,
    pub title: String,
    pub adavu: Option<String>,
    pub measures: usize,
    pub key_postures: Vec<AnnotationRecord>,
    pub sync: Option<AnalyzeSyncReport>,
    pub validation: Option<PerformanceReport>,
    pub errors: Vec<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologyReport {
    pub status: &'static str,
    pub sollukattus: usize,
    pub adavus: usize,
    pub postures: usize,
    pub mapping_records: usize,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCount {
    pub posture_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub classes: Vec<ClassCount>,
    pub frames_used: usize,
    pub training_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictReport {
    pub frames: Vec<FramePrediction>,
    pub key_postures: Vec<AnnotationRecord>,
}

const OK: &str = "ok";
const FAILED: &str = "validation_failed";

fn read_onsets(path: &Path) -> CmdResult<Vec<Onset>> {
    read_onsets_csv(open(path)?).map_err(|e| Failure::from(e).context(path.display().to_string()))
}

fn read_annotation(path: &Path) -> CmdResult<Vec<AnnotationRecord>> {
    read_annotation_csv(open(path)?).map_err(|e| Failure::from(e).context(path.display().to_string()))
}

fn warn_all(diagnostics: &[String]) {
    for d in diagnostics {
        log::warn!("{d}");
    }
}

struct AudioAnalysis {
    events: Vec<AudioEvent>,
    meter: MeterEstimate,
    bars: BarSummary,
}

fn analyze_audio(
    onsets: &[Onset],
    period: Option<f64>,
    bar_length: usize,
    diagnostics: &mut Vec<String>,
) -> CmdResult<Option<AudioAnalysis>> {
    if onsets.is_empty() {
        diagnostics.push("no onsets in the audio event file".into());
        return Ok(None);
    }
    let period = match period {
        Some(p) if p.is_finite() && p > 0.0 => p,
        Some(p) => return Err(Failure::validation(format!("--period must be positive, got {p}"))),
        None => {
            let times: Vec<f64> = onsets.iter().map(|o| o.time_s).collect();
            estimate_period(&times)?.period_s
        }
    };
    let c = classify_onsets(onsets, period)?;
    diagnostics.extend(c.diagnostics);
    let full: Vec<AudioEvent> = c.events.iter().filter(|e| e.kind.is_full_beat()).cloned().collect();
    let tempo = if full.len() >= 3 {
        let t = estimate_tempo(&full)?;
        diagnostics.extend(t.diagnostics.iter().cloned());
        t
    } else {
        diagnostics.push(format!(
            "only {} full beats; period kept at {period:.3} s",
            full.len()
        ));
        TempoEstimate {
            period_s: period,
            bpm: 60.0 / period,
            interval_count: 0,
            diagnostics: Vec::new(),
        }
    };
    let bars = label_bar_structure(&c.events, bar_length)?;
    diagnostics.extend(bars.diagnostics.iter().cloned());
    let ids = |label| {
        bars.events
            .iter()
            .filter(|e| e.bar_label == Some(label))
            .map(|e| e.id)
            .collect()
    };
    let summary = BarSummary {
        bar_length,
        complete_bars: bars.complete_bars,
        bar_count: bars.bar_count,
        downbeat_ids: ids(BarLabel::Downbeat),
        upbeat_ids: ids(BarLabel::Upbeat),
    };
    let meter = MeterEstimate::new(&tempo, &bars.events, bar_length);
    Ok(Some(AudioAnalysis {
        events: bars.events,
        meter,
        bars: summary,
    }))
}

fn sync_report(
    onsets: &[Onset],
    video: &[VideoEvent],
    period: Option<f64>,
    bar_length: usize,
    tolerance: f64,
) -> CmdResult<AnalyzeSyncReport> {
    let mut report = AnalyzeSyncReport::default();
    let Some(audio) = analyze_audio(onsets, period, bar_length, &mut report.diagnostics)? else {
        return Ok(report);
    };
    let sync = detect_sync(&audio.events, video, tolerance)?;
    report.beats = audio
        .events
        .iter()
        .map(|e| {
            let matched = sync.events.iter().find(|s| {
                s.audio_id == e.id
                    && matches!(s.kind, SyncEventKind::PostureAtFullBeat | SyncEventKind::PostureAtHalfBeat)
            });
            let checked = e.kind.is_full_beat() || e.kind.is_half_beat();
            BeatStatus {
                id: e.id,
                kind: e.kind,
                time_s: e.time_s,
                bol: e.bol,
                bar_index: e.bar_index,
                beat_in_bar: e.beat_in_bar,
                bar_label: e.bar_label,
                synced: checked.then_some(matched.is_some()),
                video_id: matched.and_then(|s| s.video_id),
                posture_id: matched.and_then(|s| s.posture_id.clone()),
                lag_s: matched.map(|s| s.lag_s),
            }
        })
        .collect();
    report.meter = Some(audio.meter);
    report.bars = Some(audio.bars);
    report.beats_checked = sync.beats_checked;
    report.synced = sync.synced_beat_ids.len();
    report.unsynced = sync.unsynced_beat_ids.len();
    report.lag = sync.lag;
    report.sync_events = sync.events;
    report.diagnostics.extend(sync.diagnostics);
    Ok(report)
}

/// Tempo, bars and beat/posture synchronization of an onset file against a
/// key-posture annotation.
pub fn cmd_analyze_sync(args: &AnalyzeSyncArgs) -> CmdResult<AnalyzeSyncReport> {
    let onsets = read_onsets(&args.audio_events)?;
    let records = read_annotation(&args.annotation)?;
    let video = build_video_events(&records, None)?;
    let report = sync_report(&onsets, &video, args.period, args.bar_length, args.tolerance)?;
    warn_all(&report.diagnostics);
    write_json(args.report.as_deref(), &report)?;
    Ok(report)
}

fn recognize(skeleton: &Path, model: &Path, min_run: usize, max_distance: Option<f64>) -> CmdResult<PredictReport> {
    let frames = read_skeleton_csv(open(skeleton)?).map_err(|e| Failure::from(e).context(skeleton.display().to_string()))?;
    let model = CentroidModel::load(model)?;
    let predictions = frames
        .iter()
        .map(|s| {
            Ok(FramePrediction {
                frame: s.frame,
                prediction: model.predict(s)?,
            })
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let key_postures = segment_key_postures(&predictions, min_run, max_distance);
    Ok(PredictReport {
        frames: predictions,
        key_postures,
    })
}

/// Key postures, from an annotation or recognized from skeleton frames, to
/// LabanXML and SVG. With audio events the report includes tempo, bars and
/// sync; with an Adavu it includes a check of the performance against it.
pub fn cmd_transcribe(args: &TranscribeArgs) -> CmdResult<TranscribeReport> {
    let db = load_mapping_db(args.sources.mapping_db.as_deref())?;
    let records = match (&args.annotation, &args.skeleton, &args.model) {
        (Some(a), _, _) => read_annotation(a)?,
        (None, Some(s), Some(m)) => recognize(s, m, args.min_run, None)?.key_postures,
        _ => {
            return Err(Failure::environment(
                "transcribe needs --annotation, or --skeleton together with --model",
            ))
        }
    };
    let registry = match (&args.adavu, &args.sources.ontology) {
        (None, None) => None,
        (_, dir) => Some(load_registry(dir.as_deref())?),
    };
    let adavu = match (&args.adavu, &registry) {
        (Some(id), Some(r)) => Some(
            r.find_adavu(id)
                .ok_or_else(|| Failure::validation(format!("unknown adavu '{id}'")))?
                .clone(),
        ),
        _ => None,
    };
    let title = args
        .title
        .clone()
        .or_else(|| adavu.as_ref().map(|a| a.slug()))
        .unwrap_or_else(|| "transcription".to_string());
    let bar_length = args
        .bar_length
        .or_else(|| {
            let (a, r) = (adavu.as_ref()?, registry.as_ref()?);
            r.sollukattu(&a.sollukattu).map(|s| s.bar_length)
        })
        .unwrap_or(DEFAULT_BAR_LENGTH);

    let mut report = TranscribeReport {
        status: OK,
        title: title.clone(),
        adavu: adavu.as_ref().map(|a| a.slug()),
        measures: records.len(),
        key_postures: records.clone(),
        sync: None,
        validation: None,
        errors: Vec::new(),
        diagnostics: Vec::new(),
    };

    for (i, r) in records.iter().enumerate() {
        if db.record(&r.posture_name).is_none() {
            report.errors.push(format!(
                "record {}: posture '{}' has no Laban mapping: {}",
                i + 1,
                r.posture_name,
                r.describe()
            ));
        }
    }
    let video = match build_video_events(&records, None) {
        Ok(v) => v,
        Err(e) => {
            report.errors.push(e.to_string());
            Vec::new()
        }
    };
    if !report.errors.is_empty() {
        return Err(fail_with_report(report, args.report.as_deref()));
    }

    let names: Vec<&str> = records.iter().map(|r| r.posture_name.as_str()).collect();
    let score = build_score(&title, &names, &db)?;
    let xml = generate_xml(&score);
    let svg = render_svg(&score, &StaffLayout::default());
    report.diagnostics.extend(svg.warnings.iter().cloned());

    if let (Some(a), Some(r)) = (&adavu, &registry) {
        match validate_performance(&records, a, r) {
            Ok(v) => {
                for m in &v.posture_mismatches {
                    report.errors.push(format!(
                        "beat {}: expected posture {}, found {}",
                        m.beat, m.expected, m.found
                    ));
                }
                for d in &v.bol_deviations {
                    report.diagnostics.push(format!(
                        "beat {}: bols {:?} differ from the sollukattu's {:?}",
                        d.beat, d.found, d.expected
                    ));
                }
                report.validation = Some(v);
            }
            Err(OntologyError::Validation(list)) => report.errors.extend(list),
            Err(e) => return Err(e.into()),
        }
    }

    if let Some(path) = &args.audio_events {
        let onsets = read_onsets(path)?;
        let sync = sync_report(&onsets, &video, args.period, bar_length, args.tolerance)?;
        report.diagnostics.extend(sync.diagnostics.iter().map(|d| format!("sync: {d}")));
        report.sync = Some(sync);
    }

    if let Some(p) = &args.out_xml {
        write_output(Some(p), &xml)?;
    }
    if let Some(p) = &args.out_svg {
        write_output(Some(p), &svg.svg)?;
    }
    if !report.errors.is_empty() {
        return Err(fail_with_report(report, args.report.as_deref()));
    }
    warn_all(&report.diagnostics);
    write_json(args.report.as_deref(), &report)?;
    Ok(report)
}

fn fail_with_report(mut report: TranscribeReport, path: Option<&Path>) -> Failure {
    report.status = FAILED;
    warn_all(&report.diagnostics);
    if let Err(e) = write_json(path, &report) {
        return e;
    }
    Failure::validation(report.errors.join("; "))
}

/// Loads both knowledge bases and checks that every posture an Adavu uses
/// can be transcribed.
pub fn cmd_validate_ontology(args: &ValidateOntologyArgs) -> CmdResult<OntologyReport> {
    let mut report = OntologyReport {
        status: OK,
        sollukattus: 0,
        adavus: 0,
        postures: 0,
        mapping_records: 0,
        errors: Vec::new(),
        warnings: Vec::new(),
    };
    let registry = match load_registry(args.sources.ontology.as_deref()) {
        Ok(r) => Some(r),
        Err(Failure::Validation(e)) => {
            report.errors.push(format!("{e:#}"));
            None
        }
        Err(e) => return Err(e),
    };
    let db = match load_mapping_db(args.sources.mapping_db.as_deref()) {
        Ok(db) => Some(db),
        Err(Failure::Validation(e)) => {
            report.errors.push(format!("{e:#}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(r) = &registry {
        report.sollukattus = r.sollukattus().len();
        report.adavus = r.adavus().len();
        report.postures = r.postures().count();
        report.warnings.extend(r.warnings().iter().cloned());
    }
    if let (Some(r), Some(db)) = (&registry, &db) {
        report.mapping_records = db.len();
        let logged = report.warnings.len();
        cross_check(r, db, &mut report);
        warn_all(&report.warnings[logged..]);
    }
    if !report.errors.is_empty() {
        report.status = FAILED;
        write_json(args.report.as_deref(), &report)?;
        return Err(Failure::validation(report.errors.join("; ")));
    }
    write_json(args.report.as_deref(), &report)?;
    Ok(report)
}

fn cross_check(r: &Registry, db: &MappingDb, report: &mut OntologyReport) {
    for a in r.adavus() {
        for id in a.initial_posture.iter().chain(&a.posture_sequence) {
            if db.record(id).is_none() {
                report.errors.push(format!("{a}: posture {id} has no Laban mapping"));
            }
        }
    }
    for p in r.postures() {
        if db.record(&p.posture_id).is_none() {
            report.warnings.push(format!("posture {} has no Laban mapping", p.posture_id));
        }
    }
    for rec in db.records() {
        if r.posture(&rec.posture_id).is_none() {
            report.warnings.push(format!("mapping record {} names no catalogued posture", rec.posture_id));
        }
    }
}

/// LabanXML to SVG.
pub fn cmd_render(args: &RenderArgs) -> CmdResult<()> {
    let text = read_text(&args.xml)?;
    let parsed = parse_xml(&text).map_err(|e| Failure::from(e).context(args.xml.display().to_string()))?;
    warn_all(&parsed.warnings);
    let out = render_svg(&parsed.score, &StaffLayout::default());
    warn_all(&out.warnings);
    write_output(args.out_svg.as_deref(), &out.svg)
}

/// Trains a nearest-centroid model on the skeleton frames inside annotated
/// key-posture ranges.
pub fn cmd_train(args: &TrainArgs) -> CmdResult<TrainReport> {
    let frames =
        read_skeleton_csv(open(&args.skeleton)?).map_err(|e| Failure::from(e).context(args.skeleton.display().to_string()))?;
    let records = read_annotation(&args.annotation)?;
    let labeled = label_frames(&frames, &records);
    if labeled.is_empty() {
        return Err(Failure::validation("no skeleton frame lies inside an annotated key posture"));
    }
    let model = train(&labeled)?;
    let eval = evaluate(&model, &labeled)?;
    model.save(&args.model)?;
    let report = TrainReport {
        classes: model
            .classes()
            .into_iter()
            .map(|id| ClassCount {
                posture_id: id.to_string(),
                count: model.training_count(id).unwrap_or(0),
            })
            .collect(),
        frames_used: labeled.len(),
        training_accuracy: eval.accuracy,
    };
    write_json(args.report.as_deref(), &report)?;
    Ok(report)
}

/// Per-frame posture predictions and the key postures they form.
pub fn cmd_predict(args: &PredictArgs) -> CmdResult<PredictReport> {
    let report = recognize(&args.skeleton, &args.model, args.min_run, args.max_distance)?;
    write_json(args.report.as_deref(), &report)?;
    Ok(report)
}
