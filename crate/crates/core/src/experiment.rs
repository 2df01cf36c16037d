//! The five workflows behind the command line: simulate, extract, analyze,
//! compare and sweep. Each writes plot-ready CSV tables into an output
//! directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{SimConfig, SweepConfig};
use crate::error::{Divergence, Error, Result};
use crate::io::{
    bend_rows, curvature_rows, fmt_f64, midline_rows, read_table_file, sequence_from_rows,
    table_to_string, track_from_bend_rows, write_table_file, BendRow, GapRow, MetricRow,
    MidlineRow, OverlayRow, SummaryRow,
};
use crate::kinematics::{
    bend_velocity_with, classify_profile, curvature_field_with, normalize_profile,
    overlay_profile, propagation_metrics, BendLocator, BendTrack, Classification,
    ClassifyThresholds, CurvatureField, MidlineSequence, PropagationMetrics, OVERLAY_POINTS,
};
use crate::mask::{extract_frames, read_mask, BaseHint};
use crate::midline::{DEFAULT_SMOOTH_WINDOW, DEFAULT_STATIONS};
use crate::parallel;
use crate::rodsim::{simulate_run, Material, Medium, SimSettings};

/// One invocation of a workflow.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    Simulate {
        config: PathBuf,
        out: PathBuf,
    },
    Extract {
        masks: PathBuf,
        fixture: PathBuf,
        dt: f64,
        pitch: f64,
        base_hint: BaseHint,
        out: PathBuf,
    },
    Analyze {
        midlines: PathBuf,
        stations: usize,
        out: PathBuf,
    },
    Compare {
        a: PathBuf,
        b: PathBuf,
        out: PathBuf,
    },
    Sweep {
        config: PathBuf,
        out: PathBuf,
        jobs: usize,
    },
}

/// Process exit status for a failed workflow: 1 when the inputs or
/// configuration are unusable, 2 when a run failed part-way.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Parse(_) | Error::Io(_)
        | Error::Csv(_) | Error::EmptyInput(_) => 1,
        _ => 2,
    }
}

/// Run a workflow; the returned text is a short human-readable summary.
pub fn run(spec: &ExperimentSpec) -> Result<String> {
    match spec {
        ExperimentSpec::Simulate { config, out } => {
            let cfg = SimConfig::load(config)?;
            let r = cmd_simulate(&cfg, out)?;
            Ok(format!("{} frames, verdict {}", r.frames, r.verdict))
        }
        ExperimentSpec::Extract {
            masks,
            fixture,
            dt,
            pitch,
            base_hint,
            out,
        } => {
            let (n, gaps) = cmd_extract(masks, fixture, *dt, *pitch, *base_hint, out)?;
            Ok(format!("{n} midlines, {gaps} gaps"))
        }
        ExperimentSpec::Analyze {
            midlines,
            stations,
            out,
        } => {
            let a = cmd_analyze(midlines, *stations, out)?;
            Ok(format!("verdict {}", verdict(&a)))
        }
        ExperimentSpec::Compare { a, b, out } => {
            let c = cmd_compare(a, b, out)?;
            Ok(format!(
                "rmse {}, peak difference {}",
                fmt_f64(c.rmse),
                fmt_f64(c.peak_difference)
            ))
        }
        ExperimentSpec::Sweep { config, out, jobs } => {
            let cfg = SweepConfig::load(config)?;
            let rows = cmd_sweep(&cfg, out, *jobs)?;
            Ok(format!("{} runs", rows.len()))
        }
    }
}

/// Everything derived from a midline sequence.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub field: CurvatureField,
    pub metrics: Option<PropagationMetrics>,
    pub track: BendTrack,
    /// Normalized profile over the interior window and the window's first
    /// frame.
    pub profile: Option<(BendTrack, usize)>,
    pub classification: Option<Classification>,
    /// Why `profile` or `metrics` is missing.
    pub notes: Vec<String>,
}

/// Curvature field, propagation metrics and the classified bend-velocity
/// profile. Bend points are located on the midline smoothed with the same
/// window as the curvature; the profile covers the frames during which the
/// bend point is interior to the arm.
pub fn analyze_sequence(
    seq: &MidlineSequence,
    stations: usize,
    smooth_window: usize,
    th: &ClassifyThresholds,
) -> Result<Analysis> {
    let field = curvature_field_with(seq, stations, smooth_window)?;
    let mut notes = Vec::new();
    let metrics = propagation_metrics(&field)
        .map_err(|e| notes.push(e.to_string()))
        .ok();
    let track = bend_velocity_with(seq, BendLocator::Smoothed(smooth_window))?;
    let profile = match track.interior_window() {
        None => {
            notes.push("bend point never leaves the arm ends".into());
            None
        }
        Some(w) => normalize_profile(&track.slice(w.clone()))
            .map(|p| (p, w.start))
            .map_err(|e| notes.push(e.to_string()))
            .ok(),
    };
    let classification = profile.as_ref().map(|(p, _)| classify_profile(p, th));
    Ok(Analysis {
        field,
        metrics,
        track,
        profile,
        classification,
        notes,
    })
}

pub fn verdict(a: &Analysis) -> &'static str {
    a.classification.map_or("undetermined", |c| c.class.as_str())
}

fn result_lines(a: &Analysis) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "result.{k} = {v}");
    };
    kv("class", verdict(a).into());
    if let (Some(c), Some((p, start))) = (a.classification, &a.profile) {
        kv("window_start_frame", start.to_string());
        kv("window_frames", p.t.len().to_string());
        kv("peak_position", fmt_f64(c.peak_position));
        kv("rise_fraction", fmt_f64(c.rise_fraction));
        kv("fall_fraction", fmt_f64(c.fall_fraction));
    }
    if let Some(m) = &a.metrics {
        kv("peak_kappa", fmt_f64(m.global_max));
        kv("extent", fmt_f64(m.extent));
        kv("drift_rate", fmt_f64(m.drift_rate));
    }
    for n in &a.notes {
        kv("note", n.replace('\n', " "));
    }
    s
}

fn analysis_tables(seq: &MidlineSequence, a: &Analysis) -> (String, String) {
    let curvature = table_to_string(&curvature_rows(&a.field, seq.dt()));
    let bend = table_to_string(&bend_rows(
        &a.track,
        seq.dt(),
        a.profile.as_ref().map(|(p, s)| (p, *s)),
    ));
    (curvature, bend)
}

/// In-memory outputs of one simulated run.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub midlines: String,
    pub curvature: String,
    pub bend: String,
    pub manifest: String,
    pub frames: usize,
    pub verdict: String,
    pub summary: SummaryRow,
    /// Set when the simulation diverged (without the partial frames, which
    /// are in `midlines`); only `midlines` and `manifest` are then written.
    pub diverged: Option<Divergence>,
}

/// Simulate and analyse one configuration without touching the filesystem.
pub fn run_config(cfg: &SimConfig) -> Result<RunOutputs> {
    let drive = cfg.drive_profile()?;
    let settings = SimSettings {
        duration: cfg.duration,
        output_dt: cfg.output_dt,
        dt: cfg.dt,
    };
    let mut manifest = cfg.to_text();
    let _ = writeln!(manifest, "result.omega_rad_per_s = {}", fmt_f64(cfg.omega()));
    let mut summary = SummaryRow {
        material: cfg.material.map_or("custom", Material::as_str).into(),
        rpm: match cfg.drive {
            crate::config::DriveSpec::Rotary { rpm, .. } => rpm,
            crate::config::DriveSpec::Path { .. } => 0.0,
        },
        medium: cfg.medium.map_or("custom", Medium::as_str).into(),
        status: "ok".into(),
        peak_kappa: None,
        extent: None,
        drift_rate: None,
        class: String::new(),
    };
    let run = match simulate_run(&cfg.model, &drive, &settings) {
        Ok(r) => r,
        Err(Error::Diverged(d)) => {
            let seq = MidlineSequence::new(d.partial.clone(), cfg.output_dt)?;
            let _ = writeln!(manifest, "result.status = diverged");
            let _ = writeln!(manifest, "result.error = {d}");
            summary.status = "simulation-diverged".into();
            let diverged = Divergence {
                partial: Vec::new(),
                ..*d
            };
            return Ok(RunOutputs {
                midlines: table_to_string(&midline_rows(&seq)),
                curvature: String::new(),
                bend: String::new(),
                manifest,
                frames: seq.len(),
                verdict: "undetermined".into(),
                summary,
                diverged: Some(diverged),
            });
        }
        Err(e) => return Err(e),
    };
    let seq = &run.sequence;
    let a = analyze_sequence(seq, cfg.stations, cfg.smooth_window, &cfg.thresholds)?;
    let (curvature, bend) = analysis_tables(seq, &a);
    let _ = writeln!(manifest, "result.status = ok");
    let _ = writeln!(manifest, "result.dt = {}", fmt_f64(run.dt));
    let _ = writeln!(manifest, "result.steps = {}", run.steps);
    let _ = writeln!(manifest, "result.frames = {}", seq.len());
    let _ = writeln!(manifest, "result.drive_end = {}", fmt_f64(run.drive_end));
    let _ = writeln!(manifest, "result.max_strain = {}", fmt_f64(run.max_strain));
    manifest.push_str(&result_lines(&a));
    summary.peak_kappa = a.metrics.as_ref().map(|m| m.global_max);
    summary.extent = a.metrics.as_ref().map(|m| m.extent);
    summary.drift_rate = a.metrics.as_ref().map(|m| m.drift_rate);
    summary.class = verdict(&a).into();
    Ok(RunOutputs {
        midlines: table_to_string(&midline_rows(seq)),
        curvature,
        bend,
        manifest,
        frames: seq.len(),
        verdict: verdict(&a).into(),
        summary,
        diverged: None,
    })
}

fn write_run(out: &Path, r: &RunOutputs) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("midlines.csv"), &r.midlines)?;
    std::fs::write(out.join("manifest"), &r.manifest)?;
    if r.diverged.is_none() {
        std::fs::write(out.join("curvature.csv"), &r.curvature)?;
        std::fs::write(out.join("bend.csv"), &r.bend)?;
    }
    Ok(())
}

/// Simulate `cfg` and write `midlines.csv`, `curvature.csv`, `bend.csv` and
/// `manifest` into `out`. A diverged run still writes the frames it reached
/// and the manifest, then reports the divergence.
pub fn cmd_simulate(cfg: &SimConfig, out: &Path) -> Result<RunOutputs> {
    let r = run_config(cfg)?;
    write_run(out, &r)?;
    if let Some(d) = &r.diverged {
        return Err(Error::Diverged(Box::new(d.clone())));
    }
    Ok(r)
}

/// Extract midlines from every mask file in `masks` (sorted by name).
/// Returns the number of midlines and of gaps.
pub fn cmd_extract(
    masks: &Path,
    fixture: &Path,
    dt: f64,
    pitch: f64,
    base_hint: BaseHint,
    out: &Path,
) -> Result<(usize, usize)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(masks)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && !p
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with('.'))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::EmptyInput(format!("no mask files in {}", masks.display())));
    }
    let fixture = read_mask(fixture, pitch)?;
    let frames = files
        .iter()
        .map(|f| read_mask(f, pitch))
        .collect::<Result<Vec<_>>>()?;
    let (midlines, gaps) = extract_frames(&frames, &fixture, dt, pitch, base_hint)?;
    std::fs::create_dir_all(out)?;
    let gap_rows: Vec<GapRow> = gaps
        .iter()
        .map(|g| GapRow {
            frame: g.frame as u64,
            kind: g.kind.clone(),
            message: g.message.clone(),
        })
        .collect();
    write_table_file(&out.join("gaps.csv"), &gap_rows)?;
    if midlines.is_empty() {
        write_table_file::<MidlineRow>(&out.join("midlines.csv"), &[])?;
        return Err(Error::EmptySequence(format!(
            "all {} frames failed extraction",
            frames.len()
        )));
    }
    let seq = MidlineSequence::new(midlines, dt)?;
    write_table_file(&out.join("midlines.csv"), &midline_rows(&seq))?;
    Ok((seq.len(), gaps.len()))
}

/// Curvature field and bend profile of a midline table.
pub fn cmd_analyze(midlines: &Path, stations: usize, out: &Path) -> Result<Analysis> {
    let rows: Vec<MidlineRow> = read_table_file(midlines)?;
    let seq = sequence_from_rows(&rows)?;
    let a = analyze_sequence(&seq, stations, DEFAULT_SMOOTH_WINDOW, &ClassifyThresholds::default())?;
    let (curvature, bend) = analysis_tables(&seq, &a);
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("curvature.csv"), curvature)?;
    std::fs::write(out.join("bend.csv"), bend)?;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "midlines = {}", midlines.display());
    let _ = writeln!(manifest, "stations = {stations}");
    let _ = writeln!(manifest, "smooth_window = {DEFAULT_SMOOTH_WINDOW}");
    let _ = writeln!(manifest, "result.frames = {}", seq.len());
    let _ = writeln!(manifest, "result.dt = {}", fmt_f64(seq.dt()));
    manifest.push_str(&result_lines(&a));
    std::fs::write(out.join("manifest"), manifest)?;
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub overlay: Vec<OverlayRow>,
    pub rmse: f64,
    pub peak_a: f64,
    pub peak_b: f64,
    pub peak_difference: f64,
    pub class_a: Classification,
    pub class_b: Classification,
}

/// Overlay two normalized bend profiles on the shared grid.
pub fn compare_tracks(a: &BendTrack, b: &BendTrack, th: &ClassifyThresholds) -> Result<Comparison> {
    let na = normalize_profile(a)?;
    let nb = normalize_profile(b)?;
    let (oa, ob) = (overlay_profile(&na)?, overlay_profile(&nb)?);
    let overlay: Vec<OverlayRow> = (0..OVERLAY_POINTS)
        .map(|k| OverlayRow {
            t_norm: k as f64 / (OVERLAY_POINTS - 1) as f64,
            v_norm_a: oa[k],
            v_norm_b: ob[k],
        })
        .collect();
    let rmse = (overlay
        .iter()
        .map(|r| (r.v_norm_a - r.v_norm_b).powi(2))
        .sum::<f64>()
        / OVERLAY_POINTS as f64)
        .sqrt();
    let (ca, cb) = (classify_profile(&na, th), classify_profile(&nb, th));
    Ok(Comparison {
        overlay,
        rmse,
        peak_a: ca.peak_position,
        peak_b: cb.peak_position,
        peak_difference: (ca.peak_position - cb.peak_position).abs(),
        class_a: ca,
        class_b: cb,
    })
}

/// Compare two bend tables; writes `overlay.csv` and `metrics.csv`.
pub fn cmd_compare(a: &Path, b: &Path, out: &Path) -> Result<Comparison> {
    let ta = track_from_bend_rows(&read_table_file::<BendRow>(a)?)?;
    let tb = track_from_bend_rows(&read_table_file::<BendRow>(b)?)?;
    let c = compare_tracks(&ta, &tb, &ClassifyThresholds::default())?;
    std::fs::create_dir_all(out)?;
    write_table_file(&out.join("overlay.csv"), &c.overlay)?;
    let m = |k: &str, v: String| MetricRow { key: k.into(), value: v };
    let metrics = vec![
        m("rmse", fmt_f64(c.rmse)),
        m("peak_position_a", fmt_f64(c.peak_a)),
        m("peak_position_b", fmt_f64(c.peak_b)),
        m("peak_position_difference", fmt_f64(c.peak_difference)),
        m("class_a", c.class_a.class.as_str().into()),
        m("class_b", c.class_b.class.as_str().into()),
    ];
    write_table_file(&out.join("metrics.csv"), &metrics)?;
    Ok(c)
}

/// Directory name of one grid point under `<out>/runs`.
pub fn run_dir_name(material: Material, rpm: f64, medium: Medium) -> String {
    format!("{}_{}rpm_{}", material.as_str(), fmt_f64(rpm), medium.as_str())
}

/// Run every grid point (concurrently, on `jobs` threads; 0 = all cores),
/// writing each run to `<out>/runs/<name>` and the merged table to
/// `<out>/summary.csv` in grid order. Failed runs keep a row with their
/// error kind; the sweep reports a failure after writing everything.
pub fn cmd_sweep(cfg: &SweepConfig, out: &Path, jobs: usize) -> Result<Vec<SummaryRow>> {
    let grid = cfg.grid();
    let results = parallel::with_jobs(jobs, || {
        parallel::map(&grid, |&(mat, rpm, med)| {
            let run_cfg = cfg.base.with_condition(mat, rpm, med);
            let r = run_config(&run_cfg);
            if let Ok(r) = &r {
                write_run(&out.join("runs").join(run_dir_name(mat, rpm, med)), r)?;
            }
            r
        })
    });
    let mut rows = Vec::with_capacity(grid.len());
    let mut failed = 0;
    for (&(mat, rpm, med), r) in grid.iter().zip(results) {
        let row = match r {
            Ok(r) => {
                if r.diverged.is_some() {
                    failed += 1;
                }
                r.summary
            }
            Err(e) => {
                failed += 1;
                SummaryRow {
                    material: mat.as_str().into(),
                    rpm,
                    medium: med.as_str().into(),
                    status: e.kind().into(),
                    peak_kappa: None,
                    extent: None,
                    drift_rate: None,
                    class: String::new(),
                }
            }
        };
        rows.push(row);
    }
    std::fs::create_dir_all(out)?;
    write_table_file(&out.join("summary.csv"), &rows)?;
    if failed > 0 {
        return Err(Error::RunFailed(format!(
            "{failed} of {} sweep runs failed; see summary.csv",
            rows.len()
        )));
    }
    Ok(rows)
}

/// Station count used by `analyze` when none is given.
pub const DEFAULT_ANALYZE_STATIONS: usize = DEFAULT_STATIONS;
