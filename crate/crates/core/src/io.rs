//! CSV tables emitted and consumed by the command-line workflows.
//!
//! Floats are written with 9 significant digits and a `.` decimal point, so
//! reading a table and writing it back reproduces the original bytes.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kinematics::{BendTrack, CurvatureField, MidlineSequence};
use crate::midline::{Midline, Point};

/// `%.9g`-style formatting: fixed notation for exponents in [-5, 9),
/// scientific otherwise, trailing zeros dropped, `-0` written as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}` in column `{what}`")))
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s, what).map(Some)
    }
}

fn parse_int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{s}` in column `{what}`")))
}

/// One row type per table.
pub trait Record: Sized {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
    fn from_fields(f: &[&str]) -> Result<Self>;
}

pub fn write_table<R: Record, W: Write>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_file<R: Record>(path: &Path, rows: &[R]) -> Result<()> {
    write_table(std::io::BufWriter::new(File::create(path)?), rows)
}

pub fn table_to_string<R: Record>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_table(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 table")
}

pub fn read_table<R: Record, Rd: std::io::Read>(input: Rd, name: &str) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != R::HEADER {
        return Err(Error::Parse(format!(
            "{name}: expected header `{}`, got `{}`",
            R::HEADER.join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let f: Vec<&str> = rec.iter().collect();
        if f.len() != R::HEADER.len() {
            return Err(Error::Parse(format!("{name}: row {} has {} fields", i + 2, f.len())));
        }
        rows.push(
            R::from_fields(&f).map_err(|e| Error::Parse(format!("{name}: row {}: {e}", i + 2)))?,
        );
    }
    Ok(rows)
}

pub fn read_table_file<R: Record>(path: &Path) -> Result<Vec<R>> {
    read_table(File::open(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidlineRow {
    pub frame: u64,
    pub t: f64,
    pub idx: usize,
    pub x: f64,
    pub y: f64,
}

impl Record for MidlineRow {
    const HEADER: &'static [&'static str] = &["frame", "t", "idx", "x", "y"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.frame.to_string(),
            fmt_f64(self.t),
            self.idx.to_string(),
            fmt_f64(self.x),
            fmt_f64(self.y),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(MidlineRow {
            frame: parse_int(f[0], "frame")?,
            t: parse_f64(f[1], "t")?,
            idx: parse_int(f[2], "idx")?,
            x: parse_f64(f[3], "x")?,
            y: parse_f64(f[4], "y")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureRow {
    pub frame: u64,
    pub t: f64,
    pub station: usize,
    pub s_over_l: f64,
    pub kappa: f64,
}

impl Record for CurvatureRow {
    const HEADER: &'static [&'static str] = &["frame", "t", "station", "s_over_L", "kappa"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.frame.to_string(),
            fmt_f64(self.t),
            self.station.to_string(),
            fmt_f64(self.s_over_l),
            fmt_f64(self.kappa),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(CurvatureRow {
            frame: parse_int(f[0], "frame")?,
            t: parse_f64(f[1], "t")?,
            station: parse_int(f[2], "station")?,
            s_over_l: parse_f64(f[3], "s_over_L")?,
            kappa: parse_f64(f[4], "kappa")?,
        })
    }
}

/// Bend-point row. Velocity columns are empty on the last frame; the
/// normalized columns are filled only on frames inside the analysed window.
#[derive(Debug, Clone, PartialEq)]
pub struct BendRow {
    pub frame: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: Option<f64>,
    pub speed: Option<f64>,
    pub v_norm: Option<f64>,
    pub t_norm: Option<f64>,
}

impl Record for BendRow {
    const HEADER: &'static [&'static str] =
        &["frame", "t", "x", "y", "vx", "speed", "v_norm", "t_norm"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.frame.to_string(),
            fmt_f64(self.t),
            fmt_f64(self.x),
            fmt_f64(self.y),
            fmt_opt(self.vx),
            fmt_opt(self.speed),
            fmt_opt(self.v_norm),
            fmt_opt(self.t_norm),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(BendRow {
            frame: parse_int(f[0], "frame")?,
            t: parse_f64(f[1], "t")?,
            x: parse_f64(f[2], "x")?,
            y: parse_f64(f[3], "y")?,
            vx: parse_opt(f[4], "vx")?,
            speed: parse_opt(f[5], "speed")?,
            v_norm: parse_opt(f[6], "v_norm")?,
            t_norm: parse_opt(f[7], "t_norm")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub frame: u64,
    pub kind: String,
    pub message: String,
}

impl Record for GapRow {
    const HEADER: &'static [&'static str] = &["frame", "kind", "message"];
    fn fields(&self) -> Vec<String> {
        vec![self.frame.to_string(), self.kind.clone(), self.message.clone()]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(GapRow {
            frame: parse_int(f[0], "frame")?,
            kind: f[1].to_string(),
            message: f[2].to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayRow {
    pub t_norm: f64,
    pub v_norm_a: f64,
    pub v_norm_b: f64,
}

impl Record for OverlayRow {
    const HEADER: &'static [&'static str] = &["t_norm", "v_norm_a", "v_norm_b"];
    fn fields(&self) -> Vec<String> {
        vec![fmt_f64(self.t_norm), fmt_f64(self.v_norm_a), fmt_f64(self.v_norm_b)]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(OverlayRow {
            t_norm: parse_f64(f[0], "t_norm")?,
            v_norm_a: parse_f64(f[1], "v_norm_a")?,
            v_norm_b: parse_f64(f[2], "v_norm_b")?,
        })
    }
}

/// `key,value` pairs; values are preformatted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub key: String,
    pub value: String,
}

impl Record for MetricRow {
    const HEADER: &'static [&'static str] = &["key", "value"];
    fn fields(&self) -> Vec<String> {
        vec![self.key.clone(), self.value.clone()]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(MetricRow {
            key: f[0].to_string(),
            value: f[1].to_string(),
        })
    }
}

/// One sweep grid point. Result columns are empty when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub material: String,
    pub rpm: f64,
    pub medium: String,
    pub status: String,
    pub peak_kappa: Option<f64>,
    pub extent: Option<f64>,
    pub drift_rate: Option<f64>,
    pub class: String,
}

impl Record for SummaryRow {
    const HEADER: &'static [&'static str] = &[
        "material",
        "rpm",
        "medium",
        "status",
        "peak_kappa",
        "extent",
        "drift_rate",
        "class",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.material.clone(),
            fmt_f64(self.rpm),
            self.medium.clone(),
            self.status.clone(),
            fmt_opt(self.peak_kappa),
            fmt_opt(self.extent),
            fmt_opt(self.drift_rate),
            self.class.clone(),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        Ok(SummaryRow {
            material: f[0].to_string(),
            rpm: parse_f64(f[1], "rpm")?,
            medium: f[2].to_string(),
            status: f[3].to_string(),
            peak_kappa: parse_opt(f[4], "peak_kappa")?,
            extent: parse_opt(f[5], "extent")?,
            drift_rate: parse_opt(f[6], "drift_rate")?,
            class: f[7].to_string(),
        })
    }
}

fn frame_of(t: f64, dt: f64) -> u64 {
    (t / dt).round() as u64
}

pub fn midline_rows(seq: &MidlineSequence) -> Vec<MidlineRow> {
    let mut rows = Vec::new();
    for (i, m) in seq.frames().iter().enumerate() {
        let frame = seq.frame_index(i);
        for (idx, p) in m.points().iter().enumerate() {
            rows.push(MidlineRow {
                frame,
                t: m.t(),
                idx,
                x: p.x,
                y: p.y,
            });
        }
    }
    rows
}

/// Rebuild a sequence from midline rows. The frame interval is inferred from
/// the latest frame (`t / frame`) and every timestamp is snapped to
/// `frame * dt`.
pub fn sequence_from_rows(rows: &[MidlineRow]) -> Result<MidlineSequence> {
    if rows.is_empty() {
        return Err(Error::EmptySequence("midline table has no rows".into()));
    }
    let mut groups: Vec<(u64, Vec<&MidlineRow>)> = Vec::new();
    for r in rows {
        match groups.last_mut() {
            Some((f, g)) if *f == r.frame => g.push(r),
            _ => {
                if groups.iter().any(|(f, _)| *f == r.frame) {
                    return Err(Error::Parse(format!("frame {} is not contiguous in the table", r.frame)));
                }
                groups.push((r.frame, vec![r]));
            }
        }
    }
    let (last_frame, last_rows) = groups.iter().max_by_key(|(f, _)| *f).expect("non-empty");
    let dt = if *last_frame == 0 {
        1.0
    } else {
        last_rows[0].t / *last_frame as f64
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parse("cannot infer a positive frame interval".into()));
    }
    let mut frames = Vec::with_capacity(groups.len());
    for (frame, g) in &groups {
        for (k, r) in g.iter().enumerate() {
            if r.idx != k {
                return Err(Error::Parse(format!("frame {frame}: point indices are not 0..n")));
            }
        }
        let pts = g.iter().map(|r| Point::new(r.x, r.y)).collect();
        frames.push(Midline::new(pts, *frame as f64 * dt)?);
    }
    MidlineSequence::new(frames, dt)
}

pub fn curvature_rows(field: &CurvatureField, dt: f64) -> Vec<CurvatureRow> {
    let mut rows = Vec::with_capacity(field.t.len() * field.stations.len());
    for (row, &t) in field.kappa.iter().zip(&field.t) {
        for (station, (&s, &k)) in field.stations.iter().zip(row).enumerate() {
            rows.push(CurvatureRow {
                frame: frame_of(t, dt),
                t,
                station,
                s_over_l: s,
                kappa: k,
            });
        }
    }
    rows
}

/// Bend rows for the full `track`; `normalized`, if given, is the analysed
/// window of the same track starting at frame `offset`.
pub fn bend_rows(
    track: &BendTrack,
    dt: f64,
    normalized: Option<(&BendTrack, usize)>,
) -> Vec<BendRow> {
    (0..track.t.len())
        .map(|i| {
            let norm = normalized.and_then(|(nt, off)| {
                let j = i.checked_sub(off)?;
                Some((*nt.v_norm.get(j)?, *nt.t_norm.get(j)?))
            });
            BendRow {
                frame: frame_of(track.t[i], dt),
                t: track.t[i],
                x: track.positions[i].x,
                y: track.positions[i].y,
                vx: track.vx.get(i).copied(),
                speed: track.speed.get(i).copied(),
                v_norm: norm.map(|n| n.0),
                t_norm: norm.map(|n| n.1),
            }
        })
        .collect()
}

/// The velocity samples of a bend table as a track ready for
/// normalization. Uses the rows carrying `v_norm` when there are any,
/// otherwise every row with a speed.
pub fn track_from_bend_rows(rows: &[BendRow]) -> Result<BendTrack> {
    let windowed = rows.iter().any(|r| r.v_norm.is_some());
    let sel: Vec<&BendRow> = rows
        .iter()
        .filter(|r| r.speed.is_some() && (!windowed || r.v_norm.is_some()))
        .collect();
    if sel.is_empty() {
        return Err(Error::DegenerateProfile("bend table has no velocity samples".into()));
    }
    let mut t: Vec<f64> = sel.iter().map(|r| r.t).collect();
    let mut positions: Vec<Point> = sel.iter().map(|r| Point::new(r.x, r.y)).collect();
    // A track carries one more position than velocity sample.
    let last = sel[sel.len() - 1];
    let next = rows.iter().find(|r| r.frame > last.frame);
    t.push(next.map_or(last.t, |r| r.t));
    positions.push(next.map_or(Point::new(last.x, last.y), |r| Point::new(r.x, r.y)));
    Ok(BendTrack {
        indices: vec![0; t.len()],
        boundary: vec![false; t.len()],
        t,
        positions,
        vx: sel.iter().map(|r| r.vx.unwrap_or(0.0)).collect(),
        speed: sel.iter().map(|r| r.speed.unwrap_or(0.0)).collect(),
        t_norm: Vec::new(),
        v_norm: Vec::new(),
    })
}

/// Run manifest: `key = value` lines, readable as a config.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}
