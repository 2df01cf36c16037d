//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. `material` and `medium` load
//! presets first; every other key then overrides the preset regardless of
//! line order. Keys under `result.` are written into run manifests and are
//! skipped on read, so a manifest is itself a valid config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kinematics::ClassifyThresholds;
use crate::midline::{DEFAULT_SMOOTH_WINDOW, DEFAULT_STATIONS};
use crate::rodsim::{rpm_to_rad_per_s, BasePose, DriveProfile, Material, Medium, RodModel};

#[derive(Debug, Clone, PartialEq)]
pub enum DriveSpec {
    Rotary {
        rpm: f64,
        sweep_angle: f64,
        ramp_time: f64,
    },
    Path {
        file: PathBuf,
    },
}

/// Fully resolved single-run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub material: Option<Material>,
    pub medium: Option<Medium>,
    pub model: RodModel,
    pub drive: DriveSpec,
    pub duration: f64,
    pub output_dt: f64,
    pub dt: Option<f64>,
    pub stations: usize,
    pub smooth_window: usize,
    pub thresholds: ClassifyThresholds,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            material: Some(Material::Soft),
            medium: Some(Medium::Water),
            model: RodModel::preset(Material::Soft, Medium::Water),
            drive: DriveSpec::Rotary {
                rpm: 150.0,
                sweep_angle: std::f64::consts::PI,
                ramp_time: 0.05,
            },
            duration: 2.0,
            output_dt: 0.01,
            dt: None,
            stations: DEFAULT_STATIONS,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            thresholds: ClassifyThresholds::default(),
        }
    }
}

/// Parameter grid for `sweep`: every material at every rpm in every medium.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: SimConfig,
    pub materials: Vec<Material>,
    pub rpms: Vec<f64>,
    pub media: Vec<Medium>,
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

struct Source<'a> {
    path: &'a str,
    entries: BTreeMap<String, Entry>,
}

impl Source<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.to_string(),
            line,
            message: message.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| self.err(e.line, format!("cannot parse `{}` for `{key}`", e.value))),
        }
    }

    fn set<T: std::str::FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()> {
        if let Some(v) = self.parse(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| self.err(e.line, format!("cannot parse `{}` in `{key}`", s.trim())))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

fn lex<'a>(text: &str, path: &'a str) -> Result<Source<'a>> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(Error::Config {
                path: path.to_string(),
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config {
                path: path.to_string(),
                line,
                message: "empty key".into(),
            });
        }
        if k.starts_with("result.") {
            continue;
        }
        if let Some(prev) = entries.insert(
            k.to_string(),
            Entry {
                line,
                value: v.to_string(),
            },
        ) {
            return Err(Error::Config {
                path: path.to_string(),
                line,
                message: format!("duplicate key `{k}` (first set on line {})", prev.line),
            });
        }
    }
    Ok(Source { path, entries })
}

fn parse_sim(src: &mut Source, base_dir: &Path) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    let material: Option<Material> = src.parse("material")?;
    let medium: Option<Medium> = src.parse("medium")?;
    cfg.material = material.or(cfg.material);
    cfg.medium = medium.or(cfg.medium);
    let mut m = RodModel::preset(
        cfg.material.unwrap_or(Material::Soft),
        cfg.medium.unwrap_or(Medium::Water),
    );
    src.set("n_nodes", &mut m.n_nodes)?;
    src.set("length", &mut m.length)?;
    src.set("r_base", &mut m.r_base)?;
    src.set("r_tip", &mut m.r_tip)?;
    src.set("density", &mut m.density)?;
    src.set("young_modulus", &mut m.young_modulus)?;
    src.set("axial_modulus", &mut m.axial_modulus)?;
    src.set("internal_damping", &mut m.internal_damping)?;
    src.set("drag_normal", &mut m.drag_normal)?;
    src.set("drag_tangent", &mut m.drag_tangent)?;
    src.set("fluid_density", &mut m.fluid_density)?;
    src.set("gravity_buoyancy", &mut m.gravity_buoyancy)?;
    src.set("gravity", &mut m.gravity)?;
    src.set("gravity_tilt", &mut m.gravity_tilt)?;
    m.validate().map_err(|e| src.err(0, e.to_string()))?;
    cfg.model = m;

    let mode = src.take("drive");
    let (mut rpm, mut sweep, mut ramp) = match cfg.drive {
        DriveSpec::Rotary {
            rpm,
            sweep_angle,
            ramp_time,
        } => (rpm, sweep_angle, ramp_time),
        DriveSpec::Path { .. } => unreachable!(),
    };
    src.set("rpm", &mut rpm)?;
    src.set("sweep_angle", &mut sweep)?;
    src.set("ramp_time", &mut ramp)?;
    let path_file = src.take("path_file");
    cfg.drive = match mode.as_ref().map(|e| e.value.as_str()) {
        None | Some("rotary") => DriveSpec::Rotary {
            rpm,
            sweep_angle: sweep,
            ramp_time: ramp,
        },
        Some("path") => {
            let Some(f) = path_file else {
                let line = mode.map_or(0, |e| e.line);
                return Err(src.err(line, "`drive = path` requires `path_file`"));
            };
            let p = PathBuf::from(&f.value);
            DriveSpec::Path {
                file: if p.is_absolute() { p } else { base_dir.join(p) },
            }
        }
        Some(other) => {
            let line = mode.as_ref().map_or(0, |e| e.line);
            return Err(src.err(line, format!("unknown drive mode `{other}`")));
        }
    };
    if let DriveSpec::Rotary { rpm, ramp_time, .. } = cfg.drive {
        if !(rpm >= 0.0 && rpm.is_finite()) || !(ramp_time >= 0.0 && ramp_time.is_finite()) {
            return Err(src.err(0, "rpm and ramp_time must be >= 0"));
        }
    }

    src.set("duration", &mut cfg.duration)?;
    src.set("output_dt", &mut cfg.output_dt)?;
    cfg.dt = src.parse("dt")?;
    src.set("stations", &mut cfg.stations)?;
    src.set("smooth_window", &mut cfg.smooth_window)?;
    let th = &mut cfg.thresholds;
    src.set("classify.decay_peak_max", &mut th.decay_peak_max)?;
    src.set("classify.decay_fall_min", &mut th.decay_fall_min)?;
    src.set("classify.bell_peak_min", &mut th.bell_peak_min)?;
    src.set("classify.bell_peak_max", &mut th.bell_peak_max)?;
    src.set("classify.bell_monotone_min", &mut th.bell_monotone_min)?;
    src.set("classify.noise", &mut th.noise)?;
    if !(cfg.duration > 0.0) || !(cfg.output_dt > 0.0) {
        return Err(src.err(0, "duration and output_dt must be > 0"));
    }
    if cfg.stations < 3 || cfg.smooth_window % 2 == 0 {
        return Err(src.err(0, "stations must be >= 3 and smooth_window odd"));
    }
    Ok(cfg)
}

fn finish(src: Source) -> Result<()> {
    if let Some((k, e)) = src.entries.iter().min_by_key(|(_, e)| e.line) {
        return Err(src.err(e.line, format!("unknown key `{k}`")));
    }
    Ok(())
}

impl SimConfig {
    pub fn parse(text: &str, path: &str, base_dir: &Path) -> Result<Self> {
        let mut src = lex(text, path)?;
        let cfg = parse_sim(&mut src, base_dir)?;
        finish(src)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, &path.display().to_string(), dir)
    }

    pub fn drive_profile(&self) -> Result<DriveProfile> {
        match &self.drive {
            DriveSpec::Rotary {
                rpm,
                sweep_angle,
                ramp_time,
            } => DriveProfile::rotary(*rpm, *sweep_angle, *ramp_time),
            DriveSpec::Path { file } => DriveProfile::path(read_base_path(file)?),
        }
    }

    /// Drive angular speed in rad/s (zero for imported paths).
    pub fn omega(&self) -> f64 {
        match self.drive {
            DriveSpec::Rotary { rpm, .. } => rpm_to_rad_per_s(rpm),
            DriveSpec::Path { .. } => 0.0,
        }
    }

    /// Every resolved key, in a form [`SimConfig::parse`] reads back to an
    /// identical config.
    pub fn to_text(&self) -> String {
        let m = &self.model;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(mat) = self.material {
            kv("material", mat.as_str().into());
        }
        if let Some(med) = self.medium {
            kv("medium", med.as_str().into());
        }
        kv("n_nodes", m.n_nodes.to_string());
        kv("length", m.length.to_string());
        kv("r_base", m.r_base.to_string());
        kv("r_tip", m.r_tip.to_string());
        kv("density", m.density.to_string());
        kv("young_modulus", m.young_modulus.to_string());
        kv("axial_modulus", m.axial_modulus.to_string());
        kv("internal_damping", m.internal_damping.to_string());
        kv("drag_normal", m.drag_normal.to_string());
        kv("drag_tangent", m.drag_tangent.to_string());
        kv("fluid_density", m.fluid_density.to_string());
        kv("gravity_buoyancy", m.gravity_buoyancy.to_string());
        kv("gravity", m.gravity.to_string());
        kv("gravity_tilt", m.gravity_tilt.to_string());
        match &self.drive {
            DriveSpec::Rotary {
                rpm,
                sweep_angle,
                ramp_time,
            } => {
                kv("drive", "rotary".into());
                kv("rpm", rpm.to_string());
                kv("sweep_angle", sweep_angle.to_string());
                kv("ramp_time", ramp_time.to_string());
            }
            DriveSpec::Path { file } => {
                kv("drive", "path".into());
                kv("path_file", file.display().to_string());
            }
        }
        kv("duration", self.duration.to_string());
        kv("output_dt", self.output_dt.to_string());
        if let Some(dt) = self.dt {
            kv("dt", dt.to_string());
        }
        kv("stations", self.stations.to_string());
        kv("smooth_window", self.smooth_window.to_string());
        let th = &self.thresholds;
        kv("classify.decay_peak_max", th.decay_peak_max.to_string());
        kv("classify.decay_fall_min", th.decay_fall_min.to_string());
        kv("classify.bell_peak_min", th.bell_peak_min.to_string());
        kv("classify.bell_peak_max", th.bell_peak_max.to_string());
        kv("classify.bell_monotone_min", th.bell_monotone_min.to_string());
        kv("classify.noise", th.noise.to_string());
        s
    }

    /// Apply a grid point on top of this config.
    pub fn with_condition(&self, material: Material, rpm: f64, medium: Medium) -> SimConfig {
        let mut c = self.clone();
        c.material = Some(material);
        c.medium = Some(medium);
        c.model.young_modulus = material.young_modulus();
        c.model.density = material.density();
        c.model.fluid_density = medium.fluid_density();
        if let DriveSpec::Rotary {
            sweep_angle,
            ramp_time,
            ..
        } = c.drive
        {
            c.drive = DriveSpec::Rotary {
                rpm,
                sweep_angle,
                ramp_time,
            };
        }
        c
    }
}

impl SweepConfig {
    pub fn parse(text: &str, path: &str, base_dir: &Path) -> Result<Self> {
        let mut src = lex(text, path)?;
        let materials = src.list("sweep.materials")?;
        let rpms = src.list("sweep.rpms")?;
        let media = src.list("sweep.media")?;
        let base = parse_sim(&mut src, base_dir)?;
        finish(src)?;
        let materials = materials.unwrap_or_else(|| vec![base.material.unwrap_or(Material::Soft)]);
        let rpms = rpms.unwrap_or_else(|| match base.drive {
            DriveSpec::Rotary { rpm, .. } => vec![rpm],
            DriveSpec::Path { .. } => vec![0.0],
        });
        let media = media.unwrap_or_else(|| vec![base.medium.unwrap_or(Medium::Water)]);
        if materials.is_empty() || rpms.is_empty() || media.is_empty() {
            return Err(Error::Config {
                path: path.into(),
                line: 0,
                message: "sweep grid is empty".into(),
            });
        }
        if matches!(base.drive, DriveSpec::Path { .. }) {
            return Err(Error::Config {
                path: path.into(),
                line: 0,
                message: "sweeps require the rotary drive".into(),
            });
        }
        Ok(SweepConfig {
            base,
            materials,
            rpms,
            media,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, &path.display().to_string(), dir)
    }

    /// Grid points in deterministic order: material, then rpm, then medium.
    pub fn grid(&self) -> Vec<(Material, f64, Medium)> {
        let mut out = Vec::new();
        for &mat in &self.materials {
            for &rpm in &self.rpms {
                for &med in &self.media {
                    out.push((mat, rpm, med));
                }
            }
        }
        out
    }
}

/// Base trajectory CSV with header `t,x,y,theta`.
pub fn read_base_path(path: &Path) -> Result<Vec<BasePose>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let want = ["t", "x", "y", "theta"];
    if headers.iter().map(str::trim).collect::<Vec<_>>() != want {
        return Err(Error::Parse(format!(
            "{}: expected header `t,x,y,theta`",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let f = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("{}: row {}: bad number", path.display(), i + 2)))
        };
        out.push(BasePose {
            t: f(0)?,
            x: f(1)?,
            y: f(2)?,
            theta: f(3)?,
        });
    }
    Ok(out)
}
