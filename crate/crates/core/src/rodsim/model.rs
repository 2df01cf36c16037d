use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Material and geometry of a linearly tapered planar rod discretized into
/// `n_nodes` lumped masses.
#[derive(Debug, Clone, PartialEq)]
pub struct RodModel {
    pub n_nodes: usize,
    /// Rest length, m.
    pub length: f64,
    pub r_base: f64,
    pub r_tip: f64,
    /// Rod density, kg/m^3.
    pub density: f64,
    /// Bending modulus, Pa.
    pub young_modulus: f64,
    /// Penalty modulus of the axial springs, Pa. Much larger than
    /// `young_modulus` so the rod stays nearly inextensible.
    pub axial_modulus: f64,
    /// Axial dashpot per segment, N*s/m.
    pub internal_damping: f64,
    pub drag_normal: f64,
    pub drag_tangent: f64,
    /// Surrounding fluid density, kg/m^3. Zero disables drag (air mode).
    pub fluid_density: f64,
    pub gravity_buoyancy: bool,
    pub gravity: f64,
    /// Rotation of the gravity vector away from -y, rad (counterclockwise).
    pub gravity_tilt: f64,
}

/// Named soft-silicone presets. The moduli are order-of-magnitude values for
/// the three grades, not measured properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Material {
    Soft,
    Medium,
    Hard,
}

impl Material {
    pub const ALL: [Material; 3] = [Material::Soft, Material::Medium, Material::Hard];

    pub fn young_modulus(self) -> f64 {
        match self {
            Material::Soft => 3.0e4,
            Material::Medium => 9.0e4,
            Material::Hard => 2.7e5,
        }
    }

    pub fn density(self) -> f64 {
        match self {
            Material::Soft => 1000.0,
            Material::Medium => 1040.0,
            Material::Hard => 1070.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Material::Soft => "soft",
            Material::Medium => "medium",
            Material::Hard => "hard",
        }
    }
}

impl FromStr for Material {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" | "gel2" => Ok(Material::Soft),
            "medium" | "ecoflex10" => Ok(Material::Medium),
            "hard" | "dragonskin10" => Ok(Material::Hard),
            _ => Err(Error::invalid(format!("unknown material preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Medium {
    Water,
    Air,
}

impl Medium {
    pub fn fluid_density(self) -> f64 {
        match self {
            Medium::Water => 1000.0,
            Medium::Air => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Medium::Water => "water",
            Medium::Air => "air",
        }
    }
}

impl FromStr for Medium {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "water" => Ok(Medium::Water),
            "air" | "vacuum" => Ok(Medium::Air),
            _ => Err(Error::invalid(format!("unknown medium `{s}`"))),
        }
    }
}

impl Default for RodModel {
    fn default() -> Self {
        RodModel::preset(Material::Soft, Medium::Water)
    }
}

impl RodModel {
    pub fn preset(material: Material, medium: Medium) -> Self {
        RodModel {
            n_nodes: 60,
            length: 0.45,
            r_base: 0.008,
            r_tip: 0.002,
            density: material.density(),
            young_modulus: material.young_modulus(),
            axial_modulus: 5.0e6,
            internal_damping: 0.05,
            drag_normal: 1.2,
            drag_tangent: 0.05,
            fluid_density: medium.fluid_density(),
            gravity_buoyancy: false,
            gravity: 9.81,
            gravity_tilt: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.n_nodes < 10 {
            return bad(format!("n_nodes must be >= 10, got {}", self.n_nodes));
        }
        for (name, v) in [
            ("length", self.length),
            ("r_tip", self.r_tip),
            ("density", self.density),
            ("young_modulus", self.young_modulus),
            ("axial_modulus", self.axial_modulus),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.r_base >= self.r_tip && self.r_base.is_finite()) {
            return bad(format!(
                "r_base ({}) must be >= r_tip ({})",
                self.r_base, self.r_tip
            ));
        }
        for (name, v) in [
            ("internal_damping", self.internal_damping),
            ("drag_normal", self.drag_normal),
            ("drag_tangent", self.drag_tangent),
            ("fluid_density", self.fluid_density),
            ("gravity", self.gravity),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !self.gravity_tilt.is_finite() {
            return bad("gravity_tilt must be finite".into());
        }
        Ok(())
    }

    pub fn segment_length(&self) -> f64 {
        self.length / (self.n_nodes - 1) as f64
    }

    /// Radius at arc length `s` from the base.
    pub fn radius(&self, s: f64) -> f64 {
        self.r_base + (self.r_tip - self.r_base) * (s / self.length)
    }

    /// Bending stiffness `E * pi * r^4 / 4` at arc length `s`.
    pub fn bending_stiffness(&self, s: f64) -> f64 {
        self.young_modulus * PI * self.radius(s).powi(4) / 4.0
    }
}

/// Per-element quantities derived once from a validated [`RodModel`].
#[derive(Debug, Clone)]
pub struct Rod {
    pub model: RodModel,
    pub rest: f64,
    pub segment_mass: Vec<f64>,
    pub node_mass: Vec<f64>,
    /// Axial spring constant per segment, N/m.
    pub axial_k: Vec<f64>,
    /// Diameter at each segment midpoint.
    pub segment_diameter: Vec<f64>,
    /// `EI / ds` at each node; only interior nodes are used.
    pub joint_stiffness: Vec<f64>,
}

impl Rod {
    pub fn new(model: RodModel) -> Result<Self> {
        model.validate()?;
        let n = model.n_nodes;
        let ds = model.segment_length();
        let segment_mass: Vec<f64> = (0..n - 1)
            .map(|j| {
                // exact integral of density * pi * r(s)^2 over the segment
                let (a, b) = (model.radius(j as f64 * ds), model.radius((j + 1) as f64 * ds));
                model.density * PI * ds * (a * a + a * b + b * b) / 3.0
            })
            .collect();
        let mut node_mass = vec![0.0; n];
        for (j, m) in segment_mass.iter().enumerate() {
            node_mass[j] += 0.5 * m;
            node_mass[j + 1] += 0.5 * m;
        }
        let axial_k = (0..n - 1)
            .map(|j| {
                let r = model.radius((j as f64 + 0.5) * ds);
                model.axial_modulus * PI * r * r / ds
            })
            .collect();
        let segment_diameter = (0..n - 1)
            .map(|j| 2.0 * model.radius((j as f64 + 0.5) * ds))
            .collect();
        let joint_stiffness = (0..n)
            .map(|i| model.bending_stiffness(i as f64 * ds) / ds)
            .collect();
        Ok(Rod {
            rest: ds,
            segment_mass,
            node_mass,
            axial_k,
            segment_diameter,
            joint_stiffness,
            model,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.model.n_nodes
    }

    pub fn total_mass(&self) -> f64 {
        self.segment_mass.iter().sum()
    }

    /// Largest stable step for the semi-implicit integrator:
    /// `0.1 * sqrt(m_min / k_max)`.
    pub fn stable_dt(&self) -> f64 {
        let m_min = self.node_mass.iter().copied().fold(f64::INFINITY, f64::min);
        let k_max = self.axial_k.iter().copied().fold(0.0, f64::max);
        0.1 * (m_min / k_max).sqrt()
    }
}
