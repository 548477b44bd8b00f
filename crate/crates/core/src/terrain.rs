//! Height-field environments.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerrainKind {
    Flat,
    /// Incline rising along +x, starting at x = 0.
    Slope { angle_deg: f64 },
    /// Single raised plateau beginning at `edge_x_m`.
    Step { height_m: f64, edge_x_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TerrainBlock", into = "TerrainBlock")]
pub struct Terrain {
    pub kind: TerrainKind,
    pub friction: f64,
}

/// On-disk form of the terrain block.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrainBlock {
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_x_m: Option<f64>,
    #[serde(default = "default_friction")]
    friction: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Flat,
    Slope,
    Step,
}

impl TryFrom<TerrainBlock> for Terrain {
    type Error = String;

    fn try_from(b: TerrainBlock) -> std::result::Result<Self, String> {
        let kind = match b.kind {
            KindTag::Flat => {
                if b.angle_deg.is_some() || b.height_m.is_some() || b.edge_x_m.is_some() {
                    return Err("flat terrain takes no shape parameters".into());
                }
                TerrainKind::Flat
            }
            KindTag::Slope => {
                if b.height_m.is_some() || b.edge_x_m.is_some() {
                    return Err("slope terrain only takes angle_deg".into());
                }
                TerrainKind::Slope {
                    angle_deg: b.angle_deg.unwrap_or(DEFAULT_SLOPE_DEG),
                }
            }
            KindTag::Step => {
                if b.angle_deg.is_some() {
                    return Err("step terrain takes height_m and edge_x_m".into());
                }
                TerrainKind::Step {
                    height_m: b.height_m.unwrap_or(DEFAULT_STEP_HEIGHT_M),
                    edge_x_m: b.edge_x_m.unwrap_or(DEFAULT_STEP_EDGE_M),
                }
            }
        };
        Ok(Terrain {
            kind,
            friction: b.friction,
        })
    }
}

impl From<Terrain> for TerrainBlock {
    fn from(t: Terrain) -> Self {
        let mut b = TerrainBlock {
            kind: KindTag::Flat,
            angle_deg: None,
            height_m: None,
            edge_x_m: None,
            friction: t.friction,
        };
        match t.kind {
            TerrainKind::Flat => {}
            TerrainKind::Slope { angle_deg } => {
                b.kind = KindTag::Slope;
                b.angle_deg = Some(angle_deg);
            }
            TerrainKind::Step { height_m, edge_x_m } => {
                b.kind = KindTag::Step;
                b.height_m = Some(height_m);
                b.edge_x_m = Some(edge_x_m);
            }
        }
        b
    }
}

pub const DEFAULT_SLOPE_DEG: f64 = 10.0;
pub const DEFAULT_STEP_HEIGHT_M: f64 = 0.10;
pub const DEFAULT_STEP_EDGE_M: f64 = 0.5;
pub const DEFAULT_FRICTION: f64 = 0.6;

fn default_friction() -> f64 {
    DEFAULT_FRICTION
}

impl Default for Terrain {
    fn default() -> Self {
        Terrain::flat()
    }
}

impl Terrain {
    pub fn flat() -> Self {
        Terrain {
            kind: TerrainKind::Flat,
            friction: default_friction(),
        }
    }

    pub fn slope(angle_deg: f64) -> Self {
        Terrain {
            kind: TerrainKind::Slope { angle_deg },
            friction: default_friction(),
        }
    }

    pub fn step(height_m: f64, edge_x_m: f64) -> Self {
        Terrain {
            kind: TerrainKind::Step { height_m, edge_x_m },
            friction: default_friction(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            TerrainKind::Flat => "flat",
            TerrainKind::Slope { .. } => "slope",
            TerrainKind::Step { .. } => "step",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            TerrainKind::Slope { angle_deg } if !(0.0..=30.0).contains(&angle_deg) => {
                return Err(Error::config("terrain.angle_deg", "must lie in [0, 30]"))
            }
            TerrainKind::Step { height_m, .. } if !(height_m >= 0.0) => {
                return Err(Error::config("terrain.height_m", "must be non-negative"))
            }
            TerrainKind::Step { edge_x_m, .. } if !edge_x_m.is_finite() => {
                return Err(Error::config("terrain.edge_x_m", "must be finite"))
            }
            _ => {}
        }
        if !(self.friction > 0.0) {
            return Err(Error::config("terrain.friction", "must be positive"));
        }
        Ok(())
    }

    pub fn height_at(&self, x: f64, _y: f64) -> f64 {
        match self.kind {
            TerrainKind::Flat => 0.0,
            TerrainKind::Slope { angle_deg } => {
                if x >= 0.0 {
                    x * angle_deg.to_radians().tan()
                } else {
                    0.0
                }
            }
            TerrainKind::Step { height_m, edge_x_m } => {
                if x >= edge_x_m {
                    height_m
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether a foot at height `z` moving from `from_x` to `to_x` runs into a vertical face.
    pub fn blocks(&self, from_x: f64, to_x: f64, z: f64) -> bool {
        match self.kind {
            TerrainKind::Step { height_m, edge_x_m } => from_x < edge_x_m && to_x >= edge_x_m && z < height_m,
            _ => false,
        }
    }

    pub fn step_edge(&self) -> Option<f64> {
        match self.kind {
            TerrainKind::Step { edge_x_m, .. } => Some(edge_x_m),
            _ => None,
        }
    }

    /// Unit normal of the local plane. Step faces report the normal of the surface the
    /// query lands on, which is always horizontal.
    pub fn surface_normal(&self, x: f64, _y: f64) -> Vector3<f64> {
        match self.kind {
            TerrainKind::Slope { angle_deg } if x >= 0.0 => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                Vector3::new(-s, 0.0, c)
            }
            _ => Vector3::z(),
        }
    }
}
