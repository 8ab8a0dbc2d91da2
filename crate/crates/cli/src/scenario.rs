//! Scenario files: JSON objects with the field names below.

use anyhow::Context;
use berryres::{Complex64, LoopShape, LoopSpec, State};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_N: usize = 1024;
pub const DEFAULT_DEGENERACY_TOL: f64 = berryres::holonomy::DEFAULT_DEGENERACY_TOL;
pub const DEFAULT_QUAD_RTOL: f64 = berryres::holonomy::DEFAULT_QUAD_RTOL;
/// `min_dist` defaults to this fraction of `|gamma|`.
pub const DEFAULT_MIN_DIST_FRACTION: f64 = 1e-3;
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum LoopFile {
    Circle3D {
        center: [f64; 3],
        radius: f64,
        normal: [f64; 3],
        #[serde(default)]
        phase0: f64,
        #[serde(default = "one")]
        turns: i32,
    },
    PolyPath {
        vertices: Vec<[f64; 3]>,
    },
    Parametric {
        samples: Vec<[f64; 3]>,
    },
}

fn one() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsFile {
    #[serde(rename = "T")]
    pub period: f64,
    pub steps: Option<usize>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub degeneracy_tol: Option<f64>,
    pub quad_rtol: Option<f64>,
    pub min_dist: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub gamma: [f64; 3],
    #[serde(rename = "E_offset", default)]
    pub e_offset: [f64; 2],
    #[serde(rename = "loop")]
    pub path: LoopFile,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub states: Option<Vec<usize>>,
    pub methods: Option<Vec<String>>,
    pub dynamics: Option<DynamicsFile>,
    #[serde(default)]
    pub tolerances: TolerancesFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Discrete,
    Line,
    Spherical,
    DeltaGamma,
}

impl MethodName {
    pub fn parse(s: &str) -> Option<MethodName> {
        match s {
            "discrete" => Some(MethodName::Discrete),
            "line" => Some(MethodName::Line),
            "spherical" => Some(MethodName::Spherical),
            "delta_gamma" => Some(MethodName::DeltaGamma),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodName::Discrete => "discrete",
            MethodName::Line => "line",
            MethodName::Spherical => "spherical",
            MethodName::DeltaGamma => "delta_gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dynamics {
    #[serde(rename = "T")]
    pub period: f64,
    pub steps: usize,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub degeneracy_tol: f64,
    pub quad_rtol: f64,
    pub min_dist: f64,
}

/// A scenario with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub gamma: [f64; 3],
    #[serde(rename = "E_offset")]
    pub e_offset: [f64; 2],
    #[serde(rename = "loop")]
    pub path: LoopFile,
    #[serde(rename = "N")]
    pub n: usize,
    pub states: Vec<usize>,
    pub methods: Vec<MethodName>,
    pub dynamics: Option<Dynamics>,
    pub tolerances: Tolerances,
}

/// Problems with the scenario contents (as opposed to reading the file).
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid scenario: {}", self.0)
    }
}

impl std::error::Error for Invalid {}

fn positive(name: &str, v: f64) -> Result<f64, Invalid> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl ScenarioFile {
    pub fn resolve(self) -> Result<Scenario, Invalid> {
        let n = self.n.unwrap_or(DEFAULT_N);
        let mut states = self.states.unwrap_or_else(|| vec![1, 2]);
        states.sort_unstable();
        states.dedup();
        if states.is_empty() {
            return Err(Invalid("states must list at least one of 1, 2".into()));
        }
        if let Some(s) = states.iter().find(|&&s| s != 1 && s != 2) {
            return Err(Invalid(format!("unknown state index {s}; use 1 or 2")));
        }
        let names = self.methods.unwrap_or_else(|| vec!["discrete".into(), "line".into()]);
        if names.is_empty() {
            return Err(Invalid("at least one method must be requested".into()));
        }
        let methods = names
            .iter()
            .map(|m| {
                MethodName::parse(m).ok_or_else(|| {
                    Invalid(format!("unknown method {m:?}; expected discrete, line, spherical or delta_gamma"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let t = self.tolerances;
        let gmag = norm(self.gamma);
        let min_dist = match t.min_dist {
            Some(v) => v,
            // a zero-width system has no circle to keep away from; fall back to an absolute floor
            None if gmag > 0.0 => DEFAULT_MIN_DIST_FRACTION * gmag,
            None => DEFAULT_MIN_DIST_FRACTION,
        };
        let tolerances = Tolerances {
            degeneracy_tol: positive("degeneracy_tol", t.degeneracy_tol.unwrap_or(DEFAULT_DEGENERACY_TOL))?,
            quad_rtol: positive("quad_rtol", t.quad_rtol.unwrap_or(DEFAULT_QUAD_RTOL))?,
            min_dist: positive("min_dist", min_dist)?,
        };
        let dynamics = match self.dynamics {
            None => None,
            Some(d) => {
                let period = positive("dynamics.T", d.period)?;
                let steps = d.steps.unwrap_or(((DEFAULT_STEPS_PER_PERIOD * period).ceil() as usize).max(1000));
                Some(Dynamics { period, steps, hbar: positive("dynamics.hbar", d.hbar.unwrap_or(1.0))? })
            }
        };
        let sc = Scenario {
            name: self.name,
            gamma: self.gamma,
            e_offset: self.e_offset,
            path: self.path,
            n,
            states,
            methods,
            dynamics,
            tolerances,
        };
        sc.loop_spec().validate().map_err(|e| Invalid(e.to_string()))?;
        Ok(sc)
    }
}

impl Scenario {
    pub fn load(path: &Path) -> anyhow::Result<Scenario> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let file: ScenarioFile = serde_json::from_str(&text)
            .map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
        Ok(file.resolve()?)
    }

    pub fn loop_spec(&self) -> LoopSpec {
        let shape = match &self.path {
            LoopFile::Circle3D { center, radius, normal, phase0, turns } => LoopShape::Circle3D {
                center: *center,
                radius: *radius,
                normal: *normal,
                phase0: *phase0,
                turns: *turns,
            },
            LoopFile::PolyPath { vertices } => LoopShape::PolyPath { vertices: vertices.clone() },
            LoopFile::Parametric { samples } => LoopShape::Parametric { samples: samples.clone() },
        };
        LoopSpec { shape, gamma: self.gamma, e_offset: Complex64::new(self.e_offset[0], self.e_offset[1]) }
    }

    pub fn states(&self) -> Vec<State> {
        self.states.iter().map(|&s| State::from_index(s).unwrap()).collect()
    }
}
