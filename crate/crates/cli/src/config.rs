//! Job configuration files.
//!
//! A job names exactly one map source: either a `[builtin]` table or an
//! explicit `vertices` / `arcs` / `map` tree.
//!
//! ```toml
//! mode = "exact"
//! [builtin]
//! family = "example1"
//! depth = 12
//! ```
//!
//! ```toml
//! vertices = ["p0", "p1", "p2"]
//! arcs = [{ id = "0", from = "p0", to = "p1" }, { id = "1", from = "p1", to = "p2" }]
//! [map]
//! "0" = [{ arc = "0", dir = "forward" }, { arc = "1", dir = "forward" }]
//! "1" = [{ arc = "1", dir = "reverse" }, { arc = "0", dir = "reverse" }]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use tamegraph::graph::{self, ArcEnds, MarkovMapSpec, Orientation, PathStep, Vertex};
use tamegraph::transition::{ArcIndex, DepthSchedule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tree,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Linear,
    #[default]
    Doubling,
}

impl From<Schedule> for DepthSchedule {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::Linear => DepthSchedule::Linear,
            Schedule::Doubling => DepthSchedule::Doubling,
        }
    }
}

/// A number given either as a TOML float/integer or as a string such as `"3/2"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Number::Int(n) => Ok(*n as f64),
            Number::Float(x) => Ok(*x),
            Number::Text(t) => {
                if let Some(q) = tamegraph::scalar::parse_rational(t) {
                    return Ok(tamegraph::Scalar::to_f64(&q));
                }
                t.trim().parse().with_context(|| format!("`{t}` is not a number"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Builtin {
    pub family: String,
    pub depth: Option<u32>,
    #[serde(default)]
    pub params: toml::Table,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDecl {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDecl {
    pub arc: String,
    #[serde(default = "forward")]
    pub dir: Direction,
}

fn forward() -> Direction {
    Direction::Forward
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

impl From<Direction> for Orientation {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => Orientation::Forward,
            Direction::Reverse => Orientation::Reverse,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub builtin: Option<Builtin>,
    pub vertices: Option<Vec<String>>,
    pub arcs: Option<Vec<ArcDecl>>,
    // BTreeMap keeps the arc order of the file irrelevant to the output
    pub map: Option<BTreeMap<String, Vec<StepDecl>>>,
    #[serde(default)]
    pub mode: Mode,
    pub tol: Option<f64>,
    pub depth: Option<u32>,
    pub horizon: Option<usize>,
    pub budget: Option<usize>,
    pub lambda: Option<Number>,
    pub base_arc: Option<String>,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub schedule: Schedule,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TOL: f64 = 1e-9;

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: JobConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    pub fn check(&self) -> Result<()> {
        let explicit = self.vertices.is_some() || self.arcs.is_some() || self.map.is_some();
        match (&self.builtin, explicit) {
            (Some(_), true) => bail!("give either [builtin] or an explicit vertices/arcs/map tree, not both"),
            (None, false) => bail!("no map source: add a [builtin] table or vertices/arcs/map"),
            _ => {}
        }
        if explicit && (self.vertices.is_none() || self.arcs.is_none() || self.map.is_none()) {
            bail!("an explicit map needs all of vertices, arcs and map");
        }
        let tol = self.tol();
        if !(tol > 0.0) {
            bail!("tolerance {tol} must be positive");
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                bail!("epsilon {e} must be positive");
            }
        }
        Ok(())
    }

    pub fn base_arc(&self) -> Option<ArcIndex> {
        self.base_arc.as_deref().map(ArcIndex::new)
    }

    pub fn lambda(&self) -> Result<Option<f64>> {
        self.lambda.as_ref().map(Number::to_f64).transpose()
    }

    /// True for the rule-based dendrite fan.
    pub fn is_example1(&self) -> bool {
        self.builtin.as_ref().is_some_and(|b| family_key(&b.family) == "example1")
    }

    pub fn spec(&self) -> Result<MarkovMapSpec> {
        self.check()?;
        if let Some(b) = &self.builtin {
            return builtin_spec(b, self.depth);
        }
        let vertices = self.vertices.as_ref().expect("checked").iter().map(Vertex::new).collect();
        let arcs = self
            .arcs
            .as_ref()
            .expect("checked")
            .iter()
            .map(|a| (ArcIndex::new(&a.id), ArcEnds::new(a.from.as_str(), a.to.as_str())))
            .collect();
        let images = self
            .map
            .as_ref()
            .expect("checked")
            .iter()
            .map(|(arc, steps)| {
                let path = steps.iter().map(|s| PathStep { arc: ArcIndex::new(&s.arc), dir: s.dir.into() }).collect();
                (ArcIndex::new(arc), path)
            })
            .collect();
        Ok(MarkovMapSpec::explicit(vertices, arcs, images)?)
    }
}

fn family_key(name: &str) -> String {
    name.to_ascii_lowercase().replace(['-', '_', ' '], "")
}

fn param_usize(params: &toml::Table, key: &str) -> Result<Option<usize>> {
    match params.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(n)) if *n >= 0 => Ok(Some(*n as usize)),
        Some(v) => Err(anyhow!("parameter `{key}` must be a nonnegative integer, got {v}")),
    }
}

fn builtin_spec(b: &Builtin, depth_override: Option<u32>) -> Result<MarkovMapSpec> {
    let depth = depth_override.or(b.depth);
    match family_key(&b.family).as_str() {
        "tent" => Ok(graph::full_shift(2)?),
        "fullshift" => {
            let n = param_usize(&b.params, "n")?.unwrap_or(2);
            Ok(graph::full_shift(n)?)
        }
        "goldenmean" => Ok(graph::golden_mean()),
        "interval" => {
            let rows: Vec<Vec<u8>> = b
                .params
                .get("rows")
                .ok_or_else(|| anyhow!("interval family needs params.rows"))?
                .clone()
                .try_into()
                .context("params.rows must be a list of 0/1 rows")?;
            let orientations: Vec<Direction> = match b.params.get("orientations") {
                Some(v) => v.clone().try_into().context("params.orientations must list forward/reverse")?,
                None => vec![Direction::Forward; rows.len()],
            };
            let orientations: Vec<Orientation> = orientations.into_iter().map(Into::into).collect();
            Ok(graph::interval_map(&rows, &orientations)?)
        }
        "example1" => {
            let depth = depth.ok_or_else(|| anyhow!("example1 needs a depth"))?;
            Ok(graph::example1(depth)?)
        }
        other => bail!("unknown builtin family `{other}`; known: tent, full-shift, golden-mean, interval, example1"),
    }
}
