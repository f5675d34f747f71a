//! Run configuration: defaults, overridden by a `key=value` file, overridden
//! by command-line flags.

use crate::error::CliError;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use undither_core::diffuse::DiffusionParams;
use undither_core::dither::{BayerOrder, DitherMethod};
use undither_core::smooth::BoxFilterSpec;
use undither_core::stats::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    /// Earliest step with minimal MSE. Needs a reference image.
    Best,
    Step(usize),
    Final,
    /// Best (when a reference is given) and final, plus a fixed step if set.
    All(Option<usize>),
}

impl SnapshotPolicy {
    pub fn wants_best(self) -> bool {
        matches!(self, SnapshotPolicy::Best | SnapshotPolicy::All(_))
    }

    pub fn wants_final(self) -> bool {
        matches!(self, SnapshotPolicy::Final | SnapshotPolicy::All(_))
    }

    pub fn fixed_step(self) -> Option<usize> {
        match self {
            SnapshotPolicy::Step(k) | SnapshotPolicy::All(Some(k)) => Some(k),
            _ => None,
        }
    }
}

impl FromStr for SnapshotPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let step = |k: &str| {
            k.parse::<usize>()
                .map_err(|_| format!("invalid snapshot step '{k}'"))
        };
        match s {
            "best" => Ok(SnapshotPolicy::Best),
            "final" => Ok(SnapshotPolicy::Final),
            "all" => Ok(SnapshotPolicy::All(None)),
            other => {
                if let Some(k) = other.strip_prefix("step:") {
                    Ok(SnapshotPolicy::Step(step(k)?))
                } else if let Some(k) = other.strip_prefix("all:") {
                    Ok(SnapshotPolicy::All(Some(step(k)?)))
                } else {
                    Err(format!(
                        "unknown snapshot policy '{other}' (expected best, final, step:K, all or all:K)"
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodName {
    Fs,
    Ordered,
}

impl FromStr for MethodName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fs" => Ok(MethodName::Fs),
            "ordered" => Ok(MethodName::Ordered),
            other => Err(format!(
                "unknown dither method '{other}' (expected fs or ordered)"
            )),
        }
    }
}

/// Every tunable, each optional so that layers can be merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub method: Option<MethodName>,
    pub order: Option<usize>,
    pub window: Option<usize>,
    pub passes: Option<usize>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub dt: Option<f64>,
    pub iterations: Option<usize>,
    pub theta: Option<u32>,
    pub d: Option<usize>,
    pub snapshot: Option<SnapshotPolicy>,
    pub reference: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub stride: Option<usize>,
    pub force: Option<bool>,
}

impl Settings {
    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        Settings {
            method: self.method.or(lower.method),
            order: self.order.or(lower.order),
            window: self.window.or(lower.window),
            passes: self.passes.or(lower.passes),
            p: self.p.or(lower.p),
            epsilon: self.epsilon.or(lower.epsilon),
            dt: self.dt.or(lower.dt),
            iterations: self.iterations.or(lower.iterations),
            theta: self.theta.or(lower.theta),
            d: self.d.or(lower.d),
            snapshot: self.snapshot.or(lower.snapshot),
            reference: self.reference.or(lower.reference),
            out: self.out.or(lower.out),
            stride: self.stride.or(lower.stride),
            force: self.force.or(lower.force),
        }
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are ignored;
    /// keys are the long flag names without dashes.
    pub fn parse_file_contents(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            fn parse<T: FromStr>(v: &str) -> Result<T, String>
            where
                T::Err: ToString,
            {
                v.parse::<T>()
                    .map_err(|e| format!("invalid value '{v}': {}", e.to_string()))
            }
            let r: Result<(), String> = (|| {
                match key {
                    "method" => s.method = Some(parse(value)?),
                    "order" => s.order = Some(parse(value)?),
                    "window" => s.window = Some(parse(value)?),
                    "passes" => s.passes = Some(parse(value)?),
                    "p" => s.p = Some(parse(value)?),
                    "epsilon" => s.epsilon = Some(parse(value)?),
                    "dt" => s.dt = Some(parse(value)?),
                    "iterations" => s.iterations = Some(parse(value)?),
                    "theta" => s.theta = Some(parse(value)?),
                    "d" => s.d = Some(parse(value)?),
                    "snapshot" => s.snapshot = Some(parse(value)?),
                    "reference" => s.reference = Some(PathBuf::from(value)),
                    "out" => s.out = Some(PathBuf::from(value)),
                    "stride" => s.stride = Some(parse(value)?),
                    "force" => s.force = Some(parse(value)?),
                    other => return Err(format!("unknown key '{other}'")),
                }
                Ok(())
            })();
            r.map_err(bad)?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_file_contents(&text)
    }

    pub fn dither_method(&self) -> Result<DitherMethod, CliError> {
        match self.method.unwrap_or(MethodName::Fs) {
            MethodName::Fs => Ok(DitherMethod::FloydSteinberg),
            MethodName::Ordered => {
                let order = BayerOrder::new(self.order.unwrap_or(4))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(DitherMethod::Ordered(order))
            }
        }
    }

    /// Fills in defaults and validates the undithering parameters.
    pub fn resolve(&self, input: PathBuf) -> Result<PipelineConfig, CliError> {
        let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
        let filter = BoxFilterSpec::new(self.window.unwrap_or(3), self.passes.unwrap_or(2))
            .map_err(|e| usage(&e))?;
        let defaults = DiffusionParams::default();
        let diffusion = DiffusionParams::new(
            self.p.unwrap_or(defaults.p()),
            self.epsilon.unwrap_or(defaults.epsilon()),
            self.dt.unwrap_or(defaults.dt()),
            self.iterations.unwrap_or(defaults.iterations()),
        )
        .map_err(|e| usage(&e))?;
        let direction = Direction::from_degrees(self.theta.unwrap_or(0)).map_err(|e| usage(&e))?;
        let distance = self.d.unwrap_or(1);
        if distance == 0 {
            return Err(CliError::Usage("--d must be at least 1".into()));
        }
        let stride = self.stride.unwrap_or(1);
        if stride == 0 {
            return Err(CliError::Usage("--stride must be at least 1".into()));
        }
        let snapshot = self.snapshot.unwrap_or(SnapshotPolicy::All(None));
        if let Some(k) = snapshot.fixed_step() {
            if k > diffusion.iterations() {
                return Err(CliError::Usage(format!(
                    "snapshot step {k} exceeds the iteration count {}",
                    diffusion.iterations()
                )));
            }
        }
        if snapshot == SnapshotPolicy::Best && self.reference.is_none() {
            return Err(CliError::Usage(
                "--snapshot best needs a --reference image".into(),
            ));
        }
        Ok(PipelineConfig {
            input,
            out_dir: self.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            reference: self.reference.clone(),
            method: self.dither_method()?,
            filter,
            diffusion,
            direction,
            distance,
            stride,
            snapshot,
            force: self.force.unwrap_or(false),
        })
    }
}

/// Fully resolved settings for one `undither` run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub reference: Option<PathBuf>,
    pub method: DitherMethod,
    pub filter: BoxFilterSpec,
    pub diffusion: DiffusionParams,
    pub direction: Direction,
    pub distance: usize,
    pub stride: usize,
    pub snapshot: SnapshotPolicy,
    pub force: bool,
}
