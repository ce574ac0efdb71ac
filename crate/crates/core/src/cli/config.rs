//! Job configuration: an optional JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::entanglement::TwoQubitState;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::pdl::ChannelParams;

pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum StateKind {
    #[default]
    MaxEntangled,
    Optimal,
    Custom,
}

/// Initial state selection. `custom` carries 16 row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    MaxEntangled,
    Optimal,
    Custom(Vec<[f64; 2]>),
}

impl InitialState {
    pub fn custom_state(&self) -> Result<Option<TwoQubitState>> {
        let InitialState::Custom(entries) = self else {
            return Ok(None);
        };
        if entries.len() != 16 {
            return Err(Error::InvalidState(format!("custom state needs 16 entries, got {}", entries.len())));
        }
        let data = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let state = TwoQubitState::new(ComplexMatrix::from_row_major(4, data)?)?;
        if !state.is_normalized() {
            return Err(Error::InvalidState("custom state must have unit trace".into()));
        }
        Ok(Some(state))
    }
}

/// Rates of one line as they appear in a config file; missing rates are 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineSpec {
    pub gamma_h: f64,
    pub gamma_v: f64,
    pub gamma: f64,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub line1: Option<LineSpec>,
    pub line2: Option<LineSpec>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub initial_state: Option<InitialState>,
    pub output_path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub line1: [Option<f64>; 3],
    pub line2: [Option<f64>; 3],
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub state: Option<StateKind>,
    pub output_path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Fully resolved job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub line1: ChannelParams,
    pub line2: ChannelParams,
    /// `None` lets each command pick its own horizon.
    pub t_max: Option<f64>,
    pub steps: usize,
    pub initial_state: InitialState,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn merge_line(file: Option<LineSpec>, flags: [Option<f64>; 3]) -> Option<LineSpec> {
    if file.is_none() && flags.iter().all(Option::is_none) {
        return None;
    }
    let mut line = file.unwrap_or_default();
    if let Some(v) = flags[0] {
        line.gamma_h = v;
    }
    if let Some(v) = flags[1] {
        line.gamma_v = v;
    }
    if let Some(v) = flags[2] {
        line.gamma = v;
    }
    Some(line)
}

impl JobConfig {
    /// Flags override the file. Line 2 falls back to line 1 when neither
    /// source mentions it.
    pub fn resolve(file: FileConfig, flags: FlagOverrides) -> Result<Self> {
        let line1 = merge_line(file.line1, flags.line1)
            .ok_or_else(|| Error::InvalidArgument("line 1 rates missing (--gh1/--gv1/--g1 or config line1)".into()))?;
        let line2 = merge_line(file.line2, flags.line2).unwrap_or(line1);
        let to_params = |l: LineSpec| ChannelParams::new(l.gamma_h, l.gamma_v, l.gamma);

        let initial_state = match flags.state {
            None => file.initial_state.unwrap_or_default(),
            Some(StateKind::MaxEntangled) => InitialState::MaxEntangled,
            Some(StateKind::Optimal) => InitialState::Optimal,
            Some(StateKind::Custom) => match file.initial_state {
                Some(s @ InitialState::Custom(_)) => s,
                _ => {
                    return Err(Error::InvalidArgument(
                        "--state custom needs initial_state.custom in the config file".into(),
                    ))
                }
            },
        };

        let config = Self {
            line1: to_params(line1)?,
            line2: to_params(line2)?,
            t_max: flags.t_max.or(file.t_max),
            steps: flags.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            initial_state,
            output_path: flags.output_path.or(file.output_path),
            format: flags.format.or(file.format).unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidArgument(format!("steps = {} must be at least 2", self.steps)));
        }
        if let Some(t) = self.t_max {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::InvalidArgument(format!("t_max = {t} must be finite and positive")));
            }
        }
        self.initial_state.custom_state()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = serde_json::from_str(
            r#"{"line1": {"gamma_h": 1, "gamma_v": 5, "gamma": 1}, "steps": 50, "format": "json"}"#,
        )
        .unwrap();
        let flags = FlagOverrides { line1: [None, Some(3.0), None], steps: Some(10), ..Default::default() };
        let cfg = JobConfig::resolve(file, flags).unwrap();
        assert_eq!(cfg.line1, ChannelParams::new(1.0, 3.0, 1.0).unwrap());
        assert_eq!(cfg.line2, cfg.line1);
        assert_eq!(cfg.steps, 10);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn custom_state_from_file() {
        let mut entries = vec![[0.0, 0.0]; 16];
        entries[0] = [0.5, 0.0];
        entries[15] = [0.5, 0.0];
        let file = FileConfig {
            line1: Some(LineSpec { gamma_h: 1.0, gamma_v: 1.0, gamma: 1.0 }),
            initial_state: Some(InitialState::Custom(entries)),
            ..Default::default()
        };
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains(r#""initial_state":{"custom":"#));
        let cfg =
            JobConfig::resolve(file, FlagOverrides { state: Some(StateKind::Custom), ..Default::default() }).unwrap();
        assert!(cfg.initial_state.custom_state().unwrap().is_some());
    }

    #[test]
    fn rejects_bad_configs() {
        let line = Some(LineSpec { gamma_h: 1.0, gamma_v: 1.0, gamma: 1.0 });
        assert!(JobConfig::resolve(FileConfig::default(), FlagOverrides::default()).is_err());
        let f = || FileConfig { line1: line, ..Default::default() };
        assert!(JobConfig::resolve(f(), FlagOverrides { steps: Some(1), ..Default::default() }).is_err());
        assert!(JobConfig::resolve(f(), FlagOverrides { t_max: Some(-2.0), ..Default::default() }).is_err());
        assert!(
            JobConfig::resolve(f(), FlagOverrides { state: Some(StateKind::Custom), ..Default::default() }).is_err()
        );
        let neg = FlagOverrides { line1: [Some(-1.0), None, None], ..Default::default() };
        assert!(JobConfig::resolve(FileConfig::default(), neg).is_err());
        let bad = FileConfig {
            line1: line,
            initial_state: Some(InitialState::Custom(vec![[1.0, 0.0]; 3])),
            ..Default::default()
        };
        assert!(JobConfig::resolve(bad, FlagOverrides::default()).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"lines": 3}"#).is_err());
    }
}
