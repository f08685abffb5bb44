use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use lectometer::fusion::EngineConfig;
use serde_json::{Map, Value};

use crate::InputError;

pub const CONFIG_ENV: &str = "LECTOMETER_CONFIG";

/// Engine tunables accepted on the command line. Each one overrides the
/// matching key of the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct EngineFlags {
    /// Frame rate of the video the observations came from.
    #[arg(long)]
    pub fps: Option<f64>,
    #[arg(long)]
    pub frame_ms: Option<f64>,
    #[arg(long)]
    pub hop_ms: Option<f64>,
    #[arg(long)]
    pub silence_rms: Option<f64>,
    #[arg(long)]
    pub min_gap_ms: Option<f64>,
    #[arg(long)]
    pub min_voiced_ms: Option<f64>,
    /// Speech analysis window length.
    #[arg(long)]
    pub window_ms: Option<u64>,
    #[arg(long)]
    pub min_final_window_ms: Option<u64>,
    #[arg(long)]
    pub pose_mild: Option<f64>,
    #[arg(long)]
    pub pose_extreme: Option<f64>,
    #[arg(long)]
    pub hand_moving_speed: Option<f64>,
    #[arg(long)]
    pub hand_window_ms: Option<u64>,
    /// Frames at or below this total count as low quality.
    #[arg(long)]
    pub alert_threshold: Option<u8>,
    /// How long a low-quality run must last before an alert fires.
    #[arg(long)]
    pub alert_sustain_ms: Option<u64>,
}

impl EngineFlags {
    fn overrides(&self) -> Vec<(&'static str, Option<Value>)> {
        fn v<T: Into<Value>>(x: Option<T>) -> Option<Value> {
            x.map(Into::into)
        }
        vec![
            ("frame_ms", v(self.frame_ms)),
            ("hop_ms", v(self.hop_ms)),
            ("silence_rms", v(self.silence_rms)),
            ("min_gap_ms", v(self.min_gap_ms)),
            ("min_voiced_ms", v(self.min_voiced_ms)),
            ("window_ms", v(self.window_ms)),
            ("min_final_window_ms", v(self.min_final_window_ms)),
            ("pose_mild", v(self.pose_mild)),
            ("pose_extreme", v(self.pose_extreme)),
            ("hand_moving_speed", v(self.hand_moving_speed)),
            ("hand_window_ms", v(self.hand_window_ms)),
            ("alert_threshold", v(self.alert_threshold)),
            ("alert_sustain_ms", v(self.alert_sustain_ms)),
        ]
    }
}

/// The effective settings after layering defaults, the config file and
/// flags.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub engine: EngineConfig,
    pub fps: Option<f64>,
}

impl Resolved {
    pub fn fps(&self) -> Result<f64> {
        match self.fps {
            Some(f) if f > 0.0 && f.is_finite() => Ok(f),
            Some(f) => Err(InputError::new(format!("fps must be positive, got {f}")).into()),
            None => Err(InputError::new(format!(
                "--fps is required (or set `fps` in the file named by {CONFIG_ENV})"
            ))
            .into()),
        }
    }
}

fn read_file(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    text.parse::<toml::Table>()
        .map_err(|e| InputError::new(format!("config file {}: {e}", path.display())).into())
}

/// Layers defaults, the file named by `LECTOMETER_CONFIG` (if set) and the
/// flags, in increasing precedence.
pub fn resolve(flags: &EngineFlags) -> Result<Resolved> {
    let file = match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => Some(read_file(Path::new(&p))?),
        _ => None,
    };
    resolve_with(flags, file.as_ref())
}

pub fn resolve_with(flags: &EngineFlags, file: Option<&toml::Table>) -> Result<Resolved> {
    let Value::Object(mut map) = serde_json::to_value(EngineConfig::default())? else {
        bail!("engine config did not serialize to a map");
    };
    let mut fps = None;
    if let Some(table) = file {
        for (key, value) in table {
            let value = serde_json::to_value(value)?;
            if key == "fps" {
                fps = Some(value.as_f64().ok_or_else(|| {
                    InputError::new(format!("config key fps: expected a number, got {value}"))
                })?);
            } else if map.contains_key(key) {
                map.insert(key.clone(), value);
            } else {
                return Err(InputError::new(format!("unknown config key `{key}`")).into());
            }
        }
    }
    for (key, value) in flags.overrides() {
        if let Some(value) = value {
            map.insert(key.to_string(), value);
        }
    }
    fps = flags.fps.or(fps);
    let engine = decode(map)?;
    engine
        .validate()
        .map_err(|e| InputError::new(format!("invalid configuration: {e}")))?;
    Ok(Resolved { engine, fps })
}

fn decode(map: Map<String, Value>) -> Result<EngineConfig> {
    serde_json::from_value(Value::Object(map))
        .map_err(|e| InputError::new(format!("invalid configuration: {e}")).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file_or_flags() {
        let r = resolve_with(&EngineFlags::default(), None).unwrap();
        assert_eq!(r.engine, EngineConfig::default());
        assert!(r.fps.is_none());
    }

    #[test]
    fn flags_beat_file() {
        let file: toml::Table = "fps = 25\nwindow_ms = 60000\nalert_threshold = 1\n"
            .parse()
            .unwrap();
        let flags = EngineFlags {
            alert_threshold: Some(3),
            ..EngineFlags::default()
        };
        let r = resolve_with(&flags, Some(&file)).unwrap();
        assert_eq!(r.fps, Some(25.0));
        assert_eq!(r.engine.audio.window_ms, 60_000);
        assert_eq!(r.engine.alert.alert_threshold, 3);
    }

    #[test]
    fn unknown_key_rejected() {
        let file: toml::Table = "windw_ms = 1".parse().unwrap();
        let err = resolve_with(&EngineFlags::default(), Some(&file)).unwrap_err();
        assert!(err.to_string().contains("windw_ms"));
        assert!(err.downcast_ref::<InputError>().is_some());
    }

    #[test]
    fn invalid_values_rejected() {
        let flags = EngineFlags {
            pose_mild: Some(0.9),
            ..EngineFlags::default()
        };
        assert!(resolve_with(&flags, None).is_err());
    }
}
