//! Flat `key = value` scenario files.
//!
//! ```text
//! # park from an offset
//! mode = stabilize
//! init = -2 2 0 0 0 0
//! k1 = 0.6
//! ```
//!
//! Keys that are absent take the defaults of the bundled scenarios. Keys
//! that do not apply to the selected mode are rejected so a typo cannot
//! silently change nothing.

use std::collections::HashMap;

use crate::error::{ConfigError, ModelError};
use crate::model::{ShipParams, ShipState};
use crate::sim::{Mode, ReferenceSpec, Scenario, ScenarioKind, DEFAULT_STEP};
use crate::stabilization::StabGains;
use crate::tracking::{PeSettings, TrackGains};

use super::fmt_num;

const MODEL_KEYS: [&str; 9] = ["m11", "m22", "m23", "m33", "d11", "d22", "d23", "d32", "d33"];
const GAIN_KEYS: [&str; 4] = ["k1", "k2", "k3", "k4"];

fn applies(key: &str, mode: Mode) -> Option<bool> {
    let stab = mode == Mode::Stabilize;
    let track = mode == Mode::Track;
    Some(match key {
        "mode" | "step" | "duration" => true,
        k if MODEL_KEYS.contains(&k) => true,
        k if GAIN_KEYS.contains(&k) => stab || track,
        "dither_amp" | "dither_sharp" => stab,
        "init" => stab || track,
        "ref_init" | "tau1d" | "tau2d" | "pe_window" | "pe_threshold" => !stab,
        _ => return None,
    })
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

struct Document<'a> {
    entries: HashMap<&'a str, Entry<'a>>,
}

impl<'a> Document<'a> {
    fn parse(text: &'a str) -> Result<Self, ConfigError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if applies(key, Mode::Stabilize).is_none() {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if entries.insert(key, Entry { line, value }).is_some() {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
        }
        Ok(Self { entries })
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_number(e.value)
            .map(Some)
            .ok_or_else(|| bad_value(e, key, "a finite number"))
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let value = self.number(key)?.unwrap_or(default);
        if value > 0.0 {
            Ok(value)
        } else {
            Err(ConfigError::Invalid {
                line: self.line(key),
                message: format!("`{key}` must be positive, got {value}"),
            })
        }
    }

    fn state(&self, key: &str) -> Result<Option<ShipState>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        let values: Option<Vec<f64>> = e.value.split_whitespace().map(parse_number).collect();
        match values {
            Some(v) if v.len() == 6 => Ok(Some(ShipState::new(v[0], v[1], v[2], v[3], v[4], v[5]))),
            _ => Err(bad_value(e, key, "six finite numbers `x y psi u v r`")),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn bad_value(e: &Entry, key: &str, expected: &'static str) -> ConfigError {
    ConfigError::BadValue {
        line: e.line,
        key: key.to_string(),
        expected,
        value: e.value.to_string(),
    }
}

fn model_error(doc: &Document, err: ModelError) -> ConfigError {
    let line = match err {
        ModelError::NonFinite(name) | ModelError::ZeroCoupling(name) | ModelError::NotPositive { name, .. } => {
            doc.line(name)
        }
        ModelError::SingularInertia(_) => ["m22", "m23", "m33"].iter().map(|k| doc.line(k)).max().unwrap_or(0),
    };
    ConfigError::Invalid {
        line,
        message: err.to_string(),
    }
}

/// Parses a scenario file; the file must name its `mode`.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    parse_config_for(text, None)
}

/// Parses a scenario file for a mode chosen elsewhere (e.g. by the CLI
/// subcommand). A `mode` key in the file must then agree with it.
pub fn parse_config_for(text: &str, mode: Option<Mode>) -> Result<Scenario, ConfigError> {
    let doc = Document::parse(text)?;
    let file_mode = match doc.entries.get("mode") {
        Some(e) => Some(Mode::parse(e.value).ok_or_else(|| bad_value(e, "mode", "stabilize, track or reference"))?),
        None => None,
    };
    let mode = match (file_mode, mode) {
        (Some(f), Some(m)) if f != m => {
            return Err(ConfigError::Invalid {
                line: doc.line("mode"),
                message: format!("file is for {} mode, requested {}", f.name(), m.name()),
            })
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(ConfigError::Missing("mode")),
    };

    // report inapplicable keys in file order
    let mut keys: Vec<_> = doc.entries.iter().collect();
    keys.sort_by_key(|(_, e)| e.line);
    for (key, e) in keys {
        if applies(key, mode) == Some(false) {
            return Err(ConfigError::KeyNotForMode {
                line: e.line,
                key: key.to_string(),
                mode: mode.name(),
            });
        }
    }

    let mut params = ShipParams::default();
    for (key, slot) in MODEL_KEYS.iter().zip([
        &mut params.m11,
        &mut params.m22,
        &mut params.m23,
        &mut params.m33,
        &mut params.d11,
        &mut params.d22,
        &mut params.d23,
        &mut params.d32,
        &mut params.d33,
    ]) {
        if let Some(v) = doc.number(key)? {
            *slot = v;
        }
    }
    params.validate().map_err(|e| model_error(&doc, e))?;

    let step = doc.positive("step", DEFAULT_STEP)?;
    let duration = doc.positive("duration", mode.default_duration())?;
    if duration < step {
        return Err(ConfigError::Invalid {
            line: doc.line("duration").max(doc.line("step")),
            message: format!("duration {duration} is shorter than one step ({step})"),
        });
    }

    let kind = match mode {
        Mode::Stabilize => {
            let d = StabGains::default();
            ScenarioKind::Stabilize {
                gains: StabGains {
                    k1: doc.positive("k1", d.k1)?,
                    k2: doc.positive("k2", d.k2)?,
                    k3: doc.positive("k3", d.k3)?,
                    k4: doc.positive("k4", d.k4)?,
                    dither_amp: doc.positive("dither_amp", d.dither_amp)?,
                    dither_sharp: doc.positive("dither_sharp", d.dither_sharp)?,
                },
                init: doc.state("init")?.ok_or(ConfigError::Missing("init"))?,
            }
        }
        Mode::Track => {
            let d = TrackGains::default();
            ScenarioKind::Track {
                gains: TrackGains {
                    k1: doc.positive("k1", d.k1)?,
                    k2: doc.positive("k2", d.k2)?,
                    k3: doc.positive("k3", d.k3)?,
                    k4: doc.positive("k4", d.k4)?,
                },
                init: doc.state("init")?.ok_or(ConfigError::Missing("init"))?,
                reference: reference_spec(&doc)?,
                pe: pe_settings(&doc)?,
            }
        }
        Mode::Reference => ScenarioKind::Reference {
            reference: reference_spec(&doc)?,
            pe: pe_settings(&doc)?,
        },
    };
    Ok(Scenario {
        params,
        kind,
        step,
        duration,
    })
}

fn reference_spec(doc: &Document) -> Result<ReferenceSpec, ConfigError> {
    Ok(ReferenceSpec {
        init: doc.state("ref_init")?.ok_or(ConfigError::Missing("ref_init"))?,
        tau1d: doc.number("tau1d")?.unwrap_or(0.0),
        tau2d: doc.number("tau2d")?.unwrap_or(0.0),
    })
}

fn pe_settings(doc: &Document) -> Result<PeSettings, ConfigError> {
    let d = PeSettings::default();
    Ok(PeSettings {
        window: doc.positive("pe_window", d.window)?,
        threshold: doc.positive("pe_threshold", d.threshold)?,
        cap: d.cap,
    })
}

/// Writes a scenario back in the format read by [`parse_config`].
/// Every applicable key is written, so the output does not depend on
/// the defaults.
pub fn to_config_string(sc: &Scenario) -> String {
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    let state = |s: &ShipState| s.to_array().map(fmt_num).join(" ");
    put("mode", sc.mode().name().to_string());
    let p = &sc.params;
    for (key, value) in MODEL_KEYS
        .iter()
        .zip([p.m11, p.m22, p.m23, p.m33, p.d11, p.d22, p.d23, p.d32, p.d33])
    {
        put(key, fmt_num(value));
    }
    put("step", fmt_num(sc.step));
    put("duration", fmt_num(sc.duration));
    match &sc.kind {
        ScenarioKind::Stabilize { gains, init } => {
            for (key, v) in GAIN_KEYS.iter().zip([gains.k1, gains.k2, gains.k3, gains.k4]) {
                put(key, fmt_num(v));
            }
            put("dither_amp", fmt_num(gains.dither_amp));
            put("dither_sharp", fmt_num(gains.dither_sharp));
            put("init", state(init));
        }
        ScenarioKind::Track {
            gains,
            init,
            reference,
            pe,
        } => {
            for (key, v) in GAIN_KEYS.iter().zip([gains.k1, gains.k2, gains.k3, gains.k4]) {
                put(key, fmt_num(v));
            }
            put("init", state(init));
            put("ref_init", state(&reference.init));
            put("tau1d", fmt_num(reference.tau1d));
            put("tau2d", fmt_num(reference.tau2d));
            put("pe_window", fmt_num(pe.window));
            put("pe_threshold", fmt_num(pe.threshold));
        }
        ScenarioKind::Reference { reference, pe } => {
            put("ref_init", state(&reference.init));
            put("tau1d", fmt_num(reference.tau1d));
            put("tau2d", fmt_num(reference.tau2d));
            put("pe_window", fmt_num(pe.window));
            put("pe_threshold", fmt_num(pe.threshold));
        }
    }
    out
}
