use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scramblers::{ScramblerKind, ScramblerSpec, MAX_HAAR_QUBITS};
use crate::statevec::MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Fig1Haar,
    Fig2Entropy,
    Fig2PhaseDigital,
    Fig2PhaseAnalog,
    Fig3Oat,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Fig1Haar,
        Protocol::Fig2Entropy,
        Protocol::Fig2PhaseDigital,
        Protocol::Fig2PhaseAnalog,
        Protocol::Fig3Oat,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Protocol::Fig1Haar => "fig1_haar",
            Protocol::Fig2Entropy => "fig2_entropy",
            Protocol::Fig2PhaseDigital => "fig2_phase_digital",
            Protocol::Fig2PhaseAnalog => "fig2_phase_analog",
            Protocol::Fig3Oat => "fig3_oat",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::config("protocol", format!("unknown protocol `{s}`")))
    }
}

fn one() -> usize {
    1
}

/// Everything needed to reproduce one pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_qubits: usize,
    pub protocol: Protocol,
    /// Pipelines take `kind`, `depth_l` and `time_t` from here; the register
    /// size and per-task seeds come from `n_qubits` and `master_seed`.
    pub scrambler: ScramblerSpec,
    #[serde(default)]
    pub k_list: Vec<usize>,
    #[serde(default = "one")]
    pub samples: usize,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default)]
    pub tau_grid: Vec<f64>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub l_grid: Vec<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// System sizes swept by the entropy protocol; empty means `[n_qubits]`.
    #[serde(default)]
    pub n_list: Vec<usize>,
    /// Trace a uniformly random K-subset per task instead of the highest K qubits.
    #[serde(default)]
    pub random_traced_subsets: bool,
}

impl RunConfig {
    /// Desk-scale defaults for each protocol.
    pub fn preset(protocol: Protocol) -> Self {
        let quarter = std::f64::consts::FRAC_PI_4;
        let (n, kind) = match protocol {
            Protocol::Fig1Haar => (10, ScramblerKind::Haar),
            Protocol::Fig2Entropy | Protocol::Fig2PhaseDigital => (12, ScramblerKind::Brickwork),
            Protocol::Fig2PhaseAnalog | Protocol::Fig3Oat => (12, ScramblerKind::XxChain),
        };
        let mut cfg = RunConfig {
            n_qubits: n,
            protocol,
            scrambler: ScramblerSpec { kind, depth_l: 0, time_t: 0.0, seed: 0, n_qubits: n },
            k_list: (0..=n).collect(),
            samples: 1,
            realizations: 1,
            theta0: 0.0,
            tau_grid: Vec::new(),
            t_grid: Vec::new(),
            l_grid: Vec::new(),
            master_seed: 1234,
            output_path: None,
            n_list: Vec::new(),
            random_traced_subsets: false,
        };
        match protocol {
            Protocol::Fig1Haar => cfg.samples = 10,
            Protocol::Fig2Entropy => {
                cfg.n_list = vec![4, 6, 8, 10, 12];
                cfg.l_grid = (0..=12).collect();
            }
            Protocol::Fig2PhaseDigital => cfg.l_grid = (0..=12).collect(),
            Protocol::Fig2PhaseAnalog => {
                cfg.t_grid = vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
                cfg.realizations = 8;
            }
            Protocol::Fig3Oat => {
                cfg.scrambler.time_t = 20.0;
                cfg.tau_grid = (0..=16).map(|i| quarter * i as f64 / 16.0).collect();
                cfg.k_list = vec![0, 1, 2, n / 2 - 1, n / 2];
                cfg.realizations = 4;
            }
        }
        cfg
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        Self::from_value(value)
    }

    /// Deserializes and validates, naming the offending key on failure.
    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let key = e.path().to_string();
            Error::config(if key == "." { "<root>".to_string() } else { key }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Returns a copy with dotted-path overrides (`scrambler.time_t=20`) applied.
    /// Values are parsed as JSON, falling back to a plain string.
    pub fn with_overrides<'a, I>(&self, overrides: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut value = self.to_value();
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        Self::from_value(value)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::config("n_qubits", format!("must lie in 1..={MAX_QUBITS}, got {n}")));
        }
        if self.k_list.is_empty() && self.protocol != Protocol::Fig2Entropy {
            return Err(Error::config("k_list", "must not be empty"));
        }
        if let Some(k) = self.k_list.iter().find(|&&k| k > n) {
            return Err(Error::config("k_list", format!("K = {k} exceeds n_qubits = {n}")));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "must be ≥ 1"));
        }
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be ≥ 1"));
        }
        if !self.theta0.is_finite() {
            return Err(Error::config("theta0", "must be finite"));
        }
        if self.tau_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("tau_grid", "entries must be finite"));
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::config("t_grid", "entries must be finite and ≥ 0"));
        }
        if let Some(m) = self.n_list.iter().find(|&&m| !(2..=MAX_QUBITS).contains(&m)) {
            return Err(Error::config("n_list", format!("sizes must lie in 2..={MAX_QUBITS}, got {m}")));
        }
        let needs_two = !matches!(self.protocol, Protocol::Fig1Haar | Protocol::Fig2Entropy);
        if needs_two && n < 2 {
            return Err(Error::config("n_qubits", "GHZ and OAT inputs need at least 2 qubits"));
        }
        let kind = self.scrambler.kind;
        let expect = |allowed: &[ScramblerKind]| {
            if allowed.contains(&kind) {
                Ok(())
            } else {
                Err(Error::config("scrambler.kind", format!("{kind:?} is not usable with protocol {}", self.protocol)))
            }
        };
        match self.protocol {
            Protocol::Fig1Haar => {
                expect(&[ScramblerKind::Haar])?;
                if n > MAX_HAAR_QUBITS {
                    return Err(Error::config(
                        "n_qubits",
                        format!(
                            "dense Haar sampling is capped at {MAX_HAAR_QUBITS} qubits (got {n}); \
                             use the brickwork scrambler as a Haar proxy"
                        ),
                    ));
                }
            }
            Protocol::Fig2Entropy => expect(&[ScramblerKind::Brickwork, ScramblerKind::XxChain, ScramblerKind::None])?,
            Protocol::Fig2PhaseDigital => expect(&[ScramblerKind::Brickwork])?,
            Protocol::Fig2PhaseAnalog | Protocol::Fig3Oat => expect(&[ScramblerKind::XxChain])?,
        }
        self.scrambler.validate()
    }

    /// System sizes covered by this run.
    pub fn sizes(&self) -> Vec<usize> {
        if self.n_list.is_empty() {
            vec![self.n_qubits]
        } else {
            self.n_list.clone()
        }
    }

    /// Circuit depths, falling back to the scrambler's own depth.
    pub fn depths(&self) -> Vec<usize> {
        if self.l_grid.is_empty() {
            vec![self.scrambler.depth_l]
        } else {
            self.l_grid.clone()
        }
    }

    /// Evolution times, falling back to the scrambler's own time.
    pub fn times(&self) -> Vec<f64> {
        if self.t_grid.is_empty() {
            vec![self.scrambler.time_t]
        } else {
            self.t_grid.clone()
        }
    }
}

fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (path, raw) =
        item.split_once('=').ok_or_else(|| Error::config(item, "override must have the form key=value"))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::config(item, "empty key"));
    }
    let parsed = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        let obj =
            node.as_object_mut().ok_or_else(|| Error::config(path, format!("`{part}` is not inside an object")))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    RunConfig::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for p in Protocol::ALL {
            let cfg = RunConfig::preset(p);
            cfg.validate().unwrap();
            assert_eq!(RunConfig::from_json_str(&cfg.to_json()).unwrap(), cfg);
            assert_eq!(p.id().parse::<Protocol>().unwrap(), p);
        }
    }

    #[test]
    fn empty_k_list_rejected() {
        let mut cfg = RunConfig::preset(Protocol::Fig1Haar);
        cfg.k_list.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config { key, .. }) if key == "k_list"));
    }

    #[test]
    fn errors_name_the_key() {
        let mut v = RunConfig::preset(Protocol::Fig3Oat).to_value();
        v["scrambler"]["time_t"] = Value::String("long".into());
        match RunConfig::from_value(v).unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "scrambler.time_t"),
            other => panic!("{other}"),
        }
        let mut v = RunConfig::preset(Protocol::Fig1Haar).to_value();
        v["sampels"] = Value::from(3);
        let err = RunConfig::from_value(v).unwrap_err().to_string();
        assert!(err.contains("sampels"), "{err}");
    }

    #[test]
    fn dotted_overrides() {
        let cfg = RunConfig::preset(Protocol::Fig3Oat);
        let out = cfg.with_overrides(["scrambler.time_t=5", "realizations=2", "k_list=[0,3]"]).unwrap();
        assert_eq!(out.scrambler.time_t, 5.0);
        assert_eq!(out.realizations, 2);
        assert_eq!(out.k_list, vec![0, 3]);
        assert!(cfg.with_overrides(["no_equals"]).is_err());
        assert!(cfg.with_overrides(["k_list=[99]"]).is_err());
        assert!(cfg.with_overrides(["bogus=1"]).is_err());
    }

    #[test]
    fn haar_cap_and_kind_checks() {
        let mut cfg = RunConfig::preset(Protocol::Fig1Haar);
        cfg.n_qubits = 14;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("brickwork"), "{msg}");
        let mut cfg = RunConfig::preset(Protocol::Fig2PhaseDigital);
        cfg.scrambler.kind = ScramblerKind::Haar;
        assert!(cfg.validate().is_err());
    }
}
