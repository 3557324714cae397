//! Simulation configuration: defaults, the TOML file schema, CLI overrides
//! and validation.
//!
//! Resolution order is defaults, then file values, then overrides. The
//! resolved configuration serializes back to the same schema, so the echo
//! can be fed straight back in.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergySchedule, RadioModel};
use crate::leach::LeachConfig;
use crate::metrics::Protocol;
use crate::topology::{read_positions, Position, TopologyError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("positions_file: {0}")]
    Positions(#[from] TopologyError),
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

/// Which protocols a batch runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolSelection {
    Dcp,
    Leach,
    Both,
}

impl ProtocolSelection {
    pub fn protocols(self) -> Vec<Protocol> {
        match self {
            ProtocolSelection::Dcp => vec![Protocol::Dcp],
            ProtocolSelection::Leach => vec![Protocol::Leach],
            ProtocolSelection::Both => vec![Protocol::Dcp, Protocol::Leach],
        }
    }
}

impl FromStr for ProtocolSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dcp" => Ok(ProtocolSelection::Dcp),
            "leach" => Ok(ProtocolSelection::Leach),
            "both" => Ok(ProtocolSelection::Both),
            other => Err(format!("unknown protocol `{other}` (expected dcp, leach or both)")),
        }
    }
}

/// Deployment parameters listed for reference that the unit schedule does
/// not use. Carried through to the resolved config unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Informational {
    pub radio_propagation: String,
    pub channel_type: String,
    pub antenna_model: String,
    pub energy_model: String,
}

impl Default for Informational {
    fn default() -> Self {
        Self {
            radio_propagation: "two way ground".into(),
            channel_type: "wireless channel".into(),
            antenna_model: "omni antenna".into(),
            energy_model: "battery".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub node_count: usize,
    pub area_width: f64,
    pub area_height: f64,
    /// `None` places the base station at the area center.
    pub base_station: Option<Position>,
    pub positions_file: Option<PathBuf>,
    /// Explicit node placement; overrides random placement when set.
    pub positions: Option<Vec<Position>>,
    pub range: f64,
    /// Ticks per refresh cycle. One tick is one second of simulated time.
    pub refresh_time: u64,
    pub initial_energy_joules: f64,
    pub p_active: f64,
    /// `None` runs until network death.
    pub horizon: Option<u64>,
    pub protocol: ProtocolSelection,
    pub seeds: Vec<u64>,
    pub schedule: EnergySchedule,
    pub radio: RadioModel,
    pub leach: LeachConfig,
    pub informational: Informational,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            node_count: 450,
            area_width: 1000.0,
            area_height: 1000.0,
            base_station: None,
            positions_file: None,
            positions: None,
            range: 150.0,
            refresh_time: 10,
            initial_energy_joules: 0.5,
            p_active: 0.5,
            horizon: None,
            protocol: ProtocolSelection::Both,
            seeds: vec![1, 2, 3, 4, 5],
            schedule: EnergySchedule::default(),
            radio: RadioModel::default(),
            leach: LeachConfig::default(),
            informational: Informational::default(),
        }
    }
}

impl SimConfig {
    pub fn base_station(&self) -> Position {
        self.base_station
            .unwrap_or_else(|| Position::new(self.area_width / 2.0, self.area_height / 2.0))
    }

    pub fn initial_units(&self) -> i64 {
        self.schedule.joules_to_units(self.initial_energy_joules)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.node_count == 0 {
            return Err(invalid("nodes", "must be at least 1"));
        }
        for (key, v) in [("area_width", self.area_width), ("area_height", self.area_height), ("range", self.range)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(key, format!("must be a positive length, got {v}")));
            }
        }
        if self.refresh_time == 0 {
            return Err(invalid("refresh_time", "must be at least 1 tick"));
        }
        if !(self.initial_energy_joules.is_finite() && self.initial_energy_joules >= 0.0) {
            return Err(invalid("initial_energy_joules", "must be non-negative"));
        }
        if !(self.schedule.units_per_joule.is_finite() && self.schedule.units_per_joule > 0.0) {
            return Err(invalid("units_per_joule", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p_active) {
            return Err(invalid("p_active", format!("must lie in [0, 1], got {}", self.p_active)));
        }
        if !self.schedule.is_ordered() {
            return Err(invalid(
                "energy",
                "costs must satisfy head_cost_per_cycle >= active_cost_per_tick >= idle_cost_per_tick >= 0",
            ));
        }
        if !self.radio.is_valid() {
            return Err(invalid("energy", "radio constants must be non-negative"));
        }
        let p = self.leach.head_fraction;
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid("head_fraction", format!("must lie in (0, 1), got {p}")));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed is required"));
        }
        if self.horizon.is_none() && self.schedule.idle_cost_per_tick == 0 {
            return Err(invalid(
                "horizon",
                "required when idle_cost_per_tick is 0, otherwise the network may never die",
            ));
        }
        if let Some(bs) = self.base_station {
            if !(bs.x.is_finite() && bs.y.is_finite()) {
                return Err(invalid("base_station", "coordinates must be finite"));
            }
        }
        Ok(())
    }

    /// Serializes the resolved configuration in the config-file schema.
    pub fn to_toml_string(&self) -> String {
        let file = ConfigFile::from(self);
        toml::to_string(&file).expect("config schema always serializes")
    }
}

/// Command-line overrides; `None` leaves the file/default value in place.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub nodes: Option<usize>,
    pub area: Option<(f64, f64)>,
    pub range: Option<f64>,
    pub refresh_time: Option<u64>,
    pub p_active: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub horizon: Option<u64>,
    pub protocol: Option<ProtocolSelection>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    nodes: Option<usize>,
    area_width: Option<f64>,
    area_height: Option<f64>,
    base_station_x: Option<f64>,
    base_station_y: Option<f64>,
    positions_file: Option<PathBuf>,
    range: Option<f64>,
    refresh_time: Option<u64>,
    initial_energy_joules: Option<f64>,
    p_active: Option<f64>,
    horizon: Option<u64>,
    protocol: Option<ProtocolSelection>,
    seeds: Option<Vec<u64>>,
    energy: Option<EnergySection>,
    leach: Option<LeachSection>,
    informational: Option<Informational>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergySection {
    head_cost_per_cycle: Option<i64>,
    active_cost_per_tick: Option<i64>,
    idle_cost_per_tick: Option<i64>,
    units_per_joule: Option<f64>,
    e_elec: Option<f64>,
    e_amp: Option<f64>,
    message_bits: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeachSection {
    head_fraction: Option<f64>,
}

impl From<&SimConfig> for ConfigFile {
    fn from(c: &SimConfig) -> Self {
        let bs = c.base_station();
        Self {
            nodes: Some(c.node_count),
            area_width: Some(c.area_width),
            area_height: Some(c.area_height),
            base_station_x: Some(bs.x),
            base_station_y: Some(bs.y),
            positions_file: c.positions_file.clone(),
            range: Some(c.range),
            refresh_time: Some(c.refresh_time),
            initial_energy_joules: Some(c.initial_energy_joules),
            p_active: Some(c.p_active),
            horizon: c.horizon,
            protocol: Some(c.protocol),
            seeds: Some(c.seeds.clone()),
            energy: Some(EnergySection {
                head_cost_per_cycle: Some(c.schedule.head_cost_per_cycle),
                active_cost_per_tick: Some(c.schedule.active_cost_per_tick),
                idle_cost_per_tick: Some(c.schedule.idle_cost_per_tick),
                units_per_joule: Some(c.schedule.units_per_joule),
                e_elec: Some(c.radio.e_elec),
                e_amp: Some(c.radio.e_amp),
                message_bits: Some(c.radio.message_bits),
            }),
            leach: Some(LeachSection {
                head_fraction: Some(c.leach.head_fraction),
            }),
            informational: Some(c.informational.clone()),
        }
    }
}

fn overlay_file(config: &mut SimConfig, file: ConfigFile, base_dir: Option<&Path>) {
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(config.node_count, file.nodes);
    set!(config.area_width, file.area_width);
    set!(config.area_height, file.area_height);
    set!(config.range, file.range);
    set!(config.refresh_time, file.refresh_time);
    set!(config.initial_energy_joules, file.initial_energy_joules);
    set!(config.p_active, file.p_active);
    set!(config.protocol, file.protocol);
    set!(config.seeds, file.seeds);
    if file.horizon.is_some() {
        config.horizon = file.horizon;
    }
    if file.base_station_x.is_some() || file.base_station_y.is_some() {
        let center = config.base_station();
        config.base_station = Some(Position::new(
            file.base_station_x.unwrap_or(center.x),
            file.base_station_y.unwrap_or(center.y),
        ));
    }
    if let Some(path) = file.positions_file {
        config.positions_file = Some(match base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path,
        });
    }
    if let Some(e) = file.energy {
        set!(config.schedule.head_cost_per_cycle, e.head_cost_per_cycle);
        set!(config.schedule.active_cost_per_tick, e.active_cost_per_tick);
        set!(config.schedule.idle_cost_per_tick, e.idle_cost_per_tick);
        set!(config.schedule.units_per_joule, e.units_per_joule);
        set!(config.radio.e_elec, e.e_elec);
        set!(config.radio.e_amp, e.e_amp);
        set!(config.radio.message_bits, e.message_bits);
    }
    if let Some(l) = file.leach {
        set!(config.leach.head_fraction, l.head_fraction);
    }
    set!(config.informational, file.informational);
}

fn overlay_flags(config: &mut SimConfig, o: &Overrides) {
    if let Some(n) = o.nodes {
        config.node_count = n;
    }
    if let Some((w, h)) = o.area {
        config.area_width = w;
        config.area_height = h;
    }
    if let Some(r) = o.range {
        config.range = r;
    }
    if let Some(t) = o.refresh_time {
        config.refresh_time = t;
    }
    if let Some(p) = o.p_active {
        config.p_active = p;
    }
    if let Some(s) = &o.seeds {
        config.seeds = s.clone();
    }
    if o.horizon.is_some() {
        config.horizon = o.horizon;
    }
    if let Some(p) = o.protocol {
        config.protocol = p;
    }
}

/// Resolves a configuration from TOML text. Relative `positions_file` paths
/// are taken relative to `base_dir`.
pub fn resolve_config(
    text: &str,
    base_dir: Option<&Path>,
    overrides: &Overrides,
) -> Result<SimConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    let mut config = SimConfig::default();
    overlay_file(&mut config, file, base_dir);
    overlay_flags(&mut config, overrides);
    if let Some(path) = &config.positions_file {
        let positions = read_positions(path)?;
        config.node_count = positions.len();
        config.positions = Some(positions);
    }
    config.validate()?;
    Ok(config)
}

/// Loads `path` (or nothing, for pure defaults) and applies `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<SimConfig, ConfigError> {
    match path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            resolve_config(&text, path.parent(), overrides)
        }
        None => resolve_config("", None, overrides),
    }
}
