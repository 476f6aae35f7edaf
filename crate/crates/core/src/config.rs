//! TOML configuration schema.
//!
//! Sections: `[system]`, `[phases]`, `[grid]`, `[ring.1]`..`[ring.4]`,
//! `[pump.1]`..`[pump.4]`. Keys match the parameter names; frequency-like
//! keys are accepted either raw in rad/s (e.g. `pump_center`) or as ordinary
//! frequencies with an explicit unit suffix (`pump_center_thz = 193.415`,
//! `mismatch_ghz = 0.0166`), converted to angular rad/s on load.

use crate::error::{Error, Result};
use crate::model::{FrequencyBin, GridSpec, Polarization, PumpParams, RingParams, SystemConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub system: SystemSection,
    pub phases: PhasesSection,
    pub grid: GridSection,
    pub ring: BTreeMap<String, RingSection>,
    pub pump: BTreeMap<String, PumpSection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Rigid bin displacement of ring 2 against ring 1 [rad/s or GHz].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_offset_12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_offset_12_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_offset_34: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_offset_34_ghz: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasesSection {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width_ghz: Option<f64>,
    pub n_points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    pub radius: f64,
    pub group_velocity: f64,
    pub nonlinear_param: f64,
    pub q_intrinsic: f64,
    pub coupling_eff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_center_thz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_center_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_center_thz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_center_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idler_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idler_center_thz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idler_center_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch_ghz: Option<f64>,
    pub polarization: String,
    pub signal_bin: String,
    pub idler_bin: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub peak_power: f64,
    pub phase: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_thz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_ghz: Option<f64>,
    pub duration: f64,
}

/// Resolves a frequency given raw rad/s and/or suffixed ordinary-frequency
/// variants; exactly one must be present unless the field is optional.
fn resolve_freq(
    name: &str,
    raw: Option<f64>,
    thz: Option<f64>,
    ghz: Option<f64>,
) -> Result<Option<f64>> {
    let mut given = Vec::new();
    if let Some(v) = raw {
        given.push(v);
    }
    if let Some(v) = thz {
        given.push(TAU * v * 1e12);
    }
    if let Some(v) = ghz {
        given.push(TAU * v * 1e9);
    }
    match given.len() {
        0 => Ok(None),
        1 => Ok(Some(given[0])),
        _ => Err(Error::Config(format!(
            "{name}: give exactly one unit variant"
        ))),
    }
}

fn required(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("{name} is required")))
}

fn parse_polarization(s: &str) -> Result<Polarization> {
    match s {
        "H" => Ok(Polarization::H),
        "V" => Ok(Polarization::V),
        _ => Err(Error::Config(format!(
            "polarization {s:?} must be \"H\" or \"V\""
        ))),
    }
}

fn parse_bin(s: &str) -> Result<FrequencyBin> {
    FrequencyBin::ALL
        .into_iter()
        .find(|b| b.label() == s)
        .ok_or_else(|| Error::Config(format!("unknown frequency bin {s:?}")))
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_system(&self) -> Result<SystemConfig> {
        let mut rings = Vec::with_capacity(4);
        let mut pumps = Vec::with_capacity(4);
        for n in 1..=4u8 {
            let key = n.to_string();
            let rs = self
                .ring
                .get(&key)
                .ok_or_else(|| Error::Config(format!("missing [ring.{n}]")))?;
            let ps = self
                .pump
                .get(&key)
                .ok_or_else(|| Error::Config(format!("missing [pump.{n}]")))?;

            let pump_center = required(
                "pump_center",
                resolve_freq(
                    "pump_center",
                    rs.pump_center,
                    rs.pump_center_thz,
                    rs.pump_center_ghz,
                )?,
            )?;
            let mismatch = required(
                "mismatch",
                resolve_freq("mismatch", rs.mismatch, None, rs.mismatch_ghz)?,
            )?;
            // Resonance centers may be omitted: the degenerate-bin
            // approximation puts the signal at the pump and fixes the idler
            // by energy conservation. Linewidths shift by < 0.2%.
            let signal_center = resolve_freq(
                "signal_center",
                rs.signal_center,
                rs.signal_center_thz,
                rs.signal_center_ghz,
            )?
            .unwrap_or(pump_center);
            let idler_center = resolve_freq(
                "idler_center",
                rs.idler_center,
                rs.idler_center_thz,
                rs.idler_center_ghz,
            )?
            .unwrap_or(2.0 * pump_center - signal_center - mismatch);

            let ring = RingParams {
                ring_id: n,
                radius: rs.radius,
                group_velocity: rs.group_velocity,
                nonlinear_param: rs.nonlinear_param,
                q_intrinsic: rs.q_intrinsic,
                coupling_eff: rs.coupling_eff,
                pump_center,
                signal_center,
                idler_center,
                mismatch,
                polarization: parse_polarization(&rs.polarization)?,
                signal_bin: parse_bin(&rs.signal_bin)?,
                idler_bin: parse_bin(&rs.idler_bin)?,
            };
            ring.validate()?;
            rings.push(ring);

            let pump = PumpParams {
                peak_power: ps.peak_power,
                phase: ps.phase,
                center: required(
                    "pump center",
                    resolve_freq("center", ps.center, ps.center_thz, ps.center_ghz)?,
                )?,
                duration: ps.duration,
            };
            pump.validate()?;
            pumps.push(pump);
        }

        let half_width = required(
            "grid half_width",
            resolve_freq(
                "half_width",
                self.grid.half_width,
                None,
                self.grid.half_width_ghz,
            )?,
        )?;
        let grid = GridSpec::new(half_width, self.grid.n_points)?;

        let bin_offset_12 = resolve_freq(
            "bin_offset_12",
            self.system.bin_offset_12,
            None,
            self.system.bin_offset_12_ghz,
        )?
        .unwrap_or(0.0);
        let bin_offset_34 = resolve_freq(
            "bin_offset_34",
            self.system.bin_offset_34,
            None,
            self.system.bin_offset_34_ghz,
        )?
        .unwrap_or(0.0);

        let system = SystemConfig {
            rings: rings
                .try_into()
                .map_err(|_| Error::Config("ring count".into()))?,
            pumps: pumps
                .try_into()
                .map_err(|_| Error::Config("pump count".into()))?,
            theta1: self.phases.theta1,
            theta2: self.phases.theta2,
            theta3: self.phases.theta3,
            grid,
            bin_offset_12,
            bin_offset_34,
        };
        system.validate()?;
        Ok(system)
    }

    pub fn from_system(system: &SystemConfig) -> Self {
        let mut ring = BTreeMap::new();
        let mut pump = BTreeMap::new();
        for n in 0..4 {
            let r = &system.rings[n];
            ring.insert(
                (n + 1).to_string(),
                RingSection {
                    radius: r.radius,
                    group_velocity: r.group_velocity,
                    nonlinear_param: r.nonlinear_param,
                    q_intrinsic: r.q_intrinsic,
                    coupling_eff: r.coupling_eff,
                    pump_center: Some(r.pump_center),
                    signal_center: Some(r.signal_center),
                    idler_center: Some(r.idler_center),
                    mismatch: Some(r.mismatch),
                    polarization: r.polarization.label().to_string(),
                    signal_bin: r.signal_bin.label().to_string(),
                    idler_bin: r.idler_bin.label().to_string(),
                    ..Default::default()
                },
            );
            let p = &system.pumps[n];
            pump.insert(
                (n + 1).to_string(),
                PumpSection {
                    peak_power: p.peak_power,
                    phase: p.phase,
                    center: Some(p.center),
                    duration: p.duration,
                    ..Default::default()
                },
            );
        }
        ConfigFile {
            system: SystemSection {
                bin_offset_12: Some(system.bin_offset_12),
                bin_offset_34: Some(system.bin_offset_34),
                ..Default::default()
            },
            phases: PhasesSection {
                theta1: system.theta1,
                theta2: system.theta2,
                theta3: system.theta3,
            },
            grid: GridSection {
                half_width: Some(system.grid.half_width),
                half_width_ghz: None,
                n_points: system.grid.n_points,
            },
            ring,
            pump,
        }
    }
}

/// FNV-1a hash of the canonical TOML serialization, hex-encoded. Embedded
/// in every artifact sidecar so outputs are traceable to their inputs.
pub fn config_hash(system: &SystemConfig) -> Result<String> {
    let canonical = ConfigFile::from_system(system).to_toml()?;
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    Ok(format!("{h:016x}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_system;

    #[test]
    fn default_system_roundtrips() {
        let sys = default_system();
        let text = ConfigFile::from_system(&sys).to_toml().unwrap();
        let back = ConfigFile::from_toml(&text).unwrap().to_system().unwrap();
        assert_eq!(back.rings[0].radius, sys.rings[0].radius);
        assert_eq!(back.rings[3].mismatch, sys.rings[3].mismatch);
        assert_eq!(back.pumps[1].center, sys.pumps[1].center);
        assert_eq!(back.grid.n_points, sys.grid.n_points);
        assert_eq!(back.theta3, sys.theta3);
    }

    #[test]
    fn unit_suffix_keys_convert() {
        let sys = default_system();
        let mut cfg = ConfigFile::from_system(&sys);
        for n in 1..=4 {
            let r = cfg.ring.get_mut(&n.to_string()).unwrap();
            let thz = r.pump_center.take().unwrap() / (TAU * 1e12);
            r.pump_center_thz = Some(thz);
            r.signal_center = None;
            r.idler_center = None;
            let ghz = r.mismatch.take().unwrap() / (TAU * 1e9);
            r.mismatch_ghz = Some(ghz);
            let p = cfg.pump.get_mut(&n.to_string()).unwrap();
            let pthz = p.center.take().unwrap() / (TAU * 1e12);
            p.center_thz = Some(pthz);
        }
        cfg.grid.half_width_ghz = Some(cfg.grid.half_width.take().unwrap() / (TAU * 1e9));
        let text = cfg.to_toml().unwrap();
        let back = ConfigFile::from_toml(&text).unwrap().to_system().unwrap();
        assert!((back.rings[0].pump_center - sys.rings[0].pump_center).abs() < 1.0);
        assert!((back.rings[0].mismatch - sys.rings[0].mismatch).abs() < 1e-3);
        assert!((back.grid.half_width - sys.grid.half_width).abs() < 1.0);
        // omitted centers fall back to the degenerate-bin approximation
        assert_eq!(back.rings[0].signal_center, back.rings[0].pump_center);
    }

    #[test]
    fn conflicting_units_rejected() {
        let sys = default_system();
        let mut cfg = ConfigFile::from_system(&sys);
        let r = cfg.ring.get_mut("1").unwrap();
        r.pump_center_thz = Some(193.415);
        let err = cfg.to_system();
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn junk_rejected() {
        assert!(ConfigFile::from_toml("not toml at all [").is_err());
        assert!(ConfigFile::from_toml("[phases]\ntheta1 = 0.0\nbogus_key = 1\n").is_err());
    }

    #[test]
    fn missing_ring_rejected() {
        let sys = default_system();
        let mut cfg = ConfigFile::from_system(&sys);
        cfg.ring.remove("3");
        match cfg.to_system() {
            Err(Error::Config(msg)) => assert!(msg.contains("ring.3")),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let sys = default_system();
        let a = config_hash(&sys).unwrap();
        let b = config_hash(&sys).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        let mut sys2 = default_system();
        sys2.theta1 = 0.1;
        assert_ne!(a, config_hash(&sys2).unwrap());
    }
}
