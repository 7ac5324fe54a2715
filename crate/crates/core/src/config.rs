//! Instance configuration: one human-editable TOML file per instance.
//! Every section except the lot dimensions has defaults matching the
//! standard experiment setup, so typical instance files are two lines.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::adjacency::AdjacencyParams;
use crate::error::{Error, Result};
use crate::geometry::{EntranceSegment, LotSpec, Side, VehicleSpec};
use crate::layout::StallDims;
use crate::planner::PlannerParams;
use crate::sequencing::{cyclic_orders, OperationOrder};

/// Operation orders to schedule against: either every circular shift of the
/// identity, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrdersSpec {
    Keyword(String),
    Explicit(Vec<Vec<usize>>),
}

impl Default for OrdersSpec {
    fn default() -> Self {
        OrdersSpec::Keyword("cyclic-all".into())
    }
}

impl OrdersSpec {
    /// Expand to concrete operation orders for `n` vehicles.
    pub fn resolve(&self, n: usize) -> Result<Vec<OperationOrder>> {
        match self {
            OrdersSpec::Keyword(k) if k == "cyclic-all" => Ok(cyclic_orders(n)),
            OrdersSpec::Keyword(k) => Err(Error::ConfigInvalid(format!(
                "unknown orders keyword {k:?} (expected \"cyclic-all\")"
            ))),
            OrdersSpec::Explicit(list) => list
                .iter()
                .map(|pi| {
                    if pi.len() != n {
                        return Err(Error::LengthMismatch(pi.len(), n));
                    }
                    OperationOrder::new(pi.clone())
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawLot {
    length: f64,
    width: f64,
    #[serde(default)]
    entrances: Vec<EntranceSegment>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lot: RawLot,
    #[serde(default)]
    stall: StallDims,
    #[serde(default)]
    vehicle: VehicleSpec,
    #[serde(default)]
    planner: PlannerParams,
    #[serde(default)]
    adjacency: AdjacencyParams,
    #[serde(default)]
    orders: OrdersSpec,
}

/// Fully resolved, validated instance configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub lot: LotSpec,
    pub stall: StallDims,
    pub vehicle: VehicleSpec,
    pub planner: PlannerParams,
    pub adjacency: AdjacencyParams,
    pub orders: OrdersSpec,
}

impl InstanceConfig {
    /// Instance with the default stall/vehicle/planner setup, the entire
    /// left boundary as the entrance, and the given lot dimensions.
    pub fn standard(length: f64, width: f64) -> Result<Self> {
        let config = InstanceConfig {
            lot: LotSpec::with_full_left_entrance(length, width)?,
            stall: StallDims::default(),
            vehicle: VehicleSpec::default(),
            planner: PlannerParams::default(),
            adjacency: AdjacencyParams::default(),
            orders: OrdersSpec::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        let entrances = if raw.lot.entrances.is_empty() {
            vec![EntranceSegment {
                side: Side::Left,
                span: [0.0, raw.lot.width],
            }]
        } else {
            raw.lot.entrances
        };
        let config = InstanceConfig {
            lot: LotSpec::new(raw.lot.length, raw.lot.width, entrances)?,
            stall: raw.stall,
            vehicle: raw.vehicle,
            planner: raw.planner,
            adjacency: raw.adjacency,
            orders: raw.orders,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.lot.validate()?;
        self.vehicle.validate()?;
        self.planner.validate()?;
        if self.stall.width <= 0.0 || self.stall.length < self.stall.width {
            return Err(Error::ConfigInvalid(
                "stall dims must satisfy 0 < width <= length".into(),
            ));
        }
        if self.stall.width < self.vehicle.width || self.stall.length < self.vehicle.length {
            return Err(Error::ConfigInvalid(format!(
                "stall {}x{} smaller than vehicle {}x{}",
                self.stall.width, self.stall.length, self.vehicle.width, self.vehicle.length
            )));
        }
        if self.adjacency.gap_tolerance < 0.0 || self.adjacency.min_overlap <= 0.0 {
            return Err(Error::ConfigInvalid("invalid adjacency thresholds".into()));
        }
        Ok(())
    }

    /// Content hash of the resolved configuration; names the run directory
    /// so identical configs share artifacts.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance_file_gets_defaults() {
        let config = InstanceConfig::from_toml_str("[lot]\nlength = 15.0\nwidth = 12.0\n").unwrap();
        assert_eq!(config, InstanceConfig::standard(15.0, 12.0).unwrap());
        assert_eq!(config.lot.entrances.len(), 1);
        assert_eq!(config.lot.entrances[0].side, Side::Left);
        assert_eq!(config.lot.entrances[0].span, [0.0, 12.0]);
        assert_eq!(config.stall.width, 3.0);
        assert_eq!(config.vehicle.wheelbase, 4.240);
        assert_eq!(config.planner.max_iterations, 100_000);
    }

    #[test]
    fn partial_planner_override() {
        let config = InstanceConfig::from_toml_str(
            "[lot]\nlength = 15.0\nwidth = 12.0\n[planner]\nmax_iterations = 500\n",
        )
        .unwrap();
        assert_eq!(config.planner.max_iterations, 500);
        assert_eq!(config.planner.steer_samples, 7);
    }

    #[test]
    fn stall_smaller_than_vehicle_rejected() {
        let err = InstanceConfig::from_toml_str(
            "[lot]\nlength = 15.0\nwidth = 12.0\n[stall]\nwidth = 2.0\nlength = 9.5\n",
        );
        assert!(err.is_err());
    }

    #[test]
    fn fingerprint_stable_and_sensitive() {
        let a = InstanceConfig::standard(15.0, 12.0).unwrap();
        let b = InstanceConfig::standard(15.0, 12.0).unwrap();
        let c = InstanceConfig::standard(20.0, 16.0).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn orders_resolution() {
        let cyc = OrdersSpec::default().resolve(3).unwrap();
        assert_eq!(cyc.len(), 3);
        let explicit = OrdersSpec::Explicit(vec![vec![2, 0, 1]])
            .resolve(3)
            .unwrap();
        assert_eq!(explicit[0].0, vec![2, 0, 1]);
        assert!(OrdersSpec::Explicit(vec![vec![0, 1]]).resolve(3).is_err());
        assert!(OrdersSpec::Keyword("nope".into()).resolve(3).is_err());
    }
}
