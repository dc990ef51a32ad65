use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chainsolve::{Chain, ChainSolution, SolveStats};
use crate::darp::{DarpError, DarpInstance, DarpSolution, Fleet, Request, RequestId, VehicleRoute};
use crate::model::{ChainingInstance, Cost, CostPolicy, Duration, ModelError, Plan, TravelMatrix, Vehicle};

pub const SCHEMA_VERSION: u32 = 1;
const DEFAULT_CAPACITY: u32 = 4;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    /// Carries serde's line, column and field information.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Darp(#[from] DarpError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TravelSpec {
    Matrix { rows: Vec<Vec<Duration>> },
    /// Manhattan distance divided by speed, rounded up.
    Grid { points: Vec<(i64, i64)>, speed: i64 },
}

impl TravelSpec {
    pub fn build(&self) -> Result<TravelMatrix, ModelError> {
        match self {
            TravelSpec::Matrix { rows } => TravelMatrix::from_rows(rows.clone()),
            TravelSpec::Grid { points, speed } => TravelMatrix::from_grid(points, *speed),
        }
    }
}

/// On-disk instance. Holds either `plans` (a chaining instance) or
/// `requests` (a dial-a-ride instance).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub travel: TravelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<CostPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plans: Option<Vec<Plan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requests: Option<Vec<Request>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub auto_fleet: bool,
    #[serde(default)]
    pub vehicles: Vec<Vehicle>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Chaining(ChainingInstance),
    Darp(DarpInstance),
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IoError::Version { found: self.schema_version });
        }
        let travel = self.travel.build()?;
        match (self.plans, self.requests) {
            (Some(plans), None) => {
                if self.auto_fleet || self.capacity.is_some() {
                    return Err(IoError::Schema("`auto_fleet` and `capacity` only apply to requests".into()));
                }
                let policy = self.policy.unwrap_or(CostPolicy::TravelCost);
                Ok(Instance::Chaining(ChainingInstance::new(plans, self.vehicles, travel, policy)?))
            }
            (None, Some(requests)) => {
                if self.policy.is_some() {
                    return Err(IoError::Schema("`policy` only applies to plans".into()));
                }
                let fleet = match (self.auto_fleet, self.vehicles.is_empty()) {
                    (true, false) => {
                        return Err(IoError::Schema("`auto_fleet` excludes explicit `vehicles`".into()))
                    }
                    (true, true) => Fleet::Auto,
                    (false, _) => Fleet::Vehicles { vehicles: self.vehicles },
                };
                let capacity = self.capacity.unwrap_or(DEFAULT_CAPACITY);
                Ok(Instance::Darp(DarpInstance::new(requests, travel, capacity, fleet)?))
            }
            _ => Err(IoError::Schema("exactly one of `plans` and `requests` must be present".into())),
        }
    }

    pub fn from_chaining(instance: &ChainingInstance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            travel: TravelSpec::Matrix { rows: instance.travel().rows() },
            policy: Some(instance.policy()),
            capacity: None,
            plans: Some(instance.plans().to_vec()),
            requests: None,
            auto_fleet: false,
            vehicles: instance.vehicles().to_vec(),
        }
    }

    pub fn from_darp(instance: &DarpInstance) -> Self {
        let (auto_fleet, vehicles) = match instance.fleet() {
            Fleet::Auto => (true, Vec::new()),
            Fleet::Vehicles { vehicles } => (false, vehicles.clone()),
        };
        Self {
            schema_version: SCHEMA_VERSION,
            travel: TravelSpec::Matrix { rows: instance.travel().rows() },
            policy: None,
            capacity: Some(instance.capacity()),
            plans: None,
            requests: Some(instance.requests().to_vec()),
            auto_fleet,
            vehicles,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSolutionFile {
    pub schema_version: u32,
    pub policy: CostPolicy,
    pub objective: Cost,
    pub chains: Vec<Chain>,
    pub stats: SolveStats,
}

impl ChainSolutionFile {
    pub fn new(policy: CostPolicy, solution: &ChainSolution) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            policy,
            objective: solution.objective,
            chains: solution.chains.clone(),
            // wall time is not written, so files compare equal across runs
            stats: SolveStats { wall_time: Default::default(), ..solution.stats },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarpSolutionFile {
    pub schema_version: u32,
    pub method: String,
    pub objective: Cost,
    pub routes: Vec<VehicleRoute>,
    pub delays: Vec<(RequestId, Duration)>,
}

impl DarpSolutionFile {
    pub fn new(solution: &DarpSolution) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            method: solution.method.clone(),
            objective: solution.objective,
            routes: solution.routes.clone(),
            delays: solution.delays.clone(),
        }
    }

    pub fn into_solution(self) -> DarpSolution {
        DarpSolution { method: self.method, objective: self.objective, routes: self.routes, delays: self.delays }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(|source| IoError::Write { path: path.into(), source })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainsolve::solve_chaining;
    use crate::darp::{insertion_heuristic, Fleet};
    use crate::model::tests::e1;
    use crate::model::PlanId;

    const E1: &str = r#"{
  "schema_version": 1,
  "travel": { "kind": "grid", "points": [[0, 0], [2, 0], [4, 0]], "speed": 1 },
  "policy": { "kind": "travel-cost" },
  "plans": [
    { "id": 1, "origin": 0, "destination": 1, "t_or": 5, "t_de": 10, "d_max": 0 },
    { "id": 2, "origin": 2, "destination": 0, "t_or": 11, "t_de": 20, "d_max": 3 }
  ],
  "vehicles": [{ "id": 1, "start": 0, "t_st": 0 }]
}"#;

    #[test]
    fn e1_text_matches_programmatic() {
        assert_eq!(parse_instance(E1).unwrap(), Instance::Chaining(e1()));
    }

    #[test]
    fn semantic_errors_name_the_culprit() {
        let reversed = E1.replace("\"t_or\": 5, \"t_de\": 10", "\"t_or\": 12, \"t_de\": 10");
        let err = parse_instance(&reversed).unwrap_err();
        assert!(matches!(err, IoError::Model(ModelError::PlanTimesReversed(PlanId(1)))));
        assert!(err.to_string().contains("p1"));

        let negative = r#"{"schema_version": 1, "travel": {"kind": "matrix", "rows": [[0, -1], [1, 0]]}, "plans": []}"#;
        assert!(matches!(
            parse_instance(negative),
            Err(IoError::Model(ModelError::NegativeTravelTime { .. }))
        ));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_instance("{\n  \"schema_version\": 1,\n  \"travel\": 7\n}").unwrap_err();
        assert!(matches!(err, IoError::Parse(_)));
        assert!(err.to_string().contains("line 3"), "{err}");
        let unknown = E1.replace("\"policy\"", "\"polcy\"");
        assert!(parse_instance(&unknown).unwrap_err().to_string().contains("polcy"));
    }

    #[test]
    fn structural_errors() {
        let both = E1.replace("\"vehicles\"", "\"requests\": [], \"vehicles\"");
        assert!(matches!(parse_instance(&both), Err(IoError::Schema(_))));
        let v2 = E1.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(parse_instance(&v2), Err(IoError::Version { found: 2 })));
    }

    #[test]
    fn round_trips() {
        let file = InstanceFile::from_chaining(&e1());
        let back = parse_instance(&to_json(&file)).unwrap();
        assert_eq!(back, Instance::Chaining(e1()));

        let sol = solve_chaining(&e1()).unwrap();
        let out = ChainSolutionFile::new(e1().policy(), &sol);
        let back: ChainSolutionFile = serde_json::from_str(&to_json(&out)).unwrap();
        assert_eq!(back, out);

        let darp = crate::darp::tests::instance(
            vec![crate::darp::tests::req(1, 0, 2, 0, 5)],
            vec![crate::darp::tests::vehicle(1, 0, 0)],
        );
        let back = parse_instance(&to_json(&InstanceFile::from_darp(&darp))).unwrap();
        assert_eq!(back, Instance::Darp(darp.clone()));
        let auto = darp.with_fleet(Fleet::Auto).unwrap();
        assert_eq!(parse_instance(&to_json(&InstanceFile::from_darp(&auto))).unwrap(), Instance::Darp(auto));

        let sol = insertion_heuristic(&darp).unwrap();
        let file = DarpSolutionFile::new(&sol);
        let back: DarpSolutionFile = serde_json::from_str(&to_json(&file)).unwrap();
        assert_eq!(back.into_solution(), sol);
    }
}
