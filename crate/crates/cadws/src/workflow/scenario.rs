//! Scenario configuration and instance construction.
//!
//! A scenario describes one episode: how many workflows arrive, from which
//! scale set they are drawn, the deadline relaxation `gamma`, the lateness
//! price `beta`, the Poisson rate `lambda`, and the master seed.

use serde::{Deserialize, Serialize};

use super::{
    generate_pattern, min_makespan, sample_arrivals, task_deadlines, Pattern, WorkflowDag,
    WorkflowError,
};
use crate::seeds::{derive_seed, derive_seed_path};

/// Workflow scale sets: (pattern, task count) per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scale {
    Small,
    Medium,
    Large,
}

impl Scale {
    /// Task count for each generated family at this scale.
    pub fn task_count(&self, pattern: Pattern) -> usize {
        match (self, pattern) {
            (Scale::Small, Pattern::Montage) => 25,
            (Scale::Small, _) => 30,
            (Scale::Medium, Pattern::Sipht) => 60,
            (Scale::Medium, _) => 50,
            (Scale::Large, _) => 100,
        }
    }

    pub fn letter(&self) -> &'static str {
        match self {
            Scale::Small => "S",
            Scale::Medium => "M",
            Scale::Large => "L",
        }
    }

    pub fn parse_letter(s: &str) -> Option<Scale> {
        match s {
            "S" | "s" | "small" | "Small" => Some(Scale::Small),
            "M" | "m" | "medium" | "Medium" => Some(Scale::Medium),
            "L" | "l" | "large" | "Large" => Some(Scale::Large),
            _ => None,
        }
    }
}

/// Full description of one episode's random instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub workflow_count: usize,
    pub scale: Scale,
    /// Deadline relaxation: deadline = arrival + gamma * min makespan.
    pub gamma: f64,
    /// SLA price per hour of lateness.
    pub beta: f64,
    /// Poisson arrival rate per second.
    pub lambda: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.workflow_count == 0 {
            return Err("workflow_count must be positive".into());
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("lambda", self.lambda),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be strictly positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Parses a scenario JSON document that mirrors [`ScenarioConfig`] fields.
pub fn parse_scenario_str(text: &str, origin: &str) -> Result<ScenarioConfig, WorkflowError> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| WorkflowError::Parse {
        path: origin.to_string(),
        detail: e.to_string(),
    })?;
    cfg.validate().map_err(|detail| WorkflowError::Parse {
        path: origin.to_string(),
        detail,
    })?;
    Ok(cfg)
}

/// One workflow of an episode, with arrival, deadline and per-task deadline
/// offsets all fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowInstance {
    pub dag: WorkflowDag,
    pub arrival_time: f64,
    /// arrival + gamma * min_makespan, exactly.
    pub deadline: f64,
    pub min_makespan: f64,
    /// Absolute task deadline = arrival + offset.
    pub task_deadline_offsets: Vec<f64>,
}

impl WorkflowInstance {
    pub fn new(
        dag: WorkflowDag,
        arrival_time: f64,
        gamma: f64,
        fastest_speed: f64,
    ) -> Result<Self, WorkflowError> {
        let mk = min_makespan(&dag, fastest_speed);
        let span = gamma * mk;
        let offsets = task_deadlines(&dag, span, fastest_speed)?;
        Ok(WorkflowInstance {
            dag,
            arrival_time,
            deadline: arrival_time + span,
            min_makespan: mk,
            task_deadline_offsets: offsets,
        })
    }

    pub fn task_deadline(&self, task_id: usize) -> f64 {
        self.arrival_time + self.task_deadline_offsets[task_id]
    }
}

/// Builds the episode's workflows: patterns drawn uniformly from the four
/// families at the configured scale, arrivals Poisson, deadlines derived
/// from the critical path at `fastest_speed`.
pub fn build_instances(
    config: &ScenarioConfig,
    fastest_speed: f64,
) -> Result<Vec<WorkflowInstance>, WorkflowError> {
    use rand::Rng;
    use rand::SeedableRng;

    let arrivals = sample_arrivals(
        config.workflow_count,
        config.lambda,
        derive_seed(config.seed, 0xA221),
    );
    let mut pick =
        rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xB7));
    let mut out = Vec::with_capacity(config.workflow_count);
    for (i, &arrival) in arrivals.iter().enumerate() {
        let pattern = Pattern::GENERATED[pick.gen_range(0..Pattern::GENERATED.len())];
        let n = config.scale.task_count(pattern);
        let dag_seed = derive_seed_path(config.seed, &[0xD46, i as u64]);
        let dag = generate_pattern(pattern, n, dag_seed)?;
        out.push(WorkflowInstance::new(dag, arrival, config.gamma, fastest_speed)?);
    }
    Ok(out)
}
