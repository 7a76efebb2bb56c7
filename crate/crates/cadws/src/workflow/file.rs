//! DAG file schema: one JSON document per workflow.
//!
//! ```json
//! {
//!   "pattern": "Montage",
//!   "tasks": [{"id": 0, "workload": 120.0}, {"id": 1, "workload": 35.5}],
//!   "edges": [[0, 1]]
//! }
//! ```
//!
//! Task ids must be dense `0..n`. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_dag, Pattern, WorkflowDag, WorkflowError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DagFile {
    pattern: String,
    tasks: Vec<TaskEntry>,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    id: usize,
    workload: f64,
}

fn pattern_from_name(name: &str) -> Pattern {
    match name {
        "CyberShake" => Pattern::CyberShake,
        "Montage" => Pattern::Montage,
        "Inspiral" => Pattern::Inspiral,
        "SIPHT" => Pattern::Sipht,
        _ => Pattern::Custom,
    }
}

/// Parses a DAG document from a string. `origin` names the source in errors.
pub fn parse_dag_str(text: &str, origin: &str) -> Result<WorkflowDag, WorkflowError> {
    let file: DagFile = serde_json::from_str(text).map_err(|e| WorkflowError::Parse {
        path: origin.to_string(),
        detail: e.to_string(),
    })?;
    let tasks: Vec<(usize, f64)> = file.tasks.iter().map(|t| (t.id, t.workload)).collect();
    build_dag(&tasks, &file.edges, pattern_from_name(&file.pattern)).map_err(|e| match e {
        WorkflowError::CycleDetected => WorkflowError::CycleDetected,
        other => WorkflowError::Parse {
            path: origin.to_string(),
            detail: other.to_string(),
        },
    })
}

pub fn load_dag(path: &Path) -> Result<WorkflowDag, WorkflowError> {
    let text = std::fs::read_to_string(path).map_err(|source| WorkflowError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dag_str(&text, &path.display().to_string())
}

pub fn dag_to_json(dag: &WorkflowDag) -> String {
    let file = DagFile {
        pattern: dag.pattern().name().to_string(),
        tasks: dag
            .tasks()
            .iter()
            .map(|t| TaskEntry {
                id: t.id,
                workload: t.workload,
            })
            .collect(),
        edges: dag.edges().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("dag serialization cannot fail")
}

pub fn save_dag(dag: &WorkflowDag, path: &Path) -> Result<(), WorkflowError> {
    std::fs::write(path, dag_to_json(dag)).map_err(|source| WorkflowError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workflow::generate_pattern;

    #[test]
    fn minimal_two_task_chain() {
        let text = r#"{"pattern":"Custom","tasks":[{"id":0,"workload":5.0},{"id":1,"workload":6.0}],"edges":[[0,1]]}"#;
        let dag = parse_dag_str(text, "inline").unwrap();
        assert_eq!(dag.len(), 2);
        assert_eq!(dag.task(1).predecessors, vec![0]);
    }

    #[test]
    fn duplicate_task_id_is_parse_error() {
        let text = r#"{"pattern":"Custom","tasks":[{"id":0,"workload":5.0},{"id":0,"workload":6.0}],"edges":[]}"#;
        let err = parse_dag_str(text, "inline").unwrap_err();
        assert!(matches!(err, WorkflowError::Parse { .. }), "{err}");
    }

    #[test]
    fn malformed_json_reports_origin() {
        let err = parse_dag_str("{nope", "bad.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json"), "{msg}");
    }

    #[test]
    fn cycle_in_file_detected() {
        let text = r#"{"pattern":"Custom","tasks":[{"id":0,"workload":1.0},{"id":1,"workload":1.0}],"edges":[[0,1],[1,0]]}"#;
        assert!(matches!(
            parse_dag_str(text, "inline"),
            Err(WorkflowError::CycleDetected)
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wf.json");
        let dag = generate_pattern(Pattern::Inspiral, 30, 17).unwrap();
        save_dag(&dag, &path).unwrap();
        let loaded = load_dag(&path).unwrap();
        assert_eq!(dag, loaded);
    }
}
