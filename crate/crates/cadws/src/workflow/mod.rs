//! Workflow DAGs: construction, validation, synthetic generators, file I/O,
//! Poisson arrivals, and deadline computation.

mod arrivals;
mod file;
mod generate;
mod scenario;

pub use arrivals::sample_arrivals;
pub use file::{load_dag, parse_dag_str, save_dag, dag_to_json};
pub use generate::generate_pattern;
pub use scenario::{build_instances, Scale, ScenarioConfig, parse_scenario_str};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("cycle detected in workflow graph")]
    CycleDetected,
    #[error("edge ({from}, {to}) references a missing task")]
    DanglingEdge { from: usize, to: usize },
    #[error("task {id} appears more than once")]
    DuplicateTaskId { id: usize },
    #[error("task ids must be dense 0..n; missing id {expected}")]
    NonDenseIds { expected: usize },
    #[error("task {id} has non-positive workload {workload}")]
    InvalidWorkload { id: usize, workload: f64 },
    #[error("pattern generators need at least 3 tasks, got {0}")]
    UnsupportedCount(usize),
    #[error("no synthetic generator for pattern {0:?}")]
    UngeneratablePattern(Pattern),
    #[error("deadline span {span} is below the minimum makespan {min_makespan}")]
    InfeasibleSpan { span: f64, min_makespan: f64 },
    #[error("parse error at {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Workflow topology family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    CyberShake,
    Montage,
    Inspiral,
    Sipht,
    Custom,
}

impl Pattern {
    pub const GENERATED: [Pattern; 4] = [
        Pattern::CyberShake,
        Pattern::Montage,
        Pattern::Inspiral,
        Pattern::Sipht,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Pattern::CyberShake => "CyberShake",
            Pattern::Montage => "Montage",
            Pattern::Inspiral => "Inspiral",
            Pattern::Sipht => "SIPHT",
            Pattern::Custom => "Custom",
        }
    }
}

/// One task of a workflow: a positive workload plus precedence links.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: usize,
    /// Abstract compute units; execution time is workload / VM speed.
    pub workload: f64,
    pub predecessors: Vec<usize>,
    pub successors: Vec<usize>,
}

/// Immutable, validated task graph.
///
/// Task ids are dense `0..n`. The topological order is computed once at
/// construction and cached; acyclicity is guaranteed for every constructed
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowDag {
    pattern: Pattern,
    tasks: Vec<Task>,
    edges: Vec<(usize, usize)>,
    topo_order: Vec<usize>,
}

impl WorkflowDag {
    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, id: usize) -> &Task {
        &self.tasks[id]
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Cached topological order (every task exactly once).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn sources(&self) -> impl Iterator<Item = &Task> {
        self.tasks.iter().filter(|t| t.predecessors.is_empty())
    }

    pub fn sinks(&self) -> impl Iterator<Item = &Task> {
        self.tasks.iter().filter(|t| t.successors.is_empty())
    }

    /// Transitive descendant count of `id` (excluding `id` itself).
    pub fn descendant_count(&self, id: usize) -> usize {
        let mut seen = vec![false; self.tasks.len()];
        let mut stack: Vec<usize> = self.tasks[id].successors.clone();
        let mut count = 0;
        while let Some(t) = stack.pop() {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            count += 1;
            stack.extend_from_slice(&self.tasks[t].successors);
        }
        count
    }
}

/// Builds and validates a DAG from `(id, workload)` task specs and edges.
///
/// Derives predecessor/successor sets, rejects dangling edges and cycles,
/// and caches a topological order.
pub fn build_dag(
    tasks: &[(usize, f64)],
    edges: &[(usize, usize)],
    pattern: Pattern,
) -> Result<WorkflowDag, WorkflowError> {
    let n = tasks.len();
    let mut seen = vec![false; n];
    for &(id, workload) in tasks {
        if id >= n {
            return Err(WorkflowError::NonDenseIds { expected: id });
        }
        if seen[id] {
            return Err(WorkflowError::DuplicateTaskId { id });
        }
        seen[id] = true;
        if !(workload > 0.0) || !workload.is_finite() {
            return Err(WorkflowError::InvalidWorkload { id, workload });
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(WorkflowError::NonDenseIds { expected: missing });
    }

    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for &(from, to) in edges {
        if from >= n || to >= n {
            return Err(WorkflowError::DanglingEdge { from, to });
        }
        if from == to {
            return Err(WorkflowError::CycleDetected);
        }
        out[from].push(to);
        inc[to].push(from);
    }
    for v in out.iter_mut().chain(inc.iter_mut()) {
        v.sort_unstable();
        v.dedup();
    }

    let mut workloads = vec![0.0; n];
    for &(id, workload) in tasks {
        workloads[id] = workload;
    }
    let built: Vec<Task> = (0..n)
        .map(|id| Task {
            id,
            workload: workloads[id],
            predecessors: inc[id].clone(),
            successors: out[id].clone(),
        })
        .collect();

    let topo_order = topo_sort(&built)?;

    let mut edges: Vec<(usize, usize)> = built
        .iter()
        .flat_map(|t| t.successors.iter().map(move |&s| (t.id, s)))
        .collect();
    edges.sort_unstable();

    Ok(WorkflowDag {
        pattern,
        tasks: built,
        edges,
        topo_order,
    })
}

/// Kahn's algorithm, visiting ready tasks in ascending id order.
fn topo_sort(tasks: &[Task]) -> Result<Vec<usize>, WorkflowError> {
    let n = tasks.len();
    let mut indeg: Vec<usize> = tasks.iter().map(|t| t.predecessors.len()).collect();
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(std::cmp::Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(i)) = heap.pop() {
        order.push(i);
        for &s in &tasks[i].successors {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(std::cmp::Reverse(s));
            }
        }
    }
    if order.len() != n {
        return Err(WorkflowError::CycleDetected);
    }
    Ok(order)
}

/// Critical-path completion time at `fastest_speed` with unlimited
/// parallelism and no delays: each task takes workload / fastest_speed and
/// starts the moment its slowest predecessor finishes.
pub fn min_makespan(dag: &WorkflowDag, fastest_speed: f64) -> f64 {
    assert!(fastest_speed > 0.0);
    let finish = path_finish_times(dag, fastest_speed);
    finish.iter().cloned().fold(0.0, f64::max)
}

/// Earliest finish time of every task on the unlimited fastest-speed pool.
fn path_finish_times(dag: &WorkflowDag, speed: f64) -> Vec<f64> {
    let mut finish = vec![0.0f64; dag.len()];
    for &i in dag.topo_order() {
        let start = dag.task(i)
            .predecessors
            .iter()
            .map(|&p| finish[p])
            .fold(0.0, f64::max);
        finish[i] = start + dag.task(i).workload / speed;
    }
    finish
}

/// Distributes a workflow deadline span over tasks.
///
/// Each task's offset is `span * cp(i) / through(i)` where `cp(i)` is the
/// longest path ending at the task and `through(i)` the longest path passing
/// through it (both at `fastest_speed`). Offsets are nondecreasing along
/// every edge, every sink gets exactly `span`, and along a chain each task's
/// share is proportional to its cumulative workload.
pub fn task_deadlines(
    dag: &WorkflowDag,
    span: f64,
    fastest_speed: f64,
) -> Result<Vec<f64>, WorkflowError> {
    assert!(fastest_speed > 0.0);
    let finish = path_finish_times(dag, fastest_speed);
    let longest = finish.iter().cloned().fold(0.0, f64::max);
    if span < longest {
        return Err(WorkflowError::InfeasibleSpan {
            span,
            min_makespan: longest,
        });
    }
    // Longest path from each task to any sink, inclusive of the task.
    let mut tail = vec![0.0f64; dag.len()];
    for &i in dag.topo_order().iter().rev() {
        let best_succ = dag.task(i)
            .successors
            .iter()
            .map(|&s| tail[s])
            .fold(0.0, f64::max);
        tail[i] = dag.task(i).workload / fastest_speed + best_succ;
    }
    let offsets = (0..dag.len())
        .map(|i| {
            let through = finish[i] + tail[i] - dag.task(i).workload / fastest_speed;
            span * (finish[i] / through)
        })
        .collect();
    Ok(offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(workloads: &[f64]) -> WorkflowDag {
        let tasks: Vec<(usize, f64)> = workloads.iter().cloned().enumerate().collect();
        let edges: Vec<(usize, usize)> = (1..workloads.len()).map(|i| (i - 1, i)).collect();
        build_dag(&tasks, &edges, Pattern::Custom).unwrap()
    }

    pub(crate) fn random_dag(rng: &mut ChaCha8Rng, max_tasks: usize) -> WorkflowDag {
        let n = rng.gen_range(1..=max_tasks);
        let tasks: Vec<(usize, f64)> = (0..n).map(|i| (i, rng.gen_range(1.0..100.0))).collect();
        let mut edges = Vec::new();
        for to in 1..n {
            for from in 0..to {
                if rng.gen_bool(0.35) {
                    edges.push((from, to));
                }
            }
        }
        build_dag(&tasks, &edges, Pattern::Custom).unwrap()
    }

    #[test]
    fn singleton_graph() {
        let dag = build_dag(&[(0, 5.0)], &[], Pattern::Custom).unwrap();
        assert_eq!(dag.len(), 1);
        assert_eq!(dag.sources().count(), 1);
        assert_eq!(dag.sinks().count(), 1);
    }

    #[test]
    fn explicit_cycle_rejected() {
        let tasks = [(0, 1.0), (1, 1.0), (2, 1.0)];
        let edges = [(0, 1), (1, 2), (2, 0)];
        assert!(matches!(
            build_dag(&tasks, &edges, Pattern::Custom),
            Err(WorkflowError::CycleDetected)
        ));
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(
            build_dag(&[(0, 1.0)], &[(0, 0)], Pattern::Custom),
            Err(WorkflowError::CycleDetected)
        ));
    }

    #[test]
    fn dangling_edge_rejected() {
        assert!(matches!(
            build_dag(&[(0, 1.0)], &[(0, 3)], Pattern::Custom),
            Err(WorkflowError::DanglingEdge { .. })
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        assert!(matches!(
            build_dag(&[(0, 1.0), (0, 2.0)], &[], Pattern::Custom),
            Err(WorkflowError::DuplicateTaskId { id: 0 })
        ));
    }

    #[test]
    fn diamond_adjacency() {
        let tasks = [(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)];
        let edges = [(0, 1), (0, 2), (1, 3), (2, 3)];
        let dag = build_dag(&tasks, &edges, Pattern::Custom).unwrap();
        assert_eq!(dag.task(3).predecessors, vec![1, 2]);
        assert_eq!(dag.task(0).successors, vec![1, 2]);
        assert_eq!(dag.task(0).predecessors, Vec::<usize>::new());
        assert_eq!(dag.descendant_count(0), 3);
    }

    #[test]
    fn min_makespan_chain() {
        let dag = chain(&[10.0, 20.0, 30.0]);
        assert_eq!(min_makespan(&dag, 10.0), 6.0);
    }

    #[test]
    fn min_makespan_single_task() {
        let dag = chain(&[42.0]);
        assert_eq!(min_makespan(&dag, 8.0), 42.0 / 8.0);
    }

    #[test]
    fn min_makespan_diamond_path_enumeration() {
        let tasks = [(0, 10.0), (1, 10.0), (2, 10.0), (3, 10.0)];
        let edges = [(0, 1), (0, 2), (1, 3), (2, 3)];
        let dag = build_dag(&tasks, &edges, Pattern::Custom).unwrap();
        assert_eq!(min_makespan(&dag, 10.0), 3.0);
        assert_eq!(enumerate_paths_makespan(&dag, 10.0), 3.0);
    }

    /// Exhaustive path-enumeration oracle: DFS every source-to-sink path and
    /// accumulate task times in path order.
    pub(crate) fn enumerate_paths_makespan(dag: &WorkflowDag, speed: f64) -> f64 {
        fn dfs(dag: &WorkflowDag, i: usize, acc: f64, speed: f64, best: &mut f64) {
            let acc = acc + dag.task(i).workload / speed;
            if dag.task(i).successors.is_empty() {
                if acc > *best {
                    *best = acc;
                }
                return;
            }
            for &s in &dag.task(i).successors {
                dfs(dag, s, acc, speed, best);
            }
        }
        let mut best = 0.0;
        for t in dag.sources() {
            dfs(dag, t.id, 0.0, speed, &mut best);
        }
        best
    }

    #[test]
    fn min_makespan_matches_path_enumeration_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dag = random_dag(&mut rng, 8);
            let dp = min_makespan(&dag, 48.0);
            let oracle = enumerate_paths_makespan(&dag, 48.0);
            assert_eq!(dp, oracle, "dag {dag:?}");
        }
    }

    #[test]
    fn min_makespan_bounds_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let dag = random_dag(&mut rng, 12);
            let speed = 10.0;
            let mk = min_makespan(&dag, speed);
            let total: f64 = dag.tasks().iter().map(|t| t.workload / speed).sum();
            let largest = dag
                .tasks()
                .iter()
                .map(|t| t.workload / speed)
                .fold(0.0, f64::max);
            assert!(mk <= total + 1e-9);
            assert!(mk >= largest - 1e-12);
        }
    }

    #[test]
    fn topo_sort_visits_all_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let dag = random_dag(&mut rng, 20);
            let mut seen = vec![false; dag.len()];
            for &i in dag.topo_order() {
                assert!(!seen[i]);
                seen[i] = true;
            }
            assert!(seen.iter().all(|&s| s));
            let pos: Vec<usize> = {
                let mut p = vec![0; dag.len()];
                for (k, &i) in dag.topo_order().iter().enumerate() {
                    p[i] = k;
                }
                p
            };
            for &(a, b) in dag.edges() {
                assert!(pos[a] < pos[b]);
            }
        }
    }

    #[test]
    fn task_deadline_single_task_full_span() {
        let dag = chain(&[25.0]);
        let offs = task_deadlines(&dag, 100.0, 48.0).unwrap();
        assert_eq!(offs, vec![100.0]);
    }

    #[test]
    fn task_deadline_equal_chain_splits_evenly() {
        let dag = chain(&[10.0, 10.0]);
        let offs = task_deadlines(&dag, 4.0, 10.0).unwrap();
        assert_eq!(offs, vec![2.0, 4.0]);
    }

    #[test]
    fn task_deadline_sink_boundary_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let dag = random_dag(&mut rng, 10);
            let speed = 48.0;
            let span = min_makespan(&dag, speed) * rng.gen_range(1.0..4.0);
            let offs = task_deadlines(&dag, span, speed).unwrap();
            let max_sink = dag
                .sinks()
                .map(|t| offs[t.id])
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((max_sink - span).abs() < 1e-9 * span.max(1.0));
            for t in dag.sinks() {
                assert!((offs[t.id] - span).abs() < 1e-9 * span.max(1.0));
            }
            for &(a, b) in dag.edges() {
                assert!(offs[a] <= offs[b] + 1e-12);
            }
            for &o in &offs {
                assert!(o > 0.0 && o <= span * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn task_deadline_infeasible_span() {
        let dag = chain(&[10.0, 10.0]);
        assert!(matches!(
            task_deadlines(&dag, 1.0, 10.0),
            Err(WorkflowError::InfeasibleSpan { .. })
        ));
    }
}
