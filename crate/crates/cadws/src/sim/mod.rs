//! Discrete-event MDP engine for cost-aware dynamic workflow scheduling.
//!
//! The engine advances one scheduling decision at a time: the earliest known
//! ready task is staged together with its candidate VMs, the policy picks a
//! candidate, the task is appended to that VM's FIFO queue, and completions
//! unlock successor tasks. Every task is scheduled the moment it becomes
//! ready; ties are broken by workflow arrival time, then task id.

mod billing;
mod report;

pub use billing::{billed_hours, rental_fee, sla_penalty, vm_fee};
pub use report::{CostReport, VmCost, WorkflowCost};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::workflow::{build_instances, ScenarioConfig, WorkflowError, WorkflowInstance};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no ready task is staged")]
    NoReadyTask,
    #[error("action {index} out of range for {len} candidates")]
    InvalidAction { index: usize, len: usize },
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

/// One rentable VM configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmType {
    pub name: &'static str,
    pub vcpu: u32,
    pub memory_gb: u32,
    pub price_per_hour: f64,
    /// Compute units per second; one unit per vCPU.
    pub speed: f64,
}

/// The six on-demand m5 configurations, price ascending.
pub const VM_TYPES: [VmType; 6] = [
    VmType { name: "m5.large", vcpu: 2, memory_gb: 8, price_per_hour: 0.096, speed: 2.0 },
    VmType { name: "m5.xlarge", vcpu: 4, memory_gb: 16, price_per_hour: 0.192, speed: 4.0 },
    VmType { name: "m5.2xlarge", vcpu: 8, memory_gb: 32, price_per_hour: 0.384, speed: 8.0 },
    VmType { name: "m5.4xlarge", vcpu: 16, memory_gb: 64, price_per_hour: 0.768, speed: 16.0 },
    VmType { name: "m5.8xlarge", vcpu: 32, memory_gb: 128, price_per_hour: 1.536, speed: 32.0 },
    VmType { name: "m5.12xlarge", vcpu: 48, memory_gb: 192, price_per_hour: 2.304, speed: 48.0 },
];

/// Speed of the fastest VM type, used for minimum-makespan deadlines.
pub const FASTEST_SPEED: f64 = 48.0;

pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Execution time of a workload on a VM type: workload / speed.
pub fn exec_time(workload: f64, vm_type: &VmType) -> f64 {
    debug_assert!(workload > 0.0);
    workload / vm_type.speed
}

/// A rented VM instance. Tasks in `queue` execute in assignment order.
#[derive(Debug, Clone)]
pub struct VmInstance {
    pub uid: usize,
    pub type_index: usize,
    pub rent_start: f64,
    /// Completion time of the last queued task.
    pub busy_until: f64,
    pub queue: Vec<(usize, usize)>,
    /// Paid-hour boundary at which the idle VM was released, if it was.
    pub released_at: Option<f64>,
}

impl VmInstance {
    pub fn vm_type(&self) -> &'static VmType {
        &VM_TYPES[self.type_index]
    }

    /// End of the last paid hour given the current queue; the instant an
    /// idle VM is released.
    pub fn paid_until(&self) -> f64 {
        self.rent_start
            + SECONDS_PER_HOUR * billed_hours(self.busy_until - self.rent_start) as f64
    }
}

/// Task lifecycle as seen by the policy: `Unscheduled` (0), `Scheduled` (1,
/// assigned to a VM, possibly finished), `Ready` (2, all predecessors
/// complete, awaiting assignment).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskStatus {
    Unscheduled = 0,
    Scheduled = 1,
    Ready = 2,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TaskRun {
    pub scheduled: bool,
    pub start: f64,
    pub completion: f64,
    pub vm: usize,
}

/// One workflow inside a running episode.
#[derive(Debug, Clone)]
pub struct WorkflowRun {
    pub instance: WorkflowInstance,
    runs: Vec<TaskRun>,
    remaining_preds: Vec<usize>,
    scheduled_count: usize,
}

impl WorkflowRun {
    pub fn run(&self, task: usize) -> &TaskRun {
        &self.runs[task]
    }

    pub fn scheduled_count(&self) -> usize {
        self.scheduled_count
    }

    pub fn completed_count(&self, clock: f64) -> usize {
        self.runs
            .iter()
            .filter(|r| r.scheduled && r.completion <= clock)
            .count()
    }

    /// Finish time once every task is scheduled: max task completion.
    pub fn finish_time(&self) -> f64 {
        debug_assert!(self.runs.iter().all(|r| r.scheduled));
        self.runs
            .iter()
            .map(|r| r.completion)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A scheduling alternative: an already-rented VM or a fresh instance of one
/// of the six types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Active { vm_index: usize },
    Fresh { type_index: usize },
}

/// A staged scheduling decision: the ready task and its candidates.
#[derive(Debug, Clone)]
pub struct Decision {
    pub workflow: usize,
    pub task: usize,
    pub ready_time: f64,
    pub candidates: Vec<Candidate>,
}

/// Start/completion projection of placing a workload on a candidate.
#[derive(Debug, Clone, Copy)]
pub struct CandidateProjection {
    pub start: f64,
    pub completion: f64,
    /// Billed hours this placement adds on top of the VM's current bill
    /// (a fresh VM's current bill is zero).
    pub marginal_hours: u64,
    pub price_per_hour: f64,
    /// Rent start of the VM after placement (the clock, for fresh VMs).
    pub rent_start: f64,
}

#[derive(Debug, Clone)]
struct ReadyKey {
    ready_time: f64,
    wf_arrival: f64,
    workflow: usize,
    task: usize,
}

impl PartialEq for ReadyKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ReadyKey {}
impl PartialOrd for ReadyKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ReadyKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ready_time
            .total_cmp(&other.ready_time)
            .then(self.wf_arrival.total_cmp(&other.wf_arrival))
            .then(self.workflow.cmp(&other.workflow))
            .then(self.task.cmp(&other.task))
    }
}

/// Scheduling policies map a staged decision to a candidate index.
pub trait SchedulingPolicy {
    fn select(&mut self, sim: &Simulation, decision: &Decision) -> usize;
}

impl<F: FnMut(&Simulation, &Decision) -> usize> SchedulingPolicy for F {
    fn select(&mut self, sim: &Simulation, decision: &Decision) -> usize {
        self(sim, decision)
    }
}

/// Full simulator state for one episode.
///
/// Confined to a single episode; independent episodes may run concurrently.
pub struct Simulation {
    clock: f64,
    beta: f64,
    workflows: Vec<WorkflowRun>,
    vms: Vec<VmInstance>,
    pending: BinaryHeap<std::cmp::Reverse<ReadyKey>>,
    admitted: usize,
    staged: Option<Decision>,
    unscheduled_total: usize,
}

impl Simulation {
    pub fn from_scenario(scenario: &ScenarioConfig) -> Result<Self, SimError> {
        let instances = build_instances(scenario, FASTEST_SPEED)?;
        Ok(Self::new(instances, scenario.beta))
    }

    /// Builds an episode over pre-constructed workflow instances, which must
    /// be sorted by arrival time.
    pub fn new(instances: Vec<WorkflowInstance>, beta: f64) -> Self {
        debug_assert!(instances
            .windows(2)
            .all(|w| w[0].arrival_time <= w[1].arrival_time));
        let unscheduled_total = instances.iter().map(|i| i.dag.len()).sum();
        let workflows = instances
            .into_iter()
            .map(|instance| {
                let n = instance.dag.len();
                let remaining_preds = instance
                    .dag
                    .tasks()
                    .iter()
                    .map(|t| t.predecessors.len())
                    .collect();
                WorkflowRun {
                    instance,
                    runs: vec![TaskRun::default(); n],
                    remaining_preds,
                    scheduled_count: 0,
                }
            })
            .collect();
        Simulation {
            clock: 0.0,
            beta,
            workflows,
            vms: Vec::new(),
            pending: BinaryHeap::new(),
            admitted: 0,
            staged: None,
            unscheduled_total,
        }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn workflows(&self) -> &[WorkflowRun] {
        &self.workflows
    }

    /// Every VM instance ever rented, in rental (uid) order.
    pub fn vms(&self) -> &[VmInstance] {
        &self.vms
    }

    /// Workflows visible to the policy: arrival time has passed.
    pub fn arrived_workflows(&self) -> impl Iterator<Item = (usize, &WorkflowRun)> {
        let clock = self.clock;
        self.workflows
            .iter()
            .enumerate()
            .filter(move |(_, w)| w.instance.arrival_time <= clock)
    }

    pub fn task_status(&self, workflow: usize, task: usize) -> TaskStatus {
        let wf = &self.workflows[workflow];
        if wf.runs[task].scheduled {
            return TaskStatus::Scheduled;
        }
        if wf.instance.arrival_time > self.clock {
            return TaskStatus::Unscheduled;
        }
        let ready = wf.instance.dag.task(task).predecessors.iter().all(|&p| {
            let r = &wf.runs[p];
            r.scheduled && r.completion <= self.clock
        });
        if ready {
            TaskStatus::Ready
        } else {
            TaskStatus::Unscheduled
        }
    }

    /// Stages (or returns the already-staged) next decision; `None` when all
    /// tasks of all workflows are scheduled.
    pub fn next_decision(&mut self) -> Option<Decision> {
        if let Some(d) = &self.staged {
            return Some(d.clone());
        }
        loop {
            let next_arrival = self
                .workflows
                .get(self.admitted)
                .map(|w| w.instance.arrival_time);
            match (self.pending.peek(), next_arrival) {
                (Some(std::cmp::Reverse(key)), Some(at)) if at <= key.ready_time => {
                    self.admit_next()
                }
                (None, Some(_)) => self.admit_next(),
                (Some(_), _) => break,
                (None, None) => return None,
            }
        }
        let std::cmp::Reverse(key) = self.pending.pop().expect("peeked nonempty");
        debug_assert!(key.ready_time >= self.clock);
        self.clock = key.ready_time;
        self.release_idle_vms();
        let decision = Decision {
            workflow: key.workflow,
            task: key.task,
            ready_time: key.ready_time,
            candidates: self.build_candidates(),
        };
        self.staged = Some(decision.clone());
        Some(decision)
    }

    fn admit_next(&mut self) {
        let idx = self.admitted;
        self.admitted += 1;
        let wf = &self.workflows[idx];
        let arrival = wf.instance.arrival_time;
        for t in wf.instance.dag.sources() {
            self.pending.push(std::cmp::Reverse(ReadyKey {
                ready_time: arrival,
                wf_arrival: arrival,
                workflow: idx,
                task: t.id,
            }));
        }
    }

    /// Releases VMs that sat idle through the end of a paid hour.
    fn release_idle_vms(&mut self) {
        for vm in &mut self.vms {
            if vm.released_at.is_none() && vm.busy_until <= self.clock {
                let boundary = vm.paid_until();
                if boundary <= self.clock {
                    vm.released_at = Some(boundary);
                }
            }
        }
    }

    /// All active VMs by uid, then one fresh candidate per type by price.
    fn build_candidates(&self) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = self
            .vms
            .iter()
            .filter(|vm| vm.released_at.is_none())
            .map(|vm| Candidate::Active { vm_index: vm.uid })
            .collect();
        out.extend((0..VM_TYPES.len()).map(|type_index| Candidate::Fresh { type_index }));
        out
    }

    /// Candidate list for the staged decision.
    pub fn candidate_actions(&self) -> Result<&[Candidate], SimError> {
        self.staged
            .as_ref()
            .map(|d| d.candidates.as_slice())
            .ok_or(SimError::NoReadyTask)
    }

    /// Start/completion times and marginal billed hours if the staged
    /// workload ran on `candidate`.
    pub fn project(&self, candidate: &Candidate, workload: f64) -> CandidateProjection {
        match candidate {
            Candidate::Active { vm_index } => {
                let vm = &self.vms[*vm_index];
                let ty = vm.vm_type();
                let start = self.clock.max(vm.busy_until);
                let completion = start + exec_time(workload, ty);
                let current = billed_hours(vm.busy_until - vm.rent_start);
                let after = billed_hours(completion - vm.rent_start);
                CandidateProjection {
                    start,
                    completion,
                    marginal_hours: after - current,
                    price_per_hour: ty.price_per_hour,
                    rent_start: vm.rent_start,
                }
            }
            Candidate::Fresh { type_index } => {
                let ty = &VM_TYPES[*type_index];
                let start = self.clock;
                let completion = start + exec_time(workload, ty);
                CandidateProjection {
                    start,
                    completion,
                    marginal_hours: billed_hours(completion - start),
                    price_per_hour: ty.price_per_hour,
                    rent_start: start,
                }
            }
        }
    }

    /// Applies the chosen candidate to the staged decision: rents a fresh VM
    /// if needed, appends the task to the VM's queue, fixes its start and
    /// completion, and unlocks successors whose predecessors are now all
    /// scheduled.
    pub fn apply(&mut self, action: usize) -> Result<(), SimError> {
        {
            let staged = self.staged.as_ref().ok_or(SimError::NoReadyTask)?;
            if action >= staged.candidates.len() {
                return Err(SimError::InvalidAction {
                    index: action,
                    len: staged.candidates.len(),
                });
            }
        }
        let decision = self.staged.take().expect("staged checked above");
        let candidate = &decision.candidates[action];
        let vm_index = match candidate {
            Candidate::Active { vm_index } => *vm_index,
            Candidate::Fresh { type_index } => {
                let uid = self.vms.len();
                self.vms.push(VmInstance {
                    uid,
                    type_index: *type_index,
                    rent_start: self.clock,
                    busy_until: self.clock,
                    queue: Vec::new(),
                    released_at: None,
                });
                uid
            }
        };
        let workload = self.workflows[decision.workflow]
            .instance
            .dag
            .task(decision.task)
            .workload;
        let vm = &mut self.vms[vm_index];
        let start = self.clock.max(vm.busy_until);
        let completion = start + exec_time(workload, vm.vm_type());
        vm.busy_until = completion;
        vm.queue.push((decision.workflow, decision.task));

        let wf = &mut self.workflows[decision.workflow];
        wf.runs[decision.task] = TaskRun {
            scheduled: true,
            start,
            completion,
            vm: vm_index,
        };
        wf.scheduled_count += 1;
        self.unscheduled_total -= 1;

        let successors = wf.instance.dag.task(decision.task).successors.clone();
        let arrival = wf.instance.arrival_time;
        for succ in successors {
            wf.remaining_preds[succ] -= 1;
            if wf.remaining_preds[succ] == 0 {
                let ready_time = wf.instance.dag.task(succ)
                    .predecessors
                    .iter()
                    .map(|&p| wf.runs[p].completion)
                    .fold(f64::NEG_INFINITY, f64::max);
                self.pending.push(std::cmp::Reverse(ReadyKey {
                    ready_time,
                    wf_arrival: arrival,
                    workflow: decision.workflow,
                    task: succ,
                }));
            }
        }
        Ok(())
    }

    /// Latest completion over every scheduled task.
    pub fn horizon(&self) -> f64 {
        self.vms
            .iter()
            .map(|vm| vm.busy_until)
            .fold(0.0, f64::max)
    }

    /// Cost report; callable once every task has been scheduled.
    pub fn report(&self) -> CostReport {
        assert_eq!(self.unscheduled_total, 0, "episode incomplete");
        report::build(self)
    }
}

/// Drives a full episode of the scenario under the policy and returns its
/// cost breakdown. The training reward is the negated total.
pub fn run_episode(
    scenario: &ScenarioConfig,
    policy: &mut dyn SchedulingPolicy,
) -> Result<CostReport, SimError> {
    let mut sim = Simulation::from_scenario(scenario)?;
    while let Some(decision) = sim.next_decision() {
        let action = policy.select(&sim, &decision);
        sim.apply(action)?;
    }
    Ok(sim.report())
}
