//! Episode cost breakdown and its CSV serialization.

use super::billing::{billed_hours, rental_fee, sla_penalty};
use super::Simulation;

/// Per-episode cost breakdown. `total` is exactly `vm_fee + sla_penalty`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub vm_fee: f64,
    pub sla_penalty: f64,
    pub total: f64,
    pub per_workflow: Vec<WorkflowCost>,
    pub per_vm: Vec<VmCost>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowCost {
    pub finish_time: f64,
    pub process_time: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmCost {
    pub uid: usize,
    pub type_name: &'static str,
    pub hours: u64,
    pub fee: f64,
}

impl CostReport {
    /// Training reward: the negated total cost.
    pub fn reward(&self) -> f64 {
        -self.total
    }

    /// Sectioned CSV: a `summary` row, then `workflow` rows, then `vm` rows.
    /// Each section is preceded by its own header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("summary,vm_fee,sla_penalty,total\n");
        out.push_str(&format!(
            "summary,{},{},{}\n",
            self.vm_fee, self.sla_penalty, self.total
        ));
        out.push_str("workflow,index,finish_time,process_time,penalty\n");
        for (i, w) in self.per_workflow.iter().enumerate() {
            out.push_str(&format!(
                "workflow,{},{},{},{}\n",
                i, w.finish_time, w.process_time, w.penalty
            ));
        }
        out.push_str("vm,index,type,hours,fee\n");
        for v in &self.per_vm {
            out.push_str(&format!(
                "vm,{},{},{},{}\n",
                v.uid, v.type_name, v.hours, v.fee
            ));
        }
        out
    }
}

pub(super) fn build(sim: &Simulation) -> CostReport {
    let per_vm: Vec<VmCost> = sim
        .vms()
        .iter()
        .map(|vm| {
            let ty = vm.vm_type();
            VmCost {
                uid: vm.uid,
                type_name: ty.name,
                hours: billed_hours(vm.busy_until - vm.rent_start),
                fee: rental_fee(ty.price_per_hour, vm.rent_start, vm.busy_until),
            }
        })
        .collect();
    let per_workflow: Vec<WorkflowCost> = sim
        .workflows()
        .iter()
        .map(|wf| {
            let finish_time = wf.finish_time();
            WorkflowCost {
                finish_time,
                process_time: finish_time - wf.instance.arrival_time,
                penalty: sla_penalty(wf.instance.deadline, finish_time, sim.beta()),
            }
        })
        .collect();
    let vm_fee: f64 = per_vm.iter().map(|v| v.fee).sum();
    let sla: f64 = per_workflow.iter().map(|w| w.penalty).sum();
    CostReport {
        vm_fee,
        sla_penalty: sla,
        total: vm_fee + sla,
        per_workflow,
        per_vm,
    }
}
