//! Hourly billing and SLA penalties.

use super::{VmInstance, SECONDS_PER_HOUR};

/// Billed hours for a rental of `duration` seconds: any started hour is
/// charged in full, and even a zero-length rental bills one hour.
pub fn billed_hours(duration: f64) -> u64 {
    debug_assert!(duration >= 0.0 && duration.is_finite());
    let hours = (duration / SECONDS_PER_HOUR).ceil() as u64;
    hours.max(1)
}

/// Fee of one rental interval.
pub fn rental_fee(price_per_hour: f64, rent_start: f64, rent_end: f64) -> f64 {
    price_per_hour * billed_hours(rent_end - rent_start) as f64
}

/// Total rental fees over a fleet. Instances without a release time are
/// billed to their `busy_until`; `end_of_horizon` only bounds the inputs.
pub fn vm_fee(instances: &[VmInstance], end_of_horizon: f64) -> f64 {
    let mut total = 0.0;
    for vm in instances {
        debug_assert!(vm.busy_until <= end_of_horizon);
        total += rental_fee(vm.vm_type().price_per_hour, vm.rent_start, vm.busy_until);
    }
    total
}

/// SLA penalty of one workflow: `beta` per hour of lateness beyond the
/// deadline, zero when the workflow finishes on time. Lateness is not
/// rounded up.
pub fn sla_penalty(deadline: f64, finish_time: f64, beta: f64) -> f64 {
    beta * ((finish_time - deadline).max(0.0) / SECONDS_PER_HOUR)
}
