//! Synthetic topology generators for the four workflow families.
//!
//! The generators reproduce the qualitative shapes of the CyberShake,
//! Montage, Inspiral and SIPHT scientific workflows at any requested task
//! count. Exact production DAGs can be supplied through the file loader
//! instead. Workloads are log-uniform over [10, 1000] compute units.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{build_dag, Pattern, WorkflowDag, WorkflowError};
use crate::seeds::derive_seed_path;

pub(crate) const WORKLOAD_MIN: f64 = 10.0;
pub(crate) const WORKLOAD_MAX: f64 = 1000.0;

/// Generates a DAG of exactly `n_tasks` tasks from one of the four synthetic
/// families. The same `(pattern, n_tasks, seed)` always yields an identical
/// DAG.
pub fn generate_pattern(
    pattern: Pattern,
    n_tasks: usize,
    seed: u64,
) -> Result<WorkflowDag, WorkflowError> {
    if n_tasks < 3 {
        return Err(WorkflowError::UnsupportedCount(n_tasks));
    }
    let stream = derive_seed_path(seed, &[pattern as u64, n_tasks as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let edges = match pattern {
        Pattern::CyberShake => cybershake_edges(n_tasks, &mut rng),
        Pattern::Montage => montage_edges(n_tasks, &mut rng),
        Pattern::Inspiral => inspiral_edges(n_tasks, &mut rng),
        Pattern::Sipht => sipht_edges(n_tasks, &mut rng),
        Pattern::Custom => return Err(WorkflowError::UngeneratablePattern(pattern)),
    };
    let tasks: Vec<(usize, f64)> = (0..n_tasks).map(|i| (i, sample_workload(&mut rng))).collect();
    build_dag(&tasks, &edges, pattern)
}

fn sample_workload(rng: &mut ChaCha8Rng) -> f64 {
    let ln = rng.gen_range(WORKLOAD_MIN.ln()..WORKLOAD_MAX.ln());
    ln.exp()
}

/// Wide fan-out from a few roots, then fan-in through aggregators to a sink.
fn cybershake_edges(n: usize, _rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if n < 6 {
        // Degenerate: one root, a middle band, one sink.
        for mid in 1..n - 1 {
            edges.push((0, mid));
            edges.push((mid, n - 1));
        }
        return edges;
    }
    // ids: 0,1 roots; 2..2+fan fan-out band; then two aggregators; last is sink.
    let fan = n - 5;
    let agg0 = 2 + fan;
    let agg1 = agg0 + 1;
    let sink = agg1 + 1;
    for k in 0..fan {
        let node = 2 + k;
        edges.push((k % 2, node));
        edges.push((node, if k < fan.div_ceil(2) { agg0 } else { agg1 }));
    }
    // Keep both aggregators connected even when the band is tiny.
    edges.push((0, agg0));
    edges.push((1, agg1));
    edges.push((agg0, sink));
    edges.push((agg1, sink));
    edges
}

/// Parallel stripes that merge into a short reduction chain.
fn montage_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let chain_len = if n >= 12 { 3 } else { 1 };
    let body = n - chain_len;
    let stripes = (body / 4).clamp(2, body.max(2)).min(body);
    let mut edges = Vec::new();
    // Stripe k owns the ids {k, k+stripes, k+2*stripes, ...} within the body,
    // chained in order; stripe lengths differ by at most one.
    let mut last_of_stripe = vec![0usize; stripes];
    for k in 0..stripes {
        let mut prev = None;
        let mut node = k;
        while node < body {
            if let Some(p) = prev {
                edges.push((p, node));
            }
            prev = Some(node);
            node += stripes;
        }
        last_of_stripe[k] = prev.expect("stripe is nonempty");
    }
    let chain_start = body;
    for &last in &last_of_stripe {
        edges.push((last, chain_start));
    }
    for c in chain_start..n - 1 {
        edges.push((c, c + 1));
    }
    let _ = rng;
    edges
}

/// Layered pipeline groups: bands of parallel tasks joined by mergers.
fn inspiral_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut next = 0usize;
    let mut prev_merger: Option<usize> = None;
    while next < n {
        let remaining = n - next;
        if remaining <= 2 {
            // Tail off as a chain.
            for node in next..n {
                if let Some(p) = prev_merger {
                    edges.push((p, node));
                }
                prev_merger = Some(node);
            }
            next = n;
            continue;
        }
        let band = rng.gen_range(2..=4usize).min(remaining - 1);
        let merger = next + band;
        for node in next..next + band {
            if let Some(p) = prev_merger {
                edges.push((p, node));
            }
            edges.push((node, merger));
        }
        prev_merger = Some(merger);
        next = merger + 1;
    }
    edges
}

/// Several independent fan-in trees joined at a single sink.
fn sipht_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let sink = n - 1;
    let body = n - 1;
    let trees = (body / 6).clamp(1, 4).min(body);
    // Partition the body into `trees` contiguous runs; within each run the
    // last id is the tree root and every other id feeds it.
    let base = body / trees;
    let extra = body % trees;
    let mut at = 0usize;
    for t in 0..trees {
        let size = base + usize::from(t < extra);
        let root = at + size - 1;
        for leaf in at..root {
            edges.push((leaf, root));
        }
        edges.push((root, sink));
        at += size;
    }
    let _ = rng;
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montage_25_is_valid() {
        let dag = generate_pattern(Pattern::Montage, 25, 11).unwrap();
        assert_eq!(dag.len(), 25);
        assert_eq!(dag.topo_order().len(), 25);
    }

    #[test]
    fn identical_seed_identical_dag() {
        let a = generate_pattern(Pattern::CyberShake, 30, 5).unwrap();
        let b = generate_pattern(Pattern::CyberShake, 30, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_pattern(Pattern::CyberShake, 30, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sipht_60_sources_and_sinks() {
        let dag = generate_pattern(Pattern::Sipht, 60, 123).unwrap();
        assert_eq!(dag.len(), 60);
        assert!(dag.sources().count() >= 1);
        assert!(dag.sinks().count() >= 1);
    }

    #[test]
    fn too_few_tasks_rejected() {
        assert!(matches!(
            generate_pattern(Pattern::Montage, 2, 0),
            Err(WorkflowError::UnsupportedCount(2))
        ));
    }

    #[test]
    fn custom_not_generatable() {
        assert!(matches!(
            generate_pattern(Pattern::Custom, 10, 0),
            Err(WorkflowError::UngeneratablePattern(_))
        ));
    }

    #[test]
    fn all_families_all_scales_validate() {
        for pattern in Pattern::GENERATED {
            for n in [3, 4, 5, 6, 7, 10, 25, 30, 50, 60, 100] {
                for seed in 0..5 {
                    let dag = generate_pattern(pattern, n, seed).unwrap();
                    assert_eq!(dag.len(), n, "{pattern:?}/{n}");
                    assert!(dag.sources().count() >= 1);
                    assert!(dag.sinks().count() >= 1);
                    for t in dag.tasks() {
                        assert!(t.workload >= WORKLOAD_MIN && t.workload <= WORKLOAD_MAX);
                    }
                }
            }
        }
    }
}
