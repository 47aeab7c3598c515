//! Phased test cases sampled from a network.

use crate::network::{Assignment, Network, NodeKind};
use crate::sampling::{sample_world_with, seeded_rng};

/// Phases a case's findings are revealed in.
pub const PHASES: u8 = 5;

/// Rejection-sampling attempts per case before giving up on a positive world.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub case_id: u64,
    pub true_diseases: Assignment,
    /// Bucket `k` holds the findings tagged with phase `k + 1`.
    pub findings_by_phase: [Assignment; PHASES as usize],
}

impl TestCase {
    /// Union of the buckets for phases `1..=phase`.
    pub fn evidence_through(&self, phase: u8) -> Assignment {
        self.findings_by_phase
            .iter()
            .take(phase as usize)
            .fold(Assignment::new(), |acc, b| acc.merged(b))
    }

    pub fn has_disease(&self) -> bool {
        self.true_diseases.present().next().is_some()
    }
}

/// Samples `n_cases` cases; case `i` draws from the rng seeded with `seed + i`.
///
/// With `require_positive`, worlds with no present disease are redrawn from the
/// same rng, up to [`MAX_ATTEMPTS`] times per case.
pub fn generate_cases(
    net: &Network,
    n_cases: usize,
    seed: u64,
    require_positive: bool,
) -> Result<Vec<TestCase>, super::ExperimentError> {
    if require_positive && net.diseases().all(|d| d.prior.unwrap_or(0.0) <= 0.0) {
        return Err(super::ExperimentError::Exhausted {
            case_id: 0,
            attempts: 0,
        });
    }
    (0..n_cases as u64)
        .map(|case_id| {
            let mut rng = seeded_rng(seed.wrapping_add(case_id));
            for _ in 0..MAX_ATTEMPTS {
                let world = sample_world_with(net, &mut rng);
                let case = split_world(net, case_id, &world);
                if !require_positive || case.has_disease() {
                    return Ok(case);
                }
            }
            Err(super::ExperimentError::Exhausted {
                case_id,
                attempts: MAX_ATTEMPTS,
            })
        })
        .collect()
}

fn split_world(net: &Network, case_id: u64, world: &Assignment) -> TestCase {
    let mut true_diseases = Assignment::new();
    let mut findings_by_phase: [Assignment; PHASES as usize] = Default::default();
    for node in net.nodes() {
        let value = world.get(node.id.as_str()).unwrap_or(false);
        match node.kind {
            NodeKind::Disease => {
                true_diseases.insert(node.id.clone(), value);
            }
            NodeKind::Finding => {
                let k = node.phase.unwrap_or(1).clamp(1, PHASES) as usize - 1;
                findings_by_phase[k].insert(node.id.clone(), value);
            }
            NodeKind::Ips => {}
        }
    }
    TestCase {
        case_id,
        true_diseases,
        findings_by_phase,
    }
}
