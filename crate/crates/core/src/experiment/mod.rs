//! Full-versus-reduced diagnostic experiments.
//!
//! Cases are sampled from the full network only. For every case and phase `k`
//! both networks compute disease posteriors from the findings of phases
//! `1..=k`; results are aggregated in case order, so the summary does not
//! depend on how many worker threads evaluated the cases.

pub mod cases;
pub mod generator;
pub mod stats;

use rayon::prelude::*;
use thiserror::Error;

use crate::inference::{posterior_with, InferenceConfig, InferenceError};
use crate::network::{Network, NodeId};
use crate::reduction::{level_reduce, ReductionError};

pub use cases::{generate_cases, TestCase, PHASES};
pub use generator::{generate_network, GeneratorConfig, GeneratorError};
pub use stats::{log_odds, paired_t, t_critical, PairedT, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("no world with a present disease for case {case_id} after {attempts} attempts")]
    Exhausted { case_id: u64, attempts: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("case {case_id}, phase {phase}, {network} network: {source}")]
    Inference {
        case_id: u64,
        phase: u8,
        network: &'static str,
        source: InferenceError,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_cases: usize,
    pub seed: u64,
    /// Redraw cases in which no disease is present.
    pub require_positive: bool,
    /// Worker threads; 0 uses the available parallelism.
    pub jobs: usize,
    pub inference: InferenceConfig,
}

impl ExperimentConfig {
    pub fn new(n_cases: usize, seed: u64) -> Self {
        ExperimentConfig {
            n_cases,
            seed,
            require_positive: true,
            jobs: 0,
            inference: InferenceConfig::default(),
        }
    }
}

/// Paired t on log-odds, two-level minus three-level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    /// Infinite when every paired difference is the same nonzero value.
    pub t: f64,
    pub df: usize,
    pub sig95: bool,
    pub sig975: bool,
}

impl TTest {
    /// `None` with fewer than two pairs.
    pub fn on_log_odds(two: &[f64], three: &[f64]) -> Option<TTest> {
        let a: Vec<f64> = two.iter().copied().map(log_odds).collect();
        let b: Vec<f64> = three.iter().copied().map(log_odds).collect();
        let r = match paired_t(&a, &b) {
            Ok(r) => r,
            Err(StatsError::DegenerateVariance { mean }) => PairedT {
                t: mean.signum() * f64::INFINITY,
                df: a.len() - 1,
            },
            Err(_) => return None,
        };
        Some(TTest {
            t: r.t,
            df: r.df,
            sig95: r.significant_at(0.95),
            sig975: r.significant_at(0.975),
        })
    }
}

/// One (phase, disease) cell. Means are `None` when no case qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub phase: u8,
    pub disease: NodeId,
    /// Cases in which the disease is present.
    pub n_present: usize,
    pub n_absent: usize,
    pub mean_tp_two: Option<f64>,
    pub mean_tp_three: Option<f64>,
    pub mean_fp_two: Option<f64>,
    pub mean_fp_three: Option<f64>,
    pub t_test: Option<TTest>,
}

/// All diseases pooled for one phase, over present (case, disease) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSummary {
    pub phase: u8,
    pub n_pairs: usize,
    pub mean_tp_two: Option<f64>,
    pub mean_tp_three: Option<f64>,
    /// Mean |two - three| over every case and disease at this phase.
    pub mean_abs_diff: f64,
    pub t_test: Option<TTest>,
}

/// Posteriors for one case, `[phase - 1][disease]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CasePosteriors {
    pub case_id: u64,
    pub present: Vec<bool>,
    pub two: Vec<Vec<f64>>,
    pub three: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub n_cases: usize,
    pub seed: u64,
    pub param_count_original: usize,
    pub param_count_reduced: usize,
    /// Disease ids in ascending order; indexes the per-case vectors.
    pub diseases: Vec<NodeId>,
    /// Ordered by phase, then disease id.
    pub cells: Vec<CellSummary>,
    pub phases: Vec<PhaseSummary>,
    /// Mean |two - three| over every case, phase and disease.
    pub mean_abs_diff: f64,
    pub cases: Vec<CasePosteriors>,
}

impl ExperimentSummary {
    pub fn cell(&self, phase: u8, disease: &str) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.phase == phase && c.disease.as_str() == disease)
    }
}

pub fn run_experiment(
    full: &Network,
    n_cases: usize,
    seed: u64,
) -> Result<ExperimentSummary, ExperimentError> {
    run_experiment_with(full, &ExperimentConfig::new(n_cases, seed))
}

/// Reduces `full`, samples cases from it and compares both networks.
pub fn run_experiment_with(
    full: &Network,
    cfg: &ExperimentConfig,
) -> Result<ExperimentSummary, ExperimentError> {
    let report = level_reduce(full)?;
    let cases = generate_cases(full, cfg.n_cases, cfg.seed, cfg.require_positive)?;
    let mut summary = compare(full, &report.reduced, &cases, cfg)?;
    summary.param_count_original = report.param_count_original;
    summary.param_count_reduced = report.param_count_reduced;
    Ok(summary)
}

/// Compares two networks over given cases. `three` supplies the ground-truth
/// disease states through the cases; both networks must share disease and
/// finding ids.
pub fn compare(
    three: &Network,
    two: &Network,
    cases: &[TestCase],
    cfg: &ExperimentConfig,
) -> Result<ExperimentSummary, ExperimentError> {
    let diseases: Vec<NodeId> = three.diseases().map(|d| d.id.clone()).collect();
    let evaluate = |case: &TestCase| evaluate_case(three, two, &diseases, case, &cfg.inference);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let per_case: Vec<CasePosteriors> =
        pool.install(|| cases.par_iter().map(evaluate).collect::<Result<_, _>>())?;
    Ok(aggregate(cfg, diseases, per_case))
}

fn evaluate_case(
    three: &Network,
    two: &Network,
    diseases: &[NodeId],
    case: &TestCase,
    inference: &InferenceConfig,
) -> Result<CasePosteriors, ExperimentError> {
    let mut out = CasePosteriors {
        case_id: case.case_id,
        present: diseases
            .iter()
            .map(|d| case.true_diseases.get(d.as_str()) == Some(true))
            .collect(),
        two: Vec::with_capacity(PHASES as usize),
        three: Vec::with_capacity(PHASES as usize),
    };
    for phase in 1..=PHASES {
        let evidence = case.evidence_through(phase);
        for (network, net, dst) in [
            ("three-level", three, &mut out.three),
            ("two-level", two, &mut out.two),
        ] {
            let r = posterior_with(net, &evidence, inference).map_err(|source| {
                ExperimentError::Inference {
                    case_id: case.case_id,
                    phase,
                    network,
                    source,
                }
            })?;
            dst.push(
                diseases
                    .iter()
                    .map(|d| r.get(d.as_str()).unwrap_or(f64::NAN))
                    .collect(),
            );
        }
    }
    Ok(out)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn aggregate(
    cfg: &ExperimentConfig,
    diseases: Vec<NodeId>,
    cases: Vec<CasePosteriors>,
) -> ExperimentSummary {
    let mut cells = Vec::new();
    let mut phases = Vec::new();
    let mut diff_total = 0.0;
    let mut diff_count = 0usize;
    for phase in 1..=PHASES {
        let k = phase as usize - 1;
        let (mut pool_two, mut pool_three) = (Vec::new(), Vec::new());
        let mut phase_diff = 0.0;
        for (j, disease) in diseases.iter().enumerate() {
            let (mut tp_two, mut tp_three, mut fp_two, mut fp_three) =
                (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for c in &cases {
                let (a, b) = (c.two[k][j], c.three[k][j]);
                phase_diff += (a - b).abs();
                if c.present[j] {
                    tp_two.push(a);
                    tp_three.push(b);
                } else {
                    fp_two.push(a);
                    fp_three.push(b);
                }
            }
            cells.push(CellSummary {
                phase,
                disease: disease.clone(),
                n_present: tp_two.len(),
                n_absent: fp_two.len(),
                mean_tp_two: mean(&tp_two),
                mean_tp_three: mean(&tp_three),
                mean_fp_two: mean(&fp_two),
                mean_fp_three: mean(&fp_three),
                t_test: TTest::on_log_odds(&tp_two, &tp_three),
            });
            pool_two.extend(tp_two);
            pool_three.extend(tp_three);
        }
        let n = cases.len() * diseases.len();
        diff_total += phase_diff;
        diff_count += n;
        phases.push(PhaseSummary {
            phase,
            n_pairs: pool_two.len(),
            mean_tp_two: mean(&pool_two),
            mean_tp_three: mean(&pool_three),
            mean_abs_diff: if n == 0 { 0.0 } else { phase_diff / n as f64 },
            t_test: TTest::on_log_odds(&pool_two, &pool_three),
        });
    }
    ExperimentSummary {
        n_cases: cases.len(),
        seed: cfg.seed,
        param_count_original: 0,
        param_count_reduced: 0,
        diseases,
        cells,
        phases,
        mean_abs_diff: if diff_count == 0 {
            0.0
        } else {
            diff_total / diff_count as f64
        },
        cases,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Edge, Node};
    use approx::assert_abs_diff_eq;

    fn two_phase_chain() -> Network {
        Network::new(
            "toy",
            vec![
                Node::disease("A", 0.3),
                Node::ips("B", 0.0),
                Node::finding("C", 0.0, 1),
                Node::ips("G", 0.0),
                Node::finding("H", 0.0, 2),
            ],
            vec![
                Edge::new("A", "B", 0.8),
                Edge::new("B", "C", 0.7),
                Edge::new("A", "G", 0.6),
                Edge::new("G", "H", 0.9),
            ],
        )
        .unwrap()
    }

    #[test]
    fn exact_reduction_gives_identical_columns() {
        let s = run_experiment(&two_phase_chain(), 60, 5).unwrap();
        assert_eq!(s.cells.len(), 5);
        for c in &s.cells {
            assert_abs_diff_eq!(
                c.mean_tp_two.unwrap(),
                c.mean_tp_three.unwrap(),
                epsilon = 1e-12
            );
            assert_eq!(c.n_present, 60);
            assert_eq!(c.n_absent, 0);
            assert_eq!(c.mean_fp_two, None);
        }
        assert!(s.mean_abs_diff < 1e-12);
    }

    #[test]
    fn zero_ips_network_is_its_own_reduction() {
        let net = generate_network(&GeneratorConfig::sized(3, 0, 12, 8)).unwrap();
        let s = run_experiment(&net, 40, 2).unwrap();
        assert_eq!(s.param_count_original, s.param_count_reduced);
        assert_eq!(s.mean_abs_diff, 0.0);
        for c in &s.cells {
            assert_eq!(c.mean_tp_two, c.mean_tp_three);
            if let Some(t) = c.t_test {
                assert_eq!(t.t, 0.0);
                assert!(!t.sig95 && !t.sig975);
            }
        }
        for p in &s.phases {
            assert_eq!(p.t_test.unwrap().t, 0.0);
        }
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let cfg = GeneratorConfig {
            fan_in: 1..=3,
            fan_out: 1..=3,
            ..GeneratorConfig::sized(3, 5, 15, 4)
        };
        let net = generate_network(&cfg).unwrap();
        let one = run_experiment_with(
            &net,
            &ExperimentConfig {
                jobs: 1,
                ..ExperimentConfig::new(30, 9)
            },
        )
        .unwrap();
        let four = run_experiment_with(
            &net,
            &ExperimentConfig {
                jobs: 4,
                ..ExperimentConfig::new(30, 9)
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn never_present_disease_has_missing_cells() {
        let net = Network::new(
            "rare",
            vec![
                Node::disease("A", 1.0),
                Node::disease("Z", 0.0),
                Node::finding("F", 0.1, 1),
            ],
            vec![Edge::new("A", "F", 0.5), Edge::new("Z", "F", 0.5)],
        )
        .unwrap();
        let s = run_experiment(&net, 10, 0).unwrap();
        let z = s.cell(1, "Z").unwrap();
        assert_eq!(z.n_present, 0);
        assert_eq!(z.mean_tp_two, None);
        assert_eq!(z.t_test, None);
        assert!(s.cell(1, "A").unwrap().mean_tp_two.is_some());
    }

    #[test]
    fn degenerate_differences_are_infinite_and_significant() {
        let t = TTest::on_log_odds(&[0.6, 0.6], &[0.5, 0.5]).unwrap();
        assert_eq!(t.t, f64::INFINITY);
        assert!(t.sig95 && t.sig975);
        assert_eq!(TTest::on_log_odds(&[0.6], &[0.5]), None);
    }
}
