use nornet::experiment::{
    generate_network, run_experiment, run_experiment_with, ExperimentConfig, GeneratorConfig,
};

const LADDER_SEEDS: [u64; 6] = [1, 2, 3, 4, 5, 6];

#[test]
fn one_to_one_leak_free_ips_gives_matching_networks() {
    for seed in [1u64, 2, 3] {
        let cfg = GeneratorConfig {
            fan_in: 1..=1,
            fan_out: 1..=1,
            ips_leak: Some(0.0..=0.0),
            ips_chain_prob: 0.3,
            ..GeneratorConfig::sized(3, 6, 15, seed)
        };
        let s = run_experiment(&generate_network(&cfg).unwrap(), 40, seed).unwrap();
        for c in &s.cases {
            for (a, b) in c.two.iter().flatten().zip(c.three.iter().flatten()) {
                assert!((a - b).abs() < 1e-10, "case {}: {a} vs {b}", c.case_id);
            }
        }
        for cell in &s.cells {
            if let (Some(a), Some(b)) = (cell.mean_tp_two, cell.mean_tp_three) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert!(s.mean_abs_diff < 1e-10);
    }
}

#[test]
fn divergence_grows_with_fan_ranges_on_the_seed_ladder() {
    let mut previous = 0.0;
    for (lo, hi) in [(1, 1), (1, 2), (2, 3), (3, 4)] {
        let total: f64 = LADDER_SEEDS
            .iter()
            .map(|&seed| {
                let cfg = GeneratorConfig {
                    fan_in: lo..=hi,
                    fan_out: lo..=hi,
                    ..GeneratorConfig::sized(3, 8, 20, seed)
                };
                run_experiment(&generate_network(&cfg).unwrap(), 60, seed)
                    .unwrap()
                    .mean_abs_diff
            })
            .sum();
        let mean = total / LADDER_SEEDS.len() as f64;
        assert!(mean >= previous, "fan {lo}..{hi}: {mean} < {previous}");
        previous = mean;
    }
}

#[test]
fn single_disease_true_positive_rises_with_phase() {
    let cfg = GeneratorConfig {
        fan_in: 1..=1,
        fan_out: 1..=3,
        leak: 0.0..=0.0,
        prior: 0.2..=0.2,
        ..GeneratorConfig::sized(1, 4, 10, 21)
    };
    let s = run_experiment(&generate_network(&cfg).unwrap(), 1500, 21).unwrap();
    for w in s.phases.windows(2) {
        for (a, b) in [
            (w[0].mean_tp_three, w[1].mean_tp_three),
            (w[0].mean_tp_two, w[1].mean_tp_two),
        ] {
            assert!(
                b.unwrap() >= a.unwrap() - 1e-12,
                "phase {}: {b:?} < {a:?}",
                w[1].phase
            );
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = GeneratorConfig {
        fan_in: 2..=3,
        fan_out: 2..=3,
        ips_chain_prob: 0.2,
        ..GeneratorConfig::sized(3, 8, 20, 77)
    };
    let net = generate_network(&cfg).unwrap();
    let runs: Vec<_> = [1, 2, 8]
        .iter()
        .map(|&jobs| {
            run_experiment_with(
                &net,
                &ExperimentConfig {
                    jobs,
                    ..ExperimentConfig::new(50, 3)
                },
            )
            .unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn summary_means_are_probabilities() {
    let net = generate_network(&GeneratorConfig::sized(2, 2, 38, 7)).unwrap();
    let s = run_experiment(&net, 80, 7).unwrap();
    for c in &s.cells {
        for m in [
            c.mean_tp_two,
            c.mean_tp_three,
            c.mean_fp_two,
            c.mean_fp_three,
        ]
        .into_iter()
        .flatten()
        {
            assert!((0.0..=1.0).contains(&m));
        }
        assert_eq!(c.n_present + c.n_absent, 80);
        if let Some(t) = c.t_test {
            assert_eq!(t.df, c.n_present - 1);
            assert!(!t.sig975 || t.sig95);
        }
    }
    assert_eq!(s.cells.len(), 5 * 2);
}
