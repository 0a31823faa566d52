use approx::assert_abs_diff_eq;
use topogame::harness::{
    advantage_loss, build_resource, estimate_pq_exact, play_classical_shots, play_shots, read_csv,
    run_sweep, Estimator, ExperimentConfig, GameKind, CSV_HEADER,
};
use topogame::prep::theta_from_beta;
use topogame::rbim::{pq_toric, EstimateMethod, Lattice};

fn sech_curve(beta: f64, n: i32) -> f64 {
    0.5 * (1.0 + beta.cosh().recip().powi(n))
}

#[test]
fn ideal_resources_win_every_shot() {
    for (game, size) in [(GameKind::Ghz, 3), (GameKind::Ghz, 6), (GameKind::Rsc, 3)] {
        let (r, l) = build_resource(game, size, 3, 0.0).unwrap();
        let rec = play_shots(&r, &l, 2500, 9).unwrap();
        assert_eq!(rec.num_shots(), 10_000);
        assert_eq!(rec.win_rate(), 1.0, "{game} {size}");
        assert_abs_diff_eq!(estimate_pq_exact(&r, &l).unwrap(), 1.0, epsilon = 1e-10);
    }
}

#[test]
fn classical_strategy_wins_three_quarters() {
    let rec = play_classical_shots(3, 10_000, 4).unwrap();
    let sigma = (0.75f64 * 0.25 / 10_000.0).sqrt();
    assert!((rec.win_rate() - 0.75).abs() < 3.0 * sigma, "{}", rec.win_rate());
}

#[test]
fn exact_estimates_match_closed_forms() {
    let (r, l) = build_resource(GameKind::Ghz, 4, 3, theta_from_beta(0.5).unwrap()).unwrap();
    assert_abs_diff_eq!(estimate_pq_exact(&r, &l).unwrap(), sech_curve(0.5, 4), epsilon = 1e-8);
    assert_abs_diff_eq!(sech_curve(0.5, 4), 0.809_250, epsilon = 1e-6);

    let (r, l) = build_resource(GameKind::Rsc, 3, 3, theta_from_beta(0.4).unwrap()).unwrap();
    let ising = pq_toric(0.4, &Lattice::surface_code(3), 1, EstimateMethod::Exact, 0).unwrap().mean;
    assert_abs_diff_eq!(estimate_pq_exact(&r, &l).unwrap(), ising, epsilon = 1e-8);
}

#[test]
fn shot_estimates_bracket_the_exact_value() {
    let beta = 0.5;
    let exact = sech_curve(beta, 4);
    let mut inside = 0;
    let trials = 20;
    for seed in 0..trials {
        let config = ExperimentConfig {
            game: GameKind::Ghz,
            sizes: vec![4],
            betas: vec![beta],
            estimator: Estimator::Shots,
            seed,
            ..Default::default()
        };
        let row = &run_sweep(&config).unwrap()[0];
        assert_eq!(row.shots, 1024);
        let sigma = 0.5 * (row.pq_err_hi - row.pq_err_lo);
        if (row.pq - exact).abs() < 3.0 * sigma {
            inside += 1;
        }
    }
    assert!(inside as f64 >= 0.99 * trials as f64, "{inside}/{trials}");
}

#[test]
fn csv_output_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let config = |name: &str| ExperimentConfig {
        game: GameKind::Rsc,
        sizes: vec![3],
        betas: vec![0.0, 0.6, 2.0],
        estimator: Estimator::Shots,
        shots: 64,
        seed: 12,
        out: Some(dir.path().join(name)),
        ..Default::default()
    };
    let rows = run_sweep(&config("a.csv")).unwrap();
    run_sweep(&config("b.csv")).unwrap();
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(read_csv(&dir.path().join("a.csv")).unwrap(), rows);
    assert!(rows[0].advantage);
    assert!(!rows[2].advantage);
    for r in &rows {
        assert!(r.pq_err_lo <= r.pq && r.pq <= r.pq_err_hi);
        assert!((0.0..=1.0).contains(&r.pq));
    }
}

#[test]
fn empty_beta_list_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let config = ExperimentConfig { betas: vec![], out: Some(path.clone()), ..Default::default() };
    assert!(run_sweep(&config).unwrap().is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let config = ExperimentConfig {
        betas: vec![0.0],
        out: Some("/nonexistent-dir/x/out.csv".into()),
        ..Default::default()
    };
    assert!(matches!(run_sweep(&config), Err(topogame::Error::Io(_))));
}

#[test]
fn advantage_flags_at_the_extremes() {
    for (game, estimator, size) in [
        (GameKind::Ghz, Estimator::ExactBranches, 9),
        (GameKind::Rsc, Estimator::ExactBranches, 4),
        (GameKind::Rsc, Estimator::RbimExact, 3),
        (GameKind::Ghz, Estimator::RbimExact, 16),
    ] {
        let config = ExperimentConfig { game, estimator, sizes: vec![size], betas: vec![0.0, 2.0], ..Default::default() };
        let rows = run_sweep(&config).unwrap();
        assert!(rows[0].advantage && !rows[1].advantage, "{game} {estimator}");
    }
}

#[test]
fn ghz_loses_advantage_earlier_with_size() {
    let config = ExperimentConfig { game: GameKind::Ghz, sizes: vec![4, 9, 16], ..Default::default() };
    let rows = run_sweep(&config).unwrap();
    let loss: Vec<f64> = advantage_loss(&rows).into_iter().map(|(_, c)| c.unwrap().beta).collect();
    assert!(loss[0] > loss[1] && loss[1] > loss[2], "{loss:?}");
    // Interpolated crossing of ½[1 + sech⁴β] = ¾ sits near acosh(2^¼).
    assert!((loss[0] - 2f64.powf(0.25).acosh()).abs() < 0.01);
}

#[test]
fn config_files_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let svg = dir.path().join("rsc.svg");
    std::fs::write(
        &cfg,
        format!(
            "game = \"rsc\"\nsizes = [3]\nbetas = [0.0, 0.4, 0.8]\nestimator = \"exact-branches\"\nplot = {:?}\n",
            svg.display().to_string()
        ),
    )
    .unwrap();
    let config = ExperimentConfig::load(&cfg).unwrap();
    let rows = run_sweep(&config).unwrap();
    assert_eq!(rows.len(), 3);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("rsc 3"));
}

#[test]
fn spectators_do_not_change_the_ideal_game() {
    let (r, l) = build_resource(GameKind::Ghz, 7, 3, 0.0).unwrap();
    assert_eq!(l.teams[1].x_support, vec![1, 3, 4, 5, 6]);
    assert_eq!(play_shots(&r, &l, 300, 2).unwrap().win_rate(), 1.0);
    let (r, l) = build_resource(GameKind::Ghz, 7, 3, theta_from_beta(0.3).unwrap()).unwrap();
    assert_abs_diff_eq!(estimate_pq_exact(&r, &l).unwrap(), sech_curve(0.3, 7), epsilon = 1e-8);
}

#[test]
fn ising_path_refuses_configurations_it_does_not_cover() {
    let config = ExperimentConfig {
        game: GameKind::Rsc,
        sizes: vec![5],
        players: 5,
        betas: vec![0.3],
        estimator: Estimator::RbimExact,
        ..Default::default()
    };
    assert!(run_sweep(&config).is_err());
}
