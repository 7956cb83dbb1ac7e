use spectrakit::analysis::{
    correlate_class, density_grid, er_density_sweep, growth_experiment, GraphClassSample,
    SweepModel, SweepSettings,
};
use spectrakit::ctm::{build_ctm_table, BuildMode, CtmConfig, ShapeFilter};
use spectrakit::graph::{generate_er, generate_family, Family};
use spectrakit::rng::stream_rng;
use spectrakit::spectra::{flatness, DEFAULT_FLATNESS_TOL};
use spectrakit::{CtmTable, Estimator, FamilyKind, Normalization, RankSelector};

const RANKS: [RankSelector; 3] = [
    RankSelector::Largest,
    RankSelector::Second,
    RankSelector::Smallest,
];

fn table() -> CtmTable {
    build_ctm_table(&CtmConfig {
        states: 3,
        max_steps: 500,
        shapes: ShapeFilter::All,
        mode: BuildMode::Sampled {
            count: 200_000,
            seed: 5,
        },
        detect_cycles: false,
    })
    .unwrap()
}

/// Signs of (largest, second, smallest) correlations for the seeded ER class,
/// frozen from a first run.
const ER_CLASS_SIGNS: [f64; 3] = [1.0, 1.0, -1.0];

#[test]
fn er_class_signs() {
    let t = table();
    let est = Estimator::bdm(&t, 3);
    let graphs = (0..50)
        .map(|i| {
            let p = 0.05 + 0.9 * i as f64 / 49.0;
            (
                format!("er{i}"),
                generate_er(60, p, &mut stream_rng(2024, i)).unwrap(),
            )
        })
        .collect();
    let sample = GraphClassSample::build("er", graphs, &est, Normalization::Edges).unwrap();
    let rep = correlate_class(&sample, &RANKS).unwrap();
    for (row, sign) in rep.rows.iter().zip(ER_CLASS_SIGNS) {
        assert_eq!(row.rho.unwrap().signum(), sign, "{:?}", row.rank);
        assert!(row.p_value.unwrap() < 0.01, "{:?}", row.rank);
    }
}

#[test]
fn complete_class_largest_eigenvalue() {
    let t = table();
    let est = Estimator::bdm(&t, 3);
    let graphs = (4..=20)
        .map(|n| {
            (
                format!("k{n}"),
                generate_family(Family::Complete(n)).unwrap(),
            )
        })
        .collect();
    let sample = GraphClassSample::build("complete", graphs, &est, Normalization::Edges).unwrap();
    let rep = correlate_class(&sample, &RANKS).unwrap();
    // lambda_1 = n - 1 grows with n and so does the adjacency description.
    let top = &rep.rows[0];
    assert!(!top.degenerate);
    assert!(top.rho.unwrap() > 0.9);
    assert!(top.p_value.unwrap() < 1e-6);
}

#[test]
fn er_sweep_shape() {
    let res = er_density_sweep(60, &density_grid(20), 3, 1, &SweepSettings::new(&RANKS)).unwrap();
    let top = res.trajectories.series_for(RankSelector::Largest).unwrap();
    for w in top.windows(2) {
        assert!(w[1].raw >= w[0].raw - w[1].raw_std_err.max(w[0].raw_std_err));
    }
    let second = res.trajectories.series_for(RankSelector::Second).unwrap();
    let (argmax, _) = second
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.raw.total_cmp(&b.1.raw))
        .unwrap();
    assert!(argmax > 0 && argmax < second.len() - 1);
}

#[test]
fn flat_versus_random_signatures() {
    let settings = SweepSettings::new(&RANKS);
    let sizes: Vec<usize> = (3..=30).collect();
    let complete = growth_experiment(
        SweepModel::Family(FamilyKind::Complete),
        &sizes,
        0,
        &settings,
    )
    .unwrap();
    assert!(flatness(&complete.signature, DEFAULT_FLATNESS_TOL).low_information);
    let er = er_density_sweep(60, &density_grid(10), 1, 3, &settings).unwrap();
    assert!(!flatness(&er.signature, DEFAULT_FLATNESS_TOL).low_information);
}
