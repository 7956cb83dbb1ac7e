use std::f64::consts::PI;

use proptest::prelude::*;
use spectrakit::graph::{generate_er, generate_family, Family};
use spectrakit::rng::stream_rng;
use spectrakit::spectra::{normalized_spectrum, spectrum};
use spectrakit::{RankSelector, Spectrum};

fn assert_close(got: &Spectrum, mut want: Vec<f64>, tol: f64, what: &str) {
    want.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(got.len(), want.len(), "{what}");
    for (g, w) in got.values().iter().zip(&want) {
        assert!((g - w).abs() <= tol, "{what}: {g} vs {w}");
    }
}

#[test]
fn complete_cycle_path_star() {
    for n in 4..=50 {
        let k = spectrum(&generate_family(Family::Complete(n)).unwrap()).unwrap();
        let mut want = vec![-1.0; n - 1];
        want.push(n as f64 - 1.0);
        assert_close(&k, want, 1e-9, &format!("K_{n}"));

        let c = spectrum(&generate_family(Family::Cycle(n)).unwrap()).unwrap();
        let want = (0..n)
            .map(|j| 2.0 * (2.0 * PI * j as f64 / n as f64).cos())
            .collect();
        assert_close(&c, want, 1e-9, &format!("C_{n}"));

        let p = spectrum(&generate_family(Family::Path(n)).unwrap()).unwrap();
        let want = (1..=n)
            .map(|j| 2.0 * (PI * j as f64 / (n + 1) as f64).cos())
            .collect();
        assert_close(&p, want, 1e-9, &format!("P_{n}"));

        let s = spectrum(&generate_family(Family::Star(n)).unwrap()).unwrap();
        let r = ((n - 1) as f64).sqrt();
        let mut want = vec![0.0; n - 2];
        want.extend([r, -r]);
        assert_close(&s, want, 1e-9, &format!("star_{n}"));
    }
}

#[test]
fn crown_and_grid() {
    for n in 2..=12 {
        // K_{n,n} minus a perfect matching: +-(n-1) once, +-1 with multiplicity n-1
        let c = spectrum(&generate_family(Family::Crown(n)).unwrap()).unwrap();
        let mut want = vec![n as f64 - 1.0, 1.0 - n as f64];
        want.extend(std::iter::repeat_n(1.0, n - 1));
        want.extend(std::iter::repeat_n(-1.0, n - 1));
        assert_close(&c, want, 1e-9, &format!("crown_{n}"));
    }
    // Cartesian product of paths: sums of path eigenvalues
    let (r, k) = (4, 6);
    let g = spectrum(&generate_family(Family::Grid { rows: r, cols: k }).unwrap()).unwrap();
    let path = |m: usize| (1..=m).map(move |j| 2.0 * (PI * j as f64 / (m + 1) as f64).cos());
    let want = path(r).flat_map(|a| path(k).map(move |b| a + b)).collect();
    assert_close(&g, want, 1e-9, "grid 4x6");
}

#[test]
fn normalized_complete_graph() {
    let s = normalized_spectrum(&generate_family(Family::Complete(8)).unwrap()).unwrap();
    assert!((s.values()[0] - 0.25).abs() < 1e-12);
    assert!(s.values()[1..]
        .iter()
        .all(|v| (v + 1.0 / 28.0).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_and_frobenius(seed in 0u64..10_000, n in 1usize..60, p in 0.0..1.0f64) {
        let g = generate_er(n, p, &mut stream_rng(seed, 0)).unwrap();
        let s = spectrum(&g).unwrap();
        prop_assert!(s.sum().abs() <= 1e-8 * n as f64);
        prop_assert!((s.sum_of_squares() - 2.0 * g.edge_count() as f64).abs() <= 1e-6 * (n * n) as f64);
    }

    #[test]
    fn smallest_is_last_and_min(seed in 0u64..10_000, n in 1usize..40) {
        let g = generate_er(n, 0.4, &mut stream_rng(seed, 1)).unwrap();
        let s = spectrum(&g).unwrap();
        let min = s.values().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(s.at(RankSelector::Smallest).unwrap(), *s.values().last().unwrap());
        prop_assert_eq!(s.at(RankSelector::Smallest).unwrap(), min);
        prop_assert_eq!(s.at(RankSelector::Largest).unwrap(), s.at(RankSelector::Rank(1)).unwrap());
    }
}
