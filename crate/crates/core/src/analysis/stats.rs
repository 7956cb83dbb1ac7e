use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::AnalysisError;
use crate::rng::stream_rng;

/// Resample count of the permutation test unless the caller picks another.
pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// Sum of squared deviations below this fraction of `n * max|x|^2` counts
/// as zero variance.
const DEGENERATE_REL_TOL: f64 = 1e-24;

fn centered(xs: &[f64]) -> (Vec<f64>, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let dev: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let ss = dev.iter().map(|d| d * d).sum();
    (dev, ss)
}

fn is_flat(xs: &[f64], ss: f64) -> bool {
    let scale = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    ss <= DEGENERATE_REL_TOL * scale * scale * xs.len() as f64
}

/// Sample Pearson product-moment coefficient, clamped to `[-1, 1]`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::InvalidParameter(format!(
            "series lengths differ ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(AnalysisError::InvalidParameter(format!(
            "pearson needs at least 3 pairs, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidParameter(
            "series contain non-finite values".into(),
        ));
    }
    let (dx, sxx) = centered(xs);
    let (dy, syy) = centered(ys);
    if is_flat(xs, sxx) || is_flat(ys, syy) {
        return Err(AnalysisError::DegenerateCorrelation);
    }
    let sxy: f64 = dx.iter().zip(&dy).map(|(a, b)| a * b).sum();
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    /// Two-tailed, in `(0, 1]`.
    pub p: f64,
    /// `|rho| = 1`: the statistic is unbounded and `p` sits at the floor.
    pub exact_fit: bool,
}

/// Smallest reportable p.
pub const P_FLOOR: f64 = f64::MIN_POSITIVE;

/// Two-tailed p for `rho` over `n` pairs, from `t = rho sqrt((n-2)/(1-rho^2))`
/// against Student's t with `n - 2` degrees of freedom:
/// `p = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn p_value(rho: f64, n: usize) -> Result<PValue, AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::InvalidParameter(format!(
            "p-value needs n >= 3, got {n}"
        )));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(AnalysisError::InvalidParameter(format!(
            "correlation must lie in [-1, 1], got {rho}"
        )));
    }
    if rho.abs() == 1.0 {
        return Ok(PValue {
            p: P_FLOOR,
            exact_fit: true,
        });
    }
    let df = (n - 2) as f64;
    // df / (df + t^2) simplifies to 1 - rho^2
    let x = 1.0 - rho * rho;
    let p = beta_reg(df / 2.0, 0.5, x).clamp(P_FLOOR, 1.0);
    Ok(PValue {
        p,
        exact_fit: false,
    })
}

/// Two-tailed permutation p: the share of `resamples` shuffles of `ys`
/// whose |rho| reaches the observed one, with the observed pairing counted
/// once in numerator and denominator.
pub fn permutation_p_value(
    xs: &[f64],
    ys: &[f64],
    resamples: usize,
    seed: u64,
) -> Result<f64, AnalysisError> {
    let observed = pearson(xs, ys)?.abs();
    let mut rng = stream_rng(seed, 0);
    let mut shuffled = ys.to_vec();
    let mut hits = 0usize;
    for _ in 0..resamples {
        shuffled.shuffle(&mut rng);
        let r = pearson(xs, &shuffled)?.abs();
        // tolerance keeps ties of the observed value from flickering
        if r >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((hits + 1) as f64 / (resamples + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Two-tailed p by Simpson integration of the t density over `[|t|, inf)`,
    /// after the substitution `t = |t| + u / (1 - u)`.
    fn p_oracle(rho: f64, n: usize) -> f64 {
        let df = (n - 2) as f64;
        let t0 = rho.abs() * (df / (1.0 - rho * rho)).sqrt();
        let ln_c = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
            - statrs::function::gamma::ln_gamma(df / 2.0)
            - 0.5 * (df * std::f64::consts::PI).ln();
        let density = |t: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + t * t / df).ln()).exp();
        let f = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            density(t0 + u / w) / (w * w)
        };
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..steps {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 * s * h / 3.0
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        // covariance 2.5 / 3, variances 5 / 3 each
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(AnalysisError::DegenerateCorrelation)
        );
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(AnalysisError::InvalidParameter(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(AnalysisError::InvalidParameter(_))
        ));
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value(0.0, 10).unwrap().p, 1.0);
        let near = p_value(0.99, 3).unwrap();
        assert!(near.p < 0.1 && !near.exact_fit);
        let p = p_value(0.5, 20).unwrap().p;
        assert!((p - p_oracle(0.5, 20)).abs() < 1e-9);
        assert!((p - 0.0248).abs() < 5e-5);
        let exact = p_value(-1.0, 10).unwrap();
        assert!(exact.exact_fit && exact.p == P_FLOOR);
    }

    #[test]
    fn p_value_matches_quadrature() {
        for &(rho, n) in &[(0.1, 5), (0.3, 12), (-0.7, 8), (0.9, 30), (0.05, 100)] {
            let p = p_value(rho, n).unwrap().p;
            assert!((p - p_oracle(rho, n)).abs() < 1e-8, "rho={rho} n={n}");
        }
    }

    #[test]
    fn permutation_agrees_roughly() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.7).sin() + 0.05 * x).collect();
        let exact = p_value(pearson(&xs, &ys).unwrap(), 20).unwrap().p;
        let perm = permutation_p_value(&xs, &ys, 4000, 3).unwrap();
        assert!((exact - perm).abs() < 0.05, "{exact} vs {perm}");
        assert_eq!(perm, permutation_p_value(&xs, &ys, 4000, 3).unwrap());
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            xs in prop::collection::vec(-100.0..100.0f64, 3..40),
            seed in 0u64..1000,
            a in 0.1..10.0f64,
            b in -50.0..50.0f64,
        ) {
            let mut r = stream_rng(seed, 0);
            let ys: Vec<f64> = xs.iter().map(|x| x * 0.3 + rand::Rng::random::<f64>(&mut r) * 40.0).collect();
            if let (Ok(rxy), Ok(ryx)) = (pearson(&xs, &ys), pearson(&ys, &xs)) {
                prop_assert!((rxy - ryx).abs() <= 1e-12);
                let pos: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
                let neg: Vec<f64> = xs.iter().map(|x| -a * x + b).collect();
                prop_assert!((pearson(&pos, &ys).unwrap() - rxy).abs() <= 1e-12);
                prop_assert!((pearson(&neg, &ys).unwrap() + rxy).abs() <= 1e-12);
            }
        }

        #[test]
        fn p_value_monotone(r1 in 0.01..0.98f64, dr in 0.001..0.01f64, n in 3usize..200) {
            let r2 = (r1 + dr).min(0.99);
            prop_assert!(p_value(r2, n).unwrap().p < p_value(r1, n).unwrap().p);
            prop_assert!(p_value(-r2, n).unwrap().p < p_value(r1, n).unwrap().p);
            prop_assert!(p_value(r1, n + 1).unwrap().p < p_value(r1, n).unwrap().p);
        }
    }
}
