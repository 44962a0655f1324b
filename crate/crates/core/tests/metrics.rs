mod common;

use earspo2::metrics::{f_survival, kde_2d, one_way_anova};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

/// P(F > f) by Simpson integration of the beta density behind the F
/// distribution, with x = d1·f / (d1·f + d2) and the tail as 1 − cdf.
fn tail_by_quadrature(f: f64, d1: f64, d2: f64) -> f64 {
    let (a, b) = (d1 / 2.0, d2 / 2.0);
    // substitute x = u² to tame the x^(a−1) singularity for a < 1
    let density = |u: f64| 2.0 * u.powf(2.0 * a - 1.0) * (1.0 - u * u).powf(b - 1.0);
    let simpson = |lo: f64, hi: f64, n: usize| {
        let h = (hi - lo) / n as f64;
        let mut s = density(lo) + density(hi);
        for k in 1..n {
            s += density(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let x = d1 * f / (d1 * f + d2);
    let total = simpson(0.0, 1.0, 200_000);
    1.0 - simpson(0.0, x.sqrt(), 200_000) / total
}

#[test]
fn survival_matches_quadrature() {
    for &(f, d1, d2) in &[(1.5, 1.0, 4.0), (3.2, 3.0, 20.0), (0.4, 3.0, 60.0), (2.0, 4.0, 6.0), (5.0, 2.0, 9.0)] {
        let want = tail_by_quadrature(f, d1, d2);
        assert!(
            (f_survival(f, d1, d2) - want).abs() < 1e-7,
            "F({d1},{d2}) at {f}: {} vs {want}",
            f_survival(f, d1, d2)
        );
    }
}

#[test]
fn survival_closed_form_for_two_numerator_dof() {
    for &(f, d2) in &[(0.3f64, 5.0f64), (1.0, 10.0), (4.0, 37.0), (48.3, 1980.0)] {
        let want = (1.0 + 2.0 * f / d2).powf(-d2 / 2.0);
        assert!(((f_survival(f, 2.0, d2) - want) / want).abs() < 1e-9);
    }
}

#[test]
fn reported_df_and_f_give_tiny_p() {
    // F[3,1980] = 48.3 is a p-value of order 1e-30
    let p = f_survival(48.3, 3.0, 1980.0);
    assert!(p > 1e-31 && p < 1e-29, "{p:e}");
}

fn pooled_t(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let ss = a.iter().map(|v| (v - ma).powi(2)).sum::<f64>() + b.iter().map(|v| (v - mb).powi(2)).sum::<f64>();
    let sp2 = ss / (a.len() + b.len() - 2) as f64;
    (ma - mb) / (sp2 * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt()
}

proptest! {
    #[test]
    fn two_groups_equal_t_squared(
        a in prop::collection::vec(-100.0f64..100.0, 2..30),
        b in prop::collection::vec(-100.0f64..100.0, 2..30),
    ) {
        let r = one_way_anova(&[a.clone(), b.clone()]).unwrap();
        let t2 = pooled_t(&a, &b).powi(2);
        prop_assert!((r.f_statistic - t2).abs() <= 1e-9 * t2.max(1.0));
    }

    #[test]
    fn f_invariant_to_shift_and_scale(
        groups in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3..12), 2..5),
        shift in -1e3f64..1e3,
        scale in 0.01f64..100.0,
    ) {
        let base = one_way_anova(&groups).unwrap();
        let moved: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| v * scale + shift).collect()).collect();
        let r = one_way_anova(&moved).unwrap();
        prop_assert!((r.f_statistic - base.f_statistic).abs() <= 1e-9 * base.f_statistic.max(1.0));
    }
}

fn cluster(rng: &mut rand_chacha::ChaCha8Rng, cx: f64, cy: f64, sd: f64, n: usize) -> Vec<(f64, f64)> {
    let g = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| (cx + g.sample(rng), cy + g.sample(rng))).collect()
}

#[test]
fn kde_nodes_match_direct_kernel_sum() {
    let mut rng = common::rng(3);
    let pts: Vec<(f64, f64)> = (0..60).map(|_| (rng.random_range(-2.0..3.0), rng.random_range(10.0..11.0))).collect();
    let g = kde_2d(&pts, 30, None).unwrap();
    let [hx, hy] = g.bandwidths;
    let direct = |x: f64, y: f64| {
        pts.iter()
            .map(|p| (-((x - p.0) / hx).powi(2) / 2.0 - ((y - p.1) / hy).powi(2) / 2.0).exp() / (2.0 * PI * hx * hy))
            .sum::<f64>()
            / pts.len() as f64
    };
    for (j, &y) in g.y_axis.iter().enumerate() {
        for (i, &x) in g.x_axis.iter().enumerate() {
            assert!((g.density[j][i] * g.peak_density - direct(x, y)).abs() < 1e-9);
        }
    }
}

#[test]
fn kde_integrates_to_one() {
    let mut rng = common::rng(4);
    let pts = cluster(&mut rng, 1.0, -2.0, 0.5, 300);
    let g = kde_2d(&pts, 100, None).unwrap();
    let dx = g.x_axis[1] - g.x_axis[0];
    let dy = g.y_axis[1] - g.y_axis[0];
    let mass: f64 = g.density.iter().flatten().sum::<f64>() * g.peak_density * dx * dy;
    assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
}

#[test]
fn two_clusters_two_maxima() {
    let mut rng = common::rng(5);
    let mut pts = cluster(&mut rng, -3.0, 0.0, 0.3, 200);
    pts.extend(cluster(&mut rng, 3.0, 2.0, 0.3, 200));
    let mean = |s: &[(f64, f64)]| {
        (s.iter().map(|p| p.0).sum::<f64>() / s.len() as f64, s.iter().map(|p| p.1).sum::<f64>() / s.len() as f64)
    };
    let centres = [mean(&pts[..200]), mean(&pts[200..])];
    let g = kde_2d(&pts, 100, None).unwrap();
    let n = g.x_axis.len();
    let mut maxima = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = g.density[j][i];
            let neighbours = [(0, 1), (2, 1), (1, 0), (1, 2), (0, 0), (2, 2), (0, 2), (2, 0)];
            if neighbours.iter().all(|&(a, b)| g.density[j + b - 1][i + a - 1] < v) {
                maxima.push((g.x_axis[i], g.y_axis[j]));
            }
        }
    }
    assert_eq!(maxima.len(), 2, "{maxima:?}");
    let (cx, cy) = (g.x_axis[1] - g.x_axis[0], g.y_axis[1] - g.y_axis[0]);
    for c in centres {
        assert!(maxima.iter().any(|m| (m.0 - c.0).abs() <= cx && (m.1 - c.1).abs() <= cy), "{c:?} vs {maxima:?}");
    }
}
