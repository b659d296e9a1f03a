//! Library results checked against independent oracles: quadrature, dense
//! linear solves and closed forms.

mod common;

use approx::assert_relative_eq;
use common::{binomial_pmf, dense_stationary, incomplete_gamma_quad, integrate};
use lbd::limit::{
    beta_moment, beta_pdf, gamma_steady_density, lig_moment, lig_pdf_continuous_part, lig_pi, lig_sample,
    GammaSteadyState, LigParams,
};
use lbd::special::lower_incomplete_gamma;
use lbd::stationary::{scaled_moments, stationary_pmf};
use lbd::{ModelId, ModelSpec, PhysicalParams};

#[test]
fn quadrature_oracle_reproduces_closed_forms() {
    let e1 = (-1.0f64).exp();
    assert_relative_eq!(incomplete_gamma_quad(1.0, 1.0), 1.0 - e1, max_relative = 1e-13);
    assert_relative_eq!(incomplete_gamma_quad(2.0, 1.0), 1.0 - 2.0 * e1, max_relative = 1e-13);
    // √π erf(1)
    assert_relative_eq!(incomplete_gamma_quad(0.5, 1.0), 1.493_648_265_624_854, max_relative = 1e-13);
}

#[test]
fn incomplete_gamma_matches_quadrature_grid() {
    for z in [0.5, 1.0, 2.5, 10.0] {
        for g in [0.1, 1.0, 5.0, 20.0] {
            let got = lower_incomplete_gamma(z, g).unwrap();
            let want = incomplete_gamma_quad(z, g);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }
}

#[test]
fn brute_force_pmf_small_n() {
    for model in ModelId::ALL {
        for n in [1, 2, 5, 12] {
            let spec = ModelSpec::new(model, 0.7, 1.9, 1.3, n).unwrap();
            let pmf = stationary_pmf(&spec).unwrap();
            for (p, q) in pmf.probs().iter().zip(dense_stationary(&spec)) {
                assert!((p - q).abs() <= 1e-10, "{model} N={n}: {p} vs {q}");
            }
        }
    }
}

#[test]
fn linear_chain_is_binomial() {
    for model in ModelId::ALL {
        for (c1, c2, n) in [(1.0, 1.0, 4), (2.0, 0.5, 30)] {
            let spec = ModelSpec::new(model, c1, c2, 0.0, n).unwrap();
            let pmf = stationary_pmf(&spec).unwrap();
            let dense = dense_stationary(&spec);
            for ((p, q), r) in pmf.probs().iter().zip(binomial_pmf(n, c1 / (c1 + c2))).zip(dense) {
                assert!((p - q).abs() < 1e-13);
                assert!((p - r).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn lig_moments_match_quadrature() {
    for (a, b) in [(1.0, 2.0), (0.5, 1.5), (2.0, 5.0), (3.0, 3.2)] {
        let p = LigParams::new(a, b).unwrap();
        let pi = lig_pi(&p);
        for m in 0..=8 {
            let f = |x: f64| x.powi(m as i32) * lig_pdf_continuous_part(&p, x);
            let quad = integrate(&f, 0.0, 1.0, 1e-14) + pi;
            assert!((lig_moment(&p, m) - quad).abs() <= 1e-10, "({a},{b}) m={m}");
        }
        // continuous part carries 1 - π
        let mass = integrate(&|x| lig_pdf_continuous_part(&p, x), 0.0, 1.0, 1e-14);
        assert_relative_eq!(mass, 1.0 - pi, epsilon = 1e-10);
    }
}

#[test]
fn beta_moments_match_quadrature() {
    use std::f64::consts::FRAC_PI_2;
    for (a, c) in [(1.0, 1.0), (2.0, 3.0), (1.5, 0.5), (4.0, 2.5)] {
        // x = sin²θ: x^m x^{a-1} (1-x)^{c-1} dx = 2 sin^{2a-1+2m}θ cos^{2c-1}θ dθ
        let weight = |m: usize| {
            let f = |th: f64| 2.0 * th.sin().powf(2.0 * a - 1.0 + 2.0 * m as f64) * th.cos().powf(2.0 * c - 1.0);
            integrate(&f, 0.0, FRAC_PI_2, 1e-14)
        };
        let norm = weight(0);
        for m in 0..=10 {
            let quad = weight(m) / norm;
            assert!((beta_moment(a, c, m).unwrap() - quad).abs() <= 1e-10, "Beta({a},{c}) m={m}: {quad}");
        }
        let mass = integrate(&|x| beta_pdf(a, c, x).unwrap(), 0.0, 0.5, 1e-14);
        assert!((mass - lbd::limit::beta_cdf(a, c, 0.5).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn gamma_steady_density_is_normalized() {
    for (d1, x, d2, c) in [(1.0, 1.0, 1.0, 2.0), (1.0, 1.0, 9.0, 2.0), (2.0, 0.5, 1.0, 0.5)] {
        let p = PhysicalParams::new(d1, x, d2, c).unwrap();
        let g = GammaSteadyState::from_physical(&p);
        let upper = 60.0 / g.rate + 20.0 * g.mean();
        let total = integrate(&|u| gamma_steady_density(&p, u), 0.0, upper, 1e-13);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }
}

#[test]
fn lig_continuous_part_is_restricted_gamma() {
    let p = PhysicalParams::new(1.0, 1.0, 3.0, 0.8).unwrap();
    let g = GammaSteadyState::from_physical(&p);
    let lig = LigParams::new(g.shape, g.rate).unwrap();
    let ratio0 = lig_pdf_continuous_part(&lig, 0.5) / g.pdf(0.5);
    for u in [0.01, 0.1, 0.33, 0.7, 0.99] {
        let r = lig_pdf_continuous_part(&lig, u) / g.pdf(u);
        assert!((r - ratio0).abs() <= 1e-10 * ratio0, "{u}: {r} vs {ratio0}");
    }
}

#[test]
fn lig_sampler_statistics() {
    let p = LigParams::new(1.0, 2.0).unwrap();
    let draws = lig_sample(&p, 1_000_000, 20_240_917);
    let n = draws.len() as f64;
    let at_one = draws.iter().filter(|x| **x == 1.0).count() as f64 / n;
    let mean = draws.iter().sum::<f64>() / n;
    assert!((at_one - lig_pi(&p)).abs() <= 0.002, "atom fraction {at_one}");
    assert!((mean - 0.5).abs() <= 0.001, "mean {mean}");
    assert!(draws.iter().all(|x| *x > 0.0 && *x <= 1.0));
}

#[test]
fn scaled_moments_match_dense_pmf() {
    let spec = ModelSpec::new(ModelId::M3, 2.0, 0.5, 0.7, 12).unwrap();
    let dense = dense_stationary(&spec);
    let ms = scaled_moments(&stationary_pmf(&spec).unwrap(), 4);
    for m in 1..=4 {
        let want: f64 = dense.iter().enumerate().map(|(k, p)| (k as f64 / 12.0).powi(m as i32) * p).sum();
        assert!((ms.raw[m] - want).abs() < 1e-10);
    }
}
