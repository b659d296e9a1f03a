//! Test-only oracles, independent of the library's numerical paths.

#![allow(dead_code)]

use lbd::ModelSpec;
use nalgebra::{DMatrix, DVector};

/// Adaptive Gauss-Kronrod (7/15) quadrature on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        const XGK: [f64; 8] = [
            0.991_455_371_120_812_6,
            0.949_107_912_342_758_5,
            0.864_864_423_359_769_1,
            0.741_531_185_599_394_4,
            0.586_087_235_467_691_1,
            0.405_845_151_377_397_2,
            0.207_784_955_007_898_5,
            0.0,
        ];
        const WGK: [f64; 8] = [
            0.022_935_322_010_529_22,
            0.063_092_092_629_978_55,
            0.104_790_010_322_250_2,
            0.140_653_259_715_525_9,
            0.169_004_726_639_267_9,
            0.190_350_578_064_785_4,
            0.204_432_940_075_298_9,
            0.209_482_141_084_727_8,
        ];
        const WG: [f64; 4] =
            [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for i in 0..7 {
            let x = h * XGK[i];
            let s = f(c - x) + f(c + x);
            kron += WGK[i] * s;
            if i % 2 == 1 {
                gauss += WG[i / 2] * s;
            }
        }
        (kron * h, ((kron - gauss) * h).abs())
    }
    // local tolerance is proportional to width; roundoff sets a floor
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol_per_width: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol_per_width * (b - a) || err <= 64.0 * f64::EPSILON * v.abs() || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, tol_per_width, depth - 1) + recurse(f, m, b, tol_per_width, depth - 1)
    }
    recurse(f, a, b, tol / (b - a), 60)
}

/// `∫₀^γ s^{z-1} e^{-s} ds` by quadrature, substituting `s = t^{1/z}` when
/// `z < 1` to remove the endpoint singularity.
pub fn incomplete_gamma_quad(z: f64, gamma: f64) -> f64 {
    if z < 1.0 {
        let f = |t: f64| (-t.powf(1.0 / z)).exp() / z;
        integrate(&f, 0.0, gamma.powf(z), 1e-15)
    } else {
        let f = |s: f64| {
            if s == 0.0 {
                if z == 1.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                ((z - 1.0) * s.ln() - s).exp()
            }
        };
        integrate(&f, 0.0, gamma, 1e-15 * gamma.max(1.0))
    }
}

/// Stationary pmf from the dense global-balance system `π Q = 0`,
/// `Σ π = 1`, solved by LU. Independent of detailed balance.
pub fn dense_stationary(spec: &ModelSpec) -> Vec<f64> {
    let n = spec.n();
    let size = n + 1;
    // rows: balance equations for states 0..N-1, last row normalization
    let mut a = DMatrix::<f64>::zeros(size, size);
    for j in 0..size {
        let b = spec.birth_rate(j).unwrap();
        let d = spec.death_rate(j).unwrap();
        // column j of Q^T: outflow from j and inflow to neighbours
        a[(j, j)] -= b + d;
        if j < n {
            a[(j + 1, j)] += b;
        }
        if j > 0 {
            a[(j - 1, j)] += d;
        }
    }
    for j in 0..size {
        a[(n, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(size);
    rhs[n] = 1.0;
    let sol = a.lu().solve(&rhs).expect("global balance system is nonsingular");
    sol.iter().copied().collect()
}

/// Binomial pmf by direct products.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (k, o) in out.iter_mut().enumerate() {
        let mut c = 1.0;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        *o = c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
    }
    out
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}
