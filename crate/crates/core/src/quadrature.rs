//! One-dimensional quadrature rules shared by the collision and hierarchy code.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for the weight `(1-x)^alpha (1+x)^beta`.
#[allow(clippy::approx_constant)]
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0, "invalid Gauss-Jacobi parameters");
    if alpha == 0.0 && beta == 0.0 {
        return gauss_legendre(n);
    }
    let nf = n as f64;
    let ab = alpha + beta;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = if i == 0 {
            let an = alpha / nf;
            let bn = beta / nf;
            let r1 = (1.0 + alpha) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            1.0 - r1 / r2
        } else if i == 1 {
            let r1 = (4.1 + alpha) / ((1.0 + alpha) * (1.0 + 0.156 * alpha));
            let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * alpha) / nf;
            let r3 = 1.0 + 0.012 * beta * (1.0 + 0.25 * alpha.abs()) / nf;
            z - (1.0 - z) * r1 * r2 * r3
        } else if i == 2 {
            let r1 = (1.67 + 0.28 * alpha) / (1.0 + 0.37 * alpha);
            let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
            let r3 = 1.0 + 8.0 * beta / ((6.28 + beta) * nf * nf);
            z - (x[0] - z) * r1 * r2 * r3
        } else if i == n - 2 {
            let r1 = (1.0 + 0.235 * beta) / (0.766 + 0.119 * beta);
            let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * alpha / ((7.5 + alpha) * nf * nf));
            z + (z - x[n - 4]) * r1 * r2 * r3
        } else if i == n - 1 {
            let r1 = (1.0 + 0.37 * beta) / (1.67 + 0.28 * beta);
            let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
            let r3 = 1.0 / (1.0 + 8.0 * alpha / ((6.28 + alpha) * nf * nf));
            z + (z - x[n - 3]) * r1 * r2 * r3
        } else {
            3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3]
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        let mut temp = 0.0;
        for _ in 0..200 {
            let mut p1 = (alpha - beta + (2.0 + ab) * z) / 2.0;
            p2 = 1.0;
            for j in 2..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                temp = 2.0 * jf + ab;
                let a = 2.0 * jf * (jf + ab) * (temp - 2.0);
                let b = (temp - 1.0) * (alpha * alpha - beta * beta + temp * (temp - 2.0) * z);
                let c = 2.0 * (jf - 1.0 + alpha) * (jf - 1.0 + beta) * temp;
                p1 = (b * p2 - c * p3) / a;
            }
            if n == 1 {
                temp = 2.0 + ab;
            }
            pp = (nf * (alpha - beta - temp * z) * p1 + 2.0 * (nf + alpha) * (nf + beta) * p2) / (temp * (1.0 - z * z));
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        let lg = ln_gamma(alpha + nf) + ln_gamma(beta + nf) - ln_gamma(nf + 1.0) - ln_gamma(nf + ab + 1.0);
        w[i] = lg.exp() * temp * 2f64.powf(ab) / (pp * p2);
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// `int_0^L s^beta h(s) ds ~ sum w_i h(s_i)` for `beta > -1`.
pub fn gauss_jacobi_left(n: usize, beta: f64, len: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, 0.0, beta);
    let scale = (len / 2.0).powf(beta + 1.0);
    (
        x.iter().map(|t| len * (1.0 + t) / 2.0).collect(),
        w.iter().map(|t| t * scale).collect(),
    )
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|t| t * h).collect())
}

/// Composite Gauss-Legendre rule: `n` nodes on each consecutive panel of `breaks`.
pub fn composite_gauss(breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n * breaks.len());
    let mut ws = Vec::with_capacity(n * breaks.len());
    for p in breaks.windows(2) {
        if p[1] > p[0] {
            let (x, w) = gauss_legendre_on(n, p[0], p[1]);
            xs.extend(x);
            ws.extend(w);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn mapped_rule_integrates_exponential() {
        let (x, w) = gauss_legendre_on(20, 0.0, 2.0);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((q - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn large_rule_weights_sum_to_two() {
        let (_, w) = gauss_legendre(96);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_jacobi_moments() {
        use statrs::function::beta::beta;
        for &(a, b) in &[(0.0, -0.5), (0.0, -0.25), (0.5, 0.0), (-0.3, 0.7), (0.0, 1.5)] {
            for n in [1usize, 2, 3, 5, 8, 16, 30] {
                let (x, w) = gauss_jacobi(n, a, b);
                for k in 0..(2 * n).min(12) {
                    let q: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 + x).powi(k as i32)).sum();
                    let exact = 2f64.powf(a + b + 1.0 + k as f64) * beta(a + 1.0, b + 1.0 + k as f64);
                    assert!(
                        (q - exact).abs() < 1e-12 * exact.abs().max(1.0),
                        "a={a} b={b} n={n} k={k}: {q} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn left_weighted_rule() {
        let (s, w) = gauss_jacobi_left(10, -0.5, 4.0);
        let q: f64 = s.iter().zip(&w).map(|(s, w)| w * s).sum();
        assert!((q - 2.0 / 3.0 * 4f64.powf(1.5)).abs() < 1e-12);
    }
}
