//! Numerical harness for the dispersive and bilinear inequalities.
//!
//! Every check measures a left-hand side over sampled data, divides by the
//! right-hand side without its constant, and keeps the maximum. Verdicts
//! compare growth exponents, never constants.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::collision::{q_bobylev, q_direct, CollisionKernelSpec, Route, Sign};
use crate::par::map_indexed;
use crate::quadrature::gauss_legendre_on;
use crate::solver::random_band_limited;
use crate::spectral_core::{propagate, sobolev_norm, PhaseField, Repr, SpectralGrid};
use crate::{Error, Result, C64};

/// Default slack on fitted slopes.
pub const DEFAULT_SLACK: f64 = 0.1;
/// Default number of uniform time samples for `L^p_t`.
pub const DEFAULT_TIME_SAMPLES: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimateParams {
    pub d: usize,
    pub p: f64,
    pub s: f64,
    pub s1: f64,
    pub r: f64,
    pub gamma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate_id: String,
    pub params: EstimateParams,
    /// `(N, M)` per level.
    pub levels: Vec<(f64, f64)>,
    /// Largest measured ratio per level.
    pub ratios: Vec<f64>,
    pub fitted_slope: f64,
    pub theory_slope: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub samples: usize,
    pub seed: u64,
}

impl EstimateReport {
    /// One CSV row per level: `estimate_id, N, M, ratio`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["estimate_id", "N", "M", "ratio"]).map_err(io)?;
        for ((n, m), r) in self.levels.iter().zip(&self.ratios) {
            w.write_record([
                self.estimate_id.clone(),
                format!("{n:.17e}"),
                format!("{m:.17e}"),
                format!("{r:.17e}"),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Independent seed for sample `i` of a run seeded with `seed`.
pub fn substream_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Endpoint exponent `p0 = 2(d+2)/d` as a reduced fraction.
pub fn p0_fraction(d: usize) -> (i64, i64) {
    reduce(2 * (d as i64 + 2), d as i64)
}

/// `d/2 - (d+1)/p` as a reduced fraction, for `p = num/den`.
pub fn strichartz_exponent_fraction(d: usize, p: (i64, i64)) -> (i64, i64) {
    let d = d as i64;
    // d/2 - (d+1) den / num
    reduce(d * p.0 - 2 * (d + 1) * p.1, 2 * p.0)
}

/// `d/2 - (d+1)/p`.
pub fn strichartz_exponent(d: usize, p: f64) -> f64 {
    d as f64 / 2.0 - (d as f64 + 1.0) / p
}

/// Whether `d/2 - (d+1)/p0 = d/(2(d+2)) = 1/p0` holds in exact arithmetic.
pub fn endpoint_identity_holds(d: usize) -> bool {
    let p0 = p0_fraction(d);
    let lhs = strichartz_exponent_fraction(d, p0);
    let mid = reduce(d as i64, 2 * (d as i64 + 2));
    let inv = reduce(p0.1, p0.0);
    lhs == mid && mid == inv
}

fn reduce(num: i64, den: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(num, den).max(1) * den.signum();
    (num / g, den / g)
}

/// Least-squares line through `(log2 N, log2 ratio)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log2` units.
    pub residual: f64,
}

pub fn fit_exponent(levels: &[f64], ratios: &[f64]) -> Result<ExponentFit> {
    if levels.len() != ratios.len() {
        return Err(Error::Config("levels and ratios differ in length".into()));
    }
    if levels.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} levels, need at least 3",
            levels.len()
        )));
    }
    if levels.iter().chain(ratios).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InsufficientData("levels and ratios must be positive".into()));
    }
    let x: Vec<f64> = levels.iter().map(|v| v.log2()).collect();
    let y: Vec<f64> = ratios.iter().map(|v| v.log2()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all levels coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
    })
}

/// Shape of the sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFamily {
    /// Independent complex Gaussian coefficients.
    #[default]
    Gaussian,
    /// All coefficients equal: the data focus at `x = 0`, a sharpness probe.
    Concentrated,
}

/// One level of the Strichartz check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRow {
    pub n: f64,
    pub m: f64,
    /// `max |U f|_{L^p_{t,x,xi}} / |f|_{L^2}` over the samples.
    pub lhs: f64,
    /// `max{1, M/N}^{1/p} N^e M^e` with `e = d/2 - (d+1)/p`.
    pub rhs: f64,
    pub ratio: f64,
}

fn in_ball(z: &[f64], r: f64) -> bool {
    z.iter().map(|c| c * c).sum::<f64>() <= r * r * (1.0 + 1e-12)
}

/// Data with `x`-frequencies `|k| <= N` and `xi`-frequencies `|v| <= M`, unit `L^2` norm.
pub fn strichartz_data(grid: SpectralGrid, n: f64, m: f64, family: DataFamily, seed: u64) -> PhaseField {
    let rng = RefCell::new(ChaCha8Rng::seed_from_u64(seed));
    let mut f = PhaseField::from_coord_fn(grid, Repr::KV, |k, v| {
        if !(in_ball(k, n) && in_ball(v, m)) {
            return C64::new(0.0, 0.0);
        }
        match family {
            DataFamily::Gaussian => {
                let mut rng = rng.borrow_mut();
                let a: f64 = StandardNormal.sample(&mut *rng);
                let b: f64 = StandardNormal.sample(&mut *rng);
                C64::new(a, b)
            }
            DataFamily::Concentrated => C64::new(1.0, 0.0),
        }
    });
    let nrm = f.l2_norm();
    if nrm > 0.0 {
        f = f.scaled(C64::new(1.0 / nrm, 0.0));
    }
    f
}

/// `|U(t) f|_{L^p([0,T] x x x xi)}` with the trapezoid rule on `time_samples` points.
pub fn lp_norm_streamed(f: &PhaseField, p: f64, t_end: f64, time_samples: usize) -> f64 {
    let kv = f.to(Repr::KV);
    let grid = *kv.grid();
    let n = time_samples.max(2);
    let dt = t_end / (n - 1) as f64;
    // e^{-i dt k.v}, raised to the i-th power by repeated multiplication
    let mut step = PhaseField::from_coord_fn(grid, Repr::KV, |k, v| {
        let kv: f64 = k.iter().zip(v).map(|(a, b)| a * b).sum();
        C64::from_polar(1.0, -dt * kv)
    });
    // skip points where the data vanish
    for (s, z) in step.data_mut().iter_mut().zip(kv.data()) {
        if *z == C64::new(0.0, 0.0) {
            *s = C64::new(1.0, 0.0);
        }
    }
    let half = p / 2.0;
    let pow = |z: &C64| {
        let a = z.norm_sqr();
        if half == 2.0 {
            a * a
        } else if half == 1.0 {
            a
        } else {
            a.powf(half)
        }
    };
    let mut cur = kv.clone();
    let mut total = 0.0;
    for i in 0..n {
        if i > 0 {
            for (c, s) in cur.data_mut().iter_mut().zip(step.data()) {
                *c *= s;
            }
        }
        let xi = cur.to(Repr::XXi);
        let s: f64 = xi.data().iter().map(pow).sum::<f64>() * xi.cell_measure();
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        total += w * dt * s;
    }
    total.powf(1.0 / p)
}

fn check_level(grid: &SpectralGrid, n: f64, m: f64) -> Result<()> {
    let k_lim = (grid.nx / 2 - 1) as f64 * grid.dk();
    let v_lim = grid.v_max - grid.dv();
    if !(n > 0.0 && n <= k_lim) {
        return Err(Error::Range(format!(
            "N = {n} outside (0, {k_lim}] for nx = {}",
            grid.nx
        )));
    }
    if !(m > 0.0 && m <= v_lim) {
        return Err(Error::Range(format!(
            "M = {m} outside (0, {v_lim}] for this velocity grid"
        )));
    }
    Ok(())
}

/// Largest `L^p_{t,x,xi} / L^2` quotient of the free evolution over `samples` draws.
#[allow(clippy::too_many_arguments)]
pub fn strichartz_ratio(
    grid: SpectralGrid,
    n: f64,
    m: f64,
    p: f64,
    t: f64,
    samples: usize,
    seed: u64,
    family: DataFamily,
    time_samples: usize,
) -> Result<StrichartzRow> {
    check_level(&grid, n, m)?;
    if !(p >= 2.0) || samples == 0 || !(t > 0.0) {
        return Err(Error::Config("need p >= 2, samples >= 1 and T > 0".into()));
    }
    let vals = map_indexed(samples, |i| {
        let f = strichartz_data(grid, n, m, family, substream_seed(seed, i as u64));
        lp_norm_streamed(&f, p, t, time_samples)
    });
    let lhs = vals.into_iter().fold(0.0, f64::max);
    let e = strichartz_exponent(grid.d, p);
    let rhs = (m / n).max(1.0).powf(1.0 / p) * n.powf(e) * m.powf(e);
    Ok(StrichartzRow {
        n,
        m,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Grid for level `N`: `nx = 4N` so `|U f|^4` is resolved, velocity grid as given.
pub fn strichartz_grid(d: usize, n: f64, nv: usize, v_max: f64) -> Result<SpectralGrid> {
    let nx = ((4.0 * n).ceil() as usize).next_power_of_two().max(4);
    SpectralGrid::torus(d, nx, nv, v_max)
}

/// Study of Strichartz growth in `N` at fixed `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzStudy {
    pub d: usize,
    pub p: f64,
    pub t: f64,
    pub m: f64,
    pub levels: Vec<f64>,
    pub nv: usize,
    pub v_max: f64,
    pub samples: usize,
    pub seed: u64,
    pub time_samples: usize,
    pub family: DataFamily,
    pub slack: f64,
}

/// Fit the growth of `max |U f|_{L^p} / |f|_{L^2}` in `N` and compare with `d/2 - (d+1)/p`.
///
/// The fitted slope is the exponent of the measured norm itself; the reported
/// ratios divide by the right-hand side, so `slope - theory` is their slope.
pub fn strichartz_study(study: &StrichartzStudy) -> Result<(EstimateReport, Vec<StrichartzRow>)> {
    let mut rows = Vec::with_capacity(study.levels.len());
    for (i, &n) in study.levels.iter().enumerate() {
        let grid = strichartz_grid(study.d, n, study.nv, study.v_max)?;
        rows.push(strichartz_ratio(
            grid,
            n,
            study.m,
            study.p,
            study.t,
            study.samples,
            substream_seed(study.seed, 1000 + i as u64),
            study.family,
            study.time_samples,
        )?);
    }
    let lhs: Vec<f64> = rows.iter().map(|r| r.lhs).collect();
    let fit = fit_exponent(&study.levels, &lhs)?;
    let theory = strichartz_exponent(study.d, study.p);
    let report = EstimateReport {
        estimate_id: "strichartz-separated".into(),
        params: EstimateParams {
            d: study.d,
            p: study.p,
            t: study.t,
            ..Default::default()
        },
        levels: rows.iter().map(|r| (r.n, r.m)).collect(),
        ratios: rows.iter().map(|r| r.ratio).collect(),
        fitted_slope: fit.slope,
        theory_slope: theory,
        slack: study.slack,
        verdict: if fit.slope <= theory + study.slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        samples: study.samples,
        seed: study.seed,
    };
    Ok((report, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BilinearCase {
    Loss,
    Gain,
    Full,
}

impl BilinearCase {
    fn id(self) -> &'static str {
        match self {
            BilinearCase::Loss => "bilinear-loss",
            BilinearCase::Gain => "bilinear-gain",
            BilinearCase::Full => "bilinear-full",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearParams {
    pub kernel: CollisionKernelSpec,
    pub route: Route,
    pub s: f64,
    pub s1: f64,
    pub r: f64,
    pub t: f64,
    /// Gauss-Legendre nodes for the `L^1_t` integral.
    pub time_nodes: usize,
    /// Spatial mode bound of the random data.
    pub kx: usize,
}

impl BilinearParams {
    fn validate(&self, d: usize) -> Result<()> {
        self.kernel.validate(d)?;
        if !(0.0..=self.s).contains(&self.s1) {
            return Err(Error::Config(format!("s1 = {} outside [0, s = {}]", self.s1, self.s)));
        }
        if !(self.t > 0.0 && self.time_nodes > 0) {
            return Err(Error::Config("need T > 0 and at least one time node".into()));
        }
        if !(self.r > d as f64 / 2.0 + self.kernel.gamma) {
            return Err(Error::Config(format!(
                "r = {} must exceed d/2 + gamma = {}",
                self.r,
                d as f64 / 2.0 + self.kernel.gamma
            )));
        }
        Ok(())
    }
}

fn q_case(f: &PhaseField, g: &PhaseField, p: &BilinearParams, case: BilinearCase) -> Result<PhaseField> {
    let one = |sign| match p.route {
        Route::Bobylev => q_bobylev(&f.to(Repr::XXi), &g.to(Repr::XXi), &p.kernel, sign),
        Route::Direct => q_direct(&f.to(Repr::XV), &g.to(Repr::XV), &p.kernel, sign),
    };
    Ok(match case {
        BilinearCase::Loss => one(Sign::Loss)?,
        BilinearCase::Gain => one(Sign::Gain)?,
        BilinearCase::Full => one(Sign::Gain)?.sub(&one(Sign::Loss)?),
    })
}

/// `|Q(U f, U g)|_{L^1_T H^{s1}_x H^r_xi}` and its mirror with `H^{s1}` on `g`.
fn bilinear_sides(f: &PhaseField, g: &PhaseField, p: &BilinearParams, case: BilinearCase) -> Result<[f64; 2]> {
    let (ts, ws) = gauss_legendre_on(p.time_nodes, 0.0, p.t);
    let mut lhs = 0.0;
    for (t, w) in ts.iter().zip(&ws) {
        let q = q_case(&propagate(f, *t), &propagate(g, *t), p, case)?;
        lhs += w * sobolev_norm(&q, p.s1, p.r);
    }
    let root = p.t.sqrt();
    let a = root * sobolev_norm(f, p.s1, p.r) * sobolev_norm(g, p.s, p.r);
    let b = root * sobolev_norm(f, p.s, p.r) * sobolev_norm(g, p.s1, p.r);
    let ratio = |den: f64| if den > 0.0 { lhs / den } else { 0.0 };
    Ok([ratio(a), ratio(b)])
}

/// Bilinear check on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearRow {
    pub nx: usize,
    pub nv: usize,
    /// Largest ratio over the random pairs.
    pub random_max: f64,
    /// Largest ratio over the frequency-concentrated pairs.
    pub adversarial_max: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

/// `x`-concentrated data `cos(N x_1) exp(-|v|^2 / 2)`.
fn level_field(grid: SpectralGrid, n: f64) -> PhaseField {
    PhaseField::from_xv_fn(grid, |x, v| {
        let w: f64 = v.iter().map(|c| c * c).sum();
        C64::new((n * x[0]).cos() * (-w / 2.0).exp(), 0.0)
    })
}

/// Largest measured ratio of the bilinear estimate over random and concentrated pairs.
pub fn bilinear_ratio(
    case: BilinearCase,
    params: &BilinearParams,
    grid: SpectralGrid,
    samples: usize,
    seed: u64,
) -> Result<BilinearRow> {
    params.validate(grid.d)?;
    let vals = map_indexed(samples, |i| -> Result<f64> {
        let sf = substream_seed(seed, 2 * i as u64);
        let sg = substream_seed(seed, 2 * i as u64 + 1);
        let f = random_band_limited(grid, sf, params.kx, params.s, params.r, 1.0)?;
        let g = random_band_limited(grid, sg, params.kx, params.s, params.r, 1.0)?;
        let [a, b] = bilinear_sides(&f, &g, params, case)?;
        Ok(a.max(b))
    });
    let mut random_max: f64 = 0.0;
    for v in vals {
        random_max = random_max.max(v?);
    }
    let mut adversarial_max: f64 = 0.0;
    let top = (grid.nx / 4).max(1) as f64 * grid.dk();
    let mut n = 1.0;
    while n <= top {
        let (hi, lo) = (level_field(grid, n), level_field(grid, 1.0));
        for (f, g) in [(&hi, &lo), (&lo, &hi), (&hi, &hi)] {
            let [a, b] = bilinear_sides(f, g, params, case)?;
            adversarial_max = adversarial_max.max(a.max(b));
        }
        n *= 2.0;
    }
    Ok(BilinearRow {
        nx: grid.nx,
        nv: grid.nv,
        random_max,
        adversarial_max,
        max_ratio: random_max.max(adversarial_max),
        samples,
    })
}

/// Run the bilinear check on successively refined grids.
///
/// The verdict asks that the largest ratio change by less than `2^slack` per
/// refinement; `fitted_slope` is the largest `|log2|` change observed.
pub fn bilinear_study(
    case: BilinearCase,
    params: &BilinearParams,
    grids: &[SpectralGrid],
    samples: usize,
    seed: u64,
    slack: f64,
) -> Result<(EstimateReport, Vec<BilinearRow>)> {
    if grids.len() < 2 {
        return Err(Error::InsufficientData("need at least two grids".into()));
    }
    let mut rows = Vec::with_capacity(grids.len());
    for g in grids {
        rows.push(bilinear_ratio(case, params, *g, samples, seed)?);
    }
    let change = rows
        .windows(2)
        .map(|w| (w[1].max_ratio / w[0].max_ratio).log2().abs())
        .fold(0.0, f64::max);
    let report = EstimateReport {
        estimate_id: case.id().into(),
        params: EstimateParams {
            d: grids[0].d,
            p: 2.0,
            s: params.s,
            s1: params.s1,
            r: params.r,
            gamma: params.kernel.gamma,
            t: params.t,
        },
        levels: grids.iter().map(|g| (g.nx as f64, g.nv as f64)).collect(),
        ratios: rows.iter().map(|r| r.max_ratio).collect(),
        fitted_slope: change,
        theory_slope: 0.0,
        slack,
        verdict: if change.is_finite() && change < slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        samples,
        seed,
    };
    Ok((report, rows))
}

/// `|Q~±(f, g)|_{L^2_x H^r_xi} / (|f|_{H^s_x H^r_xi} |g|_{H^s_x H^r_xi})`.
pub fn rough_term_ratio(
    f: &PhaseField,
    g: &PhaseField,
    s: f64,
    r: f64,
    kernel: &CollisionKernelSpec,
    sign: Sign,
) -> Result<f64> {
    let d = f.grid().d as f64;
    if s < d / 4.0 {
        return Err(Error::Config(format!("s = {s} below d/4 = {}", d / 4.0)));
    }
    if !(r > d / 2.0 + kernel.gamma) {
        return Err(Error::Config(format!("r = {r} must exceed d/2 + gamma")));
    }
    let den = sobolev_norm(f, s, r) * sobolev_norm(g, s, r);
    if den == 0.0 {
        return Ok(0.0);
    }
    let q = q_bobylev(&f.to(Repr::XXi), &g.to(Repr::XXi), kernel, sign)?;
    Ok(sobolev_norm(&q, 0.0, r) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::maxwellian;
    use proptest::prelude::*;

    #[test]
    fn endpoint_exponent_identity() {
        assert_eq!(p0_fraction(2), (4, 1));
        assert_eq!(p0_fraction(3), (10, 3));
        assert_eq!(strichartz_exponent_fraction(2, (4, 1)), (1, 4));
        assert_eq!(strichartz_exponent_fraction(3, (10, 3)), (3, 10));
        for d in 1..=3 {
            assert!(endpoint_identity_holds(d));
        }
        // comparable frequencies at d = 2, p = 4: N^{d - (2d+2)/p} = N^{1/2}
        assert_eq!(2.0 * strichartz_exponent(2, 4.0), 0.5);
    }

    #[test]
    fn fit_recovers_synthetic_slopes() {
        let n = [4.0, 8.0, 16.0, 32.0];
        let r: Vec<f64> = n.iter().map(|v: &f64| 3.0 * v.powf(0.5)).collect();
        let fit = fit_exponent(&n, &r).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.log2()).abs() < 1e-12);
        assert_eq!(fit_exponent(&n, &[2.0; 4]).unwrap().slope, 0.0);
        assert!(matches!(
            fit_exponent(&n[..2], &r[..2]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn single_spatial_mode_is_time_independent() {
        // k = 0 data do not move, so the norm is T^{1/p} times the static L^p norm
        let g = SpectralGrid::torus(2, 8, 8, 4.0).unwrap();
        let f = strichartz_data(g, 0.5, 1.0, DataFamily::Gaussian, 3);
        let xi = f.to(Repr::XXi);
        let stat: f64 = xi.data().iter().map(|z| z.norm().powi(4)).sum::<f64>() * xi.cell_measure();
        let lp = lp_norm_streamed(&f, 4.0, 0.7, 9);
        assert!((lp - (0.7 * stat).powf(0.25)).abs() < 1e-12 * lp);
    }

    #[test]
    fn streamed_norm_matches_the_stored_trajectory() {
        let g = SpectralGrid::torus(2, 8, 8, 4.0).unwrap();
        let f = strichartz_data(g, 2.0, 1.0, DataFamily::Gaussian, 4);
        for p in [3.0, 4.0] {
            let a = lp_norm_streamed(&f, p, 1.3, 17);
            let b = crate::spectral_core::propagated_lp_norm(&f, p, 1.3, 17);
            assert!((a - b).abs() < 1e-12 * b, "{a} {b}");
        }
    }

    #[test]
    fn strichartz_inputs() {
        let g = SpectralGrid::torus(2, 16, 8, 4.0).unwrap();
        assert!(strichartz_ratio(g, 32.0, 1.0, 4.0, 1.0, 1, 0, DataFamily::Gaussian, 9).is_err());
        assert!(strichartz_ratio(g, 4.0, 8.0, 4.0, 1.0, 1, 0, DataFamily::Gaussian, 9).is_err());
        let a = strichartz_ratio(g, 4.0, 1.0, 4.0, 1.0, 3, 5, DataFamily::Gaussian, 9).unwrap();
        let b = strichartz_ratio(g, 4.0, 1.0, 4.0, 1.0, 3, 5, DataFamily::Gaussian, 9).unwrap();
        assert_eq!(a, b);
        // more samples can only raise the maximum
        let c = strichartz_ratio(g, 4.0, 1.0, 4.0, 1.0, 6, 5, DataFamily::Gaussian, 9).unwrap();
        assert!(c.lhs >= a.lhs);
        assert!(a.lhs > 0.0 && a.rhs == 4f64.powf(0.25));
    }

    fn params() -> BilinearParams {
        BilinearParams {
            kernel: CollisionKernelSpec {
                n_sphere: 12,
                ..Default::default()
            },
            route: Route::Bobylev,
            s: 0.8,
            s1: 0.0,
            r: 1.3,
            t: 0.5,
            time_nodes: 2,
            kx: 1,
        }
    }

    #[test]
    fn bilinear_zero_data_and_bad_parameters() {
        let g = SpectralGrid::torus(2, 4, 8, 4.0).unwrap();
        let z = PhaseField::zeros(g, Repr::XV);
        let f = maxwellian(g, 1.0, &[], 1.0);
        assert_eq!(
            bilinear_sides(&z, &f, &params(), BilinearCase::Full).unwrap(),
            [0.0, 0.0]
        );
        let mut bad = params();
        bad.s1 = 1.0;
        assert!(bilinear_ratio(BilinearCase::Full, &bad, g, 1, 0).is_err());
        let mut bad = params();
        bad.r = 0.9;
        assert!(bilinear_ratio(BilinearCase::Full, &bad, g, 1, 0).is_err());
    }

    #[test]
    fn loss_term_of_a_spatially_uniform_pair() {
        // Q-(f, g) = ||b|| f (int g) for gamma = 0, and U leaves x-uniform data fixed
        let g = SpectralGrid::torus(2, 4, 16, 6.0).unwrap();
        let f = maxwellian(g, 1.0, &[0.5, 0.0], 0.8);
        let m = maxwellian(g, 2.0, &[], 1.0);
        let p = BilinearParams { s1: 0.8, ..params() };
        let [a, _] = bilinear_sides(&f, &m, &p, BilinearCase::Loss).unwrap();
        let mass = 2.0;
        let want = p.t * p.kernel.b_norm(2) * mass * sobolev_norm(&f, p.s1, p.r)
            / (p.t.sqrt() * sobolev_norm(&f, p.s1, p.r) * sobolev_norm(&m, p.s, p.r));
        assert!((a - want).abs() < 1e-6 * want, "{a} {want}");
    }

    #[test]
    fn rough_term_checks() {
        let g = SpectralGrid::torus(2, 4, 8, 4.0).unwrap();
        let k = CollisionKernelSpec {
            n_sphere: 12,
            ..Default::default()
        };
        let z = PhaseField::zeros(g, Repr::XV);
        let f = random_band_limited(g, 1, 1, 0.5, 1.3, 1.0).unwrap();
        assert_eq!(rough_term_ratio(&z, &f, 0.5, 1.3, &k, Sign::Gain).unwrap(), 0.0);
        assert!(rough_term_ratio(&f, &f, 0.4, 1.3, &k, Sign::Gain).is_err());
        assert!(rough_term_ratio(&f, &f, 0.5, 1.0, &k, Sign::Gain).is_err());
        let a = rough_term_ratio(&f, &f, 0.5, 1.3, &k, Sign::Gain).unwrap();
        let b = rough_term_ratio(&f.scaled(C64::new(3.0, 0.0)), &f, 0.5, 1.3, &k, Sign::Gain).unwrap();
        assert!(a > 0.0 && (a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn report_csv_has_one_row_per_level() {
        let r = EstimateReport {
            estimate_id: "strichartz-separated".into(),
            params: EstimateParams::default(),
            levels: vec![(4.0, 1.0), (8.0, 1.0)],
            ratios: vec![0.5, 0.25],
            fitted_slope: -1.0,
            theory_slope: 0.25,
            slack: 0.1,
            verdict: Verdict::Pass,
            samples: 1,
            seed: 0,
        };
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 3);
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "estimate_id",
            "params",
            "levels",
            "ratios",
            "fitted_slope",
            "theory_slope",
            "verdict",
            "samples",
            "seed",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn fit_is_exact_on_power_laws(c in 0.1f64..10.0, e in -2.0f64..2.0) {
            let n = [2.0, 4.0, 8.0, 16.0];
            let r: Vec<f64> = n.iter().map(|v: &f64| c * v.powf(e)).collect();
            let fit = fit_exponent(&n, &r).unwrap();
            prop_assert!((fit.slope - e).abs() < 1e-9);
            prop_assert!(fit.residual < 1e-9);
        }
    }
}
