//! Score distributions: a registry of density families fitted by maximum
//! likelihood, minimum-loss selection, seeded simulation and empirical
//! percentiles.
//!
//! Families without a closed-form or one-dimensional MLE are fitted with
//! Nelder-Mead on a standardized copy of the sample and mapped back, which
//! makes location-scale fits equivariant by construction.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, ChiSquared, Distribution, Exp, Gamma, InverseGaussian, LogNormal, Normal, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf_inv;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::roster::Position;

/// Fewer scores than this triggers the similar-player fallback and is
/// rejected by [`fit_best`].
pub const MIN_SAMPLE: usize = 4;
pub const DEFAULT_SIMULATIONS: usize = 1000;
pub const DEFAULT_DONORS: usize = 3;
pub const BAND: [f64; 2] = [0.15, 0.85];
pub const CURVE_POINTS: usize = 200;
const MAX_ITERATIONS: usize = 500;
const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Real,
    NonNegative,
    Positive,
}

impl Support {
    fn admits(self, x: f64) -> bool {
        match self {
            Support::Real => x.is_finite(),
            Support::NonNegative => x >= 0.0,
            Support::Positive => x > 0.0,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Support::Real => "real line",
            Support::NonNegative => "x >= 0",
            Support::Positive => "x > 0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Normal,
    Lognormal,
    Gamma,
    Weibull,
    Rayleigh,
    Exponential,
    Uniform,
    Logistic,
    Chi,
    Wald,
    VonMises,
    ScaledBeta,
}

/// Every shipped family, in selection tie-break order.
pub fn registry() -> Vec<Family> {
    use Family::*;
    vec![
        Normal, Lognormal, Gamma, Weibull, Rayleigh, Exponential, Uniform, Logistic, Chi, Wald, VonMises, ScaledBeta,
    ]
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Lognormal => "lognormal",
            Family::Gamma => "gamma",
            Family::Weibull => "weibull",
            Family::Rayleigh => "rayleigh",
            Family::Exponential => "exponential",
            Family::Uniform => "uniform",
            Family::Logistic => "logistic",
            Family::Chi => "chi",
            Family::Wald => "wald",
            Family::VonMises => "von_mises",
            Family::ScaledBeta => "scaled_beta",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Family::Normal => &["mu", "sigma"],
            Family::Lognormal => &["mu_log", "sigma_log"],
            Family::Gamma => &["shape", "scale"],
            Family::Weibull => &["shape", "scale"],
            Family::Rayleigh => &["sigma"],
            Family::Exponential => &["rate"],
            Family::Uniform => &["low", "high"],
            Family::Logistic => &["mu", "scale"],
            Family::Chi => &["df", "scale"],
            Family::Wald => &["mean", "shape"],
            Family::VonMises => &["loc", "kappa", "scale"],
            Family::ScaledBeta => &["alpha", "beta", "loc", "scale"],
        }
    }

    pub fn parameter_count(self) -> usize {
        self.parameter_names().len()
    }

    pub fn support(self) -> Support {
        match self {
            Family::Normal | Family::Uniform | Family::Logistic | Family::VonMises | Family::ScaledBeta => Support::Real,
            Family::Exponential => Support::NonNegative,
            Family::Lognormal | Family::Gamma | Family::Weibull | Family::Rayleigh | Family::Chi | Family::Wald => {
                Support::Positive
            }
        }
    }

    pub fn feasible(self, sample: &[f64]) -> bool {
        sample.iter().all(|x| self.support().admits(*x))
    }

    /// Log density; `-inf` outside the support implied by `params`.
    pub fn log_pdf(self, params: &[f64], x: f64) -> f64 {
        let ninf = f64::NEG_INFINITY;
        match self {
            Family::Normal => {
                let (mu, s) = (params[0], params[1]);
                -0.5 * ((x - mu) / s).powi(2) - s.ln() - 0.5 * (2.0 * PI).ln()
            }
            Family::Lognormal => {
                if x <= 0.0 {
                    return ninf;
                }
                let (mu, s) = (params[0], params[1]);
                let l = x.ln();
                -0.5 * ((l - mu) / s).powi(2) - s.ln() - l - 0.5 * (2.0 * PI).ln()
            }
            Family::Gamma => {
                if x <= 0.0 {
                    return ninf;
                }
                let (k, t) = (params[0], params[1]);
                (k - 1.0) * x.ln() - x / t - ln_gamma(k) - k * t.ln()
            }
            Family::Weibull => {
                if x < 0.0 {
                    return ninf;
                }
                let (k, l) = (params[0], params[1]);
                let z = x / l;
                k.ln() - l.ln() + (k - 1.0) * z.ln() - z.powf(k)
            }
            Family::Rayleigh => {
                if x < 0.0 {
                    return ninf;
                }
                let s = params[0];
                x.ln() - 2.0 * s.ln() - x * x / (2.0 * s * s)
            }
            Family::Exponential => {
                if x < 0.0 {
                    return ninf;
                }
                params[0].ln() - params[0] * x
            }
            Family::Uniform => {
                let (a, b) = (params[0], params[1]);
                if x < a || x > b {
                    ninf
                } else {
                    -(b - a).ln()
                }
            }
            Family::Logistic => {
                let (mu, s) = (params[0], params[1]);
                let z = (x - mu) / s;
                -z.abs() - s.ln() - 2.0 * (-z.abs()).exp().ln_1p()
            }
            Family::Chi => {
                if x <= 0.0 {
                    return ninf;
                }
                let (k, s) = (params[0], params[1]);
                (k - 1.0) * x.ln() - x * x / (2.0 * s * s) - (k / 2.0 - 1.0) * LN_2 - k * s.ln() - ln_gamma(k / 2.0)
            }
            Family::Wald => {
                if x <= 0.0 {
                    return ninf;
                }
                let (m, l) = (params[0], params[1]);
                0.5 * (l.ln() - (2.0 * PI).ln() - 3.0 * x.ln()) - l * (x - m).powi(2) / (2.0 * m * m * x)
            }
            Family::VonMises => {
                let (loc, kappa, s) = (params[0], params[1], params[2]);
                let theta = (x - loc) / s;
                if theta.abs() > PI {
                    return ninf;
                }
                kappa * theta.cos() - (2.0 * PI * s).ln() - ln_bessel_i0(kappa)
            }
            Family::ScaledBeta => {
                let (a, b, loc, s) = (params[0], params[1], params[2], params[3]);
                let u = (x - loc) / s;
                if u <= 0.0 || u >= 1.0 {
                    return ninf;
                }
                (a - 1.0) * u.ln() + (b - 1.0) * (-u).ln_1p() - ln_beta(a, b) - s.ln()
            }
        }
    }

    pub fn pdf(self, params: &[f64], x: f64) -> f64 {
        self.log_pdf(params, x).exp()
    }

    /// Closed-form quantile where one exists.
    pub fn quantile(self, params: &[f64], p: f64) -> Option<f64> {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return None;
        }
        match self {
            Family::Normal => Some(params[0] + params[1] * std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0)),
            Family::Lognormal => Some((params[0] + params[1] * std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0)).exp()),
            Family::Weibull => Some(params[1] * (-(-p).ln_1p()).powf(1.0 / params[0])),
            Family::Rayleigh => Some(params[0] * (-2.0 * (-p).ln_1p()).sqrt()),
            Family::Exponential => Some(-(-p).ln_1p() / params[0]),
            Family::Uniform => Some(params[0] + p * (params[1] - params[0])),
            Family::Logistic => Some(params[0] + params[1] * (p / (1.0 - p)).ln()),
            _ => None,
        }
    }

    pub fn sample(self, params: &[f64], rng: &mut impl Rng) -> f64 {
        match self {
            Family::Normal => Normal::new(params[0], params[1]).expect("valid normal").sample(rng),
            Family::Lognormal => LogNormal::new(params[0], params[1]).expect("valid lognormal").sample(rng),
            Family::Gamma => Gamma::new(params[0], params[1]).expect("valid gamma").sample(rng),
            Family::Weibull => Weibull::new(params[1], params[0]).expect("valid weibull").sample(rng),
            Family::Rayleigh => {
                let u: f64 = rng.random();
                params[0] * (-2.0 * (-u).ln_1p()).sqrt()
            }
            Family::Exponential => Exp::new(params[0]).expect("valid exponential").sample(rng),
            Family::Uniform => {
                let u: f64 = rng.random();
                params[0] + u * (params[1] - params[0])
            }
            Family::Logistic => {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                params[0] + params[1] * (u / (1.0 - u)).ln()
            }
            Family::Chi => params[1] * ChiSquared::new(params[0]).expect("valid chi").sample(rng).sqrt(),
            Family::Wald => InverseGaussian::new(params[0], params[1]).expect("valid wald").sample(rng),
            Family::VonMises => params[0] + params[2] * sample_von_mises(params[1], rng),
            Family::ScaledBeta => {
                let u: f64 = Beta::new(params[0], params[1]).expect("valid beta").sample(rng);
                params[2] + params[3] * u
            }
        }
    }

    fn params_valid(self, p: &[f64]) -> bool {
        if p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Family::Normal | Family::Lognormal | Family::Logistic => p[1] > 0.0,
            Family::Gamma | Family::Weibull | Family::Chi | Family::Wald => p[0] > 0.0 && p[1] > 0.0,
            Family::Rayleigh | Family::Exponential => p[0] > 0.0,
            Family::Uniform => p[1] > p[0],
            Family::VonMises => p[1] >= 0.0 && p[2] > 0.0,
            Family::ScaledBeta => p[0] > 0.0 && p[1] > 0.0 && p[3] > 0.0,
        }
    }

    fn nll(self, params: &[f64], sample: &[f64]) -> f64 {
        if !self.params_valid(params) {
            return f64::INFINITY;
        }
        -sample.iter().map(|x| self.log_pdf(params, *x)).sum::<f64>()
    }

    /// Maximum-likelihood parameters and whether the fit converged.
    fn fit_params(self, x: &[f64]) -> (Vec<f64>, bool) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        match self {
            Family::Normal => (vec![mean, sd], true),
            Family::Lognormal => {
                let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
                let m = logs.iter().sum::<f64>() / n;
                let s = (logs.iter().map(|l| (l - m).powi(2)).sum::<f64>() / n).sqrt();
                (vec![m, s], true)
            }
            Family::Gamma => {
                let s = mean.ln() - x.iter().map(|v| v.ln()).sum::<f64>() / n;
                // ln k − ψ(k) decreases from +inf to 0; solve in log space.
                let k = bisect(|lk| {
                    let k = lk.exp();
                    k.ln() - digamma(k) - s
                }, -20.0, 20.0)
                .map(f64::exp);
                match k {
                    Some(k) => (vec![k, mean / k], true),
                    None => (vec![1.0, mean], false),
                }
            }
            Family::Weibull => {
                let top = x.iter().cloned().fold(f64::MIN, f64::max);
                let y: Vec<f64> = x.iter().map(|v| v / top).collect();
                let mean_log = y.iter().map(|v| v.ln()).sum::<f64>() / n;
                let k = bisect(|lk| {
                    let k = lk.exp();
                    let (mut a, mut b) = (0.0, 0.0);
                    for v in &y {
                        let p = v.powf(k);
                        a += p * v.ln();
                        b += p;
                    }
                    a / b - 1.0 / k - mean_log
                }, -10.0, 10.0)
                .map(f64::exp);
                match k {
                    Some(k) => {
                        let lambda = top * (y.iter().map(|v| v.powf(k)).sum::<f64>() / n).powf(1.0 / k);
                        (vec![k, lambda], true)
                    }
                    None => (vec![1.0, mean], false),
                }
            }
            Family::Rayleigh => (vec![(x.iter().map(|v| v * v).sum::<f64>() / (2.0 * n)).sqrt()], true),
            Family::Exponential => (vec![1.0 / mean], mean > 0.0),
            Family::Uniform => {
                let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (vec![lo, hi], true)
            }
            Family::Wald => {
                let inv = x.iter().map(|v| 1.0 / v - 1.0 / mean).sum::<f64>() / n;
                (vec![mean, 1.0 / inv], inv > 0.0)
            }
            Family::Logistic => {
                let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
                let (p, ok) = nelder_mead(
                    |p| self.nll(&[p[0], p[1].exp()], &z),
                    &[0.0, (3f64.sqrt() / PI).ln()],
                    0.1,
                );
                (vec![mean + sd * p[0], sd * p[1].exp()], ok)
            }
            Family::Chi => {
                let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
                let z: Vec<f64> = x.iter().map(|v| v / rms).collect();
                // mean/rms of a chi variable grows with df; match it for a start.
                let ratio = mean / rms;
                let k0 = bisect(|lk| chi_mean_over_rms(lk.exp()) - ratio, -5.0, 8.0).map_or(1.0, f64::exp);
                let (p, ok) = nelder_mead(
                    |p| self.nll(&[p[0].exp(), p[1].exp()], &z),
                    &[k0.ln(), (1.0 / k0).sqrt().ln()],
                    0.1,
                );
                (vec![p[0].exp(), rms * p[1].exp()], ok)
            }
            Family::VonMises => {
                let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
                let half_range = ((hi - mean).max(mean - lo) / sd) * 1.05;
                let s0 = half_range / PI;
                let kappa0 = (s0 * s0).max(0.05);
                let (p, ok) = nelder_mead(
                    |p| self.nll(&[p[0], p[1].exp(), p[2].exp()], &z),
                    &[0.0, kappa0.ln(), s0.ln()],
                    0.1,
                );
                (vec![mean + sd * p[0], p[1].exp(), sd * p[2].exp()], ok)
            }
            Family::ScaledBeta => {
                let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let pad = 0.05 * (hi - lo);
                let (loc, scale) = (lo - pad, hi - lo + 2.0 * pad);
                let u: Vec<f64> = x.iter().map(|v| (v - loc) / scale).collect();
                let m = u.iter().sum::<f64>() / n;
                let v = u.iter().map(|w| (w - m).powi(2)).sum::<f64>() / n;
                let common = (m * (1.0 - m) / v - 1.0).max(0.5);
                let (p, ok) = nelder_mead(
                    |p| self.nll(&[p[0].exp(), p[1].exp(), 0.0, 1.0], &u),
                    &[(m * common).ln(), ((1.0 - m) * common).ln()],
                    0.1,
                );
                (vec![p[0].exp(), p[1].exp(), loc, scale], ok)
            }
        }
    }

    /// Fits the family by maximum likelihood. Returns `None` when the sample
    /// lies outside the family's support.
    pub fn fit(self, sample: &[f64]) -> Option<FitResult> {
        if !self.feasible(sample) {
            return None;
        }
        let (params, converged) = self.fit_params(sample);
        let loss = self.nll(&params, sample);
        Some(FitResult {
            family: self,
            params,
            loss,
            converged: converged && loss.is_finite(),
            n: sample.len(),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        registry()
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown distribution family {s:?}")))
    }
}

fn chi_mean_over_rms(k: f64) -> f64 {
    (LN_2 / 2.0 + ln_gamma((k + 1.0) / 2.0) - ln_gamma(k / 2.0)).exp() / k.sqrt()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln I₀(κ)`: power series below 30, asymptotic expansion above.
pub fn ln_bessel_i0(kappa: f64) -> f64 {
    let k = kappa.abs();
    if k < 30.0 {
        let q = k * k / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..200 {
            term *= q / (j as f64 * j as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum.ln()
    } else {
        let t = 1.0 / (8.0 * k);
        let series = 1.0 + t + 9.0 / 2.0 * t * t + 225.0 / 6.0 * t.powi(3) + 11025.0 / 24.0 * t.powi(4);
        k - 0.5 * (2.0 * PI * k).ln() + series.ln()
    }
}

/// Best-Fisher rejection sampler for the standard von Mises angle on
/// `[−π, π]`.
fn sample_von_mises(kappa: f64, rng: &mut impl Rng) -> f64 {
    if kappa < 1e-8 {
        return rng.random_range(-PI..PI);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = ((1.0 + r * z) / (r + z)).clamp(-1.0, 1.0);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.acos();
            return if u3 > 0.5 { theta } else { -theta };
        }
    }
}

/// Root of an increasing or decreasing function on `[lo, hi]` by bisection,
/// or `None` when the endpoints do not bracket a sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Nelder-Mead simplex minimization, at most 500 iterations. Converged when
/// the spread of simplex values falls below `1e-8 · max(1, |f_best|)`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64) -> (Vec<f64>, bool) {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += if p[i] == 0.0 { step } else { step * p[i].abs().max(1.0) };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let (best, worst) = (values[0], values[n]);
        if best.is_finite() && worst - best <= TOLERANCE * best.abs().max(1.0) {
            return (simplex.swap_remove(0), true);
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    simplex[i] = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex.swap_remove(best), false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub params: Vec<f64>,
    /// Negative log-likelihood on the fitted sample.
    pub loss: f64,
    pub converged: bool,
    pub n: usize,
}

impl FitResult {
    pub fn log_pdf(&self, x: f64) -> f64 {
        self.family.log_pdf(&self.params, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub best: FitResult,
    /// Every feasible family's fit, converged or not, in registry order.
    pub candidates: Vec<FitResult>,
}

fn check_sample(sample: &[f64], min: usize) -> Result<()> {
    if sample.len() < min.max(1) {
        return Err(Error::invalid(format!("need at least {min} scores, got {}", sample.len())));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    if sample.iter().all(|v| *v == sample[0]) {
        return Err(Error::DegenerateSample(sample.len()));
    }
    Ok(())
}

/// Fits every feasible registry family and keeps the converged fit with the
/// smallest loss (earlier registry entries win exact ties).
pub fn fit_best(sample: &[f64], families: &[Family], min_sample: usize) -> Result<Selection> {
    check_sample(sample, min_sample)?;
    let candidates: Vec<FitResult> = families.iter().filter_map(|f| f.fit(sample)).collect();
    let best = candidates
        .iter()
        .filter(|c| c.converged)
        .fold(None::<&FitResult>, |acc, c| match acc {
            Some(a) if a.loss <= c.loss => Some(a),
            _ => Some(c),
        })
        .cloned()
        .ok_or(Error::Unfittable)?;
    Ok(Selection { best, candidates })
}

/// `n` independent draws from a converged fit.
pub fn simulate(fit: &FitResult, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !fit.converged {
        return Err(Error::NotConverged(fit.family.name().into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| fit.family.sample(&fit.params, &mut rng)).collect())
}

/// Linear-interpolation empirical quantiles at index `p · (n − 1)` of the
/// sorted sample.
pub fn percentiles(samples: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample("no samples for percentiles".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    probs
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("percentile {p} outside [0, 1]")));
            }
            let h = p * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
        })
        .collect()
}

/// 200 evenly spaced `(x, pdf(x))` points over
/// `[min − σ̂, max + σ̂]`, with `σ̂` the sample's population deviation.
pub fn curve(fit: &FitResult, sample: &[f64], points: usize) -> Result<Vec<(f64, f64)>> {
    if sample.is_empty() {
        return Err(Error::EmptySample("no sample for curve range".into()));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let sd = (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min) - sd;
    let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + sd;
    let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
    Ok((0..points)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, fit.family.pdf(&fit.params, x))
        })
        .collect())
}

/// A player's score history with the mean projection used to find similar
/// players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreHistory {
    pub player_id: String,
    pub position: Position,
    pub mean_projection: f64,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorSample {
    pub donors: Vec<String>,
    pub values: Vec<f64>,
    /// Set when no same-position player was available.
    pub cross_position: bool,
}

/// The `k` players nearest in mean projection, same position first; their
/// raw scores are concatenated in donor order.
pub fn similar_players(player: &ScoreHistory, pool: &[ScoreHistory], k: usize) -> Result<DonorSample> {
    let others: Vec<&ScoreHistory> = pool.iter().filter(|p| p.player_id != player.player_id).collect();
    if others.is_empty() {
        return Err(Error::EmptySample(format!("no donor pool for {}", player.player_id)));
    }
    let same: Vec<&ScoreHistory> = others.iter().copied().filter(|p| p.position == player.position).collect();
    let cross_position = same.is_empty();
    let mut ranked = if cross_position { others } else { same };
    ranked.sort_by(|a, b| {
        let da = (a.mean_projection - player.mean_projection).abs();
        let db = (b.mean_projection - player.mean_projection).abs();
        da.total_cmp(&db).then_with(|| a.player_id.cmp(&b.player_id))
    });
    ranked.truncate(k);
    Ok(DonorSample {
        donors: ranked.iter().map(|p| p.player_id.clone()).collect(),
        values: ranked.iter().flat_map(|p| p.scores.iter().copied()).collect(),
        cross_position,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub player_id: String,
    pub values: Vec<f64>,
    pub donors: Vec<String>,
    pub cross_position: bool,
}

/// History and projections with equal weight; players with fewer than
/// `min_history` scores borrow the scores of `k` donors.
pub fn score_sample(
    player: &ScoreHistory,
    projections: &[f64],
    pool: &[ScoreHistory],
    min_history: usize,
    k: usize,
) -> Result<ScoreSample> {
    let mut values: Vec<f64> = player.scores.iter().chain(projections).copied().collect();
    let mut donors = Vec::new();
    let mut cross_position = false;
    if player.scores.len() < min_history {
        let d = similar_players(player, pool, k)?;
        values.extend(d.values);
        donors = d.donors;
        cross_position = d.cross_position;
    }
    Ok(ScoreSample {
        player_id: player.player_id.clone(),
        values,
        donors,
        cross_position,
    })
}

pub fn format_fit_record(player_id: &str, fit: &FitResult, p15: f64, p85: f64) -> String {
    let params: Vec<String> = fit.params.iter().map(|p| p.to_string()).collect();
    format!("{player_id},{},{},{},{p15},{p85}", fit.family, params.join(","), fit.loss)
}
