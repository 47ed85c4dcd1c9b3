//! Base-family formulas.
//!
//! Everything here works on the *unrotated* family; rotations are applied
//! by the argument substitutions in [`super::PairCopula`]. All base
//! families are exchangeable, so one h-function per family serves both
//! conditioning directions. Heavy-tailed expressions are evaluated in log
//! space so parameter caps near the domain edges stay finite.
//!
//! Formula sources: Joe, *Dependence Modeling with Copulas* (2014) and
//! Czado, *Analyzing Dependent Data with Vine Copulas* (2019).

use crate::numeric::special::{
    bvn_cdf, bvt_cdf, debye1, norm_cdf, norm_quantile, t_cdf, t_quantile,
};
use crate::numeric::{adaptive_simpson, brent_root};

use super::{BaseFamily, CopulaError, FamilyId, EPS_U};

/// Parameter caps. Beyond these the likelihood is numerically flat.
pub(crate) const RHO_MAX: f64 = 0.999_95;
pub(crate) const NU_MIN: f64 = 2.000_1;
pub(crate) const NU_MAX: f64 = 30.0;
pub(crate) const FRANK_MAX: f64 = 35.0;
pub(crate) const CLAYTON_MAX: f64 = 28.0;
pub(crate) const GUMBEL_MAX: f64 = 17.0;
pub(crate) const JOE_MAX: f64 = 30.0;
pub(crate) const BB_MAX: f64 = 7.0;

/// ln(1 + e^a) without overflow.
fn log1pexp(a: f64) -> f64 {
    if a > 36.0 {
        a
    } else {
        a.exp().ln_1p()
    }
}

/// ln(e^z − 1) for z > 0 without overflow.
fn lnexpm1(z: f64) -> f64 {
    if z > 36.0 {
        z
    } else {
        z.exp_m1().ln()
    }
}

/// ln(e^a + e^b − e^d) for d ≤ min(a,b) + O(1), stable against overflow.
fn log_e_sum(a: f64, b: f64, d: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp() - (d - m).exp()).ln()
}

/// ln(1 − e^x) for x < 0, split at −ln 2 so both the e^x → 1 and the
/// e^x → 0 regimes keep full relative precision.
fn log1mexp(x: f64) -> f64 {
    if x < -std::f64::consts::LN_2 {
        (-x.exp()).ln_1p()
    } else {
        (-x.exp_m1()).ln()
    }
}

pub(crate) fn validate_params(family: FamilyId, p: &[f64]) -> Result<(), CopulaError> {
    let err = |detail: String| CopulaError::InvalidParam { family, detail };
    let need = family.base().n_params();
    if p.len() != need {
        return Err(err(format!("expected {need} parameters, got {}", p.len())));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(err("non-finite parameter".into()));
    }
    match family.base() {
        BaseFamily::Independence => Ok(()),
        BaseFamily::Gaussian => {
            if p[0].abs() > RHO_MAX {
                Err(err(format!("rho {} outside (-{RHO_MAX}, {RHO_MAX})", p[0])))
            } else {
                Ok(())
            }
        }
        BaseFamily::StudentT => {
            if p[0].abs() > RHO_MAX {
                Err(err(format!("rho {} outside (-{RHO_MAX}, {RHO_MAX})", p[0])))
            } else if p[1] <= 2.0 || p[1] > NU_MAX {
                Err(err(format!("nu {} outside (2, {NU_MAX}]", p[1])))
            } else {
                Ok(())
            }
        }
        BaseFamily::Frank => {
            if p[0] == 0.0 || p[0].abs() > FRANK_MAX {
                Err(err(format!("theta {} outside [-{FRANK_MAX}, {FRANK_MAX}] \\ {{0}}", p[0])))
            } else {
                Ok(())
            }
        }
        BaseFamily::Clayton => {
            if p[0] <= 0.0 || p[0] > CLAYTON_MAX {
                Err(err(format!("theta {} outside (0, {CLAYTON_MAX}]", p[0])))
            } else {
                Ok(())
            }
        }
        BaseFamily::Gumbel => {
            if p[0] < 1.0 || p[0] > GUMBEL_MAX {
                Err(err(format!("theta {} outside [1, {GUMBEL_MAX}]", p[0])))
            } else {
                Ok(())
            }
        }
        BaseFamily::Joe => {
            if p[0] < 1.0 || p[0] > JOE_MAX {
                Err(err(format!("theta {} outside [1, {JOE_MAX}]", p[0])))
            } else {
                Ok(())
            }
        }
        BaseFamily::BB1 => {
            if p[0] <= 0.0 || p[0] > BB_MAX {
                Err(err(format!("theta {} outside (0, {BB_MAX}]", p[0])))
            } else if p[1] < 1.0 || p[1] > BB_MAX {
                Err(err(format!("delta {} outside [1, {BB_MAX}]", p[1])))
            } else {
                Ok(())
            }
        }
        BaseFamily::BB7 => {
            if p[0] < 1.0 || p[0] > BB_MAX {
                Err(err(format!("theta {} outside [1, {BB_MAX}]", p[0])))
            } else if p[1] <= 0.0 || p[1] > BB_MAX {
                Err(err(format!("delta {} outside (0, {BB_MAX}]", p[1])))
            } else {
                Ok(())
            }
        }
        BaseFamily::BB8 => {
            if p[0] < 1.0 || p[0] > BB_MAX {
                Err(err(format!("theta {} outside [1, {BB_MAX}]", p[0])))
            } else if p[1] <= 0.0 || p[1] > 1.0 {
                Err(err(format!("delta {} outside (0, 1]", p[1])))
            } else {
                Ok(())
            }
        }
    }
}

pub(crate) fn base_density(base: BaseFamily, p: &[f64], u: f64, v: f64) -> f64 {
    match base {
        BaseFamily::Independence => 1.0,
        BaseFamily::Gaussian => gaussian_density(p[0], u, v),
        BaseFamily::StudentT => studentt_density(p[0], p[1], u, v),
        BaseFamily::Frank => frank_density(p[0], u, v),
        BaseFamily::Clayton => clayton_density(p[0], u, v),
        BaseFamily::Gumbel => gumbel_density(p[0], u, v),
        BaseFamily::Joe => joe_density(p[0], u, v),
        BaseFamily::BB1 => bb1_density(p[0], p[1], u, v),
        BaseFamily::BB7 => bb7_density(p[0], p[1], u, v),
        BaseFamily::BB8 => bb8_density(p[0], p[1], u, v),
    }
}

pub(crate) fn base_cdf(base: BaseFamily, p: &[f64], u: f64, v: f64) -> f64 {
    match base {
        BaseFamily::Independence => u * v,
        BaseFamily::Gaussian => bvn_cdf(norm_quantile(u), norm_quantile(v), p[0]),
        BaseFamily::StudentT => bvt_cdf(t_quantile(u, p[1]), t_quantile(v, p[1]), p[0], p[1]),
        BaseFamily::Frank => frank_cdf(p[0], u, v),
        BaseFamily::Clayton => clayton_cdf(p[0], u, v),
        BaseFamily::Gumbel => gumbel_cdf(p[0], u, v),
        BaseFamily::Joe => joe_cdf(p[0], u, v),
        BaseFamily::BB1 => bb1_cdf(p[0], p[1], u, v),
        BaseFamily::BB7 => bb7_cdf(p[0], p[1], u, v),
        BaseFamily::BB8 => bb8_cdf(p[0], p[1], u, v),
    }
}

/// h(t | c) = ∂C(c, t)/∂c for the exchangeable base family.
pub(crate) fn base_h(base: BaseFamily, p: &[f64], t: f64, c: f64) -> f64 {
    match base {
        BaseFamily::Independence => t,
        BaseFamily::Gaussian => gaussian_h(p[0], t, c),
        BaseFamily::StudentT => studentt_h(p[0], p[1], t, c),
        BaseFamily::Frank => frank_h(p[0], t, c),
        BaseFamily::Clayton => clayton_h(p[0], t, c),
        BaseFamily::Gumbel => gumbel_h(p[0], t, c),
        BaseFamily::Joe => joe_h(p[0], t, c),
        BaseFamily::BB1 => bb1_h(p[0], p[1], t, c),
        BaseFamily::BB7 => bb7_h(p[0], p[1], t, c),
        BaseFamily::BB8 => bb8_h(p[0], p[1], t, c),
    }
}

/// Inverse of [`base_h`] in `t` for fixed conditioning value `c`.
pub(crate) fn base_hinv(base: BaseFamily, p: &[f64], prob: f64, c: f64) -> f64 {
    match base {
        BaseFamily::Independence => prob,
        BaseFamily::Gaussian => gaussian_hinv(p[0], prob, c),
        BaseFamily::StudentT => studentt_hinv(p[0], p[1], prob, c),
        BaseFamily::Frank => frank_hinv(p[0], prob, c),
        BaseFamily::Clayton => clayton_hinv(p[0], prob, c),
        _ => hinv_numeric(base, p, prob, c),
    }
}

pub(crate) fn base_tau(base: BaseFamily, p: &[f64]) -> f64 {
    match base {
        BaseFamily::Independence => 0.0,
        BaseFamily::Gaussian | BaseFamily::StudentT => {
            (2.0 / std::f64::consts::PI) * p[0].asin()
        }
        BaseFamily::Frank => frank_tau(p[0]),
        BaseFamily::Clayton => p[0] / (p[0] + 2.0),
        BaseFamily::Gumbel => 1.0 - 1.0 / p[0],
        BaseFamily::Joe => joe_tau(p[0]),
        BaseFamily::BB1 => archimedean_tau(&mut |t| -(t - t.powf(p[0] + 1.0)) / (p[0] * p[1])),
        BaseFamily::BB7 => bb7_tau(p[0], p[1]),
        BaseFamily::BB8 => bb8_tau(p[0], p[1]),
    }
}

pub(crate) fn base_lambda_lower(base: BaseFamily, p: &[f64]) -> f64 {
    match base {
        BaseFamily::StudentT => {
            let (rho, nu) = (p[0], p[1]);
            2.0 * t_cdf(-((nu + 1.0) * (1.0 - rho) / (1.0 + rho)).sqrt(), nu + 1.0)
        }
        BaseFamily::Clayton => (-std::f64::consts::LN_2 / p[0]).exp(),
        BaseFamily::BB1 => (-std::f64::consts::LN_2 / (p[0] * p[1])).exp(),
        BaseFamily::BB7 => (-std::f64::consts::LN_2 / p[1]).exp(),
        _ => 0.0,
    }
}

pub(crate) fn base_lambda_upper(base: BaseFamily, p: &[f64]) -> f64 {
    match base {
        BaseFamily::StudentT => base_lambda_lower(base, p),
        BaseFamily::Gumbel | BaseFamily::Joe => 2.0 - (std::f64::consts::LN_2 / p[0]).exp(),
        BaseFamily::BB1 => 2.0 - (std::f64::consts::LN_2 / p[1]).exp(),
        BaseFamily::BB7 => 2.0 - (std::f64::consts::LN_2 / p[0]).exp(),
        // BB8 degenerates to Joe at δ = 1; for δ < 1 the upper tail is
        // asymptotically independent.
        BaseFamily::BB8 => {
            if p[1] == 1.0 {
                2.0 - (std::f64::consts::LN_2 / p[0]).exp()
            } else {
                0.0
            }
        }
        _ => 0.0,
    }
}

/// Monotone bisection/Brent fallback for families without a closed-form
/// inverse h-function.
fn hinv_numeric(base: BaseFamily, p: &[f64], prob: f64, c: f64) -> f64 {
    let lo = 1e-12;
    let hi = 1.0 - 1e-12;
    let mut f = |t: f64| base_h(base, p, t, c) - prob;
    if f(lo) >= 0.0 {
        return EPS_U;
    }
    if f(hi) <= 0.0 {
        return 1.0 - EPS_U;
    }
    brent_root(&mut f, lo, hi, 1e-13).unwrap_or(prob).clamp(EPS_U, 1.0 - EPS_U)
}

// ---------------------------------------------------------------- Gaussian

fn gaussian_density(rho: f64, u: f64, v: f64) -> f64 {
    if rho == 0.0 {
        return 1.0;
    }
    let x = norm_quantile(u);
    let y = norm_quantile(v);
    let r2 = 1.0 - rho * rho;
    let expo = -(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2);
    expo.exp() / r2.sqrt()
}

fn gaussian_h(rho: f64, t: f64, c: f64) -> f64 {
    let x = norm_quantile(t);
    let y = norm_quantile(c);
    norm_cdf((x - rho * y) / (1.0 - rho * rho).sqrt())
}

fn gaussian_hinv(rho: f64, prob: f64, c: f64) -> f64 {
    let z = norm_quantile(prob) * (1.0 - rho * rho).sqrt() + rho * norm_quantile(c);
    norm_cdf(z)
}

// --------------------------------------------------------------- Student-t

fn studentt_density(rho: f64, nu: f64, u: f64, v: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let x = t_quantile(u, nu);
    let y = t_quantile(v, nu);
    let r2 = 1.0 - rho * rho;
    let q = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2);
    let ln_c = ln_gamma(0.5 * (nu + 2.0)) + ln_gamma(0.5 * nu)
        - 2.0 * ln_gamma(0.5 * (nu + 1.0))
        - 0.5 * r2.ln()
        - 0.5 * (nu + 2.0) * q.ln_1p()
        + 0.5 * (nu + 1.0) * ((x * x / nu).ln_1p() + (y * y / nu).ln_1p());
    ln_c.exp()
}

fn studentt_h(rho: f64, nu: f64, t: f64, c: f64) -> f64 {
    let x = t_quantile(t, nu);
    let y = t_quantile(c, nu);
    let scale = ((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
    t_cdf((x - rho * y) / scale, nu + 1.0)
}

fn studentt_hinv(rho: f64, nu: f64, prob: f64, c: f64) -> f64 {
    let y = t_quantile(c, nu);
    let scale = ((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
    let x = rho * y + t_quantile(prob, nu + 1.0) * scale;
    t_cdf(x, nu)
}

// ------------------------------------------------------------------- Frank

/// Shared pieces: x = e^{−θu}, with 1−x computed through expm1.
fn frank_density(theta: f64, u: f64, v: f64) -> f64 {
    let omx = -(-theta * u).exp_m1(); // 1 − e^{−θu}
    let omy = -(-theta * v).exp_m1();
    let omq = -(-theta).exp_m1(); // 1 − e^{−θ}
    let d = omq - omx * omy;
    theta * omq * (-theta * (u + v)).exp() / (d * d)
}

fn frank_cdf(theta: f64, u: f64, v: f64) -> f64 {
    let omx = -(-theta * u).exp_m1();
    let omy = -(-theta * v).exp_m1();
    let omq = -(-theta).exp_m1();
    -(-omx * omy / omq).ln_1p() / theta
}

fn frank_h(theta: f64, t: f64, c: f64) -> f64 {
    let omx = -(-theta * t).exp_m1();
    let omy = -(-theta * c).exp_m1();
    let omq = -(-theta).exp_m1();
    let y = (-theta * c).exp();
    y * omx / (omq - omx * omy)
}

fn frank_hinv(theta: f64, prob: f64, c: f64) -> f64 {
    let omy = -(-theta * c).exp_m1();
    let omq = -(-theta).exp_m1();
    let y = (-theta * c).exp();
    // Solve p = y(1−x)/(omq − (1−x)(1−y)) for 1−x: (1−x) = p·omq/(y + p·omy).
    let omx = prob * omq / (y + prob * omy);
    (-(-omx).ln_1p() / theta).clamp(EPS_U, 1.0 - EPS_U)
}

fn frank_tau(theta: f64) -> f64 {
    let a = theta.abs();
    let t = 1.0 - 4.0 / a + 4.0 * debye1(a) / a;
    if theta < 0.0 {
        -t
    } else {
        t
    }
}

// ----------------------------------------------------------------- Clayton

fn clayton_ln_s(theta: f64, u: f64, v: f64) -> f64 {
    // ln(u^{−θ} + v^{−θ} − 1)
    log_e_sum(-theta * u.ln(), -theta * v.ln(), 0.0)
}

fn clayton_density(theta: f64, u: f64, v: f64) -> f64 {
    let ln_s = clayton_ln_s(theta, u, v);
    ((1.0 + theta).ln() - (theta + 1.0) * (u.ln() + v.ln()) - (1.0 / theta + 2.0) * ln_s).exp()
}

fn clayton_cdf(theta: f64, u: f64, v: f64) -> f64 {
    (-clayton_ln_s(theta, u, v) / theta).exp()
}

fn clayton_h(theta: f64, t: f64, c: f64) -> f64 {
    let ln_s = clayton_ln_s(theta, t, c);
    (-(theta + 1.0) * c.ln() - (1.0 / theta + 1.0) * ln_s).exp()
}

fn clayton_hinv(theta: f64, prob: f64, c: f64) -> f64 {
    // u = [ (p·c^{θ+1})^{−θ/(θ+1)} − c^{−θ} + 1 ]^{−1/θ}, in logs.
    let ln_a = -(theta / (theta + 1.0)) * (prob.ln() + (theta + 1.0) * c.ln());
    let ln_b = -theta * c.ln();
    let ln_inner = log_e_sum(ln_a, 0.0, ln_b);
    (-ln_inner / theta).exp().clamp(EPS_U, 1.0 - EPS_U)
}

// ------------------------------------------------------------------ Gumbel

fn gumbel_density(theta: f64, u: f64, v: f64) -> f64 {
    let xt = -u.ln();
    let yt = -v.ln();
    let s_cap = xt.powf(theta) + yt.powf(theta);
    let s = s_cap.powf(1.0 / theta);
    let ln_c = -s - (u.ln() + v.ln()) + (2.0 / theta - 2.0) * s_cap.ln()
        + (theta - 1.0) * (xt.ln() + yt.ln())
        + ((theta - 1.0) / s).ln_1p();
    ln_c.exp()
}

fn gumbel_cdf(theta: f64, u: f64, v: f64) -> f64 {
    let s_cap = (-u.ln()).powf(theta) + (-v.ln()).powf(theta);
    (-s_cap.powf(1.0 / theta)).exp()
}

fn gumbel_h(theta: f64, t: f64, c: f64) -> f64 {
    let xt = -t.ln();
    let yt = -c.ln();
    let s_cap = xt.powf(theta) + yt.powf(theta);
    let s = s_cap.powf(1.0 / theta);
    (-s + (1.0 / theta - 1.0) * s_cap.ln() + (theta - 1.0) * yt.ln() + yt).exp()
}

// --------------------------------------------------------------------- Joe

fn joe_ln_t(theta: f64, u: f64, v: f64) -> f64 {
    // ln(x̄^θ + ȳ^θ − x̄^θ ȳ^θ) with x̄ = 1−u.
    let a = theta * (-u).ln_1p();
    let b = theta * (-v).ln_1p();
    log_e_sum(a, b, a + b)
}

fn joe_density(theta: f64, u: f64, v: f64) -> f64 {
    let ln_t = joe_ln_t(theta, u, v);
    let t_val = ln_t.exp();
    ((1.0 / theta - 2.0) * ln_t
        + (theta - 1.0) * ((-u).ln_1p() + (-v).ln_1p())
        + (theta - 1.0 + t_val).ln())
    .exp()
}

fn joe_cdf(theta: f64, u: f64, v: f64) -> f64 {
    -(joe_ln_t(theta, u, v) / theta).exp_m1()
}

fn joe_h(theta: f64, t: f64, c: f64) -> f64 {
    let ln_t = joe_ln_t(theta, t, c);
    let one_minus_xbar_theta = -(theta * (-t).ln_1p()).exp_m1();
    ((1.0 / theta - 1.0) * ln_t + (theta - 1.0) * (-c).ln_1p()).exp() * one_minus_xbar_theta
}

fn joe_tau(theta: f64) -> f64 {
    if theta == 1.0 {
        return 0.0;
    }
    // τ = 1 − 4 Σ_{k≥1} 1/(k(θk+2)(θ(k−1)+2)); terms fall like 1/(θ²k³).
    let mut sum = 0.0;
    for k in 1..=2_000_000u64 {
        let kf = k as f64;
        let term = 1.0 / (kf * (theta * kf + 2.0) * (theta * (kf - 1.0) + 2.0));
        sum += term;
        if term < 1e-14 * sum {
            break;
        }
    }
    1.0 - 4.0 * sum
}

// --------------------------------------------------------------------- BB1

struct Bb1Parts {
    ln_x: f64,
    ln_y: f64,
    ln_w: f64,
    ln_s: f64,
}

fn bb1_parts(theta: f64, delta: f64, u: f64, v: f64) -> Bb1Parts {
    // x = (u^{−θ} − 1)^δ in logs; w = x + y; s = w^{1/δ}.
    let ln_x = delta * lnexpm1(-theta * u.ln());
    let ln_y = delta * lnexpm1(-theta * v.ln());
    let m = ln_x.max(ln_y);
    let ln_w = m + ((ln_x - m).exp() + (ln_y - m).exp()).ln();
    Bb1Parts { ln_x, ln_y, ln_w, ln_s: ln_w / delta }
}

fn bb1_density(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb1_parts(theta, delta, u, v);
    // ln[(1+θδ)s + θ(δ−1)] without forming s when it is enormous.
    let ln_lead = p.ln_s + ((1.0 + theta * delta) + theta * (delta - 1.0) * (-p.ln_s).exp()).ln();
    let ln_c = ln_lead + (-1.0 / theta - 2.0) * log1pexp(p.ln_s)
        + (1.0 / delta - 2.0) * p.ln_w
        + (1.0 - 1.0 / delta) * (p.ln_x + p.ln_y)
        - (theta + 1.0) * (u.ln() + v.ln());
    ln_c.exp()
}

fn bb1_cdf(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb1_parts(theta, delta, u, v);
    (-log1pexp(p.ln_s) / theta).exp()
}

fn bb1_h(theta: f64, delta: f64, t: f64, c: f64) -> f64 {
    let p = bb1_parts(theta, delta, t, c);
    ((-1.0 / theta - 1.0) * log1pexp(p.ln_s)
        + (1.0 / delta - 1.0) * p.ln_w
        + (1.0 - 1.0 / delta) * p.ln_y
        - (theta + 1.0) * c.ln())
    .exp()
}

// --------------------------------------------------------------------- BB7

struct Bb7Parts {
    ln_p: f64,
    ln_q: f64,
    ln_w: f64,
    /// A = 1 − w^{−1/δ} ∈ (0,1).
    a: f64,
}

fn bb7_parts(theta: f64, delta: f64, u: f64, v: f64) -> Bb7Parts {
    // p = 1 − (1−u)^θ, q = 1 − (1−v)^θ, w = p^{−δ} + q^{−δ} − 1.
    // Near (1,1) the complements (1−u)^θ fall below machine epsilon, so
    // p collapses to 1 in linear space; log1mexp keeps ln p exact and
    // the expm1 sum keeps w − 1 exact at both corners.
    let ln_p = log1mexp(theta * (-u).ln_1p());
    let ln_q = log1mexp(theta * (-v).ln_1p());
    let ln_w = ((-delta * ln_p).exp_m1() + (-delta * ln_q).exp_m1()).ln_1p();
    let a = -(-ln_w / delta).exp_m1();
    Bb7Parts { ln_p, ln_q, ln_w, a }
}

fn bb7_density(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb7_parts(theta, delta, u, v);
    // Bracket: (θ−1)A^{1/θ−2}w^{−1/δ} + θ(δ+1)A^{1/θ−1}
    //        = A^{1/θ−2} [ (θ−1)w^{−1/δ} + θ(δ+1)A ].
    let w_pow = (-p.ln_w / delta).exp();
    let ln_bracket =
        (1.0 / theta - 2.0) * p.a.ln() + ((theta - 1.0) * w_pow + theta * (delta + 1.0) * p.a).ln();
    let ln_c = (theta - 1.0) * ((-u).ln_1p() + (-v).ln_1p())
        - (delta + 1.0) * (p.ln_p + p.ln_q)
        + (-1.0 / delta - 2.0) * p.ln_w
        + ln_bracket;
    ln_c.exp()
}

fn bb7_cdf(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb7_parts(theta, delta, u, v);
    -(p.a.ln() / theta).exp_m1()
}

fn bb7_h(theta: f64, delta: f64, t: f64, c: f64) -> f64 {
    let p = bb7_parts(theta, delta, t, c);
    ((1.0 / theta - 1.0) * p.a.ln()
        + (-1.0 / delta - 1.0) * p.ln_w
        - (delta + 1.0) * p.ln_q
        + (theta - 1.0) * (-c).ln_1p())
    .exp()
}

fn bb7_tau(theta: f64, delta: f64) -> f64 {
    archimedean_tau(&mut |t| {
        // φ/φ' = −(g − g^{δ+1})/(θδ(1−t)^{θ−1}) with g = 1−(1−t)^θ.
        let g = -(theta * (-t).ln_1p()).exp_m1();
        let num = g * (-(delta * g.ln()).exp_m1());
        -num / (theta * delta * (1.0 - t).powf(theta - 1.0))
    })
}

// --------------------------------------------------------------------- BB8

struct Bb8Parts {
    su: f64,
    sv: f64,
    eta: f64,
    /// K = (η − su·sv)/η ∈ (0,1); the numerator is expanded in the
    /// complements to avoid cancellation near (1,1).
    k: f64,
}

fn bb8_parts(theta: f64, delta: f64, u: f64, v: f64) -> Bb8Parts {
    let e1 = (theta * (-delta * u).ln_1p()).exp(); // (1−δu)^θ
    let e2 = (theta * (-delta * v).ln_1p()).exp();
    let ee = (theta * (-delta).ln_1p()).exp(); // (1−δ)^θ (0 when δ = 1)
    let ee = if delta == 1.0 { 0.0 } else { ee };
    let su = 1.0 - e1;
    let sv = 1.0 - e2;
    let eta = 1.0 - ee;
    let k_num = e1 + e2 - e1 * e2 - ee;
    Bb8Parts { su, sv, eta, k: (k_num / eta).max(f64::MIN_POSITIVE) }
}

fn bb8_density(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb8_parts(theta, delta, u, v);
    let ln_c = (theta * delta / p.eta).ln()
        + (theta - 1.0) * ((-delta * u).ln_1p() + (-delta * v).ln_1p())
        + (1.0 / theta - 2.0) * p.k.ln()
        + (1.0 - p.su * p.sv / (theta * p.eta)).ln();
    ln_c.exp()
}

fn bb8_cdf(theta: f64, delta: f64, u: f64, v: f64) -> f64 {
    let p = bb8_parts(theta, delta, u, v);
    -(p.k.ln() / theta).exp_m1() / delta
}

fn bb8_h(theta: f64, delta: f64, t: f64, c: f64) -> f64 {
    let p = bb8_parts(theta, delta, t, c);
    ((1.0 / theta - 1.0) * p.k.ln() + (theta - 1.0) * (-delta * c).ln_1p()).exp() * p.su / p.eta
}

fn bb8_tau(theta: f64, delta: f64) -> f64 {
    let eta = 1.0 - (theta * (-delta).ln_1p()).exp();
    let eta = if delta == 1.0 { 1.0 } else { eta };
    archimedean_tau(&mut |t| {
        // φ/φ' = s_t ln(s_t/η) / (θδ(1−δt)^{θ−1}) with s_t = 1−(1−δt)^θ.
        let st = -(theta * (-delta * t).ln_1p()).exp_m1();
        st * (st.ln() - eta.ln()) / (theta * delta * (1.0 - delta * t).powf(theta - 1.0))
    })
}

/// Kendall's τ of an Archimedean copula from its generator:
/// τ = 1 + 4 ∫₀¹ φ(t)/φ'(t) dt.
fn archimedean_tau(phi_over_dphi: &mut dyn FnMut(f64) -> f64) -> f64 {
    let mut f = |t: f64| phi_over_dphi(t.clamp(1e-12, 1.0 - 1e-12));
    1.0 + 4.0 * adaptive_simpson(&mut f, 0.0, 1.0, 1e-12)
}
