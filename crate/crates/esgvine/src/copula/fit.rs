//! Estimation: empirical Kendall's τ-b, τ-inversion, and AIC-based family
//! selection over a candidate catalog.

use crate::numeric::{brent_min, brent_root, nelder_mead, sigmoid};

use super::families::{
    self, BB_MAX, CLAYTON_MAX, FRANK_MAX, GUMBEL_MAX, JOE_MAX, NU_MAX, NU_MIN, RHO_MAX,
};
use super::{BaseFamily, Catalog, CopulaError, FamilyId, FitMethod, PairCopula};

/// Largest |τ̂| for which any candidate family is considered feasible.
const TAU_HAT_MAX: f64 = 0.9999;

/// Empirical Kendall's τ-b (tie-corrected) in O(n log n).
///
/// Sorts by (x, y) and counts discordant pairs as merge-sort inversions of
/// the y-sequence (Knight's algorithm), then applies the tie-corrected
/// normalization
/// `τ_b = (n0 − n1 − n2 + n3 − 2S) / (√(n0−n1)·√(n0−n2))`,
/// where n0 counts all pairs, n1/n2 pairs tied in x/y, and n3 pairs tied
/// in both.
pub fn empirical_tau(x: &[f64], y: &[f64]) -> Result<f64, CopulaError> {
    if x.len() != y.len() {
        return Err(CopulaError::InvalidInput(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(CopulaError::InvalidInput("need at least 2 observations".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(CopulaError::InvalidInput("non-finite observation".into()));
    }
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b]).unwrap().then(y[a].partial_cmp(&y[b]).unwrap())
    });

    // Pairs tied in x and in both coordinates (runs in the (x,y) sort).
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    {
        let mut run_x = 1u64;
        let mut run_xy = 1u64;
        for w in idx.windows(2) {
            if x[w[0]] == x[w[1]] {
                run_x += 1;
                if y[w[0]] == y[w[1]] {
                    run_xy += 1;
                } else {
                    n3 += run_xy * (run_xy - 1) / 2;
                    run_xy = 1;
                }
            } else {
                n1 += run_x * (run_x - 1) / 2;
                n3 += run_xy * (run_xy - 1) / 2;
                run_x = 1;
                run_xy = 1;
            }
        }
        n1 += run_x * (run_x - 1) / 2;
        n3 += run_xy * (run_xy - 1) / 2;
    }

    // Pairs tied in y.
    let mut ys: Vec<f64> = y.to_vec();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut n2 = 0u64;
    {
        let mut run = 1u64;
        for w in ys.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                n2 += run * (run - 1) / 2;
                run = 1;
            }
        }
        n2 += run * (run - 1) / 2;
    }

    let mut y_seq: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let swaps = merge_count_inversions(&mut y_seq);

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if n0 == n1 || n0 == n2 {
        return Err(CopulaError::InvalidInput(
            "zero-variance input: all values tied in one coordinate".into(),
        ));
    }
    let pq = n0 as i128 - n1 as i128 - n2 as i128 + n3 as i128 - 2 * swaps as i128;
    let denom = ((n0 - n1) as f64).sqrt() * ((n0 - n2) as f64).sqrt();
    // The quotient can land an ulp outside [-1,1] at perfect
    // concordance/discordance because the denominator is rounded.
    Ok((pq as f64 / denom).clamp(-1.0, 1.0))
}

/// Counts strict inversions (a later element smaller than an earlier one)
/// while merge-sorting `a` in place.
fn merge_count_inversions(a: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mut buf = a.to_vec();
    merge_rec(a, &mut buf)
}

fn merge_rec(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = a.split_at_mut(mid);
    let (bl, br) = buf.split_at_mut(mid);
    let mut inv = merge_rec(left, bl) + merge_rec(right, br);
    let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
    while i < left.len() && j < right.len() {
        // Take equal elements from the left so ties are not counted.
        if right[j] < left[i] {
            inv += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        } else {
            buf[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    a.copy_from_slice(&buf[..n]);
    inv
}

/// Inverts the family's Kendall's τ map.
///
/// Returns the τ-determined parameters: one entry for the one-parameter
/// families, `[ρ]` for Student-t (ν is estimated separately by likelihood),
/// an empty vector for Independence. Frank and Joe are solved by bracketed
/// root-finding to 1e-10. Errors when τ lies outside the family's
/// attainable range (sign and parameter caps included) or for the
/// two-parameter BB families, which have no τ-inversion.
pub fn params_from_tau(family: FamilyId, tau: f64) -> Result<Vec<f64>, CopulaError> {
    if !tau.is_finite() || tau.abs() >= 1.0 {
        return Err(CopulaError::TauOutOfRange { family, tau });
    }
    let range_err = || CopulaError::TauOutOfRange { family, tau };
    // Rotations by 90°/270° realize negative dependence with a positive
    // base parameter: invert the sign-adjusted τ.
    let base_tau = if family.rotation().negates_tau() { -tau } else { tau };
    match family.base() {
        BaseFamily::Independence => Ok(Vec::new()),
        BaseFamily::Gaussian | BaseFamily::StudentT => {
            let rho = (std::f64::consts::FRAC_PI_2 * base_tau).sin();
            if rho.abs() > RHO_MAX {
                return Err(range_err());
            }
            Ok(vec![rho])
        }
        BaseFamily::Frank => {
            if base_tau == 0.0 {
                return Err(range_err());
            }
            let target = base_tau.abs();
            let lo = 1e-9;
            let f_lo = families::base_tau(BaseFamily::Frank, &[lo]) - target;
            let f_hi = families::base_tau(BaseFamily::Frank, &[FRANK_MAX]) - target;
            if f_lo > 0.0 || f_hi < 0.0 {
                return Err(range_err());
            }
            let mut f = |th: f64| families::base_tau(BaseFamily::Frank, &[th]) - target;
            let theta = brent_root(&mut f, lo, FRANK_MAX, 1e-10).ok_or_else(range_err)?;
            Ok(vec![theta.copysign(base_tau)])
        }
        BaseFamily::Clayton => {
            if base_tau <= 0.0 {
                return Err(range_err());
            }
            let theta = 2.0 * base_tau / (1.0 - base_tau);
            if theta > CLAYTON_MAX {
                return Err(range_err());
            }
            Ok(vec![theta])
        }
        BaseFamily::Gumbel => {
            if base_tau < 0.0 {
                return Err(range_err());
            }
            let theta = 1.0 / (1.0 - base_tau);
            if theta > GUMBEL_MAX {
                return Err(range_err());
            }
            Ok(vec![theta])
        }
        BaseFamily::Joe => {
            if base_tau < 0.0 {
                return Err(range_err());
            }
            if base_tau == 0.0 {
                return Ok(vec![1.0]);
            }
            let f_hi = families::base_tau(BaseFamily::Joe, &[JOE_MAX]) - base_tau;
            if f_hi < 0.0 {
                return Err(range_err());
            }
            let mut f = |th: f64| families::base_tau(BaseFamily::Joe, &[th]) - base_tau;
            let theta = brent_root(&mut f, 1.0, JOE_MAX, 1e-10).ok_or_else(range_err)?;
            Ok(vec![theta])
        }
        BaseFamily::BB1 | BaseFamily::BB7 | BaseFamily::BB8 => {
            Err(CopulaError::TauInversionUnavailable { family })
        }
    }
}

/// Selects the best-fitting pair copula from `catalog` by AIC.
///
/// Candidate parameters come from τ-inversion (`FitMethod::Itau`) or
/// maximum likelihood (`FitMethod::Mle`); the Student-t ν and the
/// two-parameter BB families are estimated by likelihood under both
/// methods. Tail-asymmetric candidates are routed by the sign of the
/// empirical τ̂: rotations 0°/180° for τ̂ ≥ 0, rotations 90°/270°
/// otherwise. Ties in AIC go to the earlier catalog entry.
pub fn fit_pair(
    u1: &[f64],
    u2: &[f64],
    catalog: &Catalog,
    method: FitMethod,
) -> Result<PairCopula, CopulaError> {
    if u1.len() != u2.len() {
        return Err(CopulaError::InvalidInput(format!(
            "length mismatch: {} vs {}",
            u1.len(),
            u2.len()
        )));
    }
    if u1.len() < 30 {
        return Err(CopulaError::InvalidInput(format!(
            "need at least 30 observations, got {}",
            u1.len()
        )));
    }
    if u1.iter().chain(u2).any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(CopulaError::InvalidInput("observations must lie in (0,1)".into()));
    }
    let tau_hat = empirical_tau(u1, u2)?;
    if tau_hat.abs() > TAU_HAT_MAX {
        return Err(CopulaError::NoFeasibleCandidate(format!(
            "|empirical tau| = {:.5} too close to 1",
            tau_hat.abs()
        )));
    }

    let mut best: Option<(f64, PairCopula)> = None;
    for &family in catalog.families() {
        // Dependence-sign routing for tail-asymmetric families.
        if family.base().is_rotatable() {
            let negative_side = family.rotation().negates_tau();
            if (tau_hat < 0.0) != negative_side {
                continue;
            }
        }
        let Some(pc) = fit_candidate(family, u1, u2, tau_hat, method) else {
            continue;
        };
        let aic = -2.0 * pc.loglik + 2.0 * pc.n_params as f64;
        if best.as_ref().is_none_or(|(best_aic, _)| aic < *best_aic) {
            best = Some((aic, pc));
        }
    }
    best.map(|(_, pc)| pc).ok_or_else(|| {
        CopulaError::NoFeasibleCandidate(format!("empirical tau {tau_hat:.4} fits no candidate"))
    })
}

/// Fits one candidate family; `None` marks an infeasible candidate.
fn fit_candidate(
    family: FamilyId,
    u1: &[f64],
    u2: &[f64],
    tau_hat: f64,
    method: FitMethod,
) -> Option<PairCopula> {
    let base = family.base();
    if base == BaseFamily::Independence {
        // Zero-parameter reference candidate: loglik 0 by definition.
        return Some(PairCopula::independence());
    }

    let make = |params: Vec<f64>| -> Option<PairCopula> {
        let pc = PairCopula::new(family, params).ok()?;
        let ll = pc.loglik_on(u1, u2);
        if !ll.is_finite() {
            return None;
        }
        Some(pc.with_loglik(ll))
    };

    match base {
        BaseFamily::StudentT => {
            let rho0 = params_from_tau(family, tau_hat).ok()?[0];
            match method {
                FitMethod::Itau => {
                    // ρ pinned by τ-inversion; ν by 1-D likelihood search.
                    let mut neg_ll = |nu: f64| {
                        -PairCopula::new(family, vec![rho0, nu])
                            .map(|pc| pc.loglik_on(u1, u2))
                            .unwrap_or(f64::NEG_INFINITY)
                    };
                    let (nu, _) = brent_min(&mut neg_ll, NU_MIN, NU_MAX, 1e-6);
                    make(vec![rho0, nu])
                }
                FitMethod::Mle => {
                    let x0 = [rho0.atanh(), logit_unit((8.0 - 2.0) / (NU_MAX - 2.0))];
                    let map = |z: &[f64]| {
                        vec![z[0].tanh() * RHO_MAX, 2.0 + (NU_MAX - 2.0) * sigmoid(z[1])]
                    };
                    optimize_2d(family, u1, u2, &[x0], map).and_then(make)
                }
            }
        }
        BaseFamily::BB1 => {
            // δ matched to τ̂ at a small θ gives a useful starting corner.
            let tau_pos = tau_hat.abs().clamp(0.05, 0.95);
            let delta0 = (2.0 / ((1.0 - tau_pos) * 2.5)).clamp(1.001, BB_MAX - 0.01);
            let starts = [
                [logit_unit(0.5 / BB_MAX), logit_unit((delta0 - 1.0) / (BB_MAX - 1.0))],
                [logit_unit(1.5 / BB_MAX), logit_unit(0.1 / (BB_MAX - 1.0))],
            ];
            let map =
                |z: &[f64]| vec![BB_MAX * sigmoid(z[0]), 1.0 + (BB_MAX - 1.0) * sigmoid(z[1])];
            optimize_2d(family, u1, u2, &starts, map).and_then(make)
        }
        BaseFamily::BB7 => {
            let starts = [
                [logit_unit(0.2 / (BB_MAX - 1.0)), logit_unit(0.7 / BB_MAX)],
                [logit_unit(1.0 / (BB_MAX - 1.0)), logit_unit(1.5 / BB_MAX)],
            ];
            let map =
                |z: &[f64]| vec![1.0 + (BB_MAX - 1.0) * sigmoid(z[0]), BB_MAX * sigmoid(z[1])];
            optimize_2d(family, u1, u2, &starts, map).and_then(make)
        }
        BaseFamily::BB8 => {
            let starts = [
                [logit_unit(0.5 / (BB_MAX - 1.0)), logit_unit(0.7)],
                [logit_unit(2.0 / (BB_MAX - 1.0)), logit_unit(0.95)],
            ];
            let map = |z: &[f64]| vec![1.0 + (BB_MAX - 1.0) * sigmoid(z[0]), sigmoid(z[1])];
            optimize_2d(family, u1, u2, &starts, map).and_then(make)
        }
        // One-parameter families.
        _ => match method {
            FitMethod::Itau => make(params_from_tau(family, tau_hat).ok()?),
            FitMethod::Mle => {
                let (lo, hi) = mle_bracket(base, tau_hat)?;
                let mut neg_ll = |th: f64| {
                    -PairCopula::new(family, vec![th])
                        .map(|pc| pc.loglik_on(u1, u2))
                        .unwrap_or(f64::NEG_INFINITY)
                };
                let (theta, _) = brent_min(&mut neg_ll, lo, hi, 1e-8);
                make(vec![theta])
            }
        },
    }
}

/// Likelihood search interval for the one-parameter families; Frank's
/// interval follows the sign of τ̂.
fn mle_bracket(base: BaseFamily, tau_hat: f64) -> Option<(f64, f64)> {
    match base {
        BaseFamily::Gaussian => Some((-RHO_MAX, RHO_MAX)),
        BaseFamily::Frank => {
            if tau_hat >= 0.0 {
                Some((1e-6, FRANK_MAX))
            } else {
                Some((-FRANK_MAX, -1e-6))
            }
        }
        BaseFamily::Clayton => Some((1e-8, CLAYTON_MAX)),
        BaseFamily::Gumbel => Some((1.0, GUMBEL_MAX)),
        BaseFamily::Joe => Some((1.0, JOE_MAX)),
        _ => None,
    }
}

/// Deterministic multi-start Nelder-Mead for the two-parameter families,
/// in unconstrained coordinates mapped into the parameter box.
fn optimize_2d(
    family: FamilyId,
    u1: &[f64],
    u2: &[f64],
    starts: &[[f64; 2]],
    map: impl Fn(&[f64]) -> Vec<f64>,
) -> Option<Vec<f64>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let mut obj = |z: &[f64]| {
            let params = map(z);
            match PairCopula::new(family, params) {
                Ok(pc) => {
                    let ll = pc.loglik_on(u1, u2);
                    if ll.is_finite() {
                        -ll
                    } else {
                        f64::INFINITY
                    }
                }
                Err(_) => f64::INFINITY,
            }
        };
        let result = nelder_mead(&mut obj, start, &[0.7, 0.7], 1e-9, 300);
        if result.fx.is_finite()
            && best.as_ref().is_none_or(|(fx, _)| result.fx < *fx)
        {
            best = Some((result.fx, map(&result.x)));
        }
    }
    best.map(|(_, p)| p)
}

/// Inverse of the unit-interval sigmoid, clamped away from the poles.
fn logit_unit(p: f64) -> f64 {
    let p = p.clamp(1e-6, 1.0 - 1e-6);
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{sample_pair, Rotation};
    use approx::assert_relative_eq;

    /// O(n²) pair-count reference with the same τ-b normalization.
    fn tau_quadratic(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut pq, mut n1, mut n2) = (0i128, 0u64, 0u64);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = (x[i] - x[j]).signum();
                let dy = (y[i] - y[j]).signum();
                if x[i] == x[j] && y[i] == y[j] {
                    n1 += 1;
                    n2 += 1;
                } else if x[i] == x[j] {
                    n1 += 1;
                } else if y[i] == y[j] {
                    n2 += 1;
                } else {
                    pq += (dx * dy) as i128;
                }
            }
        }
        let n0 = (n as u64) * (n as u64 - 1) / 2;
        let denom = ((n0 - n1) as f64).sqrt() * ((n0 - n2) as f64).sqrt();
        (pq as f64 / denom).clamp(-1.0, 1.0)
    }

    #[test]
    fn tau_matches_trivial_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(empirical_tau(&x, &x).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(empirical_tau(&x, &neg).unwrap(), -1.0);
        let y = [1.0, 3.0, 2.0, 4.0];
        assert_relative_eq!(empirical_tau(&x, &y).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn tau_agrees_exactly_with_quadratic_oracle() {
        // Mixed continuous/tied data across several deterministic seeds.
        for seed in 0..5u64 {
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64) / ((1u64 << 53) as f64)
            };
            let n = 400;
            let x: Vec<f64> = (0..n).map(|_| (next() * 20.0).floor()).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|&xv| (xv * 0.3 + next() * 10.0).floor())
                .collect();
            let fast = empirical_tau(&x, &y).unwrap();
            let slow = tau_quadratic(&x, &y);
            assert_eq!(fast, slow, "seed {seed}");
        }
    }

    #[test]
    fn tau_rejects_degenerate_input() {
        assert!(empirical_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(empirical_tau(&[1.0], &[1.0]).is_err());
        assert!(empirical_tau(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn tau_inversion_roundtrips() {
        let cases = [
            (FamilyId::unrotated(BaseFamily::Gaussian), 1.0 / 3.0, 0.5),
            (FamilyId::unrotated(BaseFamily::Clayton), 0.5, 2.0),
            (FamilyId::unrotated(BaseFamily::Gumbel), 0.75, 4.0),
        ];
        for (family, tau, expected) in cases {
            let p = params_from_tau(family, tau).unwrap();
            assert_relative_eq!(p[0], expected, epsilon = 1e-12);
        }
        // Frank and Joe round-trip through their numeric inverses.
        for tau in [0.12, 0.4, 0.7, -0.3] {
            let fam = FamilyId::unrotated(BaseFamily::Frank);
            let p = params_from_tau(fam, tau).unwrap();
            assert_relative_eq!(
                families::base_tau(BaseFamily::Frank, &p),
                tau,
                epsilon = 1e-9
            );
        }
        for tau in [0.1, 0.45, 0.8] {
            let fam = FamilyId::unrotated(BaseFamily::Joe);
            let p = params_from_tau(fam, tau).unwrap();
            assert_relative_eq!(families::base_tau(BaseFamily::Joe, &p), tau, epsilon = 1e-9);
        }
    }

    #[test]
    fn tau_inversion_respects_sign_and_rotation() {
        let clayton0 = FamilyId::unrotated(BaseFamily::Clayton);
        let err = params_from_tau(clayton0, -0.3).unwrap_err();
        assert!(err.to_string().contains("range"), "{err}");
        let clayton90 = FamilyId::new(BaseFamily::Clayton, Rotation::R90).unwrap();
        let p = params_from_tau(clayton90, -0.3).unwrap();
        assert_relative_eq!(p[0], 2.0 * 0.3 / 0.7, epsilon = 1e-12);
        assert!(params_from_tau(clayton90, 0.3).is_err());
        // BB families have no τ-inversion.
        assert!(params_from_tau(FamilyId::unrotated(BaseFamily::BB1), 0.5).is_err());
    }

    #[test]
    fn fit_recovers_clayton() {
        let truth =
            PairCopula::new(FamilyId::unrotated(BaseFamily::Clayton), vec![2.0]).unwrap();
        let sample = sample_pair(&truth, 2000, 42);
        let (u1, u2): (Vec<f64>, Vec<f64>) = sample.into_iter().unzip();
        for method in [FitMethod::Itau, FitMethod::Mle] {
            let pc = fit_pair(&u1, &u2, &Catalog::itau(), method).unwrap();
            assert_eq!(pc.family, truth.family, "{method:?}");
            assert!((pc.params[0] - 2.0).abs() < 0.2, "{method:?}: {}", pc.params[0]);
        }
    }

    #[test]
    fn fit_prefers_independence_on_shuffled_data() {
        // With AIC-only selection (no independence pre-test), a spurious
        // |ρ̂| of about 1.35 standard errors is enough for the Gaussian
        // candidate to edge out Independence, which happens for roughly a
        // fifth of seeds at n=1000. Independence must still be the clear
        // majority choice.
        let mut hits = 0;
        let n_seeds = 20u64;
        for seed in 0..n_seeds {
            let a = sample_pair(&PairCopula::independence(), 1000, seed);
            let (u1, u2): (Vec<f64>, Vec<f64>) = a.into_iter().unzip();
            let pc = fit_pair(&u1, &u2, &Catalog::itau(), FitMethod::Itau).unwrap();
            if pc.family.base() == BaseFamily::Independence {
                hits += 1;
            }
        }
        eprintln!("independence selected {hits}/{n_seeds} times");
        assert!(hits >= 14, "independence selected only {hits}/{n_seeds} times");
    }

    #[test]
    fn fit_handles_near_perfect_dependence() {
        let truth =
            PairCopula::new(FamilyId::unrotated(BaseFamily::Gaussian), vec![0.99]).unwrap();
        let sample = sample_pair(&truth, 2000, 7);
        let (u1, u2): (Vec<f64>, Vec<f64>) = sample.into_iter().unzip();
        let tau_hat = empirical_tau(&u1, &u2).unwrap();
        let expected = 2.0 / std::f64::consts::PI * 0.99f64.asin();
        assert!((tau_hat - expected).abs() < 0.02, "tau_hat {tau_hat} vs {expected}");
        let pc = fit_pair(&u1, &u2, &Catalog::itau(), FitMethod::Itau).unwrap();
        assert!(
            matches!(pc.family.base(), BaseFamily::Gaussian | BaseFamily::StudentT),
            "picked {:?}",
            pc.family
        );
    }

    #[test]
    fn fit_routes_negative_dependence_to_rotations() {
        let truth =
            PairCopula::new(FamilyId::new(BaseFamily::Clayton, Rotation::R90).unwrap(), vec![3.0])
                .unwrap();
        let sample = sample_pair(&truth, 2500, 11);
        let (u1, u2): (Vec<f64>, Vec<f64>) = sample.into_iter().unzip();
        let pc = fit_pair(&u1, &u2, &Catalog::itau(), FitMethod::Itau).unwrap();
        assert!(pc.tau < 0.0);
        assert!(
            pc.family.rotation().negates_tau() || !pc.family.base().is_rotatable(),
            "picked {:?}",
            pc.family
        );
    }

    #[test]
    fn fit_rejects_bad_input() {
        let short = vec![0.5; 10];
        assert!(fit_pair(&short, &short, &Catalog::itau(), FitMethod::Itau).is_err());
        let x: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let mut y = x.clone();
        y[0] = 1.5;
        assert!(fit_pair(&x, &y, &Catalog::itau(), FitMethod::Itau).is_err());
        // Perfectly dependent data: every candidate infeasible.
        let err = fit_pair(&x, &x, &Catalog::itau(), FitMethod::Itau).unwrap_err();
        assert!(matches!(err, CopulaError::NoFeasibleCandidate(_)), "{err}");
    }

    #[test]
    fn fit_recovers_bb1_under_parametric_catalog() {
        let truth =
            PairCopula::new(FamilyId::unrotated(BaseFamily::BB1), vec![1.0, 2.0]).unwrap();
        let sample = sample_pair(&truth, 3000, 99);
        let (u1, u2): (Vec<f64>, Vec<f64>) = sample.into_iter().unzip();
        let pc = fit_pair(&u1, &u2, &Catalog::parametric(), FitMethod::Mle).unwrap();
        // Family identification between BB variants is fuzzy at n=3000;
        // what must hold is a close dependence structure.
        assert!((pc.tau - truth.tau).abs() < 0.05, "tau {} vs {}", pc.tau, truth.tau);
        assert!(
            (pc.lambda_lower - truth.lambda_lower).abs() < 0.15,
            "lambda {} vs {}",
            pc.lambda_lower,
            truth.lambda_lower
        );
    }
}
