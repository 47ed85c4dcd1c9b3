//! General-purpose numerical routines shared across the crate:
//!
//! - Gauss-Legendre nodes and adaptive Simpson quadrature,
//! - bracketed root finding (Brent) and one-dimensional minimisation,
//! - a Nelder-Mead simplex minimiser for the low-dimensional likelihood
//!   optimisations (GARCH marginals, two-parameter copula families).
//!
//! Everything here is deterministic: no randomised restarts, fixed
//! iteration budgets, and tolerances supplied by the caller.

pub mod special;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the orders used in this crate (`n <= 64`).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "Gauss-Legendre order must be at least 2");
    let mut nodes = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // Odd orders own a root at exactly zero; snap near-machine-zero
        // iterates onto it so the mirroring step below does not duplicate it.
        if x.abs() < 1e-12 {
            x = 0.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push((-x, w));
    }
    // Mirror the positive roots; odd orders own the root at zero exactly once.
    for i in (0..m).rev() {
        let (x, w) = nodes[i];
        if x != 0.0 {
            nodes.push((-x, w));
        }
    }
    nodes
}

/// Integrate `f` over `[a, b]` with `n`-point Gauss-Legendre quadrature.
pub fn gl_integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Recursion stops when the local Richardson error estimate drops below the
/// local tolerance or the depth budget is exhausted; the final refinement
/// step is always accepted, so the routine degrades gracefully on
/// integrands with unresolved fine structure.
///
/// The stopping rule also carries a relative noise floor: once the error
/// estimate falls under ~1e-11 of the local panel magnitude, further
/// splitting only chases rounding noise in the integrand (the distribution
/// functions feeding these integrals are themselves only accurate to about
/// 1e-12 relative), so the panel is accepted. Without the floor, spiky
/// integrands such as the chi mixture at large ν recurse without bound.
///
/// The first few levels are always refined regardless of the error
/// estimate, so narrow bumps that the five initial probe points miss
/// entirely still get discovered.
pub fn adaptive_simpson(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const REL_FLOOR: f64 = 1e-11;
    const MAX_DEPTH: u32 = 26;
    const FORCED_LEVELS: u32 = 5;
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut dyn FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        let threshold = (15.0 * tol).max(REL_FLOOR * (left.abs() + right.abs()));
        let forced = depth > MAX_DEPTH - FORCED_LEVELS;
        // The negated comparison accepts NaN deltas so a NaN in the
        // integrand surfaces in the result instead of forcing a full-depth
        // recursion tree.
        if depth == 0 || (!forced && !(delta.abs() > threshold)) {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Bracketed root finding with Brent's method.
///
/// `f(a)` and `f(b)` must have opposite signs. Returns the abscissa where
/// `|f|` vanishes to within `tol` (on x) or machine precision (on f).
pub fn brent_root(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Some(b)
}

/// One-dimensional minimisation by Brent's parabolic/golden-section method
/// on the bracket `[a, b]`. Returns `(x_min, f(x_min))`.
pub fn brent_min(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabolic interpolation through (v, w, x).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(m - x);
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Result of a Nelder-Mead minimisation.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub fx: f64,
    /// Number of objective evaluations consumed.
    pub evals: usize,
    /// Whether the simplex collapsed below the tolerances before the
    /// evaluation budget ran out.
    pub converged: bool,
}

/// Nelder-Mead simplex minimisation with adaptive coefficients.
///
/// `x0` is the starting point and `step` the per-coordinate initial simplex
/// offset. Deterministic for fixed inputs; callers needing robustness run a
/// fixed set of starts and keep the best result.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    ftol: f64,
    max_evals: usize,
) -> SimplexResult {
    let n = x0.len();
    assert!(n >= 1 && step.len() == n);
    // Adaptive coefficients (Gao & Han 2012) help in dimension >= 2.
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut evals = 0usize;
    let eval = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(f, x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut xi = x0.to_vec();
        xi[i] += step[i];
        let fxi = eval(f, &xi, &mut evals);
        simplex.push((xi, fxi));
    }

    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let fbest = simplex[0].1;
        let fworst = simplex[n].1;
        let spread = (fworst - fbest).abs();
        let scale = 1.0f64.max(fbest.abs());
        if spread <= ftol * scale {
            converged = true;
            break;
        }

        // Centroid of all points but the worst.
        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= nf;
        }

        let worst = simplex[n].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = eval(f, &reflect, &mut evals);

        if fr < fbest {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + beta * (c - w))
                .collect();
            let fe = eval(f, &expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let (contract, fc) = if fr < fworst {
                let c: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + gamma * (c - w))
                    .collect();
                let v = eval(f, &c, &mut evals);
                (c, v)
            } else {
                let c: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c - gamma * (c - w))
                    .collect();
                let v = eval(f, &c, &mut evals);
                (c, v)
            };
            if fc < fworst.min(fr) {
                simplex[n] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(&best) {
                        *xi = bi + delta * (*xi - bi);
                    }
                    entry.1 = eval(f, &entry.0.clone(), &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    SimplexResult {
        x: simplex[0].0.clone(),
        fx: simplex[0].1,
        evals,
        converged,
    }
}

/// Arithmetic mean of a slice. Panics on empty input.
pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n-1) sample variance. Panics on fewer than two observations.
pub fn sample_variance(xs: &[f64]) -> f64 {
    assert!(xs.len() >= 2);
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Logistic sigmoid 1/(1+e^-x), numerically stable on both tails.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`]; the argument must lie strictly inside (0,1).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // An n-point rule is exact for degree <= 2n-1.
        for n in [2usize, 5, 10, 21, 32] {
            let rule = gauss_legendre(n);
            assert_eq!(rule.len(), n);
            let total: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert_relative_eq!(total, 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let quad: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            assert_relative_eq!(quad, exact, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn gl_integrate_matches_closed_forms() {
        let rule = gauss_legendre(30);
        let v = gl_integrate(&mut |x| x.exp(), 0.0, 1.0, &rule);
        assert_relative_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-13);
        let v = gl_integrate(&mut |x| x.sin(), 0.0, std::f64::consts::PI, &rule);
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_simpson_handles_mild_singularities() {
        // \int_0^1 sqrt(x) dx = 2/3 (unbounded derivative at the left
        // endpoint) and \int_0^1 x·ln x dx = -1/4 (the same endpoint shape
        // as the Gumbel/Joe tau integrands).
        let v = adaptive_simpson(&mut |x| x.sqrt(), 0.0, 1.0, 1e-10);
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
        let v = adaptive_simpson(&mut |x| if x > 0.0 { x * x.ln() } else { 0.0 }, 0.0, 1.0, 1e-10);
        assert_relative_eq!(v, -0.25, epsilon = 1e-9);
        let v = adaptive_simpson(&mut |x| (-x * x / 2.0).exp(), -8.0, 8.0, 1e-12);
        assert_relative_eq!(v, (2.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn brent_root_finds_bracketed_zeros() {
        let r = brent_root(&mut |x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-12);
        let r = brent_root(&mut |x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert_relative_eq!(r, 0.739_085_133_215_160_6, epsilon = 1e-12);
        assert!(brent_root(&mut |x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn brent_min_locates_minima() {
        let (x, fx) = brent_min(&mut |x| (x - 1.5) * (x - 1.5) + 0.25, -10.0, 10.0, 1e-12);
        assert_relative_eq!(x, 1.5, epsilon = 1e-7);
        assert_relative_eq!(fx, 0.25, epsilon = 1e-12);
        let (x, _) = brent_min(&mut |x: f64| x.cos(), 2.0, 4.0, 1e-12);
        assert_relative_eq!(x, std::f64::consts::PI, epsilon = 1e-7);
    }

    #[test]
    fn nelder_mead_minimises_rosenbrock() {
        let mut rosen = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
        };
        let res = nelder_mead(&mut rosen, &[-1.2, 1.0], &[0.5, 0.5], 1e-14, 4000);
        assert!(res.converged);
        assert_relative_eq!(res.x[0], 1.0, epsilon = 2e-4);
        assert_relative_eq!(res.x[1], 1.0, epsilon = 2e-4);
    }

    #[test]
    fn nelder_mead_quadratic_bowl_high_dim() {
        let mut bowl = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum();
        let res = nelder_mead(&mut bowl, &[1.0, -2.0, 3.0, -4.0], &[0.5; 4], 1e-15, 4000);
        for v in &res.x {
            assert!(v.abs() < 1e-4, "coordinate {v} not at optimum");
        }
    }

    #[test]
    fn sigmoid_logit_roundtrip() {
        for p in [1e-12, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            assert_relative_eq!(sigmoid(logit(p)), p, epsilon = 1e-12);
        }
        assert_relative_eq!(sigmoid(800.0), 1.0, epsilon = 1e-15);
        // e^-700 is still a normal f64; anything much below -745 underflows
        // to zero, which is the correct nearest representable value.
        assert!(sigmoid(-700.0) > 0.0);
    }

    #[test]
    fn moments_helpers() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(mean(&xs), 2.5);
        assert_relative_eq!(sample_variance(&xs), 5.0 / 3.0, epsilon = 1e-15);
    }
}
