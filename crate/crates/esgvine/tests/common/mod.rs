//! Shared numeric oracles for the integration test targets.
//!
//! Everything here recomputes model quantities through an independent
//! route (tensor-product quadrature, finite differences, diagonal
//! limits) so the library's closed forms are checked against structure,
//! not against themselves.

#![allow(dead_code)]

use esgvine::numeric::gauss_legendre;
use esgvine::{BaseFamily, HDir, PairCopula};

/// Quadrature breakpoints on [0,1], geometrically refined toward both
/// corners: `inner`, inner·√10, …, 0.1, plus 0.3/0.5, all mirrored
/// about 1/2. Tail-concentrated copula densities vary by a bounded
/// factor inside each cell, so a fixed Gauss rule per cell converges.
pub fn graded_breakpoints(inner: f64) -> Vec<f64> {
    let steps = (2.0 * (0.1 / inner).log10()).round() as i32;
    let mut pts = vec![0.0, 0.3, 0.5];
    for k in 0..=steps {
        pts.push(inner * 10f64.powf(f64::from(k) / 2.0));
    }
    let mirrored: Vec<f64> = pts.iter().map(|p| 1.0 - p).collect();
    pts.extend(mirrored);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Tensor-product Gauss-Legendre quadrature of `f` over the rectangle
/// spanned by the breakpoint grids `brk_x` × `brk_y`.
pub fn grid_quadrature(
    f: &mut dyn FnMut(f64, f64) -> f64,
    brk_x: &[f64],
    brk_y: &[f64],
    rule: &[(f64, f64)],
) -> f64 {
    let cells = |brk: &[f64]| -> Vec<(Vec<f64>, Vec<f64>)> {
        brk.windows(2)
            .map(|w| {
                let half = 0.5 * (w[1] - w[0]);
                let mid = 0.5 * (w[0] + w[1]);
                let nodes = rule.iter().map(|&(x, _)| mid + half * x).collect();
                let weights = rule.iter().map(|&(_, wt)| wt * half).collect();
                (nodes, weights)
            })
            .collect()
    };
    let cols = cells(brk_x);
    let rows = cells(brk_y);
    let mut total = 0.0;
    for (nx, wx) in &cols {
        for (ny, wy) in &rows {
            for (&x, &cw) in nx.iter().zip(wx) {
                for (&y, &rw) in ny.iter().zip(wy) {
                    total += cw * rw * f(x, y);
                }
            }
        }
    }
    total
}

/// Three representative parameter settings per base family (one for the
/// parameter-free independence copula), spanning weak to strong and,
/// where admissible, negative dependence.
pub fn reference_settings(base: BaseFamily) -> Vec<Vec<f64>> {
    match base {
        BaseFamily::Independence => vec![vec![]],
        BaseFamily::Gaussian => vec![vec![-0.4], vec![0.3], vec![0.9]],
        BaseFamily::StudentT => vec![vec![0.0, 5.0], vec![0.5, 4.0], vec![-0.7, 8.0]],
        BaseFamily::Frank => vec![vec![-8.0], vec![4.0], vec![20.0]],
        BaseFamily::Clayton => vec![vec![0.8], vec![2.0], vec![5.0]],
        BaseFamily::Gumbel => vec![vec![1.2], vec![2.0], vec![4.0]],
        BaseFamily::Joe => vec![vec![1.5], vec![2.5], vec![5.0]],
        BaseFamily::BB1 => vec![vec![0.5, 1.5], vec![1.0, 2.0], vec![2.0, 1.2]],
        BaseFamily::BB7 => vec![vec![1.5, 1.0], vec![2.0, 2.0], vec![1.2, 0.8]],
        BaseFamily::BB8 => vec![vec![3.0, 0.7], vec![2.0, 1.0], vec![5.0, 0.5]],
    }
}

/// The middle entry of [`reference_settings`] (moderate dependence).
pub fn middle_setting(base: BaseFamily) -> Vec<f64> {
    let mut settings = reference_settings(base);
    let mid = settings.len() / 2;
    settings.swap_remove(mid)
}

/// ∫∫ c(u,v) du dv over (0,1)² on the corner-graded mesh.
pub fn density_mass(pc: &PairCopula, rule: &[(f64, f64)]) -> f64 {
    let brk = graded_breakpoints(1e-6);
    grid_quadrature(&mut |u, v| pc.density(u, v), &brk, &brk, rule)
}

/// Kendall's τ recomputed as 4·E[C(U,V)] − 1 by quadrature of C·c.
/// Independent of the library's τ formulas, which integrate the
/// Archimedean generator or use elliptical closed forms.
pub fn tau_by_quadrature(pc: &PairCopula, rule: &[(f64, f64)]) -> f64 {
    let brk = graded_breakpoints(1e-4);
    4.0 * grid_quadrature(&mut |u, v| pc.cdf(u, v) * pc.density(u, v), &brk, &brk, rule) - 1.0
}

/// Largest deviation between the h-functions and central finite
/// differences of the CDF over a 21×21 interior grid, both
/// conditioning directions.
pub fn max_h_fd_gap(pc: &PairCopula) -> f64 {
    const EPS: f64 = 1e-6;
    let mut worst = 0.0f64;
    for i in 1..=21 {
        for j in 1..=21 {
            let u1 = f64::from(i) / 22.0;
            let u2 = f64::from(j) / 22.0;
            let fd1 = (pc.cdf(u1 + EPS, u2) - pc.cdf(u1 - EPS, u2)) / (2.0 * EPS);
            let h1 = pc.hfunc(u2, u1, HDir::CondFirst);
            let fd2 = (pc.cdf(u1, u2 + EPS) - pc.cdf(u1, u2 - EPS)) / (2.0 * EPS);
            let h2 = pc.hfunc(u1, u2, HDir::CondSecond);
            worst = worst.max((h1 - fd1).abs()).max((h2 - fd2).abs());
        }
    }
    worst
}

/// Diagonal ratio C(t,t)/t whose t→0 limit is the lower tail
/// coefficient.
pub fn diagonal_ratio(pc: &PairCopula, t: f64) -> f64 {
    pc.cdf(t, t) / t
}

/// Asserts that C(t,t)/t approaches `pc.lambda_lower` monotonically
/// over t ∈ {1e-4, 1e-5, 1e-6} and lands within `tol` at the finest t.
pub fn assert_lambda_limit(pc: &PairCopula, tol: f64) {
    let d: Vec<f64> = [1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&t| (diagonal_ratio(pc, t) - pc.lambda_lower).abs())
        .collect();
    assert!(
        d[2] <= tol,
        "{} {:?}: diagonal ratio misses lambda {:.6} by {:.3e}",
        pc.family,
        pc.params,
        pc.lambda_lower,
        d[2]
    );
    // Slack absorbs quadrature noise in the Student-t CDF and rounding
    // when the distances sit at the floating-point floor.
    const SLACK: f64 = 1e-5;
    assert!(
        d[0] >= d[1] - SLACK && d[1] >= d[2] - SLACK,
        "{} {:?}: non-monotone approach {:?}",
        pc.family,
        pc.params,
        d
    );
}
