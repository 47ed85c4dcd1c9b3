//! Per-asset risk decomposition and its class/period aggregation.
//!
//! Each asset's five vine edges connect it, in order, to its own class
//! index, to the market index, and to the three remaining class
//! indices. The dependence strengths (|τ| or lower-tail λ) along those
//! edges split unit risk into three shares:
//!
//! - ESG share: own-class edge over the total,
//! - market share: market edge over the total,
//! - idiosyncratic share: the remainder.
//!
//! Shares are computed from the model-implied edge τ, from the
//! empirical conditional τ̂ of the edge's pseudo-data, and from the
//! fitted lower tail coefficients; a zero λ-denominator marks the
//! asset's λ shares as degenerate rather than failing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::EsgClass;
use crate::vine::{VarId, VineModel};

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("asset index {asset} out of range (model has {n} assets)")]
    AssetOutOfRange { asset: usize, n: usize },
    #[error("expected {expected} asset ids, got {got}")]
    IdCount { expected: usize, got: usize },
}

/// Dependence measures of one of an asset's five edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDependence {
    /// The partner variable (class index or market).
    pub partner: VarId,
    /// Conditioning variables in chain order.
    pub conditioning: Vec<VarId>,
    /// Model-implied Kendall's τ of the fitted edge copula.
    pub tau: f64,
    /// Empirical Kendall's τ̂ of the edge's conditional pseudo-data.
    pub tau_emp: f64,
    /// Lower tail coefficient of the fitted edge copula.
    pub lambda: f64,
}

/// An asset's five edges in canonical chain order: own class index,
/// then M, then the three remaining indices tree by tree.
pub fn edge_dependence(
    model: &VineModel,
    asset: usize,
) -> Result<[EdgeDependence; 5], RiskError> {
    let s = &model.structure;
    if asset >= s.n_assets {
        return Err(RiskError::AssetOutOfRange { asset, n: s.n_assets });
    }
    Ok(std::array::from_fn(|m| {
        let e = &s.trees[m][asset];
        debug_assert_eq!(e.conditioned.0, asset);
        let pc = &model.edge_copulas[m][asset];
        EdgeDependence {
            partner: e.conditioned.1,
            conditioning: e.conditioning.clone(),
            tau: pc.tau,
            tau_emp: model.edge_tau_emp[m][asset],
            lambda: pc.lambda_lower,
        }
    }))
}

/// A simplex of the three risk shares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShareTriple {
    pub esg: f64,
    pub market: f64,
    pub idio: f64,
}

impl ShareTriple {
    /// True when any share sits exactly on the simplex boundary.
    pub fn is_boundary(&self) -> bool {
        [self.esg, self.market, self.idio].iter().any(|&x| x == 0.0 || x == 1.0)
    }
}

/// Shares from five non-negative weights in chain order (ESG edge
/// first, market edge second); `None` when all weights vanish.
pub fn shares_from_weights(w: &[f64; 5]) -> Option<ShareTriple> {
    debug_assert!(w.iter().all(|&x| x >= 0.0));
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return None;
    }
    let esg = w[0] / total;
    let market = w[1] / total;
    Some(ShareTriple { esg, market, idio: (1.0 - esg - market).max(0.0) })
}

/// τ-based shares: absolute edge τ's in place of the weights.
pub fn risk_shares_tau(taus: &[f64; 5]) -> Option<ShareTriple> {
    shares_from_weights(&taus.map(f64::abs))
}

/// λ-based shares; all-zero tails are a degenerate value, not an error.
pub fn risk_shares_lambda(lambdas: &[f64; 5]) -> Option<ShareTriple> {
    shares_from_weights(lambdas)
}

/// One asset's full risk decomposition. Each variant is `None` when its
/// five edge measures all vanish (a degenerate denominator — recorded
/// as a flag, never an error, so a null model still yields rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRiskRow {
    pub asset: String,
    pub class: EsgClass,
    pub period: String,
    /// Model-implied τ shares.
    pub tau: Option<ShareTriple>,
    /// Shares from empirical conditional τ̂'s.
    pub tau_emp: Option<ShareTriple>,
    /// λ shares.
    pub lambda: Option<ShareTriple>,
}

impl AssetRiskRow {
    pub fn degenerate_tau(&self) -> bool {
        self.tau.is_none()
    }

    pub fn degenerate_lambda(&self) -> bool {
        self.lambda.is_none()
    }
}

/// Computes one asset's row from a fitted model.
pub fn asset_risk_row(
    model: &VineModel,
    asset: usize,
    asset_id: &str,
    period: &str,
) -> Result<AssetRiskRow, RiskError> {
    let edges = edge_dependence(model, asset)?;
    let taus: [f64; 5] = std::array::from_fn(|i| edges[i].tau);
    let taus_emp: [f64; 5] = std::array::from_fn(|i| edges[i].tau_emp);
    let lambdas: [f64; 5] = std::array::from_fn(|i| edges[i].lambda);
    Ok(AssetRiskRow {
        asset: asset_id.to_string(),
        class: model.structure.classes[asset],
        period: period.to_string(),
        tau: risk_shares_tau(&taus),
        tau_emp: risk_shares_tau(&taus_emp),
        lambda: risk_shares_lambda(&lambdas),
    })
}

/// Rows for every asset of a model.
pub fn risk_report(
    model: &VineModel,
    asset_ids: &[String],
    period: &str,
) -> Result<Vec<AssetRiskRow>, RiskError> {
    if asset_ids.len() != model.structure.n_assets {
        return Err(RiskError::IdCount {
            expected: model.structure.n_assets,
            got: asset_ids.len(),
        });
    }
    (0..model.structure.n_assets)
        .map(|j| asset_risk_row(model, j, &asset_ids[j], period))
        .collect()
}

// -------------------------------------------------------------- aggregation

/// How λ shares enter the aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaPolicy {
    /// Every non-degenerate λ share counts.
    IncludeAll,
    /// Shares exactly 0 or exactly 1 are dropped per component.
    DropZerosAndOnes,
}

/// Which share variant a statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureFamily {
    Tau,
    TauEmp,
    Lambda,
}

/// The three components of a share triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    Esg,
    Market,
    Idio,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Esg, Component::Market, Component::Idio];

    /// Report label ("ESG Risk", …).
    pub fn label(self) -> &'static str {
        match self {
            Component::Esg => "ESG Risk",
            Component::Market => "Market Risk",
            Component::Idio => "Idiosyncratic Risk",
        }
    }

    fn pick(self, t: &ShareTriple) -> f64 {
        match self {
            Component::Esg => t.esg,
            Component::Market => t.market,
            Component::Idio => t.idio,
        }
    }
}

/// Mean and sample standard deviation of one aggregation cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

fn cell_stat(values: &[f64]) -> Option<CellStat> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Some(CellStat { mean, std, n })
}

/// Aggregated statistics keyed by (period, class, family, component);
/// a missing key means the cell was empty after exclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskAggregate {
    pub policy: LambdaPolicy,
    /// Periods in first-seen order.
    pub periods: Vec<String>,
    pub cells: BTreeMap<(String, EsgClass, MeasureFamily, Component), CellStat>,
}

impl RiskAggregate {
    pub fn cell(
        &self,
        period: &str,
        class: EsgClass,
        family: MeasureFamily,
        component: Component,
    ) -> Option<&CellStat> {
        self.cells.get(&(period.to_string(), class, family, component))
    }
}

/// Per-(class, period) means and sample standard deviations of every
/// measure; λ aggregation follows `policy` and skips degenerate rows.
pub fn aggregate(rows: &[AssetRiskRow], policy: LambdaPolicy) -> RiskAggregate {
    let mut periods: Vec<String> = Vec::new();
    for r in rows {
        if !periods.contains(&r.period) {
            periods.push(r.period.clone());
        }
    }
    let mut cells = BTreeMap::new();
    for period in &periods {
        for class in EsgClass::ALL {
            let members: Vec<&AssetRiskRow> =
                rows.iter().filter(|r| &r.period == period && r.class == class).collect();
            for component in Component::ALL {
                let pick = |get: fn(&AssetRiskRow) -> Option<&ShareTriple>| -> Vec<f64> {
                    members
                        .iter()
                        .filter_map(|r| get(r))
                        .map(|t| component.pick(t))
                        .collect()
                };
                let tau = pick(|r| r.tau.as_ref());
                let tau_emp = pick(|r| r.tau_emp.as_ref());
                let lambda: Vec<f64> = pick(|r| r.lambda.as_ref())
                    .into_iter()
                    .filter(|&x| {
                        policy == LambdaPolicy::IncludeAll || (x != 0.0 && x != 1.0)
                    })
                    .collect();
                for (family, values) in [
                    (MeasureFamily::Tau, tau),
                    (MeasureFamily::TauEmp, tau_emp),
                    (MeasureFamily::Lambda, lambda),
                ] {
                    if let Some(stat) = cell_stat(&values) {
                        cells.insert((period.clone(), class, family, component), stat);
                    }
                }
            }
        }
    }
    RiskAggregate { policy, periods, cells }
}

// ---------------------------------------------------------------- rendering

fn fmt_share(x: f64) -> String {
    format!("{x:.6}")
}

/// Per-asset report CSV: six shares plus the empirical-τ̂ variant and
/// the degeneracy flags; missing shares render as `NA`.
pub fn render_risk_report(rows: &[AssetRiskRow]) -> String {
    let triple = |t: &Option<ShareTriple>| match t {
        Some(t) => format!("{},{},{}", fmt_share(t.esg), fmt_share(t.market), fmt_share(t.idio)),
        None => "NA,NA,NA".into(),
    };
    let mut out = String::from(
        "asset,class,period,r_esg_tau,r_market_tau,r_idio_tau,\
         r_esg_tau_emp,r_market_tau_emp,r_idio_tau_emp,\
         r_esg_lambda,r_market_lambda,r_idio_lambda,\
         degenerate_tau,degenerate_lambda\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.asset,
            r.class,
            r.period,
            triple(&r.tau),
            triple(&r.tau_emp),
            triple(&r.lambda),
            r.degenerate_tau(),
            r.degenerate_lambda(),
        ));
    }
    out
}

fn render_aggregate(agg: &RiskAggregate, family: MeasureFamily, stds: bool) -> String {
    let mut out = String::from("Type of Risk,Year,A,B,C,D\n");
    for component in Component::ALL {
        for period in &agg.periods {
            out.push_str(component.label());
            out.push(',');
            out.push_str(period);
            for class in EsgClass::ALL {
                out.push(',');
                match agg.cell(period, class, family, component) {
                    Some(s) => {
                        out.push_str(&format!("{:.3}", if stds { s.std } else { s.mean }))
                    }
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Mean-share table in the published layout (rows: measure × period,
/// columns: classes A–D).
pub fn render_aggregate_means(agg: &RiskAggregate, family: MeasureFamily) -> String {
    render_aggregate(agg, family, false)
}

/// Standard-deviation companion table, same layout.
pub fn render_aggregate_stds(agg: &RiskAggregate, family: MeasureFamily) -> String {
    render_aggregate(agg, family, true)
}

/// Long-format (one observation per row) CSV for box-plot tooling.
pub fn render_long_format(rows: &[AssetRiskRow]) -> String {
    let mut out = String::from("asset,class,period,measure,value\n");
    let mut push = |r: &AssetRiskRow, measure: &str, value: f64| {
        out.push_str(&format!(
            "{},{},{},{measure},{}\n",
            r.asset,
            r.class,
            r.period,
            fmt_share(value)
        ));
    };
    for r in rows {
        for (tag, t) in
            [("tau", &r.tau), ("tau_emp", &r.tau_emp), ("lambda", &r.lambda)]
        {
            if let Some(t) = t {
                push(r, &format!("esg_{tag}"), t.esg);
                push(r, &format!("market_{tag}"), t.market);
                push(r, &format!("idio_{tag}"), t.idio);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{BaseFamily, FamilyId, PairCopula, Rotation};
    use crate::vine::{build_structure, VineModel};

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn tau_shares_match_hand_arithmetic() {
        let s = risk_shares_tau(&[0.4, 0.1, 0.05, 0.03, 0.02]).unwrap();
        approx(s.esg, 0.6667, 5e-5);
        approx(s.market, 0.1667, 5e-5);
        approx(s.idio, 0.1667, 5e-5);

        let single = risk_shares_tau(&[0.7, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!((single.esg, single.market, single.idio), (1.0, 0.0, 0.0));

        // Signs are irrelevant: |τ̂| enters the ratios.
        let signed = risk_shares_tau(&[0.3, -0.3, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!((signed.esg, signed.market, signed.idio), (0.5, 0.5, 0.0));

        assert!(risk_shares_tau(&[0.0; 5]).is_none());
    }

    #[test]
    fn lambda_shares_match_hand_arithmetic() {
        let b = risk_shares_lambda(&[0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!((b.esg, b.market, b.idio), (1.0, 0.0, 0.0));
        assert!(b.is_boundary());

        assert!(risk_shares_lambda(&[0.0; 5]).is_none());

        let s = risk_shares_lambda(&[0.4, 0.04, 0.01, 0.01, 0.04]).unwrap();
        approx(s.esg, 0.8, 1e-12);
        approx(s.market, 0.08, 1e-12);
        approx(s.idio, 0.12, 1e-12);
        assert!(!s.is_boundary());
    }

    #[test]
    fn shares_live_on_the_simplex_and_scale_invariantly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        for _ in 0..200 {
            let w: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
            let s = shares_from_weights(&w).unwrap();
            assert!((s.esg + s.market + s.idio - 1.0).abs() <= 1e-12);
            for x in [s.esg, s.market, s.idio] {
                assert!((0.0..=1.0).contains(&x));
            }
            // Scale invariance.
            let c = 1.0 + rng.random::<f64>() * 9.0;
            let scaled = shares_from_weights(&w.map(|x| c * x)).unwrap();
            approx(scaled.esg, s.esg, 1e-12);
            approx(scaled.market, s.market, 1e-12);
            approx(scaled.idio, s.idio, 1e-12);
        }
        // Monotonicity: growing the first weight grows the ESG share.
        let base = [0.2, 0.3, 0.1, 0.1, 0.1];
        let mut prev = shares_from_weights(&base).unwrap().esg;
        for bump in [0.3, 0.5, 0.9] {
            let mut w = base;
            w[0] = bump;
            let cur = shares_from_weights(&w).unwrap().esg;
            assert!(cur > prev);
            prev = cur;
        }
    }

    /// The minimal template with one asset per class, each edge set to a
    /// specified copula per tree.
    fn model_with(make: impl Fn(usize, usize) -> PairCopula) -> VineModel {
        let classes = vec![EsgClass::A, EsgClass::B, EsgClass::C, EsgClass::D];
        let s = build_structure(&classes).unwrap();
        let copulas: Vec<Vec<PairCopula>> = s
            .trees
            .iter()
            .enumerate()
            .map(|(t, tree)| (0..tree.len()).map(|e| make(t, e)).collect())
            .collect();
        VineModel::from_copulas(s, copulas, 100, "truth").unwrap()
    }

    #[test]
    fn edge_dependence_follows_the_canonical_chain_order() {
        let model = model_with(|_, _| PairCopula::independence());
        let s = &model.structure;
        // Asset 0 is class A, asset 3 class D.
        let a = edge_dependence(&model, 0).unwrap();
        let partners_a: Vec<VarId> = a.iter().map(|e| e.partner).collect();
        assert_eq!(
            partners_a,
            vec![
                s.index_var(EsgClass::A),
                s.market_var(),
                s.index_var(EsgClass::B),
                s.index_var(EsgClass::C),
                s.index_var(EsgClass::D),
            ]
        );
        assert_eq!(
            a[4].conditioning,
            vec![
                s.index_var(EsgClass::A),
                s.market_var(),
                s.index_var(EsgClass::B),
                s.index_var(EsgClass::C),
            ]
        );

        let d = edge_dependence(&model, 3).unwrap();
        let partners_d: Vec<VarId> = d.iter().map(|e| e.partner).collect();
        assert_eq!(
            partners_d,
            vec![
                s.index_var(EsgClass::D),
                s.market_var(),
                s.index_var(EsgClass::C),
                s.index_var(EsgClass::B),
                s.index_var(EsgClass::A),
            ]
        );
        assert_eq!(
            d[4].conditioning,
            vec![
                s.index_var(EsgClass::D),
                s.market_var(),
                s.index_var(EsgClass::C),
                s.index_var(EsgClass::B),
            ]
        );

        // All-independence: every τ and λ vanishes, so every variant is
        // flagged degenerate and no row errors out.
        assert!(a.iter().all(|e| e.tau == 0.0 && e.lambda == 0.0));
        let null_row = asset_risk_row(&model, 0, "a0", "p").unwrap();
        assert!(null_row.degenerate_tau());
        assert!(null_row.degenerate_lambda());
        assert!(null_row.tau_emp.is_none());

        assert!(matches!(
            edge_dependence(&model, 4),
            Err(RiskError::AssetOutOfRange { asset: 4, n: 4 })
        ));
    }

    #[test]
    fn pipeline_shares_equal_direct_substitution() {
        // Hand-set edge copulas with known closed-form τ and λ.
        let clayton = PairCopula::new(FamilyId::unrotated(BaseFamily::Clayton), vec![2.0]).unwrap();
        let gauss = |rho: f64| {
            PairCopula::new(FamilyId::unrotated(BaseFamily::Gaussian), vec![rho]).unwrap()
        };
        let gumbel180 = PairCopula::new(
            FamilyId::new(BaseFamily::Gumbel, Rotation::R180).unwrap(),
            vec![1.5],
        )
        .unwrap();
        let frank = PairCopula::new(FamilyId::unrotated(BaseFamily::Frank), vec![4.0]).unwrap();

        let model = model_with(|tree, _| match tree {
            0 => clayton.clone(),
            1 => gauss(0.5).clone(),
            2 => gumbel180.clone(),
            3 => frank.clone(),
            _ => gauss(-0.2).clone(),
        });

        // Independent arithmetic from the closed forms.
        let tau_clayton = 2.0 / (2.0 + 2.0); // θ/(θ+2)
        let tau_gauss = |rho: f64| (2.0 / std::f64::consts::PI) * rho.asin();
        let tau_gumbel = 1.0 - 1.0 / 1.5;
        let tau_frank = frank.tau; // Debye form, taken from the fitted object
        let taus = [
            tau_clayton,
            tau_gauss(0.5),
            tau_gumbel,
            tau_frank,
            tau_gauss(-0.2),
        ];
        let lam = [2f64.powf(-0.5), 0.0, 2.0 - 2f64.powf(1.0 / 1.5), 0.0, 0.0];
        let sum_t: f64 = taus.iter().map(|t| t.abs()).sum();
        let sum_l: f64 = lam.iter().sum();

        let row = asset_risk_row(&model, 1, "b", "p").unwrap();
        let t = row.tau.unwrap();
        approx(t.esg, taus[0].abs() / sum_t, 1e-10);
        approx(t.market, taus[1].abs() / sum_t, 1e-10);
        approx(t.idio, 1.0 - (taus[0].abs() + taus[1].abs()) / sum_t, 1e-10);
        let l = row.lambda.unwrap();
        approx(l.esg, lam[0] / sum_l, 1e-10);
        approx(l.market, lam[1] / sum_l, 1e-10);
        approx(l.idio, 1.0 - (lam[0] + lam[1]) / sum_l, 1e-10);
        // The assembled model carries no pseudo-data, so the empirical
        // variant is degenerate by construction.
        assert!(row.tau_emp.is_none());
    }

    #[test]
    fn all_gaussian_edges_make_lambda_degenerate() {
        let model = model_with(|_, _| {
            PairCopula::new(FamilyId::unrotated(BaseFamily::Gaussian), vec![0.4]).unwrap()
        });
        let ids: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let rows = risk_report(&model, &ids, "p").unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.degenerate_lambda());
            let t = r.tau.as_ref().unwrap();
            assert!((t.esg + t.market + t.idio - 1.0).abs() <= 1e-12);
        }
        // Degenerate λ rows vanish from λ aggregation cells.
        let agg = aggregate(&rows, LambdaPolicy::IncludeAll);
        assert!(agg
            .cell("p", EsgClass::A, MeasureFamily::Lambda, Component::Esg)
            .is_none());
        assert!(agg
            .cell("p", EsgClass::A, MeasureFamily::Tau, Component::Esg)
            .is_some());
    }

    fn row(period: &str, class: EsgClass, esg: f64) -> AssetRiskRow {
        let t = ShareTriple { esg, market: (1.0 - esg) / 2.0, idio: (1.0 - esg) / 2.0 };
        AssetRiskRow {
            asset: format!("x-{esg}"),
            class,
            period: period.into(),
            tau: Some(t),
            tau_emp: Some(t),
            lambda: Some(t),
        }
    }

    #[test]
    fn aggregation_means_and_stds_are_sample_statistics() {
        let rows = vec![
            row("p", EsgClass::A, 0.2),
            row("p", EsgClass::A, 0.4),
            row("p", EsgClass::B, 0.3),
            row("p", EsgClass::B, 0.3),
        ];
        let agg = aggregate(&rows, LambdaPolicy::IncludeAll);
        let a = agg.cell("p", EsgClass::A, MeasureFamily::Tau, Component::Esg).unwrap();
        approx(a.mean, 0.3, 1e-12);
        approx(a.std, 0.1414, 5e-5); // sample std with n−1
        assert_eq!(a.n, 2);
        let b = agg.cell("p", EsgClass::B, MeasureFamily::Tau, Component::Esg).unwrap();
        assert_eq!(b.std, 0.0); // identical rows
        // Classes C/D have no rows: cells are missing, not zero.
        assert!(agg.cell("p", EsgClass::C, MeasureFamily::Tau, Component::Esg).is_none());
    }

    #[test]
    fn lambda_policy_drops_exact_boundary_shares() {
        let mut boundary = row("p", EsgClass::A, 1.0); // esg exactly 1
        boundary.lambda = Some(ShareTriple { esg: 1.0, market: 0.0, idio: 0.0 });
        let interior = row("p", EsgClass::A, 0.5);
        let rows = vec![boundary, interior];

        let keep = aggregate(&rows, LambdaPolicy::IncludeAll);
        let c = keep.cell("p", EsgClass::A, MeasureFamily::Lambda, Component::Esg).unwrap();
        assert_eq!(c.n, 2);
        approx(c.mean, 0.75, 1e-12);

        let drop = aggregate(&rows, LambdaPolicy::DropZerosAndOnes);
        let c = drop.cell("p", EsgClass::A, MeasureFamily::Lambda, Component::Esg).unwrap();
        assert_eq!(c.n, 1);
        approx(c.mean, 0.5, 1e-12);
        // τ aggregation ignores the λ policy.
        let t = drop.cell("p", EsgClass::A, MeasureFamily::Tau, Component::Esg).unwrap();
        assert_eq!(t.n, 2);
    }

    #[test]
    fn aggregate_table_renders_the_published_layout() {
        // Force the published first-row means via two equal rows per class.
        let means = [(EsgClass::A, 0.696), (EsgClass::B, 0.589), (EsgClass::C, 0.706), (EsgClass::D, 0.614)];
        let mut rows = Vec::new();
        for (class, mean) in means {
            rows.push(row("2006-2010", class, mean));
        }
        let agg = aggregate(&rows, LambdaPolicy::IncludeAll);
        let rendered = render_aggregate_means(&agg, MeasureFamily::Tau);
        let mut lines = rendered.lines();
        assert_eq!(lines.next().unwrap(), "Type of Risk,Year,A,B,C,D");
        assert_eq!(lines.next().unwrap(), "ESG Risk,2006-2010,0.696,0.589,0.706,0.614");

        let stds = render_aggregate_stds(&agg, MeasureFamily::Tau);
        assert!(stds.starts_with("Type of Risk,Year,A,B,C,D\nESG Risk,2006-2010,0.000,"));
    }

    #[test]
    fn report_and_long_format_render_flags_and_missing_values() {
        let mut rows = vec![row("p", EsgClass::A, 0.5)];
        rows[0].lambda = None;
        let report = render_risk_report(&rows);
        let mut lines = report.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("asset,class,period,r_esg_tau"));
        assert!(header.ends_with("degenerate_lambda"));
        let line = lines.next().unwrap();
        assert!(line.ends_with("NA,NA,NA,false,true"), "{line}");

        let long = render_long_format(&rows);
        assert!(long.contains("esg_tau,0.500000"));
        assert!(long.contains("idio_tau_emp,0.250000"));
        assert!(!long.contains("esg_lambda"), "degenerate λ row must be absent");
    }
}
