//! `esgvine fit` — GARCH-filter every series, fit the configured vine
//! models per period, and write archives, the model comparison, and
//! per-tree family censuses.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use esgvine::marginals::{fit_garch_t, MarginalFit};
use esgvine::panel::{self, AssetPanel, EsgClass};
use esgvine::store::{self, ClassificationSection, FitStatistics, MarginalsSection, ModelArchive, ReportsSection};
use esgvine::vine::{
    self, build_structure, compare_models, family_census, fit_vine, render_census,
    render_comparison, ComparisonRow, FamilyId, ModelKind, VineModel, DEFAULT_PSI0,
};

use crate::classify;
use crate::config::Ctx;
use crate::errors::CliError;
use crate::output::{read_csv, write_table};

/// Classification handoff parsed back into panel order.
pub struct Handoff {
    pub classes: Vec<Vec<EsgClass>>,
    pub weights: Vec<Vec<f64>>,
    pub mean_scores: Vec<Vec<f64>>,
}

fn parse_class(s: &str) -> Result<EsgClass, CliError> {
    match s {
        "A" => Ok(EsgClass::A),
        "B" => Ok(EsgClass::B),
        "C" => Ok(EsgClass::C),
        "D" => Ok(EsgClass::D),
        other => Err(CliError::Data(format!("classes.csv: unknown class {other:?}"))),
    }
}

fn parse_f64(file: &Path, s: &str) -> Result<f64, CliError> {
    s.parse()
        .map_err(|_| CliError::Data(format!("{}: bad number {s:?}", file.display())))
}

/// Reads classes.csv and weights.csv back, validating that every
/// (period, asset) cell is present exactly once.
pub fn read_handoff(ctx: &Ctx, panel: &AssetPanel) -> Result<Handoff, CliError> {
    let id_index: BTreeMap<&str, usize> = panel
        .asset_ids
        .iter()
        .enumerate()
        .map(|(j, id)| (id.as_str(), j))
        .collect();
    let period_index: BTreeMap<&str, usize> = ctx
        .spec
        .periods
        .iter()
        .enumerate()
        .map(|(q, p)| (p.label.as_str(), q))
        .collect();
    let n = panel.n_assets();
    let n_periods = ctx.spec.periods.len();

    let cell = |file: &Path, rec: &csv::StringRecord, want: usize| -> Result<(usize, usize), CliError> {
        if rec.len() != want {
            return Err(CliError::Data(format!(
                "{}: expected {want} fields, got {}",
                file.display(),
                rec.len()
            )));
        }
        let q = *period_index.get(&rec[0]).ok_or_else(|| {
            CliError::Data(format!("{}: unknown period {:?}", file.display(), &rec[0]))
        })?;
        let j = *id_index.get(&rec[1]).ok_or_else(|| {
            CliError::Data(format!("{}: unknown asset {:?}", file.display(), &rec[1]))
        })?;
        Ok((q, j))
    };

    let classes_path = ctx.out.join("classes.csv");
    let (_, rows) = read_csv(&classes_path, "run `esgvine classify` first")?;
    let mut classes = vec![vec![None; n]; n_periods];
    let mut mean_scores = vec![vec![f64::NAN; n]; n_periods];
    for rec in &rows {
        let (q, j) = cell(&classes_path, rec, 4)?;
        if classes[q][j].replace(parse_class(&rec[2])?).is_some() {
            return Err(CliError::Data(format!(
                "{}: duplicate row for {} in {}",
                classes_path.display(),
                &rec[1],
                &rec[0]
            )));
        }
        mean_scores[q][j] = parse_f64(&classes_path, &rec[3])?;
    }

    let weights_path = ctx.out.join("weights.csv");
    let (_, rows) = read_csv(&weights_path, "run `esgvine classify` first")?;
    let mut weights = vec![vec![None; n]; n_periods];
    for rec in &rows {
        let (q, j) = cell(&weights_path, rec, 3)?;
        if weights[q][j].replace(parse_f64(&weights_path, &rec[2])?).is_some() {
            return Err(CliError::Data(format!(
                "{}: duplicate row for {} in {}",
                weights_path.display(),
                &rec[1],
                &rec[0]
            )));
        }
    }

    let mut out = Handoff {
        classes: Vec::with_capacity(n_periods),
        weights: Vec::with_capacity(n_periods),
        mean_scores,
    };
    for q in 0..n_periods {
        let label = &ctx.spec.periods[q].label;
        let complete: Option<Vec<EsgClass>> = classes[q].iter().copied().collect();
        out.classes.push(complete.ok_or_else(|| {
            CliError::Data(format!("classes.csv is missing assets for period {label}"))
        })?);
        let complete: Option<Vec<f64>> = weights[q].iter().copied().collect();
        out.weights.push(complete.ok_or_else(|| {
            CliError::Data(format!("weights.csv is missing assets for period {label}"))
        })?);
    }
    Ok(out)
}

/// Variable names in vine order: assets, the four class indices, M.
pub fn variable_names(panel: &AssetPanel) -> Vec<String> {
    panel
        .asset_ids
        .iter()
        .cloned()
        .chain(["I_A", "I_B", "I_C", "I_D", "M"].map(String::from))
        .collect()
}

/// GARCH-filters every series of one period into pseudo-copula data.
fn fit_marginals(
    series: &[Vec<f64>],
    names: &[String],
    period: &str,
) -> Result<Vec<MarginalFit>, CliError> {
    series
        .par_iter()
        .zip(names)
        .map(|(xs, name)| {
            fit_garch_t(xs).map_err(|e| {
                CliError::Numeric(format!("marginal fit for {name} in {period}: {e}"))
            })
        })
        .collect()
}

pub fn archive_path(out: &Path, period: &str, kind: ModelKind) -> std::path::PathBuf {
    out.join(format!("model_{period}_{}.json", kind.label()))
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let panel = classify::load(ctx)?;
    let handoff = read_handoff(ctx, &panel)?;
    let indices = panel::class_indices(&panel, &handoff.classes, &handoff.weights);
    let panel_digest = store::panel_digest(&ctx.config.inputs.paths())?;
    let kinds = ctx.config.model.catalog.kinds();
    let psi0 = ctx.config.model.psi0;
    let names = variable_names(&panel);

    let mut comparison: Vec<ComparisonRow> = Vec::new();
    // catalog label → per-period, per-tree censuses.
    let mut censuses: BTreeMap<&'static str, Vec<[Vec<(FamilyId, usize)>; 5]>> = BTreeMap::new();

    for (q, period) in ctx.spec.periods.iter().enumerate() {
        let days = &panel.period_days[q];
        let mut series: Vec<Vec<f64>> = (0..panel.n_assets())
            .map(|j| panel.asset_series(j, days))
            .collect();
        for k in 0..4 {
            series.push(indices[q][k].clone());
        }
        series.push(panel.market_series(days));

        let fits = fit_marginals(&series, &names, &period.label)?;
        let u: Vec<Vec<f64>> = fits.iter().map(|f| f.u.clone()).collect();
        let structure = build_structure(&handoff.classes[q])?;

        let mut models: Vec<VineModel> = Vec::with_capacity(kinds.len());
        for &kind in &kinds {
            let mut model = fit_vine(&u, &structure, kind)?;
            if psi0 != DEFAULT_PSI0 {
                model.mbic = vine::mbic(&model, psi0);
            }
            let archive = ModelArchive {
                format_version: store::FORMAT_VERSION,
                panel_digest: panel_digest.clone(),
                classification: ClassificationSection {
                    period: period.clone(),
                    mode: ctx.spec.classification_mode,
                    asset_ids: panel.asset_ids.clone(),
                    classes: handoff.classes[q].clone(),
                    mean_scores: handoff.mean_scores[q].clone(),
                    weights: handoff.weights[q].clone(),
                },
                marginals: MarginalsSection {
                    variable_names: names.clone(),
                    fits: fits.iter().map(Into::into).collect(),
                },
                vine: model.clone(),
                fit_statistics: FitStatistics::from_model(&model, psi0),
                reports: ReportsSection::default(),
            };
            store::save(&archive, &archive_path(&ctx.out, &period.label, kind))?;
            censuses
                .entry(kind.label())
                .or_default()
                .push(std::array::from_fn(|t| family_census(&model, t + 1)));
            models.push(model);
        }

        let refs: Vec<&VineModel> = models.iter().collect();
        let rows = compare_models(&refs, &period.label)?;
        println!(
            "{}: best by mBIC is {} (logLik {:.2}, npars {}, mBIC {:.2})",
            period.label, rows[0].model, rows[0].loglik, rows[0].npars, rows[0].mbic
        );
        comparison.extend(rows);
    }

    write_table(&ctx.out.join("comparison.csv"), &ctx.digest, &render_comparison(&comparison))?;

    let labels: Vec<&str> = ctx.spec.periods.iter().map(|p| p.label.as_str()).collect();
    for (kind_label, per_period) in &censuses {
        for tree in 1..=5 {
            let one_tree: Vec<Vec<(FamilyId, usize)>> =
                per_period.iter().map(|c| c[tree - 1].clone()).collect();
            let body = render_census(&labels, &one_tree);
            let path = ctx.out.join(format!("census_{kind_label}_t{tree}.csv"));
            write_table(&path, &ctx.digest, &body)?;
        }
    }
    Ok(())
}
