//! `esgvine classify` — assign ESG classes, build class indices, and
//! write the classification artifacts.

use esgvine::panel::{self, AssetPanel, EsgClass, PanelError};

use crate::config::Ctx;
use crate::errors::CliError;
use crate::output::{csv_writer, flush};

/// Loads and validates the configured panel.
pub fn load(ctx: &Ctx) -> Result<AssetPanel, CliError> {
    let i = &ctx.config.inputs;
    Ok(panel::load_panel(&i.returns, &i.esg, &i.meta, &i.market, &ctx.spec)?)
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let panel = load(ctx)?;
    let mean_scores = panel::mean_esg(&panel, &ctx.spec)?;
    let classes = panel::assign_classes(&panel, &mean_scores, &ctx.spec)?;

    let path = ctx.out.join("classes.csv");
    let mut w = csv_writer(&path, &ctx.digest)?;
    let werr = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["period", "asset_id", "class", "mean_score"]).map_err(werr)?;
    for (q, period) in ctx.spec.periods.iter().enumerate() {
        for (j, id) in panel.asset_ids.iter().enumerate() {
            w.write_record([
                period.label.as_str(),
                id,
                &classes[q][j].to_string(),
                &format!("{}", mean_scores[q][j]),
            ])
            .map_err(werr)?;
        }
    }
    flush(w, &path)?;

    for (q, period) in ctx.spec.periods.iter().enumerate() {
        let mut counts = [0usize; 4];
        for class in &classes[q] {
            counts[class.index()] += 1;
        }
        println!(
            "{}: A={} B={} C={} D={}",
            period.label, counts[0], counts[1], counts[2], counts[3]
        );
    }

    // Weights and index series need every class populated; an empty
    // class (possible in threshold mode) downgrades those artifacts to
    // a flagged skip rather than a failure.
    match panel::class_weights(&panel, &classes, &ctx.spec) {
        Ok(weights) => {
            write_weights(ctx, &panel, &weights)?;
            let indices = panel::class_indices(&panel, &classes, &weights);
            write_indices(ctx, &panel, &indices)?;
            write_var_table(ctx, &panel, &indices)?;
        }
        Err(PanelError::EmptyClass { class, period }) => {
            println!(
                "warning: class {class} is empty in period {period}; \
                 weights.csv, indices.csv and var_table.csv skipped"
            );
        }
        Err(e) => return Err(e.into()),
    }

    write_esg_dist(ctx, &panel)?;
    Ok(())
}

fn write_weights(ctx: &Ctx, panel: &AssetPanel, weights: &[Vec<f64>]) -> Result<(), CliError> {
    let path = ctx.out.join("weights.csv");
    let mut w = csv_writer(&path, &ctx.digest)?;
    let werr = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["period", "asset_id", "weight"]).map_err(werr)?;
    for (q, period) in ctx.spec.periods.iter().enumerate() {
        for (j, id) in panel.asset_ids.iter().enumerate() {
            w.write_record([period.label.as_str(), id, &format!("{}", weights[q][j])])
                .map_err(werr)?;
        }
    }
    flush(w, &path)
}

fn write_indices(
    ctx: &Ctx,
    panel: &AssetPanel,
    indices: &[[Vec<f64>; 4]],
) -> Result<(), CliError> {
    let path = ctx.out.join("indices.csv");
    let mut w = csv_writer(&path, &ctx.digest)?;
    let werr = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["period", "date", "I_A", "I_B", "I_C", "I_D", "M"]).map_err(werr)?;
    for (q, period) in ctx.spec.periods.iter().enumerate() {
        let days = &panel.period_days[q];
        for (t, day) in days.clone().enumerate() {
            w.write_record([
                period.label.as_str(),
                &panel.calendar.dates[day],
                &format!("{}", indices[q][0][t]),
                &format!("{}", indices[q][1][t]),
                &format!("{}", indices[q][2][t]),
                &format!("{}", indices[q][3][t]),
                &format!("{}", panel.market_returns[day]),
            ])
            .map_err(werr)?;
        }
    }
    flush(w, &path)
}

fn write_var_table(
    ctx: &Ctx,
    panel: &AssetPanel,
    indices: &[[Vec<f64>; 4]],
) -> Result<(), CliError> {
    let path = ctx.out.join("var_table.csv");
    let mut w = csv_writer(&path, &ctx.digest)?;
    let werr = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["period", "series", "level", "var", "es"]).map_err(werr)?;
    for (q, period) in ctx.spec.periods.iter().enumerate() {
        let market = panel.market_series(&panel.period_days[q]);
        let series: Vec<(String, &[f64])> = EsgClass::ALL
            .iter()
            .map(|c| (format!("I_{c}"), indices[q][c.index()].as_slice()))
            .chain(std::iter::once(("M".to_string(), market.as_slice())))
            .collect();
        for (name, xs) in series {
            for &level in &ctx.config.model.var_levels {
                let (var, es) = panel::empirical_var_es(xs, level)?;
                w.write_record([
                    period.label.as_str(),
                    &name,
                    &format!("{level}"),
                    &format!("{var}"),
                    &format!("{es}"),
                ])
                .map_err(werr)?;
            }
        }
    }
    flush(w, &path)
}

fn write_esg_dist(ctx: &Ctx, panel: &AssetPanel) -> Result<(), CliError> {
    let path = ctx.out.join("esg_dist.csv");
    let mut w = csv_writer(&path, &ctx.digest)?;
    let werr = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["year", "mean", "min", "q25", "median", "q75", "max"]).map_err(werr)?;
    for s in panel::esg_distribution_summary(panel, &ctx.spec) {
        w.write_record([
            &format!("{}", s.year),
            &format!("{}", s.mean),
            &format!("{}", s.min),
            &format!("{}", s.q25),
            &format!("{}", s.median),
            &format!("{}", s.q75),
            &format!("{}", s.max),
        ])
        .map_err(werr)?;
    }
    flush(w, &path)
}
