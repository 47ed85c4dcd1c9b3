//! Data panel ingestion, ESG classification, and empirical risk measures.
//!
//! Loads the four CSV inputs (asset returns, yearly ESG scores, asset
//! metadata, market-index returns), validates them against a period
//! specification, and derives:
//!
//! - per-period mean ESG scores,
//! - ESG classes A–D, either by within-sector quartiles or by fixed
//!   score thresholds,
//! - market-cap class weights and the four weighted class-index return
//!   series per period,
//! - empirical VaR/ES (lower-quantile convention) and descriptive
//!   score statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while loading or transforming a panel.
#[derive(Debug, Error)]
pub enum PanelError {
    #[error("cannot read {file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error("{file}: {source}")]
    Csv { file: String, source: csv::Error },
    #[error("{file}: {detail}")]
    Schema { file: String, detail: String },
    #[error("duplicate asset id {id}")]
    DuplicateAsset { id: String },
    #[error("score out of range: asset {asset}, year {year}, got {score}")]
    ScoreOutOfRange { asset: String, year: i32, score: f64 },
    #[error("market cap must be positive: asset {asset}, got {cap}")]
    BadMarketCap { asset: String, cap: f64 },
    #[error("asset {asset} is missing {what}")]
    MissingField { asset: String, what: String },
    #[error("calendar gap: {detail}")]
    CalendarGap { detail: String },
    #[error("invalid period specification: {detail}")]
    BadPeriodSpec { detail: String },
    #[error("sector {sector} has {len} assets; quartile classes need at least 4")]
    SectorTooSmall { sector: String, len: usize },
    #[error("class {class} is empty in period {period}")]
    EmptyClass { class: EsgClass, period: String },
    #[error("empty series")]
    EmptySeries,
    #[error("level must lie in (0,1), got {0}")]
    BadLevel(f64),
}

/// ESG letter grade; `D` holds the lowest scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EsgClass {
    A,
    B,
    C,
    D,
}

impl EsgClass {
    /// All classes, best grade first.
    pub const ALL: [EsgClass; 4] = [EsgClass::A, EsgClass::B, EsgClass::C, EsgClass::D];

    /// Stable array index (A=0 … D=3).
    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for EsgClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EsgClass::A => "A",
            EsgClass::B => "B",
            EsgClass::C => "C",
            EsgClass::D => "D",
        })
    }
}

/// How mean scores map to classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassificationMode {
    /// Within-sector quartile blocks.
    Quartile,
    /// Fixed score cut points over all assets.
    Threshold,
}

/// A labelled, inclusive range of calendar years.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
}

impl Period {
    pub fn new(label: impl Into<String>, start_year: i32, end_year: i32) -> Period {
        Period { label: label.into(), start_year, end_year }
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start_year..=self.end_year
    }
}

/// The study layout: ordered periods plus the classification rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub periods: Vec<Period>,
    pub classification_mode: ClassificationMode,
    /// Threshold-mode cut points; grades are D = [0,t1), C = [t1,t2),
    /// B = [t2,t3), A = [t3,100].
    pub thresholds: [f64; 3],
}

impl Default for PeriodSpec {
    /// The shipped default: 2006–2010, 2011–2015, 2016–2018 with
    /// quartile classes and the (25, 50, 75) cuts.
    fn default() -> PeriodSpec {
        PeriodSpec {
            periods: vec![
                Period::new("2006-2010", 2006, 2010),
                Period::new("2011-2015", 2011, 2015),
                Period::new("2016-2018", 2016, 2018),
            ],
            classification_mode: ClassificationMode::Quartile,
            thresholds: [25.0, 50.0, 75.0],
        }
    }
}

impl PeriodSpec {
    /// Checks ordering, contiguity, and threshold monotonicity.
    pub fn validate(&self) -> Result<(), PanelError> {
        let bad = |detail: String| PanelError::BadPeriodSpec { detail };
        if self.periods.is_empty() {
            return Err(bad("no periods defined".into()));
        }
        for p in &self.periods {
            if p.start_year > p.end_year {
                return Err(bad(format!("period {} has start after end", p.label)));
            }
        }
        for w in self.periods.windows(2) {
            if w[1].start_year != w[0].end_year + 1 {
                return Err(bad(format!(
                    "periods {} and {} are not contiguous",
                    w[0].label, w[1].label
                )));
            }
        }
        let [t1, t2, t3] = self.thresholds;
        if !(0.0 < t1 && t1 < t2 && t2 < t3 && t3 < 100.0) {
            return Err(bad(format!("thresholds {:?} must increase strictly inside (0,100)", self.thresholds)));
        }
        Ok(())
    }

    /// Index of the period containing `year`, if any.
    pub fn period_of_year(&self, year: i32) -> Option<usize> {
        self.periods.iter().position(|p| p.contains_year(year))
    }
}

/// Trading-day calendar: ISO dates and their years, one entry per row
/// of the returns file.
#[derive(Debug, Clone, PartialEq)]
pub struct Calendar {
    pub dates: Vec<String>,
    pub years: Vec<i32>,
}

/// The validated data panel.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetPanel {
    /// Asset ids in returns-file column order.
    pub asset_ids: Vec<String>,
    /// Sector label per asset (aligned with `asset_ids`).
    pub sectors: Vec<String>,
    /// Market cap per asset (aligned with `asset_ids`), all positive.
    pub market_caps: Vec<f64>,
    /// Daily log returns, `returns[day][asset]`.
    pub returns: Vec<Vec<f64>>,
    /// Market-index log return per day.
    pub market_returns: Vec<f64>,
    /// Yearly ESG scores: year → per-asset scores in [0,100].
    pub esg_scores: BTreeMap<i32, Vec<f64>>,
    /// Trading-day calendar.
    pub calendar: Calendar,
    /// Day ranges per period, aligned with the spec's period list.
    pub period_days: Vec<Range<usize>>,
}

impl AssetPanel {
    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_days(&self) -> usize {
        self.returns.len()
    }

    /// One asset's return series over a day range.
    pub fn asset_series(&self, asset: usize, days: &Range<usize>) -> Vec<f64> {
        self.returns[days.clone()].iter().map(|row| row[asset]).collect()
    }

    /// The market series over a day range.
    pub fn market_series(&self, days: &Range<usize>) -> Vec<f64> {
        self.market_returns[days.clone()].to_vec()
    }
}

/// Classes, weights, and class-index series for one panel and spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsgClassification {
    /// `mean_scores[period][asset]`.
    pub mean_scores: Vec<Vec<f64>>,
    /// `classes[period][asset]`.
    pub classes: Vec<Vec<EsgClass>>,
    /// Market-cap weight of each asset within its (class, period);
    /// `weights[period][asset]`.
    pub weights: Vec<Vec<f64>>,
    /// `class_indices[period][class][day-in-period]`, classes ordered
    /// A, B, C, D via [`EsgClass::index`].
    pub class_indices: Vec<[Vec<f64>; 4]>,
}

// ------------------------------------------------------------------ loading

fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>), PanelError> {
    let file = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| PanelError::Csv { file: file.clone(), source })?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|source| PanelError::Csv { file: file.clone(), source })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec.map_err(|source| PanelError::Csv { file: file.clone(), source })?);
    }
    Ok((headers, rows))
}

fn parse_cell(file: &Path, row: usize, col: &str, raw: &str) -> Result<f64, PanelError> {
    raw.parse::<f64>().map_err(|_| PanelError::Schema {
        file: file.display().to_string(),
        detail: format!("non-numeric value {raw:?} at row {row}, column {col}"),
    })
}

/// Validates an ISO `YYYY-MM-DD` date string and extracts the year.
fn parse_date_year(file: &Path, row: usize, raw: &str) -> Result<i32, PanelError> {
    let bytes = raw.as_bytes();
    let ok = bytes.len() == 10
        && bytes[4] == b'-'
        && bytes[7] == b'-'
        && bytes.iter().enumerate().all(|(i, b)| matches!(i, 4 | 7) || b.is_ascii_digit());
    if !ok {
        return Err(PanelError::Schema {
            file: file.display().to_string(),
            detail: format!("bad date {raw:?} at row {row}; expected YYYY-MM-DD"),
        });
    }
    Ok(raw[..4].parse().expect("validated digits"))
}

/// Loads and cross-validates the four CSV inputs.
///
/// `returns`: header `date,<asset…>`; `esg`: header `year,<asset…>`;
/// `meta`: header `asset_id,sector,market_cap`; `market`: header
/// `date,return` on exactly the same dates as `returns`.
pub fn load_panel(
    returns_path: &Path,
    esg_path: &Path,
    meta_path: &Path,
    market_path: &Path,
    spec: &PeriodSpec,
) -> Result<AssetPanel, PanelError> {
    spec.validate()?;
    let schema = |file: &Path, detail: String| PanelError::Schema {
        file: file.display().to_string(),
        detail,
    };

    // Returns file: defines the asset universe and the calendar.
    let (headers, rows) = read_rows(returns_path)?;
    if headers.first().map(String::as_str) != Some("date") {
        return Err(schema(returns_path, "first column must be `date`".into()));
    }
    let asset_ids: Vec<String> = headers[1..].to_vec();
    if asset_ids.is_empty() {
        return Err(schema(returns_path, "no asset columns".into()));
    }
    let mut seen = BTreeSet::new();
    for id in &asset_ids {
        if !seen.insert(id.clone()) {
            return Err(PanelError::DuplicateAsset { id: id.clone() });
        }
    }
    let mut dates = Vec::with_capacity(rows.len());
    let mut years = Vec::with_capacity(rows.len());
    let mut returns = Vec::with_capacity(rows.len());
    for (i, rec) in rows.iter().enumerate() {
        if rec.len() != asset_ids.len() + 1 {
            return Err(schema(returns_path, format!("row {i}: wrong field count")));
        }
        let date = rec[0].to_string();
        years.push(parse_date_year(returns_path, i, &date)?);
        if let Some(prev) = dates.last() {
            if *prev >= date {
                return Err(PanelError::CalendarGap {
                    detail: format!("dates not strictly increasing at {date}"),
                });
            }
        }
        dates.push(date);
        let mut row = Vec::with_capacity(asset_ids.len());
        for (j, id) in asset_ids.iter().enumerate() {
            let v = parse_cell(returns_path, i, id, &rec[j + 1])?;
            if !v.is_finite() {
                return Err(schema(returns_path, format!("non-finite return for {id} at row {i}")));
            }
            row.push(v);
        }
        returns.push(row);
    }
    if returns.is_empty() {
        return Err(schema(returns_path, "no data rows".into()));
    }

    // Market file: one return per calendar day, dates must match.
    let (mheaders, mrows) = read_rows(market_path)?;
    if mheaders != ["date", "return"] {
        return Err(schema(market_path, "header must be `date,return`".into()));
    }
    if mrows.len() != dates.len() {
        return Err(PanelError::CalendarGap {
            detail: format!(
                "market file has {} days, returns file has {}",
                mrows.len(),
                dates.len()
            ),
        });
    }
    let mut market_returns = Vec::with_capacity(mrows.len());
    for (i, rec) in mrows.iter().enumerate() {
        if rec[0] != dates[i] {
            return Err(PanelError::CalendarGap {
                detail: format!("market date {} does not match returns date {}", &rec[0], dates[i]),
            });
        }
        let v = parse_cell(market_path, i, "return", &rec[1])?;
        if !v.is_finite() {
            return Err(schema(market_path, format!("non-finite market return at row {i}")));
        }
        market_returns.push(v);
    }

    // Metadata: sector and market cap for every asset.
    let (hheaders, hrows) = read_rows(meta_path)?;
    if hheaders != ["asset_id", "sector", "market_cap"] {
        return Err(schema(meta_path, "header must be `asset_id,sector,market_cap`".into()));
    }
    let mut meta: BTreeMap<String, (String, f64)> = BTreeMap::new();
    for (i, rec) in hrows.iter().enumerate() {
        if rec.len() != 3 {
            return Err(schema(meta_path, format!("row {i}: wrong field count")));
        }
        let id = rec[0].to_string();
        let cap = parse_cell(meta_path, i, "market_cap", &rec[2])?;
        if meta.insert(id.clone(), (rec[1].to_string(), cap)).is_some() {
            return Err(PanelError::DuplicateAsset { id });
        }
    }
    let mut sectors = Vec::with_capacity(asset_ids.len());
    let mut market_caps = Vec::with_capacity(asset_ids.len());
    for id in &asset_ids {
        let (sector, cap) = meta.get(id).ok_or_else(|| PanelError::MissingField {
            asset: id.clone(),
            what: "sector/market_cap metadata".into(),
        })?;
        if sector.is_empty() {
            return Err(PanelError::MissingField { asset: id.clone(), what: "sector".into() });
        }
        if !(*cap > 0.0) || !cap.is_finite() {
            return Err(PanelError::BadMarketCap { asset: id.clone(), cap: *cap });
        }
        sectors.push(sector.clone());
        market_caps.push(*cap);
    }
    for id in meta.keys() {
        if !seen.contains(id) {
            return Err(schema(meta_path, format!("unknown asset {id} not present in returns file")));
        }
    }

    // ESG file: one row per year, same asset universe.
    let (eheaders, erows) = read_rows(esg_path)?;
    if eheaders.first().map(String::as_str) != Some("year") {
        return Err(schema(esg_path, "first column must be `year`".into()));
    }
    let esg_ids: Vec<String> = eheaders[1..].to_vec();
    let mut col_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, id) in esg_ids.iter().enumerate() {
        if col_of.insert(id, k).is_some() {
            return Err(PanelError::DuplicateAsset { id: id.clone() });
        }
        if !seen.contains(id) {
            return Err(schema(esg_path, format!("unknown asset {id} not present in returns file")));
        }
    }
    let mut esg_scores: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for (i, rec) in erows.iter().enumerate() {
        let year: i32 = rec[0].parse().map_err(|_| {
            schema(esg_path, format!("bad year {:?} at row {i}", &rec[0]))
        })?;
        let mut per_asset = Vec::with_capacity(asset_ids.len());
        for id in &asset_ids {
            let col = col_of.get(id.as_str()).ok_or_else(|| PanelError::MissingField {
                asset: id.clone(),
                what: format!("ESG score column (year {year})"),
            })?;
            let score = parse_cell(esg_path, i, id, &rec[col + 1])?;
            if !(0.0..=100.0).contains(&score) {
                return Err(PanelError::ScoreOutOfRange { asset: id.clone(), year, score });
            }
            per_asset.push(score);
        }
        if esg_scores.insert(year, per_asset).is_some() {
            return Err(schema(esg_path, format!("duplicate year {year}")));
        }
    }

    // Calendar → periods: every day must belong to a period, periods in
    // order, every period and every (period year, asset) score present.
    let mut period_days: Vec<Range<usize>> = vec![0..0; spec.periods.len()];
    let mut current: Option<usize> = None;
    for (day, &year) in years.iter().enumerate() {
        let q = spec.period_of_year(year).ok_or_else(|| PanelError::CalendarGap {
            detail: format!("date {} falls outside every period", dates[day]),
        })?;
        match current {
            None => {
                period_days[q] = day..day + 1;
                current = Some(q);
            }
            Some(c) if c == q => period_days[q].end = day + 1,
            Some(c) if q == c + 1 => {
                period_days[q] = day..day + 1;
                current = Some(q);
            }
            Some(c) => {
                return Err(PanelError::CalendarGap {
                    detail: format!(
                        "date {} jumps from period {} to {}",
                        dates[day], spec.periods[c].label, spec.periods[q].label
                    ),
                });
            }
        }
    }
    for (q, range) in period_days.iter().enumerate() {
        if range.is_empty() {
            return Err(PanelError::CalendarGap {
                detail: format!("period {} has no trading days", spec.periods[q].label),
            });
        }
    }
    for p in &spec.periods {
        for year in p.years() {
            if !esg_scores.contains_key(&year) {
                return Err(PanelError::MissingField {
                    asset: "<all>".into(),
                    what: format!("ESG scores for year {year}"),
                });
            }
        }
    }

    Ok(AssetPanel {
        asset_ids,
        sectors,
        market_caps,
        returns,
        market_returns,
        esg_scores,
        calendar: Calendar { dates, years },
        period_days,
    })
}

// ------------------------------------------------------------ classification

/// Mean ESG score per (period, asset): the arithmetic mean over the
/// period's years.
pub fn mean_esg(panel: &AssetPanel, spec: &PeriodSpec) -> Result<Vec<Vec<f64>>, PanelError> {
    let mut out = Vec::with_capacity(spec.periods.len());
    for p in &spec.periods {
        let mut acc = vec![0.0; panel.n_assets()];
        let mut n_years = 0usize;
        for year in p.years() {
            let scores = panel.esg_scores.get(&year).ok_or_else(|| PanelError::MissingField {
                asset: "<all>".into(),
                what: format!("ESG scores for year {year}"),
            })?;
            for (a, s) in acc.iter_mut().zip(scores) {
                *a += s;
            }
            n_years += 1;
        }
        for a in acc.iter_mut() {
            *a /= n_years as f64;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Quartile block sizes (D, C, B, A) for a sector of `n_s` assets: the
/// piecewise cumulative endpoints n_D = ⌊n_s/4⌋, n_C = 2n_D (+1 iff
/// n_s ≡ 3 mod 4), n_B = 3n_D (+1 iff n_s ≡ 2 or 3 mod 4).
pub fn quartile_block_sizes(n_s: usize) -> [usize; 4] {
    let r = n_s % 4;
    let n_d = n_s / 4;
    let n_c = 2 * n_d + usize::from(r == 3);
    let n_b = 3 * n_d + usize::from(r == 2 || r == 3);
    [n_d, n_c - n_d, n_b - n_c, n_s - n_b]
}

/// Assigns ESG classes per period from mean scores.
///
/// Quartile mode sorts each sector's assets non-decreasingly by mean
/// score (ties by ascending asset id) and cuts blocks D, C, B, A by
/// [`quartile_block_sizes`]. Threshold mode grades every asset by the
/// spec's cut points: D = [0,t1), C = [t1,t2), B = [t2,t3), A = [t3,100].
pub fn assign_classes(
    panel: &AssetPanel,
    mean_scores: &[Vec<f64>],
    spec: &PeriodSpec,
) -> Result<Vec<Vec<EsgClass>>, PanelError> {
    let mut out = Vec::with_capacity(mean_scores.len());
    for per_asset in mean_scores {
        let classes = match spec.classification_mode {
            ClassificationMode::Threshold => {
                let [t1, t2, t3] = spec.thresholds;
                per_asset
                    .iter()
                    .map(|&s| {
                        if s < t1 {
                            EsgClass::D
                        } else if s < t2 {
                            EsgClass::C
                        } else if s < t3 {
                            EsgClass::B
                        } else {
                            EsgClass::A
                        }
                    })
                    .collect()
            }
            ClassificationMode::Quartile => {
                let mut classes = vec![EsgClass::D; per_asset.len()];
                let mut by_sector: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
                for (j, sector) in panel.sectors.iter().enumerate() {
                    by_sector.entry(sector).or_default().push(j);
                }
                for (sector, mut members) in by_sector {
                    if members.len() < 4 {
                        return Err(PanelError::SectorTooSmall {
                            sector: sector.to_string(),
                            len: members.len(),
                        });
                    }
                    // Non-decreasing by score, then ascending id.
                    members.sort_by(|&a, &b| {
                        per_asset[a]
                            .partial_cmp(&per_asset[b])
                            .expect("scores are finite")
                            .then_with(|| panel.asset_ids[a].cmp(&panel.asset_ids[b]))
                    });
                    let sizes = quartile_block_sizes(members.len());
                    let grades = [EsgClass::D, EsgClass::C, EsgClass::B, EsgClass::A];
                    let mut pos = 0usize;
                    for (size, grade) in sizes.into_iter().zip(grades) {
                        for &j in &members[pos..pos + size] {
                            classes[j] = grade;
                        }
                        pos += size;
                    }
                }
                classes
            }
        };
        out.push(classes);
    }
    Ok(out)
}

/// Market-cap weights within each (class, period):
/// α_j = M_j / Σ_{j' in the same class} M_{j'}.
pub fn class_weights(
    panel: &AssetPanel,
    classes: &[Vec<EsgClass>],
    spec: &PeriodSpec,
) -> Result<Vec<Vec<f64>>, PanelError> {
    let mut out = Vec::with_capacity(classes.len());
    for (q, per_asset) in classes.iter().enumerate() {
        let mut totals = [0.0f64; 4];
        for (j, class) in per_asset.iter().enumerate() {
            totals[class.index()] += panel.market_caps[j];
        }
        for class in EsgClass::ALL {
            if totals[class.index()] == 0.0 {
                return Err(PanelError::EmptyClass {
                    class,
                    period: spec.periods[q].label.clone(),
                });
            }
        }
        out.push(
            per_asset
                .iter()
                .enumerate()
                .map(|(j, class)| panel.market_caps[j] / totals[class.index()])
                .collect(),
        );
    }
    Ok(out)
}

/// The four class-index return series per period:
/// I_t(k) = Σ_{j: class=k} α_j · Y_{t,j} over the period's days.
pub fn class_indices(
    panel: &AssetPanel,
    classes: &[Vec<EsgClass>],
    weights: &[Vec<f64>],
) -> Vec<[Vec<f64>; 4]> {
    let mut out = Vec::with_capacity(classes.len());
    for (q, days) in panel.period_days.iter().enumerate() {
        let mut indices: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(days.len()));
        for row in &panel.returns[days.clone()] {
            let mut sums = [0.0f64; 4];
            for (j, &r) in row.iter().enumerate() {
                sums[classes[q][j].index()] += weights[q][j] * r;
            }
            for (k, s) in sums.into_iter().enumerate() {
                indices[k].push(s);
            }
        }
        out.push(indices);
    }
    out
}

/// Runs the full classification pipeline for one panel and spec.
pub fn classify(panel: &AssetPanel, spec: &PeriodSpec) -> Result<EsgClassification, PanelError> {
    let mean_scores = mean_esg(panel, spec)?;
    let classes = assign_classes(panel, &mean_scores, spec)?;
    let weights = class_weights(panel, &classes, spec)?;
    let class_indices = class_indices(panel, &classes, &weights);
    Ok(EsgClassification { mean_scores, classes, weights, class_indices })
}

// ----------------------------------------------------------------- measures

/// Lower empirical quantile: the order statistic at ⌈p·n⌉ (1-based).
/// The tiny offset keeps rank boundaries stable against round-off in
/// p·n (e.g. (1 − 0.95)·100 evaluates just above 5).
fn lower_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((p * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

/// Empirical VaR and ES of a return series at `level` (e.g. 0.95).
///
/// VaR is the lower empirical (1−level)-quantile of the sample; ES is
/// the mean of all observations at or below the VaR.
pub fn empirical_var_es(series: &[f64], level: f64) -> Result<(f64, f64), PanelError> {
    if series.is_empty() {
        return Err(PanelError::EmptySeries);
    }
    if !(0.0 < level && level < 1.0) {
        return Err(PanelError::BadLevel(level));
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite returns"));
    let var = lower_quantile(&sorted, 1.0 - level);
    let tail: Vec<f64> = sorted.iter().copied().take_while(|&x| x <= var).collect();
    let es = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok((var, es))
}

/// Descriptive score statistics for one year.
#[derive(Debug, Clone, PartialEq)]
pub struct YearScoreSummary {
    pub year: i32,
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Per-year ESG score distribution over the years covered by `spec`
/// (lower-quantile convention throughout).
pub fn esg_distribution_summary(panel: &AssetPanel, spec: &PeriodSpec) -> Vec<YearScoreSummary> {
    let mut out = Vec::new();
    for p in &spec.periods {
        for year in p.years() {
            let Some(scores) = panel.esg_scores.get(&year) else { continue };
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
            out.push(YearScoreSummary {
                year,
                mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
                min: sorted[0],
                q25: lower_quantile(&sorted, 0.25),
                median: lower_quantile(&sorted, 0.5),
                q75: lower_quantile(&sorted, 0.75),
                max: *sorted.last().expect("non-empty"),
            });
        }
    }
    out
}
