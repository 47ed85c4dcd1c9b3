//! Versioned, deterministic on-disk archives for fitted models.
//!
//! One archive file holds everything a single (period, catalog) run
//! produced: the classification snapshot, the marginal parameter sets,
//! the vine structure with its fitted edge copulas, summary fit
//! statistics, and any risk-report rows computed from the model. The
//! format is pretty-printed JSON with a fixed key order, so identical
//! models produce identical bytes and archives diff cleanly. Floating
//! point values are written in shortest-round-trip decimal form, which
//! reloads bit-exactly.
//!
//! Writes are atomic (temp file in the target directory, then rename);
//! the intended discipline is a single writer per path with any number
//! of concurrent readers. The schema is documented in
//! `docs/archive-format.md` at the repository root.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::copula::validate_params;
use crate::marginals::MarginalFit;
use crate::panel::{ClassificationMode, EsgClass, Period};
use crate::risk::AssetRiskRow;
use crate::vine::{validate_structure, VineModel};

/// Format version written by this build; bumped on any schema change.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("archive i/o failed at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("archive schema violation: {detail}")]
    Schema { detail: String },
    #[error("archive format version {found} not supported (this build reads version {supported})")]
    VersionMismatch { found: u64, supported: u32 },
    #[error("panel digest mismatch: archive was built from {archive}, current panel is {current}")]
    DigestMismatch { archive: String, current: String },
    #[error("domain violation in tree {tree}, edge {edge} ({family}): {detail}")]
    DomainViolation { tree: usize, edge: usize, family: String, detail: String },
    #[error("non-finite value at {location}")]
    NotFinite { location: String },
}

impl StoreError {
    fn io(path: &Path, source: io::Error) -> StoreError {
        StoreError::Io { path: path.to_path_buf(), source }
    }
}

/// Marginal model parameters without the in-sample volatility and
/// pseudo-copula paths; those regenerate deterministically from the
/// panel, so archives stay small.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalParams {
    pub gamma0: f64,
    pub gamma1: f64,
    pub beta1: f64,
    pub nu: f64,
    pub mean: f64,
    pub loglik: f64,
    pub converged: bool,
}

impl From<&MarginalFit> for MarginalParams {
    fn from(fit: &MarginalFit) -> MarginalParams {
        MarginalParams {
            gamma0: fit.gamma0,
            gamma1: fit.gamma1,
            beta1: fit.beta1,
            nu: fit.nu,
            mean: fit.mean,
            loglik: fit.loglik,
            converged: fit.converged,
        }
    }
}

/// Per-asset classification snapshot for the archive's period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub period: Period,
    pub mode: ClassificationMode,
    /// Asset ids in variable order (variable j is `asset_ids[j]`).
    pub asset_ids: Vec<String>,
    pub classes: Vec<EsgClass>,
    /// Period-mean scores per asset.
    pub mean_scores: Vec<f64>,
    /// Market-cap weight of each asset within its class.
    pub weights: Vec<f64>,
}

/// Fitted marginals in variable order: assets first, then the four
/// class indices, then the market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalsSection {
    pub variable_names: Vec<String>,
    pub fits: Vec<MarginalParams>,
}

/// Model-level fit summary, including the sparsity prior the mBIC
/// value was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitStatistics {
    pub nobs: usize,
    pub loglik: f64,
    pub n_params: usize,
    pub aic: f64,
    pub bic: f64,
    pub mbic: f64,
    pub psi0: f64,
}

impl FitStatistics {
    pub fn from_model(model: &VineModel, psi0: f64) -> FitStatistics {
        FitStatistics {
            nobs: model.nobs,
            loglik: model.loglik,
            n_params: model.npars,
            aic: model.aic,
            bic: model.bic,
            mbic: model.mbic,
            psi0,
        }
    }
}

/// Risk rows computed from this archive's model; empty until the risk
/// stage has run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportsSection {
    pub risk_rows: Vec<AssetRiskRow>,
}

/// Everything one (period, catalog) run produced, as a single
/// self-describing document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u32,
    /// Content hash of the input panel files (see [`panel_digest`]).
    pub panel_digest: String,
    pub classification: ClassificationSection,
    pub marginals: MarginalsSection,
    pub vine: VineModel,
    pub fit_statistics: FitStatistics,
    pub reports: ReportsSection,
}

impl ModelArchive {
    /// Fails with [`StoreError::DigestMismatch`] unless the archive was
    /// built from a panel with the given digest.
    pub fn verify_panel_digest(&self, current: &str) -> Result<(), StoreError> {
        if self.panel_digest == current {
            Ok(())
        } else {
            Err(StoreError::DigestMismatch {
                archive: self.panel_digest.clone(),
                current: current.to_string(),
            })
        }
    }
}

/// SHA-256 over the given files' contents, each chunk prefixed by its
/// byte length so file boundaries cannot alias. Hex-encoded.
pub fn panel_digest<P: AsRef<Path>>(paths: &[P]) -> Result<String, StoreError> {
    let mut hasher = Sha256::new();
    for p in paths {
        let path = p.as_ref();
        let bytes = fs::read(path).map_err(|e| StoreError::io(path, e))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex(&hasher.finalize()))
}

/// SHA-256 of a byte string, hex-encoded; used for config provenance.
pub fn bytes_digest(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(2 * bytes.len());
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Validates and writes the archive atomically: the document is
/// serialized to a temporary file in the target directory and renamed
/// into place, so readers never observe a partial file.
pub fn save(archive: &ModelArchive, path: &Path) -> Result<(), StoreError> {
    validate_archive(archive)?;
    let mut bytes =
        serde_json::to_vec_pretty(archive).map_err(|e| StoreError::Schema { detail: e.to_string() })?;
    bytes.push(b'\n');
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".archive")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| StoreError::io(path, e))?;
    tmp.write_all(&bytes).map_err(|e| StoreError::io(path, e))?;
    tmp.flush().map_err(|e| StoreError::io(path, e))?;
    tmp.persist(path).map_err(|e| StoreError::io(path, e.error))?;
    Ok(())
}

/// Reads, version-checks, parses, and validates an archive.
pub fn load(path: &Path) -> Result<ModelArchive, StoreError> {
    let bytes = fs::read(path).map_err(|e| StoreError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| StoreError::Schema { detail: e.to_string() })?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| StoreError::Schema {
            detail: "missing or non-integer format_version".into(),
        })?;
    if found != u64::from(FORMAT_VERSION) {
        return Err(StoreError::VersionMismatch { found, supported: FORMAT_VERSION });
    }
    let archive: ModelArchive = serde_json::from_value(value)
        .map_err(|e| StoreError::Schema { detail: e.to_string() })?;
    validate_archive(&archive)?;
    Ok(archive)
}

/// Cross-field checks shared by save (completeness precondition) and
/// load (defense against hand-edited files): structural validity of
/// the vine, consistent section dimensions, copula parameters inside
/// their family domains, and finite numbers throughout.
pub fn validate_archive(a: &ModelArchive) -> Result<(), StoreError> {
    let schema = |detail: String| StoreError::Schema { detail };

    if a.panel_digest.len() != 64 || !a.panel_digest.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(schema("panel_digest is not a 64-character hex string".into()));
    }

    let s = &a.vine.structure;
    validate_structure(s).map_err(|detail| schema(format!("vine structure: {detail}")))?;

    let n = s.n_assets;
    let c = &a.classification;
    for (name, len) in [
        ("asset_ids", c.asset_ids.len()),
        ("classes", c.classes.len()),
        ("mean_scores", c.mean_scores.len()),
        ("weights", c.weights.len()),
    ] {
        if len != n {
            return Err(schema(format!(
                "classification.{name} has {len} entries for {n} assets"
            )));
        }
    }
    if c.classes != s.classes {
        return Err(schema(
            "classification.classes disagrees with the vine structure's classes".into(),
        ));
    }
    check_finite(&c.mean_scores, "classification.mean_scores")?;
    check_finite(&c.weights, "classification.weights")?;

    let m = &a.marginals;
    if m.fits.len() != s.n_vars() || m.variable_names.len() != s.n_vars() {
        return Err(schema(format!(
            "marginals must cover all {} variables (got {} fits, {} names)",
            s.n_vars(),
            m.fits.len(),
            m.variable_names.len()
        )));
    }
    for (j, fit) in m.fits.iter().enumerate() {
        for (field, x) in [
            ("gamma0", fit.gamma0),
            ("gamma1", fit.gamma1),
            ("beta1", fit.beta1),
            ("nu", fit.nu),
            ("mean", fit.mean),
            ("loglik", fit.loglik),
        ] {
            if !x.is_finite() {
                return Err(StoreError::NotFinite {
                    location: format!("marginals.fits[{j}].{field}"),
                });
            }
        }
        if fit.gamma0 <= 0.0 || fit.gamma1 < 0.0 || fit.beta1 < 0.0 {
            return Err(schema(format!(
                "marginals.fits[{j}] has out-of-range GARCH coefficients"
            )));
        }
        if fit.gamma1 + fit.beta1 >= 1.0 {
            return Err(schema(format!("marginals.fits[{j}] is non-stationary")));
        }
        if fit.nu <= 2.0 {
            return Err(schema(format!("marginals.fits[{j}].nu must exceed 2")));
        }
    }

    let v = &a.vine;
    if v.edge_copulas.len() != s.trees.len() || v.edge_tau_emp.len() != s.trees.len() {
        return Err(schema("edge arrays do not cover all five trees".into()));
    }
    for (t, tree) in s.trees.iter().enumerate() {
        if v.edge_copulas[t].len() != tree.len() || v.edge_tau_emp[t].len() != tree.len() {
            return Err(schema(format!(
                "tree {} has {} edges but {} copulas and {} empirical taus",
                t + 1,
                tree.len(),
                v.edge_copulas[t].len(),
                v.edge_tau_emp[t].len()
            )));
        }
        for (e, pc) in v.edge_copulas[t].iter().enumerate() {
            validate_params(pc.family, &pc.params).map_err(|err| StoreError::DomainViolation {
                tree: t + 1,
                edge: e,
                family: pc.family.to_string(),
                detail: err.to_string(),
            })?;
            for (field, x) in [
                ("tau", pc.tau),
                ("lambda_lower", pc.lambda_lower),
                ("lambda_upper", pc.lambda_upper),
                ("loglik", pc.loglik),
            ] {
                if !x.is_finite() {
                    return Err(StoreError::NotFinite {
                        location: format!("vine.edge_copulas[{t}][{e}].{field}"),
                    });
                }
            }
        }
        check_finite(&v.edge_tau_emp[t], &format!("vine.edge_tau_emp[{t}]"))?;
    }
    for (field, x) in [
        ("loglik", v.loglik),
        ("aic", v.aic),
        ("bic", v.bic),
        ("mbic", v.mbic),
    ] {
        if !x.is_finite() {
            return Err(StoreError::NotFinite { location: format!("vine.{field}") });
        }
    }

    let f = &a.fit_statistics;
    if f.nobs != v.nobs {
        return Err(schema(format!(
            "fit_statistics.nobs = {} disagrees with vine.nobs = {}",
            f.nobs, v.nobs
        )));
    }
    for (field, x) in [
        ("loglik", f.loglik),
        ("aic", f.aic),
        ("bic", f.bic),
        ("mbic", f.mbic),
        ("psi0", f.psi0),
    ] {
        if !x.is_finite() {
            return Err(StoreError::NotFinite {
                location: format!("fit_statistics.{field}"),
            });
        }
    }
    if !(f.psi0 > 0.0 && f.psi0 < 1.0) {
        return Err(schema("fit_statistics.psi0 must lie in (0, 1)".into()));
    }

    for (i, row) in a.reports.risk_rows.iter().enumerate() {
        for (name, triple) in
            [("tau", &row.tau), ("tau_emp", &row.tau_emp), ("lambda", &row.lambda)]
        {
            if let Some(t) = triple {
                for (field, x) in [("esg", t.esg), ("market", t.market), ("idio", t.idio)] {
                    if !x.is_finite() {
                        return Err(StoreError::NotFinite {
                            location: format!("reports.risk_rows[{i}].{name}.{field}"),
                        });
                    }
                }
            }
        }
    }

    Ok(())
}

fn check_finite(xs: &[f64], what: &str) -> Result<(), StoreError> {
    match xs.iter().position(|x| !x.is_finite()) {
        None => Ok(()),
        Some(i) => Err(StoreError::NotFinite { location: format!("{what}[{i}]") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{BaseFamily, FamilyId, PairCopula, Rotation};
    use crate::panel::ClassificationMode;
    use crate::risk::risk_report;
    use crate::vine::build_structure;

    /// A small but fully populated archive: 4 assets (one per class),
    /// deliberately awkward float values to exercise decimal round-trip.
    fn toy_archive() -> ModelArchive {
        let classes = vec![EsgClass::A, EsgClass::B, EsgClass::C, EsgClass::D];
        let structure = build_structure(&classes).unwrap();
        let mut edge_copulas: Vec<Vec<PairCopula>> = structure
            .trees
            .iter()
            .map(|tree| tree.iter().map(|_| PairCopula::independence()).collect())
            .collect();
        edge_copulas[0][0] =
            PairCopula::new(FamilyId::unrotated(BaseFamily::Gaussian), vec![0.1 + 0.2]).unwrap();
        edge_copulas[0][1] =
            PairCopula::new(FamilyId::unrotated(BaseFamily::Clayton), vec![1.0 / 3.0]).unwrap();
        edge_copulas[1][2] = PairCopula::new(
            FamilyId::new(BaseFamily::Gumbel, Rotation::R180).unwrap(),
            vec![std::f64::consts::PI / 2.0],
        )
        .unwrap();
        edge_copulas[2][3] =
            PairCopula::new(FamilyId::unrotated(BaseFamily::Frank), vec![-4.2e-3]).unwrap();
        let model = VineModel::from_copulas(structure, edge_copulas, 1257, "itau").unwrap();

        let n_vars = model.structure.n_vars();
        let fit = MarginalParams {
            gamma0: 1.3e-6,
            gamma1: 0.05 + 1e-17,
            beta1: 0.9,
            nu: 6.000000000000001,
            mean: -3.141592653589793e-4,
            loglik: 4321.123456789012,
            converged: true,
        };
        let variable_names = (0..n_vars)
            .map(|j| match j {
                j if j < 4 => format!("asset{j}"),
                4 => "I_A".into(),
                5 => "I_B".into(),
                6 => "I_C".into(),
                7 => "I_D".into(),
                _ => "M".into(),
            })
            .collect();

        let risk_rows = risk_report(
            &model,
            &["asset0".into(), "asset1".into(), "asset2".into(), "asset3".into()],
            "2011-2015",
        )
        .unwrap();

        let fit_statistics = FitStatistics::from_model(&model, 0.9);
        ModelArchive {
            format_version: FORMAT_VERSION,
            panel_digest: bytes_digest(b"toy panel"),
            classification: ClassificationSection {
                period: Period::new("2011-2015", 2011, 2015),
                mode: ClassificationMode::Quartile,
                asset_ids: vec!["asset0".into(), "asset1".into(), "asset2".into(), "asset3".into()],
                classes: vec![EsgClass::A, EsgClass::B, EsgClass::C, EsgClass::D],
                mean_scores: vec![81.5, 60.25, 40.125, 1.0 / 7.0],
                weights: vec![1.0, 1.0, 1.0, 1.0],
            },
            marginals: MarginalsSection {
                variable_names,
                fits: vec![fit; n_vars],
            },
            vine: model,
            fit_statistics,
            reports: ReportsSection { risk_rows },
        }
    }

    #[test]
    fn round_trip_reproduces_the_archive_bit_exactly() {
        let archive = toy_archive();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save(&archive, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(archive, back);

        // Same document again, byte for byte.
        let first = fs::read(&path).unwrap();
        let path2 = dir.path().join("model2.json");
        save(&back, &path2).unwrap();
        assert_eq!(first, fs::read(&path2).unwrap());
    }

    #[test]
    fn io_failure_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("not-a-directory");
        fs::write(&blocker, b"plain file").unwrap();
        let target = blocker.join("model.json");
        let err = save(&toy_archive(), &target).unwrap_err();
        match &err {
            StoreError::Io { path, .. } => assert_eq!(path, &target),
            other => panic!("expected Io error, got {other:?}"),
        }
        assert!(err.to_string().contains("not-a-directory"));
    }

    #[test]
    fn full_scale_archive_parses_under_the_schema() {
        let mut classes = Vec::new();
        for (class, count) in
            [(EsgClass::A, 87), (EsgClass::B, 85), (EsgClass::C, 84), (EsgClass::D, 78)]
        {
            classes.extend(std::iter::repeat_n(class, count));
        }
        let structure = build_structure(&classes).unwrap();
        let edge_copulas: Vec<Vec<PairCopula>> = structure
            .trees
            .iter()
            .map(|tree| tree.iter().map(|_| PairCopula::independence()).collect())
            .collect();
        let model = VineModel::from_copulas(structure, edge_copulas, 1260, "itau").unwrap();
        let n_edges: usize = model.structure.trees.iter().map(Vec::len).sum();
        assert_eq!(n_edges, 1680);

        let n_vars = model.structure.n_vars();
        let fit = MarginalParams {
            gamma0: 1e-6,
            gamma1: 0.05,
            beta1: 0.9,
            nu: 6.0,
            mean: 0.0,
            loglik: 0.0,
            converged: true,
        };
        let archive = ModelArchive {
            format_version: FORMAT_VERSION,
            panel_digest: bytes_digest(b"full-scale"),
            classification: ClassificationSection {
                period: Period::new("2006-2010", 2006, 2010),
                mode: ClassificationMode::Quartile,
                asset_ids: (0..334).map(|j| format!("a{j:03}")).collect(),
                classes,
                mean_scores: vec![50.0; 334],
                weights: vec![1.0 / 334.0; 334],
            },
            marginals: MarginalsSection {
                variable_names: (0..n_vars).map(|j| format!("v{j}")).collect(),
                fits: vec![fit; n_vars],
            },
            fit_statistics: FitStatistics::from_model(&model, 0.9),
            vine: model,
            reports: ReportsSection::default(),
        };

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("full.json");
        save(&archive, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back.vine.structure.trees.iter().map(Vec::len).sum::<usize>(), 1680);
        // Text format stays in the single-digit-MB range at full scale.
        assert!(fs::metadata(&path).unwrap().len() < 8 * 1024 * 1024);
    }

    #[test]
    fn truncated_file_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save(&toy_archive(), &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(load(&path), Err(StoreError::Schema { .. })));
    }

    #[test]
    fn future_format_version_is_a_version_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save(&toy_archive(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let bumped = text.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        assert_ne!(text, bumped);
        fs::write(&path, bumped).unwrap();
        match load(&path) {
            Err(StoreError::VersionMismatch { found: 99, supported }) => {
                assert_eq!(supported, FORMAT_VERSION)
            }
            other => panic!("expected version mismatch, got {other:?}"),
        }
    }

    #[test]
    fn hand_edited_out_of_domain_parameter_names_the_edge() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save(&toy_archive(), &path).unwrap();
        // The tree-1 Gaussian's rho is the only 0.30000000000000004 in
        // the file; push it outside (−1, 1).
        let text = fs::read_to_string(&path).unwrap();
        let edited = text.replace("0.30000000000000004", "1.5");
        assert_ne!(text, edited);
        fs::write(&path, edited).unwrap();
        match load(&path) {
            Err(StoreError::DomainViolation { tree: 1, edge: 0, family, .. }) => {
                assert_eq!(family, "gaussian@0")
            }
            other => panic!("expected domain violation at tree 1 edge 0, got {other:?}"),
        }
    }

    #[test]
    fn digest_mismatch_is_detected() {
        let archive = toy_archive();
        archive.verify_panel_digest(&bytes_digest(b"toy panel")).unwrap();
        let err = archive.verify_panel_digest(&bytes_digest(b"other panel")).unwrap_err();
        assert!(matches!(err, StoreError::DigestMismatch { .. }));
    }

    #[test]
    fn panel_digest_is_stable_and_boundary_sensitive() {
        let dir = tempfile::tempdir().unwrap();
        let f1 = dir.path().join("a.csv");
        let f2 = dir.path().join("b.csv");
        fs::write(&f1, b"ab").unwrap();
        fs::write(&f2, b"c").unwrap();
        let d1 = panel_digest(&[&f1, &f2]).unwrap();
        assert_eq!(d1, panel_digest(&[&f1, &f2]).unwrap());
        assert_eq!(d1.len(), 64);

        // Moving a byte across the file boundary must change the hash.
        fs::write(&f1, b"a").unwrap();
        fs::write(&f2, b"bc").unwrap();
        assert_ne!(d1, panel_digest(&[&f1, &f2]).unwrap());
    }

    #[test]
    fn non_finite_values_are_rejected_before_writing() {
        let mut archive = toy_archive();
        archive.vine.edge_copulas[0][0].loglik = f64::NAN;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        match save(&archive, &path) {
            Err(StoreError::NotFinite { location }) => {
                assert_eq!(location, "vine.edge_copulas[0][0].loglik")
            }
            other => panic!("expected NotFinite, got {other:?}"),
        }
        assert!(!path.exists());
    }

    #[test]
    fn section_dimension_mismatches_are_schema_errors() {
        let mut archive = toy_archive();
        archive.marginals.fits.pop();
        assert!(matches!(validate_archive(&archive), Err(StoreError::Schema { .. })));

        let mut archive = toy_archive();
        archive.classification.classes[0] = EsgClass::D;
        assert!(matches!(validate_archive(&archive), Err(StoreError::Schema { .. })));

        let mut archive = toy_archive();
        archive.fit_statistics.nobs += 1;
        assert!(matches!(validate_archive(&archive), Err(StoreError::Schema { .. })));
    }
}
