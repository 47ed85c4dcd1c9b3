//! R-vine copula ESG risk model.
//!
//! End-to-end pipeline for decomposing daily asset returns into ESG,
//! market, and idiosyncratic risk shares:
//!
//! - [`panel`] — data ingestion, ESG class assignment, class-index
//!   construction, empirical VaR/ES.
//! - [`marginals`] — GARCH(1,1) filtering with Student-t innovations and
//!   the probability integral transform to copula scale.
//! - [`copula`] — bivariate copula catalog: densities, h-functions,
//!   Kendall's τ maps, tail coefficients, rotations, AIC family selection.
//! - [`vine`] — the fixed five-tree regular vine over assets, four ESG
//!   class indices, and the market index; sequential fitting, sampling,
//!   and mBIC model comparison.
//! - [`risk`] — per-asset τ and lower-tail λ risk shares and their
//!   class/period aggregation.
//! - [`store`] — versioned, deterministic text archives for every fitted
//!   artifact.

pub mod copula;
pub mod marginals;
pub mod numeric;
pub mod panel;
pub mod risk;
pub mod store;
pub mod vine;

pub use copula::{
    BaseFamily, Catalog, CopulaError, FamilyId, FitMethod, HDir, PairCopula, Rotation,
};
pub use marginals::{MarginalError, MarginalFit};
pub use panel::{
    AssetPanel, ClassificationMode, EsgClass, EsgClassification, PanelError, Period, PeriodSpec,
};
pub use risk::{AssetRiskRow, LambdaPolicy, RiskAggregate, RiskError, ShareTriple};
pub use store::{ModelArchive, StoreError};
pub use vine::{ModelKind, VineError, VineModel, VineStructure};
