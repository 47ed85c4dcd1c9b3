//! Bivariate copula catalog.
//!
//! Ten parametric families (Independence, Gaussian, Student-t, Frank,
//! Clayton, Gumbel, Joe, BB1, BB7, BB8) with counterclockwise rotations for
//! the tail-asymmetric ones, exposing:
//!
//! - densities, CDFs, and the conditional h-functions / inverse
//!   h-functions used for vine pseudo-data propagation and sampling,
//! - Kendall's τ maps and their inverses (τ-inversion estimation),
//! - lower/upper tail-dependence coefficients,
//! - AIC-based family selection over a configurable catalog,
//! - an O(n log n) empirical Kendall's τ-b.

mod families;
mod fit;
mod sample;

pub use fit::{empirical_tau, fit_pair, params_from_tau};
pub use sample::sample_pair;
pub(crate) use families::validate_params;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inputs and h-function outputs are kept this far inside (0,1).
pub(crate) const EPS_U: f64 = 1e-10;

/// Errors raised by copula construction, estimation, and evaluation.
#[derive(Debug, Error)]
pub enum CopulaError {
    /// Parameter vector violates the family's admissible domain.
    #[error("{family}: parameter outside domain: {detail}")]
    InvalidParam { family: FamilyId, detail: String },
    /// Requested τ cannot be produced by the family (wrong sign or too
    /// strong for the parameter caps).
    #[error("tau {tau} outside the attainable range for {family}")]
    TauOutOfRange { family: FamilyId, tau: f64 },
    /// The family has no τ-inversion estimator (two-parameter families).
    #[error("tau inversion is not available for {family}")]
    TauInversionUnavailable { family: FamilyId },
    /// Rotation not admissible for the base family.
    #[error("{base:?} admits only the 0° rotation")]
    InvalidRotation { base: BaseFamily },
    /// Ill-formed data passed to an estimator.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Every candidate in the catalog was infeasible for the data.
    #[error("no feasible copula candidate: {0}")]
    NoFeasibleCandidate(String),
}

/// The ten base copula families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseFamily {
    Independence,
    Gaussian,
    StudentT,
    Frank,
    Clayton,
    Gumbel,
    Joe,
    BB1,
    BB7,
    BB8,
}

impl BaseFamily {
    /// All bases in canonical catalog order.
    pub const ALL: [BaseFamily; 10] = [
        BaseFamily::Independence,
        BaseFamily::Gaussian,
        BaseFamily::StudentT,
        BaseFamily::Frank,
        BaseFamily::Clayton,
        BaseFamily::Gumbel,
        BaseFamily::Joe,
        BaseFamily::BB1,
        BaseFamily::BB7,
        BaseFamily::BB8,
    ];

    /// Tail-asymmetric families admit the 90°/180°/270° rotations.
    pub fn is_rotatable(self) -> bool {
        matches!(
            self,
            BaseFamily::Clayton
                | BaseFamily::Gumbel
                | BaseFamily::Joe
                | BaseFamily::BB1
                | BaseFamily::BB7
                | BaseFamily::BB8
        )
    }

    /// Number of copula parameters.
    pub fn n_params(self) -> usize {
        match self {
            BaseFamily::Independence => 0,
            BaseFamily::Gaussian
            | BaseFamily::Frank
            | BaseFamily::Clayton
            | BaseFamily::Gumbel
            | BaseFamily::Joe => 1,
            BaseFamily::StudentT | BaseFamily::BB1 | BaseFamily::BB7 | BaseFamily::BB8 => 2,
        }
    }

    /// Whether parameters can be recovered from Kendall's τ alone.
    pub fn has_tau_inversion(self) -> bool {
        !matches!(self, BaseFamily::BB1 | BaseFamily::BB7 | BaseFamily::BB8)
    }

    fn token(self) -> &'static str {
        match self {
            BaseFamily::Independence => "independence",
            BaseFamily::Gaussian => "gaussian",
            BaseFamily::StudentT => "studentt",
            BaseFamily::Frank => "frank",
            BaseFamily::Clayton => "clayton",
            BaseFamily::Gumbel => "gumbel",
            BaseFamily::Joe => "joe",
            BaseFamily::BB1 => "bb1",
            BaseFamily::BB7 => "bb7",
            BaseFamily::BB8 => "bb8",
        }
    }

    fn from_token(s: &str) -> Option<BaseFamily> {
        BaseFamily::ALL.into_iter().find(|b| b.token() == s)
    }
}

/// Counterclockwise rotation of the copula density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rotation {
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    /// Rotation angle in degrees.
    pub fn degrees(self) -> u16 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    fn from_degrees(d: u16) -> Option<Rotation> {
        Rotation::ALL.into_iter().find(|r| r.degrees() == d)
    }

    /// 90° and 270° rotations flip the sign of concordance.
    pub fn negates_tau(self) -> bool {
        matches!(self, Rotation::R90 | Rotation::R270)
    }
}

/// A base family together with its rotation, e.g. `clayton@180`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FamilyId {
    base: BaseFamily,
    rotation: Rotation,
}

impl FamilyId {
    /// Builds a family id, rejecting rotations of tail-symmetric bases.
    pub fn new(base: BaseFamily, rotation: Rotation) -> Result<FamilyId, CopulaError> {
        if rotation != Rotation::R0 && !base.is_rotatable() {
            return Err(CopulaError::InvalidRotation { base });
        }
        Ok(FamilyId { base, rotation })
    }

    /// The unrotated variant of a base family.
    pub fn unrotated(base: BaseFamily) -> FamilyId {
        FamilyId { base, rotation: Rotation::R0 }
    }

    pub fn base(&self) -> BaseFamily {
        self.base
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn n_params(&self) -> usize {
        self.base.n_params()
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.base.token(), self.rotation.degrees())
    }
}

impl std::str::FromStr for FamilyId {
    type Err = CopulaError;

    fn from_str(s: &str) -> Result<FamilyId, CopulaError> {
        let (base_s, rot_s) = s
            .split_once('@')
            .ok_or_else(|| CopulaError::InvalidInput(format!("family id `{s}` lacks `@`")))?;
        let base = BaseFamily::from_token(base_s)
            .ok_or_else(|| CopulaError::InvalidInput(format!("unknown copula family `{base_s}`")))?;
        let deg: u16 = rot_s
            .parse()
            .map_err(|_| CopulaError::InvalidInput(format!("bad rotation `{rot_s}`")))?;
        let rotation = Rotation::from_degrees(deg)
            .ok_or_else(|| CopulaError::InvalidInput(format!("bad rotation `{rot_s}`")))?;
        FamilyId::new(base, rotation)
    }
}

impl From<FamilyId> for String {
    fn from(f: FamilyId) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FamilyId {
    type Error = CopulaError;

    fn try_from(s: String) -> Result<FamilyId, CopulaError> {
        s.parse()
    }
}

/// Which argument slot of C(·,·) holds the conditioning variable in an
/// h-function evaluation.
///
/// `CondFirst` computes ∂C(u_cond, u_target)/∂u_cond — the conditional CDF
/// of the second coordinate given the first. `CondSecond` computes
/// ∂C(u_target, u_cond)/∂u_cond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HDir {
    CondFirst,
    CondSecond,
}

/// Estimation method for [`fit_pair`].
///
/// `Itau` recovers one-parameter families by Kendall's τ inversion (the
/// Student-t ν and the two-parameter BB families are always estimated by
/// maximum likelihood). `Mle` refines every family by maximum likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Itau,
    Mle,
}

/// An ordered set of candidate families for [`fit_pair`].
///
/// The order is the deterministic AIC tie-break: earlier entries win ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    families: Vec<FamilyId>,
}

impl Catalog {
    /// Families with τ-inversion estimators: Independence, Gaussian,
    /// Student-t, Frank, and Clayton/Gumbel/Joe with all rotations.
    pub fn itau() -> Catalog {
        let mut families = vec![
            FamilyId::unrotated(BaseFamily::Independence),
            FamilyId::unrotated(BaseFamily::Gaussian),
            FamilyId::unrotated(BaseFamily::StudentT),
            FamilyId::unrotated(BaseFamily::Frank),
        ];
        for base in [BaseFamily::Clayton, BaseFamily::Gumbel, BaseFamily::Joe] {
            for rot in Rotation::ALL {
                families.push(FamilyId::new(base, rot).expect("rotatable"));
            }
        }
        Catalog { families }
    }

    /// The full parametric set: the τ-inversion families plus BB1/BB7/BB8
    /// with all rotations.
    pub fn parametric() -> Catalog {
        let mut families = Catalog::itau().families;
        for base in [BaseFamily::BB1, BaseFamily::BB7, BaseFamily::BB8] {
            for rot in Rotation::ALL {
                families.push(FamilyId::new(base, rot).expect("rotatable"));
            }
        }
        Catalog { families }
    }

    /// Gaussian copulas only.
    pub fn gaussian_only() -> Catalog {
        Catalog { families: vec![FamilyId::unrotated(BaseFamily::Gaussian)] }
    }

    /// A caller-supplied candidate list; order defines the AIC tie-break.
    pub fn custom(families: Vec<FamilyId>) -> Result<Catalog, CopulaError> {
        if families.is_empty() {
            return Err(CopulaError::InvalidInput("empty catalog".into()));
        }
        Ok(Catalog { families })
    }

    pub fn families(&self) -> &[FamilyId] {
        &self.families
    }
}

/// A fitted (or directly constructed) bivariate copula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCopula {
    pub family: FamilyId,
    /// Family-specific parameter vector (0–2 entries).
    pub params: Vec<f64>,
    /// Model-implied Kendall's τ.
    pub tau: f64,
    /// Lower tail-dependence coefficient λ = lim_{t→0} C(t,t)/t.
    pub lambda_lower: f64,
    /// Upper tail-dependence coefficient.
    pub lambda_upper: f64,
    /// Log-likelihood on the data the copula was fitted to (0 when
    /// constructed directly rather than fitted).
    pub loglik: f64,
    /// Number of free parameters.
    pub n_params: usize,
}

impl PairCopula {
    /// Validates `params` against the family's domain and derives τ and
    /// the tail coefficients.
    pub fn new(family: FamilyId, params: Vec<f64>) -> Result<PairCopula, CopulaError> {
        families::validate_params(family, &params)?;
        let mut pc = PairCopula {
            family,
            params,
            tau: 0.0,
            lambda_lower: 0.0,
            lambda_upper: 0.0,
            loglik: 0.0,
            n_params: family.n_params(),
        };
        pc.tau = pc.tau_of();
        pc.lambda_lower = pc.lambda_lower_of();
        pc.lambda_upper = pc.lambda_upper_of();
        Ok(pc)
    }

    /// The independence copula.
    pub fn independence() -> PairCopula {
        PairCopula::new(FamilyId::unrotated(BaseFamily::Independence), Vec::new())
            .expect("independence copula is always valid")
    }

    pub(crate) fn with_loglik(mut self, loglik: f64) -> PairCopula {
        self.loglik = loglik;
        self
    }

    /// Copula density c(u1, u2). Arguments are clamped a hair inside (0,1).
    pub fn density(&self, u1: f64, u2: f64) -> f64 {
        let u1 = u1.clamp(EPS_U, 1.0 - EPS_U);
        let u2 = u2.clamp(EPS_U, 1.0 - EPS_U);
        let (a, b) = match self.family.rotation {
            Rotation::R0 => (u1, u2),
            Rotation::R90 => (1.0 - u2, u1),
            Rotation::R180 => (1.0 - u1, 1.0 - u2),
            Rotation::R270 => (u2, 1.0 - u1),
        };
        families::base_density(self.family.base, &self.params, a, b)
    }

    /// Copula CDF C(u1, u2).
    pub fn cdf(&self, u1: f64, u2: f64) -> f64 {
        let u1 = u1.clamp(EPS_U, 1.0 - EPS_U);
        let u2 = u2.clamp(EPS_U, 1.0 - EPS_U);
        let base = |a: f64, b: f64| families::base_cdf(self.family.base, &self.params, a, b);
        let c = match self.family.rotation {
            Rotation::R0 => base(u1, u2),
            Rotation::R90 => u1 - base(1.0 - u2, u1),
            Rotation::R180 => u1 + u2 - 1.0 + base(1.0 - u1, 1.0 - u2),
            Rotation::R270 => u2 - base(u2, 1.0 - u1),
        };
        c.clamp(0.0, 1.0)
    }

    /// Conditional CDF h(u_target | u_cond) = ∂C/∂u_cond, with `direction`
    /// selecting which argument slot of C holds the conditioning variable.
    /// Output is clamped to [1e-10, 1−1e-10].
    pub fn hfunc(&self, u_target: f64, u_cond: f64, direction: HDir) -> f64 {
        self.hfunc_raw(u_target, u_cond, direction).clamp(EPS_U, 1.0 - EPS_U)
    }

    fn hfunc_raw(&self, u_target: f64, u_cond: f64, direction: HDir) -> f64 {
        let t = u_target.clamp(EPS_U, 1.0 - EPS_U);
        let c = u_cond.clamp(EPS_U, 1.0 - EPS_U);
        // Base families are exchangeable, so a single base h-function
        // serves both directions; rotations break the symmetry.
        let h = |t: f64, c: f64| families::base_h(self.family.base, &self.params, t, c);
        match (self.family.rotation, direction) {
            (Rotation::R0, _) => h(t, c),
            (Rotation::R90, HDir::CondFirst) => 1.0 - h(1.0 - t, c),
            (Rotation::R90, HDir::CondSecond) => h(t, 1.0 - c),
            (Rotation::R180, _) => 1.0 - h(1.0 - t, 1.0 - c),
            (Rotation::R270, HDir::CondFirst) => h(t, 1.0 - c),
            (Rotation::R270, HDir::CondSecond) => 1.0 - h(1.0 - t, c),
        }
    }

    /// Inverse of [`PairCopula::hfunc`] in its `u_target` argument.
    pub fn hinv(&self, p: f64, u_cond: f64, direction: HDir) -> f64 {
        let p = p.clamp(EPS_U, 1.0 - EPS_U);
        let c = u_cond.clamp(EPS_U, 1.0 - EPS_U);
        let inv = |p: f64, c: f64| families::base_hinv(self.family.base, &self.params, p, c);
        let t = match (self.family.rotation, direction) {
            (Rotation::R0, _) => inv(p, c),
            (Rotation::R90, HDir::CondFirst) => 1.0 - inv(1.0 - p, c),
            (Rotation::R90, HDir::CondSecond) => inv(p, 1.0 - c),
            (Rotation::R180, _) => 1.0 - inv(1.0 - p, 1.0 - c),
            (Rotation::R270, HDir::CondFirst) => inv(p, 1.0 - c),
            (Rotation::R270, HDir::CondSecond) => 1.0 - inv(1.0 - p, c),
        };
        t.clamp(EPS_U, 1.0 - EPS_U)
    }

    /// Model-implied Kendall's τ (recomputed from the parameters).
    pub fn tau_of(&self) -> f64 {
        let base = families::base_tau(self.family.base, &self.params);
        if self.family.rotation.negates_tau() {
            -base
        } else {
            base
        }
    }

    /// Lower tail-dependence coefficient of the rotated copula.
    pub fn lambda_lower_of(&self) -> f64 {
        match self.family.rotation {
            Rotation::R0 => families::base_lambda_lower(self.family.base, &self.params),
            Rotation::R180 => families::base_lambda_upper(self.family.base, &self.params),
            Rotation::R90 | Rotation::R270 => 0.0,
        }
    }

    /// Upper tail-dependence coefficient of the rotated copula.
    pub fn lambda_upper_of(&self) -> f64 {
        match self.family.rotation {
            Rotation::R0 => families::base_lambda_upper(self.family.base, &self.params),
            Rotation::R180 => families::base_lambda_lower(self.family.base, &self.params),
            Rotation::R90 | Rotation::R270 => 0.0,
        }
    }

    /// Sum of log densities over paired observations.
    pub fn loglik_on(&self, u1: &[f64], u2: &[f64]) -> f64 {
        u1.iter().zip(u2).map(|(&a, &b)| self.density(a, b).ln()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_id_roundtrips_through_strings() {
        for base in BaseFamily::ALL {
            for rot in Rotation::ALL {
                let Ok(id) = FamilyId::new(base, rot) else {
                    assert!(!base.is_rotatable() && rot != Rotation::R0);
                    continue;
                };
                let s = id.to_string();
                let back: FamilyId = s.parse().unwrap();
                assert_eq!(back, id);
            }
        }
        assert_eq!(
            "clayton@180".parse::<FamilyId>().unwrap(),
            FamilyId::new(BaseFamily::Clayton, Rotation::R180).unwrap()
        );
        assert!("gaussian@90".parse::<FamilyId>().is_err());
        assert!("pareto@0".parse::<FamilyId>().is_err());
    }

    #[test]
    fn rotation_invariant_enforced() {
        for base in [BaseFamily::Independence, BaseFamily::Gaussian, BaseFamily::StudentT, BaseFamily::Frank] {
            assert!(FamilyId::new(base, Rotation::R90).is_err());
            assert!(FamilyId::new(base, Rotation::R0).is_ok());
        }
        for base in [BaseFamily::Clayton, BaseFamily::BB7] {
            assert!(FamilyId::new(base, Rotation::R270).is_ok());
        }
    }

    #[test]
    fn catalog_orderings_are_deterministic() {
        let itau = Catalog::itau();
        assert_eq!(itau.families()[0], FamilyId::unrotated(BaseFamily::Independence));
        assert_eq!(itau.families().len(), 4 + 3 * 4);
        let par = Catalog::parametric();
        assert_eq!(par.families().len(), 4 + 6 * 4);
        assert_eq!(&par.families()[..16], itau.families());
        assert_eq!(Catalog::gaussian_only().families().len(), 1);
        assert!(Catalog::custom(vec![]).is_err());
    }

    #[test]
    fn independence_copula_is_flat() {
        let pc = PairCopula::independence();
        assert_eq!(pc.density(0.3, 0.8), 1.0);
        assert_eq!(pc.hfunc(0.4, 0.9, HDir::CondFirst), 0.4);
        assert_eq!(pc.tau, 0.0);
        assert_eq!(pc.n_params, 0);
        assert_eq!(pc.loglik, 0.0);
    }
}
