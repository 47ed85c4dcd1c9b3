//! The fixed five-tree regular vine over assets, class indices, and the
//! market index.
//!
//! Variables are numbered `0..n` for the assets, then the four class
//! indices I_A, I_B, I_C, I_D, then the market index M. The template:
//!
//! - tree 1: every asset pairs with its own class index; each class
//!   index pairs with M;
//! - tree 2: every asset pairs with M given its class; index edges
//!   (A,B|M), (B,C|M), (C,D|M);
//! - tree 3: class-A assets pair with I_B, class-B with I_C, class-C
//!   with I_B, class-D with I_C, given {own class, M}; index edges
//!   (A,C|M,B) and (B,D|M,C);
//! - tree 4: class-A assets pair with I_C, class-B with I_A, class-C
//!   with I_D, class-D with I_B; index edge (A,D|M,B,C);
//! - tree 5: every asset pairs with its one remaining index.
//!
//! The vine is truncated after tree 5: all deeper dependencies are
//! conditional independence. Each asset therefore touches exactly
//! {own index, M, the three other indices} across its five edges.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copula::{
    empirical_tau, fit_pair, BaseFamily, Catalog, CopulaError, FamilyId, FitMethod, HDir,
    PairCopula, Rotation,
};
use crate::panel::EsgClass;

/// Variable index into the vine's node list.
pub type VarId = usize;

#[derive(Debug, Error)]
pub enum VineError {
    #[error("class {class} has no assets")]
    EmptyClass { class: EsgClass },
    #[error("bad input data: {0}")]
    DataShape(String),
    #[error("degenerate pseudo-data (constant column) at {label}")]
    Degenerate { label: String },
    #[error("fit failed at {label}: {source}")]
    EdgeFit { label: String, source: CopulaError },
    #[error("models fitted on different sample sizes: {0} vs {1}")]
    NobsMismatch(usize, usize),
    #[error("{0}")]
    Invalid(String),
}

/// One vine edge: the conditioned pair and its conditioning set.
///
/// `parents` are positions in the previous tree's edge list supplying
/// the pseudo-data for `conditioned.0` and `conditioned.1`; `None` in
/// tree 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub conditioned: (VarId, VarId),
    pub conditioning: Vec<VarId>,
    pub parents: Option<(usize, usize)>,
}

impl Edge {
    fn new(a: VarId, b: VarId, conditioning: Vec<VarId>, parents: Option<(usize, usize)>) -> Edge {
        Edge { conditioned: (a, b), conditioning, parents }
    }

    /// The full constraint set: conditioned pair plus conditioning set.
    pub fn constraint(&self) -> Vec<VarId> {
        let mut all = vec![self.conditioned.0, self.conditioned.1];
        all.extend_from_slice(&self.conditioning);
        all.sort_unstable();
        all
    }
}

/// The instantiated five-tree template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VineStructure {
    pub n_assets: usize,
    /// Class of each asset (defines which chain the asset follows).
    pub classes: Vec<EsgClass>,
    /// Five trees; in every tree the first `n_assets` edges are the
    /// asset edges in asset order, index edges follow.
    pub trees: Vec<Vec<Edge>>,
}

impl VineStructure {
    pub fn n_vars(&self) -> usize {
        self.n_assets + 5
    }

    /// Variable id of a class index.
    pub fn index_var(&self, class: EsgClass) -> VarId {
        self.n_assets + class.index()
    }

    /// Variable id of the market index.
    pub fn market_var(&self) -> VarId {
        self.n_assets + 4
    }

    /// Total number of edges over all trees.
    pub fn n_edges(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }

    /// Human-readable variable label (`a3`, `I_B`, `M`).
    pub fn var_label(&self, v: VarId) -> String {
        if v < self.n_assets {
            format!("a{v}")
        } else if v == self.market_var() {
            "M".into()
        } else {
            format!("I_{}", EsgClass::ALL[v - self.n_assets])
        }
    }

    /// Human-readable edge identity, e.g. `tree 3 edge (a0, I_B | I_A, M)`.
    pub fn edge_label(&self, tree: usize, idx: usize) -> String {
        let e = &self.trees[tree][idx];
        let cond: Vec<String> = e.conditioning.iter().map(|&v| self.var_label(v)).collect();
        let pair =
            format!("{}, {}", self.var_label(e.conditioned.0), self.var_label(e.conditioned.1));
        if cond.is_empty() {
            format!("tree {} edge ({pair})", tree + 1)
        } else {
            format!("tree {} edge ({pair} | {})", tree + 1, cond.join(", "))
        }
    }
}

/// The partner-class chain per asset class: tree-3, tree-4, and tree-5
/// partners (tree 1 is the own class, tree 2 is M).
fn chain(class: EsgClass) -> [EsgClass; 3] {
    match class {
        EsgClass::A => [EsgClass::B, EsgClass::C, EsgClass::D],
        EsgClass::B => [EsgClass::C, EsgClass::A, EsgClass::D],
        EsgClass::C => [EsgClass::B, EsgClass::D, EsgClass::A],
        EsgClass::D => [EsgClass::C, EsgClass::B, EsgClass::A],
    }
}

/// Builds the five-tree template for the given class membership.
pub fn build_structure(classes: &[EsgClass]) -> Result<VineStructure, VineError> {
    for class in EsgClass::ALL {
        if !classes.contains(&class) {
            return Err(VineError::EmptyClass { class });
        }
    }
    let n = classes.len();
    let iv = |c: EsgClass| n + c.index();
    let (ia, ib, ic, id) = (iv(EsgClass::A), iv(EsgClass::B), iv(EsgClass::C), iv(EsgClass::D));
    let m = n + 4;

    // Position of each class's index edge within a tree's trailing
    // index-edge block, per tree. Tree 1 holds (I_k, M) at n + k.
    let mut trees: Vec<Vec<Edge>> = Vec::with_capacity(5);

    // Tree 1: asset -> own index; each index -> M.
    let mut t1: Vec<Edge> = classes
        .iter()
        .enumerate()
        .map(|(j, &k)| Edge::new(j, iv(k), vec![], None))
        .collect();
    for k in [ia, ib, ic, id] {
        t1.push(Edge::new(k, m, vec![], None));
    }
    trees.push(t1);

    // Tree 2: asset -> M | own class; chain (A,B|M), (B,C|M), (C,D|M).
    // Parent positions: asset edge j sits at j, index edge (I_k, M) at n+k.
    let mut t2: Vec<Edge> = classes
        .iter()
        .enumerate()
        .map(|(j, &k)| Edge::new(j, m, vec![iv(k)], Some((j, n + k.index()))))
        .collect();
    t2.push(Edge::new(ia, ib, vec![m], Some((n, n + 1))));
    t2.push(Edge::new(ib, ic, vec![m], Some((n + 1, n + 2))));
    t2.push(Edge::new(ic, id, vec![m], Some((n + 2, n + 3))));
    trees.push(t2);

    // Tree 3: asset -> chain partner | own, M. The partner's pseudo-data
    // comes from the tree-2 index edge holding that partner:
    // A-assets use (A,B|M) at n, B/C-assets use (B,C|M) at n+1,
    // D-assets use (C,D|M) at n+2.
    let t3_index_pos = |k: EsgClass| match k {
        EsgClass::A => n,
        EsgClass::B | EsgClass::C => n + 1,
        EsgClass::D => n + 2,
    };
    let mut t3: Vec<Edge> = classes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let partner = chain(k)[0];
            Edge::new(j, iv(partner), vec![iv(k), m], Some((j, t3_index_pos(k))))
        })
        .collect();
    t3.push(Edge::new(ia, ic, vec![m, ib], Some((n, n + 1))));
    t3.push(Edge::new(ib, id, vec![m, ic], Some((n + 1, n + 2))));
    trees.push(t3);

    // Tree 4: asset -> next chain partner | own, M, previous partner.
    // A/B-assets draw the partner from (A,C|M,B) at n, C/D-assets from
    // (B,D|M,C) at n+1.
    let t4_index_pos = |k: EsgClass| match k {
        EsgClass::A | EsgClass::B => n,
        EsgClass::C | EsgClass::D => n + 1,
    };
    let mut t4: Vec<Edge> = classes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let [p3, p4, _] = chain(k);
            Edge::new(j, iv(p4), vec![iv(k), m, iv(p3)], Some((j, t4_index_pos(k))))
        })
        .collect();
    t4.push(Edge::new(ia, id, vec![m, ib, ic], Some((n, n + 1))));
    trees.push(t4);

    // Tree 5: asset -> last remaining index | everything else; the
    // single tree-4 index edge (A,D|M,B,C) at n supplies every partner.
    let t5: Vec<Edge> = classes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let [p3, p4, p5] = chain(k);
            Edge::new(j, iv(p5), vec![iv(k), m, iv(p3), iv(p4)], Some((j, n)))
        })
        .collect();
    trees.push(t5);

    Ok(VineStructure { n_assets: n, classes: classes.to_vec(), trees })
}

/// Independent structural validator: tree-ness of every level, the
/// proximity condition, and the edge-count schedule. Does not consult
/// the stored parent pointers.
pub fn validate_structure(s: &VineStructure) -> Result<(), String> {
    let n_vars = s.n_vars();
    if s.trees.len() != 5 {
        return Err(format!("expected 5 trees, found {}", s.trees.len()));
    }
    for (ti, tree) in s.trees.iter().enumerate() {
        let expect = n_vars - 1 - ti;
        if tree.len() != expect {
            return Err(format!("tree {} has {} edges, expected {expect}", ti + 1, tree.len()));
        }
        for (ei, e) in tree.iter().enumerate() {
            let c = e.constraint();
            if c.len() != ti + 2 || c.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("tree {} edge {ei}: malformed constraint set", ti + 1));
            }
            if c.iter().any(|&v| v >= n_vars) {
                return Err(format!("tree {} edge {ei}: variable out of range", ti + 1));
            }
        }
    }

    // Union-find spanning-tree check.
    fn spanning(n_nodes: usize, links: &[(usize, usize)]) -> bool {
        let mut root: Vec<usize> = (0..n_nodes).collect();
        fn find(root: &mut Vec<usize>, mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        let mut merged = 0usize;
        for &(a, b) in links {
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            if ra == rb {
                return false; // cycle
            }
            root[ra] = rb;
            merged += 1;
        }
        merged == n_nodes - 1
    }

    // Tree 1 spans the variables.
    let links1: Vec<(usize, usize)> =
        s.trees[0].iter().map(|e| (e.conditioned.0, e.conditioned.1)).collect();
    if !spanning(n_vars, &links1) {
        return Err("tree 1 is not a spanning tree over the variables".into());
    }

    // Trees 2..5: nodes are the previous tree's edges. Each edge must
    // join two previous-tree edges sharing all conditioning variables
    // (the proximity condition), and the level must itself be a tree.
    for ti in 1..5 {
        let prev = &s.trees[ti - 1];
        let prev_sets: Vec<Vec<VarId>> = prev.iter().map(Edge::constraint).collect();
        let mut links = Vec::with_capacity(s.trees[ti].len());
        for (ei, e) in s.trees[ti].iter().enumerate() {
            let mut want = e.constraint();
            want.dedup();
            let mut found = None;
            'search: for (i, ci) in prev_sets.iter().enumerate() {
                for (jj, cj) in prev_sets.iter().enumerate().skip(i + 1) {
                    let mut union: Vec<VarId> = ci.iter().chain(cj).copied().collect();
                    union.sort_unstable();
                    union.dedup();
                    if union != want {
                        continue;
                    }
                    // Symmetric difference must be the conditioned pair.
                    let mut sym: Vec<VarId> = ci
                        .iter()
                        .filter(|v| !cj.contains(v))
                        .chain(cj.iter().filter(|v| !ci.contains(v)))
                        .copied()
                        .collect();
                    sym.sort_unstable();
                    let mut pair = vec![e.conditioned.0, e.conditioned.1];
                    pair.sort_unstable();
                    if sym == pair {
                        found = Some((i, jj));
                        break 'search;
                    }
                }
            }
            match found {
                Some(link) => links.push(link),
                None => {
                    return Err(format!(
                        "proximity violated at tree {} edge {ei}",
                        ti + 1
                    ))
                }
            }
        }
        if !spanning(prev.len(), &links) {
            return Err(format!("tree {} is not a tree over tree {} edges", ti + 1, ti));
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ fitting

/// The three shipped model configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// τ-inversion catalog (one-parameter families by Kendall's τ).
    Itau,
    /// Full parametric catalog with per-family maximum likelihood.
    Parametric,
    /// Gaussian-only benchmark, ρ by τ-inversion.
    Gaussian,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Itau, ModelKind::Parametric, ModelKind::Gaussian];

    /// The table label used in comparison outputs.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Itau => "itau",
            ModelKind::Parametric => "par",
            ModelKind::Gaussian => "gaus",
        }
    }

    pub fn catalog(self) -> Catalog {
        match self {
            ModelKind::Itau => Catalog::itau(),
            ModelKind::Parametric => Catalog::parametric(),
            ModelKind::Gaussian => Catalog::gaussian_only(),
        }
    }

    pub fn method(self) -> FitMethod {
        match self {
            ModelKind::Parametric => FitMethod::Mle,
            ModelKind::Itau | ModelKind::Gaussian => FitMethod::Itau,
        }
    }

    pub fn from_label(s: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// A fitted (or assembled) vine model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VineModel {
    pub structure: VineStructure,
    /// Per-tree, per-edge fitted copulas, aligned with `structure.trees`.
    pub edge_copulas: Vec<Vec<PairCopula>>,
    /// Empirical Kendall's τ of each edge's conditional pseudo-data
    /// (zeros for assembled models).
    pub edge_tau_emp: Vec<Vec<f64>>,
    pub loglik: f64,
    pub npars: usize,
    pub aic: f64,
    pub bic: f64,
    pub mbic: f64,
    pub nobs: usize,
    pub catalog_name: String,
}

/// Default sparsity prior for the mBIC penalty.
pub const DEFAULT_PSI0: f64 = 0.9;

/// mBIC from summary statistics: −2·ℓ + k·ln(n) − 2·Σ_m [q_m·ln(ψ0^m) +
/// (e_m − q_m)·ln(1 − ψ0^m)], where tree m has e_m edges of which q_m
/// are non-independence.
pub fn mbic_value(
    loglik: f64,
    npars: usize,
    nobs: usize,
    tree_counts: &[(usize, usize)],
    psi0: f64,
) -> f64 {
    let mut prior = 0.0;
    for (m, &(e_m, q_m)) in tree_counts.iter().enumerate() {
        let depth = (m + 1) as f64;
        let p = psi0.powf(depth);
        if q_m > 0 {
            prior += q_m as f64 * p.ln();
        }
        if e_m > q_m {
            prior += (e_m - q_m) as f64 * (1.0 - p).ln();
        }
    }
    let base = if npars > 0 || loglik != 0.0 {
        -2.0 * loglik + npars as f64 * (nobs as f64).ln()
    } else {
        0.0
    };
    base - 2.0 * prior
}

fn tree_counts(model: &VineModel) -> Vec<(usize, usize)> {
    model
        .edge_copulas
        .iter()
        .map(|tree| {
            let q = tree
                .iter()
                .filter(|pc| pc.family.base() != BaseFamily::Independence)
                .count();
            (tree.len(), q)
        })
        .collect()
}

/// Recomputes a fitted model's mBIC under a different sparsity prior.
pub fn mbic(model: &VineModel, psi0: f64) -> f64 {
    mbic_value(model.loglik, model.npars, model.nobs, &tree_counts(model), psi0)
}

impl VineModel {
    /// Assembles a model from per-edge copulas (e.g. a simulation
    /// ground truth); summary statistics are derived from the parts.
    pub fn from_copulas(
        structure: VineStructure,
        edge_copulas: Vec<Vec<PairCopula>>,
        nobs: usize,
        catalog_name: &str,
    ) -> Result<VineModel, VineError> {
        if edge_copulas.len() != structure.trees.len()
            || edge_copulas
                .iter()
                .zip(&structure.trees)
                .any(|(cs, es)| cs.len() != es.len())
        {
            return Err(VineError::Invalid("edge copulas do not match the structure".into()));
        }
        let edge_tau_emp: Vec<Vec<f64>> =
            edge_copulas.iter().map(|t| vec![0.0; t.len()]).collect();
        let loglik: f64 = edge_copulas.iter().flatten().map(|pc| pc.loglik).sum();
        let npars: usize = edge_copulas.iter().flatten().map(|pc| pc.n_params).sum();
        let mut model = VineModel {
            structure,
            edge_copulas,
            edge_tau_emp,
            loglik,
            npars,
            aic: 0.0,
            bic: 0.0,
            mbic: 0.0,
            nobs,
            catalog_name: catalog_name.to_string(),
        };
        model.refresh_scores();
        Ok(model)
    }

    fn refresh_scores(&mut self) {
        self.aic = -2.0 * self.loglik + 2.0 * self.npars as f64;
        self.bic = -2.0 * self.loglik + self.npars as f64 * (self.nobs as f64).ln();
        self.mbic = mbic_value(
            self.loglik,
            self.npars,
            self.nobs,
            &tree_counts(self),
            DEFAULT_PSI0,
        );
    }
}

/// Fits one of the shipped model configurations. See [`fit_vine_with`].
pub fn fit_vine(
    u: &[Vec<f64>],
    structure: &VineStructure,
    kind: ModelKind,
) -> Result<VineModel, VineError> {
    fit_vine_with(u, structure, &kind.catalog(), kind.method(), kind.label())
}

/// Sequential tree-by-tree fit: tree-1 edges are fitted on the raw
/// pseudo-copula data, deeper trees on h-function pseudo-data from the
/// tree above. Edge fits within a tree run in parallel; results do not
/// depend on scheduling.
///
/// `u` is column-major: `u[var]` is one variable's series in (0,1),
/// ordered assets `0..n`, then I_A, I_B, I_C, I_D, then M.
pub fn fit_vine_with(
    u: &[Vec<f64>],
    structure: &VineStructure,
    catalog: &Catalog,
    method: FitMethod,
    catalog_name: &str,
) -> Result<VineModel, VineError> {
    let n_vars = structure.n_vars();
    if u.len() != n_vars {
        return Err(VineError::DataShape(format!(
            "expected {n_vars} data columns, got {}",
            u.len()
        )));
    }
    let nobs = u[0].len();
    for (v, col) in u.iter().enumerate() {
        if col.len() != nobs {
            return Err(VineError::DataShape(format!(
                "column {} has {} rows, expected {nobs}",
                structure.var_label(v),
                col.len()
            )));
        }
        if col.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(VineError::DataShape(format!(
                "column {} has values outside (0,1)",
                structure.var_label(v)
            )));
        }
    }

    struct FittedEdge {
        pc: PairCopula,
        tau_emp: f64,
        // Pseudo-data for (conditioned.0 | rest) and (conditioned.1 | rest).
        halves: (Vec<f64>, Vec<f64>),
    }

    let mut edge_copulas: Vec<Vec<PairCopula>> = Vec::with_capacity(5);
    let mut edge_tau_emp: Vec<Vec<f64>> = Vec::with_capacity(5);
    let mut prev: Vec<FittedEdge> = Vec::new();

    for (ti, tree) in structure.trees.iter().enumerate() {
        // Gather each edge's input series from the raw data (tree 1) or
        // the parents' h-function halves.
        let inputs: Vec<(Vec<f64>, Vec<f64>)> = tree
            .iter()
            .map(|e| {
                if ti == 0 {
                    (u[e.conditioned.0].clone(), u[e.conditioned.1].clone())
                } else {
                    let (p0, p1) = e.parents.expect("deeper trees carry parent pointers");
                    let pick = |p: usize, var: VarId| -> Vec<f64> {
                        let parent_edge = &structure.trees[ti - 1][p];
                        if parent_edge.conditioned.0 == var {
                            prev[p].halves.0.clone()
                        } else {
                            debug_assert_eq!(parent_edge.conditioned.1, var);
                            prev[p].halves.1.clone()
                        }
                    };
                    (pick(p0, e.conditioned.0), pick(p1, e.conditioned.1))
                }
            })
            .collect();

        for (ei, (ua, ub)) in inputs.iter().enumerate() {
            let flat = |s: &[f64]| s.iter().all(|&x| x == s[0]);
            if flat(ua) || flat(ub) {
                return Err(VineError::Degenerate { label: structure.edge_label(ti, ei) });
            }
        }

        let fitted: Vec<Result<FittedEdge, VineError>> = inputs
            .par_iter()
            .enumerate()
            .map(|(ei, (ua, ub))| {
                let pc = fit_pair(ua, ub, catalog, method).map_err(|source| {
                    VineError::EdgeFit { label: structure.edge_label(ti, ei), source }
                })?;
                let tau_emp = empirical_tau(ua, ub).map_err(|source| VineError::EdgeFit {
                    label: structure.edge_label(ti, ei),
                    source,
                })?;
                let halves = (
                    ua.iter()
                        .zip(ub)
                        .map(|(&a, &b)| pc.hfunc(a, b, HDir::CondSecond))
                        .collect(),
                    ua.iter()
                        .zip(ub)
                        .map(|(&a, &b)| pc.hfunc(b, a, HDir::CondFirst))
                        .collect(),
                );
                Ok(FittedEdge { pc, tau_emp, halves })
            })
            .collect();

        let mut level = Vec::with_capacity(fitted.len());
        for f in fitted {
            level.push(f?);
        }
        edge_copulas.push(level.iter().map(|f| f.pc.clone()).collect());
        edge_tau_emp.push(level.iter().map(|f| f.tau_emp).collect());
        prev = level;
    }

    let loglik: f64 = edge_copulas.iter().flatten().map(|pc| pc.loglik).sum();
    let npars: usize = edge_copulas.iter().flatten().map(|pc| pc.n_params).sum();
    let mut model = VineModel {
        structure: structure.clone(),
        edge_copulas,
        edge_tau_emp,
        loglik,
        npars,
        aic: 0.0,
        bic: 0.0,
        mbic: 0.0,
        nobs,
        catalog_name: catalog_name.to_string(),
    };
    model.refresh_scores();
    Ok(model)
}

// ----------------------------------------------------------------- sampling

/// Draws `n` joint observations by inverse-Rosenblatt transformation
/// through the five trees (deeper dependencies are truncated to
/// conditional independence). Column-major output in the same variable
/// order as [`fit_vine_with`]; deterministic under `seed`.
pub fn sample_vine(model: &VineModel, n: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let s = &model.structure;
    let na = s.n_assets;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(n); s.n_vars()];

    // The ten index/market edges in their fixed template positions.
    let e_im = |k: usize| &model.edge_copulas[0][na + k]; // (I_k, M)
    let e_ab = &model.edge_copulas[1][na]; // (A,B|M)
    let e_bc = &model.edge_copulas[1][na + 1]; // (B,C|M)
    let e_cd = &model.edge_copulas[1][na + 2]; // (C,D|M)
    let e_ac = &model.edge_copulas[2][na]; // (A,C|M,B)
    let e_bd = &model.edge_copulas[2][na + 1]; // (B,D|M,C)
    let e_ad = &model.edge_copulas[3][na]; // (A,D|M,B,C)

    let clamp = |x: f64| x.clamp(1e-10, 1.0 - 1e-10);
    for _ in 0..n {
        let mut w = || clamp(rng.random::<f64>());
        let (w0, w1, w2, w3, w4) = (w(), w(), w(), w(), w());

        // Core sampling in the order M, A, B, C, D.
        let u_m = w0;
        let a_g_m = w1;
        let u_a = e_im(0).hinv(a_g_m, u_m, HDir::CondSecond);
        let b_g_ma = w2;
        let b_g_m = e_ab.hinv(b_g_ma, a_g_m, HDir::CondFirst);
        let u_b = e_im(1).hinv(b_g_m, u_m, HDir::CondSecond);
        let a_g_mb = e_ab.hfunc(a_g_m, b_g_m, HDir::CondSecond);
        let c_g_mba = w3;
        let c_g_mb = e_ac.hinv(c_g_mba, a_g_mb, HDir::CondFirst);
        let c_g_m = e_bc.hinv(c_g_mb, b_g_m, HDir::CondFirst);
        let u_c = e_im(2).hinv(c_g_m, u_m, HDir::CondSecond);
        let b_g_mc = e_bc.hfunc(b_g_m, c_g_m, HDir::CondSecond);
        let a_g_mbc = e_ac.hfunc(a_g_mb, c_g_mb, HDir::CondSecond);
        let d_g_mbca = w4;
        let d_g_mbc = e_ad.hinv(d_g_mbca, a_g_mbc, HDir::CondFirst);
        let d_g_mc = e_bd.hinv(d_g_mbc, b_g_mc, HDir::CondFirst);
        let d_g_m = e_cd.hinv(d_g_mc, c_g_m, HDir::CondFirst);
        let u_d = e_im(3).hinv(d_g_m, u_m, HDir::CondSecond);

        // Remaining conditionals the per-class chains need.
        let a_g_mbcd = e_ad.hfunc(a_g_mbc, d_g_mbc, HDir::CondSecond);
        let c_g_md = e_cd.hfunc(c_g_m, d_g_m, HDir::CondSecond);
        let b_g_mcd = e_bd.hfunc(b_g_mc, d_g_mc, HDir::CondSecond);

        // Per-class chain conditionals v1..v5: (own index; M|own;
        // partner3|own,M; partner4|own,M,p3; partner5|own,M,p3,p4).
        let chain_v = |k: EsgClass| -> [f64; 5] {
            match k {
                EsgClass::A => {
                    let m_g_a = e_im(0).hfunc(u_m, u_a, HDir::CondFirst);
                    [u_a, m_g_a, b_g_ma, c_g_mba, d_g_mbca]
                }
                EsgClass::B => {
                    let m_g_b = e_im(1).hfunc(u_m, u_b, HDir::CondFirst);
                    [u_b, m_g_b, c_g_mb, a_g_mbc, d_g_mbca]
                }
                EsgClass::C => {
                    let m_g_c = e_im(2).hfunc(u_m, u_c, HDir::CondFirst);
                    [u_c, m_g_c, b_g_mc, d_g_mbc, a_g_mbcd]
                }
                EsgClass::D => {
                    let m_g_d = e_im(3).hfunc(u_m, u_d, HDir::CondFirst);
                    [u_d, m_g_d, c_g_md, b_g_mcd, a_g_mbcd]
                }
            }
        };
        let vs: [[f64; 5]; 4] = std::array::from_fn(|k| chain_v(EsgClass::ALL[k]));

        for (j, &class) in s.classes.iter().enumerate() {
            let v = &vs[class.index()];
            let mut x = w();
            // Invert down the asset's five edges, tree 5 first.
            for depth in (0..5).rev() {
                let pc = &model.edge_copulas[depth][j];
                x = pc.hinv(x, v[depth], HDir::CondSecond);
            }
            out[j].push(clamp(x));
        }
        out[na].push(clamp(u_a));
        out[na + 1].push(clamp(u_b));
        out[na + 2].push(clamp(u_c));
        out[na + 3].push(clamp(u_d));
        out[na + 4].push(clamp(u_m));
    }
    out
}

// --------------------------------------------------------------- comparison

/// One line of the model-comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub period: String,
    pub nobs: usize,
    pub loglik: f64,
    pub npars: usize,
    pub mbic: f64,
}

/// Sorts rows ascending by mBIC (stable: earlier rows win exact ties).
pub fn rank_rows(rows: &mut [ComparisonRow]) {
    rows.sort_by(|a, b| a.mbic.partial_cmp(&b.mbic).expect("finite mBIC"));
}

/// Builds the ranked comparison table for models fitted on the same
/// data; the first row is the winner.
pub fn compare_models(
    models: &[&VineModel],
    period: &str,
) -> Result<Vec<ComparisonRow>, VineError> {
    if let Some(first) = models.first() {
        for m in &models[1..] {
            if m.nobs != first.nobs {
                return Err(VineError::NobsMismatch(first.nobs, m.nobs));
            }
        }
    }
    let mut rows: Vec<ComparisonRow> = models
        .iter()
        .map(|m| ComparisonRow {
            model: m.catalog_name.clone(),
            period: period.to_string(),
            nobs: m.nobs,
            loglik: m.loglik,
            npars: m.npars,
            mbic: m.mbic,
        })
        .collect();
    rank_rows(&mut rows);
    Ok(rows)
}

/// Renders comparison rows as CSV in the published table layout.
pub fn render_comparison(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("Model,Year,nobs,logLik,npars,mBIC\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.2},{},{:.2}\n",
            r.model, r.period, r.nobs, r.loglik, r.npars, r.mbic
        ));
    }
    out
}

// ------------------------------------------------------------------- census

/// Report name of a family ("Studentst", "Gumbel 180°", …).
pub fn family_display_name(family: FamilyId) -> String {
    let base = match family.base() {
        BaseFamily::Independence => "Independence",
        BaseFamily::Gaussian => "Gaussian",
        BaseFamily::StudentT => "Studentst",
        BaseFamily::Frank => "Frank",
        BaseFamily::Clayton => "Clayton",
        BaseFamily::Gumbel => "Gumbel",
        BaseFamily::Joe => "Joe",
        BaseFamily::BB1 => "BB1",
        BaseFamily::BB7 => "BB7",
        BaseFamily::BB8 => "BB8",
    };
    match family.rotation().degrees() {
        0 => base.to_string(),
        d => format!("{base} {d}°"),
    }
}

/// Every admissible family in canonical order (bases in catalog order,
/// rotations 0°/90°/180°/270° after each base).
fn all_families() -> Vec<FamilyId> {
    let mut out = Vec::new();
    for base in BaseFamily::ALL {
        for rot in Rotation::ALL {
            if let Ok(f) = FamilyId::new(base, rot) {
                out.push(f);
            }
        }
    }
    out
}

/// Counts the families selected in one tree (1-based), canonical order,
/// zero-count families omitted.
pub fn family_census(model: &VineModel, tree: usize) -> Vec<(FamilyId, usize)> {
    assert!((1..=5).contains(&tree), "tree index must be 1..=5");
    let edges = &model.edge_copulas[tree - 1];
    all_families()
        .into_iter()
        .filter_map(|f| {
            let c = edges.iter().filter(|pc| pc.family == f).count();
            (c > 0).then_some((f, c))
        })
        .collect()
}

/// Renders one tree's census across several runs (e.g. periods) as CSV:
/// family rows in canonical order, one count column per run.
pub fn render_census(labels: &[&str], censuses: &[Vec<(FamilyId, usize)>]) -> String {
    assert_eq!(labels.len(), censuses.len());
    let mut out = String::from("Copula Family & Rotation");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for f in all_families() {
        let counts: Vec<usize> = censuses
            .iter()
            .map(|c| c.iter().find(|(g, _)| *g == f).map_or(0, |(_, n)| *n))
            .collect();
        if counts.iter().all(|&c| c == 0) {
            continue;
        }
        out.push_str(&family_display_name(f));
        for c in counts {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out
}
