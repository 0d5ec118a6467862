//! End-to-end runs: colour a family, reduce it to consensus division or to
//! Z_p-Tucker, solve, map the solution back and verify it. Also sweeps,
//! fault fuzzing and the file formats used by the command-line driver.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condiv::{
    condiv_budget, extract_any, find_monotonicity_violation, grid_solve, reduce_kneser_to_condiv,
    CondivInstance, CondivSolution, Extraction, GridConfig,
};
use crate::error::{Error, Result};
use crate::kneser::{
    astab_coloring_from_stab, pull_back_stable_edge, verify_hyperedge, Coloring, ColoringSpec,
    Hyperedge,
};
use crate::measure::{parse_rational, Rational};
use crate::oracle::{
    check_violation, corrupt_oracle, honest_subset_oracle, FaultSpec, KneserSQInstance, Violation,
};
use crate::sets::{Family, SizeCap};
use crate::zptucker::{chain_solve, Chain, SignedVector, TuckerReduction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Condiv,
    Tucker,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Condiv => "condiv",
            Route::Tucker => "tucker",
        }
    }
}

/// Which labeling the Tucker route builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuckerConstruction {
    General,
    AlmostStable,
    /// Stable sets, recoloured as almost stable sets with one extra colour.
    StabToAstab,
}

impl TuckerConstruction {
    pub fn name(self) -> &'static str {
        match self {
            TuckerConstruction::General => "general",
            TuckerConstruction::AlmostStable => "almost_stable",
            TuckerConstruction::StabToAstab => "stab_to_astab",
        }
    }

    pub fn default_for(family: &Family) -> Self {
        match family {
            Family::AlmostStable { .. } => TuckerConstruction::AlmostStable,
            Family::Stable { .. } => TuckerConstruction::StabToAstab,
            _ => TuckerConstruction::General,
        }
    }
}

/// Everything that determines a run apart from the seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub route: Route,
    pub family: Family,
    pub p: usize,
    pub coloring: ColoringSpec,
    #[serde(default, skip_serializing_if = "FaultSpec::is_empty")]
    pub fault: FaultSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<TuckerConstruction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

impl PipelineParams {
    pub fn epsilon(&self) -> Result<Option<Rational>> {
        self.epsilon.as_deref().map(parse_rational).transpose()
    }

    pub fn tucker_construction(&self) -> TuckerConstruction {
        self.construction
            .unwrap_or_else(|| TuckerConstruction::default_for(&self.family))
    }

    pub fn construction_name(&self) -> &'static str {
        match self.route {
            Route::Condiv => "suffix_query_valuations",
            Route::Tucker => self.tucker_construction().name(),
        }
    }
}

/// A reduced instance on disk: the parameters and the seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub seed: u64,
    #[serde(flatten)]
    pub params: PipelineParams,
}

/// Number of colours the chosen route expects for `family`.
pub fn color_budget(
    family: &Family,
    p: usize,
    route: Route,
    construction: Option<TuckerConstruction>,
    cap: &SizeCap,
) -> Result<usize> {
    let construction = construction.unwrap_or_else(|| TuckerConstruction::default_for(family));
    match (route, construction) {
        (Route::Condiv, _) | (Route::Tucker, TuckerConstruction::General) => {
            condiv_budget(p, family.defect(p, cap)?)
        }
        (Route::Tucker, TuckerConstruction::AlmostStable) => {
            let (n, k) = almost_stable_params(family)?;
            let m = (n + p).saturating_sub(p * k + 1) / (p - 1).max(1);
            if n < p * k || m == 0 {
                return Err(degenerate(n, k, p));
            }
            Ok(m)
        }
        (Route::Tucker, TuckerConstruction::StabToAstab) => {
            let (n, k) = stable_params(family)?;
            if n < p * k || (n - p * k) / (p - 1).max(1) == 0 {
                return Err(degenerate(n, k, p));
            }
            Ok((n - p * k) / (p - 1))
        }
    }
}

fn degenerate(n: usize, k: usize, p: usize) -> Error {
    Error::Contract(format!(
        "degenerate budget: no colours for n={n} k={k} p={p}"
    ))
}

fn almost_stable_params(family: &Family) -> Result<(usize, usize)> {
    match family {
        Family::AlmostStable { n, k } => Ok((*n, *k)),
        _ => Err(Error::Contract(format!(
            "the almost_stable construction needs an almost stable family, got {}",
            family.kind_name()
        ))),
    }
}

fn stable_params(family: &Family) -> Result<(usize, usize)> {
    match family {
        Family::Stable { n, k } => Ok((*n, *k)),
        _ => Err(Error::Contract(format!(
            "the stab_to_astab construction needs a stable family, got {}",
            family.kind_name()
        ))),
    }
}

/// The coloured family with its (possibly corrupted) subset oracle.
pub fn kneser_instance(
    params: &PipelineParams,
    seed: u64,
    cap: &SizeCap,
) -> Result<KneserSQInstance> {
    let coloring = params.coloring.build(&params.family, cap)?;
    let honest = honest_subset_oracle(&params.family, &coloring, cap)?;
    let oracle = if params.fault.is_empty() {
        honest
    } else {
        corrupt_oracle(&honest, &params.fault, seed)?
    };
    KneserSQInstance::new(params.family.clone(), coloring, oracle, params.p)
}

pub fn reduce_condiv(
    params: &PipelineParams,
    seed: u64,
    cap: &SizeCap,
) -> Result<(KneserSQInstance, CondivInstance)> {
    if params.route != Route::Condiv {
        return Err(Error::Contract("parameters describe a tucker run".into()));
    }
    let inst = kneser_instance(params, seed, cap)?;
    let cinst = reduce_kneser_to_condiv(&inst, params.p, params.epsilon()?, cap)?;
    Ok((inst, cinst))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondivSolved {
    pub solution: CondivSolution,
    pub nodes: u64,
    /// Grid denominator of the division, when one was found.
    #[serde(default)]
    pub denominator: Option<usize>,
}

/// Grid search; when the grid is exhausted, a monotonicity break of some
/// valuation is an admissible answer instead.
pub fn solve_condiv(
    cinst: &CondivInstance,
    grid: GridConfig,
    cap: &SizeCap,
) -> Result<CondivSolved> {
    match grid_solve(cinst, grid) {
        Ok(sol) => Ok(CondivSolved {
            solution: CondivSolution::Division(sol.division),
            nodes: sol.nodes,
            denominator: Some(sol.denominator),
        }),
        Err(Error::Exhausted(msg)) => match find_monotonicity_violation(cinst, cap)? {
            Some(solution) => Ok(CondivSolved {
                solution,
                nodes: 0,
                denominator: None,
            }),
            None => Err(Error::Exhausted(msg)),
        },
        Err(e) => Err(e),
    }
}

pub fn extract_condiv(
    params: &PipelineParams,
    seed: u64,
    solved: &CondivSolution,
    cap: &SizeCap,
) -> Result<Extraction> {
    let (inst, _) = reduce_condiv(params, seed, cap)?;
    extract_any(&inst, solved, params.p, params.epsilon()?, cap)
}

/// A Tucker reduction plus what is needed to verify its hyperedges on the
/// original family.
#[derive(Debug, Clone)]
pub struct TuckerPlan {
    pub reduction: TuckerReduction,
    pub family: Family,
    pub coloring: Coloring,
    pub p: usize,
    construction: TuckerConstruction,
}

impl TuckerPlan {
    pub fn construction(&self) -> TuckerConstruction {
        self.construction
    }

    /// The hyperedge of the original family read off a chain solution.
    pub fn extract(&self, chain: &Chain) -> Result<Hyperedge> {
        let edge = self.reduction.extract(chain)?;
        match self.construction {
            TuckerConstruction::StabToAstab => {
                let (n, k) = stable_params(&self.family)?;
                pull_back_stable_edge(n, k, self.p, &self.coloring, &edge)
            }
            _ => Ok(edge),
        }
    }

    pub fn verify(&self, edge: &Hyperedge) -> bool {
        verify_hyperedge(&self.family, self.p, &self.coloring, edge)
    }
}

pub fn reduce_tucker(params: &PipelineParams, cap: &SizeCap) -> Result<TuckerPlan> {
    if params.route != Route::Tucker {
        return Err(Error::Contract("parameters describe a condiv run".into()));
    }
    if !params.fault.is_empty() {
        return Err(Error::Contract(
            "fault specs apply to the subset oracle, which the tucker route does not query".into(),
        ));
    }
    let coloring = params.coloring.build(&params.family, cap)?;
    let construction = params.tucker_construction();
    let p = params.p;
    let reduction = match construction {
        TuckerConstruction::General => TuckerReduction::general(&params.family, &coloring, p, cap)?,
        TuckerConstruction::AlmostStable => {
            let (n, k) = almost_stable_params(&params.family)?;
            TuckerReduction::almost_stable(n, k, p, &coloring)?
        }
        TuckerConstruction::StabToAstab => {
            let (n, k) = stable_params(&params.family)?;
            let lifted = astab_coloring_from_stab(n, k, p, &coloring)?;
            TuckerReduction::almost_stable(n, k, p, &lifted)?
        }
    };
    Ok(TuckerPlan {
        reduction,
        family: params.family.clone(),
        coloring,
        p,
        construction,
    })
}

/// A chain solution on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub p: usize,
    pub vectors: Vec<Vec<u8>>,
    #[serde(default)]
    pub nodes: u64,
}

impl ChainFile {
    pub fn new(chain: &Chain, p: usize, nodes: u64) -> Self {
        ChainFile {
            p,
            vectors: chain.vectors.iter().map(|v| v.entries().to_vec()).collect(),
            nodes,
        }
    }

    pub fn chain(&self) -> Result<Chain> {
        Ok(Chain {
            vectors: self
                .vectors
                .iter()
                .map(|v| SignedVector::new(self.p, v.clone()))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
    /// Grid denominator of a consensus division.
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Hyperedge { edge: Hyperedge },
    Violation { violation: Violation },
    Failure { message: String },
    Rejected { message: String },
}

impl Outcome {
    /// Short form used in CSV rows.
    pub fn summary(&self) -> String {
        match self {
            Outcome::Hyperedge { .. } => "hyperedge".into(),
            Outcome::Violation { .. } => "violation".into(),
            Outcome::Failure { message } => format!("failure: {message}"),
            Outcome::Rejected { message } => format!("rejected: {message}"),
        }
    }

    fn from_error(e: Error) -> Self {
        match e {
            Error::Contract(message) => Outcome::Rejected { message },
            e if e.is_rejection() => Outcome::Rejected {
                message: e.to_string(),
            },
            e => Outcome::Failure {
                message: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub version: String,
    pub seed: u64,
    pub construction: String,
    pub params: PipelineParams,
    pub stats: SolverStats,
    pub outcome: Outcome,
    pub verdict: bool,
}

/// One CSV line per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub k: Option<usize>,
    pub p: usize,
    pub route: String,
    pub construction: String,
    pub seed: u64,
    pub m: Option<usize>,
    pub outcome: String,
    pub verdict: bool,
    pub nodes: u64,
    pub resolution: Option<usize>,
    pub elapsed_ms: u64,
}

impl PipelineReport {
    pub fn summary_row(&self) -> SummaryRow {
        let m = match &self.params.coloring {
            ColoringSpec::Table { m, .. } | ColoringSpec::Seeded { m, .. } => Some(*m),
            ColoringSpec::MergedUpperBound { .. } => None,
        };
        SummaryRow {
            family: self.params.family.kind_name().to_string(),
            n: self.params.family.n(),
            k: self.params.family.k(),
            p: self.params.p,
            route: self.params.route.name().to_string(),
            construction: self.construction.clone(),
            seed: self.seed,
            m,
            outcome: self.outcome.summary(),
            verdict: self.verdict,
            nodes: self.stats.nodes,
            resolution: self.stats.resolution,
            elapsed_ms: self.stats.elapsed_ms,
        }
    }
}

/// Runs reduce, solve, extract and verify. Every stage error ends up in
/// the report.
pub fn run_pipeline(params: &PipelineParams, seed: u64, cap: &SizeCap) -> PipelineReport {
    let start = Instant::now();
    let mut stats = SolverStats::default();
    let result = match params.route {
        Route::Condiv => run_condiv(params, seed, cap, &mut stats),
        Route::Tucker => run_tucker(params, cap, &mut stats),
    };
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    let (outcome, verdict) = result.unwrap_or_else(|e| (Outcome::from_error(e), false));
    PipelineReport {
        version: VERSION.to_string(),
        seed,
        construction: params.construction_name().to_string(),
        params: params.clone(),
        stats,
        outcome,
        verdict,
    }
}

fn run_condiv(
    params: &PipelineParams,
    seed: u64,
    cap: &SizeCap,
    stats: &mut SolverStats,
) -> Result<(Outcome, bool)> {
    let (inst, cinst) = reduce_condiv(params, seed, cap)?;
    let grid = params
        .grid
        .unwrap_or_else(|| GridConfig::for_instance(&cinst));
    let solved = solve_condiv(&cinst, grid, cap)?;
    stats.nodes = solved.nodes;
    stats.resolution = solved.denominator;
    match extract_any(&inst, &solved.solution, params.p, params.epsilon()?, cap)? {
        Extraction::Hyperedge { edge } => {
            if !verify_hyperedge(&inst.family, params.p, &inst.coloring, &edge) {
                return Err(Error::Contract(format!("unverified hyperedge {edge:?}")));
            }
            Ok((Outcome::Hyperedge { edge }, true))
        }
        Extraction::Violation { violation } => {
            let ok = check_violation(&inst, &violation);
            Ok((Outcome::Violation { violation }, ok))
        }
    }
}

fn run_tucker(
    params: &PipelineParams,
    cap: &SizeCap,
    stats: &mut SolverStats,
) -> Result<(Outcome, bool)> {
    let plan = reduce_tucker(params, cap)?;
    let sol = chain_solve(&plan.reduction.instance)?;
    stats.nodes = sol.nodes;
    let edge = plan.extract(&sol.chain)?;
    if !plan.verify(&edge) {
        return Err(Error::Contract(format!("unverified hyperedge {edge:?}")));
    }
    Ok((Outcome::Hyperedge { edge }, true))
}

/// Family kinds a sweep can range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Allk,
    Stable,
    AlmostStable,
}

impl FamilyKind {
    pub fn build(self, n: usize, k: usize) -> Result<Family> {
        match self {
            FamilyKind::Allk => Family::all_k(n, k),
            FamilyKind::Stable => Family::stable(n, k),
            FamilyKind::AlmostStable => Family::almost_stable(n, k),
        }
    }
}

/// Cartesian product of parameters; rows come out in the order
/// `n`, `k`, `p`, route, seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: FamilyKind,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub p: Vec<usize>,
    pub routes: Vec<Route>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub epsilon: Option<String>,
}

fn sweep_cell(
    spec: &SweepSpec,
    n: usize,
    k: usize,
    p: usize,
    route: Route,
    seed: u64,
    cap: &SizeCap,
) -> SummaryRow {
    let rejected = |e: Error| SummaryRow {
        family: format!("{:?}", spec.family).to_lowercase(),
        n,
        k: Some(k),
        p,
        route: route.name().to_string(),
        construction: String::new(),
        seed,
        m: None,
        outcome: Outcome::from_error(e).summary(),
        verdict: false,
        nodes: 0,
        resolution: None,
        elapsed_ms: 0,
    };
    let family = match spec.family.build(n, k) {
        Ok(f) => f,
        Err(e) => return rejected(e),
    };
    let m = match color_budget(&family, p, route, None, cap) {
        Ok(m) => m,
        Err(e) => return rejected(e),
    };
    let params = PipelineParams {
        route,
        family,
        p,
        coloring: ColoringSpec::Seeded { m, seed },
        fault: FaultSpec::default(),
        epsilon: spec.epsilon.clone(),
        construction: None,
        grid: None,
    };
    run_pipeline(&params, seed, cap).summary_row()
}

/// Runs every cell of the sweep in parallel; rows keep parameter order.
pub fn sweep(spec: &SweepSpec, cap: &SizeCap) -> Vec<SummaryRow> {
    let mut cells = Vec::new();
    for &n in &spec.n {
        for &k in &spec.k {
            for &p in &spec.p {
                for &route in &spec.routes {
                    for &seed in &spec.seeds {
                        cells.push((n, k, p, route, seed));
                    }
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(n, k, p, route, seed)| sweep_cell(spec, n, k, p, route, seed, cap))
        .collect()
}

const CSV_HEADER: [&str; 13] = [
    "family",
    "n",
    "k",
    "p",
    "route",
    "construction",
    "seed",
    "m",
    "outcome",
    "verdict",
    "nodes",
    "resolution",
    "elapsed_ms",
];

/// CSV with a header line, also when there are no rows.
pub fn rows_to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub runs: usize,
    pub hyperedges: usize,
    pub violations: usize,
    /// Violations accepted by the checker.
    pub checked_violations: usize,
    pub failures: usize,
    pub rejected: usize,
}

impl FuzzSummary {
    /// Every run ended in a hyperedge or in a checked violation.
    pub fn all_resolved(&self) -> bool {
        self.hyperedges + self.checked_violations == self.runs
    }
}

/// Condiv runs on `family` with randomly corrupted oracles: run `i` uses
/// seed `seed + i` for the colouring and for `1 + (seed + i) % 3` flips.
pub fn fuzz(
    family: &Family,
    p: usize,
    runs: usize,
    seed: u64,
    cap: &SizeCap,
) -> Result<(FuzzSummary, Vec<PipelineReport>)> {
    let m = color_budget(family, p, Route::Condiv, None, cap)?;
    let reports: Vec<PipelineReport> = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let params = PipelineParams {
                route: Route::Condiv,
                family: family.clone(),
                p,
                coloring: ColoringSpec::Seeded { m, seed: s },
                fault: FaultSpec {
                    flips: Vec::new(),
                    random_flips: 1 + (s % 3) as usize,
                },
                epsilon: None,
                construction: None,
                grid: None,
            };
            run_pipeline(&params, s, cap)
        })
        .collect();
    let mut summary = FuzzSummary {
        runs,
        ..FuzzSummary::default()
    };
    for r in &reports {
        match &r.outcome {
            Outcome::Hyperedge { .. } => summary.hyperedges += 1,
            Outcome::Violation { .. } => {
                summary.violations += 1;
                if r.verdict {
                    summary.checked_violations += 1;
                }
            }
            Outcome::Failure { .. } => summary.failures += 1,
            Outcome::Rejected { .. } => summary.rejected += 1,
        }
    }
    Ok((summary, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap() -> SizeCap {
        SizeCap::default()
    }

    fn params(route: Route, n: usize, k: usize, p: usize, seed: u64) -> PipelineParams {
        let family = Family::all_k(n, k).unwrap();
        let m = color_budget(&family, p, route, None, &cap()).unwrap();
        PipelineParams {
            route,
            family,
            p,
            coloring: ColoringSpec::Seeded { m, seed },
            fault: FaultSpec::default(),
            epsilon: None,
            construction: None,
            grid: None,
        }
    }

    #[test]
    fn tucker_route_finds_edge() {
        let r = run_pipeline(&params(Route::Tucker, 5, 2, 2, 3), 3, &cap());
        assert!(
            matches!(r.outcome, Outcome::Hyperedge { .. }),
            "{:?}",
            r.outcome
        );
        assert!(r.verdict);
    }

    #[test]
    fn condiv_route_finds_edge() {
        let r = run_pipeline(&params(Route::Condiv, 5, 2, 2, 3), 3, &cap());
        assert!(
            matches!(r.outcome, Outcome::Hyperedge { .. }),
            "{:?}",
            r.outcome
        );
        assert!(r.verdict);
        assert!(r.stats.resolution.is_some());
    }

    #[test]
    fn faulty_condiv_route_reports_violation() {
        let mut p = params(Route::Condiv, 5, 2, 2, 1);
        // every query for colour 1 answers the opposite
        p.fault.flips = Family::all_k(5, 2)
            .unwrap()
            .members(&cap())
            .unwrap()
            .into_iter()
            .map(|b| crate::oracle::Flip {
                set: b.to_vec(),
                color: 1,
            })
            .collect();
        let r = run_pipeline(&p, 1, &cap());
        match r.outcome {
            Outcome::Violation { .. } => assert!(r.verdict),
            Outcome::Hyperedge { .. } => assert!(r.verdict),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stable_and_almost_stable_constructions() {
        for (family, construction) in [
            (
                Family::stable(8, 2).unwrap(),
                TuckerConstruction::StabToAstab,
            ),
            (
                Family::almost_stable(7, 2).unwrap(),
                TuckerConstruction::AlmostStable,
            ),
        ] {
            let m = color_budget(&family, 2, Route::Tucker, None, &cap()).unwrap();
            let p = PipelineParams {
                route: Route::Tucker,
                family,
                p: 2,
                coloring: ColoringSpec::Seeded { m, seed: 9 },
                fault: FaultSpec::default(),
                epsilon: None,
                construction: None,
                grid: None,
            };
            assert_eq!(p.tucker_construction(), construction);
            let r = run_pipeline(&p, 9, &cap());
            assert!(r.verdict, "{:?}", r.outcome);
        }
    }

    #[test]
    fn degenerate_sweep_cell_is_rejected() {
        let spec = SweepSpec {
            family: FamilyKind::Allk,
            n: vec![3],
            k: vec![2],
            p: vec![2],
            routes: vec![Route::Condiv],
            seeds: vec![0],
            epsilon: None,
        };
        let rows = sweep(&spec, &cap());
        assert_eq!(rows.len(), 1);
        assert!(
            rows[0].outcome.starts_with("rejected: degenerate budget"),
            "{}",
            rows[0].outcome
        );
    }

    #[test]
    fn empty_sweep_has_header_only() {
        let spec = SweepSpec {
            family: FamilyKind::Allk,
            n: vec![],
            k: vec![2],
            p: vec![2],
            routes: vec![Route::Condiv],
            seeds: vec![0],
            epsilon: None,
        };
        let csv = rows_to_csv(&sweep(&spec, &cap())).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("family,n,k,p,route"));
    }

    #[test]
    fn tucker_rejects_faults() {
        let mut p = params(Route::Tucker, 5, 2, 2, 0);
        p.fault.random_flips = 1;
        assert!(matches!(
            run_pipeline(&p, 0, &cap()).outcome,
            Outcome::Rejected { .. }
        ));
    }

    #[test]
    fn instance_file_round_trip() {
        let file = InstanceFile {
            seed: 4,
            params: params(Route::Condiv, 5, 2, 2, 4),
        };
        let text = serde_json::to_string(&file).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }
}
