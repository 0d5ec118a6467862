//! `kneser`: command-line driver for the reductions in `kneser-core`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kneser_core::condiv::GridConfig;
use kneser_core::error::Error;
use kneser_core::kneser::{
    chromatic_formula, chromatic_search, monochromatic_hyperedges, upper_bound_coloring,
    ColoringSpec,
};
use kneser_core::oracle::FaultSpec;
use kneser_core::pipeline::{
    color_budget, extract_condiv, fuzz, reduce_condiv, reduce_tucker, rows_to_csv, run_pipeline,
    solve_condiv, sweep, ChainFile, CondivSolved, FamilyKind, InstanceFile, Outcome,
    PipelineParams, Route, SweepSpec, TuckerConstruction,
};
use kneser_core::sets::{DefectMode, Family, SizeCap, Subset};
use kneser_core::zptucker::{
    chain_solve, random_equivariant_instance, table_instance_from_json, table_instance_to_json,
};

#[derive(Parser)]
#[command(
    name = "kneser",
    version,
    about = "Kneser hypergraph reductions: consensus division and Z_p-Tucker"
)]
struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest ground set accepted.
    #[arg(long, global = true, default_value_t = 12)]
    size_cap: usize,
    /// Output format; commands print plain text when omitted.
    #[arg(long, global = true, value_enum)]
    report: Option<ReportFormat>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact chromatic number next to the closed form.
    Chromatic {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        r: usize,
    },
    /// Colorability defect of a family.
    Defect {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        r: usize,
        /// Search exhaustively even where a closed form exists.
        #[arg(long)]
        bruteforce: bool,
    },
    /// The block colouring and a scan for monochromatic hyperedges.
    Upperbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
    },
    /// Build an instance file (or a random Tucker table).
    Reduce {
        #[command(subcommand)]
        target: ReduceTarget,
    },
    /// Solve an instance file.
    Solve {
        #[command(subcommand)]
        target: SolveTarget,
    },
    /// Map a solution back to a hyperedge or a violation.
    Extract {
        #[command(subcommand)]
        target: ExtractTarget,
    },
    /// Reduce, solve, extract and verify in one go.
    Pipeline {
        #[arg(long, value_enum)]
        route: RouteArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Pipelines over a grid of parameters, one CSV row each.
    Sweep {
        #[arg(long, value_enum, default_value = "allk")]
        family: KindArg,
        /// Values of n, e.g. `4..6` or `4,5,6`.
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "2")]
        k: String,
        #[arg(long, default_value = "2")]
        p: String,
        /// Comma-separated routes.
        #[arg(long, default_value = "condiv,tucker")]
        routes: String,
        #[arg(long, default_value = "0..4")]
        seeds: String,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Condiv pipelines with randomly corrupted oracles.
    Fuzz {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        runs: usize,
    },
}

#[derive(Subcommand)]
enum ReduceTarget {
    Condiv(RunArgs),
    Tucker {
        #[command(flatten)]
        run: RunArgs,
        /// Emit a random equivariant table instance instead.
        #[arg(long)]
        random: bool,
        /// Table length (with --random).
        #[arg(long)]
        length: Option<usize>,
        /// Label range (with --random).
        #[arg(long)]
        s: Option<usize>,
    },
}

#[derive(Subcommand)]
enum SolveTarget {
    Condiv {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        denominator: Option<usize>,
        #[arg(long)]
        doublings: Option<u32>,
    },
    Tucker {
        /// Instance file written by `reduce tucker`.
        #[arg(long, conflicts_with = "table")]
        instance: Option<PathBuf>,
        /// Table instance JSON.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExtractTarget {
    Condiv {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    Tucker {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Allk,
    Stable,
    AlmostStable,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Condiv,
    Tucker,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Condiv => Route::Condiv,
            RouteArg::Tucker => Route::Tucker,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    General,
    AlmostStable,
    StabToAstab,
}

impl From<ConstructionArg> for TuckerConstruction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::General => TuckerConstruction::General,
            ConstructionArg::AlmostStable => TuckerConstruction::AlmostStable,
            ConstructionArg::StabToAstab => TuckerConstruction::StabToAstab,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ColoringArg {
    /// Random colours from --coloring-seed.
    Seeded,
    /// The block colouring with colours --m.. merged into colour --m.
    Merged,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<KindArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Members of an explicit family, e.g. `1,2;3,4`.
    #[arg(long)]
    members: Option<String>,
    /// Family JSON instead of the flags above.
    #[arg(long)]
    family_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Number of colours; defaults to the route's budget.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value = "seeded")]
    coloring: ColoringArg,
    /// Defaults to --seed.
    #[arg(long)]
    coloring_seed: Option<u64>,
    /// Colouring spec JSON instead of the flags above.
    #[arg(long)]
    coloring_file: Option<PathBuf>,
    /// Fault spec JSON.
    #[arg(long)]
    fault_file: Option<PathBuf>,
    /// Random oracle flips drawn from --seed.
    #[arg(long, default_value_t = 0)]
    random_flips: usize,
    /// Rational ε such as `1` or `1/2`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long, value_enum)]
    construction: Option<ConstructionArg>,
    #[arg(long)]
    denominator: Option<usize>,
    #[arg(long)]
    doublings: Option<u32>,
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Exhausted(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &std::path::Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable value")
}

fn parse_list(text: &str) -> CliResult<Vec<u64>> {
    let bad = || Failure::from(Error::Parse(format!("bad list {text:?}")));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b
                .trim_start_matches('=')
                .trim()
                .parse()
                .map_err(|_| bad())?;
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn parse_usizes(text: &str) -> CliResult<Vec<usize>> {
    Ok(parse_list(text)?.into_iter().map(|x| x as usize).collect())
}

impl FamilyArgs {
    fn build(&self) -> CliResult<Family> {
        if let Some(path) = &self.family_file {
            return parse_json(path);
        }
        let kind = self.family.ok_or_else(|| {
            Failure::from(Error::Parse("--family or --family-file is required".into()))
        })?;
        let n = self
            .n
            .ok_or_else(|| Failure::from(Error::Parse("--n is required".into())))?;
        let k = || {
            self.k
                .ok_or_else(|| Failure::from(Error::Parse("--k is required".into())))
        };
        Ok(match kind {
            KindArg::Allk => Family::all_k(n, k()?)?,
            KindArg::Stable => Family::stable(n, k()?)?,
            KindArg::AlmostStable => Family::almost_stable(n, k()?)?,
            KindArg::Explicit => {
                let text = self.members.as_deref().unwrap_or("");
                let members = text
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|set| Subset::from_elements(n, parse_usizes(set)?).map_err(Failure::from))
                    .collect::<CliResult<Vec<_>>>()?;
                Family::explicit(n, members)?
            }
        })
    }
}

impl RunArgs {
    fn params(&self, route: Route, seed: u64, cap: &SizeCap) -> CliResult<PipelineParams> {
        let family = self.family.build()?;
        let construction = self.construction.map(TuckerConstruction::from);
        let coloring = match &self.coloring_file {
            Some(path) => parse_json(path)?,
            None => {
                let m = match self.m {
                    Some(m) => m,
                    None => color_budget(&family, self.p, route, construction, cap)?,
                };
                match self.coloring {
                    ColoringArg::Seeded => ColoringSpec::Seeded {
                        m,
                        seed: self.coloring_seed.unwrap_or(seed),
                    },
                    ColoringArg::Merged => {
                        let k = family.k().ok_or_else(|| {
                            Failure::from(Error::Parse("merged colouring needs --k".into()))
                        })?;
                        let top = chromatic_formula(family.n(), k, self.p);
                        ColoringSpec::MergedUpperBound {
                            r: self.p,
                            merge: vec![(m..=top).collect()],
                        }
                    }
                }
            }
        };
        let mut fault: FaultSpec = match &self.fault_file {
            Some(path) => parse_json(path)?,
            None => FaultSpec::default(),
        };
        fault.random_flips += self.random_flips;
        let grid = match (self.denominator, self.doublings) {
            (None, None) => None,
            (d, k) => Some(GridConfig {
                initial_denominator: d.unwrap_or(4 * family.n()),
                max_doublings: k.unwrap_or(3),
            }),
        };
        Ok(PipelineParams {
            route,
            family,
            p: self.p,
            coloring,
            fault,
            epsilon: self.epsilon.clone(),
            construction,
            grid,
        })
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let cap = SizeCap {
        max_ground: cli.size_cap,
        ..SizeCap::default()
    };
    let json_out = cli.report == Some(ReportFormat::Json);
    match &cli.command {
        Command::Chromatic { family, r } => {
            let family = family.build()?;
            let search = chromatic_search(&family, *r, &cap)?;
            let formula = family.k().map(|k| chromatic_formula(family.n(), k, *r));
            let formula_text = formula.map_or("-".to_string(), |f| f.to_string());
            Ok(Output::ok(match cli.report {
                Some(ReportFormat::Json) => to_json(&json!({
                    "family": family,
                    "r": r,
                    "exact": search.chromatic_number,
                    "formula": formula,
                    "nodes": search.nodes,
                })),
                Some(ReportFormat::Csv) => format!(
                    "family,n,k,r,exact,formula\n{},{},{},{r},{},{}\n",
                    family.kind_name(),
                    family.n(),
                    family.k().map_or(String::new(), |k| k.to_string()),
                    search.chromatic_number,
                    formula.map_or(String::new(), |f| f.to_string())
                ),
                None => format!("exact={} formula={formula_text}", search.chromatic_number),
            }))
        }
        Command::Defect {
            family,
            r,
            bruteforce,
        } => {
            let family = family.build()?;
            let defect = if *bruteforce {
                family.colorability_defect(*r, DefectMode::Bruteforce, &cap)?
            } else {
                family.defect(*r, &cap)?
            };
            Ok(Output::ok(if json_out {
                to_json(&json!({ "family": family, "r": r, "defect": defect }))
            } else {
                format!("defect={defect}")
            }))
        }
        Command::Upperbound { n, k, r } => {
            let coloring = upper_bound_coloring(*n, *k, *r)?;
            let family = Family::all_k(*n, *k)?;
            let mono = monochromatic_hyperedges(&family, *r, &coloring, &cap)?;
            let used = coloring.colors_in_use(&family, &cap)?.len();
            let bound = chromatic_formula(*n, *k, *r);
            Ok(Output::ok(if json_out {
                let table = ColoringSpec::table_of(&coloring, &family, &cap)?;
                to_json(&json!({
                    "n": n, "k": k, "r": r,
                    "colors": coloring.m(),
                    "colors_used": used,
                    "bound": bound,
                    "monochromatic": mono.len(),
                    "coloring": table,
                }))
            } else {
                format!(
                    "colors={} used={used} bound={bound} monochromatic={}",
                    coloring.m(),
                    mono.len()
                )
            }))
        }
        Command::Reduce { target } => reduce(cli, target, &cap),
        Command::Solve { target } => solve(target, &cap),
        Command::Extract { target } => extract(target, &cap),
        Command::Pipeline { route, run: args } => {
            let params = args.params((*route).into(), cli.seed, &cap)?;
            let report = run_pipeline(&params, cli.seed, &cap);
            let code = match &report.outcome {
                Outcome::Hyperedge { .. } | Outcome::Violation { .. } => 0,
                Outcome::Rejected { .. } => 2,
                Outcome::Failure { .. } => 3,
            };
            let text = match cli.report {
                Some(ReportFormat::Csv) => rows_to_csv(&[report.summary_row()])?,
                _ => to_json(&report),
            };
            Ok(Output { text, code })
        }
        Command::Sweep {
            family,
            n,
            k,
            p,
            routes,
            seeds,
            epsilon,
        } => {
            let family = match family {
                KindArg::Allk => FamilyKind::Allk,
                KindArg::Stable => FamilyKind::Stable,
                KindArg::AlmostStable => FamilyKind::AlmostStable,
                KindArg::Explicit => {
                    return Err(Error::Parse("sweeps range over parametric families".into()).into())
                }
            };
            let routes = routes
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|r| match r {
                    "condiv" => Ok(Route::Condiv),
                    "tucker" => Ok(Route::Tucker),
                    other => Err(Failure::from(Error::Parse(format!(
                        "unknown route {other:?}"
                    )))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            let spec = SweepSpec {
                family,
                n: parse_usizes(n)?,
                k: parse_usizes(k)?,
                p: parse_usizes(p)?,
                routes,
                seeds: parse_list(seeds)?,
                epsilon: epsilon.clone(),
            };
            let rows = sweep(&spec, &cap);
            Ok(Output::ok(if json_out {
                to_json(&rows)
            } else {
                rows_to_csv(&rows)?
            }))
        }
        Command::Fuzz { family, p, runs } => {
            let family = family.build()?;
            let (summary, reports) = fuzz(&family, *p, *runs, cli.seed, &cap)?;
            let code = if summary.all_resolved() { 0 } else { 3 };
            let text = match cli.report {
                Some(ReportFormat::Json) => {
                    to_json(&json!({ "summary": summary, "reports": reports }))
                }
                Some(ReportFormat::Csv) => {
                    rows_to_csv(&reports.iter().map(|r| r.summary_row()).collect::<Vec<_>>())?
                }
                None => format!(
                    "runs={} hyperedges={} violations={} checked={} failures={} rejected={}",
                    summary.runs,
                    summary.hyperedges,
                    summary.violations,
                    summary.checked_violations,
                    summary.failures,
                    summary.rejected
                ),
            };
            Ok(Output { text, code })
        }
    }
}

fn reduce(cli: &Cli, target: &ReduceTarget, cap: &SizeCap) -> CliResult<Output> {
    match target {
        ReduceTarget::Condiv(args) => {
            let params = args.params(Route::Condiv, cli.seed, cap)?;
            reduce_condiv(&params, cli.seed, cap)?;
            Ok(Output::ok(to_json(&InstanceFile {
                seed: cli.seed,
                params,
            })))
        }
        ReduceTarget::Tucker {
            run: args,
            random,
            length,
            s,
        } => {
            if *random {
                let n = length.or(args.family.n).ok_or_else(|| {
                    Failure::from(Error::Parse("--length is required with --random".into()))
                })?;
                let s = s.unwrap_or(((n.max(2) - 1) / (args.p - 1)).max(1));
                let inst = random_equivariant_instance(n, args.p, s, cli.seed)?;
                return Ok(Output::ok(table_instance_to_json(&inst)?));
            }
            let params = args.params(Route::Tucker, cli.seed, cap)?;
            reduce_tucker(&params, cap)?;
            Ok(Output::ok(to_json(&InstanceFile {
                seed: cli.seed,
                params,
            })))
        }
    }
}

fn solve(target: &SolveTarget, cap: &SizeCap) -> CliResult<Output> {
    match target {
        SolveTarget::Condiv {
            instance,
            denominator,
            doublings,
        } => {
            let file: InstanceFile = parse_json(instance)?;
            let (_, cinst) = reduce_condiv(&file.params, file.seed, cap)?;
            let mut grid = file
                .params
                .grid
                .unwrap_or_else(|| GridConfig::for_instance(&cinst));
            if let Some(d) = denominator {
                grid.initial_denominator = *d;
            }
            if let Some(k) = doublings {
                grid.max_doublings = *k;
            }
            Ok(Output::ok(to_json(&solve_condiv(&cinst, grid, cap)?)))
        }
        SolveTarget::Tucker { instance, table } => {
            let inst = match (instance, table) {
                (Some(path), _) => {
                    let file: InstanceFile = parse_json(path)?;
                    reduce_tucker(&file.params, cap)?.reduction.instance
                }
                (None, Some(path)) => table_instance_from_json(&read(path)?)?,
                (None, None) => {
                    return Err(Error::Parse("--instance or --table is required".into()).into())
                }
            };
            let sol = chain_solve(&inst)?;
            Ok(Output::ok(to_json(&ChainFile::new(
                &sol.chain, inst.p, sol.nodes,
            ))))
        }
    }
}

fn extract(target: &ExtractTarget, cap: &SizeCap) -> CliResult<Output> {
    match target {
        ExtractTarget::Condiv { instance, solution } => {
            let file: InstanceFile = parse_json(instance)?;
            let solved: CondivSolved = parse_json(solution)?;
            let extraction = extract_condiv(&file.params, file.seed, &solved.solution, cap)?;
            Ok(Output::ok(to_json(&extraction)))
        }
        ExtractTarget::Tucker { instance, solution } => {
            let file: InstanceFile = parse_json(instance)?;
            let chain: ChainFile = parse_json(solution)?;
            let plan = reduce_tucker(&file.params, cap)?;
            let edge = plan.extract(&chain.chain()?)?;
            let verdict = plan.verify(&edge);
            Ok(Output::ok(to_json(
                &json!({ "kind": "hyperedge", "edge": edge, "verdict": verdict }),
            )))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let mut text = output.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        let f = io_error(path, e);
                        eprintln!("error: {}", f.message);
                        return ExitCode::from(f.code);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(output.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
