//! Command-line surface for `hgp-core`.
//!
//! Commands that build objects (`gen`, `amplify`, `fglss`, ...) write the
//! object's JSON. Commands that compute something write a report that also
//! records the seed, the caps and the crate versions.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use hgp_core::csp::CspInstance;
use hgp_core::disperser::{self, LogBase, OrderMode};
use hgp_core::fglss::{self, Exclusivity};
use hgp_core::graphs::{self, BipartiteGraph, Graph, VertexOrder};
use hgp_core::matching;
use hgp_core::pricing::{self, BuyingRule, PricingInstance};
use hgp_core::rational::{self, Rational};
use hgp_core::reduction;
use hgp_core::seed::stage_seed;
use hgp_core::{Caps, Error};

pub mod pipeline;
pub mod suite;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hgp",
    version,
    about = "Pricing, induced matching and reduction toolkit"
)]
pub struct Cli {
    /// Global seed; each stage derives its own seed from it and the stage name.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output path, `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph generators and exact graph oracles
    #[command(subcommand)]
    Graph(GraphCmd),
    /// CSP generation, amplification and the FGLSS construction
    #[command(subcommand)]
    Csp(CspCmd),
    /// Random dispersers and their brute-force checks
    #[command(subcommand)]
    Disperser(DisperserCmd),
    /// Induced matching and pricing solvers
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Induced matching to pricing
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// CSP through to pricing in one run
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Seeded invariant suite
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphKind {
    General,
    Bipartite,
}

#[derive(Debug, Args)]
pub struct Input {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    /// Random graph.
    Gen {
        #[arg(long, value_enum, default_value = "bipartite")]
        kind: GraphKind,
        /// Vertex count (general) or left side size (bipartite).
        #[arg(long)]
        n: usize,
        /// Right side size (bipartite); defaults to `n`.
        #[arg(long)]
        right: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Degree bound (bipartite only).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Independence number of a general graph.
    Mis(Input),
    /// Brute-force induced matching number.
    Im {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "bipartite")]
        kind: GraphKind,
    },
    /// Semi-induced matching of a bipartite graph, for a given order or over all orders.
    Sim {
        #[command(flatten)]
        input: Input,
        /// JSON file with {"order": [...]}; omitted means all orders.
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Bipartite double cover of a general graph.
    DoubleCover {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        same_vertex_edges: bool,
    },
    /// Balanced bipartite independence number.
    Bbis(Input),
}

#[derive(Debug, Subcommand)]
pub enum CspCmd {
    /// Random CSP.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        /// Complement-closed satisfying sets, so every variable is balanced.
        #[arg(long)]
        balanced: bool,
    },
    /// AND of `t` sampled clauses, `m-out` times.
    Amplify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        m_out: Option<usize>,
    },
    Duplicate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        copies: usize,
    },
    /// FGLSS graph with vertex labels.
    Fglss(Input),
    /// FGLSS graph with each variable's conflict biclique replaced by a verified disperser.
    Replace {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        gamma: String,
        /// Disperser degree; defaults to the suggested degree for `gamma`.
        #[arg(long)]
        d: Option<usize>,
        /// Drop the same-clause cliques and keep disperser edges only.
        #[arg(long)]
        dispersers_only: bool,
    },
    Maxsat(Input),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogChoice {
    E,
    Two,
}

#[derive(Debug, Subcommand)]
pub enum DisperserCmd {
    /// Union of `d` random perfect matchings on `n + n` vertices.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        /// Used to suggest `d` when it is not given.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, value_enum, default_value = "e")]
        log: LogChoice,
    },
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        gamma: String,
    },
    CheckLemma {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        gamma: String,
        /// Sample this many orders instead of covering all of them.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MatchingAlgo {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PricingAlgo {
    Uniform,
    Geometric,
    Scheme,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Rule {
    Udp,
    Smp,
}

impl From<Rule> for BuyingRule {
    fn from(rule: Rule) -> Self {
        match rule {
            Rule::Udp => BuyingRule::Udp,
            Rule::Smp => BuyingRule::Smp,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    Matching {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "exact")]
        algo: MatchingAlgo,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Input is a general graph (approx only).
        #[arg(long)]
        general: bool,
    },
    Pricing {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "oracle")]
        algo: PricingAlgo,
        /// Overrides the rule stored in the instance.
        #[arg(long, value_enum)]
        rule: Option<Rule>,
        #[arg(long, default_value = "2")]
        alpha: String,
        #[arg(long, default_value = "1/2")]
        delta: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Bipartite graph to weighted pricing instance.
    MatchingToPricing {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "udp")]
        rule: Rule,
        /// Where to write the coloring, congested vertices and vertex maps.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PipelineCmd {
    /// CSP, amplification, FGLSS, disperser replacement, double cover, reduction, pricing.
    Run(pipeline::PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Quick,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Runs every invariant check; exits 0 iff all pass.
    All {
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Core(ref inner) if inner.is_refusal() => EXIT_REFUSED,
                _ => EXIT_FAILURE,
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads JSON from `path`, or from standard input when `path` is `-`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map(|_| text)
    } else {
        fs::read_to_string(path)
    }
    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("cannot parse {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(out: &str, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    if out == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
    } else {
        fs::write(out, text).map_err(|e| CliError::Io(format!("cannot write {out}: {e}")))
    }
}

/// Report envelope shared by every computing command.
pub fn envelope(command: &str, seed: u64, caps: &Caps, result: Value) -> Value {
    json!({
        "command": command,
        "seed": seed,
        "caps": caps,
        "versions": {
            "hgp-core": hgp_core::VERSION,
            "hgp-cli": env!("CARGO_PKG_VERSION"),
        },
        "result": result,
    })
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("values serialize")
}

fn parse_rational(text: &str) -> CliResult<Rational> {
    Ok(rational::parse(text)?)
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let caps = Caps::from_env()?;
    let seed = cli.seed;
    let report = |command: &str, result: Value| -> CliResult<i32> {
        write_json(&cli.out, &envelope(command, seed, &caps, result))?;
        Ok(0)
    };
    match &cli.command {
        Command::Graph(cmd) => match cmd {
            GraphCmd::Gen {
                kind,
                n,
                right,
                p,
                max_degree,
            } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::input("p must be in [0, 1]").into());
                }
                let s = stage_seed(seed, "graph gen");
                match kind {
                    GraphKind::General => write_json(&cli.out, &Graph::random(*n, *p, s))?,
                    GraphKind::Bipartite => {
                        let right = right.unwrap_or(*n);
                        let g = match max_degree {
                            Some(d) => BipartiteGraph::random_bounded(*n, right, *d, *p, s),
                            None => BipartiteGraph::random(*n, right, *p, s),
                        };
                        write_json(&cli.out, &g)?
                    }
                }
                Ok(0)
            }
            GraphCmd::Mis(input) => {
                let g: Graph = read_json(&input.input)?;
                let (size, witness) = graphs::max_independent_set_bruteforce(&g, &caps)?;
                report("graph mis", json!({"size": size, "witness": witness}))
            }
            GraphCmd::Im { input, kind } => {
                let (size, witness) = match kind {
                    GraphKind::General => {
                        let g: Graph = read_json(&input.input)?;
                        graphs::max_induced_matching_bruteforce(&g, &caps)?
                    }
                    GraphKind::Bipartite => {
                        let g: BipartiteGraph = read_json(&input.input)?;
                        graphs::max_induced_matching_bruteforce(&g, &caps)?
                    }
                };
                report("graph im", json!({"size": size, "witness": witness}))
            }
            GraphCmd::Sim { input, order } => {
                let g: BipartiteGraph = read_json(&input.input)?;
                let result = match order {
                    Some(path) => {
                        let order: VertexOrder = read_json(path)?;
                        let (size, witness) =
                            graphs::max_semi_induced_matching_fixed(&g, &order, &caps)?;
                        json!({"size": size, "witness": witness, "order": order})
                    }
                    None => {
                        let (size, witness, order) =
                            graphs::max_semi_induced_matching_any_order(&g, &caps)?;
                        json!({"size": size, "witness": witness, "order": order, "all_orders": true})
                    }
                };
                report("graph sim", result)
            }
            GraphCmd::DoubleCover {
                input,
                same_vertex_edges,
            } => {
                let g: Graph = read_json(&input.input)?;
                write_json(
                    &cli.out,
                    &graphs::bipartite_double_cover(&g, *same_vertex_edges),
                )?;
                Ok(0)
            }
            GraphCmd::Bbis(input) => {
                let g: BipartiteGraph = read_json(&input.input)?;
                let size = graphs::balanced_bipartite_independence_bruteforce(&g, &caps)?;
                report("graph bbis", json!({"size": size}))
            }
        },
        Command::Csp(cmd) => match cmd {
            CspCmd::Gen {
                vars,
                clauses,
                arity,
                balanced,
            } => {
                let s = stage_seed(seed, "csp gen");
                let csp = if *balanced {
                    CspInstance::random_balanced(*vars, *clauses, *arity, s)?
                } else {
                    CspInstance::random(*vars, *clauses, *arity, s)?
                };
                write_json(&cli.out, &csp)?;
                Ok(0)
            }
            CspCmd::Amplify { input, t, m_out } => {
                let csp: CspInstance = read_json(&input.input)?;
                let m_out = m_out.unwrap_or(csp.clauses().len());
                let out = csp.gap_amplify(*t, m_out, stage_seed(seed, "csp amplify"))?;
                write_json(&cli.out, &out)?;
                Ok(0)
            }
            CspCmd::Duplicate { input, copies } => {
                let csp: CspInstance = read_json(&input.input)?;
                write_json(&cli.out, &csp.duplicate_clauses(*copies)?)?;
                Ok(0)
            }
            CspCmd::Fglss(input) => {
                let csp: CspInstance = read_json(&input.input)?;
                let f = fglss::fglss_build(&csp, &caps)?;
                write_json(&cli.out, &labelled_graph(&f.graph, &csp, &f.labels))?;
                Ok(0)
            }
            CspCmd::Replace {
                input,
                gamma,
                d,
                dispersers_only,
            } => {
                let csp: CspInstance = read_json(&input.input)?;
                let gamma = parse_rational(gamma)?;
                let d = match d {
                    Some(d) => *d,
                    None => disperser::suggest_degree(&gamma, LogBase::Natural)?,
                };
                let f = fglss::fglss_build(&csp, &caps)?;
                let mut supplier = disperser::VerifiedRandomSupplier::new(
                    d,
                    gamma,
                    stage_seed(seed, "csp replace"),
                );
                supplier.caps = caps.clone();
                let exclusivity = if *dispersers_only {
                    Exclusivity::DispersersOnly
                } else {
                    Exclusivity::KeepClauseCliques
                };
                let r = fglss::disperser_replace(&f, &csp, &mut supplier, exclusivity)?;
                write_json(&cli.out, &labelled_graph(&r.graph, &csp, &f.labels))?;
                Ok(0)
            }
            CspCmd::Maxsat(input) => {
                let csp: CspInstance = read_json(&input.input)?;
                let (count, witness) = csp.max_sat_bruteforce(&caps)?;
                report(
                    "csp maxsat",
                    json!({"satisfied": count, "clauses": csp.clauses().len(), "witness": witness}),
                )
            }
        },
        Command::Disperser(cmd) => match cmd {
            DisperserCmd::Gen { n, d, gamma, log } => {
                let d = match (d, gamma) {
                    (Some(d), _) => *d,
                    (None, Some(gamma)) => {
                        let base = match log {
                            LogChoice::E => LogBase::Natural,
                            LogChoice::Two => LogBase::Two,
                        };
                        disperser::suggest_degree(&parse_rational(gamma)?, base)?.min(*n)
                    }
                    (None, None) => return Err(Error::input("give --d or --gamma").into()),
                };
                let g = disperser::random_disperser(*n, d, stage_seed(seed, "disperser gen"))?;
                write_json(&cli.out, &g.graph)?;
                Ok(0)
            }
            DisperserCmd::Verify { input, gamma } => {
                let g: BipartiteGraph = read_json(&input.input)?;
                let gamma = parse_rational(gamma)?;
                let v = disperser::verify_disperser(&g, &gamma, &caps)?;
                let result = match v {
                    disperser::Verification::Disperser => json!({
                        "disperser": true,
                        "threshold": disperser::threshold(g.left_count(), &gamma),
                    }),
                    disperser::Verification::Violation { x, y } => json!({
                        "disperser": false,
                        "threshold": disperser::threshold(g.left_count(), &gamma),
                        "x": x,
                        "y": y,
                    }),
                };
                report("disperser verify", result)
            }
            DisperserCmd::CheckLemma {
                input,
                gamma,
                samples,
            } => {
                let g: BipartiteGraph = read_json(&input.input)?;
                let gamma = parse_rational(gamma)?;
                let mode = match samples {
                    Some(count) => OrderMode::Sampled {
                        count: *count,
                        seed: stage_seed(seed, "disperser check-lemma"),
                    },
                    None => OrderMode::All,
                };
                let r = disperser::check_disperser_lemma(&g, &gamma, mode, &caps)?;
                let holds = r.holds();
                report("disperser check-lemma", to_value(&r))?;
                Ok(if holds { 0 } else { EXIT_FAILURE })
            }
        },
        Command::Solve(cmd) => match cmd {
            SolveCmd::Matching {
                input,
                algo,
                r,
                general,
            } => {
                let result = if *general {
                    let g: Graph = read_json(&input.input)?;
                    let s = matching::approx_induced_matching_general(&g, *r, &caps)?;
                    block_json(&s)
                } else {
                    let g: BipartiteGraph = read_json(&input.input)?;
                    match algo {
                        MatchingAlgo::Exact => {
                            let (size, m) = matching::exact_bipartite_induced_matching(&g, &caps)?;
                            json!({"size": size, "witness": m})
                        }
                        MatchingAlgo::Approx => {
                            let s = matching::approx_induced_matching_bipartite(&g, *r, &caps)?;
                            block_json(&s)
                        }
                    }
                };
                report("solve matching", result)
            }
            SolveCmd::Pricing {
                input,
                algo,
                rule,
                alpha,
                delta,
            } => {
                let mut inst: PricingInstance = read_json(&input.input)?;
                if let Some(rule) = rule {
                    inst = inst.with_rule((*rule).into());
                }
                let alpha = parse_rational(alpha)?;
                let delta = parse_rational(delta)?;
                let result = match algo {
                    PricingAlgo::Uniform => to_value(&pricing::uniform_price_approx(&inst)?),
                    PricingAlgo::Geometric => {
                        to_value(&pricing::geometric_enum_approx(&inst, &alpha, &caps)?)
                    }
                    PricingAlgo::Scheme => to_value(&pricing::approximation_scheme(
                        &inst, &delta, &alpha, &caps,
                    )?),
                    PricingAlgo::Oracle => to_value(&pricing::opt_bruteforce(&inst, &caps)?),
                };
                let mut result = result;
                result["rule"] = json!(inst.rule());
                report("solve pricing", result)
            }
        },
        Command::Reduce(ReduceCmd::MatchingToPricing {
            input,
            d,
            rule,
            provenance,
        }) => {
            let g: BipartiteGraph = read_json(&input.input)?;
            let out = reduction::reduce_full(&g, *d, stage_seed(seed, "reduce"), (*rule).into())?;
            write_json(&cli.out, &out.instance)?;
            if let Some(path) = provenance {
                let prov = envelope(
                    "reduce matching-to-pricing",
                    seed,
                    &caps,
                    json!({
                        "d": out.d,
                        "threshold": reduction::congestion_threshold(out.d)?,
                        "coloring": out.coloring.color,
                        "high": out.high,
                        "item_right_vertex": out.right_origin,
                        "group_of_left": out.group_of_left,
                        "filtered_graph": out.graph,
                    }),
                );
                write_json(&path.to_string_lossy(), &prov)?;
            }
            Ok(0)
        }
        Command::Pipeline(PipelineCmd::Run(args)) => {
            let result = pipeline::run(args, seed, &caps)?;
            report("pipeline run", result)
        }
        Command::Verify(VerifyCmd::All { scale }) => {
            let outcome = suite::run_all(*scale, seed, &caps);
            let passed = outcome.iter().all(|c| c.passed());
            let failed = outcome.iter().filter(|c| !c.passed()).count();
            report(
                "verify all",
                json!({
                    "scale": scale,
                    "passed": passed,
                    "failed": failed,
                    "checks": outcome,
                }),
            )?;
            Ok(if passed { 0 } else { EXIT_FAILURE })
        }
    }
}

fn block_json(s: &matching::BlockSolution) -> Value {
    json!({
        "size": s.size(),
        "witness": s.matching,
        "best_block": s.best_block,
        "block_sizes": s.block_sizes,
        "block_total": s.block_total(),
    })
}

/// Graph JSON plus `"labels": [[clause, "pattern"], ...]`.
fn labelled_graph(g: &Graph, csp: &CspInstance, labels: &[fglss::Label]) -> Value {
    let mut v = to_value(g);
    v["labels"] = labels
        .iter()
        .map(|&(j, p)| {
            json!([
                j,
                hgp_core::csp::format_pattern(p, csp.clauses()[j].arity())
            ])
        })
        .collect();
    v
}
