use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flexq::approx::{approx_promote, approx_restrict, approx_via_minmax};
use flexq::bench;
use flexq::extension::{compute_extendable, min_cost_extension, min_deviation_extension};
use flexq::format::{self, FormatError, Instance};
use flexq::generators::{self, GeneratorError, RandomParams};
use flexq::hr::gale_shapley;
use flexq::minmax::solve_minmax;
use flexq::minsum::{solve_minsum_exact, ExactOptions};
use flexq::oracle::{oracle_minmax, oracle_minsum};
use flexq::{check_envy_free, check_hr_stable, Budget, SmfqInstance, SolveError};

#[derive(Parser)]
#[command(
    name = "flexq",
    version,
    about = "Envy-free matchings with cost-controlled flexible quotas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve MINMAX or MINSUM and print the matching.
    Solve {
        #[command(subcommand)]
        problem: SolveProblem,
    },
    /// Report feasibility and costs of a matching file.
    Check {
        file: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
    /// Exhaustive search for the optimum.
    Oracle {
        objective: Objective,
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run Gale-Shapley on an hr file, then extend it in a second round.
    Extend {
        file: PathBuf,
        #[arg(long, value_enum)]
        objective: ExtendObjective,
        /// Round-2 costs as `<program> <cost>` lines; defaults to the file's costs.
        #[arg(long)]
        costs: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print a generated instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Run the solvers against the oracle on seeded random instances.
    Bench {
        #[arg(long, value_enum, default_value = "small")]
        suite: Suite,
        #[arg(long, default_value_t = 500)]
        seeds: u64,
    },
}

#[derive(Subcommand)]
enum SolveProblem {
    Minmax {
        file: PathBuf,
    },
    Minsum {
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Worker threads for the exact search.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(clap::Args)]
struct BudgetArgs {
    /// Enumeration limit; overrides FLEXQ_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
    /// Run past the budget.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Promote,
    Restrict,
    Minmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Minsum,
    Minmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtendObjective {
    Deviation,
    Cost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Small,
    Hr,
}

#[derive(Subcommand)]
enum GenFamily {
    Fig1 {
        /// Emit the round-1 HR instance instead of the SMFQ one.
        #[arg(long)]
        hr: bool,
    },
    Fig2 {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    Ex1 {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        alpha: i64,
    },
    Ex2 {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        alpha: i64,
    },
    Random {
        #[command(flatten)]
        params: RandomArgs,
    },
    Masterlist {
        #[command(flatten)]
        params: RandomArgs,
    },
    Setcover {
        file: PathBuf,
    },
    Vertexcover {
        file: PathBuf,
    },
}

#[derive(clap::Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 6)]
    agents: usize,
    #[arg(long, default_value_t = 4)]
    programs: usize,
    #[arg(long, default_value_t = 3)]
    list_len: usize,
    #[arg(long, default_value_t = 9)]
    cost_max: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<&RandomArgs> for RandomParams {
    fn from(r: &RandomArgs) -> Self {
        RandomParams {
            agents: r.agents,
            programs: r.programs,
            list_len: r.list_len,
            cost_max: r.cost_max,
            seed: r.seed,
        }
    }
}

enum Failure {
    Input(String),
    Budget(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            SolveError::InvariantViolated(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<GeneratorError> for Failure {
    fn from(e: GeneratorError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<flexq::ValidationError> for Failure {
    fn from(e: flexq::ValidationError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Ok(format::parse_instance(&read(path)?)?)
}

fn load_smfq(path: &Path) -> Result<SmfqInstance, Failure> {
    Ok(load(path)?.to_smfq()?)
}

fn budget(args: &BudgetArgs) -> Result<Budget, Failure> {
    let limit = match args.budget {
        Some(b) => b,
        None => match std::env::var("FLEXQ_BUDGET") {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::Input(format!(
                    "FLEXQ_BUDGET must be a non-negative integer, got `{v}`"
                ))
            })?,
            Err(_) => Budget::DEFAULT_LIMIT,
        },
    };
    Ok(Budget {
        limit,
        force: args.force,
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Solve { problem } => match problem {
            SolveProblem::Minmax { file } => {
                let inst = load_smfq(&file)?;
                let r = solve_minmax(&inst)?;
                Ok(format::write_report(inst.market(), &r))
            }
            SolveProblem::Minsum {
                method,
                file,
                budget: b,
                jobs,
            } => {
                let inst = load_smfq(&file)?;
                let r = match method {
                    Method::Exact => solve_minsum_exact(
                        &inst,
                        ExactOptions {
                            budget: budget(&b)?,
                            jobs,
                        },
                    )?,
                    Method::Promote => approx_promote(&inst)?,
                    Method::Restrict => approx_restrict(&inst)?,
                    Method::Minmax => approx_via_minmax(&inst)?,
                };
                Ok(format::write_report(inst.market(), &r))
            }
        },
        Command::Check { file, matching } => {
            let inst = load(&file)?;
            let market = inst.market();
            let m = format::parse_matching(&read(&matching)?, market)?;
            let envy = check_envy_free(market, &m);
            let mut out = format!(
                "a_perfect={}\nenvy_free={}\ntotal_cost={}\nmax_cost={}\n",
                m.is_a_perfect(),
                envy.is_stable(),
                flexq::total_cost(inst.costs(), &m),
                flexq::max_cost(inst.costs(), &m),
            );
            let mut blocking = envy.blocking_pairs;
            if let Instance::Hr(hr) = &inst {
                let hr_check =
                    check_hr_stable(hr, &m).map_err(|e| Failure::Input(e.to_string()))?;
                out.push_str(&format!("hr_stable={}\n", hr_check.is_stable()));
                blocking = hr_check.blocking_pairs;
            }
            for (a, p) in blocking {
                out.push_str(&format!(
                    "blocking {} {}\n",
                    market.agent_name(a),
                    market.program_name(p)
                ));
            }
            Ok(out)
        }
        Command::Oracle {
            objective,
            file,
            budget: b,
        } => {
            let inst = load_smfq(&file)?;
            let b = budget(&b)?;
            let r = match objective {
                Objective::Minsum => oracle_minsum(&inst, b)?,
                Objective::Minmax => oracle_minmax(&inst, b)?,
            };
            Ok(format::write_report(inst.market(), &r))
        }
        Command::Extend {
            file,
            objective,
            costs,
            budget: b,
        } => {
            let Instance::Hr(hr) = load(&file)? else {
                return Err(Failure::Input(format!(
                    "{}: extend needs an hr file",
                    file.display()
                )));
            };
            let market = hr.market();
            let m1 = gale_shapley(&hr);
            let ctx = compute_extendable(&hr, &m1)?;
            let (ext, objective, method) = match objective {
                ExtendObjective::Deviation => {
                    let ext = min_deviation_extension(&ctx)?;
                    let d = ext.d_star;
                    (ext, d, "deviation")
                }
                ExtendObjective::Cost => {
                    let round2 = match &costs {
                        Some(path) => format::parse_costs(&read(path)?, market)?,
                        None => hr.costs().to_vec(),
                    };
                    let opts = ExactOptions {
                        budget: budget(&b)?,
                        jobs: None,
                    };
                    let (ext, cost) = min_cost_extension(&ctx, &round2, opts)?;
                    (ext, cost, "cost")
                }
            };
            let unmatched: Vec<&str> = ctx
                .unmatched()
                .iter()
                .map(|&a| market.agent_name(a))
                .collect();
            let unextendable: Vec<&str> = ctx
                .unextendable()
                .into_iter()
                .map(|a| market.agent_name(a))
                .collect();
            Ok(format::write_matching(
                market,
                &ext.m2,
                &[
                    ("round1_unmatched", unmatched.join(",")),
                    ("unextendable", unextendable.join(",")),
                    ("objective", objective.to_string()),
                    ("method", method.to_owned()),
                    ("certified", "true".to_owned()),
                ],
            ))
        }
        Command::Gen { family } => {
            let inst = match family {
                GenFamily::Fig1 { hr } => {
                    let (g, h) = generators::fig1();
                    if hr {
                        Instance::Hr(g)
                    } else {
                        Instance::Smfq(h)
                    }
                }
                GenFamily::Fig2 { n } => Instance::Smfq(generators::fig2(n)?),
                GenFamily::Ex1 { n, alpha } => Instance::Smfq(generators::example1(n, alpha)?),
                GenFamily::Ex2 { n, alpha } => Instance::Smfq(generators::example2(n, alpha)?),
                GenFamily::Random { params } => {
                    Instance::Smfq(generators::random(&(&params).into())?)
                }
                GenFamily::Masterlist { params } => {
                    Instance::Smfq(generators::master_list(&(&params).into())?)
                }
                GenFamily::Setcover { file } => {
                    let sc = format::parse_set_cover(&read(&file)?)?;
                    Instance::Smfq(generators::reduce_set_cover(&sc))
                }
                GenFamily::Vertexcover { file } => {
                    let g = format::parse_graph(&read(&file)?)?;
                    Instance::Smfq(generators::reduce_vertex_cover(&g))
                }
            };
            Ok(format::serialize_instance(&inst))
        }
        Command::Bench { suite, seeds } => match suite {
            Suite::Small => Ok(bench::small_table(&bench::run_small(seeds)?)),
            Suite::Hr => Ok(bench::hr_table(&bench::run_hr(seeds)?)),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
