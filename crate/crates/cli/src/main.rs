use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Outcome;

/// Finite quotients, series and Lie algebras of self-similar tree groups.
#[derive(Parser, Debug)]
#[command(name = "branchlie", version)]
struct Cli {
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,

    /// Element budget for explicit enumerations.
    #[arg(long, global = true, env = "BRANCHLIE_BUDGET", default_value_t = branchlie::quotients::DEFAULT_BUDGET)]
    budget: usize,

    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank table of the lower central or dimension series.
    Series(SeriesArgs),
    /// Cayley graph of the graded Lie algebra.
    Cayley(CayleyArgs),
    /// Ball sizes of the group or of a level quotient.
    Growth(GrowthArgs),
    /// Coranks and uniseriality of the modules V_n.
    Vn(VnArgs),
    /// Golod–Shafarevich bound series and rational witness.
    Gs(GsArgs),
    /// Jennings product of a rank sequence.
    Jennings(JenningsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lcs,
    Dim,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
    Dot,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct SeriesArgs {
    #[command(subcommand)]
    tool: Option<SeriesTool>,

    /// Built-in group name or path to an automaton family (JSON).
    #[arg(long)]
    pub group: Option<String>,

    #[arg(long, value_enum, default_value = "lcs")]
    pub kind: Kind,

    #[arg(long, default_value_t = 5)]
    pub level: usize,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
enum SeriesTool {
    Jennings(JenningsArgs),
    Gs(GsArgs),
}

#[derive(Args, Debug)]
pub struct CayleyArgs {
    #[arg(long)]
    pub group: String,

    #[arg(long, value_enum, default_value = "lcs")]
    pub series: Kind,

    #[arg(long, default_value_t = 6)]
    pub degrees: usize,

    /// Tree level; by default the smallest level from 3 to 8 whose
    /// series is faithful in all requested degrees.
    #[arg(long)]
    pub level: Option<usize>,

    #[arg(long, value_enum, default_value = "dot")]
    pub format: Format,

    /// Compare with the built-in diagrams; exit 1 if a drawn edge fails.
    #[arg(long)]
    pub check_labels: bool,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long)]
    pub group: String,

    #[arg(long, default_value_t = 5)]
    pub radius: usize,

    /// Count in the level-n quotient instead of the group.
    #[arg(long)]
    pub level: Option<usize>,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VnArgs {
    #[arg(long)]
    pub group: String,

    #[arg(long, default_value_t = 4)]
    pub level: usize,

    /// Coranks dim V_n^r / [G, V_n^r] for every r.
    #[arg(long, conflicts_with = "check_dec1")]
    pub profile: bool,

    /// [G, V_n^r] = V_n^{r+1} for all n ≤ level and r.
    #[arg(long)]
    pub check_dec1: bool,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct GsArgs {
    /// Number of generators.
    #[arg(long)]
    pub d: u64,

    /// Relator counts r_1, r_2, …, e.g. `0^7,1*`.
    #[arg(long, default_value = "")]
    pub relators_profile: String,

    /// Evaluation point of 1 − dξ + H_R(ξ), e.g. `3/4`.
    #[arg(long)]
    pub xi: Option<String>,

    #[arg(long, default_value_t = 64)]
    pub degree: usize,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct JenningsArgs {
    /// Ranks b_1, b_2, … separated by commas.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<u64>,

    /// Characteristic; 0 for the rational case.
    #[arg(long, default_value_t = 2)]
    pub p: u8,

    #[arg(long, default_value_t = 20)]
    pub degree: usize,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("thread pool configured once");
    }
    let json = cli.json;
    let pick = |f: Format| if json { Format::Json } else { f };
    let result = match cli.command {
        Command::Series(a) => match a.tool {
            Some(SeriesTool::Jennings(j)) => commands::jennings(&j, pick(j.format)),
            Some(SeriesTool::Gs(g)) => commands::gs(&g, pick(g.format)),
            None => commands::series(&a, pick(a.format), cli.budget),
        },
        Command::Cayley(a) => commands::cayley(&a, pick(a.format)),
        Command::Growth(a) => commands::growth(&a, pick(a.format), cli.budget),
        Command::Vn(a) => commands::vn(&a, pick(a.format)),
        Command::Gs(a) => commands::gs(&a, pick(a.format)),
        Command::Jennings(a) => commands::jennings(&a, pick(a.format)),
    };
    match result {
        Ok(Outcome { text, problems }) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes());
            for p in &problems {
                eprintln!("invariant violated: {p}");
            }
            if problems.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
