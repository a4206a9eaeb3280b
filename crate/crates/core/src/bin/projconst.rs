use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use projconst::cli::{parse_budget, run, Command, GlobalOptions};

/// Exact projection constants, zero-sum amplification and the
/// Banach–Mazur model checks.
#[derive(Parser)]
#[command(name = "projconst", version)]
struct Args {
    /// Print the canonical JSON run report.
    #[arg(long, global = true)]
    json: bool,
    /// LP size budget as AMBIENT or AMBIENT,DIM.
    #[arg(long, global = true, default_value = "12,6")]
    budget: String,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact projection constant of a subspace read from a JSON document.
    Minproj {
        input: PathBuf,
        /// Cross-check with the floating-point oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Verify the multiplication law for the zero-sum space of N copies.
    Zerosum {
        input: PathBuf,
        #[arg(long = "copies")]
        copies: usize,
    },
    /// Amplification parameters for a target constant.
    Plan {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Use N copies instead of the minimal admissible count.
        #[arg(long)]
        copies: Option<usize>,
        /// Number of rounds for an ad-hoc plan.
        #[arg(long, requires = "copies")]
        rounds: Option<u32>,
        /// Base subspace for an exact demonstration of the schedule.
        #[arg(long)]
        demo: Option<PathBuf>,
        #[arg(long, requires = "demo")]
        steps: Option<u32>,
    },
    /// Banach–Mazur bound: optimizer, parameter sets and model checks.
    #[command(group(ArgGroup::new("mode").required(true).args(["optimize", "params", "model"])))]
    Bm {
        #[arg(long)]
        optimize: bool,
        #[arg(long, value_name = "A", allow_hyphen_values = true)]
        params: Option<String>,
        #[arg(long, value_name = "A", allow_hyphen_values = true)]
        model: Option<String>,
        #[arg(long, default_value_t = 4096)]
        window: usize,
        #[arg(long, default_value_t = 256)]
        basis: usize,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Corrupt the centring norm to exercise failure reporting.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let budget = match parse_budget(&args.budget) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = GlobalOptions {
        budget,
        seed: args.seed,
        timing: args.timing,
    };
    let command = match args.command {
        Sub::Minproj { input, oracle, tol } => Command::Minproj { input, oracle, tol },
        Sub::Zerosum { input, copies } => Command::Zerosum { input, copies },
        Sub::Plan {
            lambda,
            copies,
            rounds,
            demo,
            steps,
        } => Command::Plan {
            lambda,
            copies,
            rounds,
            demo,
            steps,
        },
        Sub::Bm { optimize: true, .. } => Command::BmOptimize,
        Sub::Bm {
            params: Some(a), ..
        } => Command::BmParams { a },
        Sub::Bm {
            model: Some(a),
            window,
            basis,
            ..
        } => Command::BmModel { a, window, basis },
        Sub::Bm { .. } => unreachable!("clap enforces one mode"),
        Sub::Selftest { inject_fault } => Command::Selftest { inject_fault },
    };
    let outcome = run(&command, &opts);
    println!("{}", outcome.render(args.json));
    ExitCode::from(outcome.exit_code as u8)
}
