//! `shuffle-stab`: run verification suites and compute stabilizers.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use shuffle_stab::stabilizers::{stab_m_lie, stab_w_lie, verify_main_equality, GradedSubspace};
use shuffle_stab::suites::{self, Format, Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "shuffle-stab",
    version,
    about = "Exact checks for the harmonic coproduct stabilizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print its report.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Highest degree to check (defaults depend on the suite).
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Largest `n` at which sequences are compared.
        #[arg(long, default_value_t = 6)]
        n_window: usize,
        /// Random inputs per randomized check.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Print a basis of a stabilizer in one degree as JSON.
    Stab {
        #[arg(long, value_enum)]
        coproduct: CoproductArg,
        #[arg(long)]
        degree: usize,
    },
    /// Print stabilizer dimensions per degree as CSV.
    Dims {
        #[arg(long)]
        max_degree: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Bracket,
    Theta,
    Coproducts,
    Derivations,
    Decomposition,
    Kerh,
    Square,
    Stab,
    Main,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Bracket => Suite::Bracket,
            SuiteArg::Theta => Suite::Theta,
            SuiteArg::Coproducts => Suite::Coproducts,
            SuiteArg::Derivations => Suite::Derivations,
            SuiteArg::Decomposition => Suite::Decomposition,
            SuiteArg::Kerh => Suite::Kerh,
            SuiteArg::Square => Suite::Square,
            SuiteArg::Stab => Suite::Stab,
            SuiteArg::Main => Suite::Main,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CoproductArg {
    #[value(name = "W", alias = "w")]
    W,
    #[value(name = "M", alias = "m")]
    M,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn subspace_json(name: &str, s: &GradedSubspace) -> serde_json::Value {
    json!({
        "coproduct": name,
        "degree": s.degree,
        "ambient": s.ambient,
        "ambient_dim": s.ambient_dim(),
        "dim": s.dim(),
        "basis": s.coordinates_json(),
        "elements": s.elements().iter().map(|x| x.to_json()).collect::<Vec<_>>(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            suite,
            max_degree,
            seed,
            format,
            n_window,
            samples,
        } => {
            let suite = Suite::from(suite);
            let config = SuiteConfig {
                suite,
                max_degree: max_degree.unwrap_or(suite.default_max_degree()),
                n_window,
                seed,
                samples,
                format: format.into(),
            };
            let report = match suites::run(&config) {
                Ok(r) => r,
                Err(e) => return usage_error(e),
            };
            print!("{}", report.render(config.format));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Stab { coproduct, degree } => {
            let (name, result) = match coproduct {
                CoproductArg::W => ("W", stab_w_lie(degree)),
                CoproductArg::M => ("M", stab_m_lie(degree)),
            };
            match result {
                Ok(s) => {
                    let js = subspace_json(name, &s);
                    println!("{}", serde_json::to_string_pretty(&js).expect("json"));
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Dims { max_degree } => {
            if max_degree < 1 {
                return usage_error("--max-degree must be at least 1");
            }
            let reports: Vec<_> = (1..=max_degree).map(verify_main_equality).collect();
            println!("degree,dim_lie,dim_stab_w,dim_stab_m,equal");
            let mut all_equal = true;
            for r in reports {
                let r = match r {
                    Ok(r) => r,
                    Err(e) => return usage_error(e),
                };
                all_equal &= r.equal;
                println!(
                    "{},{},{},{},{}",
                    r.degree, r.dim_lie, r.dim_stab_w, r.dim_stab_m, r.equal
                );
            }
            if all_equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
