mod commands;
mod document;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exact computations for non-homogeneous quadratic algebras and their
/// curved Koszul duals.
#[derive(Parser, Debug)]
#[command(name = "nhk", version)]
pub struct Cli {
    /// Print the report as JSON (sorted keys, exact fractions).
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the three PBW conditions.
    Pbw {
        /// Presentation document; stdin when omitted or `-`.
        file: Option<String>,
        /// Degree used to certify Koszulness of the quadratic part.
        #[arg(long, default_value_t = nhk_core::nonhomogeneous::DEFAULT_PBW_KOSZUL_CUTOFF)]
        koszul_cutoff: usize,
    },
    /// Compute the curved dual `(A^!, d, c)`.
    Dualize {
        file: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Check exactness of the Koszul complex of the quadratic part.
    Koszul {
        file: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Free resolution of a module from the counit.
    Resolve {
        file: Option<String>,
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 3)]
        cutoff: usize,
    },
    /// Ext between two finite-dimensional modules.
    Ext {
        file: Option<String>,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Hochschild cohomology in a filtration window.
    Hochschild {
        file: Option<String>,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
    },
    /// Check the counit or the S-vs-F comparison on a module or complex.
    Verify {
        check: VerifyCheck,
        file: Option<String>,
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 3)]
        cutoff: usize,
    },
    /// Emit a presentation document for a gallery algebra.
    Gallery {
        /// weyl, enveloping, sra, hecke, preprojective, sym, list, or a named
        /// default instance.
        name: String,
        /// Accepted for explicitness; the document is always emitted.
        #[arg(long)]
        emit: bool,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        lie: Option<String>,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        quiver: Option<String>,
        /// Comma separated values, one per vertex.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyCheck {
    Counit,
    SVsF,
}

pub const BIT_CAP_VAR: &str = "NHK_MAX_BITS";

pub fn read_input(file: Option<&str>) -> Result<String, commands::Failure> {
    match file {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| commands::Failure::Invalid(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| commands::Failure::Invalid(format!("{path}: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(BIT_CAP_VAR) {
        match v.parse::<u64>() {
            Ok(bits) => nhk_core::exact_linalg::set_bit_cap(bits),
            Err(_) => {
                eprintln!("error: {BIT_CAP_VAR} must be a nonnegative integer");
                return ExitCode::from(2);
            }
        }
    }
    std::panic::set_hook(Box::new(|_| {}));
    let outcome = std::panic::catch_unwind(|| commands::run(&cli));
    let _ = std::panic::take_hook();
    match outcome {
        Ok(Ok(out)) => {
            print!("{}", out.text);
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Ok(Err(commands::Failure::Invalid(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".into());
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
