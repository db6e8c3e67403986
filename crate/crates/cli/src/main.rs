//! `holant`: evaluate, transform, verify and generate Holant instances.
//!
//! Exit codes: 0 on success or a passing verification, 1 when verification
//! (or `selftest`) fails, 2 on malformed input or usage errors.

mod commands;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "holant", version, about = "Holant sums and holographic basis transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Gen,
    Rec,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Holant value of an instance.
    Eval {
        instance: PathBuf,
        /// Also evaluate the c-tensor pairing form and report the gap.
        #[arg(long)]
        cross_check: bool,
        /// Sum in this many contiguous chunks in parallel.
        #[arg(long, value_name = "N")]
        chunks: Option<usize>,
    },
    /// Print the transformed table of one generator (ĝ) or recognizer (ȟ).
    Transform {
        instance: PathBuf,
        /// Basis file, or `@standard` / `@cumulative`. Defaults to the
        /// instance's basis reference.
        #[arg(long)]
        basis: Option<String>,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Emit the table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check that the Holant value is unchanged by the basis transform.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        basis: Option<String>,
        /// Relative tolerance; defaults to max(1e-9, cond(T)^|E| * 1e-13).
        #[arg(long)]
        tol: Option<f64>,
        /// Write the machine-readable report here (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Negative control: corrupt one transformed table, e.g. `gen:0`.
        #[arg(long, value_name = "SIDE:INDEX")]
        inject_fault: Option<String>,
    },
    /// Write a seeded random instance, and optionally a random basis.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "K")]
        alphabet: usize,
        #[arg(long, value_name = "N")]
        edges: usize,
        #[arg(long, value_name = "P")]
        gen_parts: usize,
        #[arg(long, value_name = "R")]
        rec_parts: usize,
        /// Table entries are drawn uniformly from the disc of this radius.
        #[arg(long, default_value_t = 1.0)]
        magnitude: f64,
        /// Also draw a basis with condition number at most this.
        #[arg(long, value_name = "C")]
        basis_cond: Option<f64>,
        /// Where to write the basis; defaults to `<output stem>.basis.json`.
        #[arg(long)]
        basis_out: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the built-in worked examples and reduced property sweeps.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval { instance, cross_check, chunks } => commands::eval(&instance, cross_check, chunks),
        Command::Transform { instance, basis, side, index, json } => {
            commands::transform(&instance, basis.as_deref(), side, index, json)
        }
        Command::Verify { instance, basis, tol, json, inject_fault } => {
            commands::verify(&instance, basis.as_deref(), tol, json.as_deref(), inject_fault.as_deref())
        }
        Command::Gen { seed, alphabet, edges, gen_parts, rec_parts, magnitude, basis_cond, basis_out, output } => {
            let spec = holant_core::InstanceSpec {
                alphabet_size: alphabet,
                edge_count: edges,
                generator_parts: gen_parts,
                recognizer_parts: rec_parts,
                magnitude,
            };
            commands::gen(seed, spec, basis_cond, basis_out, &output)
        }
        Command::Selftest => Ok(selftest::run()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
