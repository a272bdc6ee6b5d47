mod commands;
mod dto;
mod error;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::workspace::Workspace;

#[derive(Parser, Debug)]
#[command(name = "kackit", version, about = "Finite-dimensional C*-algebra inclusions and weak Kac algebras")]
pub struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, env = "KACKIT_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized internals.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit structured JSON results.
    #[arg(long, global = true)]
    pub json: bool,
    /// Suppress human-readable output; the exit code carries the result.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// An input file; stdin when omitted or `-`.
#[derive(Args, Debug, Clone)]
pub struct Input {
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Describe an algebra, presentation or weak Hopf structure.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Validate embeddings.
    Embed {
        #[command(subcommand)]
        cmd: EmbedCmd,
    },
    /// Markov trace and index of an inclusion.
    Markov {
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// Conditional expectation onto the source of an embedding.
    Expectation {
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Trace on the target; the Markov trace when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Element of the target to project.
        #[arg(long)]
        element: Option<PathBuf>,
    },
    /// Basic construction of an inclusion.
    BasicConstruction {
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Trace on the target; the Markov trace when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Watatani index of a trace over the scalars.
    Watatani {
        /// Trace file; stdin when neither this nor --blocks is given.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Block sizes; uses the Markov trace of the scalars in this algebra.
        #[arg(long, value_delimiter = ',')]
        blocks: Option<Vec<usize>>,
    },
    /// Depth from a relative-commutant tower.
    Depth(Input),
    /// Index formula `[M:N] = |G| dim(N'∩M)` and its consistency check.
    IndexFormula {
        #[arg(long)]
        relcom_dim: u64,
        #[arg(long, conflicts_with = "index")]
        weyl_order: Option<u64>,
        #[arg(long)]
        index: Option<u64>,
    },
    /// Pimsner–Popa bases.
    Basis {
        #[command(subcommand)]
        cmd: BasisCmd,
    },
    /// Commuting squares.
    Square {
        #[command(subcommand)]
        cmd: SquareCmd,
    },
    /// Weak Hopf and weak Kac algebras.
    Wha {
        #[command(subcommand)]
        cmd: WhaCmd,
    },
    /// Crossed products by weak Kac algebra actions.
    CrossedProduct {
        #[command(subcommand)]
        cmd: CrossedCmd,
    },
    /// Bratteli diagram of an inclusion.
    Bratteli {
        /// Emit Graphviz.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    Info(Input),
}

#[derive(Subcommand, Debug)]
pub enum EmbedCmd {
    /// Validate an embedding and print its inclusion matrix.
    Matrix(Input),
    /// Exit 0 when the Bratteli diagram is connected.
    Connected(Input),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Dft,
    Pauli,
    SylvesterWeyl,
    MatrixUnits,
    Canonical,
    Standard,
    Fourier,
}

#[derive(Subcommand, Debug)]
pub enum BasisCmd {
    /// Emit a basis as JSON.
    Generate {
        #[arg(long, value_enum)]
        kind: BasisKind,
        #[arg(long)]
        n: Option<usize>,
        /// Block sizes for matrix-units and canonical.
        #[arg(long, value_delimiter = ',')]
        blocks: Option<Vec<usize>>,
        /// Embedding for the standard basis.
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Trace on the ambient algebra; the Markov trace when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Verify a basis on its declared side, plus the flags it carries.
    Verify(Input),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareKind {
    Tensor,
    Hadamard,
}

#[derive(Subcommand, Debug)]
pub enum SquareCmd {
    /// Emit a random commuting square with a basis of K over N.
    Generate {
        #[arg(long, value_enum)]
        kind: SquareKind,
        /// Matrix size for hadamard, bound on dim(M) for tensor.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Commuting-square and non-degeneracy checks.
    Check {
        #[command(flatten)]
        input: Input,
        /// Also require non-degeneracy for exit 0.
        #[arg(long)]
        require_nondegenerate: bool,
    },
    /// Transfer a basis of K over N to a basis of M over L.
    Transfer {
        #[command(flatten)]
        input: Input,
        /// Basis file; the square's own `basis` field when omitted.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum WhaCmd {
    /// Run the weak bialgebra, antipode and weak Kac suites.
    Check(Input),
    /// Emit the dual structure.
    Dual(Input),
    /// Emit the groupoid algebra of a groupoid.
    Groupoid {
        /// Groupoid JSON file.
        #[arg(long)]
        file: Option<PathBuf>,
        /// A named groupoid: z<n>, klein, s3, d4, q8, discrete<n>, pair<n>.
        #[arg(long, conflicts_with = "file")]
        name: Option<String>,
        /// Emit the groupoid itself instead of its algebra.
        #[arg(long)]
        raw: bool,
    },
    /// Exit 0 when both the algebra and its dual are connected.
    Biconnected(Input),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionExample {
    Swap,
    Character,
    CounitalPair,
}

#[derive(Subcommand, Debug)]
pub enum CrossedCmd {
    /// Build the crossed product of an action.
    Build {
        #[command(flatten)]
        input: Input,
        /// Use a built-in action instead of reading one.
        #[arg(long, value_enum)]
        example: Option<ActionExample>,
    },
    /// Exit 0 when the relative commutant of A equals A_s.
    CheckMinimal(Input),
    /// Emit a built-in action as JSON.
    Action {
        #[arg(long, value_enum)]
        example: ActionExample,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ws = Workspace::new(cli.tol, cli.seed);
    match commands::run(&mut ws, &cli.command) {
        Ok(out) => {
            out.emit(cli.json, cli.quiet);
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.message, "path": e.path }));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
