//! Command-line front end for arborcheck.
//!
//! Every command produces an [`Output`]: a JSON body, a short text rendering,
//! optionally a DOT drawing, and an exit status. Exit codes: 0 when all
//! asserted properties hold, 1 when a property or hypothesis fails, 2 for bad
//! input, 3 when an internal invariant breaks.

pub mod commands;
pub mod fuzz;
pub mod golden;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use arborcheck::Error;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "arborcheck", version, about = "Intersection theory on resolution dual graphs")]
pub struct Cli {
    /// Print a human-readable summary instead of JSON.
    #[arg(long, global = true, conflicts_with = "dot")]
    pub text: bool,
    /// Print a Graphviz drawing where the command has one.
    #[arg(long, global = true)]
    pub dot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// Graph description in JSON; `-` reads standard input.
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct FamilyArg {
    /// Comma-separated vertex ids; defaults to every vertex.
    #[arg(long, short, value_delimiter = ',')]
    pub family: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph description and report basic facts about it.
    Validate(GraphArg),
    /// Table of brackets <u,v> = -Ě_u·Ě_v.
    Brackets {
        #[command(flatten)]
        graph: GraphArg,
        /// Also report the dual basis Ě_u.
        #[arg(long)]
        dual: bool,
    },
    /// Angular distance on a family, with the 4-point test.
    Rho {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Crucial inequality and spherical angle at V for the triple (U, V, W).
    Triple {
        #[command(flatten)]
        graph: GraphArg,
        u: String,
        v: String,
        w: String,
        /// Absolute tolerance for the right-angle test.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Cut vertices, bricks and bridges.
    Bricks(GraphArg),
    /// Brick-vertex tree, with the hull of a family highlighted if given.
    Bvt {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, short, value_delimiter = ',')]
        family: Vec<String>,
    },
    /// Convex hull of a family in the brick-vertex tree and its valency test.
    Hull {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Ultrametricity of u_L and the rooted dendrogram against the hull.
    Ultra {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        family: FamilyArg,
        /// Root L; defaults to the first family member.
        #[arg(long)]
        root: Option<String>,
    },
    /// Tree hull of the angular distance against the brick-vertex hull.
    Treehull {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Blow up a point of the exceptional divisor and print the new model.
    Blowup {
        #[command(flatten)]
        graph: GraphArg,
        /// Blow up a free point of this prime.
        #[arg(long, conflicts_with = "satellite", required_unless_present = "satellite")]
        free: Option<String>,
        /// Blow up the intersection point `U,V` or `U,V,INDEX`.
        #[arg(long, value_delimiter = ',')]
        satellite: Vec<String>,
        /// Id of the new prime; a fresh one is chosen otherwise.
        #[arg(long)]
        id: Option<String>,
    },
    /// Branches violating ultrametricity at root L on a non-tree graph.
    Counterexample {
        #[command(flatten)]
        graph: GraphArg,
        /// Root vertex L; defaults to the first vertex.
        #[arg(long)]
        root: Option<String>,
    },
    /// Bracket of two valuations, e.g. `div(E1)` and `qm(E1,E2;2/3,1/3)`.
    Valbracket {
        #[command(flatten)]
        graph: GraphArg,
        v1: String,
        v2: String,
    },
    /// 4-point test on a quadruple of valuations.
    Fourpoint {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(num_args = 4, required = true)]
        valuations: Vec<String>,
        /// Positive factor applied to the three pairing products.
        #[arg(long, default_value = "1")]
        scale: String,
    },
    /// Valency hypothesis for a family of valuations.
    Hypothesis {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(required = true)]
        valuations: Vec<String>,
    },
    /// Replay the tetrahedron and Y-graph examples against stored values.
    Golden,
    /// Run every invariant suite on seeded random models.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        models: usize,
        /// Overridden by ARBORCHECK_SEED when set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        /// Absolute tolerance for the right-angle test.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds = 0,
    Fails = 1,
    Input = 2,
    Internal = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct Output {
    pub body: Value,
    pub text: String,
    pub dot: Option<String>,
    pub status: Status,
}

impl Output {
    fn new(body: &impl Serialize, text: String, status: Status) -> Result<Self, Failure> {
        let body = serde_json::to_value(body).map_err(|e| Failure::internal(e.to_string()))?;
        Ok(Output { body, text, dot: None, status })
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }

    /// What goes to standard output for the chosen format.
    pub fn render(&self, cli: &Cli) -> String {
        if cli.dot {
            if let Some(d) = &self.dot {
                return d.clone();
            }
        }
        if cli.text {
            return self.text.clone();
        }
        let mut s = serde_json::to_string_pretty(&self.body).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// A command that could not produce a report.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { status: Status::Input, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure { status: Status::Internal, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            e if e.is_internal() => Status::Internal,
            Error::LeafNotInF(_) | Error::LabelSetMismatch => Status::Internal,
            Error::NotTreeLike(_) | Error::NotUltrametric(..) | Error::GraphIsArborescent => Status::Fails,
            _ => Status::Input,
        };
        Failure { status, message: e.to_string() }
    }
}

/// `ARBORCHECK_SEED` wins over the command-line seed.
pub fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var("ARBORCHECK_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::input(format!("ARBORCHECK_SEED={s:?} is not a u64"))),
        Err(_) => Ok(flag),
    }
}
