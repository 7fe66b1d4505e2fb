mod bench;
mod inputs;
mod output;
mod solve;
mod verify;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde_json::json;
use tubings::chords::{mu, theta, ChordDiagram};
use tubings::trees::{enumerate_rooted_trees, parse_tree, TreeDomain};
use tubings::tubings::{count_tubings, enumerate_tubings};
use tubings::FlatTree;

use output::{tubes_json, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Enumerate,
    Count,
    Solve,
    Biject,
    Verify,
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Gamma,
    Green,
    PerTree,
    PerTubing,
    PerDiagram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Binary tubings, Dyson-Schwinger series and chord diagrams.
#[derive(Debug, Parser)]
#[command(name = "tubings-dse", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Tree in the notation weight[:type](child,...), e.g. "1(1,1)".
    #[arg(long)]
    pub tree: Option<String>,
    /// Chord diagram such as "(1,3)(2,4)".
    #[arg(long)]
    pub chords: Option<String>,
    /// The rational parameter s.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    /// Truncation order in x.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// yukawa, symbolic, or a path to a JSON table.
    #[arg(long, default_value = "yukawa")]
    pub mellin: String,
    /// Kernel weights for built-in tables, comma separated.
    #[arg(long, default_value = "1")]
    pub kernels: String,
    /// JSON file describing a system of equations.
    #[arg(long)]
    pub system: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Emit::Gamma)]
    pub emit: Emit,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size bound for verify and bench.
    #[arg(long, default_value_t = 5)]
    pub max: usize,
    /// all, trees, tubings, hopf, dse, chords or linegraph.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Done,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TUBINGS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("TUBINGS_THREADS={v:?} is not a count"))?;
        if n == 0 {
            bail!("TUBINGS_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    if cli.order == 0 {
        bail!("--order must be at least 1");
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Enumerate => enumerate(cli, &mut out)?,
        Command::Count => count(cli, &mut out)?,
        Command::Solve => solve::run(cli, &mut out)?,
        Command::Biject => biject(cli, &mut out)?,
        Command::Verify => return verify::run(cli, &mut out),
        Command::Bench => bench::run(cli, &mut out)?,
    }
    Ok(Outcome::Done)
}

fn enumerate(cli: &Cli, out: &mut impl std::io::Write) -> Result<()> {
    let mut table = Table::new(cli.format);
    match &cli.tree {
        Some(text) => {
            let t = parse_tree(text)?;
            let host = FlatTree::new(&t)?;
            table.header(&["index", "b", "tubes"]);
            for (i, tau) in enumerate_tubings(&host).iter().enumerate() {
                table.row(
                    vec![i.to_string(), tau.b().to_string(), tau.to_string()],
                    json!({ "index": i, "b": tau.b(), "tubes": tubes_json(tau), "tubing": tau.to_json() }),
                );
            }
        }
        None => {
            let domain = TreeDomain::Decorations(inputs::kernel_decorations(&cli.kernels)?);
            table.header(&["weight", "tree", "aut", "plane_embeddings", "tubings"]);
            for t in enumerate_rooted_trees(cli.order as u64, &domain) {
                let n = count_tubings(&t);
                table.row(
                    vec![
                        t.weight().to_string(),
                        t.to_string(),
                        t.aut_order().to_string(),
                        t.plane_embeddings().to_string(),
                        n.to_string(),
                    ],
                    json!({
                        "weight": t.weight(),
                        "tree": t.to_string(),
                        "aut": t.aut_order().to_string(),
                        "plane_embeddings": t.plane_embeddings().to_string(),
                        "tubings": n.to_string(),
                    }),
                );
            }
        }
    }
    table.write(out)
}

fn count(cli: &Cli, out: &mut impl std::io::Write) -> Result<()> {
    let Some(text) = &cli.tree else {
        bail!("count needs --tree")
    };
    let t = parse_tree(text)?;
    let n = count_tubings(&t.canonicalize());
    match cli.format {
        Format::Csv => writeln!(out, "tubings={n}")?,
        Format::Json => {
            let leaf = t.canonicalize().decreasing_labellings();
            let v = json!({ "tree": t.to_string(), "tubings": n.to_string(), "leaf_tubings": leaf.to_string() });
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

fn biject(cli: &Cli, out: &mut impl std::io::Write) -> Result<()> {
    let mut table = Table::new(cli.format);
    match (&cli.tree, &cli.chords) {
        (Some(text), None) => {
            let t = parse_tree(text)?;
            let host = FlatTree::new(&t)?;
            table.header(&["tubes", "diagram", "weights", "terminals"]);
            for tau in enumerate_tubings(&host) {
                let img = theta(&t, &tau)?;
                let io = img.diagram.intersection_order()?;
                let terms: Vec<String> = io.terminals.iter().map(usize::to_string).collect();
                let weights: Vec<String> = img.diagram.weights().iter().map(u32::to_string).collect();
                table.row(
                    vec![
                        tau.to_string(),
                        img.diagram.to_string(),
                        weights.join(" "),
                        terms.join(" "),
                    ],
                    json!({
                        "tubing": tau.to_json(),
                        "diagram": img.diagram.to_json(),
                        "vertex_of_chord": img.vertex,
                        "intersection_labels": io.labels,
                        "terminals": io.terminals,
                    }),
                );
            }
        }
        (None, Some(text)) => {
            let c: ChordDiagram = text.parse()?;
            let k = c.classify();
            let (t, tau, vertex) = mu(&c)?;
            table.header(&["diagram", "tree", "tubes", "one_terminal", "permutation", "avoids_213"]);
            table.row(
                vec![
                    c.to_string(),
                    t.to_string(),
                    tau.to_string(),
                    k.one_terminal.to_string(),
                    k.permutation.to_string(),
                    k.avoids_213.to_string(),
                ],
                json!({
                    "diagram": c.to_json(),
                    "tree": t.to_json(),
                    "tubing": tau.to_json(),
                    "vertex_of_chord": vertex,
                    "classes": {
                        "connected": k.connected,
                        "decomposable": k.decomposable,
                        "noncrossing": k.noncrossing,
                        "permutation": k.permutation,
                        "avoids_213": k.avoids_213,
                        "one_terminal": k.one_terminal,
                    },
                }),
            );
        }
        _ => bail!("biject needs exactly one of --tree or --chords"),
    }
    table.write(out)
}
