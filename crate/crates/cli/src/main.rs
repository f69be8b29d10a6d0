mod data;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cgkit_core::closure::{
    check_partition, full_model, local_separation_base, pairwise_separation_base, wtc_closure,
};
use cgkit_core::dependence::{joined, verify_sound_complete, DEFAULT_DEPENDENCE_BOUND};
use cgkit_core::enumerate::{random_chain_graph, random_mccg};
use cgkit_core::equivalence::{blargest, markov_equivalent_mccg, triplex_equivalent};
use cgkit_core::io::{graph_to_dot, graph_to_json, read_graph};
use cgkit_core::learn::{learn_amp, learn_mccg, SeparatorTable};
use cgkit_core::oracle::{fisher_z_oracle, gen_gaussian, GraphOracle, IndependenceOracle};
use cgkit_core::separation::{
    concentration_projection, covariance_projection, mag_translate, separated, SeparationKind,
    SeparationQuery,
};
use cgkit_core::verify::{verify_all, MAX_VERIFY_BOUND};
use cgkit_core::{CgError, MixedGraph, NodeSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "cgkit",
    version,
    about = "AMP chain graphs and MCCGs: separation, learning, equivalence and closure"
)]
struct Cli {
    /// Print graphs as Graphviz DOT instead of JSON.
    #[arg(long, global = true)]
    dot: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether a graph is a chain graph, an MCCG, or neither.
    Validate(GraphArg),
    /// Test X _|_ Y | Z by graphical separation.
    Sep {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        query: QueryArgs,
        /// Separation criterion; defaults to amp without bidirected edges, mccg otherwise.
        #[arg(long)]
        kind: Option<Kind>,
    },
    /// Learn an AMP chain graph from a graph oracle or from data.
    LearnAmp(LearnArgs),
    /// Learn an MCCG from a graph oracle or from data.
    LearnMccg(LearnArgs),
    /// Test two graphs for triplex (and, for MCCGs, Markov) equivalence.
    Equiv {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_name = "PATH")]
        other: PathBuf,
    },
    /// The member of an MCCG's class with the most bidirected edges.
    Blargest(GraphArg),
    /// Marginalize nodes out of an MCCG.
    Marginalize {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated nodes to remove.
        #[arg(long)]
        remove: String,
    },
    /// Covariance or concentration graph of an MCCG.
    Project {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        kind: Projection,
    },
    /// Replace each A <-> B -- C by A <-> B <- C.
    MagTranslate(GraphArg),
    /// Closure of a separation base under the WTC graphoid rules.
    Closure {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value = "local")]
        base: Base,
        /// Blocks for the pairwise base, e.g. `A,B;C,D`; defaults to the
        /// undirected components.
        #[arg(long)]
        partition: Option<String>,
    },
    /// Decide X ~ Y | Z by searching for a joining path.
    ReadDeps {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Compare joined triples with the dependence closure.
    VerifyDeps {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = DEFAULT_DEPENDENCE_BOUND)]
        bound: usize,
    },
    /// Random chain graph or MCCG.
    Gen {
        #[arg(long)]
        kind: GraphKind,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random Gaussian faithful to a graph: its covariance, or samples.
    GenCov {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw this many samples instead of printing the covariance.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run every exhaustive property over all graphs up to the bound.
    VerifyAll {
        #[arg(long, default_value_t = MAX_VERIFY_BOUND)]
        bound: usize,
    },
}

#[derive(Args)]
struct GraphArg {
    /// Graph file in JSON.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, default_value = "")]
    z: String,
}

#[derive(Args)]
struct LearnArgs {
    /// True graph to use as the independence oracle.
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "data",
        required_unless_present = "data"
    )]
    graph: Option<PathBuf>,
    /// CSV samples, tested with Fisher's z.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Write the separating sets found to this file as JSON.
    #[arg(long, value_name = "PATH")]
    dump_seps: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Amp,
    Mccg,
    Mag,
}

#[derive(Clone, Copy, ValueEnum)]
enum Projection {
    Covariance,
    Concentration,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Local,
    Pairwise,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Cg,
    Mccg,
}

/// Exit status of a command that ran to completion.
enum Status {
    Ok,
    /// The algorithm ran on valid input but its result is a failure.
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let core = e.downcast_ref::<CgError>();
            if let Some(CgError::LearnFailure { graph, .. }) = core {
                eprintln!("partial result: {}", graph_to_json(graph));
            }
            let input = core.is_none_or(CgError::is_input_error);
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let mut out = String::new();
    let status = match &cli.command {
        Command::Validate(a) => validate(&load(&a.graph)?, &mut out)?,
        Command::Sep { graph, query, kind } => {
            let g = load(&graph.graph)?;
            let q = parse_query(&g, query)?;
            let kind = match kind {
                Some(Kind::Amp) => SeparationKind::Amp,
                Some(Kind::Mccg) => SeparationKind::Mccg,
                Some(Kind::Mag) => SeparationKind::Mag,
                None => SeparationKind::for_graph(&g),
            };
            let sep = separated(&g, kind, &q)?;
            writeln!(out, "{}", if sep { "SEPARATED" } else { "CONNECTED" })?;
            Status::Ok
        }
        Command::LearnAmp(a) => {
            let (oracle, header) = oracle(a)?;
            let r = learn_amp(oracle.as_ref())?;
            dump_seps(a, &r.separators, oracle.variables())?;
            eprintln!("{header}");
            push_graph(cli, &r.graph, &mut out);
            Status::Ok
        }
        Command::LearnMccg(a) => {
            let (oracle, header) = oracle(a)?;
            let r = learn_mccg(oracle.as_ref())?;
            dump_seps(a, &r.separators, oracle.variables())?;
            eprintln!("{header}");
            push_graph(cli, &r.graph, &mut out);
            Status::Ok
        }
        Command::Equiv { graph, other } => {
            let (g, h) = (load(&graph.graph)?, load(other)?);
            let same = if g.has_bidirected() || h.has_bidirected() {
                markov_equivalent_mccg(&g, &h)?
            } else {
                triplex_equivalent(&g, &h)?
            };
            writeln!(
                out,
                "{}",
                if same { "EQUIVALENT" } else { "NOT-EQUIVALENT" }
            )?;
            Status::Ok
        }
        Command::Blargest(a) => {
            push_graph(cli, &blargest(&load(&a.graph)?)?, &mut out);
            Status::Ok
        }
        Command::Marginalize { graph, remove } => {
            let g = load(&graph.graph)?;
            let gone = parse_set(&g, remove)?;
            push_graph(
                cli,
                &g.marginalize_mccg(g.nodes().difference(gone))?,
                &mut out,
            );
            Status::Ok
        }
        Command::Project { graph, kind } => {
            let g = load(&graph.graph)?;
            let p = match kind {
                Projection::Covariance => covariance_projection(&g)?,
                Projection::Concentration => concentration_projection(&g)?,
            };
            push_graph(cli, &p, &mut out);
            Status::Ok
        }
        Command::MagTranslate(a) => {
            push_graph(cli, &mag_translate(&load(&a.graph)?)?, &mut out);
            Status::Ok
        }
        Command::Closure {
            graph,
            base,
            partition,
        } => closure(&load(&graph.graph)?, *base, partition, &mut out)?,
        Command::ReadDeps { graph, query } => {
            let g = load(&graph.graph)?;
            let q = parse_query(&g, query)?;
            match joined(&g, &q)? {
                Some(w) => writeln!(out, "JOINED {}", w.describe(&g))?,
                None => writeln!(out, "NOT-JOINED")?,
            }
            Status::Ok
        }
        Command::VerifyDeps { graph, bound } => {
            let g = load(&graph.graph)?;
            let r = verify_sound_complete(&g, *bound)?;
            writeln!(
                out,
                "joined {} derivable {}",
                r.joined.len(),
                r.closure.len()
            )?;
            for (label, ts) in [
                ("joined, not derivable", &r.unsound),
                ("derivable, not joined", &r.incomplete),
            ] {
                for t in ts {
                    let fmt = |s: NodeSet| g.set_names(s).join(",");
                    writeln!(out, "{label}: {}|{}|{}", fmt(t.x), fmt(t.y), fmt(t.z))?;
                }
            }
            if r.holds() {
                writeln!(out, "SOUND-COMPLETE")?;
                Status::Ok
            } else {
                writeln!(out, "MISMATCH")?;
                Status::Failed
            }
        }
        Command::Gen {
            kind,
            nodes,
            density,
            seed,
        } => {
            if !(0.0..=1.0).contains(density) {
                bail!("density must lie in [0,1], got {density}");
            }
            if *nodes == 0 || *nodes > cgkit_core::MAX_NODES {
                bail!("nodes must lie in 1..={}", cgkit_core::MAX_NODES);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let g = match kind {
                GraphKind::Cg => random_chain_graph(*nodes, *density, &mut rng),
                GraphKind::Mccg => random_mccg(*nodes, *density, &mut rng),
            };
            eprintln!("# seed={seed}");
            push_graph(cli, &g, &mut out);
            Status::Ok
        }
        Command::GenCov {
            graph,
            seed,
            samples,
        } => {
            let g = load(&graph.graph)?;
            let model = gen_gaussian(&g, *seed)?;
            writeln!(out, "# seed={seed}")?;
            match samples {
                Some(n) => data::write_matrix(&mut out, model.names(), &model.sample(*n, *seed)?)?,
                None => data::write_matrix(&mut out, model.names(), model.covariance())?,
            }
            Status::Ok
        }
        Command::VerifyAll { bound } => {
            let report = verify_all(*bound)?;
            write!(out, "{report}")?;
            if report.passed() {
                Status::Ok
            } else {
                Status::Failed
            }
        }
    };
    match &cli.out {
        Some(p) => {
            std::fs::write(p, &out).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => print!("{out}"),
    }
    Ok(status)
}

fn load(path: &Path) -> Result<MixedGraph> {
    Ok(read_graph(path)?)
}

fn push_graph(cli: &Cli, g: &MixedGraph, out: &mut String) {
    if cli.dot {
        out.push_str(&graph_to_dot(g));
    } else {
        out.push_str(&graph_to_json(g));
        out.push('\n');
    }
}

fn parse_set(g: &MixedGraph, list: &str) -> Result<NodeSet> {
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    Ok(g.set_of(&names)?)
}

fn parse_query(g: &MixedGraph, q: &QueryArgs) -> Result<SeparationQuery> {
    let q = SeparationQuery::new(
        parse_set(g, &q.x)?,
        parse_set(g, &q.y)?,
        parse_set(g, &q.z)?,
    );
    q.validate(g)?;
    Ok(q)
}

fn validate(g: &MixedGraph, out: &mut String) -> Result<Status> {
    if g.has_directed() && g.has_bidirected() {
        bail!("graph mixes directed and bidirected edges");
    }
    if g.has_bidirected() {
        let violations = g.mccg_violations()?;
        if violations.is_empty() {
            writeln!(out, "MCCG")?;
        } else {
            for v in &violations {
                eprintln!("{}", g.describe_violation(v));
            }
            bail!("graph is not a maximal covariance-concentration graph");
        }
    } else if g.is_chain_graph()? {
        writeln!(
            out,
            "{}",
            if g.has_directed() {
                "CHAIN-GRAPH"
            } else {
                "UNDIRECTED"
            }
        )?;
    } else {
        bail!("graph has a semidirected cycle");
    }
    Ok(Status::Ok)
}

fn oracle(a: &LearnArgs) -> Result<(Box<dyn IndependenceOracle>, String)> {
    if let Some(p) = &a.graph {
        return Ok((
            Box::new(GraphOracle::new(load(p)?)?),
            "# oracle=graph".into(),
        ));
    }
    let p = a.data.as_ref().expect("clap requires --graph or --data");
    let (names, m) = data::read_csv(p)?;
    let o = fisher_z_oracle(names, &m, a.alpha)?;
    let header = format!("# oracle=fisher-z n={} alpha={}", o.sample_size(), a.alpha);
    Ok((Box::new(o), header))
}

fn dump_seps(a: &LearnArgs, seps: &SeparatorTable, names: &[String]) -> Result<()> {
    if let Some(p) = &a.dump_seps {
        std::fs::write(p, seps.to_json(names))
            .with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn closure(
    g: &MixedGraph,
    base: Base,
    partition: &Option<String>,
    out: &mut String,
) -> Result<Status> {
    let n = g.node_count();
    let triples = match base {
        Base::Local => local_separation_base(g)?,
        Base::Pairwise => {
            let blocks = match partition {
                Some(p) => p
                    .split(';')
                    .map(|b| parse_set(g, b))
                    .collect::<Result<Vec<_>>>()?,
                None => g.undirected_components(),
            };
            check_partition(g, &blocks)?;
            pairwise_separation_base(g, &blocks)?
        }
    };
    let cl = wtc_closure(&triples, n)?;
    let model = full_model(g, SeparationKind::Mccg)?;
    let label = match base {
        Base::Local => "local",
        Base::Pairwise => "pairwise",
    };
    writeln!(
        out,
        "# base={label} statements={} matches-separation={}",
        cl.len(),
        cl == model
    )?;
    for line in cl.to_lines(g.names()) {
        writeln!(out, "{line}")?;
    }
    Ok(Status::Ok)
}
