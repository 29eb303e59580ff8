use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use roundfold::construct::{construct_directed, descriptor_from_morse, identify_trivial_monodromy};
use roundfold::decompose::{insert_plumbing_buffers, label_tree, reduce_to_pants, TreeLabeling};
use roundfold::descriptor::RoundFoldDescriptor;
use roundfold::directed::{
    admits_directed_graph, admits_directed_torus_bundle, DirectedDecision, TorusBundleInput,
};
use roundfold::graph::DecompositionGraph;
use roundfold::homology::first_homology;
use roundfold::mat::Mat2;
use roundfold::morse::MorsePage;
use roundfold::openbook::openbook_summary;
use roundfold::render;
use roundfold::Error;

/// Graph 3-manifolds and round fold maps: parse and validate decomposition
/// graphs, build directed maps on tree decompositions, verify descriptors,
/// and compute exact invariants.
#[derive(Parser)]
#[command(name = "roundfold", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a .gm file, print its canonical form
    Parse {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce genus-zero bundles to pants pieces and insert plumbing buffers
    Decompose {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monotone tree labeling of a .gm tree
    Label {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the directed round fold descriptor of a tree decomposition
    ConstructDirected {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a round fold descriptor from a Morse page (.mf)
    FromMorse {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a .rfd descriptor and report directedness
    Verify {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Normal directions of the critical circles of a .rfd descriptor
    Directions {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Open-book summary (binding, page Euler characteristic, fold sequence)
    Openbook {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// First homology of the manifold of a .gm graph
    Homology {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the manifold admits a directed round fold map
    AdmitsDirected {
        /// Decomposition graph input
        input: Option<PathBuf>,
        /// Torus bundle monodromy a,b,c,d instead of a graph
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        monodromy: Option<Vec<i64>>,
        #[arg(long)]
        json: bool,
    },
    /// Identify the manifold of an identity-monodromy Morse page
    Identify {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Render a .gm graph (DOT) or a .rfd descriptor (DOT or SVG)
    Render {
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Syntax { .. } | Error::Usage(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Parse { input, output } => {
            let graph = parse_graph_listing(&input)?;
            emit(output.as_deref(), &graph.serialize())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { input, output } => {
            let graph = parse_graph_listing(&input)?;
            let prepared = insert_plumbing_buffers(&reduce_to_pants(&graph)?)?;
            emit(output.as_deref(), &prepared.serialize())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Label { input, json } => {
            let graph = parse_graph_listing(&input)?;
            let labeling = label_tree(&graph)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "root": labeling.root,
                        "labels": label_map(&labeling),
                    })
                );
            } else {
                print!("{}", labeling_text(&labeling));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ConstructDirected { input, output } => {
            let graph = parse_graph_listing(&input)?;
            let prepared = insert_plumbing_buffers(&reduce_to_pants(&graph)?)?;
            let labeling = label_tree(&prepared)?;
            let descriptor = construct_directed(&prepared, &labeling)?;
            emit(output.as_deref(), &descriptor.serialize())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FromMorse { input, output } => {
            let page = MorsePage::parse(&read(&input)?)?;
            let descriptor = descriptor_from_morse(&page);
            emit(output.as_deref(), &descriptor.serialize())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, json } => {
            let descriptor = RoundFoldDescriptor::parse(&read(&input)?)?;
            let violations = descriptor.verify();
            if !violations.is_empty() {
                if json {
                    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                    println!("{}", json!({ "valid": false, "violations": list }));
                } else {
                    for violation in &violations {
                        println!("violation: {violation}");
                    }
                }
                return Ok(ExitCode::from(1));
            }
            let directed = descriptor.is_directed()?;
            if json {
                println!(
                    "{}",
                    json!({
                        "valid": true,
                        "levels": descriptor.levels,
                        "binding": descriptor.binding,
                        "counts": descriptor.counts,
                        "directions": direction_names(&descriptor),
                        "directed": directed,
                    })
                );
            } else {
                println!("levels: {}", descriptor.levels);
                println!("binding: {}", descriptor.binding);
                println!("counts: {}", join_counts(&descriptor.counts));
                println!("directions: {}", direction_names(&descriptor).join(" "));
                println!("directed: {directed}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Directions { input, json } => {
            let descriptor = RoundFoldDescriptor::parse(&read(&input)?)?;
            let directions = descriptor.compute_directions()?;
            let names: Vec<String> = directions.iter().map(|d| d.to_string()).collect();
            if json {
                println!("{}", json!({ "directions": names }));
            } else {
                println!("{}", names.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Openbook { input, json } => {
            let descriptor = RoundFoldDescriptor::parse(&read(&input)?)?;
            let summary = openbook_summary(&descriptor)?;
            if json {
                let sequence: Vec<_> = summary
                    .critical_sequence
                    .iter()
                    .map(|(level, kind, dir)| {
                        json!({
                            "level": level,
                            "fold": kind.to_string(),
                            "direction": dir.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "binding": summary.binding_components,
                        "page_euler_char": summary.page_euler_char,
                        "page_boundary": summary.page_boundary,
                        "page_genus": summary.page_genus,
                        "sequence": sequence,
                    })
                );
            } else {
                println!("binding: {}", summary.binding_components);
                println!("page_euler_char: {}", summary.page_euler_char);
                println!("page_boundary: {}", summary.page_boundary);
                match summary.page_genus {
                    Some(genus) => println!("page_genus: {genus}"),
                    None => println!("page_genus: unknown"),
                }
                let sequence: Vec<String> = summary
                    .critical_sequence
                    .iter()
                    .map(|(level, kind, dir)| format!("{level} {kind} {dir}"))
                    .collect();
                println!("sequence: {}", sequence.join("; "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Homology { input, json } => {
            let graph = parse_graph_listing(&input)?;
            let group = first_homology(&graph)?;
            if json {
                let torsion: Vec<String> = group.torsion.iter().map(|d| d.to_string()).collect();
                println!(
                    "{}",
                    json!({
                        "free_rank": group.free_rank,
                        "torsion": torsion,
                        "display": group.to_string(),
                    })
                );
            } else {
                println!("H1 = {group}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::AdmitsDirected {
            input,
            monodromy,
            json,
        } => {
            let decision = match (input, monodromy) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(Error::Usage(
                        "give exactly one of a .gm input or --monodromy a,b,c,d".into(),
                    ))
                }
                (Some(path), None) => {
                    let graph = parse_graph_listing(&path)?;
                    admits_directed_graph(&graph)?
                }
                (None, Some(m)) => {
                    if m.len() != 4 {
                        return Err(Error::Usage(
                            "--monodromy expects four entries a,b,c,d".into(),
                        ));
                    }
                    let bundle = TorusBundleInput::new(Mat2::new(m[0], m[1], m[2], m[3]))?;
                    admits_directed_torus_bundle(&bundle)
                }
            };
            match decision {
                DirectedDecision::Yes { witness, .. } => {
                    if json {
                        println!(
                            "{}",
                            json!({
                                "verdict": "YES",
                                "root": witness.root,
                                "labels": label_map(&witness),
                            })
                        );
                    } else {
                        println!("verdict: YES");
                        print!("{}", labeling_text(&witness));
                    }
                }
                DirectedDecision::No { obstruction } => {
                    if json {
                        println!("{}", json!({ "verdict": "NO", "obstruction": obstruction }));
                    } else {
                        println!("verdict: NO");
                        println!("obstruction: {obstruction}");
                    }
                }
                DirectedDecision::Unknown { report } => {
                    if json {
                        println!("{}", json!({ "verdict": "UNKNOWN", "report": report }));
                    } else {
                        println!("verdict: UNKNOWN");
                        println!("report: {report}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Identify { input, json } => {
            let page = MorsePage::parse(&read(&input)?)?;
            let manifold = identify_trivial_monodromy(&page)?;
            if json {
                println!("{}", json!({ "manifold": manifold.to_string() }));
            } else {
                println!("{manifold}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Render {
            input,
            format,
            output,
        } => {
            let extension = input
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or_default()
                .to_string();
            let text = read(&input)?;
            let rendered = match extension.as_str() {
                "gm" => {
                    let graph = parse_graph_text(&text)?;
                    match format.unwrap_or(Format::Dot) {
                        Format::Dot => render::graph_dot(&graph),
                        Format::Svg => {
                            return Err(Error::Usage(
                                "SVG rendering applies to .rfd descriptors".into(),
                            ))
                        }
                    }
                }
                "rfd" => {
                    let descriptor = RoundFoldDescriptor::parse(&text)?;
                    match format.unwrap_or(Format::Svg) {
                        Format::Dot => render::descriptor_dot(&descriptor),
                        Format::Svg => render::descriptor_svg(&descriptor),
                    }
                }
                other => {
                    return Err(Error::Usage(format!("cannot render `.{other}` files")))
                }
            };
            emit(output.as_deref(), &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_graph_listing(path: &Path) -> Result<DecompositionGraph, Error> {
    parse_graph_text(&read(path)?)
}

fn parse_graph_text(text: &str) -> Result<DecompositionGraph, Error> {
    DecompositionGraph::parse(text)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn labeling_text(labeling: &TreeLabeling) -> String {
    let labels: Vec<String> = labeling
        .labels
        .iter()
        .map(|(v, l)| format!("{v}={l}"))
        .collect();
    format!("root: {}\nlabels: {}\n", labeling.root, labels.join(" "))
}

fn label_map(labeling: &TreeLabeling) -> BTreeMap<String, usize> {
    labeling
        .labels
        .iter()
        .map(|(v, l)| (v.to_string(), *l))
        .collect()
}

fn direction_names(descriptor: &RoundFoldDescriptor) -> Vec<String> {
    descriptor
        .directions
        .iter()
        .map(|d| d.to_string())
        .collect()
}

fn join_counts(counts: &[usize]) -> String {
    counts
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
