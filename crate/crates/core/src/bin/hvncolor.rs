//! Batch command-line surface over the library: membership checking,
//! bounded coloring, generation of named families, and verification
//! campaigns. Exit codes are part of the contract:
//!
//! - `check`: 0 member, 1 non-member (witness on stdout), 2 I/O or parse error
//! - `color`: 0 colored, 1 non-member, 2 I/O error, 3 branch assertion failure
//! - `campaign`: 0 clean, 1 violations recorded, 2 I/O error
//!
//! `HVNCOLOR_NODE_BUDGET` sets the default node budget for exact searches;
//! `--node-budget` overrides it (0 means unlimited).

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hvncolor::campaign::{run_campaign, CampaignOptions};
use hvncolor::coloring::{color_class_member, ColoringError};
use hvncolor::formats::{
    read_dimacs_col, read_edge_list, read_graph6, write_coloring_json, write_graph6,
    write_witness_json,
};
use hvncolor::generators::{canonical_form, enumerate_all_graphs, extremal, sample_class_member};
use hvncolor::graph::Graph;
use hvncolor::oracle::{chromatic_number, NodeBudget};
use hvncolor::patterns::{class_violation, is_class_member};

#[derive(Parser)]
#[command(
    name = "hvncolor",
    about = "Certified bounded coloring for (P2∪P4, HVN)-free graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Graph6,
    Dimacs,
    Edges,
}

#[derive(Args)]
struct InputArgs {
    /// Input file, or "-" for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Input format.
    #[arg(long, value_enum, default_value_t = Format::Graph6)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Decide class membership; prints a witness record for non-members.
    Check {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Color a class member within the clique-number budget.
    Color {
        #[command(flatten)]
        input: InputArgs,
        /// Dump the branch trace as JSON.
        #[arg(long)]
        explain: bool,
        /// Also compute the exact chromatic number and check the sandwich
        /// omega <= chi <= colors-used <= budget.
        #[arg(long)]
        oracle_verify: bool,
        /// Node budget for exact searches (0 = unlimited).
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Emit the tight construction for a clique number as graph6.
    Extremal {
        omega: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Sample seeded random class members as graph6 lines.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Emit all labeled graphs on n vertices (n <= 7) as graph6 lines.
    Enumerate {
        n: usize,
        /// Keep only class members.
        #[arg(long)]
        members_only: bool,
        /// Deduplicate isomorphic graphs (brute force, small n only).
        #[arg(long)]
        distinct: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Decompose, property-check, color and verify every graph in a stream.
    Campaign {
        /// graph6 stream to verify ("-" for stdin).
        #[arg(long, conflicts_with_all = ["enumerate", "sample_n"])]
        input: Option<String>,
        /// Verify the full labeled enumeration on n vertices.
        #[arg(long)]
        enumerate: Option<usize>,
        /// Verify seeded samples: vertex count.
        #[arg(long)]
        sample_n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        sample_count: u64,
        #[arg(long, default_value_t = 0.5)]
        sample_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against the exact oracle on graphs up to the size cap.
        #[arg(long)]
        oracle_verify: bool,
        #[arg(long, default_value_t = 40)]
        oracle_verify_max_n: usize,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Write per-graph records (JSON lines) to this file.
        #[arg(long)]
        out: Option<String>,
    },
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        fs::read_to_string(path)
    }
}

fn parse_graph(text: &str, format: Format) -> Result<Graph, String> {
    match format {
        Format::Graph6 => {
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .ok_or_else(|| "empty input".to_string())?;
            read_graph6(line).map_err(|e| e.to_string())
        }
        Format::Dimacs => read_dimacs_col(text).map_err(|e| e.to_string()),
        Format::Edges => read_edge_list(text).map_err(|e| e.to_string()),
    }
}

fn load_graph(input: &InputArgs) -> Result<Graph, String> {
    let text = read_input(&input.input).map_err(|e| format!("{}: {e}", input.input))?;
    parse_graph(&text, input.format)
}

fn node_budget_from(flag: Option<u64>) -> NodeBudget {
    let value = flag.or_else(|| {
        std::env::var("HVNCOLOR_NODE_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    match value {
        None | Some(0) => NodeBudget::UNLIMITED,
        Some(v) => NodeBudget::limited(v),
    }
}

fn open_out(path: &Option<String>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_check(input: InputArgs) -> ExitCode {
    let g = match load_graph(&input) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match class_violation(&g) {
        None => {
            println!("{{\"member\":true}}");
            ExitCode::SUCCESS
        }
        Some(witness) => {
            println!("{}", write_witness_json(&witness));
            ExitCode::from(1)
        }
    }
}

fn cmd_color(
    input: InputArgs,
    explain: bool,
    oracle_verify: bool,
    node_budget: Option<u64>,
) -> ExitCode {
    let g = match load_graph(&input) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let budget = node_budget_from(node_budget);
    match color_class_member(&g, budget) {
        Ok((coloring, trace)) => {
            let proper = coloring.is_proper(&g);
            println!("{}", write_coloring_json(&coloring, proper));
            if explain {
                println!(
                    "{}",
                    serde_json::to_string(&trace).expect("trace serializes")
                );
            }
            if oracle_verify {
                match chromatic_number(&g, budget) {
                    Ok((chi, _)) => {
                        let used = coloring.colors_used();
                        let ok = chi <= used && used <= trace.budget;
                        println!(
                            "{{\"oracle_chi\":{chi},\"colors_used\":{used},\"budget\":{},\"sandwich_ok\":{ok}}}",
                            trace.budget
                        );
                    }
                    Err(e) => eprintln!("oracle unavailable: {e}"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(ColoringError::NotClassMember(witness)) => {
            println!("{}", write_witness_json(&witness));
            ExitCode::from(1)
        }
        Err(e) => {
            // replay bundle: the offending graph plus the failure report
            eprintln!("error: {e}");
            eprintln!(
                "replay: {}",
                write_graph6(&g).unwrap_or_else(|_| "<unencodable>".into())
            );
            ExitCode::from(3)
        }
    }
}

fn cmd_extremal(omega: usize, out: Option<String>) -> ExitCode {
    let g = match extremal(omega) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut w = match open_out(&out) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let line = write_graph6(&g).expect("extremal graphs fit graph6");
    if writeln!(w, "{line}").and_then(|()| w.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn cmd_sample(n: usize, count: u64, density: f64, seed: u64, out: Option<String>) -> ExitCode {
    if n == 0 {
        eprintln!("error: need n >= 1");
        return ExitCode::from(2);
    }
    let mut w = match open_out(&out) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for i in 0..count {
        let g = sample_class_member(n, density, seed.wrapping_add(i));
        debug_assert!(is_class_member(&g));
        let line = write_graph6(&g).expect("sample fits graph6");
        if writeln!(w, "{line}").is_err() {
            return ExitCode::from(2);
        }
    }
    if w.flush().is_err() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn cmd_enumerate(n: usize, members_only: bool, distinct: bool, out: Option<String>) -> ExitCode {
    let graphs = match enumerate_all_graphs(n) {
        Ok(it) => it,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut w = match open_out(&out) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut seen = std::collections::HashSet::new();
    for g in graphs {
        if members_only && !is_class_member(&g) {
            continue;
        }
        if distinct && !seen.insert(canonical_form(&g)) {
            continue;
        }
        let line = write_graph6(&g).expect("small graphs fit graph6");
        if writeln!(w, "{line}").is_err() {
            return ExitCode::from(2);
        }
    }
    if w.flush().is_err() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

#[allow(clippy::too_many_arguments)]
fn cmd_campaign(
    input: Option<String>,
    enumerate: Option<usize>,
    sample_n: Option<usize>,
    sample_count: u64,
    sample_density: f64,
    seed: u64,
    oracle_verify: bool,
    oracle_verify_max_n: usize,
    jobs: Option<usize>,
    node_budget: Option<u64>,
    out: Option<String>,
) -> ExitCode {
    let opts = CampaignOptions {
        oracle_verify,
        oracle_verify_max_n,
        node_budget: node_budget_from(node_budget),
        jobs,
        keep_records: out.is_some(),
    };

    let report = if let Some(n) = enumerate {
        match enumerate_all_graphs(n) {
            Ok(it) => run_campaign(it, &opts),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else if let Some(n) = sample_n {
        let graphs = (0..sample_count)
            .map(move |i| sample_class_member(n, sample_density, seed.wrapping_add(i)));
        run_campaign(graphs, &opts)
    } else {
        let source = input.unwrap_or_else(|| "-".to_string());
        let text = match read_input(&source) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {source}: {e}");
                return ExitCode::from(2);
            }
        };
        let mut graphs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match read_graph6(line) {
                Ok(g) => graphs.push(g),
                Err(e) => {
                    eprintln!("error: line {}: {e}", idx + 1);
                    return ExitCode::from(2);
                }
            }
        }
        run_campaign(graphs.into_iter(), &opts)
    };

    if let Some(path) = &out {
        let mut w = match open_out(&Some(path.clone())) {
            Ok(w) => w,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        for record in &report.records {
            if writeln!(
                w,
                "{}",
                serde_json::to_string(record).expect("record serializes")
            )
            .is_err()
            {
                return ExitCode::from(2);
            }
        }
        if w.flush().is_err() {
            return ExitCode::from(2);
        }
    }
    println!(
        "{}",
        serde_json::to_string(&report.totals).expect("totals serialize")
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check { input } => cmd_check(input),
        Command::Color {
            input,
            explain,
            oracle_verify,
            node_budget,
        } => cmd_color(input, explain, oracle_verify, node_budget),
        Command::Extremal { omega, out } => cmd_extremal(omega, out),
        Command::Sample {
            n,
            count,
            density,
            seed,
            out,
        } => cmd_sample(n, count, density, seed, out),
        Command::Enumerate {
            n,
            members_only,
            distinct,
            out,
        } => cmd_enumerate(n, members_only, distinct, out),
        Command::Campaign {
            input,
            enumerate,
            sample_n,
            sample_count,
            sample_density,
            seed,
            oracle_verify,
            oracle_verify_max_n,
            jobs,
            node_budget,
            out,
        } => cmd_campaign(
            input,
            enumerate,
            sample_n,
            sample_count,
            sample_density,
            seed,
            oracle_verify,
            oracle_verify_max_n,
            jobs,
            node_budget,
            out,
        ),
    }
}
