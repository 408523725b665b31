//! Command-line front end: analyze matrices or patterns, run exhaustive
//! scans, generate the layered counterexample family, export DOT graphs and
//! estimate random consistency indices.
//!
//! Exit codes: 0 when every requested check passes (or none applies), 2 when
//! some weighting method contradicts a stated preference, 1 on errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use loplab::{
    check_lop_edges, em_complete, estimate_random_index, family_gap_closed_form,
    family_gap_via_reduced_system, generate_family, llsm_exact, llsm_exact_digraph, llsm_float,
    llsm_objective, realize, run_search, DagPattern, FamilyParams, GeneralPcm, LopReport, Method,
    SearchTask, Weights,
};
use report::{AnalysisReport, CrReport, EmSection, InputEcho, LlsmSection, SearchReport, SCHEMA};

#[derive(Parser)]
#[command(name = "loplab", version, about = "Weights and order preservation for incomplete pairwise comparison matrices")]
struct Cli {
    /// Worker threads for scans (default: all cores, or LOPLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute weights for a matrix or pattern file and check order preservation.
    Analyze(AnalyzeArgs),
    /// Scan all patterns of a given size for order violations or intensity-dependent rankings.
    Search(SearchArgs),
    /// Generate the layered two-head counterexample family.
    Family(FamilyArgs),
    /// Render a pattern file as a DOT digraph.
    ExportDot { file: PathBuf },
    /// Estimate the mean dominant eigenvalue of random matrices.
    RandomIndex(RandomIndexArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Em,
    Llsm,
    Both,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix file (rows of numbers, fractions or `*`) or pattern file
    /// (vertex count, then `i j` edge lines).
    file: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Preference intensity used to realize a pattern (default 2).
    #[arg(long)]
    b: Option<f64>,
    /// Include exact rational coefficients (default for ordinal input).
    #[arg(long)]
    rational: bool,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Monte Carlo samples for the consistency-ratio denominator.
    #[arg(long, default_value_t = 1000)]
    ri_samples: usize,
    /// Seed for the consistency-ratio estimate.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Edge-count range `min..max` (inclusive), e.g. `10..10`.
    #[arg(long)]
    edges: Option<String>,
    /// Comma-separated intensity grid for eigenvector scans (default 2..9).
    #[arg(long)]
    b_grid: Option<String>,
    /// Count only ranking flips on compared pairs.
    #[arg(long)]
    edges_only: bool,
    /// Stream hits to this JSON-lines file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Journal file of completed id ranges; if it exists, those ranges are
    /// skipped and the hit file is merged instead of recomputed.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Pattern,
    Matrix,
    Dot,
}

#[derive(Args)]
struct FamilyArgs {
    /// Cluster size (k >= 1).
    #[arg(long)]
    k: usize,
    /// Cluster count (m >= 2).
    #[arg(long)]
    m: usize,
    /// Intensity for matrix output.
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    #[arg(long, value_enum, default_value = "pattern")]
    emit: EmitArg,
    /// Also print the head weight gap by all three routes.
    #[arg(long)]
    gap: bool,
}

#[derive(Args)]
struct RandomIndexArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let threads = flag.or_else(|| {
        std::env::var("LOPLAB_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn run(command: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Search(args) => cmd_search(args).map(|_| ExitCode::SUCCESS),
        Command::Family(args) => cmd_family(args).map(|_| ExitCode::SUCCESS),
        Command::ExportDot { file } => {
            let pattern = DagPattern::parse(&std::fs::read_to_string(file)?)?;
            print!("{}", pattern.to_dot());
            Ok(ExitCode::SUCCESS)
        }
        Command::RandomIndex(args) => {
            let estimate = estimate_random_index(args.n, args.samples, args.seed)?;
            println!(
                "random index (n = {}, samples = {}, seed = {}): {estimate:.6} (excess over n: {:.6})",
                args.n,
                args.samples,
                args.seed,
                estimate - args.n as f64
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// What an input file turned out to contain.
struct AnalyzeInput {
    matrix: GeneralPcm,
    echo: InputEcho,
    /// Preference digraph edges when the input is ordinal.
    edges: Option<Vec<(usize, usize)>>,
    /// LOP applies: ordinal and acyclic.
    lop_applies: bool,
}

fn load_input(args: &AnalyzeArgs) -> Result<AnalyzeInput, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(&args.file)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let is_pattern = first.split_whitespace().count() == 1 && first.parse::<usize>().is_ok();

    if is_pattern {
        let pattern = DagPattern::parse(&text)?;
        let b = args.b.unwrap_or(2.0);
        let matrix = realize(&pattern, b)?;
        let edges = pattern.edges();
        Ok(AnalyzeInput {
            echo: InputEcho {
                kind: "pattern".into(),
                n: pattern.n(),
                edges: edges.clone(),
                known_pairs: pattern.edge_count(),
                b: Some(b),
                has_linear_order: Some(true),
            },
            matrix,
            edges: Some(edges),
            lop_applies: true,
        })
    } else {
        let matrix = GeneralPcm::parse(&text)?;
        // Ordinal when all known entries are {b, 1/b} for one b > 1; use the
        // given --b or infer it from the largest entry.
        let inferred = args.b.or_else(|| {
            matrix
                .known_pairs()
                .filter_map(|(i, j)| matrix.entry_f64(i, j))
                .map(|v| v.max(1.0 / v))
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
                .filter(|&v| v > 1.0)
        });
        let edges = inferred.and_then(|b| matrix.ordinal_edges(b).ok());
        let has_linear_order = match (&edges, inferred) {
            (Some(_), Some(b)) => Some(matrix.linear_order_permutation(b)?.is_some()),
            _ => None,
        };
        let lop_applies = edges.is_some() && has_linear_order == Some(true);
        Ok(AnalyzeInput {
            echo: InputEcho {
                kind: "matrix".into(),
                n: matrix.n(),
                edges: edges.clone().unwrap_or_default(),
                known_pairs: matrix.known_pair_count(),
                b: edges.as_ref().map(|_| inferred.unwrap()),
                has_linear_order,
            },
            matrix,
            edges,
            lop_applies,
        })
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let started = Instant::now();
    let input = load_input(&args)?;
    let n = input.matrix.n();
    let run_llsm = matches!(args.method, MethodArg::Llsm | MethodArg::Both);
    let run_em = matches!(args.method, MethodArg::Em | MethodArg::Both);

    let lop_of = |w: &Weights| -> Option<LopReport> {
        input
            .lop_applies
            .then(|| check_lop_edges(input.edges.as_ref().unwrap(), w))
    };

    let llsm = if run_llsm {
        let weights = llsm_float(&input.matrix)?;
        let coeffs = match &input.edges {
            Some(edges) if !edges.is_empty() => {
                Some(llsm_exact_digraph(n, edges)?.coeffs().iter().map(|c| c.to_string()).collect())
            }
            _ if args.rational => {
                return Err(
                    "rational coefficients need ordinal input (a pattern, or a matrix with entries in {b, 1/b})"
                        .into(),
                )
            }
            _ => None,
        };
        let lop = lop_of(&weights);
        let gap = input.lop_applies.then(|| {
            input
                .edges
                .as_ref()
                .unwrap()
                .iter()
                .map(|&(i, j)| weights.get(i) - weights.get(j))
                .fold(f64::INFINITY, f64::min)
        });
        Some(LlsmSection {
            objective: llsm_objective(&input.matrix, &weights),
            weights: weights.as_slice().to_vec(),
            coeffs,
            lop,
            gap,
        })
    } else {
        None
    };

    let em = if run_em {
        let completion = em_complete(&input.matrix, 1e-12)?;
        let weights = completion.perron.weights.clone();
        let (random_index, samples) = if n >= 3 {
            (estimate_random_index(n, args.ri_samples, args.seed)?, args.ri_samples)
        } else {
            (2.0, 0) // 2x2 matrices are always consistent
        };
        let excess = random_index - n as f64;
        let cr_value = if excess > 0.0 {
            (completion.lambda_max - n as f64) / excess
        } else {
            0.0
        };
        let lop = lop_of(&weights);
        Some(EmSection {
            weights: weights.as_slice().to_vec(),
            lambda_max: completion.lambda_max,
            filled: completion.filled.iter().map(|&((i, j), v)| (i, j, v)).collect(),
            completion_sweeps: completion.sweeps,
            cr: CrReport {
                value: cr_value,
                random_index,
                samples,
                seed: args.seed,
                note: "CR < 0.1 is the conventional acceptability reading; reported, not enforced"
                    .into(),
            },
            lop,
        })
    } else {
        None
    };

    let mut methods = Vec::new();
    if run_llsm {
        methods.push("llsm".to_string());
    }
    if run_em {
        methods.push("em".to_string());
    }
    let lop_satisfied = llsm.iter().flat_map(|s| s.lop.iter()).all(|r| r.satisfied)
        && em.iter().flat_map(|s| s.lop.iter()).all(|r| r.satisfied);
    let report = AnalysisReport {
        schema: SCHEMA,
        input: input.echo,
        methods,
        llsm,
        em,
        lop_satisfied,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_analysis_text(&report);
    }
    Ok(if report.lop_satisfied { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn print_analysis_text(report: &AnalysisReport) {
    let echo = &report.input;
    println!(
        "input: {} with n = {}, {} known comparisons{}",
        echo.kind,
        echo.n,
        echo.known_pairs,
        echo.b.map(|b| format!(", b = {b}")).unwrap_or_default()
    );
    if let Some(llsm) = &report.llsm {
        println!("log least squares:");
        println!("  weights: {}", format_weights(&llsm.weights));
        if let Some(coeffs) = &llsm.coeffs {
            println!("  exact coefficients of log b: [{}]", coeffs.join(", "));
        }
        println!("  objective: {:.6e}", llsm.objective);
        if let Some(lop) = &llsm.lop {
            print_lop("  ", lop);
        }
        if let Some(gap) = llsm.gap {
            println!("  worst edge gap: {gap:.6e}");
        }
    }
    if let Some(em) = &report.em {
        println!("eigenvector method:");
        println!("  weights: {}", format_weights(&em.weights));
        println!("  lambda_max: {:.12} (n = {})", em.lambda_max, echo.n);
        if !em.filled.is_empty() {
            println!(
                "  completion filled {} pairs in {} sweeps",
                em.filled.len(),
                em.completion_sweeps
            );
        }
        println!(
            "  CR: {:.6} (random index {:.4}, {} samples, seed {}; {})",
            em.cr.value, em.cr.random_index, em.cr.samples, em.cr.seed, em.cr.note
        );
        if let Some(lop) = &em.lop {
            print_lop("  ", lop);
        }
    }
    println!(
        "linear order preservation: {}",
        if report.lop_satisfied { "satisfied" } else { "VIOLATED" }
    );
}

fn format_weights(w: &[f64]) -> String {
    let cells: Vec<String> = w.iter().map(|v| format!("{v:.6}")).collect();
    format!("[{}]", cells.join(", "))
}

fn print_lop(indent: &str, lop: &LopReport) {
    let ranking: Vec<String> = lop
        .ranking
        .iter()
        .map(|group| {
            let cells: Vec<String> = group.iter().map(|v| v.to_string()).collect();
            if cells.len() == 1 {
                cells[0].clone()
            } else {
                format!("{{{}}}", cells.join(" "))
            }
        })
        .collect();
    println!("{indent}ranking: {}", ranking.join(" > "));
    if lop.violations.is_empty() {
        println!("{indent}order preserved on all compared pairs");
    } else {
        let cells: Vec<String> =
            lop.violations.iter().map(|(i, j)| format!("({i}, {j})")).collect();
        println!("{indent}violated preferences: {}", cells.join(", "));
    }
}

fn parse_edge_range(text: &str) -> Result<(usize, usize), Box<dyn std::error::Error>> {
    let (lo, hi) = text.split_once("..").ok_or("edge range must look like `min..max`")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn cmd_search(args: SearchArgs) -> Result<(), Box<dyn std::error::Error>> {
    let started = Instant::now();
    let method = match args.method {
        MethodArg::Llsm => Method::Llsm,
        MethodArg::Em => Method::Em,
        MethodArg::Both => return Err("search runs one method at a time".into()),
    };
    let b_grid = match &args.b_grid {
        Some(text) => text
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()?,
        None => SearchTask::default_b_grid(),
    };
    let mut task = match method {
        Method::Llsm => SearchTask::llsm(args.n),
        Method::Em => SearchTask::em(args.n, b_grid.clone()),
    };
    task.edges_only = args.edges_only;
    if let Some(range) = &args.edges {
        task.edge_range = Some(parse_edge_range(range)?);
    }
    let output = run_search(&task, args.out.as_deref(), args.resume.as_deref())?;
    let report = SearchReport {
        schema: SCHEMA,
        n: args.n,
        method: match method {
            Method::Llsm => "llsm".into(),
            Method::Em => "em".into(),
        },
        edges: task.edge_range,
        b_grid: if method == Method::Em { b_grid } else { Vec::new() },
        scanned: output.summary.scanned,
        connected: output.summary.connected,
        hits: output.summary.hits,
        min_edge_count: output.summary.min_edge_count,
        isomorphism_classes: loplab::search::isomorphism_classes(&output.hits),
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "scanned {} patterns ({} connected): {} hits ({} up to relabeling){}",
            report.scanned,
            report.connected,
            report.hits,
            report.isomorphism_classes,
            report
                .min_edge_count
                .map(|m| format!(", fewest comparisons in a hit: {m}"))
                .unwrap_or_default()
        );
        if let Some(out) = &args.out {
            println!("hits written to {}", out.display());
        }
    }
    Ok(())
}

fn cmd_family(args: FamilyArgs) -> Result<(), Box<dyn std::error::Error>> {
    let params = FamilyParams::new(args.k, args.m)?;
    let pattern = generate_family(&params);
    match args.emit {
        EmitArg::Pattern => print!("{}", pattern.render()),
        EmitArg::Matrix => print!("{}", realize(&pattern, args.b)?.render()),
        EmitArg::Dot => print!("{}", pattern.to_dot()),
    }
    if args.gap {
        let closed = family_gap_closed_form(&params);
        let reduced = family_gap_via_reduced_system(&params)?;
        let full = llsm_exact(&pattern)?.gap(1, 2);
        println!("# head gap (y_1 - y_2) / log b");
        println!("# closed form:    {closed} ({:.6})", closed.to_f64().unwrap_or(f64::NAN));
        println!("# reduced system: {reduced}");
        println!("# full solve:     {full}");
        if closed != reduced || closed != full {
            return Err("gap routes disagree".into());
        }
    }
    Ok(())
}
