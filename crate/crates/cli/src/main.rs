//! `orthwalk`: analyze a walk model, count its excursions, or print the
//! nodal-domain catalogs.
//!
//! Exit codes: 0 on success, 1 for usage or model-file errors, 2 when the
//! pipeline itself fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use orthwalk::counting::{count_excursions, estimate_asymptotics, CountError, CountMode, CountOptions};
use orthwalk::nodal::catalog_tsv;
use orthwalk::report::{analyze, render_text, AnalyzeOptions};
use orthwalk::{critical_point, parse_model, WalkModel};

#[derive(Parser, Debug)]
#[command(name = "orthwalk", version, about = "Orthant lattice walks: groups, nodal domains and excursion counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full analysis (everything except counting) and emit a JSON report.
    Analyze {
        model: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Human-readable summary instead of JSON.
        #[arg(long)]
        pretty: bool,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Count excursions from one point to another, as a tab-separated table.
    Count {
        model: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: Point,
        #[arg(long)]
        n: usize,
        /// Append an asymptotic fit of the counts.
        #[arg(long)]
        fit: bool,
        /// Count each path once instead of weighting it.
        #[arg(long)]
        unweighted: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the nodal-domain catalog for a dimension.
    Catalog {
        #[arg(long)]
        dim: usize,
    },
}

/// Lattice point written as comma-separated coordinates.
#[derive(Clone, Debug)]
struct Point(Vec<usize>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|part| {
            let v: i64 = part.trim().parse().map_err(|_| format!("'{part}' is not an integer"))?;
            usize::try_from(v).map_err(|_| format!("coordinate {v} is outside the orthant"))
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

enum Failure {
    Usage(String),
    Pipeline(String),
}

fn read_model(path: &Path) -> Result<WalkModel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn set_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(path: &Path, out: Option<&Path>, pretty: bool, seed: u64) -> Result<(), Failure> {
    let model = read_model(path)?;
    let report = analyze(&model, &AnalyzeOptions { seed, ..AnalyzeOptions::default() });
    let text = if pretty {
        render_text(&report)
    } else {
        let mut s = serde_json::to_string(&report).map_err(|e| Failure::Pipeline(e.to_string()))?;
        s.push('\n');
        s
    };
    emit(&text, out)?;
    if report.has_errors() {
        return Err(Failure::Pipeline("one or more report sections failed; see the report".into()));
    }
    Ok(())
}

/// Growth rate of the counts in the chosen mode: min χ for weighted
/// counts, |S|·min χ of the uniform model for plain path counts.
fn reference_rho(model: &WalkModel, mode: CountMode) -> Result<f64, Failure> {
    let target = match mode {
        CountMode::Weighted => model.clone(),
        CountMode::Unweighted => {
            WalkModel::uniform(model.dim(), model.steps().iter().map(|s| s.vector.clone()).collect())
                .map_err(|e| Failure::Pipeline(e.to_string()))?
        }
    };
    let c = critical_point(&target).map_err(|e| Failure::Pipeline(format!("critical point: {e}")))?;
    Ok(match mode {
        CountMode::Weighted => c.rho,
        CountMode::Unweighted => c.rho * model.steps().len() as f64,
    })
}

fn cmd_count(path: &Path, from: &[usize], to: &[usize], n: usize, fit: bool, unweighted: bool) -> Result<(), Failure> {
    let model = read_model(path)?;
    let mode = if unweighted { CountMode::Unweighted } else { CountMode::Weighted };
    let options = CountOptions { mode, ..CountOptions::default() };
    let table = count_excursions(&model, from, to, n, &options).map_err(|e| match e {
        CountError::BadPoint(_) => Failure::Usage(e.to_string()),
        CountError::MemoryBudget { .. } => Failure::Pipeline(e.to_string()),
    })?;
    print!("{}", table.to_tsv());
    if fit {
        let rho = reference_rho(&model, mode)?;
        let f = estimate_asymptotics(&table, rho).map_err(|e| Failure::Pipeline(format!("fit: {e}")))?;
        println!("# rho_reference\t{}", f.rho_reference);
        println!("# rho_hat\t{}", f.rho_hat);
        println!("# alpha_hat\t{}", f.alpha_hat);
        println!("# alpha_regression\t{}", f.alpha_regression);
        println!("# lattice_step\t{}", f.lattice_step);
        println!("# window\t{}..{}", f.window.0, f.window.1);
    }
    Ok(())
}

fn cmd_catalog(dim: usize) -> Result<(), Failure> {
    if dim > 4 {
        return Err(Failure::Usage("catalog limited to d ≤ 4; use analyze for general d".into()));
    }
    let table = catalog_tsv(dim).map_err(|e| Failure::Usage(e.to_string()))?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Analyze { model, out, pretty, seed, threads } => {
            set_threads(threads);
            cmd_analyze(&model, out.as_deref(), pretty, seed)
        }
        Command::Count { model, from, to, n, fit, unweighted, threads } => {
            set_threads(threads);
            cmd_count(&model, &from.0, &to.0, n, fit, unweighted)
        }
        Command::Catalog { dim } => cmd_catalog(dim),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Pipeline(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
