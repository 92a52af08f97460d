//! Command-line front end for the hymse Darcy flow solver.
//!
//! Subcommands: `solve` (one configuration, run report), `sweep` (h/p
//! convergence, CSV plus gnuplot script), `sparsity` (matrix pattern
//! export), `cond` (Schur complement conditioning), `dof-table` (system
//! size tables) and `defaults` (printable default configuration).
//!
//! Exit codes: 0 success, 2 configuration error, 3 mesh degeneracy,
//! 4 solver failure. Every failure prints a single stderr line of the form
//! `error[<category>]: <message>`.

mod config;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use hymse::assembly::{assemble_all_locals, assemble_global};
use hymse::mesh::{Deformation, Mesh, MeshConfig};
use hymse::polybasis::BasisSet1D;
use hymse::solver::{condition_number, solve_schur_with, CondMethod, SchurMethod};
use hymse::topology::{connectivity_en, incidence_e21, LocalDofLayout};
use hymse::verification::{
    records_to_csv, run_case, run_convergence, sample_solution, RunSetup, SweepPlan,
};

use config::{MeshChoice, RunConfig};
use report::{CondRow, SweepKind};

#[derive(Debug)]
enum CliError {
    Config(String),
    Lib(hymse::Error),
}

impl CliError {
    fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Lib(e) => e.category(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "mesh-degeneracy" => 3,
            _ => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

impl From<hymse::Error> for CliError {
    fn from(e: hymse::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hymse",
    version,
    about = "Hybrid mimetic spectral element solver for 2D Darcy flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value configuration file, applied before flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Elements per direction.
    #[arg(long, num_args = 2, value_names = ["KX", "KY"])]
    k: Option<Vec<String>>,
    /// Polynomial degree N.
    #[arg(long, value_name = "N")]
    degree: Option<String>,
    /// Quadrature points per direction, or "auto" for N + 4.
    #[arg(long, value_name = "Q")]
    quad: Option<String>,
    /// Mesh kind: orthogonal, curved, or both (sweeps only).
    #[arg(long)]
    mesh: Option<String>,
    /// Amplitude c of the sinusoidal mesh deformation.
    #[arg(long, value_name = "C")]
    curve_amp: Option<String>,
    /// Regularization constant in the permeability tensor.
    #[arg(long)]
    alpha: Option<String>,
    /// Worker threads for element-parallel stages (0 = all cores).
    #[arg(long, value_name = "T")]
    threads: Option<String>,
    /// Output directory for report files.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

impl CommonArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult {
        if let Some(path) = &self.config {
            cfg.apply_file(path).map_err(CliError::Config)?;
        }
        if let Some(k) = &self.k {
            cfg.set("kx", &k[0]).map_err(CliError::Config)?;
            cfg.set("ky", &k[1]).map_err(CliError::Config)?;
        }
        let pairs = [
            ("degree", &self.degree),
            ("quad", &self.quad),
            ("mesh", &self.mesh),
            ("curve_amp", &self.curve_amp),
            ("alpha", &self.alpha),
            ("threads", &self.threads),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v).map_err(CliError::Config)?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Source field: herbin or zero.
    #[arg(long)]
    source: Option<String>,
    /// Solution path: monolithic, schur, or both.
    #[arg(long)]
    path: Option<String>,
    /// Multiplier solve inside the hybrid path: direct or cg.
    #[arg(long)]
    schur_method: Option<String>,
    /// Sample fields on an M x M grid per element into fields.csv.
    #[arg(long, value_name = "M")]
    sample_grid: Option<String>,
    /// Report the spectral condition number of the Schur complement.
    #[arg(long)]
    cond: bool,
    /// Report timing columns as zero, for byte-reproducible output.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep kind: h (mesh refinement) or p (degree refinement).
    #[arg(long, value_name = "KIND")]
    sweep: Option<String>,
    /// Comma-separated elements-per-direction list (square grids).
    #[arg(long, value_name = "LIST")]
    k_list: Option<String>,
    /// Comma-separated polynomial degree list.
    #[arg(long, value_name = "LIST")]
    degree_list: Option<String>,
    /// Solution path: monolithic, schur, or both.
    #[arg(long)]
    path: Option<String>,
    /// Add the Schur condition number column to the CSV.
    #[arg(long)]
    cond: bool,
    /// Report timing columns as zero, for byte-reproducible output.
    #[arg(long)]
    no_timings: bool,
    /// Print a static report instead of sweeping (dof-table).
    #[arg(long, value_name = "WHAT")]
    report: Option<String>,
}

#[derive(Args)]
struct SparsityArgs {
    /// Operator to export: global, e21, or en.
    #[arg(long, default_value = "global")]
    operator: String,
}

#[derive(Args)]
struct CondArgs {
    /// Comma-separated polynomial degree list.
    #[arg(long, value_name = "LIST", default_value = "4,5,6,7")]
    degree_list: String,
    /// Estimator: dense, iterative, or both.
    #[arg(long, default_value = "both")]
    method: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write a run report.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Run an h- or p-convergence sweep; write CSV and a gnuplot script.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: SweepArgs,
    },
    /// Export a matrix sparsity pattern as 0-based coordinate triplets.
    Sparsity {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: SparsityArgs,
    },
    /// Tabulate the Schur complement condition number over degrees.
    Cond {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: CondArgs,
    },
    /// Print the system-size tables for 2D and 3D grids.
    DofTable,
    /// Print the default configuration as a parsable config file.
    Defaults,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            let first_line = e.to_string().lines().next().unwrap_or("bad usage").to_string();
            eprintln!("error[config]: {first_line}");
            std::process::exit(2);
        }
    };
    let result = match &cli.command {
        Command::Solve { common, args } => cmd_solve(common, args),
        Command::Sweep { common, args } => cmd_sweep(common, args),
        Command::Sparsity { common, args } => cmd_sparsity(common, args),
        Command::Cond { common, args } => cmd_cond(common, args),
        Command::DofTable => {
            print!("{}", report::dof_tables());
            Ok(())
        }
        Command::Defaults => {
            print!("{}", RunConfig::default().to_config_text());
            Ok(())
        }
    };
    if let Err(err) = result {
        let message: String = err.message().lines().collect::<Vec<_>>().join("; ");
        eprintln!("error[{}]: {message}", err.category());
        std::process::exit(err.exit_code());
    }
}

/// Run a closure inside a rayon pool of the requested size (0 = default).
fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn create_out_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn make_basis(degree: usize, quad: Option<usize>) -> hymse::Result<BasisSet1D> {
    match quad {
        Some(q) => BasisSet1D::with_quadrature(degree, q),
        None => BasisSet1D::new(degree),
    }
}

fn build_mesh(cfg: &RunConfig, deformation: Deformation) -> hymse::Result<Mesh> {
    Mesh::build(MeshConfig::unit_square(cfg.kx, cfg.ky, deformation))
}

fn parse_usize_list(text: &str) -> CliResult<Vec<usize>> {
    let items: Result<Vec<usize>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect();
    match items {
        Ok(list) if !list.is_empty() => Ok(list),
        _ => Err(CliError::Config(format!(
            "invalid list '{text}' (expected comma-separated positive integers)"
        ))),
    }
}

fn cmd_solve(common: &CommonArgs, args: &SolveArgs) -> CliResult {
    let mut cfg = RunConfig::default();
    common.apply(&mut cfg)?;
    let overrides = [
        ("source", &args.source),
        ("path", &args.path),
        ("schur_method", &args.schur_method),
        ("sample_grid", &args.sample_grid),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v).map_err(CliError::Config)?;
        }
    }
    if args.cond {
        cfg.cond = true;
    }
    if args.no_timings {
        cfg.timings = false;
    }

    let deformation = cfg.mesh.single(cfg.curve_amp).map_err(CliError::Config)?;
    let setup = RunSetup {
        kx: cfg.kx,
        ky: cfg.ky,
        degree: cfg.degree,
        quad: cfg.quad,
        deformation,
        alpha: cfg.alpha,
        case: cfg.source,
        path: cfg.path,
        schur_method: cfg.schur_method,
        compute_cond: cfg.cond,
        timings: cfg.timings,
    };
    let outcome = with_pool(cfg.threads, || run_case(&setup))??;

    let out = Path::new(&cfg.out);
    create_out_dir(out)?;
    let text = report::run_report(&cfg, deformation.label(), &outcome);
    print!("{text}");
    write_file(&out.join("report.txt"), &text)?;
    println!("wrote {}", out.join("report.txt").display());

    if cfg.sample_grid > 0 {
        let basis = make_basis(cfg.degree, cfg.quad)?;
        let mesh = build_mesh(&cfg, deformation)?;
        let case = cfg.source.build(cfg.alpha);
        let samples = sample_solution(&outcome.fields, &mesh, &basis, &case, cfg.sample_grid);
        write_file(&out.join("fields.csv"), &report::samples_to_csv(&samples))?;
        println!("wrote {}", out.join("fields.csv").display());
    }
    Ok(())
}

fn cmd_sweep(common: &CommonArgs, args: &SweepArgs) -> CliResult {
    if let Some(what) = &args.report {
        if what == "dof-table" {
            print!("{}", report::dof_tables());
            return Ok(());
        }
        return Err(CliError::Config(format!(
            "unknown report '{what}' (expected dof-table)"
        )));
    }
    let kind_text = args.sweep.as_deref().ok_or_else(|| {
        CliError::Config("--sweep h|p is required (or use --report dof-table)".to_string())
    })?;
    let kind = SweepKind::parse(kind_text).map_err(CliError::Config)?;

    let mut cfg = RunConfig::default();
    cfg.mesh = MeshChoice::Both;
    cfg.path = hymse::solver::SolverPath::Schur;
    common.apply(&mut cfg)?;
    if let Some(v) = &args.path {
        cfg.set("path", v).map_err(CliError::Config)?;
    }
    if args.cond {
        cfg.cond = true;
    }
    if args.no_timings {
        cfg.timings = false;
    }

    let ks = match &args.k_list {
        Some(text) => parse_usize_list(text)?,
        None => match kind {
            SweepKind::H => vec![2, 4, 8, 16],
            SweepKind::P => vec![3],
        },
    };
    let degrees = match &args.degree_list {
        Some(text) => parse_usize_list(text)?,
        None => match kind {
            SweepKind::H => vec![3],
            SweepKind::P => (2..=8).collect(),
        },
    };
    let plan = SweepPlan {
        ks,
        degrees,
        deformations: cfg.mesh.deformations(cfg.curve_amp),
        alpha: cfg.alpha,
        quad: cfg.quad,
        path: cfg.path,
        compute_cond: cfg.cond,
        timings: cfg.timings,
    };
    let records = with_pool(cfg.threads, || run_convergence(&plan))?;

    let out = Path::new(&cfg.out);
    create_out_dir(out)?;
    write_file(&out.join("sweep.csv"), &records_to_csv(&records))?;
    write_file(&out.join("sweep.gp"), &report::gnuplot_script(kind, "sweep.csv"))?;
    println!("{}", report::sweep_summary(&records));
    println!("wrote {}", out.join("sweep.csv").display());
    println!("wrote {}", out.join("sweep.gp").display());
    Ok(())
}

fn cmd_sparsity(common: &CommonArgs, args: &SparsityArgs) -> CliResult {
    let mut cfg = RunConfig::default();
    common.apply(&mut cfg)?;
    let deformation = cfg.mesh.single(cfg.curve_amp).map_err(CliError::Config)?;
    let out = Path::new(&cfg.out);
    create_out_dir(out)?;
    let layout = LocalDofLayout::new(cfg.degree)?;

    match args.operator.as_str() {
        "global" => {
            let global = with_pool(cfg.threads, || -> hymse::Result<_> {
                let basis = make_basis(cfg.degree, cfg.quad)?;
                let mesh = build_mesh(&cfg, deformation)?;
                let case = cfg.source.build(cfg.alpha);
                let locals = assemble_all_locals(&mesh, &basis, &case.problem)?;
                let e21 = incidence_e21(cfg.degree)?;
                let en = connectivity_en(&mesh, cfg.degree)?;
                assemble_global(&mesh, &basis, &locals, &e21, &en)
            })??;
            let path = out.join("global.txt");
            let mut buf = Vec::new();
            global
                .matrix
                .write_coordinate(&mut buf)
                .map_err(|e| CliError::Config(format!("cannot serialize matrix: {e}")))?;
            std::fs::write(&path, &buf)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            println!("operator=global");
            println!("rows={}", global.matrix.nrows());
            println!("cols={}", global.matrix.ncols());
            println!("nnz={}", global.matrix.nnz());
            println!("n_elements={}", global.num_elements);
            println!("n_local={}", global.n_loc);
            println!("n_velocity={}", global.n_u);
            println!("n_pressure={}", global.n_p);
            println!("lambda_offset={}", global.num_elements * global.n_loc);
            println!("n_lambda={}", global.n_lambda);
            println!("wrote {}", path.display());
        }
        "e21" => {
            let m = incidence_e21(cfg.degree)?;
            let path = out.join("e21.txt");
            write_file(&path, &report::int_matrix_triplets(&m))?;
            println!("operator=e21");
            println!("rows={}", m.nrows());
            println!("cols={}", m.ncols());
            println!("nnz={}", m.entries().len());
            println!("n_velocity={}", layout.n_u());
            println!("n_pressure={}", layout.n_p());
            println!("wrote {}", path.display());
        }
        "en" => {
            let mesh = build_mesh(&cfg, deformation)?;
            let m = connectivity_en(&mesh, cfg.degree)?;
            let path = out.join("en.txt");
            write_file(&path, &report::int_matrix_triplets(&m))?;
            println!("operator=en");
            println!("rows={}", m.nrows());
            println!("cols={}", m.ncols());
            println!("nnz={}", m.entries().len());
            println!("n_elements={}", cfg.kx * cfg.ky);
            println!("n_local={}", layout.n_loc());
            println!("n_lambda={}", m.nrows());
            println!("wrote {}", path.display());
        }
        other => {
            return Err(CliError::Config(format!(
                "invalid operator '{other}' (expected global, e21 or en)"
            )));
        }
    }
    Ok(())
}

fn cmd_cond(common: &CommonArgs, args: &CondArgs) -> CliResult {
    let mut cfg = RunConfig::default();
    cfg.kx = 9;
    cfg.ky = 9;
    cfg.mesh = MeshChoice::Curved;
    common.apply(&mut cfg)?;
    let degrees = parse_usize_list(&args.degree_list)?;
    let (want_dense, want_iter) = match args.method.as_str() {
        "dense" => (true, false),
        "iterative" => (false, true),
        "both" => (true, true),
        other => {
            return Err(CliError::Config(format!(
                "invalid method '{other}' (expected dense, iterative or both)"
            )));
        }
    };
    let deformation = cfg.mesh.single(cfg.curve_amp).map_err(CliError::Config)?;

    let rows = with_pool(cfg.threads, || -> hymse::Result<Vec<CondRow>> {
        let mut rows = Vec::with_capacity(degrees.len());
        for &degree in &degrees {
            let basis = make_basis(degree, cfg.quad)?;
            let mesh = build_mesh(&cfg, deformation)?;
            let case = cfg.source.build(cfg.alpha);
            let locals = assemble_all_locals(&mesh, &basis, &case.problem)?;
            let en = connectivity_en(&mesh, degree)?;
            let solution = solve_schur_with(&locals, &en, SchurMethod::Direct)?;
            let m = solution.schur.matrix();
            let dense = if want_dense {
                Some(condition_number(m, CondMethod::DenseEigen)?)
            } else {
                None
            };
            let iterative = if want_iter {
                Some(condition_number(m, CondMethod::Iterative)?)
            } else {
                None
            };
            rows.push(CondRow {
                degree,
                n_lambda: m.nrows(),
                dense,
                iterative,
            });
        }
        Ok(rows)
    })??;

    let out = Path::new(&cfg.out);
    create_out_dir(out)?;
    println!(
        "Schur complement conditioning, K = {} x {}, mesh = {} (c = {}):",
        cfg.kx,
        cfg.ky,
        deformation.label(),
        deformation.amplitude(),
    );
    print!("{}", report::cond_table(&rows));
    write_file(&out.join("cond.csv"), &report::cond_csv(&rows))?;
    println!("wrote {}", out.join("cond.csv").display());
    Ok(())
}
