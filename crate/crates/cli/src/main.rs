use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use medax::mesh::MeshError;
use medax::sweep::{Execution, DEFAULT_OFFSET};
use medax::{load_mesh_file, run_sweep, AxisKind, EventDatabase, GridSpec, PruningConfig, PruningCriteria, SweepOptions};

/// Staircase approximations of the medial, mid-sphere and circum-sphere axes
/// of a closed triangulated surface.
#[derive(Parser)]
#[command(name = "medax", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a lattice and write the event database.
    Compute(ComputeArgs),
    /// Filter an event database.
    Prune(PruneArgs),
    /// Write the staircase squares of an event database as geometry.
    Export(ExportArgs),
    /// Print event and square counts per axis.
    Summary(SummaryArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Surface in OFF or OBJ format.
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_triple, allow_hyphen_values = true)]
    grid_origin: [f64; 3],
    /// Number of lattice steps along each axis.
    #[arg(long, value_name = "GX,GY,GZ", value_parser = parse_dims)]
    grid_dims: [u32; 3],
    #[arg(long)]
    spacing: f64,
    /// Shift of the origin in units of the spacing, each in [0, 1).
    #[arg(long, value_name = "FX,FY,FZ", value_parser = parse_triple)]
    offset: Option<[f64; 3]>,
    /// Comma separated subset of medial, mid, circum.
    #[arg(long, value_delimiter = ',', value_parser = parse_axis, default_value = "medial,mid,circum")]
    axes: Vec<AxisKind>,
    #[arg(long, default_value_t = 1)]
    chunks: usize,
    /// Run the chunks one after another on the calling thread.
    #[arg(long)]
    sequential: bool,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Smallest distance between the representatives of the two cells.
    #[arg(long)]
    euclidean_min: Option<f64>,
    /// Smallest premeditation and postmeditation.
    #[arg(long)]
    persistence_min: Option<f64>,
    /// Drop events whose cells share a face.
    #[arg(long)]
    face: bool,
    /// Drop events whose cells share a coface.
    #[arg(long)]
    coface: bool,
    /// Use the per-axis face and coface table instead of --face and --coface.
    #[arg(long, conflicts_with_all = ["face", "coface"])]
    standard: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Obj,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "obj")]
    format: ExportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummaryArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("bad number {p:?}"))?;
    }
    Ok(out)
}

fn parse_dims(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma separated integers, got {s:?}"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("bad integer {p:?}"))?;
        if *o == 0 {
            return Err("grid dimensions must be positive".into());
        }
    }
    Ok(out)
}

fn parse_axis(s: &str) -> Result<AxisKind, String> {
    AxisKind::parse(s).ok_or_else(|| format!("unknown axis {s:?}, expected medial, mid or circum"))
}

/// Failures that map to distinct exit statuses.
enum Failure {
    Usage(anyhow::Error),
    Mesh(MeshError),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn writer(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_database(path: &Path) -> anyhow::Result<EventDatabase> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    EventDatabase::from_json(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn compute(args: ComputeArgs) -> Result<(), Failure> {
    let mesh = match load_mesh_file(&args.mesh) {
        Ok(m) => m,
        Err(MeshError::Io(e)) => {
            return Err(anyhow::Error::new(e).context(format!("cannot read {}", args.mesh.display())).into())
        }
        Err(e) => return Err(Failure::Mesh(e)),
    };
    let grid = GridSpec::new(args.grid_origin, args.spacing, args.grid_dims).with_offset(args.offset.unwrap_or(DEFAULT_OFFSET));
    let options = SweepOptions {
        axes: args.axes.iter().copied().collect(),
        chunks: args.chunks,
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        max_live: None,
    };
    let out = run_sweep(&mesh, &grid, &options).map_err(anyhow::Error::new)?;
    log::info!(
        "{} segments, {} transpositions, {} events",
        out.stats.segments,
        out.stats.swaps,
        out.events.len()
    );
    let db = EventDatabase::new(&mesh, grid, options.axes, out.events);
    let mut out = writer(args.out.as_deref())?;
    db.write(&mut out).map_err(anyhow::Error::new)?;
    out.flush().map_err(anyhow::Error::new)?;
    Ok(())
}

fn prune(args: PruneArgs) -> anyhow::Result<()> {
    let db = read_database(&args.input)?;
    let config = if args.standard {
        PruningConfig::standard(args.euclidean_min, args.persistence_min)
    } else {
        PruningConfig::uniform(PruningCriteria {
            euclidean_min: args.euclidean_min,
            face: args.face,
            coface: args.coface,
            persistence_min: args.persistence_min,
        })
    };
    let pruned = db.prune(&config);
    log::info!("{} of {} events survive", pruned.events.len(), db.events.len());
    let mut out = writer(args.out.as_deref())?;
    pruned.write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn export(args: ExportArgs) -> anyhow::Result<()> {
    let db = read_database(&args.input)?;
    match args.format {
        ExportFormat::Obj => {
            let mut out = writer(args.out.as_deref())?;
            db.write_staircase_obj(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn summary(args: SummaryArgs) -> anyhow::Result<()> {
    let db = read_database(&args.input)?;
    let approx = db.approximation();
    let h = &db.header;
    println!("mesh {}", h.mesh_checksum);
    println!("grid dims {:?} spacing {} origin {:?} offset {:?}", h.grid.dims, h.grid.spacing, h.grid.origin, h.grid.offset);
    println!("pruning passes {}", h.pruning.len());
    for kind in AxisKind::ALL {
        println!("{:<7} events {:>8} squares {:>8}", kind.name(), db.count(kind), approx.count(kind));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            if !e.to_string().contains("Usage:") {
                use clap::CommandFactory;
                let mut cmd = Cli::command();
                cmd.build();
                let sub = std::env::args().nth(1).and_then(|name| cmd.find_subcommand(&name).cloned());
                let mut usage = sub.unwrap_or(cmd);
                eprintln!("\n{}", usage.render_usage());
            }
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Prune(a) => prune(a).map_err(Failure::from),
        Command::Export(a) => export(a).map_err(Failure::from),
        Command::Summary(a) => summary(a).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Mesh(MeshError::Validation(diags))) => {
            eprintln!("error: not a closed surface");
            for d in diags {
                eprintln!("  {d}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Mesh(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
