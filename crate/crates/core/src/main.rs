use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use algsolv::pipeline::{self, mtx, CertifyConfig, Format, Status};
use algsolv::polyring::{certification_point, parse_point, parse_rational, DerivationParams, Point};

#[derive(Parser)]
#[command(name = "algsolv", version, about = "Certify algebraic solvability of the prolonged adjoint system")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Viscosity ν (exact rational).
    #[arg(long, default_value = "1", value_parser = parse_nu)]
    nu: DerivationParams,
    /// Evaluation point `e,s,x1,x2,x3`.
    #[arg(long, value_parser = parse_pt)]
    point: Option<Point>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "polymtx")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Print the counting functions E, F, G, H.
    Counts {
        #[arg(long, default_value_t = 19)]
        max: u32,
    },
    /// Print the pressure-free system.
    DumpSystem {
        #[arg(long, default_value = "1", value_parser = parse_nu)]
        nu: DerivationParams,
    },
    /// Build and write the prolonged matrix.
    Build {
        #[arg(long, default_value_t = 19)]
        levels: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full certification and write certificate.json.
    Certify {
        #[arg(long, default_value_t = 19)]
        levels: u32,
        /// Level of the sub-selection fed to the decomposition.
        #[arg(long, default_value_t = 15)]
        sub_level: u32,
        /// Prime(s) for exact elimination, tried in order.
        #[arg(long = "prime")]
        primes: Vec<u64>,
        /// Skip the rank of the square overdetermined block.
        #[arg(long)]
        skip_square_rank: bool,
        /// Also record a floating-point LU rank.
        #[arg(long)]
        float_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Spy plot (.svg or .pgm) of a Matrix Market file or of L0 / P0.
    Spy {
        /// Matrix Market input; otherwise the matrix is built.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "p0")]
        matrix: Which,
        #[arg(long, default_value_t = 19)]
        levels: u32,
        #[arg(long, default_value_t = 15)]
        sub_level: u32,
        #[arg(long, default_value_t = 1000)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_pt)]
        point: Option<Point>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Polymtx,
    Mtx,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    L0,
    P0,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Polymtx => Format::Polymtx,
            FormatArg::Mtx => Format::Mtx,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_nu(s: &str) -> Result<DerivationParams, String> {
    let nu = parse_rational(s).map_err(|e| e.to_string())?;
    DerivationParams::new(nu).map_err(|e| e.to_string())
}

fn parse_pt(s: &str) -> Result<Point, String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, pipeline::PipelineError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Counts { max } => pipeline::cmd_counts(max, &mut out)?,
        Command::DumpSystem { nu } => pipeline::cmd_dump_system(&nu, &mut out)?,
        Command::Build { levels, common } => {
            let point = common.point.unwrap_or_else(certification_point);
            let (path, meta) = pipeline::cmd_build(levels, &common.nu, &point, common.format.into(), &common.out_dir)?;
            writeln!(out, "{}: {}x{}, {} symbolic / {} evaluated nonzeros", path.display(), meta.rows, meta.cols, meta.nnz_symbolic, meta.nnz_evaluated)?;
        }
        Command::Certify { levels, sub_level, primes, skip_square_rank, float_check, common } => {
            let mut cfg = CertifyConfig {
                levels,
                sub_level,
                params: common.nu.clone(),
                point: common.point.unwrap_or_else(certification_point),
                square_block_rank: !skip_square_rank,
                float_check,
                ..CertifyConfig::default()
            };
            if !primes.is_empty() {
                cfg.primes = primes;
            }
            let run = pipeline::cmd_certify(&cfg, common.format.into(), &common.out_dir)?;
            let cert = &run.certificate;
            for c in &cert.checks {
                let tag = match c.status {
                    Status::Pass => "pass",
                    Status::Warn => "WARN",
                    Status::Fail => "FAIL",
                };
                writeln!(out, "{tag:4} {:28} expected {} | actual {}", c.name, c.expected, c.actual)?;
            }
            for e in &cert.errors {
                writeln!(out, "error in {}: {}", e.stage, e.message)?;
            }
            writeln!(out, "{}", if cert.passed { "CERTIFIED" } else { "NOT CERTIFIED" })?;
            return Ok(if cert.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Spy { input, matrix, levels, sub_level, size, out: path, point } => {
            let raster = match input {
                Some(file) => {
                    let data = mtx::read_matrix_market(io::BufReader::new(std::fs::File::open(&file)?))?;
                    let title = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    let pos = data.entries.iter().filter(|e| e.2 != 0.0).map(|&(i, j, _)| (i, j));
                    pipeline::cmd_spy(data.nrows, data.ncols, pos, &title, size, &path)?
                }
                None => {
                    let cfg = CertifyConfig {
                        levels,
                        sub_level,
                        point: point.unwrap_or_else(certification_point),
                        ranks: false,
                        ..CertifyConfig::default()
                    };
                    let run = pipeline::run(&cfg);
                    let ev = run.evaluated.as_ref().ok_or_else(|| stage_failure(&run.certificate))?;
                    match matrix {
                        Which::L0 => {
                            let m = &ev.matrix;
                            pipeline::cmd_spy(m.nrows(), m.ncols(), m.entries().map(|(i, j, _)| (i, j)), "L0", size, &path)?
                        }
                        Which::P0 => {
                            let p0 = run.p0.as_ref().ok_or_else(|| stage_failure(&run.certificate))?;
                            pipeline::cmd_spy(p0.nrows(), p0.ncols(), p0.entries().map(|(i, j, _)| (i, j)), "P0", size, &path)?
                        }
                    }
                }
            };
            writeln!(out, "{}: {}x{}, nz = {}", path.display(), raster.nrows, raster.ncols, raster.nnz)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn stage_failure(cert: &pipeline::Certificate) -> pipeline::PipelineError {
    let e = cert.errors.first();
    pipeline::PipelineError::Stage {
        stage: e.map_or("pipeline".into(), |e| e.stage.clone()),
        message: e.map_or("stage did not run".into(), |e| e.message.clone()),
    }
}
