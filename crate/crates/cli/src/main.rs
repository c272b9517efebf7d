use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oft_core::config::{OutputFormat, RefractionSpec, SolverConfig};
use oft_core::converge::{run_converge, DEFAULT_MEMORY_LIMIT};
use oft_core::demos::{ode2_quadrature_error, run_luneburg, run_ode1, run_ode2, LuneburgConfig};
use oft_core::helmholtz::{apply_inverse_sqrt, build_source, solve_helmholtz};
use oft_core::io::{write_csv, write_oftf};
use oft_core::oracle::find_eigenvalues;
use oft_core::paraxial::StoppingRule;
use oft_core::quadrature::composite_weights;
use oft_core::{ComplexField, OftError};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "oft", version, about = "Helmholtz solver by operator Fourier transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the scattered field described by a config file.
    Solve { config: PathBuf },
    /// Apply one inverse-square-root pass to the config's source.
    ApplySqrt { config: PathBuf },
    /// Reproduce the convergence table of the unit test problem.
    Converge {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        dim: u8,
        /// Inclusive row range `k..m` within 1..5, or a single row.
        #[arg(long, default_value = "1..3", value_parser = parse_rows)]
        rows: (usize, usize),
        /// Skip rows whose working set would exceed this many GiB.
        #[arg(long, default_value_t = (DEFAULT_MEMORY_LIMIT >> 30) as f64)]
        memory_gib: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print eigenvalues of the 1D Robin problem as CSV.
    Eigen {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        count: usize,
    },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// `v - i v'' = (1 + iπ²) sin πx` by leapfrog Schrödinger marching.
    Ode1 {
        #[arg(long, default_value_t = 50)]
        intervals: usize,
        #[arg(long, default_value_t = 0.2)]
        ratio: f64,
        #[arg(long, default_value_t = 30.0)]
        t_final: f64,
    },
    /// `v - v'' = (3 - 4x²) e^{-x²}` by upwind advection pairs.
    Ode2 {
        #[arg(long, default_value_t = 100)]
        half_nodes: usize,
        #[arg(long, default_value_t = 10.0)]
        half_width: f64,
        #[arg(long, default_value_t = 1.0)]
        cfl: f64,
        #[arg(long, default_value_t = 40.0)]
        t_final: f64,
    },
    /// Plane wave focused by a Luneburg lens.
    Luneburg {
        #[arg(long)]
        kappa: Option<f64>,
        /// Points per axis as `nx,ny,nz`.
        #[arg(long, value_parser = parse_triple)]
        n: Option<[usize; 3]>,
        #[arg(long)]
        t_final: Option<f64>,
        /// Write `|v_total|` on the plane `x₁ = 0` as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_rows(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a row number"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let k = parse(s)?;
            (k, k)
        }
    };
    if !(1..=5).contains(&a) || !(1..=5).contains(&b) || a > b {
        return Err(format!("row range `{s}` must lie within 1..5 and be increasing"));
    }
    Ok((a, b))
}

fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a point count"))
        })
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected three comma-separated counts".to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<OftError> for Failure {
    fn from(e: OftError) -> Self {
        let code = match e {
            OftError::Config { .. } => EXIT_CONFIG,
            OftError::Io(_) => EXIT_IO,
            _ => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn config_failure(e: OftError) -> Failure {
    match e {
        OftError::Io(_) | OftError::Config { .. } => e.into(),
        other => Failure {
            code: EXIT_CONFIG,
            message: other.to_string(),
        },
    }
}

/// Loads a config; relative raster and output paths resolve against the
/// config file's directory.
fn load_config(path: &Path) -> Result<SolverConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut cfg = SolverConfig::parse(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    if let RefractionSpec::Raster { path: p, .. } = &mut cfg.refraction {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    if cfg.output_path.is_relative() {
        cfg.output_path = base.join(&cfg.output_path);
    }
    Ok(cfg)
}

fn write_field(field: &ComplexField, path: &Path, format: OutputFormat) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        OutputFormat::Oftf => write_oftf(field, &mut w)?,
        OutputFormat::Csv => write_csv(field, &mut w)?,
    }
    w.flush().map_err(|e| io_failure(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn report_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".report");
    PathBuf::from(s)
}

/// Setup that is the config's fault maps to exit 2.
struct Prepared {
    cfg: SolverConfig,
    g: ComplexField,
    beta: oft_core::RefractionField,
    sched: oft_core::schedule::TimeStepSchedule,
}

fn prepare(path: &Path) -> Result<Prepared, Failure> {
    let cfg = load_config(path)?;
    let grid = cfg.grid().map_err(config_failure)?;
    let beta = cfg.refraction(&grid).map_err(config_failure)?;
    let incident = cfg.incident().map_err(config_failure)?;
    let sched = cfg.schedule().map_err(config_failure)?;
    let g = build_source(&beta, &incident)?;
    Ok(Prepared { cfg, g, beta, sched })
}

fn cmd_solve(path: &Path) -> Result<(), Failure> {
    let p = prepare(path)?;
    let weights = composite_weights(&p.sched)?;
    let (vs, rep) = solve_helmholtz(&p.g, &p.beta, p.cfg.kappa, &p.sched, &weights, p.cfg.stopping)?;
    if !vs.is_finite() {
        return Err(OftError::NonFinite("solve").into());
    }
    let report = format!(
        "points = {}\nschedule_steps = {}\nt_final = {}\nsteps_pass1 = {}\nsteps_pass2 = {}\nrel_residual = {:e}\nub_estimate = {:e}\ntruncated = {}\nmax_abs_scattered = {:e}\nwall_time_s = {:.3}\n",
        vs.grid().len(),
        p.sched.steps(),
        p.sched.t_last(),
        rep.steps_pass1,
        rep.steps_pass2,
        rep.rel_residual,
        rep.ub_estimate,
        rep.truncated,
        vs.max_norm(),
        rep.wall_time
    );
    write_field(&vs, &p.cfg.output_path, p.cfg.output_format)?;
    write_text(&report_path(&p.cfg.output_path), &report)?;
    println!("{report}output = {}", p.cfg.output_path.display());
    Ok(())
}

fn cmd_apply_sqrt(path: &Path) -> Result<(), Failure> {
    let p = prepare(path)?;
    if matches!(p.cfg.stopping, StoppingRule::ResidualThreshold { .. }) {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "config error in `stopping.kind`: residual stopping needs the two-pass solve".into(),
        });
    }
    let weights = composite_weights(&p.sched)?;
    let start = std::time::Instant::now();
    let (v1, rep) = apply_inverse_sqrt(&p.g, &p.beta, p.cfg.kappa, &p.sched, &weights, p.cfg.stopping)?;
    if !v1.is_finite() {
        return Err(OftError::NonFinite("apply-sqrt").into());
    }
    let report = format!(
        "points = {}\nsteps = {}\nt_reached = {}\ntruncated = {}\nfinal_max_abs_u = {:e}\nmax_growth = {:e}\nmax_abs_result = {:e}\nwall_time_s = {:.3}\n",
        v1.grid().len(),
        rep.steps,
        rep.t_reached,
        rep.truncated,
        rep.final_max_norm,
        rep.max_growth,
        v1.max_norm(),
        start.elapsed().as_secs_f64()
    );
    write_field(&v1, &p.cfg.output_path, p.cfg.output_format)?;
    write_text(&report_path(&p.cfg.output_path), &report)?;
    println!("{report}output = {}", p.cfg.output_path.display());
    Ok(())
}

fn cmd_converge(dim: u8, rows: (usize, usize), memory_gib: f64, out: Option<PathBuf>) -> Result<(), Failure> {
    if !(memory_gib > 0.0) {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "--memory-gib must be positive".into(),
        });
    }
    let limit = (memory_gib * (1u64 << 30) as f64) as u64;
    let table = run_converge(dim as usize, rows.0, rows.1, limit)?;
    for s in &table.skipped {
        eprintln!(
            "skipping row {} (Nx = {}): needs about {:.1} GiB, limit {memory_gib} GiB",
            s.row,
            s.nx,
            s.memory_estimate(dim as usize) as f64 / (1u64 << 30) as f64
        );
    }
    match out {
        Some(path) => write_text(&path, &table.to_csv())?,
        None => print!("{}", table.to_csv()),
    }
    if let Some(order) = table.order_v1() {
        eprintln!("fitted order of relErr_v1 in dt0: {order:.3}");
    }
    Ok(())
}

fn cmd_eigen(alpha: f64, length: f64, count: usize) -> Result<(), Failure> {
    if !(alpha > 0.0) || !(length > 0.0) || count == 0 {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "--alpha and --length must be positive and --count at least 1".into(),
        });
    }
    let basis = find_eigenvalues(alpha, length, count)?;
    let mut out = String::from("n,re,im,abs_f\n");
    for (n, lambda) in basis.lambdas().iter().enumerate() {
        let f = oft_core::oracle::characteristic(*lambda, alpha, length).norm();
        out.push_str(&format!("{},{:.15e},{:.15e},{:.3e}\n", n + 1, lambda.re, lambda.im, f));
    }
    print!("{out}");
    Ok(())
}

fn cmd_demo(which: Demo) -> Result<(), Failure> {
    match which {
        Demo::Ode1 {
            intervals,
            ratio,
            t_final,
        } => {
            let r = run_ode1(intervals, ratio, t_final)?;
            println!(
                "ode1 dx = {:e} dt = {:e} steps = {} max_error = {:e}",
                r.dx, r.dt, r.steps, r.max_error
            );
        }
        Demo::Ode2 {
            half_nodes,
            half_width,
            cfl,
            t_final,
        } => {
            let r = run_ode2(half_nodes, half_width, cfl, t_final)?;
            let q = ode2_quadrature_error(half_nodes, half_width, cfl, t_final)?;
            println!(
                "ode2 dx = {:e} dt = {:e} steps = {} max_error = {:e} quadrature_error = {:e}",
                r.dx, r.dt, r.steps, r.max_error, q
            );
        }
        Demo::Luneburg { kappa, n, t_final, out } => {
            let mut cfg = LuneburgConfig::default();
            if let Some(k) = kappa {
                cfg.kappa = k;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            let r = run_luneburg(&cfg)?;
            println!(
                "luneburg peak = {:.4} at ({:.3}, {:.3}, {:.3}) focus_distance = {:.4} wavelength = {:.4} rel_residual = {:e} wall_time_s = {:.1}",
                r.peak, r.argmax[0], r.argmax[1], r.argmax[2], r.focus_distance, r.wavelength, r.solve.rel_residual, r.solve.wall_time
            );
            if let Some(path) = out {
                let grid = r.total.grid();
                let i0 = (0..grid.n(0))
                    .min_by(|a, b| grid.coord(0, *a).abs().total_cmp(&grid.coord(0, *b).abs()))
                    .unwrap_or(0);
                let mut s = String::from("x2,x3,abs_total\n");
                for k in 0..grid.n(2) {
                    for j in 0..grid.n(1) {
                        let idx = grid.linear_index(&[i0, j, k])?;
                        s.push_str(&format!(
                            "{},{},{:e}\n",
                            grid.coord(1, j),
                            grid.coord(2, k),
                            r.total.values()[idx].norm()
                        ));
                    }
                }
                write_text(&path, &s)?;
            }
        }
    }
    Ok(())
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("OFT_THREADS") else {
        return Ok(());
    };
    let threads = match raw.trim().parse::<usize>() {
        Ok(t) if t >= 1 => t,
        _ => {
            return Err(Failure {
                code: EXIT_CONFIG,
                message: format!("OFT_THREADS must be a positive integer (got `{raw}`)"),
            })
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: EXIT_SOLVER,
            message: format!("thread pool: {e}"),
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::ApplySqrt { config } => cmd_apply_sqrt(&config),
        Command::Converge {
            dim,
            rows,
            memory_gib,
            out,
        } => cmd_converge(dim, rows, memory_gib, out),
        Command::Eigen { alpha, length, count } => cmd_eigen(alpha, length, count),
        Command::Demo { which } => cmd_demo(which),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("oft: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
