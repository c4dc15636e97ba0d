//! Command-line front end: file ingestion, experiment drivers, CSV
//! emission. Exit codes: 0 on success with all invariants holding,
//! 2 for input or parse problems, 3 for invariant violations,
//! 4 when the exact solver's size limit is exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kpoly_core::approximation::{convergence_experiment, TargetSurface};
use kpoly_core::estimators::estimate_curvature_bounds;
use kpoly_core::gh::{
    gh_exact, gh_lower_bound, gh_upper_bound_seeded, GhError, GH_EXACT_DEFAULT_LIMIT,
};
use kpoly_core::io::{format_f64, parse_fms, parse_kpoly};
use kpoly_core::smoothing::smooth_cone;
use kpoly_core::surface::{build_metric_graph, SurfacePoint};
use kpoly_core::tol::{CONICAL_EPS, GAUSS_BONNET_TOL};

#[derive(Parser)]
#[command(
    name = "kpoly",
    version,
    about = "Polyhedral surfaces from constant-curvature triangles: \
             validation, metrics, Gromov-Hausdorff bounds, smoothing \
             and curvature estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a polyhedron file and check the vertex-angle condition.
    Check {
        /// Polyhedron file (.kpoly).
        file: PathBuf,
    },
    /// Print the discrete Gauss-Bonnet residual of a polyhedron.
    GaussBonnet { file: PathBuf },
    /// Shortest-path distance between two anchored surface points.
    Distance {
        file: PathBuf,
        /// First point: `vertex:<id>`, `edge:<tri>:<edge>:<param>` or
        /// `interior:<tri>:<x>:<y>:<z>`.
        #[arg(long)]
        from: String,
        /// Second point, same syntax as --from.
        #[arg(long)]
        to: String,
        /// Steiner points per edge in the metric graph.
        #[arg(long, default_value_t = 8)]
        resolution: usize,
    },
    /// Gromov-Hausdorff bounds between two finite metric spaces.
    Gh {
        /// First space (.fms).
        x: PathBuf,
        /// Second space (.fms).
        y: PathBuf,
        /// Instance-size cap for the exact solver.
        #[arg(long, default_value_t = GH_EXACT_DEFAULT_LIMIT)]
        size_limit: usize,
        /// Fail (exit 4) instead of falling back to bounds when the
        /// instance exceeds the exact-solver limit.
        #[arg(long)]
        exact: bool,
        /// Local-search restarts for the upper bound.
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Random seed for the upper-bound restarts.
        #[arg(long, default_value_t = 0x6b70_6f6c_79)]
        seed: u64,
    },
    /// Polyhedral-approximation convergence table (CSV).
    Approximate {
        /// Target surface to approximate.
        #[arg(long, value_enum, default_value_t = TargetArg::Sphere)]
        target: TargetArg,
        /// Run refinement levels 0 through this level.
        #[arg(long, default_value_t = 3)]
        max_level: usize,
        /// Matched sample points per level.
        #[arg(long, default_value_t = 42)]
        points: usize,
        /// Steiner points per edge in the metric graph.
        #[arg(long, default_value_t = 8)]
        resolution: usize,
    },
    /// Smooth a spherical cone point; emits the profile as CSV plus a
    /// summary line.
    Smooth {
        /// Cone curvature in (0, 2 pi).
        #[arg(long)]
        omega: f64,
        /// Half-width of the curvature band.
        #[arg(long)]
        epsilon: f64,
        /// Bound on the admissible phase shift.
        #[arg(long, default_value_t = 0.01)]
        tau: f64,
        /// Number of profile rows to emit.
        #[arg(long, default_value_t = 200)]
        rows: usize,
    },
    /// Triangle-excess curvature estimates around a point (CSV).
    Curvature {
        file: PathBuf,
        /// Base point, same syntax as `distance --from`.
        #[arg(long)]
        point: String,
        /// Strictly decreasing scales, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        /// Smallest admissible triangle angle.
        #[arg(long, default_value_t = 0.2)]
        angle_floor: f64,
        /// Triangles requested per scale.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        /// Steiner points per edge in the metric graph.
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        /// Random seed for the sampling stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Sphere,
    Torus,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn size_limit(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_polyhedron(path: &Path) -> Result<kpoly_core::KPolyhedron, Failure> {
    parse_kpoly(&read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_point(spec: &str) -> Result<SurfacePoint, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::input(format!("cannot parse point `{spec}`"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let idx = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["vertex", v] => Ok(SurfacePoint::Vertex(idx(v)?)),
        ["edge", t, e, p] => Ok(SurfacePoint::Edge {
            tri: idx(t)?,
            edge: idx(e)?,
            param: num(p)?,
        }),
        ["interior", t, x, y, z] => Ok(SurfacePoint::Interior {
            tri: idx(t)?,
            chart: [num(x)?, num(y)?, num(z)?],
        }),
        _ => Err(bad()),
    }
}

fn run(command: &Command) -> Result<String, Failure> {
    match command {
        Command::Check { file } => {
            let poly = load_polyhedron(file)?;
            let report = poly.check_alexandrov();
            let conical = poly.conical_points(CONICAL_EPS);
            let mut out = String::new();
            let verdict = if report.pass { "pass" } else { "fail" };
            if let Some(&(_, top)) = conical.first() {
                let _ = writeln!(
                    out,
                    "alexandrov: {verdict}, vertices: {} conical (omega_max={})",
                    conical.len(),
                    format_f64(top)
                );
            } else {
                let _ = writeln!(out, "alexandrov: {verdict}, vertices: 0 conical");
            }
            for &(v, angle) in &report.offenders {
                let _ = writeln!(
                    out,
                    "offender: vertex {v} total_angle={}",
                    format_f64(angle)
                );
            }
            if report.pass {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::invariant("vertex-angle condition failed"))
            }
        }
        Command::GaussBonnet { file } => {
            let poly = load_polyhedron(file)?;
            let residual = poly.gauss_bonnet_residual();
            let omega_mass: f64 = poly.omegas().iter().map(|w| w.abs()).sum();
            let out = format!("residual={}\n", format_f64(residual));
            if residual.abs() <= GAUSS_BONNET_TOL * (1.0 + omega_mass) {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::invariant(format!(
                    "Gauss-Bonnet residual {residual} out of tolerance"
                )))
            }
        }
        Command::Distance {
            file,
            from,
            to,
            resolution,
        } => {
            let poly = load_polyhedron(file)?;
            let x = parse_point(from)?;
            let y = parse_point(to)?;
            let graph = build_metric_graph(&poly, *resolution);
            let d = graph
                .distance(&x, &y)
                .map_err(|e| Failure::input(e.to_string()))?;
            Ok(format!("distance={}\n", format_f64(d)))
        }
        Command::Gh {
            x,
            y,
            size_limit,
            exact,
            restarts,
            seed,
        } => {
            let sx = parse_fms(&read_file(x)?)
                .map_err(|e| Failure::input(format!("{}: {e}", x.display())))?;
            let sy = parse_fms(&read_file(y)?)
                .map_err(|e| Failure::input(format!("{}: {e}", y.display())))?;
            let lower = gh_lower_bound(&sx, &sy);
            match gh_exact(&sx, &sy, *size_limit) {
                Ok(value) => Ok(format!(
                    "lower={}, exact={}\n",
                    format_f64(lower),
                    format_f64(value)
                )),
                Err(GhError::SizeLimitExceeded { n, m, limit }) if *exact => {
                    Err(Failure::size_limit(format!(
                        "instance ({n}, {m}) exceeds the exact-solver limit {limit}"
                    )))
                }
                Err(GhError::SizeLimitExceeded { .. }) => {
                    let (upper, cert) = gh_upper_bound_seeded(&sx, &sy, *restarts, *seed);
                    let pairs: Vec<String> = cert
                        .pairs()
                        .iter()
                        .map(|(i, j)| format!("{i}:{j}"))
                        .collect();
                    Ok(format!(
                        "lower={}, upper={}, certificate={}\n",
                        format_f64(lower),
                        format_f64(upper),
                        pairs.join(" ")
                    ))
                }
                Err(e) => Err(Failure::input(e.to_string())),
            }
        }
        Command::Approximate {
            target,
            max_level,
            points,
            resolution,
        } => {
            let surface = match target {
                TargetArg::Sphere => TargetSurface::UnitSphere,
                TargetArg::Torus => TargetSurface::FlatTorus,
            };
            let levels: Vec<usize> = (0..=*max_level).collect();
            let rows = convergence_experiment(surface, &levels, *points, *resolution)
                .map_err(|e| Failure::input(e.to_string()))?;
            let mut out = String::from("level,delta,gh_upper,max_omega\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.level,
                    format_f64(r.delta),
                    format_f64(r.gh_upper),
                    format_f64(r.max_abs_omega)
                );
            }
            Ok(out)
        }
        Command::Smooth {
            omega,
            epsilon,
            tau,
            rows,
        } => {
            let cone = smooth_cone(*omega, *epsilon, *tau)
                .map_err(|e| Failure::invariant(e.to_string()))?;
            let t_end = std::f64::consts::PI - 0.1;
            let mut out = String::from("t,f,fprime,curvature\n");
            for i in 1..=*rows {
                let t = t_end * i as f64 / *rows as f64;
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    format_f64(t),
                    format_f64(cone.profile.eval(t)),
                    format_f64(cone.profile.derivative(t)),
                    format_f64(cone.profile.curvature_one_sided(t, true))
                );
            }
            let _ = writeln!(out, "lambda,A,B,amp,phi");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                format_f64(cone.lambda),
                format_f64(cone.tail.0),
                format_f64(cone.tail.1),
                format_f64(cone.amplitude),
                format_f64(cone.phase)
            );
            Ok(out)
        }
        Command::Curvature {
            file,
            point,
            deltas,
            angle_floor,
            samples,
            resolution,
            seed,
        } => {
            let poly = load_polyhedron(file)?;
            let x = parse_point(point)?;
            let rows = estimate_curvature_bounds(
                &poly,
                &x,
                deltas,
                *angle_floor,
                *samples,
                *resolution,
                *seed,
            )
            .map_err(|e| Failure::invariant(e.to_string()))?;
            let mut out = String::from("delta,inf_ratio,sup_ratio,n_accepted\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    format_f64(r.delta),
                    format_f64(r.inf_ratio),
                    format_f64(r.sup_ratio),
                    r.n_accepted
                );
            }
            Ok(out)
        }
    }
}
