//! Reproducible command-line front end for subspace-projection geometry
//! checks and restricted-isometry experiments.
//!
//! Exit codes: 0 all checks passed / run completed, 1 a check failed or
//! the target was unsatisfiable, 2 configuration error.
//!
//! A single `--seed` determines every internal random stream; repeating
//! an invocation with the same seed produces byte-identical output files.
//! `PROJRIP_THREADS` caps worker threads (0 or unset = automatic) and has
//! no effect on results.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use projrip::compression::random_orthoprojector;
use projrip::geometry::{
    normal_membership_check, project_to_normal, project_to_tangent, reach_probe, reach_witness,
    tangent_dimension,
};
use projrip::grassmann::{
    circle_characterization_check, projection_matrix, sample_uniform_subspace,
};
use projrip::matops::{frobenius_inner, Matrix};
use projrip::rip::{
    covering_estimate, rip_estimate, scaling_experiment, RipEstimate, ScalingFit,
    DEFAULT_SCALING_GRID,
};
use projrip::{seed, Error};

const ARTIFACT: &str = "projrip";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "projrip",
    version,
    about = "Geometry and restricted-isometry experiments for subspace projection matrices",
    after_help = "Output formats:\n  \
        json: { artifact, config, result } with the full record\n  \
        csv:  leading '# key=value' config lines, then\n        \
        rip:      trial,ratio\n        \
        scaling:  n,s,eps,x,m_min   (x = s(N-s) ln N; fit in '#' lines)\n        \
        covering: n,s,t,samples,count\n\n\
        PROJRIP_THREADS caps parallelism (0 = auto); results do not depend on it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check projection-matrix identities, tangent structure, and (for
    /// N=2, s=1) the circle characterization at the given dimensions.
    VerifyGeometry {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the normal-bundle self-intersection witness and probe random
    /// pairs for anything closer than the 1/sqrt(2) reach.
    Reach {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// Random pairs to probe.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample isometry ratios of a random orthoprojector over manifold
    /// chords and report min/mean/max and the deviation eps_hat.
    Rip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// Measurement count (must satisfy m < N^2).
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Search the minimal m per grid point and fit m_min against
    /// s(N-s) ln N.
    Scaling {
        /// "default" for the built-in 9-point grid, or "N:s,N:s,..."
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Greedy packing estimate of the Grassmannian at radius t in
    /// projection distance.
    Covering {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// Packing radius.
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => match err {
            Error::BadDimensions(_) | Error::ShapeMismatch(_) => {
                eprintln!("error: {err}");
                ExitCode::from(2)
            }
            other => {
                eprintln!("error: {other}");
                ExitCode::from(1)
            }
        },
    }
}

fn configure_threads() {
    if let Ok(value) = std::env::var("PROJRIP_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::VerifyGeometry { n, s, seed } => cmd_verify_geometry(n, s, seed),
        Command::Reach { n, s, trials, seed } => cmd_reach(n, s, trials, seed),
        Command::Rip {
            n,
            s,
            m,
            trials,
            seed,
            out,
            format,
        } => cmd_rip(n, s, m, trials, seed, out, format),
        Command::Scaling {
            grid,
            eps,
            trials,
            seed,
            out,
            format,
        } => cmd_scaling(&grid, eps, trials, seed, out, format),
        Command::Covering {
            n,
            s,
            t,
            samples,
            seed,
            out,
            format,
        } => cmd_covering(n, s, t, samples, seed, out, format),
    }
}

fn check_line(name: &str, pass: bool, detail: &str) -> bool {
    println!("check {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}

fn cmd_verify_geometry(n: usize, s: usize, seed_v: u64) -> Result<ExitCode, Error> {
    // Validate dimensions up front; sampling reports BadDimensions -> exit 2.
    sample_uniform_subspace(n, s, seed_v)?;
    let mut all = true;

    let mut invariants_ok = true;
    for i in 0..50u64 {
        let sub = sample_uniform_subspace(n, s, seed::derive(seed_v, i))?;
        if projection_matrix(&sub).validate().is_err() {
            invariants_ok = false;
        }
    }
    all &= check_line("projector-invariants", invariants_ok, "50 sampled points");

    let sub = sample_uniform_subspace(n, s, seed::derive(seed_v, 1000))?;
    let dim = tangent_dimension(&sub)?;
    all &= check_line(
        "tangent-dimension",
        dim == s * (n - s),
        &format!("tangent_dim={dim}, expected {}", s * (n - s)),
    );

    let mut ortho_ok = true;
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let sub = sample_uniform_subspace(n, s, seed::derive(seed_v, 2000 + i))?;
        let m = random_symmetric(n, seed::derive(seed_v, 3000 + i));
        let tangent = project_to_tangent(&sub, &m)?;
        let normal = project_to_normal(&sub, &m)?;
        let cross = frobenius_inner(tangent.ambient(), &normal)?.abs();
        let scale = m.norm_squared().max(1.0);
        worst = worst.max(cross / scale);
        if cross > 1e-10 * scale {
            ortho_ok = false;
        }
        let split = tangent.ambient().norm_squared() + normal.norm_squared();
        if (split - m.norm_squared()).abs() > 1e-9 * scale {
            ortho_ok = false;
        }
    }
    all &= check_line(
        "tangent-normal-orthogonality",
        ortho_ok,
        &format!("100 random matrices, worst residual {worst:.2e}"),
    );

    if n == 2 && s == 1 {
        let mut circle_ok = true;
        let mut worst_dev = 0.0f64;
        for i in 0..100u64 {
            let p = projection_matrix(&sample_uniform_subspace(2, 1, seed::derive(seed_v, 4000 + i))?);
            let dev = (circle_characterization_check(&p)? - FRAC_1_SQRT_2).abs();
            worst_dev = worst_dev.max(dev);
            if dev > 1e-10 {
                circle_ok = false;
            }
        }
        all &= check_line(
            "circle-radius",
            circle_ok,
            &format!("radius 1/sqrt(2) = {FRAC_1_SQRT_2:.10}, worst deviation {worst_dev:.2e}"),
        );
    }

    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn random_symmetric(n: usize, seed_v: u64) -> Matrix {
    projrip::matops::symmetrize(&projrip::matops::gaussian_matrix(n, n, seed_v))
}

fn cmd_reach(n: usize, s: usize, trials: usize, seed_v: u64) -> Result<ExitCode, Error> {
    if n > 8 {
        return Err(Error::BadDimensions(format!("reach probe limited to N <= 8, got N={n}")));
    }
    let witness = reach_witness(n, s)?;
    println!("witness distance to P_X: {:.12}", witness.dist_x);
    println!("witness distance to P_Y: {:.12}", witness.dist_y);
    let witness_ok = (witness.dist_x - FRAC_1_SQRT_2).abs() <= 1e-9
        && (witness.dist_y - FRAC_1_SQRT_2).abs() <= 1e-9
        && normal_membership_check(&witness.x, &witness.phi)?
        && normal_membership_check(&witness.y, &witness.phi)?;
    println!("witness normal at both points: {witness_ok}");

    let probe = reach_probe(n, s, trials, seed_v)?;
    println!("probe minimum over {trials} random pairs: {probe:.10}");
    let probe_ok = probe >= FRAC_1_SQRT_2 - 1e-6;
    println!("reach bound 1/sqrt(2) respected: {probe_ok}");

    Ok(if witness_ok && probe_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct Artifact {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Report<C: Serialize, R: Serialize> {
    artifact: Artifact,
    config: C,
    result: R,
}

fn resolve_format(format: Option<Format>, out: Option<&Path>) -> Format {
    match format {
        Some(f) => f,
        None => match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        },
    }
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<(), Error> {
    if let Some(path) = out {
        std::fs::write(path, contents)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RipConfig {
    subcommand: &'static str,
    n: usize,
    s: usize,
    m: usize,
    trials: usize,
    seed: u64,
}

fn cmd_rip(
    n: usize,
    s: usize,
    m: usize,
    trials: usize,
    seed_v: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> Result<ExitCode, Error> {
    let op = random_orthoprojector(m, n, seed::derive(seed_v, 0))?;
    let estimate = rip_estimate(&op, s, trials, seed::derive(seed_v, 1))?;
    let config = RipConfig {
        subcommand: "rip",
        n,
        s,
        m,
        trials,
        seed: seed_v,
    };
    let contents = match resolve_format(format, out.as_deref()) {
        Format::Json => json_report(&config, &estimate)?,
        Format::Csv => rip_csv(&config, &estimate),
    };
    write_output(out.as_deref(), &contents)?;
    println!(
        "rip n={n} s={s} m={m} trials={trials}: ratio min/mean/max = {:.6}/{:.6}/{:.6}, eps_hat = {:.6}",
        estimate.ratio_min, estimate.ratio_mean, estimate.ratio_max, estimate.eps_hat
    );
    Ok(ExitCode::SUCCESS)
}

fn json_report<C: Serialize, R: Serialize>(config: &C, result: &R) -> Result<String, Error> {
    let report = Report {
        artifact: Artifact {
            name: ARTIFACT,
            version: VERSION,
        },
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::BadFile(format!("json serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn csv_header<C: Serialize>(config: &C) -> String {
    let mut head = format!("# artifact={ARTIFACT} version={VERSION}\n");
    let value = serde_json::to_value(config).expect("config serializes");
    let mut line = String::from("#");
    for (key, v) in value.as_object().expect("config is a map") {
        let rendered = match v {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let _ = write!(line, " {key}={rendered}");
    }
    head.push_str(&line);
    head.push('\n');
    head
}

fn rip_csv(config: &RipConfig, estimate: &RipEstimate) -> String {
    let mut text = csv_header(config);
    let _ = writeln!(
        text,
        "# ratio_min={} ratio_mean={} ratio_max={} eps_hat={}",
        estimate.ratio_min, estimate.ratio_mean, estimate.ratio_max, estimate.eps_hat
    );
    text.push_str("trial,ratio\n");
    for (i, r) in estimate.ratios.iter().enumerate() {
        let _ = writeln!(text, "{i},{r}");
    }
    text
}

#[derive(Serialize)]
struct ScalingConfig {
    subcommand: &'static str,
    grid: String,
    eps: f64,
    trials: usize,
    seed: u64,
}

fn parse_grid(grid: &str) -> Result<Vec<(usize, usize)>, Error> {
    if grid == "default" {
        return Ok(DEFAULT_SCALING_GRID.to_vec());
    }
    let mut points = Vec::new();
    for part in grid.split(',') {
        let (n_str, s_str) = part
            .split_once(':')
            .ok_or_else(|| Error::BadDimensions(format!("grid point '{part}' is not N:s")))?;
        let n = n_str
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::BadDimensions(format!("bad N in grid point '{part}'")))?;
        let s = s_str
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::BadDimensions(format!("bad s in grid point '{part}'")))?;
        points.push((n, s));
    }
    Ok(points)
}

fn cmd_scaling(
    grid: &str,
    eps: f64,
    trials: usize,
    seed_v: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> Result<ExitCode, Error> {
    let points = parse_grid(grid)?;
    let fit = scaling_experiment(&points, eps, trials, seed_v)?;
    let config = ScalingConfig {
        subcommand: "scaling",
        grid: grid.to_string(),
        eps,
        trials,
        seed: seed_v,
    };
    let contents = match resolve_format(format, out.as_deref()) {
        Format::Json => json_report(&config, &fit)?,
        Format::Csv => scaling_csv(&config, &fit),
    };
    write_output(out.as_deref(), &contents)?;
    println!(
        "scaling fit over {} points: m_min ~ {:.4} * s(N-s)lnN + {:.2}, r^2 = {:.4}{}",
        fit.points.len(),
        fit.slope,
        fit.intercept,
        fit.r_squared,
        if fit.underdetermined { " (underdetermined)" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}

fn scaling_csv(config: &ScalingConfig, fit: &ScalingFit) -> String {
    let mut text = csv_header(config);
    let _ = writeln!(
        text,
        "# slope={} intercept={} r_squared={} underdetermined={}",
        fit.slope, fit.intercept, fit.r_squared, fit.underdetermined
    );
    let _ = writeln!(text, "# note={}", fit.note);
    text.push_str("n,s,eps,x,m_min\n");
    for p in &fit.points {
        let _ = writeln!(text, "{},{},{},{},{}", p.n, p.s, p.eps_target, p.x, p.m_min);
    }
    text
}

#[derive(Serialize)]
struct CoveringConfig {
    subcommand: &'static str,
    n: usize,
    s: usize,
    t: f64,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct CoveringResult {
    count: usize,
}

fn cmd_covering(
    n: usize,
    s: usize,
    t: f64,
    samples: usize,
    seed_v: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> Result<ExitCode, Error> {
    let count = covering_estimate(n, s, t, samples, seed_v)?;
    let config = CoveringConfig {
        subcommand: "covering",
        n,
        s,
        t,
        samples,
        seed: seed_v,
    };
    let contents = match resolve_format(format, out.as_deref()) {
        Format::Json => json_report(&config, &CoveringResult { count })?,
        Format::Csv => {
            let mut text = csv_header(&config);
            text.push_str("n,s,t,samples,count\n");
            let _ = writeln!(text, "{n},{s},{t},{samples},{count}");
            text
        }
    };
    write_output(out.as_deref(), &contents)?;
    println!("covering n={n} s={s} t={t} samples={samples}: packing count = {count}");
    Ok(ExitCode::SUCCESS)
}
