//! `bicent`: solve, generate, verify, render and sweep bicentric scenes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bicentric::poncelet::{closure_defect, condition_residual, solve_closure_rc};
use bicentric::report::DEFAULT_TOLERANCE;
use bicentric::{
    generate_scene, render_svg, scene_from_json, scene_to_json, sweep, verify_scene, ConditionKind,
    Point2, PonceletError, SceneError, SvgOptions, TheoremError, VerificationReport,
};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bicent",
    version,
    about = "Bicentric polygons, excircle centers and their circle E"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the incircle radius that closes an n-gon and print condition residuals.
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Solve, trace and verify a scene, then write it as JSON.
    Generate {
        #[command(flatten)]
        pair: PairArgs,
        /// Polar angle of the first vertex about the circumcircle center.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        start_angle: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute every residual of a scene file.
    Verify {
        file: PathBuf,
        /// Pass threshold for every residual.
        #[arg(long, env = "BICENT_TOL", default_value_t = DEFAULT_TOLERANCE, value_parser = positive)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Draw a scene file as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        show_excircles: bool,
        #[arg(long)]
        show_bisectors: bool,
        /// Image width in pixels.
        #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(1..))]
        width: u32,
    },
    /// Trace the closing pair from equally spaced start angles.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        frames: u32,
        /// Directory for frame_XXXX.json and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct PairArgs {
    /// Number of vertices.
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    n: u32,
    /// Turns around the incircle center.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    winding: u32,
    /// Circumcircle radius.
    #[arg(long, value_parser = positive)]
    rk: f64,
    /// Distance between the circle centers.
    #[arg(long, value_parser = non_negative)]
    d: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a finite positive number, got {s:?}")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a finite non-negative number, got {s:?}")),
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<PonceletError> for Failure {
    fn from(e: PonceletError) -> Self {
        match e {
            PonceletError::InvalidArgument(_) => Failure::usage(e.to_string()),
            _ => Failure::numeric(e.to_string()),
        }
    }
}

impl From<TheoremError> for Failure {
    fn from(e: TheoremError) -> Self {
        Failure::numeric(e.to_string())
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Poncelet(p) => p.into(),
            SceneError::Theorem(t) => t.into(),
            SceneError::Schema(_) => Failure::usage(e.to_string()),
            SceneError::Invariant(_) => Failure::verification(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Shortest decimal with at most 12 fractional digits, for human output.
fn human(x: f64) -> String {
    let s = format!("{x:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn solve(pair: &PairArgs, as_json: bool) -> CmdResult {
    let (n, w) = (pair.n as usize, pair.winding);
    let solved = solve_closure_rc(n, w, pair.rk, pair.d, Point2::ORIGIN)?;
    let defect = closure_defect(&solved, n, w, 16)?;
    let condition = match n {
        3 => Some(("euler3_residual", ConditionKind::Euler3)),
        4 if w == 1 => Some(("fuss4_residual", ConditionKind::Fuss4)),
        _ => None,
    };
    let condition = condition
        .map(|(name, kind)| condition_residual(&solved, kind).map(|r| (name, r)))
        .transpose()?;
    if as_json {
        let mut out = json!({
            "n": n,
            "winding": w,
            "r_k": pair.rk,
            "d": pair.d,
            "r_c": solved.r_c(),
            "closure_defect": defect,
        });
        if let Some((name, r)) = condition {
            out[name] = json!(r);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("finite values")
        );
    } else {
        println!("R_C = {}", human(solved.r_c()));
        if let Some((name, r)) = condition {
            println!("{name} = {r:.3e}");
        }
        println!("closure_defect = {defect:.3e}");
    }
    Ok(())
}

fn generate(pair: &PairArgs, start_angle: f64, out: &Path) -> CmdResult {
    let mut scene = generate_scene(pair.n as usize, pair.winding, pair.rk, pair.d, start_angle)?;
    let report = verify_scene(&scene, DEFAULT_TOLERANCE)?;
    let pass = report.overall_pass;
    if !pass {
        eprintln!("{report}");
        return Err(Failure::verification(
            "generated scene failed verification; nothing written",
        ));
    }
    scene.reports = Some(report);
    write(out, &scene_to_json(&scene))
}

fn report_json(report: &VerificationReport) -> String {
    let entries: Vec<_> = report
        .entries
        .iter()
        .map(
            |e| json!({"name": e.name, "value": e.value, "tolerance": e.tolerance, "pass": e.pass}),
        )
        .collect();
    let out = json!({"overall_pass": report.overall_pass, "entries": entries});
    serde_json::to_string_pretty(&out).expect("finite values")
}

fn verify(file: &Path, tol: f64, as_json: bool) -> CmdResult {
    let scene = scene_from_json(&read(file)?)?;
    let report = verify_scene(&scene, tol)?;
    if as_json {
        println!("{}", report_json(&report));
    } else {
        println!("{report}");
    }
    if report.overall_pass {
        Ok(())
    } else {
        let names: Vec<&str> = report.failing().map(|e| e.name.as_str()).collect();
        Err(Failure::verification(format!(
            "failing residuals: {}",
            names.join(", ")
        )))
    }
}

fn render(file: &Path, out: &Path, options: SvgOptions) -> CmdResult {
    let scene = scene_from_json(&read(file)?)?;
    write(out, &render_svg(&scene, &options))
}

fn run_sweep(pair: &PairArgs, frames: u32, out: &Path) -> CmdResult {
    let result = sweep(
        pair.n as usize,
        pair.winding,
        pair.rk,
        pair.d,
        frames as usize,
    )?;
    fs::create_dir_all(out)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", out.display())))?;
    for (k, frame) in result.frames.iter().enumerate() {
        write(
            &out.join(format!("frame_{k:04}.json")),
            &scene_to_json(&frame.scene),
        )?;
    }
    let summary = &result.summary;
    write(&out.join("summary.json"), &summary.to_json())?;
    println!(
        "{} frames, max positional defect {:.3e}, angular spread {:.3e}, max excenter deviation {:.3e}",
        summary.frames,
        summary.max_positional_defect,
        summary.angular_defect_spread,
        summary.max_excenter_deviation
    );
    if !summary.porism_ok {
        return Err(Failure::numeric(format!(
            "porism violated: closure defect varies with the start angle (positional {:.3e}, angular spread {:.3e})",
            summary.max_positional_defect, summary.angular_defect_spread
        )));
    }
    if !summary.rolling_ok {
        return Err(Failure::verification(format!(
            "excenters leave the predicted circle E by {:.3e} R_K",
            summary.max_excenter_deviation
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { pair, json } => solve(pair, *json),
        Command::Generate {
            pair,
            start_angle,
            out,
        } => generate(pair, *start_angle, out),
        Command::Verify { file, tol, json } => verify(file, *tol, *json),
        Command::Render {
            file,
            out,
            show_excircles,
            show_bisectors,
            width,
        } => render(
            file,
            out,
            SvgOptions {
                width_px: *width,
                show_excircles: *show_excircles,
                show_bisectors: *show_bisectors,
            },
        ),
        Command::Sweep { pair, frames, out } => run_sweep(pair, *frames, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bicent: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
