//! `isotopy run | check | frames`

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isotopy_core::curve_io::write_curve;
use isotopy_core::diagram::to_svg;
use isotopy_core::report::{run_scenario, RunConfig};
use isotopy_core::scenarios::{scenario_by_name, Scenario};
use isotopy_core::{check_hypotheses, glue_schedule, truncated_map, Error, PLCurve};

/// Longest segment of a frame curve before it is mapped.
const FRAME_SEGMENT: f64 = 0.01;
/// Half-width of the gap drawn where a strand passes under another.
const CROSSING_GAP: f64 = 0.005;
/// Threshold for the shrinking-support condition.
const TAIL_THRESHOLD: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "isotopy", version, about = "Countable compositions of ambient isotopies")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check hypotheses, run the probes and write a report.
    Run(Opts),
    /// Check the hypotheses only and print the tail diameters.
    Check(Opts),
    /// Write the curve and its projection at each frame time.
    Frames(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated frame times in [0, 1], ascending.
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            scenario: self.scenario.clone(),
            depth: self.depth as usize,
            horizon: self.horizon,
            tol: self.tol,
            seed: self.seed,
        }
    }

    fn stem(&self) -> String {
        format!("{}_{}_{}", self.scenario, self.depth, self.seed)
    }
}

enum Failure {
    Usage(String),
    Io(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownScenario(_) | Error::InvalidArgument(_) | Error::InvalidTime(_) => {
                Failure::Usage(e.to_string())
            }
            Error::Io(_) => Failure::Io(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn validate(o: &Opts) -> Result<(), Failure> {
    o.config().validate()?;
    if let Some(t) = o.times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Failure::Usage(format!("frame time {t} is outside [0, 1]")));
    }
    if o.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Failure::Usage("frame times must be ascending".into()));
    }
    Ok(())
}

fn prepare(o: &Opts) -> Result<Scenario, Failure> {
    validate(o)?;
    let s = scenario_by_name(&o.scenario)?;
    fs::create_dir_all(&o.out).map_err(|e| Failure::Io(format!("{}: {e}", o.out.display())))?;
    Ok(s)
}

fn frames(o: &Opts, s: &Scenario) -> Result<Vec<PathBuf>, Failure> {
    let curve = s.initial_curve(o.depth as usize)?.densify(FRAME_SEGMENT, 1);
    let glued = glue_schedule(&s.moves, &s.schedule, o.depth as usize)?;
    let mut written = Vec::new();
    for (i, &t) in o.times.iter().enumerate() {
        let pts = curve.vertices().iter().map(|&p| glued.eval(t, p)).collect::<Result<Vec<_>, _>>()?;
        let frame = PLCurve::new(pts, curve.is_closed())?;
        let base = format!("{}_frame{i:03}_t{t}", o.stem());
        let (c, svg) = (o.out.join(format!("{base}.curve")), o.out.join(format!("{base}.svg")));
        write(&c, &write_curve(&frame))?;
        write(&svg, &to_svg(&frame, CROSSING_GAP))?;
        written.extend([c, svg]);
    }
    Ok(written)
}

fn cmd_run(o: &Opts) -> Result<bool, Failure> {
    let s = prepare(o)?;
    let report = run_scenario(&s, &o.config())?;
    let stem = o.stem();
    write(&o.out.join(o.config().report_name()), &report.to_text())?;
    write(&o.out.join(format!("{stem}.json")), &report.to_json())?;
    let curve = s.initial_curve(o.depth as usize)?;
    let h = truncated_map(&s.moves, o.depth as usize)?;
    write(&o.out.join(format!("{stem}.curve")), &write_curve(&curve))?;
    write(&o.out.join(format!("{stem}_image.curve")), &write_curve(&curve.map_vertices(|p| h.eval(p))?))?;
    frames(o, &s)?;
    println!("{}: verdict {} (expected {})", o.scenario, report.verdict(), report.expected);
    Ok(report.matches_expected())
}

fn cmd_check(o: &Opts) -> Result<bool, Failure> {
    validate(o)?;
    let s = scenario_by_name(&o.scenario)?;
    let r = check_hypotheses(&s.moves, o.horizon, TAIL_THRESHOLD)?;
    println!("n\ttail_diameter");
    for (n, d) in &r.tail_diameters {
        println!("{n}\t{d:.6e}");
    }
    println!("containment_ok = {}", r.containment_ok);
    println!("disjoint_supports = {}", r.disjoint_supports);
    println!("verdict = {}", r.verdict);
    Ok(r.verdict.is_pass())
}

fn cmd_frames(o: &Opts) -> Result<bool, Failure> {
    let s = prepare(o)?;
    for p in frames(o, &s)? {
        println!("{}", p.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Run(o) => cmd_run(o),
        Command::Check(o) => cmd_check(o),
        Command::Frames(o) => cmd_frames(o),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("io error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
