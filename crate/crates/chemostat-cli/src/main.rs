//! Command-line front end: steady states, simulation, operating diagram,
//! and bifurcation scans, with CSV/SVG output.

mod config;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chemostat::diagram::{
    branch_table, classify_region, codim2_candidates, grid_diagram, scan_dilution,
};
use chemostat::dynamics::{fmt_sig, integrate, Attractor};
use chemostat::equilibria::{find_steady_states, OperatingPoint};
use chemostat::growth::MonodInhibition;
use chemostat::stability::{classify, Classification};
use chemostat::Error as ModelError;
use clap::{Parser, Subcommand};

use config::{Format, Operating, RunConfig};

#[derive(Parser)]
#[command(name = "chemostat", version, about = "Two-species chemostat competition model")]
struct Cli {
    /// JSON run configuration; defaults are the reference parameter set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats, comma separated (overrides the config).
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady states, classification, and region label at one operating point.
    SteadyStates,
    /// Integrate the configured initial conditions at one operating point.
    Simulate,
    /// Region grid and boundary curves over an (S_in, D) window.
    OperatingDiagram,
    /// Critical dilution rates and steady-state branches along a vertical line.
    Bifurcation,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_INTEGRATOR: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        let code = match &e {
            ModelError::InvalidParams(_) | ModelError::InvalidOperatingPoint(_) => EXIT_CONFIG,
            ModelError::StepUnderflow { .. } => EXIT_INTEGRATOR,
            ModelError::Domain(_) | ModelError::RootFinding(_) | ModelError::Inconsistency(_) => {
                EXIT_INCONSISTENT
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::config(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("CHEMOSTAT_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: CHEMOSTAT_THREADS must be a positive integer");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(Failure::config)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(formats) = cli.format {
        cfg.output.formats = formats;
    }
    cfg.validate().map_err(Failure::config)?;
    fs::create_dir_all(&cfg.output.dir)?;

    match cli.command {
        Cmd::SteadyStates => cmd_steady_states(&cfg),
        Cmd::Simulate => cmd_simulate(&cfg),
        Cmd::OperatingDiagram => cmd_operating_diagram(&cfg),
        Cmd::Bifurcation => cmd_bifurcation(&cfg),
    }
}

fn model_of(cfg: &RunConfig) -> Result<MonodInhibition<f64>, Failure> {
    Ok(MonodInhibition::new(cfg.parameters.to_bio())?)
}

fn point_of(cfg: &RunConfig) -> Result<OperatingPoint<f64>, Failure> {
    match cfg.operating {
        Operating::Point { s_in, d } => Ok(OperatingPoint::new(s_in, d)?),
        _ => Err(Failure::config("this subcommand requires point mode")),
    }
}

fn class_letter(c: Classification) -> &'static str {
    match c {
        Classification::Les => "S",
        Classification::Unstable => "U",
        Classification::Marginal => "M",
    }
}

fn wants(cfg: &RunConfig, format: Format) -> bool {
    cfg.output.formats.contains(&format)
}

fn cmd_steady_states(cfg: &RunConfig) -> Result<(), Failure> {
    let model = model_of(cfg)?;
    let p = cfg.parameters.to_bio();
    let op = point_of(cfg)?;

    let region = classify_region(&op, &model, &p)?;
    let states = find_steady_states(&op, &model, &p)?;
    let mut rows = Vec::new();
    for ss in &states {
        let report = classify(ss, &op, &model, &p)?;
        rows.push((ss, class_letter(report.classification)));
    }

    println!(
        "operating point (S_in, D) = ({}, {})  region {}",
        fmt_sig(op.s_in),
        fmt_sig(op.d),
        region.label
    );
    println!("kind,S,x1,x2,stability,region");
    let mut csv = String::from("kind,S,x1,x2,stability,region\n");
    for (ss, letter) in &rows {
        let line = format!(
            "{},{},{},{},{},{}",
            ss.kind,
            fmt_sig(ss.s),
            fmt_sig(ss.x1),
            fmt_sig(ss.x2),
            letter,
            region.label
        );
        println!("{line}");
        csv.push_str(&line);
        csv.push('\n');
    }
    if wants(cfg, Format::Csv) {
        fs::write(cfg.output.dir.join("steady_states.csv"), csv)?;
    }
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig) -> Result<(), Failure> {
    let model = model_of(cfg)?;
    let p = cfg.parameters.to_bio();
    let op = point_of(cfg)?;
    if cfg.initial_conditions.is_empty() {
        return Err(Failure::config("simulate requires at least one initial condition"));
    }
    let int_cfg = cfg.integrator.to_config();

    let mut summary = String::from("ic_index,S0,x1_0,x2_0,attractor\n");
    let mut trajectories = Vec::new();
    for (k, ic) in cfg.initial_conditions.iter().enumerate() {
        let traj = integrate(*ic, &op, &model, &p, &int_cfg)?;
        let label = match traj.attractor {
            Attractor::Equilibrium(kind) => kind.to_string(),
            Attractor::Unsettled => "unsettled".to_string(),
        };
        println!(
            "ic {k}: ({}, {}, {}) -> {label}",
            fmt_sig(ic[0]),
            fmt_sig(ic[1]),
            fmt_sig(ic[2])
        );
        summary.push_str(&format!(
            "{k},{},{},{},{label}\n",
            fmt_sig(ic[0]),
            fmt_sig(ic[1]),
            fmt_sig(ic[2])
        ));
        if wants(cfg, Format::Csv) {
            let path = cfg.output.dir.join(format!("trajectory_{k:02}.csv"));
            let mut file = fs::File::create(path)?;
            traj.write_csv(&mut file)?;
        }
        trajectories.push(traj);
    }
    if wants(cfg, Format::Csv) {
        fs::write(cfg.output.dir.join("summary.csv"), summary)?;
    }
    if wants(cfg, Format::Svg) {
        let equilibria = find_steady_states(&op, &model, &p)?;
        fs::write(
            cfg.output.dir.join("phase.svg"),
            svg::phase(&trajectories, &equilibria),
        )?;
    }
    Ok(())
}

fn cmd_operating_diagram(cfg: &RunConfig) -> Result<(), Failure> {
    let model = model_of(cfg)?;
    let p = cfg.parameters.to_bio();
    let Operating::Grid {
        s_in_min,
        s_in_max,
        d_min,
        d_max,
        resolution,
    } = cfg.operating
    else {
        return Err(Failure::config("operating-diagram requires grid mode"));
    };

    let grid = grid_diagram(
        (s_in_min, s_in_max),
        (d_min, d_max),
        (resolution[0], resolution[1]),
        &model,
        &p,
    )?;
    let codim2 = codim2_candidates(&model, &p, (d_min.max(0.01 * d_max), d_max))?;

    if wants(cfg, Format::Csv) {
        let ns = grid.s_in_values.len();
        let mut regions = String::from("S_in,D,region\n");
        for (di, &d) in grid.d_values.iter().enumerate() {
            for (si, &s_in) in grid.s_in_values.iter().enumerate() {
                regions.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sig(s_in),
                    fmt_sig(d),
                    grid.labels[di * ns + si]
                ));
            }
        }
        fs::write(cfg.output.dir.join("regions.csv"), regions)?;

        let mut curves = String::from("curve_id,S_in,D\n");
        for curve in &grid.curves {
            for &(s_in, d) in &curve.samples {
                curves.push_str(&format!("{},{},{}\n", curve.id, fmt_sig(s_in), fmt_sig(d)));
            }
        }
        fs::write(cfg.output.dir.join("curves.csv"), curves)?;

        let mut points = String::from("S_in,D,curves\n");
        for c in &codim2 {
            let names: Vec<String> = c.curves.iter().map(|id| id.to_string()).collect();
            points.push_str(&format!(
                "{},{},{}\n",
                fmt_sig(c.s_in),
                fmt_sig(c.d),
                names.join("+")
            ));
        }
        fs::write(cfg.output.dir.join("codim2.csv"), points)?;
    }
    if wants(cfg, Format::Svg) {
        fs::write(
            cfg.output.dir.join("diagram.svg"),
            svg::diagram(&grid, &codim2),
        )?;
    }
    println!(
        "grid {}x{}: {} cells, {} codim-2 candidate(s)",
        grid.s_in_values.len(),
        grid.d_values.len(),
        grid.labels.len(),
        codim2.len()
    );
    Ok(())
}

fn cmd_bifurcation(cfg: &RunConfig) -> Result<(), Failure> {
    let model = model_of(cfg)?;
    let p = cfg.parameters.to_bio();
    let Operating::Line {
        s_in,
        d_min,
        d_max,
        samples,
    } = cfg.operating
    else {
        return Err(Failure::config("bifurcation requires line mode"));
    };

    let sigma = scan_dilution(s_in, (d_min, d_max), &model, &p)?;
    let d_values: Vec<f64> = (0..samples)
        .map(|k| d_min + (d_max - d_min) * k as f64 / (samples - 1) as f64)
        .collect();
    let rows = branch_table(s_in, &d_values, &model, &p)?;

    println!("D,type,pair");
    let mut sig_csv = String::from("D,type,pair\n");
    for pt in &sigma {
        let line = format!(
            "{},transcritical,{}={}",
            fmt_sig(pt.d),
            pt.pair.0,
            pt.pair.1
        );
        println!("{line}");
        sig_csv.push_str(&line);
        sig_csv.push('\n');
    }
    if wants(cfg, Format::Csv) {
        fs::write(cfg.output.dir.join("sigma.csv"), sig_csv)?;

        let mut branches = String::from("D,branch,S,x1,x2,stability\n");
        for row in &rows {
            for ss in &row.states {
                let slot = match ss.kind {
                    chemostat::equilibria::SteadyStateKind::E0 => 0,
                    chemostat::equilibria::SteadyStateKind::E1 => 1,
                    chemostat::equilibria::SteadyStateKind::E2 => 2,
                    chemostat::equilibria::SteadyStateKind::Coexistence => 3,
                };
                let letter = row.profile[slot].map(class_letter).unwrap_or("M");
                branches.push_str(&format!(
                    "{},{},{},{},{},{letter}\n",
                    fmt_sig(row.d),
                    ss.kind,
                    fmt_sig(ss.s),
                    fmt_sig(ss.x1),
                    fmt_sig(ss.x2)
                ));
            }
        }
        fs::write(cfg.output.dir.join("branches.csv"), branches)?;
    }
    if wants(cfg, Format::Svg) {
        fs::write(
            cfg.output.dir.join("bifurcation.svg"),
            svg::bifurcation(&rows, &sigma),
        )?;
    }
    Ok(())
}
