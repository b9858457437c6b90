//! Command-line front end. `run` parses arguments, dispatches, and maps
//! every failure onto the exit-code contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a reproduced expectation failed, or output could not be written |
//! | 2 | identity mismatch or failed witness validation |
//! | 3 | unreadable or malformed input, bad flags |
//! | 4 | shape or dimension mismatch |
//! | 5 | hypothesis fails |
//! | 6 | obstruction detected |
//! | 7 | caps exceeded |

mod reproduce;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::certs::{verify_certificate, CertError, Certificate};
use crate::polycore::{MatPoly, MatPolyJson, PolyError};
use crate::sections::{
    asymptotic_obstruction, in_k_g, in_l_g, mu_nu_profile, GridSpec, SectionKind, SectionsError,
};
use crate::witness::{
    construct_2x2_univariate_witness, construct_global_witness_nsd, merge_far_field, GlobalCaps, MergeCaps,
    TwoByTwoCaps, ValidationReport, WitnessError, WitnessRational,
};

pub use reproduce::{reproduce, Scenario, ScenarioRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error("{0}")]
    Dimension(String),
    #[error("identity mismatch: {0}")]
    Mismatch(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("obstruction detected: {0}")]
    Obstruction(String),
    #[error("caps exceeded: {0}")]
    Caps(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) | CliError::Output(_) => 1,
            CliError::Mismatch(_) => 2,
            CliError::Usage(_) | CliError::Input { .. } => 3,
            CliError::Dimension(_) => 4,
            CliError::Hypothesis(_) => 5,
            CliError::Obstruction(_) => 6,
            CliError::Caps(_) => 7,
        }
    }
}

impl From<SectionsError> for CliError {
    fn from(e: SectionsError) -> Self {
        match e {
            SectionsError::Shape(_) | SectionsError::Dimension { .. } => CliError::Dimension(e.to_string()),
            SectionsError::Poly(p) => p.into(),
            SectionsError::Grid(_) | SectionsError::Unsupported(_) => CliError::Usage(e.to_string()),
            SectionsError::Io(io) => CliError::Output(io),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Parse(_) | PolyError::NonFinite(_) => CliError::Usage(e.to_string()),
            _ => CliError::Dimension(e.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::HypothesisFails { .. } | WitnessError::Precondition(_) => CliError::Hypothesis(e.to_string()),
            WitnessError::Shape(_) => CliError::Dimension(e.to_string()),
            WitnessError::DegreeInsufficient { .. }
            | WitnessError::CapExceeded(_)
            | WitnessError::FitFails(_)
            | WitnessError::ValidationFails { .. } => CliError::Caps(e.to_string()),
            WitnessError::Poly(p) => p.into(),
            WitnessError::Sections(s) => s.into(),
            WitnessError::Pointwise(p) => CliError::Failed(p.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "Finsler sections, witnesses and exact certificate checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long, default_value_t = crate::pointwise::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn check(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectionMode {
    /// `{r : F − rG ≻ 0}`.
    Plain,
    /// The same set intersected with `(0, ∞)`.
    Positive,
}

impl From<SectionMode> for SectionKind {
    fn from(m: SectionMode) -> Self {
        match m {
            SectionMode::Plain => SectionKind::Plain,
            SectionMode::Positive => SectionKind::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessMode {
    NsdGlobal,
    #[value(name = "univariate-2x2")]
    Univariate2x2,
    Merge,
    Obstruction,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSV of `(μ, ν)` and `K_G`/`L_G` flags over a grid.
    Section {
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long = "G")]
        g: PathBuf,
        #[arg(long, default_value = "-5:5:101", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value_t = SectionMode::Plain)]
        mode: SectionMode,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Builds a witness `r` with `F − rG ≻ 0`, or checks for an obstruction.
    Witness {
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long = "G")]
        g: PathBuf,
        #[arg(long, value_enum)]
        mode: WitnessMode,
        /// Extra validation grid for the emitted witness.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long = "deg-cap", default_value_t = 12)]
        deg_cap: usize,
        #[arg(long = "k-cap", default_value_t = 64)]
        k_cap: u32,
        /// Section used by the obstruction check.
        #[arg(long = "section", value_enum, default_value_t = SectionMode::Positive)]
        section: SectionMode,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Exact check of a certificate file.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long = "F")]
        f: Option<PathBuf>,
        #[arg(long = "G", conflicts_with = "gs")]
        g: Option<PathBuf>,
        #[arg(long = "Gs", value_delimiter = ',', num_args = 1..)]
        gs: Vec<PathBuf>,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Grid validation of a witness file.
    VerifyWitness {
        #[arg(long, alias = "witness")]
        cert: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long = "G")]
        g: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Runs a canned scenario and prints a PASS/FAIL table.
    Reproduce {
        #[arg(value_enum)]
        name: Scenario,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long = "deg-cap", default_value_t = 8)]
        deg_cap: u32,
        #[arg(long = "iter-cap", default_value_t = 3)]
        iter_cap: u32,
        #[command(flatten)]
        config: RunConfig,
    },
    /// CSV of `K_G` and `L_G` membership for one or more `G`.
    Classify {
        #[arg(long = "G", conflicts_with = "gs")]
        g: Option<PathBuf>,
        #[arg(long = "Gs", value_delimiter = ',', num_args = 1..)]
        gs: Vec<PathBuf>,
        #[arg(long, default_value = "-5:5:101", allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        config: RunConfig,
    },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let text = e.render().to_string();
            let _ = if informational {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return if informational { 0 } else { 3 };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Section {
            f,
            g,
            grid,
            mode,
            config,
        } => cmd_section(&f, &g, &grid, mode, &config, stdout),
        Command::Witness {
            f,
            g,
            mode,
            grid,
            deg_cap,
            k_cap,
            section,
            config,
        } => {
            let caps = WitnessCaps { deg_cap, k_cap };
            cmd_witness(&f, &g, mode, grid.as_deref(), caps, section, &config, stdout, stderr)
        }
        Command::Verify { cert, f, g, gs, config } => {
            let gs = if let Some(g) = g { vec![g] } else { gs };
            cmd_verify(&cert, f.as_deref(), &gs, &config, stdout, stderr)
        }
        Command::VerifyWitness {
            cert,
            f,
            g,
            grid,
            config,
        } => cmd_verify_witness(&cert, &f, &g, grid.as_deref(), &config, stdout),
        Command::Reproduce {
            name,
            grid,
            deg_cap,
            iter_cap,
            config,
        } => {
            config.check()?;
            let grid = grid.map(|g| g.parse::<GridSpec>()).transpose()?;
            let rows = reproduce(name, grid.as_ref(), deg_cap, iter_cap, &config)?;
            let width = rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
            for row in &rows {
                writeln!(
                    stdout,
                    "{} {:width$}  {}",
                    if row.pass { "PASS" } else { "FAIL" },
                    row.check,
                    row.detail
                )?;
            }
            if let Some(path) = &config.out {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &rows {
                    w.serialize(row).map_err(|e| CliError::Failed(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
                write_atomic(path, &bytes)?;
            }
            match rows.iter().find(|r| !r.pass) {
                Some(row) => Err(CliError::Failed(format!("{}: {}", row.check, row.detail))),
                None => Ok(()),
            }
        }
        Command::Classify { g, gs, grid, config } => {
            let gs = if let Some(g) = g { vec![g] } else { gs };
            cmd_classify(&gs, &grid, &config, stdout)
        }
    }
}

pub fn read_matpoly(path: &Path) -> Result<MatPoly, CliError> {
    let input_err = |reason: String| CliError::Input {
        path: path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
    let json: MatPolyJson = serde_json::from_str(&text).map_err(|e| input_err(e.to_string()))?;
    MatPoly::try_from(json).map_err(|e| match e {
        PolyError::Parse(_) | PolyError::NonFinite(_) => input_err(e.to_string()),
        other => CliError::Dimension(format!("{}: {other}", path.display())),
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let input_err = |reason: String| CliError::Input {
        path: path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| input_err(e.to_string()))
}

/// Temp file in the destination directory, then rename, so a failed run
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Output(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn check_pair(f: &MatPoly, g: &MatPoly) -> Result<(), CliError> {
    if f.n() != g.n() || f.nvars() != g.nvars() {
        return Err(CliError::Dimension(format!(
            "dimension mismatch: F is {}x{} in {} variables but G is {}x{} in {}",
            f.n(),
            f.n(),
            f.nvars(),
            g.n(),
            g.n(),
            g.nvars()
        )));
    }
    Ok(())
}

fn grid_points(grid: &str, d: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let spec: GridSpec = grid.parse()?;
    if spec.dim() != d {
        return Err(CliError::Dimension(format!(
            "dimension mismatch: grid has {} axes but the matrices have {d} variables",
            spec.dim()
        )));
    }
    Ok(spec.points())
}

fn cmd_section(
    f: &Path,
    g: &Path,
    grid: &str,
    mode: SectionMode,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    config.check()?;
    let (f, g) = (read_matpoly(f)?, read_matpoly(g)?);
    check_pair(&f, &g)?;
    let points = grid_points(grid, f.nvars())?;
    let mut profile = mu_nu_profile(&f, &g, &points, config.tol)?;
    if mode == SectionMode::Positive {
        for s in &mut profile.sections {
            s.interval = s.interval.positive_part();
        }
    }
    let mut bytes = Vec::new();
    profile.write_csv(&mut bytes)?;
    emit(config.out.as_deref(), &bytes, stdout)
}

#[derive(Debug, Clone, Copy)]
struct WitnessCaps {
    deg_cap: usize,
    k_cap: u32,
}

/// Witness file: the wire fields `p`, `q`, `region`, `positive`, plus how it
/// was built and how it validated.
#[derive(Serialize)]
struct WitnessOutput<'a> {
    #[serde(flatten)]
    witness: &'a WitnessRational,
    mode: &'static str,
    details: serde_json::Value,
    report: &'a ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_report: Option<ValidationReport>,
}

fn details<T: Serialize>(value: T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    f: &Path,
    g: &Path,
    mode: WitnessMode,
    grid: Option<&str>,
    caps: WitnessCaps,
    section: SectionMode,
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    config.check()?;
    if caps.deg_cap == 0 || caps.k_cap == 0 {
        return Err(CliError::Usage("caps must be positive".into()));
    }
    let (f, g) = (read_matpoly(f)?, read_matpoly(g)?);
    check_pair(&f, &g)?;
    let obstruction = |kind: SectionKind| -> Result<(), CliError> {
        let report = asymptotic_obstruction(&f, &g, 100.0, kind, config.tol)?;
        match report.verdict {
            crate::sections::Verdict::RationalWitnessImpossible(why) => Err(CliError::Obstruction(why)),
            crate::sections::Verdict::NoObstruction => Ok(()),
        }
    };
    let (witness, mode_name, info, report) = match mode {
        WitnessMode::Obstruction => {
            obstruction(section.into())?;
            writeln!(stdout, "no obstruction detected")?;
            return Ok(());
        }
        WitnessMode::NsdGlobal => {
            let gcaps = GlobalCaps {
                max_deg: caps.deg_cap,
                k_cap: caps.k_cap,
                ..GlobalCaps::default()
            };
            let w = construct_global_witness_nsd(&f, &g, &gcaps)?;
            let info = serde_json::json!({
                "epsilon": w.epsilon, "R": w.radius, "k": w.k, "p_fit": w.p,
            });
            (w.witness(), "nsd-global", info, w.report)
        }
        WitnessMode::Univariate2x2 => {
            let w = construct_2x2_univariate_witness(&f, &g, &TwoByTwoCaps::default())?;
            let info = serde_json::json!({
                "transform": details(w.transform), "construction": details(&w.construction),
                "tail_pos": details(w.tail_pos), "tail_neg": details(w.tail_neg), "R": w.radius,
            });
            (w.witness, "univariate-2x2", info, w.report)
        }
        WitnessMode::Merge => {
            obstruction(SectionKind::Positive)?;
            let far = construct_2x2_univariate_witness(&f, &g, &TwoByTwoCaps::default())?;
            let merged = merge_far_field(&f, &g, &far.witness, &MergeCaps::default())?;
            let info = serde_json::json!({ "k": merged.k, "l": merged.l, "delta": merged.delta });
            (merged.witness, "merge", info, merged.report)
        }
    };
    let grid_report = match grid {
        Some(grid) => {
            let points = grid_points(grid, f.nvars())?;
            let r = witness.validate(&f, &g, &points, config.tol)?;
            if !r.passed {
                return Err(CliError::Caps(format!(
                    "witness fails the requested grid at {:?}, min λ = {:.3e}",
                    r.first_failure.clone().unwrap_or_default(),
                    r.min_lambda
                )));
            }
            Some(r)
        }
        None => None,
    };
    let _ = writeln!(
        stderr,
        "witness validated: {} of {} samples checked, min λmin(F − rG) = {:.6e}",
        report.checked, report.samples, report.min_lambda
    );
    let out = WitnessOutput {
        witness: &witness,
        mode: mode_name,
        details: info,
        report: &report,
        grid_report,
    };
    emit(config.out.as_deref(), &to_json(&out)?, stdout)
}

#[derive(Serialize)]
struct MismatchDiagnostic<'a> {
    status: &'static str,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<String>,
    row: usize,
    col: usize,
    monomial: &'a [u32],
    monomial_text: String,
    lhs: &'a str,
    rhs: &'a str,
}

fn cmd_verify(
    cert_path: &Path,
    f: Option<&Path>,
    gs: &[PathBuf],
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let cert: Certificate = read_json(cert_path)?;
    let f = f.map(read_matpoly).transpose()?;
    let gs = gs.iter().map(|p| read_matpoly(p)).collect::<Result<Vec<_>, _>>()?;
    let report = verify_certificate(&cert, f.as_ref(), &gs).map_err(|e| match e {
        CertError::Poly(p) => CliError::from(p),
        other => CliError::Usage(other.to_string()),
    })?;
    for step in &report.steps {
        writeln!(stdout, "{} {}", step.step, if step.verified { "verified" } else { "FAILED" })?;
    }
    if let Some(path) = &config.out {
        write_atomic(path, &to_json(&report)?)?;
    }
    match report.verdict.mismatch() {
        None => {
            writeln!(stdout, "{} certificate verified", report.kind)?;
            Ok(())
        }
        Some(m) => {
            let diag = MismatchDiagnostic {
                status: "mismatch",
                kind: report.kind,
                step: report.steps.iter().find(|s| !s.verified).map(|s| s.step.clone()),
                row: m.row,
                col: m.col,
                monomial: &m.monomial,
                monomial_text: crate::polycore::Monomial::new(m.monomial.clone()).to_string(),
                lhs: &m.lhs,
                rhs: &m.rhs,
            };
            let line = serde_json::to_string(&diag).map_err(|e| CliError::Failed(e.to_string()))?;
            writeln!(stderr, "{line}")?;
            Err(CliError::Mismatch(m.to_string()))
        }
    }
}

fn default_grid(d: usize) -> String {
    let steps = match d {
        1 => 10_001,
        2 => 101,
        _ => 11,
    };
    vec![format!("-10:10:{steps}"); d].join(",")
}

fn cmd_verify_witness(
    cert: &Path,
    f: &Path,
    g: &Path,
    grid: Option<&str>,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    config.check()?;
    let witness: WitnessRational = read_json(cert)?;
    let (f, g) = (read_matpoly(f)?, read_matpoly(g)?);
    check_pair(&f, &g)?;
    let grid = grid.map(str::to_string).unwrap_or_else(|| default_grid(f.nvars()));
    let points = grid_points(&grid, f.nvars())?;
    let report = witness.validate(&f, &g, &points, config.tol)?;
    emit(config.out.as_deref(), &to_json(&report)?, stdout)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "witness fails at {:?}: min λ = {:.3e}",
            report.first_failure.unwrap_or_default(),
            report.min_lambda
        )))
    }
}

fn cmd_classify(gs: &[PathBuf], grid: &str, config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.check()?;
    if gs.is_empty() {
        return Err(CliError::Usage("classify needs --G or --Gs".into()));
    }
    let gs = gs.iter().map(|p| read_matpoly(p)).collect::<Result<Vec<_>, _>>()?;
    let d = gs[0].nvars();
    if let Some(bad) = gs.iter().find(|g| g.nvars() != d) {
        return Err(CliError::Dimension(format!("dimension mismatch: G matrices have {d} and {} variables", bad.nvars())));
    }
    let points = grid_points(grid, d)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    for j in 1..=gs.len() {
        let suffix = if gs.len() == 1 { String::new() } else { format!("_{j}") };
        header.push(format!("in_KG{suffix}"));
        header.push(format!("in_LG{suffix}"));
    }
    let csv_err = |e: csv::Error| CliError::Failed(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for a in &points {
        let mut row: Vec<String> = a.iter().map(|v| v.to_string()).collect();
        for g in &gs {
            row.push(in_k_g(g, a, config.tol)?.to_string());
            row.push(in_l_g(g, a, config.tol)?.to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    emit(config.out.as_deref(), &bytes, stdout)
}
