//! Command-line front end. [`run`] parses arguments, executes one command
//! inside a rayon pool of the requested width and returns the exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dm::{is_degraded, rpdbc_region_with, superposition_region_with, DmOptions, DmRatePoint, RpdbcModel};
use crate::envelope::DegradedBC;
use crate::error::{Error, Result};
use crate::gaussian::GaussianBCModel;
use crate::gvbc::{boundary_sweep_seeded, default_lambda_grid, GvbcRatePoint};
use crate::prob::{DMChannel, JointDist, Unit, DEFAULT_GRID_CAP};
use crate::suites::{run_suite, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_NOT_DEGRADED: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

pub const GVBC_REGION_SCHEMA: &str = "fbregion.gvbc-region.v1";
pub const DM_REGION_SCHEMA: &str = "fbregion.dm-region.v1";
pub const DM_CHANNEL_SCHEMA: &str = "fbregion.dm-channel.v1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "fbregion", version, about = "Capacity regions and feedback checks for degraded broadcast channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input model or channel (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Comma-separated slopes λ ≥ 1 (gvbc-region).
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,

    /// Grid resolution (dm-region, envelope suites).
    #[arg(long, global = true)]
    pub resolution: Option<usize>,

    /// Worker threads.
    #[arg(long, global = true, env = "FBREGION_WORKERS")]
    pub workers: Option<usize>,

    #[arg(long, global = true)]
    pub unit: Option<UnitArg>,

    /// Instances per suite (candidate budget for extremality).
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    #[arg(long, global = true)]
    pub format: Option<Format>,

    /// Tolerance override in nats for every non-diagnostic check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary of the Gaussian vector broadcast region by hyperplane sweep.
    GvbcRegion,
    /// Runs a verification suite and writes a JSON report.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Frontier of a degraded DM broadcast channel or of a reversely
    /// degraded product.
    DmRegion {
        /// Auxiliary symbols added past the cardinality bound.
        #[arg(long, default_value_t = 0)]
        extra_aux: usize,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Bits,
    Nats,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Unit {
        match u {
            UnitArg::Bits => Unit::Bits,
            UnitArg::Nats => Unit::Nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A component or a whole single-BC input: an explicit cascade or a joint
/// channel `q(y,z|x)` whose degradedness is checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BcSpec {
    Cascade {
        stage1: DMChannel,
        stage2: DMChannel,
    },
    Joint {
        y_size: usize,
        z_size: usize,
        channel: DMChannel,
    },
}

impl BcSpec {
    pub fn resolve(self) -> Result<DegradedBC> {
        match self {
            BcSpec::Cascade { stage1, stage2 } => DegradedBC::new(stage1, stage2),
            BcSpec::Joint {
                y_size,
                z_size,
                channel,
            } => is_degraded(&channel, y_size, z_size),
        }
    }
}

/// `dm-region` input.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DmInput {
    Bc {
        #[serde(default)]
        schema: Option<String>,
        #[serde(flatten)]
        bc: BcSpec,
    },
    Rpdbc {
        #[serde(default)]
        schema: Option<String>,
        component1: BcSpec,
        component2: BcSpec,
    },
}

struct Header {
    command: String,
    seed: u64,
    input_sha256: String,
    unit: Unit,
}

impl Header {
    fn csv(&self, schema: &str) -> String {
        format!(
            "# fbregion {VERSION}\n# schema: {schema}\n# command: {}\n# seed: {}\n# input-sha256: {}\n# unit: {}\n",
            self.command, self.seed, self.input_sha256, self.unit
        )
    }

    fn json(&self, schema: &str) -> serde_json::Map<String, serde_json::Value> {
        let mut m = serde_json::Map::new();
        m.insert("schema".into(), schema.into());
        m.insert("tool".into(), format!("fbregion {VERSION}").into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("input_sha256".into(), self.input_sha256.clone().into());
        m.insert("unit".into(), self.unit.to_string().into());
        m
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn read_input(path: Option<&Path>) -> Result<(Vec<u8>, String)> {
    match path {
        Some(p) => {
            let bytes = std::fs::read(p)?;
            let hash = sha256_hex(&bytes);
            Ok((bytes, hash))
        }
        None => Ok((Vec::new(), "none".into())),
    }
}

fn require_input(path: Option<&Path>) -> Result<(Vec<u8>, String)> {
    if path.is_none() {
        return Err(Error::InvalidParameter("--input is required".into()));
    }
    read_input(path)
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Result of a command: output text and exit code.
struct Outcome {
    text: String,
    code: i32,
}

fn gvbc_region(cli: &Cli) -> Result<Outcome> {
    let (bytes, hash) = require_input(cli.input.as_deref())?;
    let model: GaussianBCModel = serde_json::from_slice(&bytes)?;
    let lambdas = cli.lambda_grid.clone().unwrap_or_else(default_lambda_grid);
    let points = boundary_sweep_seeded(&model, &lambdas, cli.seed)?;
    let unit: Unit = cli.unit.map_or(Unit::Nats, Unit::from);
    let header = Header {
        command: "gvbc-region".into(),
        seed: cli.seed,
        input_sha256: hash,
        unit,
    };
    let code = if points.iter().all(|p| p.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = header.csv(GVBC_REGION_SCHEMA);
            out.push_str("# feedback: perfect output feedback from both receivers leaves this region unchanged\n");
            out.push_str("lambda,r1,r2,converged,b1,b2\n");
            for p in &points {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.lambda.map_or(String::new(), |l| l.to_string()),
                    unit.from_nats(p.r1),
                    unit.from_nats(p.r2),
                    p.converged,
                    join_f64(&p.b1.row_major()),
                    join_f64(&p.b2.row_major())
                );
            }
            out
        }
        Format::Json => {
            let mut m = header.json(GVBC_REGION_SCHEMA);
            let pts: Vec<GvbcRatePoint> = points
                .into_iter()
                .map(|mut p| {
                    p.r1 = unit.from_nats(p.r1);
                    p.r2 = unit.from_nats(p.r2);
                    p
                })
                .collect();
            m.insert("feedback_invariant".into(), true.into());
            m.insert("points".into(), serde_json::to_value(pts)?);
            serde_json::to_string_pretty(&m)? + "\n"
        }
    };
    Ok(Outcome { text, code })
}

fn verify(cli: &Cli, suite: Suite) -> Result<Outcome> {
    let (bytes, hash) = read_input(cli.input.as_deref())?;
    let model = if suite == Suite::Extremality && !bytes.is_empty() {
        Some(serde_json::from_slice::<GaussianBCModel>(&bytes)?)
    } else {
        None
    };
    let cfg = SuiteConfig {
        seed: cli.seed,
        samples: cli.samples,
        unit: cli.unit.map(Unit::from),
        tolerance: cli.tolerance,
        resolution: cli.resolution,
        model,
        crossover: None,
    };
    let report = run_suite(suite, &cfg)?;
    let header = Header {
        command: format!("verify {suite}"),
        seed: cli.seed,
        input_sha256: hash,
        unit: report.unit,
    };
    let mut m = header.json(crate::report::REPORT_SCHEMA);
    let code = if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
    m.insert("report".into(), serde_json::to_value(&report)?);
    Ok(Outcome {
        text: serde_json::to_string_pretty(&m)? + "\n",
        code,
    })
}

fn joint_cell(j: &JointDist) -> String {
    join_f64(j.mass())
}

fn dm_region(cli: &Cli, extra_aux: usize) -> Result<Outcome> {
    let (bytes, hash) = require_input(cli.input.as_deref())?;
    let input: DmInput = serde_json::from_slice(&bytes)?;
    let opts = DmOptions {
        resolution: cli.resolution,
        extra_aux,
        cap: DEFAULT_GRID_CAP,
    };
    let (points, product) = match input {
        DmInput::Bc { bc, .. } => (superposition_region_with(&bc.resolve()?, &opts)?, false),
        DmInput::Rpdbc {
            component1, component2, ..
        } => {
            let model = RpdbcModel::new(component1.resolve()?, component2.resolve()?);
            (rpdbc_region_with(&model, &opts)?, true)
        }
    };
    let unit: Unit = cli.unit.map_or(Unit::Bits, Unit::from);
    let conv = |v: f64| unit.from_nats(Unit::Bits.to_nats(v));
    let header = Header {
        command: "dm-region".into(),
        seed: cli.seed,
        input_sha256: hash,
        unit,
    };
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = header.csv(DM_REGION_SCHEMA);
            out.push_str(if product {
                "r0,r1,r2,p_u1_x1,p_u2_x2\n"
            } else {
                "r1,r2,p_u_x\n"
            });
            for p in &points {
                let joints: Vec<String> = p.joints.iter().map(joint_cell).collect();
                match p.r0 {
                    Some(r0) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            conv(r0),
                            conv(p.r1),
                            conv(p.r2),
                            joints.join(",")
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{},{},{}", conv(p.r1), conv(p.r2), joints.join(","));
                    }
                }
            }
            out
        }
        Format::Json => {
            let mut m = header.json(DM_REGION_SCHEMA);
            let pts: Vec<DmRatePoint> = points
                .into_iter()
                .map(|mut p| {
                    p.r0 = p.r0.map(conv);
                    p.r1 = conv(p.r1);
                    p.r2 = conv(p.r2);
                    p
                })
                .collect();
            m.insert("points".into(), serde_json::to_value(pts)?);
            serde_json::to_string_pretty(&m)? + "\n"
        }
    };
    Ok(Outcome { text, code: EXIT_OK })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::GvbcRegion => gvbc_region(cli),
        Command::Verify { suite } => verify(cli, *suite),
        Command::DmRegion { extra_aux } => dm_region(cli, *extra_aux),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotDegraded { .. } => EXIT_NOT_DEGRADED,
        _ => EXIT_INPUT,
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("fbregion: cannot start {workers} workers: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, out.text.as_bytes()),
                None => std::io::stdout().write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("fbregion: cannot write output: {e}");
                return EXIT_INPUT;
            }
            out.code
        }
        Err(e) => {
            eprintln!("fbregion: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "fbregion",
            "verify",
            "massey",
            "--seed",
            "7",
            "--lambda-grid",
            "1,2.5",
            "--unit",
            "nats",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.lambda_grid, Some(vec![1.0, 2.5]));
        assert!(matches!(cli.command, Command::Verify { suite: Suite::Massey }));
    }

    #[test]
    fn unknown_suite_is_an_input_error() {
        assert_eq!(run(["fbregion", "verify", "nope"]), EXIT_INPUT);
    }

    #[test]
    fn dm_input_variants_parse() {
        let cascade = r#"{"kind":"bc","stage1":{"axes":[2,2],"mass":[0.9,0.1,0.1,0.9]},
            "stage2":{"axes":[2,2],"mass":[0.9,0.1,0.1,0.9]}}"#;
        assert!(matches!(
            serde_json::from_str::<DmInput>(cascade).unwrap(),
            DmInput::Bc {
                bc: BcSpec::Cascade { .. },
                ..
            }
        ));
        let joint = r#"{"kind":"bc","y_size":2,"z_size":2,
            "channel":{"axes":[2,4],"mass":[0.8,0,0.2,0,0,0.2,0,0.8]}}"#;
        let DmInput::Bc { bc, .. } = serde_json::from_str::<DmInput>(joint).unwrap() else {
            panic!("expected a single BC");
        };
        assert!(matches!(bc.resolve(), Err(Error::NotDegraded { .. })));
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
