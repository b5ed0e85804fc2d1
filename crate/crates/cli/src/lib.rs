//! The `tomo` command-line tool.
//!
//! Exit codes: 0 on success, 1 when a well-formed problem is infeasible or
//! degenerate, 2 on usage, schema and guard errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tomo", version, about = "Discrete tomography on the integer lattice")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for verbs that take several input files.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Write the X-rays of a lattice set as an instance file.
    Xray(XrayArgs),
    /// Reconstruct a binary set from an instance.
    Reconstruct(ReconstructArgs),
    /// Decide whether a set is determined by its X-rays.
    Unique(UniqueArgs),
    /// Count the binary solutions of an instance.
    Count(CountArgs),
    /// Build the zonotope switching pair of a direction set.
    Switch(SwitchArgs),
    /// Double-resolution instances.
    Dr {
        #[command(subcommand)]
        cmd: DrCmd,
    },
    /// Particle tracking.
    Track {
        #[command(subcommand)]
        cmd: TrackCmd,
    },
    /// Grain maps as balanced power diagrams.
    Grains {
        #[command(subcommand)]
        cmd: GrainsCmd,
    },
    /// Prouhet-Tarry-Escott solutions.
    Pte {
        #[command(subcommand)]
        cmd: PteCmd,
    },
    /// X-ray difference of two sets.
    Stability(StabilityArgs),
}

#[derive(Debug, Args)]
pub struct XrayArgs {
    /// Set file to project.
    #[arg(long, conflicts_with = "random")]
    pub set: Option<PathBuf>,
    /// Project a random set of this many points instead.
    #[arg(long)]
    pub random: Option<usize>,
    /// Side of the box the random set is drawn from.
    #[arg(long, default_value_t = 6)]
    pub size: i64,
    /// Dimension of the random set.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Direction, such as `1,-1`. Repeat for several.
    #[arg(long = "dir", required = true, value_parser = parse_ints, allow_hyphen_values = true)]
    pub dirs: Vec<Ints>,
    /// Also write the projected set here.
    #[arg(long)]
    pub set_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Instance file. Repeat to solve several.
    #[arg(long = "instance", required = true)]
    pub instances: Vec<PathBuf>,
    /// Exhaustive search (three or more directions).
    #[arg(long, conflicts_with = "alternating")]
    pub brute: bool,
    /// Alternating-direction heuristic (three or more directions).
    #[arg(long)]
    pub alternating: bool,
    #[arg(long, default_value_t = tomo_core::reconm::DEFAULT_MAX_ROUNDS)]
    pub max_rounds: usize,
    /// Allow any nonnegative integer weights (two directions only).
    #[arg(long)]
    pub natural: bool,
    /// Search box `lo:hi`, such as `0,0:5,5`. Defaults to the grid's box.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub bbox: Option<tomo_core::BoundingBox>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UniqueArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long = "dir", required = true, value_parser = parse_ints, allow_hyphen_values = true)]
    pub dirs: Vec<Ints>,
    /// Search box for three or more directions. Defaults to the grid's box.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub bbox: Option<tomo_core::BoundingBox>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long = "instance", required = true)]
    pub instances: Vec<PathBuf>,
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub bbox: Option<tomo_core::BoundingBox>,
}

#[derive(Debug, Args)]
pub struct SwitchArgs {
    #[arg(long = "dir", required = true, value_parser = parse_ints, allow_hyphen_values = true)]
    pub dirs: Vec<Ints>,
    /// Corner of the zonotope. Defaults to the origin.
    #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
    pub base: Option<Ints>,
    /// Translation multiple per direction. Defaults to a separating choice.
    #[arg(long, value_parser = parse_ints)]
    pub steps: Option<Ints>,
    /// Draw the planar pair as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DrCmd {
    /// Build an instance from a binary PGM image.
    Make {
        #[arg(long)]
        image: PathBuf,
        /// Block side.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Tolerance for unreliable blocks.
        #[arg(long, default_value_t = 0)]
        epsilon: u32,
        /// Block `i,j` to mark unreliable. Repeat for several.
        #[arg(long = "unreliable", value_parser = parse_ints)]
        unreliable: Vec<Ints>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve instances, writing a binary PGM.
    Solve {
        #[arg(long = "instance", required = true)]
        instances: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RollingModel {
    NearestPredecessor,
    ConstantVelocity,
}

#[derive(Debug, Subcommand)]
pub enum TrackCmd {
    /// Optimal tracks through known frames under squared step costs.
    Markov {
        /// Set file with the points of one frame. Repeat in time order.
        #[arg(long = "frame", required = true)]
        frames: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rolling-horizon reconstruction from a known first frame.
    Rolling {
        /// Set file with the first frame.
        #[arg(long)]
        first: PathBuf,
        /// Two-direction instance file for each later frame, in time order.
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = RollingModel::ConstantVelocity)]
        model: RollingModel,
        /// Also write the reconstructed frames as set files `<prefix><tau>.json`.
        #[arg(long)]
        frames_out: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GrainsCmd {
    /// Label a pixel box by the cells of a diagram.
    Assign {
        /// Diagram file with `sites`, `matrices` and `weights`.
        #[arg(long, conflicts_with = "random")]
        spec: Option<PathBuf>,
        /// Use a random diagram with this many grains instead.
        #[arg(long)]
        random: Option<usize>,
        /// Domain `rows,cols`.
        #[arg(long, value_parser = parse_ints)]
        size: Ints,
        /// Output prefix: writes `<prefix>.pgm` and `<prefix>.json`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit diagram weights to a label map under volume bounds.
    Fit {
        /// Label map PGM, label `j` stored as `j + 1` and 0 for no grain.
        #[arg(long)]
        labels: PathBuf,
        /// File with `sites` and `matrices`; other fields are ignored.
        #[arg(long)]
        spec: PathBuf,
        /// Relative volume tolerance.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PteCmd {
    /// Check equal power sums up to degree k.
    Verify {
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        x: Ints,
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        y: Ints,
        #[arg(long)]
        k: usize,
    },
    /// Project a set along `c`, as the sorted multiset of `<c, p>`.
    Project {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        c: Ints,
    },
    /// Solution of degree m from the switching pair of m+1 directions.
    Derive {
        #[arg(long = "dir", required = true, value_parser = parse_ints, allow_hyphen_values = true)]
        dirs: Vec<Ints>,
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        base: Option<Ints>,
        #[arg(long, value_parser = parse_ints, allow_hyphen_values = true)]
        c: Ints,
    },
    /// The Thue-Morse solution of degree k.
    Prouhet {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long = "dir", required = true, value_parser = parse_ints, allow_hyphen_values = true)]
    pub dirs: Vec<Ints>,
}

/// Comma-separated integers, such as `1,-2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ints(pub Vec<i64>);

fn parse_ints(s: &str) -> Result<Ints, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Ints)
}

fn parse_box(s: &str) -> Result<tomo_core::BoundingBox, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected `lo:hi`")?;
    tomo_core::BoundingBox::new(parse_ints(lo)?.0, parse_ints(hi)?.0).map_err(|e| e.to_string())
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INFEASIBLE, message: message.into() }
    }
}

impl From<tomo_core::Error> for Failure {
    fn from(e: tomo_core::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    if cli.jobs == 0 {
        let _ = writeln!(err, "error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    match commands::dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}
