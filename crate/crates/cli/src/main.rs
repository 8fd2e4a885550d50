use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpverify::forge::{generate, SpectrumSpec};
use lpverify::harness::{error_code, exit_code, run_suite, Suite, SuiteConfig};
use lpverify::output::write_report;
use lpverify::snapshot::{read_header, snapshot_write};
use lpverify::{Error, TorusGrid};

#[derive(Parser)]
#[command(
    name = "lpverify",
    version,
    about = "Littlewood-Paley verification suites on the periodic 3-torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report every check.
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n: usize,
        /// Box length; defaults to 2π.
        #[arg(long = "box")]
        box_length: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',')]
        s: Vec<f64>,
        /// Number of seeded test fields.
        #[arg(long, default_value_t = 1)]
        fields: usize,
        /// Power-law exponent of the test fields.
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<f64>,
        /// Field amplitude; 0 runs on the zero field.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Restrict k to LO,HI.
        #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
        k_window: Option<Vec<i32>>,
        /// Tolerance override NAME=VALUE for the check called NAME; repeatable.
        #[arg(long = "tol")]
        tolerances: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        svg: bool,
    },
    /// Build a field from a JSON spectrum spec and write a snapshot.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long = "box")]
        box_length: Option<f64>,
    },
    /// Print a snapshot header.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn config(cmd: Command) -> Result<SuiteConfig, Error> {
    let Command::Run {
        suite,
        n,
        box_length,
        seed,
        theta,
        s,
        fields,
        slope,
        amplitude,
        k_window,
        tolerances,
        out,
        threads,
        svg,
    } = cmd
    else {
        unreachable!("only run carries a suite config")
    };
    let mut cfg = SuiteConfig::new(suite.parse::<Suite>()?, n);
    if let Some(l) = box_length {
        cfg.box_length = l;
    }
    cfg.seed = seed;
    cfg.theta = theta;
    cfg.s = s;
    cfg.fields = fields;
    if let Some(a) = slope {
        cfg.slope = a;
    }
    if let Some(a) = amplitude {
        cfg.amplitude = a;
    }
    cfg.k_window = k_window.map(|w| [w[0], w[1]]);
    for t in tolerances {
        let (name, value) = t
            .rsplit_once('=')
            .ok_or_else(|| Error::Config(format!("tolerance {t:?} is not NAME=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Config(format!("tolerance value {value:?} is not a number")))?;
        cfg.tolerances.insert(name.to_string(), value);
    }
    cfg.out = out;
    cfg.threads = threads;
    cfg.svg = svg;
    Ok(cfg)
}

fn run(cmd: Command) -> i32 {
    let cfg = match config(cmd) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    let outcome = run_suite(&cfg);
    match &outcome {
        Ok(report) => {
            let total = report.checks.len();
            let failed = report.failures().count();
            println!(
                "suite {}: {} of {total} checks passed",
                cfg.suite.name(),
                total - failed
            );
            for c in report.failures() {
                println!(
                    "FAIL [{}] {} ({}) k={} measured {:e}, allowed {:e}",
                    c.suite,
                    c.name,
                    c.anchor,
                    c.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
                    c.value,
                    c.tolerance * c.scale
                );
            }
            for d in &report.decay {
                println!(
                    "decay [{}] {}: slope {:.3} ± {:.3}, predicted {:.3}",
                    d.suite,
                    d.series.term,
                    d.series.slope,
                    2.0 * d.series.slope_stderr,
                    d.series.predicted
                );
            }
            for s in &report.skipped {
                println!("skipped {s}");
            }
            if let Some(dir) = &cfg.out {
                if let Err(e) = write_report(report, dir, cfg.svg) {
                    eprintln!("error: writing report: {e}");
                    return error_code(&e);
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&outcome)
}

fn generate_cmd(
    spec: PathBuf,
    out: PathBuf,
    n: usize,
    box_length: Option<f64>,
) -> Result<(), Error> {
    let text = std::fs::read_to_string(&spec)?;
    let spec: SpectrumSpec = serde_json::from_str(&text)?;
    let grid = TorusGrid::new(n, box_length.unwrap_or(std::f64::consts::TAU))?;
    let u = generate(grid, &spec)?;
    snapshot_write(&u, &out)?;
    println!("wrote {} (n = {n}, energy {:e})", out.display(), u.energy());
    Ok(())
}

fn inspect_cmd(input: PathBuf) -> Result<(), Error> {
    let h = read_header(&input)?;
    println!("version     {}", h.version);
    println!("n           {}", h.n);
    println!("components  {}", h.components);
    println!("box_length  {}", h.box_length);
    println!("flags       {:#x}", h.flags);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        cmd @ Command::Run { .. } => run(cmd),
        Command::Generate {
            spec,
            out,
            n,
            box_length,
        } => match generate_cmd(spec, out, n, box_length) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                error_code(&e)
            }
        },
        Command::Inspect { input } => match inspect_cmd(input) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                error_code(&e)
            }
        },
    };
    ExitCode::from(code as u8)
}
