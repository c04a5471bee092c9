use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use pwcenter::cli::{
    exit_code, parse_spec, remediation, render_csv, render_report, run_report, RunOptions,
};

/// Period-function analysis of a piecewise Hamiltonian system.
#[derive(Parser, Debug)]
#[command(name = "analyze", version)]
struct Args {
    /// System specification file.
    specfile: PathBuf,
    /// Series order in powers of r0.
    #[arg(long)]
    order: Option<u32>,
    /// Largest axis radius sampled.
    #[arg(long)]
    rmax: Option<f64>,
    /// Number of CSV sample radii.
    #[arg(long)]
    samples: Option<usize>,
    /// Verdict tolerance on |T - T(0)|.
    #[arg(long)]
    tol: Option<f64>,
    /// Write samples to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Omit the timestamp comment line from the CSV.
    #[arg(long)]
    no_timestamp: bool,
    /// Seed for the jittered sample grid.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.specfile) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.specfile.display());
            return ExitCode::from(2);
        }
    };
    let parsed = match parse_spec(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}\nhint: {}", remediation(&e));
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let file_opts = RunOptions::default().merged(&parsed.spec.options);
    let options = RunOptions {
        order: args.order.unwrap_or(file_opts.order),
        r_max: args.rmax.unwrap_or(file_opts.r_max),
        samples: args.samples.unwrap_or(file_opts.samples),
        tol: args.tol.unwrap_or(file_opts.tol),
        seed: args.seed.unwrap_or(file_opts.seed),
    };
    let output = match run_report(&parsed.system, &options) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}\nhint: {}", remediation(&e));
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    print!("{}", render_report(&parsed.system, &options, &output.report));
    if let Some(path) = &args.csv {
        if output.report.classification.is_center() {
            let stamp = (!args.no_timestamp).then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
                    .to_string()
            });
            let csv = render_csv(&output.rows, stamp.as_deref());
            if let Err(e) = std::fs::write(path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        } else {
            eprintln!("note: not a center; no period CSV written");
        }
    }
    ExitCode::SUCCESS
}
