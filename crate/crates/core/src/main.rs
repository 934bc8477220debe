use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use linmgf::cli::{self, Config, OutputFormat, RunOptions, DEFAULT_MAX_PMF_ROWS};
use linmgf::CoefficientMode;

/// Conditional distributions and factorial moments of X given Y = A X.
#[derive(Parser, Debug)]
#[command(name = "linmgf", version)]
struct Args {
    /// TOML job configuration.
    #[arg(long)]
    config: PathBuf,

    /// Also compute brute-force oracle values and report agreement.
    #[arg(long)]
    verify: bool,

    /// Coefficient mode for every job (overrides the config).
    #[arg(long)]
    mode: Option<CoefficientMode>,

    /// Largest fiber for which a requested conditional pmf is listed.
    #[arg(long, default_value_t = DEFAULT_MAX_PMF_ROWS)]
    max_pmf_rows: usize,

    /// Output format: human, or json (alias json-like).
    #[arg(long)]
    output: Option<OutputFormat>,
}

fn diagnostic(kind: &str, message: &str, format: OutputFormat) {
    if format == OutputFormat::Json {
        let v = serde_json::json!({ "error": { "kind": kind, "message": message } });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    }
    eprintln!("error[{kind}]: {message}");
}

fn main() -> ExitCode {
    let args = Args::parse();
    let requested = args.output.unwrap_or_default();

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            diagnostic("Io", &format!("{}: {e}", args.config.display()), requested);
            return ExitCode::from(2);
        }
    };
    let config = Config::parse(&text).and_then(|c| match args.mode {
        Some(mode) => c.with_mode(mode),
        None => Ok(c),
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            diagnostic("Config", &e.to_string(), requested);
            return ExitCode::from(2);
        }
    };

    let format = args.output.unwrap_or(config.output);
    let options = RunOptions {
        verify: args.verify,
        max_pmf_rows: args.max_pmf_rows,
    };
    let report = cli::run(&config, &options);
    print!("{}", report.render(format));
    ExitCode::from(report.exit_code() as u8)
}
