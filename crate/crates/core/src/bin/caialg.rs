use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use caialg::cai::CRule;
use caialg::cli::{self, ConfigError, RunConfig, SuiteId, SuiteOutcome, SweepGrid, EXIT_USAGE};
use caialg::report::Format;

#[derive(Parser)]
#[command(name = "caialg", version, about = "Finite-section verification of an approximately unital operator algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the lemma suites.
    Verify(Common),
    /// Dump the level-wise spectrum of an element.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Spectral points of modulus at most delta are dropped (0 is always kept).
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Run the weighted convolution algebra checks.
    Hbeta(Common),
    /// Run contractivity, similarity, power and resolvent checks over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n_max_list: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        eps_list: Option<Vec<f64>>,
        /// Multiples of 4 p(a) eps used as resolvent sample radii.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Linear weight rule c_n = n + offset.
    #[arg(long, conflicts_with = "c_table")]
    c_offset: Option<f64>,
    /// Explicit weight table c_1,c_2,...
    #[arg(long, value_delimiter = ',')]
    c_table: Option<Vec<f64>>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Suites to run, in order (comma separated).
    #[arg(long, value_delimiter = ',')]
    lemmas: Option<Vec<String>>,
    #[arg(long = "hbeta-c")]
    hbeta_c: Option<f64>,
    #[arg(long = "hbeta-n")]
    hbeta_n: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file holding an element (used by spectrum and sweep).
    #[arg(long)]
    element: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(offset) = self.c_offset {
            cfg.c_rule = CRule::Linear { offset };
        }
        if let Some(values) = &self.c_table {
            cfg.c_rule = CRule::Table { values: values.clone() };
        }
        if let Some(n) = self.n_max {
            cfg.n_max = n;
        }
        if let Some(names) = &self.lemmas {
            cfg.lemmas = names.iter().map(|s| s.parse::<SuiteId>()).collect::<Result<_, _>>()?;
        }
        if let Some(c) = self.hbeta_c {
            cfg.hbeta.c = c;
        }
        if let Some(n) = self.hbeta_n {
            cfg.hbeta.n = n;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(path) = &self.element {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
            cfg.element = Some(serde_json::from_str(&text)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, outcome: SuiteOutcome) -> u8 {
    match cli::write_reports(cfg, &outcome.reports) {
        Ok(Some(text)) => print!("{text}"),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE as u8;
        }
    }
    let s = cli::summary(&outcome.reports);
    eprintln!("{} pass, {} fail, {} inconclusive", s["pass"], s["fail"], s["inconclusive"]);
    if outcome.inconclusive > 0 {
        eprintln!("warning: {} check(s) inconclusive on this truncation", outcome.inconclusive);
    }
    for r in outcome.reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {}: measured {} vs bound {} ({})", r.lemma_id, r.measured, r.bound, r.notes);
    }
    outcome.exit_code as u8
}

fn run(cli: Cli) -> Result<u8, ConfigError> {
    Ok(match cli.command {
        Command::Verify(common) => {
            let cfg = common.resolve()?;
            let outcome = cli::run_suite(&cfg)?;
            emit(&cfg, outcome)
        }
        Command::Hbeta(common) => {
            let mut cfg = common.resolve()?;
            cfg.lemmas = vec![SuiteId::Hbeta];
            let outcome = cli::run_suite(&cfg)?;
            emit(&cfg, outcome)
        }
        Command::Spectrum { common, delta } => {
            let cfg = common.resolve()?;
            let text = cli::run_spectrum(&cfg, delta)?;
            match &cfg.out {
                Some(path) => std::fs::write(path, text).map_err(|source| ConfigError::Io { path: path.clone(), source })?,
                None => print!("{text}"),
            }
            0
        }
        Command::Sweep { common, n_max_list, k_list, eps_list, radii } => {
            let cfg = common.resolve()?;
            let d = SweepGrid::default();
            let grid = SweepGrid {
                n_max: n_max_list.unwrap_or(d.n_max),
                k: k_list.unwrap_or(d.k),
                eps: eps_list.unwrap_or(d.eps),
                radii: radii.unwrap_or(d.radii),
            };
            let outcome = cli::run_sweep(&cfg, &grid)?;
            emit(&cfg, outcome)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
