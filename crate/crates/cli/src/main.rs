use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lpcss::css::Algorithm;
use lpcss::harness::{
    file_header, format_summary, gen_synthetic, report_from_file, run_experiment, save_matrix,
    write_outputs, ExperimentConfig, MatrixFormat, Mode,
};
use lpcss::PNorm;

#[derive(Parser)]
#[command(name = "lpcss", version, about = "Streaming and distributed lp column subset selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the adversarial (k+n)x(k+n) test matrix.
    GenSynthetic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: MatrixFormat,
    },
    /// Run an experiment and write metrics.csv, summary.csv and summary.txt.
    Run(Box<RunArgs>),
    /// Recompute the summary of a metrics.csv file.
    Report {
        metrics: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file. Flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    /// Comma-separated: regular, greedy, uniform, svd.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Single seed; shorthand for `--seeds <seed>`.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// `synthetic` or a matrix file.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    synthetic_n: Option<usize>,
    #[arg(long)]
    format: Option<MatrixFormat>,
    /// The CSV file starts with a header line.
    #[arg(long)]
    header: bool,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    coreset_size: Option<usize>,
    #[arg(long)]
    sketch_rows: Option<usize>,
    #[arg(long)]
    servers: Option<usize>,
    #[arg(long)]
    assignment: Option<PathBuf>,
    #[arg(long)]
    t_prime: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Keep the input column order instead of shuffling per seed.
    #[arg(long)]
    no_permute: bool,
    /// Run cells one after another.
    #[arg(long)]
    serial: bool,
    /// Write per-run transcripts for distributed runs.
    #[arg(long)]
    transcripts: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)
                .with_context(|| format!("reading {}", path.display()))?,
            None => {
                let (Some(mode), Some(algorithms), Some(k), Some(dataset)) =
                    (self.mode, self.algorithms.clone(), self.k, self.dataset.clone())
                else {
                    bail!("without --config, --mode, --algorithms, --k and --dataset are required");
                };
                let seeds = self.seeds.clone().or(self.seed.map(|s| vec![s])).unwrap_or_else(|| vec![0]);
                let mut c = ExperimentConfig::synthetic(mode, algorithms, self.synthetic_n.unwrap_or(1), k, seeds);
                c.dataset = dataset;
                c.synthetic_n = self.synthetic_n;
                c
            }
        };
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.algorithms {
            cfg.algorithms = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.p {
            cfg.p = PNorm::new(v)?;
        }
        if let Some(v) = self.seeds {
            cfg.seeds = v;
        }
        if let Some(v) = self.seed {
            cfg.seeds = vec![v];
        }
        if let Some(v) = self.dataset {
            cfg.dataset = v;
        }
        if self.synthetic_n.is_some() {
            cfg.synthetic_n = self.synthetic_n;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.header |= self.header;
        for (slot, v) in [
            (&mut cfg.batch_size, self.batch_size),
            (&mut cfg.coreset_size, self.coreset_size),
            (&mut cfg.sketch_rows, self.sketch_rows),
            (&mut cfg.t_prime, self.t_prime),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
        if let Some(v) = self.servers {
            cfg.servers = v;
        }
        if self.assignment.is_some() {
            cfg.assignment = self.assignment;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.output {
            cfg.output = v;
        }
        if self.no_permute {
            cfg.permute = false;
        }
        if self.serial {
            cfg.parallel = false;
        }
        cfg.transcripts |= self.transcripts;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::GenSynthetic { n, k, out, format } => {
            let a = gen_synthetic::<f64>(n, k)?;
            save_matrix(&out, &a, format).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}x{} matrix to {}", a.rows(), a.cols(), out.display());
        }
        Command::Run(args) => {
            let cfg = args.into_config()?;
            let outcome = run_experiment(&cfg)?;
            for path in write_outputs(&cfg, &outcome)? {
                log::info!("wrote {}", path.display());
            }
            print!("{}", format_summary(&lpcss::harness::report_header(&cfg), &outcome.summary));
        }
        Command::Report { metrics } => {
            let (_, summary) = report_from_file(&metrics)
                .with_context(|| format!("reading {}", metrics.display()))?;
            let header = file_header(&metrics)?.unwrap_or_else(|| "#".into());
            print!("{}", format_summary(&header, &summary));
        }
    }
    Ok(())
}
