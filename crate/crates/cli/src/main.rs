use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use burnout_cli::commands::{self, Incomplete, TrainOptions};
use burnout_cli::config::{Context, PipelineConfig};
use burnout_core::corpus::DatasetName;
use burnout_core::explainer::ReviewSelection;
use burnout_service::ServiceConfig;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "burnout", version, about = "Burnout screening pipeline for German free text")]
struct Cli {
    /// Pipeline configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "BURNOUT_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, global = true, env = "BURNOUT_MODEL_DIR", default_value = "models")]
    model_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Cutoffs {
    /// Cut-off rule: 1, 2w, 2c or 3 (repeatable)
    #[arg(long = "cutoff")]
    cutoff: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the demo expression table, online corpus, recorded completions and survey
    DemoData {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Replace an existing survey store
        #[arg(long)]
        force: bool,
    },
    /// Build v1, v2 or the combined dataset
    BuildDataset {
        dataset: DatasetName,
        /// Replay recorded completions instead of calling the generator
        #[arg(long)]
        mock_llm: bool,
    },
    /// Extend the vocabulary and fine-tune a classifier on one dataset
    Train {
        dataset: DatasetName,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        epochs: Option<u32>,
        /// Train with seeds seed..seed+N and report the spread
        #[arg(long, default_value_t = 1)]
        repeats: usize,
    },
    /// Label distribution and cross-evaluation of all classifiers
    Evaluate {
        #[command(flatten)]
        cutoffs: Cutoffs,
    },
    /// Attribution packets for review
    Explain {
        #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
        all: bool,
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, required_if_eq_any = [("all", "false")])]
        seed: Option<u64>,
        #[arg(long)]
        dataset: Option<DatasetName>,
    },
    /// Start the review and intake service
    Serve {
        #[arg(long, env = "BURNOUT_PORT", default_value_t = burnout_service::config::DEFAULT_PORT)]
        port: u16,
    },
    /// Score stored surveys
    Score {
        #[command(flatten)]
        cutoffs: Cutoffs,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let ctx = Context {
        config,
        data_dir: cli.data_dir,
        model_dir: cli.model_dir,
    };
    match cli.command {
        Command::DemoData { seed, force } => commands::demo_data(&ctx, seed, force),
        Command::BuildDataset { dataset, mock_llm } => commands::build_dataset(&ctx, dataset, mock_llm),
        Command::Train {
            dataset,
            seed,
            epochs,
            repeats,
        } => commands::train(&ctx, dataset, &TrainOptions { seed, epochs, repeats }).map(|_| ()),
        Command::Evaluate { cutoffs } => commands::evaluate(&ctx, &cutoffs.cutoff),
        Command::Score { cutoffs } => commands::score(&ctx, &cutoffs.cutoff),
        Command::Explain {
            all,
            sample,
            seed,
            dataset,
        } => {
            let selection = match (all, sample, seed) {
                (true, _, _) => ReviewSelection::All,
                (false, Some(count), Some(seed)) => ReviewSelection::Random { count, seed },
                _ => bail!("--sample needs --seed"),
            };
            commands::explain(&ctx, selection, dataset).map(|_| ())
        }
        Command::Serve { port } => {
            let config = ServiceConfig::new(port, ctx.data_dir, ctx.model_dir);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(burnout_service::serve(config))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Incomplete>() => {
            eprintln!("incomplete: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
