mod config;
mod execute;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::parse_config;
use crate::execute::execute;

#[derive(Parser)]
#[command(name = "dwork", version, about = "Dwork-operator L-functions and unit-root moment L-functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a JSON job file and write a JSON report.
    Compute {
        config: PathBuf,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Operator box `U`, overriding the job file.
        #[arg(long = "box", value_name = "U")]
        box_size: Option<usize>,
        /// Working precision `N_pi`, overriding the job file.
        #[arg(long, value_name = "N")]
        precision: Option<u32>,
        /// Worker threads.
        #[arg(long, value_name = "K")]
        threads: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Compute {
            config,
            out,
            box_size,
            precision,
            threads,
        } => {
            if let Some(k) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global()
                    .context("configuring the thread pool")?;
            }
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut value: serde_json::Value = serde_json::from_str(&text).context("job file is not valid JSON")?;
            if let Some(obj) = value.as_object_mut() {
                if let Some(u) = box_size {
                    obj.insert("box".into(), u.into());
                }
                if let Some(n) = precision {
                    obj.insert("N_pi".into(), n.into());
                }
            }
            let job = parse_config(&value.to_string())?;
            let report = execute(&job)?;
            let mut rendered = serde_json::to_string_pretty(&report)?;
            rendered.push('\n');
            match out {
                Some(path) => std::fs::write(&path, rendered).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{rendered}"),
            }
            Ok(!report.failed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
