use std::process::ExitCode;

use clap::Parser;
use slicemod::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = RunConfig::from_cli(cli.command).and_then(|cfg| run(&cfg).map(|out| (cfg, out)));
    match outcome {
        Ok((cfg, out)) => {
            let counts: Vec<String> = out
                .diagnostics
                .community_counts
                .iter()
                .map(ToString::to_string)
                .collect();
            println!("quality {:.6}", out.result.quality);
            println!("communities per slice: {}", counts.join(" "));
            if let Some(p) = out.diagnostics.global_persistence {
                println!("persistence {p:.4}");
            }
            println!("wrote {} files to {}", out.files.len(), cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
