mod args;
mod error;
mod manifest;
mod run;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::Failure;
use manifest::RunManifest;
use run::{execute, Inputs};

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

/// Runs `cmd` and writes its artifact, paired with a manifest when it goes
/// to a file.
fn run_and_emit(cmd: &Command, inputs: &Inputs) -> Result<(), Failure> {
    let rendered = execute(cmd, inputs)?;
    match cmd.output().and_then(|o| o.out.clone()) {
        Some(out) => {
            write(&out, &rendered.text)?;
            let manifest = RunManifest::new(cmd, inputs, rendered.resolved, &out);
            write(&manifest::path_for(&out), &manifest.to_json()?)?;
        }
        None => print!("{}", rendered.text),
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Replay(a) => {
            let manifest = RunManifest::read(&a.manifest)?;
            let mut cmd = manifest.command.clone();
            if let Some(out) = a.out {
                if let Some(o) = cmd.output_mut() {
                    o.out = Some(out);
                }
            }
            run_and_emit(&cmd, &manifest.inputs)
        }
        cmd => {
            let inputs = Inputs::load(&cmd)?;
            run_and_emit(&cmd, &inputs)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qland: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
