use clap::Parser;

use signtest_cli::app::{self, Cli, CliError};

fn main() {
    let cli = Cli::parse(); // exits 2 on usage errors
    match app::run(&cli) {
        Ok(output) => {
            if let Err(err) = write_output(&cli, &output) {
                eprintln!("error: {err}");
                std::process::exit(err.exit_code());
            }
            std::process::exit(output.status);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn write_output(cli: &Cli, output: &app::CommandOutput) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => {
            let path = app::resolve_output_path(path);
            std::fs::write(&path, &output.text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => print!("{}", output.text),
    }
    for (path, content) in &output.files {
        let path = app::resolve_output_path(path);
        std::fs::write(&path, content).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}
