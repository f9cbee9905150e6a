use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use stablematch::args::{Cli, Command};
use stablematch::{run, CliError};

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let out = run(&cli.command)?;
    let common = cli.command.common();
    let runtime = common.record_runtime.then(|| start.elapsed().as_secs_f64());
    let json = out.json(runtime);

    if let Some(path) = &common.csv {
        write_file(path, &out.csv())?;
    }
    let mut stdout = std::io::stdout().lock();
    match &out.report {
        Some(report) => {
            let _ = stdout.write_all(report.as_bytes());
        }
        None if common.csv.is_none() => {
            let _ = stdout.write_all(out.csv().as_bytes());
        }
        None => {}
    }
    match &common.json {
        Some(path) => write_file(path, &json)?,
        None if out.report.is_none() => eprint!("{json}"),
        None => {}
    }
    for (path, contents) in &out.extra {
        write_file(path, contents)?;
    }
    let verified = !matches!(cli.command, Command::Verify(_)) || out.summary.all_pass();
    Ok(verified)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
