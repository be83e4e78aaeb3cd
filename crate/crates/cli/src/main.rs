use clap::{CommandFactory, Parser};
use couette_cli::args::Cli;
use couette_cli::error::{exit, CliError};
use couette_cli::output::to_json;

fn main() {
    let cli = Cli::parse();
    let name = cli.command.name();
    let mut print = |line: &str| println!("{line}");
    match couette_cli::run(cli, &mut print) {
        Ok(record) => {
            match name {
                "suite" => {}
                "report" => print!("{}", record.outputs["markdown"].as_str().unwrap_or_default()),
                _ => print!("{}", to_json(&record)),
            }
            std::process::exit(exit::OK);
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            std::process::exit(e.exit_code());
        }
    }
}
