use heegner_cli::{run, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        eprintln!("usage: heegner <command> [key=value ...] [config=FILE]");
        eprintln!("commands: {}", heegner_cli::config::COMMANDS.join(", "));
        return ExitCode::from(2);
    }
    let outcome = RunConfig::from_args(&args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).expect("JSON values serialize"));
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
