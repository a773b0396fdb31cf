use std::process::ExitCode;

fn main() -> ExitCode {
    match qdigest_sim::cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
