use std::process::ExitCode;

fn main() -> ExitCode {
    match sara_tools::cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
