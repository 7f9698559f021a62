use std::process::ExitCode;

fn main() -> ExitCode {
    weighted_tate::cli::main()
}
