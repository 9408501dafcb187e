use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(harmonic_id_cli::main_with_stdio())
}
