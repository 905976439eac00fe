use std::process::ExitCode;

fn main() -> ExitCode {
    let code = hslab_cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    ExitCode::from(code.clamp(0, 255) as u8)
}
