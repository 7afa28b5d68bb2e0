use std::process::ExitCode;

fn main() -> ExitCode {
    let args = std::env::args_os().collect();
    let code = ghz_cli::main_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
