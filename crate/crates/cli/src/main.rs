use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = cpn_certify::run_args(std::env::args_os());
    for m in &out.messages {
        eprintln!("{}", m.trim_end());
    }
    if !out.report.is_empty() {
        match &out.output_path {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &out.report) {
                    eprintln!("cannot write {path}: {e}");
                    return ExitCode::from(cpn_certify::EXIT_USAGE as u8);
                }
            }
            None => {
                let _ = std::io::stdout().write_all(out.report.as_bytes());
            }
        }
    }
    ExitCode::from(out.code as u8)
}
