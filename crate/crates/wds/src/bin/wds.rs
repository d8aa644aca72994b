use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = <wds::cli::Cli as clap::Parser>::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let out = wds::cli::execute(&cli, echo.join(" "), None);
    print!("{}", out.render(cli.pretty));
    ExitCode::from(out.exit_status() as u8)
}
