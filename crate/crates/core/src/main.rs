use std::io::Write;

use clap::Parser;

use planar_lie::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (report, mut rendered) = run(&cli);
    if !rendered.ends_with('\n') {
        rendered.push('\n');
    }
    // A closed pipe downstream is not an error of ours; the exit code still reports the result.
    let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
    std::process::exit(report.exit_code);
}
