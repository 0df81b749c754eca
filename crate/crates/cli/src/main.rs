use clap::Parser;

use chromadist::args::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's default exit code for usage errors is 2, which here
            // means "verification found conflicts"; usage problems leave
            // with 1 instead. Requested help and version stay successes.
            let informational = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            std::process::exit(if informational { 0 } else { 1 });
        }
    };
    std::process::exit(chromadist::run(cli));
}
