#![no_main]
use clap::Parser;
use libfuzzer_sys::fuzz_target;
use zbw_cli::args::Command;
use zbw_cli::{resolve_epsilon, Cli};

// Parses whitespace-separated words as an argument vector; never runs a
// command, so no files are written.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("zbw").chain(s.split_whitespace());
    let Ok(cli) = Cli::try_parse_from(argv) else { return };
    let field = match &cli.command {
        Command::Quantum(a) => &a.field,
        Command::Classical(a) => &a.field,
        Command::Roots(a) => &a.field,
        Command::Landau(a) => &a.field,
        Command::Compare(a) => &a.field,
        Command::Sweep(_) | Command::Fit(_) => return,
    };
    let _ = resolve_epsilon(field);
});
