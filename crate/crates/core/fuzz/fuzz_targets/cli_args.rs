#![no_main]

use clap::Parser;
use dipole_loop::cli::Args;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let argv = std::iter::once("dipole-loop").chain(data.split_whitespace());
    let _ = Args::try_parse_from(argv);
});
