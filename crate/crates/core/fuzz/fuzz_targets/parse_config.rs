#![no_main]

use dipole_loop::cli::{parse_config, parse_config_with_overrides};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Err(errs) = parse_config(data) {
        // every reported problem must render
        let _ = errs.to_string();
    }
    if let Some((text, grid)) = data.split_once('\u{0}') {
        let _ = parse_config_with_overrides(text, &[("loop.fit_lambda", grid, "--lambda-grid")]);
    }
});
