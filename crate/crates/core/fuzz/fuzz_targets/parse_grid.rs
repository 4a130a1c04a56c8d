#![no_main]

use dipole_loop::grid::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(g) = data.parse::<GridSpec>() else { return };
    let values = g.values();
    assert_eq!(values.len(), g.count);
    // printed form reads back to the same grid
    let back: GridSpec = g.to_string().parse().expect("display output reparses");
    assert_eq!(back, g);
});
