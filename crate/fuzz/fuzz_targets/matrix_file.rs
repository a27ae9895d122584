#![no_main]

use libfuzzer_sys::fuzz_target;

// The matrix-file parser must reject arbitrary bytes gracefully: no panics,
// no unchecked allocations from hostile dimension fields.
fuzz_target!(|data: &[u8]| {
    let _ = aspectral::io::parse_matrix_json(data);
});
