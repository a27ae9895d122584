#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;

use aspectral::io::{matrix_json_string, parse_matrix_json, MatrixFile};

#[derive(Arbitrary, Debug)]
struct RawFile {
    rows: u8,
    cols: u8,
    data: Vec<(f64, f64)>,
}

// Every candidate file is either rejected by validation or accepted into a
// matrix whose serialization reparses bit-exactly.
fuzz_target!(|raw: RawFile| {
    let file = MatrixFile {
        rows: raw.rows as usize,
        cols: raw.cols as usize,
        data: raw.data.iter().map(|&(re, im)| [re, im]).collect(),
    };
    let Ok(m) = file.to_matrix() else { return };
    let json = matrix_json_string(&m);
    let back = parse_matrix_json(json.as_bytes()).expect("serialized matrix must reparse");
    assert_eq!(m.nrows(), back.nrows());
    assert_eq!(m.ncols(), back.ncols());
    for (a, b) in m.iter().zip(back.iter()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
});
