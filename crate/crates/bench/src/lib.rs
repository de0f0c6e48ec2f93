//! Problem loading shared by the criterion benches.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use galp_core::{parse_mps, to_standard_form, RawMps, StandardLp};

/// The Netlib mini-corpus shipped with the core test data.
pub const NETLIB: [&str; 5] = ["afiro", "sc50a", "sc50b", "adlittle", "blend"];

pub fn netlib_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data/netlib")
        .join(format!("{name}.mps"))
}

pub fn netlib_raw(name: &str) -> RawMps {
    let path = netlib_path(name);
    let file = File::open(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_mps(BufReader::new(file)).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn netlib_lp(name: &str) -> StandardLp {
    to_standard_form(&netlib_raw(name))
        .expect("netlib problem converts")
        .0
}
