//! Prints a bundled problem as a configuration file.
//!
//! `cargo run --example presets -- diag-2x2 > diag-2x2.json`

use mpnormal::config::{preset, PRESETS};

fn main() -> mpnormal::Result<()> {
    match std::env::args().nth(1) {
        Some(name) => println!("{}", preset(&name)?.to_json()),
        None => println!("{}", PRESETS.join("\n")),
    }
    Ok(())
}
