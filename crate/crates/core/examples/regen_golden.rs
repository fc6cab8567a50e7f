//! Rewrites the golden fixture file from the reference oracles.
//!
//! `cargo run --release -p linewave-core --example regen_golden > crates/core/golden/fixtures.txt`

fn main() {
    match linewave::reference::render_golden() {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
