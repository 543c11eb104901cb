//! Regenerates `data/signature256.pgm` from the synthetic signature renderer.

use planemark::corpus::{synthetic_signature, CORPUS_SIZE, SIGNATURE_SEED};
use planemark::save_pgm;

fn main() -> std::io::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/signature256.pgm");
    let img = synthetic_signature(CORPUS_SIZE, CORPUS_SIZE, SIGNATURE_SEED);
    std::fs::write(path, save_pgm(&img))?;
    println!("wrote {path}");
    Ok(())
}
