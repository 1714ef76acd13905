//! Writes the synthetic corpus as PNG files.
//!
//! Usage: cargo run -p epf-core --example write_synthetic -- [DIR] [SIZE]

use std::path::PathBuf;

use epf_core::{save_image, synthetic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "corpus/synthetic".into()));
    let size = match args.next() {
        Some(s) => s.parse()?,
        None => synthetic::DEFAULT_SIZE,
    };
    std::fs::create_dir_all(&dir)?;
    for (i, (name, img)) in synthetic::corpus(size, 1).into_iter().enumerate() {
        let path = dir.join(format!("{i:02}_{name}.png"));
        save_image(&img, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
