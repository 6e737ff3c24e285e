//! Matrix directories: `matrix_NNNN.mtx` files plus `manifest.csv`
//! (`index,seed,bandwidth,kappa`).

use std::path::Path;

use anyhow::{bail, Context, Result};

use pseudospectra::io;
use pseudospectra::matrix_gen::GeneratedMatrix;

pub fn file_name(index: usize) -> String {
    format!("matrix_{index:04}.mtx")
}

pub fn write_corpus(dir: &Path, corpus: &[GeneratedMatrix]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = String::from("index,seed,bandwidth,kappa\n");
    for g in corpus {
        io::write_matrix(&dir.join(file_name(g.index)), &g.matrix)?;
        manifest.push_str(&format!("{},{},{},{:?}\n", g.index, g.seed, g.bandwidth, g.kappa));
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).with_context(|| format!("writing {}", path.display()))
}

pub fn read_corpus(dir: &Path) -> Result<Vec<GeneratedMatrix>> {
    let path = dir.join("manifest.csv");
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("index,seed,bandwidth,kappa") {
        bail!("{}: unexpected header", path.display());
    }
    let mut out = Vec::new();
    for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || format!("{}: malformed line {}", path.display(), ln + 2);
        if cols.len() != 4 {
            bail!(bad());
        }
        let index: usize = cols[0].parse().with_context(bad)?;
        let matrix = io::read_matrix(&dir.join(file_name(index)))?;
        out.push(GeneratedMatrix {
            index,
            seed: cols[1].parse().with_context(bad)?,
            bandwidth: cols[2].parse().with_context(bad)?,
            kappa: cols[3].parse().with_context(bad)?,
            matrix,
        });
    }
    if out.is_empty() {
        bail!("{}: no matrices listed", path.display());
    }
    Ok(out)
}
