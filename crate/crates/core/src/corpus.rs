//! The bundled algebras, embedded at compile time.

use std::path::Path;

use crate::algebra::{Caps, FiniteAlgebra};
use crate::error::{Error, Result};

/// File name and contents of every bundled algebra, in a fixed order.
pub const BUNDLED: [(&str, &str); 7] = [
    ("z2.alg", include_str!("../corpus/z2.alg")),
    ("z3.alg", include_str!("../corpus/z3.alg")),
    (
        "semilattice2.alg",
        include_str!("../corpus/semilattice2.alg"),
    ),
    (
        "semilattice3.alg",
        include_str!("../corpus/semilattice3.alg"),
    ),
    ("lattice2.alg", include_str!("../corpus/lattice2.alg")),
    ("set2.alg", include_str!("../corpus/set2.alg")),
    ("z2_malcev.alg", include_str!("../corpus/z2_malcev.alg")),
];

pub fn bundled() -> Vec<FiniteAlgebra> {
    BUNDLED
        .iter()
        .map(|(file, text)| {
            FiniteAlgebra::parse(text).unwrap_or_else(|e| panic!("bundled {file}: {e}"))
        })
        .collect()
}

/// A bundled algebra by name (`z2`) or file name (`z2.alg`).
pub fn bundled_algebra(name: &str) -> Option<FiniteAlgebra> {
    let stem = name.strip_suffix(".alg").unwrap_or(name);
    bundled().into_iter().find(|a| a.name() == stem)
}

/// Every `*.alg` file in `dir`, sorted by file name.
pub fn load_dir(dir: impl AsRef<Path>, caps: &Caps) -> Result<Vec<FiniteAlgebra>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| {
        Error::InvalidArgument(format!(
            "cannot read corpus directory {}: {e}",
            dir.display()
        ))
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "alg"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| FiniteAlgebra::from_file(p, caps))
        .collect()
}
