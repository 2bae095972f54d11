//! The bundled dataset, compiled into the binary. A directory given with
//! `--data` takes precedence file by file.

use std::path::{Path, PathBuf};

use coxarith::{Error, Result};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../../data/", $name)))),*]
    };
}

pub const FILES: &[(&str, &str)] = bundled!(
    "S1_4.cox", "S2_4.cox", "S1_5.cox", "S2_5.cox", "T1.cox", "T2.cox", "T3.cox", "L5.cox",
    "P1_4.cox", "P2_4.cox", "P1_5.cox", "P_5.cox", "Q1_4.form", "Q2_4.form", "Q1_5.form",
    "Q2_5.form", "catalog_h4.txt", "catalog_h5.txt",
);

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    dir: Option<PathBuf>,
}

impl Dataset {
    pub fn new(dir: Option<PathBuf>) -> Dataset {
        Dataset { dir }
    }

    /// Reads a dataset entry by bare name, for example `S1_4.cox`.
    pub fn read(&self, name: &str) -> Result<String> {
        if let Some(dir) = &self.dir {
            let path = dir.join(name);
            if path.exists() {
                return std::fs::read_to_string(&path)
                    .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())));
            }
        }
        FILES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| Error::Precondition(format!("no dataset file named '{name}'")))
    }

    /// Reads a path from disk, falling back to the dataset entry with the
    /// same file name so that `data/S1_4.cox` works from any directory.
    pub fn resolve(&self, arg: &str) -> Result<String> {
        let path = Path::new(arg);
        if path.exists() {
            return std::fs::read_to_string(path)
                .map_err(|e| Error::Precondition(format!("{arg}: {e}")));
        }
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::Precondition(format!("bad path '{arg}'")))?;
        self.read(name)
            .map_err(|_| Error::Precondition(format!("{arg}: no such file or dataset entry")))
    }

    /// A catalog by short name (`h4`, `h5`) or path.
    pub fn catalog_text(&self, arg: &str) -> Result<String> {
        match arg {
            "h4" | "h5" => self.read(&format!("catalog_{arg}.txt")),
            _ => self.resolve(arg),
        }
    }
}
