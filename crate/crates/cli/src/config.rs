use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pecr::theory::{DirSource, LoadOptions, BUNDLED_THEORIES};
use pecr::{MachParams, Theory};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    /// Human-readable report.
    #[default]
    Text,
    /// One whitespace-separated record per line.
    Lines,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// Directory of `<theory>/theory.thy` trees; the bundled theories are used when absent.
    #[arg(long, global = true, env = "PECR_THEORY_DIR")]
    pub theory_dir: Option<PathBuf>,
    /// Theory name; defaults to the directory name of the first input file.
    #[arg(long, global = true, env = "PECR_THEORY")]
    pub theory: Option<String>,
    #[arg(long, global = true, env = "PECR_NINT")]
    pub nint: Option<i64>,
    #[arg(long, global = true, env = "PECR_NLST")]
    pub nlst: Option<usize>,
    #[arg(long, global = true, env = "PECR_NPREM")]
    pub nprem: Option<usize>,
    /// Execution budget in statement executions.
    #[arg(long, global = true, env = "PECR_BUDGET")]
    pub budget: Option<u64>,
    #[arg(long, global = true, env = "PECR_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "PECR_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl Global {
    /// `mach` with the command-line overrides applied and validated.
    pub fn mach(&self, base: MachParams) -> Result<MachParams, CliError> {
        let mut m = base;
        if let Some(n) = self.nint {
            m.nint = n;
        }
        if let Some(n) = self.nlst {
            m.nlst = n;
        }
        if let Some(n) = self.nprem {
            m.nprem = n;
        }
        if let Some(n) = self.budget {
            m.tcpu = n;
        }
        m.validate().map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(m)
    }

    /// The theory named by `--theory`, else by the parent directory of
    /// `hint`, else `fallback`.
    pub fn theory_name(&self, hint: Option<&Path>, fallback: &str) -> String {
        if let Some(t) = &self.theory {
            return t.clone();
        }
        let dir = hint.and_then(Path::parent).and_then(Path::file_name).and_then(|n| n.to_str());
        match dir {
            Some(d) if self.knows(d) => d.to_string(),
            _ => fallback.to_string(),
        }
    }

    fn knows(&self, name: &str) -> bool {
        match &self.theory_dir {
            Some(root) => root.join(name).is_dir(),
            None => BUNDLED_THEORIES.contains(&name),
        }
    }

    /// Loads a theory with its stored theorems and the mach overrides.
    pub fn load(&self, name: &str) -> Result<Theory, CliError> {
        let loaded = match &self.theory_dir {
            Some(root) => Theory::load(&DirSource::new(root), name, LoadOptions::default()),
            None => Theory::bundled(name),
        };
        let mut th = loaded.map_err(|e| CliError::Parse(format!("theory `{name}`: {e}")))?;
        th.machine = self.mach(th.machine)?;
        Ok(th)
    }

    /// Names of every loadable theory.
    pub fn theory_names(&self) -> Vec<String> {
        match &self.theory_dir {
            None => BUNDLED_THEORIES.iter().map(|s| s.to_string()).collect(),
            Some(root) => {
                let mut names: Vec<String> = std::fs::read_dir(root)
                    .into_iter()
                    .flatten()
                    .flatten()
                    .filter(|e| e.path().join("theory.thy").is_file())
                    .filter_map(|e| e.file_name().into_string().ok())
                    .collect();
                names.sort();
                names
            }
        }
    }
}
