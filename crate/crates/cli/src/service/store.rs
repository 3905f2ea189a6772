use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pecr::engine::Session;
use serde::{Deserialize, Serialize};

/// A session with its handle metadata; the unit of persistence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub theory: String,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub modified: u64,
    pub session: Session,
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl SessionRecord {
    pub fn new(id: String, session: Session) -> Self {
        let t = now();
        SessionRecord { id, theory: session.theory.clone(), created: t, modified: t, session }
    }

    pub fn touch(&mut self) {
        self.modified = now();
    }
}

/// One JSON file per session under a directory.
#[derive(Debug, Clone)]
pub struct SessionDir(PathBuf);

impl SessionDir {
    pub fn open(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(SessionDir(root.to_path_buf()))
    }

    pub fn save(&self, rec: &SessionRecord) -> std::io::Result<()> {
        let tmp = self.0.join(format!("{}.json.tmp", rec.id));
        std::fs::write(&tmp, serde_json::to_vec_pretty(rec)?)?;
        std::fs::rename(tmp, self.0.join(format!("{}.json", rec.id)))
    }

    pub fn load_all(&self) -> std::io::Result<Vec<SessionRecord>> {
        let mut out = Vec::new();
        for entry in std::fs::read_dir(&self.0)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let rec: SessionRecord = serde_json::from_slice(&std::fs::read(&path)?)?;
                out.push(rec);
            }
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }
}
