//! JSON barrier files: `{"breakpoints": [[t, h], ...]}` with strictly
//! increasing times and at least two points.

use std::path::Path;

use airyproc_core::airy1::Barrier;
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierFile {
    pub breakpoints: Vec<(f64, f64)>,
}

impl BarrierFile {
    pub fn into_barrier(self) -> Result<Barrier, Error> {
        Barrier::new(self.breakpoints).map_err(|e| Error::Barrier(e.to_string()))
    }
}

pub fn parse_barrier(text: &str) -> Result<Barrier, Error> {
    let f: BarrierFile = serde_json::from_str(text).map_err(|e| Error::Barrier(e.to_string()))?;
    f.into_barrier()
}

pub fn read_barrier(path: &Path) -> Result<Barrier, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Barrier(format!("{}: {e}", path.display())))?;
    parse_barrier(&text)
}

pub fn to_json(b: &Barrier) -> String {
    serde_json::to_string(&BarrierFile {
        breakpoints: b.breakpoints.clone(),
    })
    .expect("finite breakpoints serialize")
}
