use std::io::Write;
use std::path::Path;

use diracspec::resonance_regions::ExclusionCurves;

/// A CSV table of preformatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn from_curves(curves: &ExclusionCurves) -> Self {
        let mut t = Table::new(&["phi", "re_z", "im_z", "family"]);
        for (points, family) in [(&curves.right, "right"), (&curves.left, "left")] {
            for p in points {
                t.push(vec![p.phi.to_string(), p.z.re.to_string(), p.z.im.to_string(), family.into()]);
            }
        }
        t
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}
