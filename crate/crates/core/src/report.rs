//! CSV tables with a trailing integrity line:
//! `# checksum sha256=<hex>` over the data rows, each terminated by `\n`.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Shortest round-trip float text; `nan` and `inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn data(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn render(&self) -> String {
        let data = self.data();
        format!("{}\n{}# checksum sha256={}\n", self.header.join(","), data, digest(&data))
    }
}

fn digest(data: &str) -> String {
    Sha256::digest(data.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Checks the trailing checksum of a rendered table.
pub fn verify_csv(text: &str) -> Result<()> {
    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.pop().ok_or_else(|| Error::arg("empty csv"))?;
    let want = last
        .strip_prefix("# checksum sha256=")
        .ok_or_else(|| Error::arg("missing checksum line"))?;
    if lines.is_empty() {
        return Err(Error::arg("missing header"));
    }
    let mut data = String::new();
    for l in &lines[1..] {
        data.push_str(l);
        data.push('\n');
    }
    if digest(&data) == want {
        Ok(())
    } else {
        Err(Error::arg("checksum mismatch"))
    }
}
