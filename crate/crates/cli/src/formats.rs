//! File formats: JSON channel specs, JSON output maps and CSV regions.

use std::fs;
use std::path::Path;

use dmic_core::{Dmic, RatePoint, RateRegion, Y2Map};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A channel file: alphabet sizes plus the tensor `[x1][x2][y1][y2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nx1: usize,
    pub nx2: usize,
    pub ny1: usize,
    pub ny2: usize,
    pub tensor: Vec<Vec<Vec<Vec<f64>>>>,
}

impl ChannelSpecFile {
    pub fn from_dmic(c: &Dmic, name: Option<&str>, description: Option<&str>) -> Self {
        let (nx1, nx2, ny1, ny2) = c.dims();
        let tensor = (0..nx1)
            .map(|a| {
                (0..nx2)
                    .map(|b| {
                        (0..ny1)
                            .map(|y| (0..ny2).map(|z| c.get(a, b, y, z)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            name: name.map(str::to_string),
            description: description.map(str::to_string),
            nx1,
            nx2,
            ny1,
            ny2,
            tensor,
        }
    }

    /// Checks the nesting against the declared sizes and builds the channel.
    pub fn to_dmic(&self) -> CliResult<Dmic> {
        let mismatch = |at: String, found: usize, expected: usize| {
            CliError::Input(format!(
                "tensor{at} has {found} entries, expected {expected}"
            ))
        };
        if self.tensor.len() != self.nx1 {
            return Err(mismatch(String::new(), self.tensor.len(), self.nx1));
        }
        let mut flat = Vec::with_capacity(self.nx1 * self.nx2 * self.ny1 * self.ny2);
        for (a, t1) in self.tensor.iter().enumerate() {
            if t1.len() != self.nx2 {
                return Err(mismatch(format!("[{a}]"), t1.len(), self.nx2));
            }
            for (b, t2) in t1.iter().enumerate() {
                if t2.len() != self.ny1 {
                    return Err(mismatch(format!("[{a}][{b}]"), t2.len(), self.ny1));
                }
                for (y, t3) in t2.iter().enumerate() {
                    if t3.len() != self.ny2 {
                        return Err(mismatch(format!("[{a}][{b}][{y}]"), t3.len(), self.ny2));
                    }
                    flat.extend_from_slice(t3);
                }
            }
        }
        Ok(Dmic::new(self.nx1, self.nx2, self.ny1, self.ny2, flat)?)
    }

    /// Pretty JSON with a trailing newline; identical input gives identical
    /// bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

pub fn parse_channel_str(text: &str) -> CliResult<Dmic> {
    let spec: ChannelSpecFile = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("malformed channel file: {e}")))?;
    spec.to_dmic()
}

pub fn parse_channel_spec(path: &Path) -> CliResult<Dmic> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_channel_str(&text).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// A map file: `table[x1][y2]` gives `y2'` in `0..outputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub outputs: usize,
    pub table: Vec<Vec<usize>>,
}

impl MapFile {
    pub fn to_map(&self) -> CliResult<Y2Map> {
        let nx1 = self.table.len();
        let ny2 = self.table.first().map_or(0, Vec::len);
        if let Some((x1, row)) = self.table.iter().enumerate().find(|(_, r)| r.len() != ny2) {
            return Err(CliError::Input(format!(
                "map table[{x1}] has {} entries, expected {ny2}",
                row.len()
            )));
        }
        Ok(Y2Map::new(nx1, ny2, self.outputs, self.table.concat())?)
    }
}

pub fn parse_map_file(path: &Path) -> CliResult<Y2Map> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: MapFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: malformed map file: {e}", path.display())))?;
    file.to_map()
}

/// `r1,r2` header then one vertex per line, shortest round-trip decimals.
pub fn region_to_csv(region: &RateRegion) -> String {
    let mut out = String::from("r1,r2\n");
    for v in region.vertices() {
        out.push_str(&format!("{},{}\n", v.r1, v.r2));
    }
    out
}

pub fn emit_region_csv(region: &RateRegion, path: &Path) -> CliResult<()> {
    fs::write(path, region_to_csv(region)).map_err(|e| CliError::io(path, e))
}

pub fn parse_region_csv(text: &str) -> CliResult<Vec<RatePoint>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("r1,r2") {
        return Err(CliError::Input(
            "region CSV must start with the header r1,r2".into(),
        ));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = || CliError::Input(format!("region CSV line {}: {line:?}", i + 2));
            let (a, b) = line.split_once(',').ok_or_else(bad)?;
            let r1 = a.trim().parse().map_err(|_| bad())?;
            let r2 = b.trim().parse().map_err(|_| bad())?;
            Ok(RatePoint::new(r1, r2)?)
        })
        .collect()
}
