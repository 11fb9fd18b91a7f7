//! Columnar text tables and binary field snapshots.
//!
//! Tables are plain text: `#`-prefixed metadata lines, a `#` header naming
//! each column and its unit, whitespace-separated rows, and optional
//! `#`-prefixed footer lines. Numbers use a fixed exponent format so the
//! same data always produces the same bytes.
//!
//! Snapshots are little-endian: an 8-byte magic, component count, nx, ny
//! (u64), box lengths lx, ly and the time (f64), followed by the complex
//! field as (re, im) f64 pairs, component-major then row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;
use num_complex::Complex64;

use crate::dynamics::report::{EvolutionReport, Representation};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"TSOCSNAP";

/// A column name and its unit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub footer: Vec<(String, String)>,
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn foot(mut self, key: &str, value: impl ToString) -> Self {
        self.footer.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::ShapeMismatch(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}[{}]", c.name, c.unit))
            .collect();
        writeln!(w, "# {}", header.join(" "))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            writeln!(w, "{}", cells.join(" "))?;
        }
        for (k, v) in &self.footer {
            writeln!(w, "# {k}: {v}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_to(BufWriter::new(f))
    }

    /// Parse a table written by [`Table::write_to`]. Metadata lines before
    /// the column header and footer lines after the data are separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut seen_header = false;
        let mut seen_rows = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                if !seen_header && !rest.contains(": ") {
                    for cell in rest.split_whitespace() {
                        let (name, unit) =
                            cell.strip_suffix(']')
                                .and_then(|c| c.split_once('['))
                                .ok_or_else(|| Error::Io(format!("malformed column `{cell}`")))?;
                        table.columns.push(Column::new(name, unit));
                    }
                    seen_header = true;
                    continue;
                }
                let (k, v) = rest
                    .split_once(": ")
                    .ok_or_else(|| Error::Io(format!("malformed comment `{line}`")))?;
                let slot = if seen_rows {
                    &mut table.footer
                } else {
                    &mut table.metadata
                };
                slot.push((k.to_string(), v.to_string()));
            } else if !line.trim().is_empty() {
                let row = line
                    .split_whitespace()
                    .map(|c| {
                        c.parse::<f64>()
                            .map_err(|e| Error::Io(format!("`{c}`: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                table.push(row)?;
                seen_rows = true;
            }
        }
        Ok(table)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn lookup(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .chain(self.footer.iter())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Scale factors from internal units to the units written in a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputScales {
    pub time: f64,
    pub length: f64,
    pub energy: f64,
    pub time_unit: &'static str,
    pub length_unit: &'static str,
    pub energy_unit: &'static str,
}

impl OutputScales {
    pub fn internal() -> Self {
        Self {
            time: 1.0,
            length: 1.0,
            energy: 1.0,
            time_unit: "internal",
            length_unit: "internal",
            energy_unit: "internal",
        }
    }
}

const REDUCED_POPS: [&str; 2] = ["pop_up", "pop_down"];
const FULL_POPS: [&str; 5] = [
    "pop_1plus",
    "pop_2plus",
    "pop_dark",
    "pop_1minus",
    "pop_2minus",
];

/// One row per sample. Values are divided by the scales, i.e. a time t is
/// written as t / scales.time.
pub fn report_table(report: &EvolutionReport, scales: &OutputScales) -> Result<Table> {
    let (tu, lu, eu) = (scales.time_unit, scales.length_unit, scales.energy_unit);
    let mut cols = vec![
        Column::new("t", tu),
        Column::new("x", lu),
        Column::new("y", lu),
        Column::new("norm", "1"),
        Column::new("energy", eu),
    ];
    let pops: &[&str] = match report.representation {
        Representation::Reduced => &REDUCED_POPS,
        Representation::Full => &FULL_POPS,
    };
    cols.extend(pops.iter().map(|p| Column::new(p, "1")));
    match report.representation {
        Representation::Reduced => {
            cols.extend(["sx", "sy", "sz"].map(|s| Column::new(s, "1")));
        }
        Representation::Full => cols.push(Column::new("fidelity", "1")),
    }
    let mut table = Table::new(cols).meta(
        "representation",
        match report.representation {
            Representation::Reduced => "reduced",
            Representation::Full => "full",
        },
    );
    for s in &report.samples {
        let mut row = vec![
            s.time / scales.time,
            s.mean_position.x / scales.length,
            s.mean_position.y / scales.length,
            s.norm,
            s.energy / scales.energy,
        ];
        row.extend(&s.populations);
        if let Some(spin) = s.spin {
            row.extend(spin);
        }
        if let Some(f) = s.fidelity {
            row.push(f);
        }
        table.push(row)?;
    }
    Ok(table)
}

/// Header of a binary snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub components: usize,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    psi: &Array3<Complex64>,
    lx: f64,
    ly: f64,
    time: f64,
) -> Result<()> {
    let shape = psi.shape();
    w.write_all(SNAPSHOT_MAGIC)?;
    for n in shape {
        w.write_all(&(*n as u64).to_le_bytes())?;
    }
    for v in [lx, ly, time] {
        w.write_all(&v.to_le_bytes())?;
    }
    // Iteration order of a logical (c, i, j) index is component-major,
    // then row-major, whatever the memory layout.
    for z in psi.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<(SnapshotHeader, Array3<Complex64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let dims = [read_u64(&mut r)?, read_u64(&mut r)?, read_u64(&mut r)?];
    let count = dims
        .iter()
        .try_fold(1u64, |acc, d| acc.checked_mul(*d))
        .filter(|c| *c <= (1 << 32))
        .ok_or_else(|| Error::Snapshot(format!("implausible dimensions {dims:?}")))?;
    let header = SnapshotHeader {
        components: dims[0] as usize,
        nx: dims[1] as usize,
        ny: dims[2] as usize,
        lx: read_f64(&mut r)?,
        ly: read_f64(&mut r)?,
        time: read_f64(&mut r)?,
    };
    let mut data = Vec::with_capacity(count as usize);
    let mut buf = [0u8; 16];
    for _ in 0..count {
        r.read_exact(&mut buf)
            .map_err(|e| Error::Snapshot(format!("truncated payload: {e}")))?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        data.push(Complex64::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Snapshot("trailing bytes after payload".into()));
    }
    let psi = Array3::from_shape_vec((header.components, header.nx, header.ny), data)
        .map_err(|e| Error::Snapshot(e.to_string()))?;
    Ok((header, psi))
}

pub fn save_snapshot(
    path: &Path,
    psi: &Array3<Complex64>,
    lx: f64,
    ly: f64,
    time: f64,
) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_snapshot(BufWriter::new(f), psi, lx, ly, time)
}

pub fn load_snapshot(path: &Path) -> Result<(SnapshotHeader, Array3<Complex64>)> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_snapshot(BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomlight::Vec2;
    use crate::dynamics::report::Sample;

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(vec![Column::new("k", "kappa"), Column::new("E", "E_r")])
            .meta("scheme", "regular");
        t.push(vec![0.0, 0.25]).unwrap();
        t.push(vec![-1.5e-3, 1.0 / 3.0]).unwrap();
        let t = t.foot("ring_radius", 0.25);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# scheme: regular\n# k[kappa] E[E_r]\n"));
        assert!(text.ends_with("# ring_radius: 0.25\n"));
        let back = Table::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.lookup("ring_radius"), Some("0.25"));
        assert_eq!(back.column("E").unwrap()[1], 1.0 / 3.0);
        assert!(t.clone().push(vec![1.0]).is_err());
    }

    #[test]
    fn report_columns_depend_on_representation() {
        let s = Sample {
            time: 2.0,
            mean_position: Vec2::new(1.0, -1.0),
            norm: 1.0,
            populations: vec![0.5, 0.5],
            spin: Some([0.0, 0.0, 1.0]),
            fidelity: None,
            energy: 0.5,
        };
        let rep = EvolutionReport {
            representation: Representation::Reduced,
            samples: vec![s],
        };
        let scales = OutputScales {
            time: 2.0,
            energy: 0.5,
            ..OutputScales::internal()
        };
        let t = report_table(&rep, &scales).unwrap();
        assert_eq!(t.columns.len(), 10);
        assert_eq!(t.rows[0][0], 1.0);
        assert_eq!(t.rows[0][4], 1.0);
    }

    #[test]
    fn snapshot_round_trip_and_layout() {
        let psi = Array3::from_shape_fn((2, 3, 4), |(c, i, j)| {
            Complex64::new(c as f64, (i * 4 + j) as f64)
        });
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &psi, 1.5, 2.5, 0.75).unwrap();
        assert_eq!(buf.len(), 8 + 24 + 24 + 2 * 3 * 4 * 16);
        assert_eq!(&buf[..8], SNAPSHOT_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        // Second payload element is (c=0, i=0, j=1).
        let off = 56 + 16;
        assert_eq!(
            f64::from_le_bytes(buf[off + 8..off + 16].try_into().unwrap()),
            1.0
        );
        let (h, back) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(
            (h.components, h.nx, h.ny, h.lx, h.ly, h.time),
            (2, 3, 4, 1.5, 2.5, 0.75)
        );
        assert_eq!(back, psi);
    }

    #[test]
    fn corrupt_snapshots_rejected() {
        let psi = Array3::from_elem((1, 2, 2), Complex64::new(1.0, 0.0));
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &psi, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            read_snapshot(&buf[..buf.len() - 1]),
            Err(Error::Snapshot(_))
        ));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_snapshot(&bad[..]), Err(Error::Snapshot(_))));
        let mut long = buf;
        long.push(0);
        assert!(matches!(read_snapshot(&long[..]), Err(Error::Snapshot(_))));
    }
}
