use std::fs;
use std::path::{Path, PathBuf};

use super::IoError;
use crate::diagnostics::{DiagnosticsRecord, SERIES_COLUMNS};
use crate::flow::SnapshotKind;
use crate::geometry::{GeneratingCurve, Point};
use crate::rescale::RescaledBand;

pub const SERIES_FILE: &str = "series.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SNAPSHOT_INDEX: &str = "index.csv";
pub const LIMIT_FILE: &str = "limit.csv";
pub const RESCALED_DIR: &str = "rescaled";
pub const RESCALED_SUMMARY: &str = "summary.csv";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("t_{t:.12}.csv")
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> IoError {
    IoError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, IoError> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>, IoError> {
    if !path.exists() {
        return Err(IoError::Missing(path.to_path_buf()));
    }
    csv::Reader::from_path(path).map_err(|e| csv_err(path, e))
}

fn check_header(
    path: &Path,
    rdr: &mut csv::Reader<fs::File>,
    expected: &[&str],
) -> Result<(), IoError> {
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(csv_err(
            path,
            format!("expected header {:?}, found {:?}", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

fn parse_f64(path: &Path, line: u64, s: &str) -> Result<f64, IoError> {
    s.trim()
        .parse()
        .map_err(|_| csv_err(path, format!("line {line}: invalid number {s:?}")))
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

fn read_numeric_rows(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, IoError> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, header)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i as u64 + 2;
        rows.push(
            rec.iter()
                .map(|s| parse_f64(path, line, s))
                .collect::<Result<Vec<f64>, _>>()?,
        );
    }
    Ok(rows)
}

pub fn write_curve(path: &Path, curve: &GeneratingCurve) -> Result<(), IoError> {
    write_rows(
        path,
        &["x1", "x2"],
        curve.nodes().iter().map(|p| vec![fmt_f64(p.x), fmt_f64(p.y)]),
    )
}

pub fn read_curve(path: &Path) -> Result<GeneratingCurve, IoError> {
    let rows = read_numeric_rows(path, &["x1", "x2"])?;
    let nodes = rows.iter().map(|r| Point::new(r[0], r[1])).collect();
    GeneratingCurve::new(nodes).map_err(|e| csv_err(path, e))
}

pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), IoError> {
    write_rows(
        path,
        &SERIES_COLUMNS,
        records.iter().map(|r| r.to_row().iter().map(|&x| fmt_f64(x)).collect()),
    )
}

pub fn read_series(path: &Path) -> Result<Vec<DiagnosticsRecord>, IoError> {
    read_numeric_rows(path, &SERIES_COLUMNS)?
        .into_iter()
        .map(|r| {
            let row: [f64; 14] = r.try_into().map_err(|_| csv_err(path, "wrong column count"))?;
            Ok(DiagnosticsRecord::from_row(&row))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotEntry {
    pub file: String,
    pub t: f64,
    pub step: u64,
    pub kind: SnapshotKind,
}

const INDEX_COLUMNS: [&str; 4] = ["file", "t", "step", "kind"];

pub fn write_snapshot_index(path: &Path, entries: &[SnapshotEntry]) -> Result<(), IoError> {
    write_rows(
        path,
        &INDEX_COLUMNS,
        entries.iter().map(|e| {
            vec![
                e.file.clone(),
                fmt_f64(e.t),
                e.step.to_string(),
                e.kind.as_str().to_string(),
            ]
        }),
    )
}

pub fn read_snapshot_index(path: &Path) -> Result<Vec<SnapshotEntry>, IoError> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &INDEX_COLUMNS)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i as u64 + 2;
        let bad = |what: &str| csv_err(path, format!("line {line}: invalid {what}"));
        out.push(SnapshotEntry {
            file: rec.get(0).ok_or_else(|| bad("file"))?.to_string(),
            t: parse_f64(path, line, rec.get(1).ok_or_else(|| bad("t"))?)?,
            step: rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(|| bad("step"))?,
            kind: rec.get(3).and_then(SnapshotKind::parse).ok_or_else(|| bad("kind"))?,
        });
    }
    Ok(out)
}

pub fn write_rescaled(path: &Path, band: &RescaledBand) -> Result<(), IoError> {
    let h = band.mean_curvature();
    let s = &band.samples;
    write_rows(
        path,
        &["x", "w_tilde", "w_tilde_prime", "H_tilde"],
        (0..s.len()).map(|i| {
            vec![
                fmt_f64(s.x(i)),
                fmt_f64(s.value(i)),
                fmt_f64(band.slope[i]),
                fmt_f64(h[i]),
            ]
        }),
    )
}

/// Per-sample blow-up summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledSummaryRow {
    pub t: f64,
    pub u_min: f64,
    pub half_width: f64,
    pub window: f64,
    pub deviation: f64,
    pub deviation_slope: f64,
    pub deviation_second: f64,
    pub gamma: f64,
    pub contradiction_window: f64,
    pub contradiction_full: f64,
    pub band_integral: f64,
}

pub const RESCALED_COLUMNS: [&str; 11] = [
    "t",
    "u_min",
    "half_width",
    "window",
    "deviation",
    "deviation_slope",
    "deviation_second",
    "gamma",
    "contradiction_window",
    "contradiction_full",
    "band_integral",
];

pub fn write_rescaled_summary(path: &Path, rows: &[RescaledSummaryRow]) -> Result<(), IoError> {
    write_rows(
        path,
        &RESCALED_COLUMNS,
        rows.iter().map(|r| {
            [
                r.t,
                r.u_min,
                r.half_width,
                r.window,
                r.deviation,
                r.deviation_slope,
                r.deviation_second,
                r.gamma,
                r.contradiction_window,
                r.contradiction_full,
                r.band_integral,
            ]
            .iter()
            .map(|&x| fmt_f64(x))
            .collect()
        }),
    )
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn set_f64(&mut self, key: &str, value: f64) {
        self.set(key, fmt_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        let text: String = self
            .entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        fs::write(path, text).map_err(|e| IoError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        if !path.exists() {
            return Err(IoError::Missing(path.to_path_buf()));
        }
        let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        let mut m = Manifest::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| IoError::Csv {
                path: path.to_path_buf(),
                message: format!("line {}: expected key=value", i + 1),
            })?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }
}

/// Paths of the artifacts in an output directory.
#[derive(Debug, Clone)]
pub struct OutputLayout {
    pub root: PathBuf,
}

impl OutputLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn series(&self) -> PathBuf {
        self.root.join(SERIES_FILE)
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join(MANIFEST_FILE)
    }

    pub fn snapshots(&self) -> PathBuf {
        self.root.join(SNAPSHOT_DIR)
    }

    pub fn snapshot_index(&self) -> PathBuf {
        self.snapshots().join(SNAPSHOT_INDEX)
    }

    pub fn limit(&self) -> PathBuf {
        self.snapshots().join(LIMIT_FILE)
    }

    pub fn rescaled(&self) -> PathBuf {
        self.root.join(RESCALED_DIR)
    }

    pub fn create_dirs(&self) -> Result<(), IoError> {
        for d in [self.snapshots(), self.rescaled()] {
            fs::create_dir_all(&d).map_err(|e| IoError::io(&d, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_round_torus;

    #[test]
    fn curve_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let c = make_round_torus(3.0, 1.0, 64).unwrap();
        write_curve(&p, &c).unwrap();
        assert_eq!(read_curve(&p).unwrap(), c);
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x1,x2\n"));
        assert_eq!(text.lines().count(), 65);
    }

    #[test]
    fn series_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let mut row = [0.0; 14];
        for (i, v) in row.iter_mut().enumerate() {
            *v = (i as f64 + 0.1).sqrt() * std::f64::consts::PI.powi(i as i32 - 5);
        }
        let recs = vec![DiagnosticsRecord::from_row(&row); 3];
        write_series(&p, &recs).unwrap();
        assert_eq!(read_series(&p).unwrap(), recs);
        let header = fs::read_to_string(&p).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, SERIES_COLUMNS.join(","));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        fs::write(&p, "x,y\n1,2\n").unwrap();
        assert!(matches!(read_curve(&p), Err(IoError::Csv { .. })));
        assert!(matches!(
            read_curve(&dir.path().join("none.csv")),
            Err(IoError::Missing(_))
        ));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        let mut m = Manifest::default();
        m.set("stop_reason", "h_min_reached");
        m.set_f64("t_stop", 0.1 + 0.2);
        m.set("stop_reason", "max_steps");
        m.write(&p).unwrap();
        let r = Manifest::read(&p).unwrap();
        assert_eq!(r, m);
        assert_eq!(r.get_f64("t_stop"), Some(0.1 + 0.2));
        assert_eq!(r.get("stop_reason"), Some("max_steps"));
    }

    #[test]
    fn index_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("index.csv");
        let entries = vec![
            SnapshotEntry { file: snapshot_file_name(0.0), t: 0.0, step: 0, kind: SnapshotKind::Initial },
            SnapshotEntry { file: snapshot_file_name(0.25), t: 0.25, step: 17, kind: SnapshotKind::Approach },
        ];
        write_snapshot_index(&p, &entries).unwrap();
        assert_eq!(read_snapshot_index(&p).unwrap(), entries);
        assert_eq!(entries[1].file, "t_0.250000000000.csv");
    }
}
