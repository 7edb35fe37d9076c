//! Station/reading CSV files and a synthetic dataset generator.
//!
//! `stations.csv` has header `id,x,y`. A readings file has header
//! `station_id,h0,…,h{N1−1}` and one row per station; rows may come in any
//! order and are rearranged to match the stations file. A dataset holds one
//! readings matrix per day: either a single file or a directory of `*.csv`
//! files, one per day, taken in file name order.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::ProductSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Day {
    pub label: String,
    /// Stations × hours.
    pub signal: ProductSignal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub stations: Vec<Station>,
    pub days: Vec<Day>,
}

impl Dataset {
    /// Number of hours (the temporal factor's order).
    pub fn n1(&self) -> usize {
        self.days.first().map_or(0, |d| d.signal.n1())
    }

    /// Number of stations.
    pub fn n2(&self) -> usize {
        self.stations.len()
    }

    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        self.stations.iter().map(|s| (s.x, s.y)).collect()
    }

    pub fn signals(&self) -> Vec<ProductSignal> {
        self.days.iter().map(|d| d.signal.clone()).collect()
    }
}

pub fn load_dataset(stations_path: &Path, readings_path: &Path) -> Result<Dataset> {
    let stations = load_stations(stations_path)?;
    let files = if readings_path.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(readings_path).map_err(|e| Error::io(readings_path, e))? {
            let path = entry.map_err(|e| Error::io(readings_path, e))?.path();
            if path.is_file() && path.extension().is_some_and(|e| e == "csv") {
                files.push(path);
            }
        }
        files.sort();
        if files.is_empty() {
            return Err(Error::dataset(
                readings_path,
                "directory contains no .csv files",
            ));
        }
        files
    } else {
        vec![readings_path.to_path_buf()]
    };

    let mut days = Vec::with_capacity(files.len());
    for path in &files {
        let signal = load_readings(path, &stations)?;
        if let Some(first) = days.first().map(|d: &Day| d.signal.n1()) {
            if signal.n1() != first {
                return Err(Error::dataset(
                    path,
                    format!("has {} hours but earlier days have {first}", signal.n1()),
                ));
            }
        }
        let label = path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        days.push(Day { label, signal });
    }
    Ok(Dataset { stations, days })
}

pub fn load_stations(path: &Path) -> Result<Vec<Station>> {
    let rows = read_rows(path, &["id", "x", "y"], false)?;
    let mut seen = HashMap::new();
    let mut stations = Vec::with_capacity(rows.len());
    for (line, fields) in rows {
        if fields.len() != 3 {
            return Err(parse_error(
                path,
                line,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let id = fields[0].clone();
        if id.is_empty() {
            return Err(parse_error(path, line, "empty station id"));
        }
        if let Some(prev) = seen.insert(id.clone(), line) {
            return Err(parse_error(
                path,
                line,
                format!("duplicate station id {id:?} (first on line {prev})"),
            ));
        }
        stations.push(Station {
            id,
            x: parse_number(path, line, "x", &fields[1])?,
            y: parse_number(path, line, "y", &fields[2])?,
        });
    }
    if stations.is_empty() {
        return Err(Error::dataset(path, "no stations"));
    }
    Ok(stations)
}

/// Reads one day of readings, rows ordered as in `stations`.
pub fn load_readings(path: &Path, stations: &[Station]) -> Result<ProductSignal> {
    let rows = read_rows(path, &["station_id"], true)?;
    let hours = rows.first().map_or(0, |(_, f)| f.len() - 1);
    if rows.len() != stations.len() {
        return Err(Error::dataset(
            path,
            format!(
                "{} reading rows but {} stations",
                rows.len(),
                stations.len()
            ),
        ));
    }
    let index: HashMap<&str, usize> = stations
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();
    let mut values = vec![None; stations.len()];
    for (line, fields) in rows {
        if fields.len() != hours + 1 {
            return Err(parse_error(
                path,
                line,
                format!("expected {} fields, found {}", hours + 1, fields.len()),
            ));
        }
        let &row = index.get(fields[0].as_str()).ok_or_else(|| {
            parse_error(path, line, format!("unknown station id {:?}", fields[0]))
        })?;
        if values[row].is_some() {
            return Err(parse_error(
                path,
                line,
                format!("duplicate readings for station {:?}", fields[0]),
            ));
        }
        let parsed = fields[1..]
            .iter()
            .enumerate()
            .map(|(h, v)| parse_number(path, line, &format!("h{h}"), v))
            .collect::<Result<Vec<_>>>()?;
        values[row] = Some(parsed);
    }
    let values: Vec<Vec<f64>> = values
        .into_iter()
        .map(|v| v.expect("every station has a row"))
        .collect();
    Ok(ProductSignal::from_fn(hours, stations.len(), |r, c| {
        values[r][c]
    }))
}

pub fn save_stations(path: &Path, stations: &[Station]) -> Result<()> {
    let mut out = String::from("id,x,y\n");
    for s in stations {
        out.push_str(&format!("{},{},{}\n", s.id, s.x, s.y));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes readings with the shortest decimal text that parses back to the same value.
pub fn save_readings(path: &Path, stations: &[Station], signal: &ProductSignal) -> Result<()> {
    if signal.n2() != stations.len() {
        return Err(Error::ShapeMismatch {
            expected: (stations.len(), signal.n1()),
            found: (signal.n2(), signal.n1()),
        });
    }
    let mut out = String::from("station_id");
    for h in 0..signal.n1() {
        out.push_str(&format!(",h{h}"));
    }
    out.push('\n');
    let m = signal.as_mat();
    for (r, s) in stations.iter().enumerate() {
        out.push_str(&s.id);
        for c in 0..signal.n1() {
            out.push_str(&format!(",{}", m[(r, c)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Writes `dir/stations.csv` and one `dir/readings/<label>.csv` per day.
pub fn save_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    let readings = dir.join("readings");
    fs::create_dir_all(&readings).map_err(|e| Error::io(&readings, e))?;
    save_stations(&dir.join("stations.csv"), &dataset.stations)?;
    for day in &dataset.days {
        save_readings(
            &readings.join(format!("{}.csv", day.label)),
            &dataset.stations,
            &day.signal,
        )?;
    }
    Ok(())
}

/// Shape and seed of a synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureSpec {
    pub hours: usize,
    pub stations: usize,
    pub days: usize,
    pub seed: u64,
}

/// Hourly temperature-like readings: a diurnal cycle peaking mid-afternoon,
/// a smooth spatial gradient over station positions in a 100 × 100 square,
/// a per-day offset and small uniform jitter.
pub fn synthetic_dataset(spec: FixtureSpec) -> Result<Dataset> {
    if spec.hours == 0 || spec.stations < 2 || spec.days == 0 {
        return Err(Error::InvalidArgument(
            "fixture needs at least 1 hour, 2 stations and 1 day".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let stations: Vec<Station> = (0..spec.stations)
        .map(|s| Station {
            id: format!("s{s:03}"),
            x: round(rng.gen_range(0.0..100.0), 3),
            y: round(rng.gen_range(0.0..100.0), 3),
        })
        .collect();
    let period = std::f64::consts::TAU / spec.hours as f64;
    let days = (0..spec.days)
        .map(|d| {
            let offset = 2.0 * (0.7 * d as f64).sin();
            let jitter: Vec<f64> = (0..spec.hours * spec.stations)
                .map(|_| rng.gen_range(-0.25..0.25))
                .collect();
            let signal = ProductSignal::from_fn(spec.hours, spec.stations, |r, c| {
                let st = &stations[r];
                let diurnal = 5.0 * (period * (c as f64 - 0.625 * spec.hours as f64)).cos();
                let spatial =
                    0.04 * st.x - 0.03 * st.y + 1.5 * (st.x / 30.0).sin() * (st.y / 40.0).cos();
                round(
                    12.0 + offset + diurnal + spatial + jitter[c * spec.stations + r],
                    2,
                )
            });
            Day {
                label: format!("day{d:02}"),
                signal,
            }
        })
        .collect();
    Ok(Dataset { stations, days })
}

fn round(v: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (v * scale).round() / scale
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Data rows with their 1-based line numbers, after checking the header.
/// With `open_ended`, the header must start with `expected` and may continue.
fn read_rows(path: &Path, expected: &[&str], open_ended: bool) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if !header_seen {
            header_seen = true;
            check_header(path, line, &fields, expected, open_ended)?;
            continue;
        }
        if fields.iter().all(String::is_empty) {
            continue;
        }
        rows.push((line, fields));
    }
    if !header_seen {
        return Err(Error::dataset(path, "file is empty"));
    }
    Ok(rows)
}

fn check_header(
    path: &Path,
    line: u64,
    fields: &[String],
    expected: &[&str],
    open_ended: bool,
) -> Result<()> {
    let prefix_ok =
        fields.len() >= expected.len() && fields.iter().zip(expected).all(|(f, e)| f == e);
    if !prefix_ok || (!open_ended && fields.len() != expected.len()) {
        let want = if open_ended {
            format!("{},…", expected.join(","))
        } else {
            expected.join(",")
        };
        return Err(parse_error(
            path,
            line,
            format!("expected header {want}, found {}", fields.join(",")),
        ));
    }
    if open_ended {
        for (h, f) in fields[expected.len()..].iter().enumerate() {
            if *f != format!("h{h}") {
                return Err(parse_error(
                    path,
                    line,
                    format!("column {} should be h{h}, found {f:?}", h + 2),
                ));
            }
        }
        if fields.len() == expected.len() {
            return Err(parse_error(path, line, "no hour columns"));
        }
    }
    Ok(())
}

fn parse_number(path: &Path, line: u64, column: &str, text: &str) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| {
        parse_error(
            path,
            line,
            format!("column {column}: {text:?} is not a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(parse_error(
            path,
            line,
            format!("column {column}: {text:?} is not finite"),
        ));
    }
    Ok(v)
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => parse_error(path, line, format!("{kind:?}")),
    }
}
