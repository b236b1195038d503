//! Text and binary file formats for sensor configurations and frames.
//!
//! Sensor config: one `key=value` per line, `#` comments and blank lines
//! ignored. Keys `lasers`, `steps`, `rotation_rate`, `azimuth_step_rad`,
//! `elevations_rad` (comma-separated) are required, `ground_z_m` is optional.
//!
//! Frames: CSV with `L` rows of `S` decimal ranges in meters, or the binary
//! form `LSC1 | L: u32 | S: u32 | L*S f32`, all little-endian and
//! laser-major.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sensor::{RotationFrame, SensorConfig};

pub const FRAME_MAGIC: &[u8; 4] = b"LSC1";

const CONFIG_KEYS: [&str; 6] = [
    "lasers",
    "steps",
    "rotation_rate",
    "azimuth_step_rad",
    "elevations_rad",
    "ground_z_m",
];

/// `key=value` lines with their 1-based line numbers. Rejects duplicates.
pub(crate) fn key_values<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (no, line) in lines {
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::parse(
                no,
                format!("expected key=value, got '{line}'"),
            ));
        };
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(Error::parse(no, "empty key"));
        }
        if let Some((first, _)) = out.get(&k) {
            return Err(Error::parse(
                no,
                format!("duplicate key '{k}' (first on line {first})"),
            ));
        }
        out.insert(k, (no, v.trim().to_string()));
    }
    Ok(out)
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_value<V: std::str::FromStr>(key: &str, line: usize, v: &str) -> Result<V> {
    v.parse()
        .map_err(|_| Error::parse(line, format!("bad value '{v}' for '{key}'")))
}

/// Builds a config from already-split keys. Unknown keys are left for the
/// caller to reject.
pub(crate) fn config_from_keys<T: Scalar>(
    kv: &BTreeMap<String, (usize, String)>,
    end_line: usize,
) -> Result<SensorConfig<T>> {
    let get = |k: &str| {
        kv.get(k)
            .ok_or_else(|| Error::parse(end_line, format!("missing key '{k}'")))
    };
    let (ln, v) = get("lasers")?;
    let lasers: usize = parse_value("lasers", *ln, v)?;
    let (ln, v) = get("steps")?;
    let steps: usize = parse_value("steps", *ln, v)?;
    let (ln, v) = get("rotation_rate")?;
    let rate: T = parse_value("rotation_rate", *ln, v)?;
    let (ln, v) = get("azimuth_step_rad")?;
    let az: T = parse_value("azimuth_step_rad", *ln, v)?;
    let (ln, v) = get("elevations_rad")?;
    let elev = v
        .split(',')
        .map(|x| parse_value::<T>("elevations_rad", *ln, x.trim()))
        .collect::<Result<Vec<T>>>()?;
    if elev.len() != lasers {
        return Err(Error::parse(
            *ln,
            format!("lasers={lasers} but {} elevations given", elev.len()),
        ));
    }
    let ground = match kv.get("ground_z_m") {
        Some((ln, v)) => Some(parse_value::<T>("ground_z_m", *ln, v)?),
        None => None,
    };
    Ok(SensorConfig::new(elev, steps, az, rate)?.with_ground_z(ground))
}

pub fn parse_config<T: Scalar>(text: &str) -> Result<SensorConfig<T>> {
    let kv = key_values(content_lines(text))?;
    if let Some((k, (ln, _))) = kv.iter().find(|(k, _)| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(Error::parse(*ln, format!("unknown key '{k}'")));
    }
    config_from_keys(&kv, text.lines().count())
}

pub fn format_config<T: Scalar>(config: &SensorConfig<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lasers={}", config.lasers());
    let _ = writeln!(s, "steps={}", config.steps());
    let _ = writeln!(s, "rotation_rate={}", config.rotation_rate());
    let _ = writeln!(s, "azimuth_step_rad={}", config.azimuth_step());
    let elev: Vec<String> = config.elevations().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(s, "elevations_rad={}", elev.join(","));
    if let Some(g) = config.ground_z() {
        let _ = writeln!(s, "ground_z_m={g}");
    }
    s
}

pub fn read_config<T: Scalar>(path: impl AsRef<Path>) -> Result<SensorConfig<T>> {
    parse_config(&std::fs::read_to_string(path)?)
}

pub fn parse_frame_csv<T: Scalar>(text: &str, config: SensorConfig<T>) -> Result<RotationFrame<T>> {
    let mut ranges = Vec::with_capacity(config.cells());
    let mut rows = 0;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = ranges.len();
        for field in line.split(',') {
            ranges.push(parse_value::<T>("range", no + 1, field.trim())?);
        }
        if ranges.len() - before != config.steps() {
            return Err(Error::Dimensions {
                expected_lasers: config.lasers(),
                expected_steps: config.steps(),
                lasers: rows + 1,
                steps: ranges.len() - before,
            });
        }
        rows += 1;
    }
    if rows != config.lasers() {
        return Err(Error::Dimensions {
            expected_lasers: config.lasers(),
            expected_steps: config.steps(),
            lasers: rows,
            steps: config.steps(),
        });
    }
    RotationFrame::new(config, ranges)
}

pub fn format_frame_csv<T: Scalar>(frame: &RotationFrame<T>) -> String {
    let s = frame.steps();
    let mut out = String::with_capacity(frame.ranges().len() * 6);
    for row in frame.ranges().chunks(s) {
        for (i, d) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{d}");
        }
        out.push('\n');
    }
    out
}

/// Binary encoding; ranges are narrowed to `f32`.
pub fn encode_frame_bin<T: Scalar>(frame: &RotationFrame<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * frame.ranges().len());
    out.extend_from_slice(FRAME_MAGIC);
    out.extend_from_slice(&(frame.lasers() as u32).to_le_bytes());
    out.extend_from_slice(&(frame.steps() as u32).to_le_bytes());
    for d in frame.ranges() {
        let v = d.to_f32().unwrap_or(f32::NAN);
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_frame_bin<T: Scalar>(
    bytes: &[u8],
    config: SensorConfig<T>,
) -> Result<RotationFrame<T>> {
    if bytes.len() < 12 || &bytes[..4] != FRAME_MAGIC {
        return Err(Error::Format("missing LSC1 header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (lasers, steps) = (word(4), word(8));
    if lasers != config.lasers() || steps != config.steps() {
        return Err(Error::Dimensions {
            expected_lasers: config.lasers(),
            expected_steps: config.steps(),
            lasers,
            steps,
        });
    }
    let body = &bytes[12..];
    if body.len() != 4 * lasers * steps {
        return Err(Error::Format(format!(
            "expected {} bytes of ranges, found {}",
            4 * lasers * steps,
            body.len()
        )));
    }
    let ranges = body
        .chunks_exact(4)
        .map(|c| T::from_f32(f32::from_le_bytes(c.try_into().unwrap())).unwrap_or(T::nan()))
        .collect();
    RotationFrame::new(config, ranges)
}

/// Reads a frame in either format, recognising the binary magic.
pub fn read_frame<T: Scalar>(
    path: impl AsRef<Path>,
    config: SensorConfig<T>,
) -> Result<RotationFrame<T>> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(FRAME_MAGIC) {
        decode_frame_bin(&bytes, config)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Format("frame is neither LSC1 nor UTF-8 CSV".into()))?;
        parse_frame_csv(&text, config)
    }
}

/// Dimensions stored in a binary frame header, if the file is binary.
pub fn peek_dimensions(bytes: &[u8]) -> Option<(usize, usize)> {
    if bytes.len() < 12 || &bytes[..4] != FRAME_MAGIC {
        return None;
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    Some((word(4), word(8)))
}

/// Writes binary when the extension is `bin` or `lsc`, CSV otherwise.
pub fn write_frame<T: Scalar>(path: impl AsRef<Path>, frame: &RotationFrame<T>) -> Result<()> {
    let path = path.as_ref();
    let binary = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("bin") | Some("lsc")
    );
    if binary {
        std::fs::write(path, encode_frame_bin(frame))?;
    } else {
        std::fs::write(path, format_frame_csv(frame))?;
    }
    Ok(())
}
