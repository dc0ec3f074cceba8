//! Intensity-trace files: two-column text `(time_s, intensity)` and the
//! binary columnar format with a 16-byte header
//! (magic `FSOT`, version u16, reserved u16, sample rate f64, then f64
//! samples, all little-endian).

use fsoqkd_core::turbulence::IntensityTrace;
use std::io::{self, Read, Write};
use std::path::Path;

pub const FSOT_MAGIC: &[u8; 4] = b"FSOT";
pub const FSOT_VERSION: u16 = 1;

pub fn write_text<W: Write>(trace: &IntensityTrace, mut w: W) -> io::Result<()> {
    let dt = 1.0 / trace.sample_rate;
    for (k, &v) in trace.samples.iter().enumerate() {
        writeln!(w, "{}\t{}", k as f64 * dt, v)?;
    }
    Ok(())
}

pub fn read_text<R: Read>(mut r: R) -> io::Result<IntensityTrace> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let bad = |what: &str| {
            io::Error::new(
                io::ErrorKind::InvalidData,
                format!("trace line {}: {what}", lineno + 1),
            )
        };
        let t: f64 = fields
            .next()
            .ok_or_else(|| bad("missing time column"))?
            .parse()
            .map_err(|_| bad("bad time value"))?;
        let v: f64 = fields
            .next()
            .ok_or_else(|| bad("missing intensity column"))?
            .parse()
            .map_err(|_| bad("bad intensity value"))?;
        if fields.next().is_some() {
            return Err(bad("expected exactly two columns"));
        }
        times.push(t);
        samples.push(v);
    }
    if samples.len() < 2 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "trace needs at least 2 samples",
        ));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "time column must be increasing",
        ));
    }
    Ok(IntensityTrace {
        samples,
        sample_rate: 1.0 / dt,
        seed: None,
    })
}

pub fn write_binary<W: Write>(trace: &IntensityTrace, mut w: W) -> io::Result<()> {
    w.write_all(FSOT_MAGIC)?;
    w.write_all(&FSOT_VERSION.to_le_bytes())?;
    w.write_all(&0u16.to_le_bytes())?;
    w.write_all(&trace.sample_rate.to_le_bytes())?;
    for &v in &trace.samples {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> io::Result<IntensityTrace> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != FSOT_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad magic (expected FSOT)",
        ));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != FSOT_VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported trace version {version}"),
        ));
    }
    let rate = f64::from_le_bytes(header[8..16].try_into().unwrap());
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() % 8 != 0 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "truncated sample data",
        ));
    }
    let samples: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(IntensityTrace {
        samples,
        sample_rate: rate,
        seed: None,
    })
}

/// Reads a trace file, sniffing the binary magic and falling back to text.
pub fn read_path(path: &Path) -> io::Result<IntensityTrace> {
    let bytes = std::fs::read(path)?;
    if bytes.len() >= 4 && &bytes[0..4] == FSOT_MAGIC {
        read_binary(&bytes[..])
    } else {
        read_text(&bytes[..])
    }
}
