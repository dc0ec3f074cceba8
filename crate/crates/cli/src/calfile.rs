//! Calibration-record audit format: flat `key=value` lines.

use fsoqkd_core::dsp::CalibrationRecord;
use std::io::{self, Read, Write};

pub fn write_calibration<W: Write>(cal: &CalibrationRecord, mut w: W) -> io::Result<()> {
    writeln!(w, "snu_scale={}", cal.snu_scale)?;
    writeln!(w, "v_el={}", cal.v_el)?;
    writeln!(w, "clearance_db={}", cal.clearance_db)?;
    writeln!(w, "eta_total={}", cal.eta_total)?;
    Ok(())
}

pub fn read_calibration<R: Read>(mut r: R) -> io::Result<CalibrationRecord> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut snu_scale = None;
    let mut v_el = None;
    let mut clearance_db = None;
    let mut eta_total = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            io::Error::new(io::ErrorKind::InvalidData, format!("bad line '{line}'"))
        })?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, format!("bad value '{v}'")))?;
        match k.trim() {
            "snu_scale" => snu_scale = Some(value),
            "v_el" => v_el = Some(value),
            "clearance_db" => clearance_db = Some(value),
            "eta_total" => eta_total = Some(value),
            other => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("unknown calibration key '{other}'"),
                ))
            }
        }
    }
    let missing = || io::Error::new(io::ErrorKind::InvalidData, "missing calibration field");
    Ok(CalibrationRecord {
        snu_scale: snu_scale.ok_or_else(missing)?,
        v_el: v_el.ok_or_else(missing)?,
        clearance_db: clearance_db.ok_or_else(missing)?,
        eta_total: eta_total.ok_or_else(missing)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let cal = CalibrationRecord {
            snu_scale: 5.2e-6,
            v_el: 0.1,
            clearance_db: 10.0,
            eta_total: 0.35,
        };
        let mut buf = Vec::new();
        write_calibration(&cal, &mut buf).unwrap();
        let back = read_calibration(&buf[..]).unwrap();
        assert_eq!(back, cal);
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(read_calibration(&b"snu_scale=1\nmystery=2\n"[..]).is_err());
    }
}
