//! Frame export: columnar binary (I column, Q column, pilot-flag column)
//! with magic `QFRM`; constellation export as `(re, im, prob)` text triples.

use fsoqkd_core::signal::{Constellation, QuantumFrame};
use std::io::{self, Read, Write};

pub const QFRM_MAGIC: &[u8; 4] = b"QFRM";
pub const QFRM_VERSION: u16 = 1;

pub fn write_frame<W: Write>(frame: &QuantumFrame, mut w: W) -> io::Result<()> {
    w.write_all(QFRM_MAGIC)?;
    w.write_all(&QFRM_VERSION.to_le_bytes())?;
    w.write_all(&0u16.to_le_bytes())?;
    w.write_all(&(frame.symbols.len() as u64).to_le_bytes())?;
    w.write_all(&frame.symbol_rate.to_le_bytes())?;
    for s in &frame.symbols {
        w.write_all(&s.re.to_le_bytes())?;
    }
    for s in &frame.symbols {
        w.write_all(&s.im.to_le_bytes())?;
    }
    for &m in &frame.pilot_mask {
        w.write_all(&[m as u8])?;
    }
    Ok(())
}

/// Reads back `(symbols, pilot_mask, symbol_rate)`. Ground-truth quantum
/// symbols are not stored in the file; they are simulation-side state.
pub fn read_frame<R: Read>(
    mut r: R,
) -> io::Result<(Vec<fsoqkd_core::Complex64>, Vec<bool>, f64)> {
    let mut header = [0u8; 24];
    r.read_exact(&mut header)?;
    if &header[0..4] != QFRM_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad magic (expected QFRM)",
        ));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != QFRM_VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported frame version {version}"),
        ));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
    let rate = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != n * 17 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "truncated frame data",
        ));
    }
    let f64_at = |base: usize, k: usize| -> f64 {
        f64::from_le_bytes(body[base + 8 * k..base + 8 * k + 8].try_into().unwrap())
    };
    let mut symbols = Vec::with_capacity(n);
    for k in 0..n {
        symbols.push(fsoqkd_core::Complex64::new(f64_at(0, k), f64_at(8 * n, k)));
    }
    let mask: Vec<bool> = body[16 * n..].iter().map(|&b| b != 0).collect();
    Ok((symbols, mask, rate))
}

/// Text export: one `re im prob` triple per line.
pub fn write_constellation<W: Write>(c: &Constellation, mut w: W) -> io::Result<()> {
    for (point, &p) in c.points.iter().zip(&c.probs) {
        writeln!(w, "{} {} {}", point.re, point.im, p)?;
    }
    Ok(())
}
