//! Portable bitmap format for masks.
//!
//! One ASCII header line `CLMASK1 <cols> <rows> <origin re> <origin im> <spacing>`
//! followed by the row-major cells packed eight per byte, least significant
//! bit first, `ceil(cols·rows / 8)` bytes in total.

use std::io::{BufRead, Write};

use super::{ComplexPoint, GridMask, GridSpec};
use crate::error::{Error, Result};

const MAGIC: &str = "CLMASK1";

pub fn write_mask(mask: &GridMask, out: &mut impl Write) -> Result<()> {
    let s = mask.spec();
    writeln!(
        out,
        "{MAGIC} {} {} {} {} {}",
        s.cols, s.rows, s.origin.re, s.origin.im, s.spacing
    )?;
    let n = s.len();
    let mut bytes = vec![0u8; n.div_ceil(8)];
    for i in mask.iter_set() {
        bytes[i / 8] |= 1 << (i % 8);
    }
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_mask(input: &mut impl BufRead) -> Result<GridMask> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != MAGIC {
        return Err(Error::Format(format!("bad mask header `{}`", header.trim_end())));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|e| Error::Format(format!("`{s}`: {e}")));
    let real = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("`{s}`: {e}")));
    let spec = GridSpec::new(
        ComplexPoint::new(real(fields[3])?, real(fields[4])?),
        real(fields[5])?,
        int(fields[1])?,
        int(fields[2])?,
    )?;
    let n = spec.len();
    let mut bytes = vec![0u8; n.div_ceil(8)];
    input
        .read_exact(&mut bytes)
        .map_err(|e| Error::Format(format!("truncated mask payload: {e}")))?;
    Ok(GridMask::from_fn(spec, |c, r| {
        let i = spec.index(c, r);
        bytes[i / 8] >> (i % 8) & 1 == 1
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_payload_layout() {
        let spec = GridSpec::new(ComplexPoint::new(-1.5, 0.25), 0.125, 3, 3).unwrap();
        let m = GridMask::from_fn(spec, |c, r| (c, r) == (0, 0) || (c, r) == (2, 2));
        let mut buf = Vec::new();
        write_mask(&m, &mut buf).unwrap();
        let header = b"CLMASK1 3 3 -1.5 0.25 0.125\n";
        assert_eq!(&buf[..header.len()], header);
        // Cells 0 and 8 set: bytes 0b0000_0001, 0b0000_0001.
        assert_eq!(&buf[header.len()..], &[1, 1]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_mask(&mut &b"P4 3 3\n"[..]).is_err());
        assert!(read_mask(&mut &b"CLMASK1 8 8 0 0 1\n\x01"[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(cols in 1usize..20, rows in 1usize..20, seed in any::<u64>(),
                      ore in -10.0f64..10.0, oim in -10.0f64..10.0, h in 1e-4f64..3.0) {
            let spec = GridSpec::new(ComplexPoint::new(ore, oim), h, cols, rows).unwrap();
            let m = GridMask::from_fn(spec, |c, r| (crate::rng::splitmix64(seed ^ (c * 31 + r) as u64) & 1) == 1);
            let mut buf = Vec::new();
            write_mask(&m, &mut buf).unwrap();
            let back = read_mask(&mut &buf[..]).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
