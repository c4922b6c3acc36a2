//! Binary amplitude checkpoints: `"QLSV"`, version `u32`, `L` as `u32`, then
//! `2^L` little-endian `(re, im)` pairs of `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"QLSV";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(state: &StateVector, mut out: W) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(state.sites() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * state.dim());
    for a in state.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<StateVector> {
    let mut header = [0u8; 12];
    input.read_exact(&mut header)?;
    if &header[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let sites = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    if sites > 40 {
        return Err(Error::Checkpoint(format!("implausible site count {sites}")));
    }
    let mut raw = vec![0u8; 16 << sites];
    input.read_exact(&mut raw)?;
    let amplitudes = raw
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    StateVector::from_amplitudes(sites, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HamiltonianSpec;
    use crate::statevector::{prepare_polarized_x, Propagator, TrotterPlan};

    #[test]
    fn round_trip_is_bit_exact() {
        let spec = HamiltonianSpec::nearest_neighbor(5, 0.9);
        let mut s = prepare_polarized_x(5);
        Propagator::new(&spec, TrotterPlan::fourth_order(0.1))
            .unwrap()
            .steps(&mut s, 3)
            .unwrap();
        let mut bytes = Vec::new();
        write_checkpoint(&s, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"QLSV");
        assert_eq!(bytes.len(), 12 + 16 * 32);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 5);
        let back = read_checkpoint(bytes.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_corruption() {
        let s = prepare_polarized_x(3);
        let mut bytes = Vec::new();
        write_checkpoint(&s, &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_checkpoint(bad.as_slice()).is_err());
        let truncated = &bytes[..bytes.len() - 1];
        assert!(read_checkpoint(truncated).is_err());
        let mut wrong_version = bytes;
        wrong_version[4] = 9;
        assert!(read_checkpoint(wrong_version.as_slice()).is_err());
    }
}
