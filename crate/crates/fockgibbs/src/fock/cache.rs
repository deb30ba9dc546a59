use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::fock::SectorOperator;

/// Writes `(J, n, dim)` as little-endian `u64` followed by the row-major entries as
/// little-endian `f64`.
pub fn write_sector_matrix<W: Write>(mut out: W, modes: usize, op: &SectorOperator) -> std::io::Result<()> {
    let dim = op.dim();
    for h in [modes as u64, op.n as u64, dim as u64] {
        out.write_all(&h.to_le_bytes())?;
    }
    for i in 0..dim {
        for j in 0..dim {
            out.write_all(&op.matrix[(i, j)].to_le_bytes())?;
        }
    }
    out.flush()
}

/// Inverse of [`write_sector_matrix`]; returns the mode count and the operator.
pub fn read_sector_matrix<R: Read>(mut input: R) -> std::io::Result<(usize, SectorOperator)> {
    let mut word = [0u8; 8];
    let mut header = [0usize; 3];
    for h in header.iter_mut() {
        input.read_exact(&mut word)?;
        *h = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| std::io::Error::new(std::io::ErrorKind::InvalidData, "header field overflows usize"))?;
    }
    let [modes, n, dim] = header;
    let mut matrix = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            input.read_exact(&mut word)?;
            matrix[(i, j)] = f64::from_le_bytes(word);
        }
    }
    Ok((modes, SectorOperator { n, matrix }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{assemble_interaction, enumerate_sector};
    use crate::model::KernelSpec;

    #[test]
    fn round_trip_is_bit_exact() {
        let b = enumerate_sector(1, 4, 100).unwrap();
        let op = assemble_interaction(&b, &KernelSpec::default(), 0.5);
        let mut buf = Vec::new();
        write_sector_matrix(&mut buf, 3, &op).unwrap();
        assert_eq!(buf.len(), 24 + 8 * op.dim() * op.dim());
        assert_eq!(&buf[..8], &3u64.to_le_bytes());
        let (modes, back) = read_sector_matrix(buf.as_slice()).unwrap();
        assert_eq!(modes, 3);
        assert_eq!(back.n, 4);
        assert_eq!(back.matrix, op.matrix);
    }

    #[test]
    fn truncated_input_is_an_error() {
        let buf = 3u64.to_le_bytes();
        assert!(read_sector_matrix(&buf[..]).is_err());
    }
}
