use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::field::{Field, Valence};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OBSF";
pub const VERSION: u8 = 1;
const LITTLE: u8 = b'L';
/// Largest grid written by [`write_csv`].
pub const CSV_MAX_N: usize = 32;

fn valence_code(v: Valence) -> (u8, u8) {
    match v {
        Valence::Scalar => (0, 0),
        Valence::Vector => (1, 1),
        Valence::SymTensor => (2, 2),
        Valence::Antisym => (3, 2),
        Valence::Tensor(r) => (4, r),
    }
}

fn valence_from(code: u8, rank: u8) -> Result<Valence> {
    Ok(match code {
        0 => Valence::Scalar,
        1 => Valence::Vector,
        2 => Valence::SymTensor,
        3 => Valence::Antisym,
        4 if rank <= 6 => Valence::Tensor(rank),
        _ => return Err(Error::Format(format!("unknown valence code {code}/{rank}"))),
    })
}

/// Writes `field` at time `t` in the binary container described in
/// `docs/field-format.md`.
pub fn write_field<W: Write>(w: &mut W, field: &Field, t: f64) -> Result<()> {
    let g = field.grid;
    let (code, rank) = valence_code(field.valence);
    w.write_all(MAGIC)?;
    w.write_u8(LITTLE)?;
    w.write_u8(VERSION)?;
    w.write_u8(code)?;
    w.write_u8(rank)?;
    w.write_u32::<LittleEndian>(field.comps.len() as u32)?;
    for _ in 0..3 {
        w.write_u32::<LittleEndian>(g.n() as u32)?;
    }
    for l in g.lengths() {
        w.write_f64::<LittleEndian>(l)?;
    }
    w.write_f64::<LittleEndian>(t)?;
    for c in &field.comps {
        for &v in c {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<(Field, f64)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let endian = r.read_u8()?;
    if endian != LITTLE {
        return Err(Error::Format(format!(
            "unsupported endianness tag {endian}"
        )));
    }
    let version = r.read_u8()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let code = r.read_u8()?;
    let rank = r.read_u8()?;
    let valence = valence_from(code, rank)?;
    let ncomp = r.read_u32::<LittleEndian>()? as usize;
    if ncomp != valence.ncomp() {
        return Err(Error::Format(format!("{ncomp} components for {valence:?}")));
    }
    let dims = [
        r.read_u32::<LittleEndian>()? as usize,
        r.read_u32::<LittleEndian>()? as usize,
        r.read_u32::<LittleEndian>()? as usize,
    ];
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(Error::Format(format!("non-cubic dims {dims:?}")));
    }
    let mut lengths = [0.0; 3];
    for l in lengths.iter_mut() {
        *l = r.read_f64::<LittleEndian>()?;
    }
    let t = r.read_f64::<LittleEndian>()?;
    let grid = Grid::new(dims[0], lengths).map_err(|e| Error::Format(e.to_string()))?;
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut c = vec![0.0; grid.len()];
        r.read_f64_into::<LittleEndian>(&mut c)?;
        comps.push(c);
    }
    Ok((Field::new(grid, valence, comps)?, t))
}

/// Writes one row per grid point: `x,y,z,c0,c1,...`.
pub fn write_csv<W: Write>(w: &mut W, field: &Field) -> Result<()> {
    let g = field.grid;
    if g.n() > CSV_MAX_N {
        return Err(Error::Format(format!(
            "CSV output is limited to n <= {CSV_MAX_N}"
        )));
    }
    write!(w, "x,y,z")?;
    for c in 0..field.comps.len() {
        write!(w, ",c{c}")?;
    }
    writeln!(w)?;
    for p in 0..g.len() {
        let x = g.point(p);
        write!(w, "{:e},{:e},{:e}", x[0], x[1], x[2])?;
        for c in &field.comps {
            write!(w, ",{:e}", c[p])?;
        }
        writeln!(w)?;
    }
    Ok(())
}
