use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::Fft3;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::model::{sym_index, sym_multiplicity};

/// Tensor valence of a grid function.
///
/// `SymTensor` stores the six components in [`crate::model::SYM_PAIRS`] order, `Antisym`
/// stores the (0,1), (0,2), (1,2) entries of an antisymmetric matrix, and
/// `Tensor(r)` is a full rank-`r` tensor with `3^r` components whose flat
/// index is `sum_a i_a 3^(r-1-a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valence {
    Scalar,
    Vector,
    SymTensor,
    Antisym,
    Tensor(u8),
}

impl Valence {
    pub fn ncomp(&self) -> usize {
        match self {
            Valence::Scalar => 1,
            Valence::Vector => 3,
            Valence::SymTensor => 6,
            Valence::Antisym => 3,
            Valence::Tensor(r) => 3usize.pow(*r as u32),
        }
    }

    pub fn rank(&self) -> u8 {
        match self {
            Valence::Scalar => 0,
            Valence::Vector => 1,
            Valence::SymTensor | Valence::Antisym => 2,
            Valence::Tensor(r) => *r,
        }
    }

    /// Weight of component `c` in the Frobenius norm of the full tensor.
    pub fn multiplicity(&self, c: usize) -> f64 {
        match self {
            Valence::SymTensor => sym_multiplicity(c),
            Valence::Antisym => 2.0,
            _ => 1.0,
        }
    }

    /// Normalized form: scalars and vectors as `Tensor(0)` / `Tensor(1)`.
    fn canonical(&self) -> Valence {
        match self {
            Valence::Tensor(0) => Valence::Scalar,
            Valence::Tensor(1) => Valence::Vector,
            v => *v,
        }
    }
}

/// Real grid function of any valence.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub valence: Valence,
    pub comps: Vec<Vec<f64>>,
}

/// Fourier coefficients of a real grid function, normalized so that the
/// zero mode is the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub valence: Valence,
    pub comps: Vec<Vec<Complex64>>,
}

impl Field {
    pub fn zeros(grid: Grid, valence: Valence) -> Self {
        Field {
            grid,
            valence,
            comps: vec![vec![0.0; grid.len()]; valence.ncomp()],
        }
    }

    pub fn new(grid: Grid, valence: Valence, comps: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&grid, valence, comps.iter().map(Vec::len))?;
        Ok(Field {
            grid,
            valence,
            comps,
        })
    }

    /// Scalar field sampled from `f(x)`.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|p| f(grid.point(p))).collect();
        Field {
            grid,
            valence: Valence::Scalar,
            comps: vec![data],
        }
    }

    /// Integral of the squared Frobenius norm by the trapezoid (grid) rule.
    pub fn l2_norm_sq(&self) -> f64 {
        let dv = self.grid.cell_volume();
        self.comps
            .iter()
            .enumerate()
            .map(|(c, v)| self.valence.multiplicity(c) * v.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            * dv
    }

    pub fn l2_inner(&self, other: &Field) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        if self.valence != other.valence {
            return Err(Error::GridMismatch("valence mismatch".into()));
        }
        let dv = self.grid.cell_volume();
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .map(|(c, (a, b))| {
                self.valence.multiplicity(c) * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
            })
            .sum::<f64>()
            * dv)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .fold(0.0, |a, &b| a.max(b.abs()))
    }
}

fn check_shape(grid: &Grid, valence: Valence, lens: impl Iterator<Item = usize>) -> Result<()> {
    let lens: Vec<usize> = lens.collect();
    if lens.len() != valence.ncomp() {
        return Err(Error::GridMismatch(format!(
            "{valence:?} needs {} components, got {}",
            valence.ncomp(),
            lens.len()
        )));
    }
    if let Some(bad) = lens.iter().find(|&&l| l != grid.len()) {
        return Err(Error::GridMismatch(format!(
            "component length {bad} != {}",
            grid.len()
        )));
    }
    Ok(())
}

pub fn transform(field: &Field, fft: &Fft3) -> Result<SpectralField> {
    if fft.n() != field.grid.n() {
        return Err(Error::GridMismatch(format!(
            "fft size {} vs grid {}",
            fft.n(),
            field.grid.n()
        )));
    }
    let refs: Vec<&[f64]> = field.comps.iter().map(Vec::as_slice).collect();
    Ok(SpectralField {
        grid: field.grid,
        valence: field.valence,
        comps: fft.forward_real_many(&refs),
    })
}

pub fn inverse_transform(spec: &SpectralField, fft: &Fft3) -> Result<Field> {
    if fft.n() != spec.grid.n() {
        return Err(Error::GridMismatch(format!(
            "fft size {} vs grid {}",
            fft.n(),
            spec.grid.n()
        )));
    }
    let refs: Vec<&[Complex64]> = spec.comps.iter().map(Vec::as_slice).collect();
    Ok(Field {
        grid: spec.grid,
        valence: spec.valence,
        comps: fft.inverse_real_many(&refs),
    })
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl SpectralField {
    pub fn zeros(grid: Grid, valence: Valence) -> Self {
        SpectralField {
            grid,
            valence,
            comps: vec![vec![Complex64::default(); grid.len()]; valence.ncomp()],
        }
    }

    pub fn new(grid: Grid, valence: Valence, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        check_shape(&grid, valence, comps.iter().map(Vec::len))?;
        Ok(SpectralField {
            grid,
            valence,
            comps,
        })
    }

    pub fn scalar(grid: Grid, data: Vec<Complex64>) -> Self {
        SpectralField {
            grid,
            valence: Valence::Scalar,
            comps: vec![data],
        }
    }

    /// `integral |f|^2` by Parseval: `|box| sum_k |f_k|^2` (Frobenius over components).
    pub fn l2_norm_sq(&self) -> f64 {
        self.grad_norm_sq(0)
    }

    /// `||grad^m f||^2 = |box| sum_k |k|^{2m} |f_k|^2`.
    pub fn grad_norm_sq(&self, m: u32) -> f64 {
        self.weighted_norm_sq(|r| r.powi(2 * m as i32))
    }

    /// `|box| sum_k w(|k|) |f_k|^2`.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for p in 0..g.len() {
            let s: f64 = self
                .comps
                .iter()
                .enumerate()
                .map(|(c, v)| self.valence.multiplicity(c) * v[p].norm_sqr())
                .sum();
            if s != 0.0 {
                acc += w(g.xi_norm(p)) * s;
            }
        }
        acc * g.volume()
    }

    /// `integral grad^m f : grad^m h` for fields of equal valence.
    pub fn grad_inner(&self, other: &SpectralField, m: u32) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        if self.valence != other.valence {
            return Err(Error::GridMismatch("valence mismatch".into()));
        }
        let g = &self.grid;
        let mut acc = 0.0;
        for p in 0..g.len() {
            let mut s = 0.0;
            for (c, (a, b)) in self.comps.iter().zip(&other.comps).enumerate() {
                s += self.valence.multiplicity(c) * (a[p].conj() * b[p]).re;
            }
            acc += g.xi_norm(p).powi(2 * m as i32) * s;
        }
        Ok(acc * g.volume())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.comps.iter_mut().flatten().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Multiply every coefficient by `m(xi)`.
    pub fn multiply(&self, m: impl Fn([f64; 3]) -> Complex64) -> Self {
        let mut out = self.clone();
        for p in 0..self.grid.len() {
            let f = m(self.grid.xi(p));
            for c in out.comps.iter_mut() {
                c[p] *= f;
            }
        }
        out
    }

    /// Expand `SymTensor`/`Antisym` storage to a full rank-2 tensor.
    pub fn to_full(&self) -> SpectralField {
        match self.valence {
            Valence::SymTensor => {
                let comps = (0..9)
                    .map(|f| self.comps[sym_index(f / 3, f % 3)].clone())
                    .collect();
                SpectralField {
                    grid: self.grid,
                    valence: Valence::Tensor(2),
                    comps,
                }
            }
            Valence::Antisym => {
                let zero = vec![Complex64::default(); self.grid.len()];
                let comps = (0..9)
                    .map(|f| {
                        let (i, j) = (f / 3, f % 3);
                        match (i, j) {
                            _ if i == j => zero.clone(),
                            _ => {
                                let c = antisym_index(i.min(j), i.max(j));
                                let s = if i < j { 1.0 } else { -1.0 };
                                self.comps[c].iter().map(|v| v * s).collect()
                            }
                        }
                    })
                    .collect();
                SpectralField {
                    grid: self.grid,
                    valence: Valence::Tensor(2),
                    comps,
                }
            }
            Valence::Scalar => SpectralField {
                valence: Valence::Tensor(0),
                ..self.clone()
            },
            Valence::Vector => SpectralField {
                valence: Valence::Tensor(1),
                ..self.clone()
            },
            Valence::Tensor(_) => self.clone(),
        }
    }

    /// Gradient, appending the derivative as the last tensor index
    /// (so `(grad u)_{i l} = d_l u_i`).
    pub fn gradient(&self) -> SpectralField {
        let full = self.to_full();
        let rank = full.valence.rank();
        let g = self.grid;
        let mut comps = Vec::with_capacity(full.comps.len() * 3);
        for c in &full.comps {
            for l in 0..3 {
                let mut d = c.clone();
                for (p, v) in d.iter_mut().enumerate() {
                    *v *= I * g.xi(p)[l];
                }
                comps.push(d);
            }
        }
        SpectralField {
            grid: g,
            valence: Valence::Tensor(rank + 1).canonical(),
            comps,
        }
    }

    /// `grad^m f` as a full tensor of rank `rank(f) + m`.
    pub fn nabla_m(&self, m: u32) -> SpectralField {
        let mut out = self.to_full();
        for _ in 0..m {
            out = out.gradient();
        }
        out
    }

    /// Contraction of the last index with the derivative; `(div tau)_i = d_j tau_ij`.
    pub fn divergence(&self) -> Result<SpectralField> {
        let full = self.to_full();
        let rank = full.valence.rank();
        if rank == 0 {
            return Err(Error::GridMismatch("divergence of a scalar".into()));
        }
        let g = self.grid;
        let outer = full.comps.len() / 3;
        let mut comps = vec![vec![Complex64::default(); g.len()]; outer];
        for (o, dst) in comps.iter_mut().enumerate() {
            for l in 0..3 {
                let src = &full.comps[o * 3 + l];
                for p in 0..g.len() {
                    dst[p] += I * g.xi(p)[l] * src[p];
                }
            }
        }
        Ok(SpectralField {
            grid: g,
            valence: Valence::Tensor(rank - 1).canonical(),
            comps,
        })
    }

    pub fn laplacian(&self) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        for p in 0..g.len() {
            let r2 = g.xi_norm(p).powi(2);
            for c in out.comps.iter_mut() {
                c[p] *= -r2;
            }
        }
        out
    }

    /// Zero every mode outside the 2/3 dealiasing mask.
    pub fn dealias(&mut self) {
        let g = self.grid;
        for p in 0..g.len() {
            if !g.is_resolved(p) {
                for c in self.comps.iter_mut() {
                    c[p] = Complex64::default();
                }
            }
        }
    }

    /// Largest violation of `f(-k) = conj(f(k))` over all components.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for p in 0..g.len() {
                worst = worst.max((c[p] - c[g.conj_index(p)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .flatten()
            .zip(other.comps.iter().flatten())
            .fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }
}

/// Storage index of the antisymmetric entry (i, j) with i < j.
pub(crate) fn antisym_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 1) => 0,
        (0, 2) => 1,
        _ => 2,
    }
}
