use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Storage order of the six independent components of a symmetric 3x3 tensor.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Position of entry (i, j) in [`SYM_PAIRS`] order.
#[inline]
pub const fn sym_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

/// Frobenius multiplicity of a stored component (off-diagonals appear twice).
#[inline]
pub const fn sym_multiplicity(c: usize) -> f64 {
    if c < 3 {
        1.0
    } else {
        2.0
    }
}

/// A symmetric 3x3 tensor value; symmetry is structural.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StressTensor(pub [f64; 6]);

impl StressTensor {
    pub fn isotropic(s: f64) -> Self {
        StressTensor([s, s, s, 0.0, 0.0, 0.0])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[sym_index(i, j)]
    }

    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        let mut c = [0.0; 6];
        for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            c[n] = 0.5 * (m[i][j] + m[j][i]);
        }
        StressTensor(c)
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.get(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(c, v)| sym_multiplicity(c) * v * v)
            .sum()
    }

    fn shift_diagonal(mut self, s: f64) -> Self {
        for c in 0..3 {
            self.0[c] += s;
        }
        self
    }
}

/// tau = T - k eta I, pointwise; `eta` is the total polymer density.
pub fn reformulate_stress(t: &[StressTensor], eta: &[f64], k: f64) -> Result<Vec<StressTensor>> {
    if t.len() != eta.len() {
        return Err(Error::GridMismatch(format!(
            "stress has {} points, eta has {}",
            t.len(),
            eta.len()
        )));
    }
    Ok(t.iter()
        .zip(eta)
        .map(|(&s, &e)| s.shift_diagonal(-k * e))
        .collect())
}

/// T = tau + k eta I, pointwise; inverse of [`reformulate_stress`].
pub fn unreformulate_stress(
    tau: &[StressTensor],
    eta: &[f64],
    k: f64,
) -> Result<Vec<StressTensor>> {
    if tau.len() != eta.len() {
        return Err(Error::GridMismatch(format!(
            "stress has {} points, eta has {}",
            tau.len(),
            eta.len()
        )));
    }
    Ok(tau
        .iter()
        .zip(eta)
        .map(|(&s, &e)| s.shift_diagonal(k * e))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equilibrium_stress_maps_to_zero() {
        let k = 1.7;
        let eta = vec![0.9, 1.3];
        let t: Vec<_> = eta
            .iter()
            .map(|&e| StressTensor::isotropic(k * e))
            .collect();
        let tau = reformulate_stress(&t, &eta, k).unwrap();
        assert!(tau.iter().all(|s| s.0.iter().all(|v| v.abs() < 1e-15)));
    }

    #[test]
    fn inverse_at_equilibrium() {
        let t = unreformulate_stress(&[StressTensor::default()], &[1.0], 2.0).unwrap();
        assert_eq!(t[0], StressTensor::isotropic(2.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            reformulate_stress(&[StressTensor::default()], &[], 1.0),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn matrix_round_trip_and_index() {
        let s = StressTensor([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(StressTensor::from_matrix(&s.to_matrix()), s);
        for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            assert_eq!(sym_index(i, j), n);
            assert_eq!(sym_index(j, i), n);
        }
        assert_eq!(
            s.frobenius_sq(),
            1.0 + 4.0 + 9.0 + 2.0 * (16.0 + 25.0 + 36.0)
        );
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            comps in prop::array::uniform6(-1e3f64..1e3),
            eta in 1e-3f64..1e3,
            k in 1e-3f64..1e2,
        ) {
            let t = StressTensor(comps);
            let tau = reformulate_stress(&[t], &[eta], k).unwrap();
            let back = unreformulate_stress(&tau, &[eta], k).unwrap()[0];
            for c in 0..6 {
                let scale = comps[c].abs().max(k * eta);
                prop_assert!((back.0[c] - comps[c]).abs() <= 1e-12 * scale);
            }
        }
    }
}
