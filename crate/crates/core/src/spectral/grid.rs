use std::sync::Arc;

use crate::scalar::Real;

use super::SpectralError;

pub const MAX_DIM: usize = 5;

/// Frequency vector; only the first `dim` entries are meaningful.
pub type Freq = [i32; MAX_DIM];

/// Discretization of `T^d`: the cube lattice `|n_i| ≤ M` and the collocation
/// grid used for pointwise products.
///
/// Lattice indices are row-major over `(n_0 + M, …, n_{d−1} + M)`, which
/// makes `−n` the mirror index `len − 1 − idx` and puts `n = 0` at the
/// center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierGrid {
    dim: usize,
    modes: usize,
    colloc: usize,
    norm_sq: Vec<u32>,
}

impl FourierGrid {
    /// Grid whose collocation size is the smallest 5-smooth integer not below
    /// `ceil(pad · (2M + 1))`.
    pub fn new(dim: usize, modes: usize, pad: f64) -> Result<Arc<Self>, SpectralError> {
        if !(pad.is_finite() && pad >= 1.0) {
            return Err(SpectralError::InvalidGrid(format!("pad must be ≥ 1, got {pad}")));
        }
        let side = 2 * modes + 1;
        let min = (pad * side as f64 - 1e-9).ceil() as usize;
        Self::with_colloc(dim, modes, next_smooth(min.max(side)))
    }

    pub fn with_colloc(dim: usize, modes: usize, colloc: usize) -> Result<Arc<Self>, SpectralError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(SpectralError::InvalidGrid(format!("dimension must be in 1..=5, got {dim}")));
        }
        if modes > 2000 {
            return Err(SpectralError::InvalidGrid(format!("mode bound {modes} too large")));
        }
        let side = 2 * modes + 1;
        if colloc < side {
            return Err(SpectralError::InvalidGrid(format!(
                "collocation size {colloc} below lattice side {side}"
            )));
        }
        let len = side.pow(dim as u32);
        let mut norm_sq = Vec::with_capacity(len);
        for idx in 0..len {
            let n = decode(idx, dim, modes);
            norm_sq.push(n[..dim].iter().map(|&k| (k * k) as u32).sum());
        }
        Ok(Arc::new(Self { dim, modes, colloc, norm_sq }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-axis mode bound `M`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Lattice points per axis, `2M + 1`.
    pub fn side(&self) -> usize {
        2 * self.modes + 1
    }

    /// Number of lattice frequencies.
    pub fn len(&self) -> usize {
        self.norm_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sq.is_empty()
    }

    /// Collocation points per axis.
    pub fn colloc(&self) -> usize {
        self.colloc
    }

    pub fn colloc_len(&self) -> usize {
        self.colloc.pow(self.dim as u32)
    }

    /// Index of `n = 0`.
    pub fn center(&self) -> usize {
        self.len() / 2
    }

    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    pub fn freq(&self, idx: usize) -> Freq {
        decode(idx, self.dim, self.modes)
    }

    pub fn index_of(&self, n: &[i32]) -> Option<usize> {
        if n.len() != self.dim {
            return None;
        }
        let m = self.modes as i32;
        let mut idx = 0usize;
        for &k in n {
            if k < -m || k > m {
                return None;
            }
            idx = idx * self.side() + (k + m) as usize;
        }
        Some(idx)
    }

    #[inline]
    pub fn norm_sq(&self, idx: usize) -> u32 {
        self.norm_sq[idx]
    }

    /// `|n|`
    #[inline]
    pub fn abs_freq<T: Real>(&self, idx: usize) -> T {
        T::lit(self.norm_sq[idx] as f64).sqrt()
    }

    /// `⟨n⟩ = (1 + |n|²)^{1/2}`
    #[inline]
    pub fn japanese<T: Real>(&self, idx: usize) -> T {
        T::lit(1.0 + self.norm_sq[idx] as f64).sqrt()
    }

    /// Same dimension and mode bound (collocation size may differ).
    pub fn same_lattice(&self, other: &FourierGrid) -> bool {
        self.dim == other.dim && self.modes == other.modes
    }

    /// Key identifying a frequency independently of the grid it lives on.
    pub fn freq_key(&self, idx: usize) -> u64 {
        let n = self.freq(idx);
        n[..self.dim]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (axis, &k)| acc | (((k + 2048) as u64) << (12 * axis)))
    }

    /// For each index of `self`, the index of the same frequency on `fine`.
    pub fn embedding(&self, fine: &FourierGrid) -> Result<Vec<usize>, SpectralError> {
        if self.dim != fine.dim || self.modes > fine.modes {
            return Err(SpectralError::GridMismatch);
        }
        Ok((0..self.len())
            .map(|idx| {
                let n = self.freq(idx);
                fine.index_of(&n[..self.dim]).expect("coarse lattice inside fine lattice")
            })
            .collect())
    }
}

fn decode(mut idx: usize, dim: usize, modes: usize) -> Freq {
    let side = 2 * modes + 1;
    let mut n = [0i32; MAX_DIM];
    for axis in (0..dim).rev() {
        n[axis] = (idx % side) as i32 - modes as i32;
        idx /= side;
    }
    n
}

fn next_smooth(mut n: usize) -> usize {
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}
