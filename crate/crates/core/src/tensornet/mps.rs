use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// One MPS tensor of shape `(dl, 2, dr)`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl Site {
    pub fn zeros(dl: usize, dr: usize) -> Self {
        Site {
            dl,
            dr,
            data: vec![C64::new(0.0, 0.0); dl * 2 * dr],
        }
    }

    #[inline]
    pub fn idx(&self, l: usize, s: usize, r: usize) -> usize {
        (l * 2 + s) * self.dr + r
    }

    #[inline]
    pub fn at(&self, l: usize, s: usize, r: usize) -> C64 {
        self.data[self.idx(l, s, r)]
    }
}

/// Bond dimensions `D_0..=D_n` with `D_i = min(2^i, 2^(n-i), chi)`.
pub fn bond_dims(n: usize, chi: usize) -> Vec<usize> {
    let cap = |k: usize| if k >= usize::BITS as usize - 1 { usize::MAX } else { 1usize << k };
    (0..=n).map(|i| cap(i).min(cap(n - i)).min(chi)).collect()
}

/// Matrix product state on `n` qubits; site `i` carries qubit `i` and
/// the dense amplitude index is `sum_i s_i 2^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    chi: usize,
    sites: Vec<Site>,
}

impl Mps {
    /// Validates the bond shape law and returns the state.
    pub fn new(chi: usize, sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() || chi == 0 {
            return Err(Error::InvalidParameter("MPS needs n >= 1 and chi >= 1".into()));
        }
        let dims = bond_dims(sites.len(), chi);
        for (i, s) in sites.iter().enumerate() {
            if s.dl != dims[i] || s.dr != dims[i + 1] || s.data.len() != s.dl * 2 * s.dr {
                return Err(Error::Contract(format!(
                    "site {i} has shape ({}, 2, {}) with {} entries, expected ({}, 2, {})",
                    s.dl,
                    s.dr,
                    s.data.len(),
                    dims[i],
                    dims[i + 1]
                )));
            }
        }
        Ok(Mps { chi, sites })
    }

    /// Product state from one single-qubit vector per site, embedded with
    /// bond cap `chi` (extra bond entries are zero).
    pub fn product(vectors: &[[C64; 2]], chi: usize) -> Result<Self> {
        let dims = bond_dims(vectors.len(), chi.max(1));
        let sites = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut s = Site::zeros(dims[i], dims[i + 1]);
                for b in 0..2 {
                    let k = s.idx(0, b, 0);
                    s.data[k] = v[b];
                }
                s
            })
            .collect();
        Mps::new(chi.max(1), sites)
    }

    /// Computational basis state, bit `i` on qubit `i`.
    pub fn basis(bits: &[u8], chi: usize) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let v: Vec<[C64; 2]> = bits
            .iter()
            .map(|&b| if b == 0 { [one, zero] } else { [zero, one] })
            .collect();
        Mps::product(&v, chi)
    }

    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn chi(&self) -> usize {
        self.chi
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_mut(&mut self, i: usize) -> &mut Site {
        &mut self.sites[i]
    }

    pub fn num_params(&self) -> usize {
        2 * self.sites.iter().map(|s| s.data.len()).sum::<usize>()
    }

    /// Real parameter vector, interleaving real and imaginary parts.
    pub fn to_params(&self) -> Vec<f64> {
        self.sites
            .iter()
            .flat_map(|s| s.data.iter().flat_map(|z| [z.re, z.im]))
            .collect()
    }

    pub fn set_params(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.num_params());
        let mut k = 0;
        for s in &mut self.sites {
            for z in &mut s.data {
                *z = C64::new(x[k], x[k + 1]);
                k += 2;
            }
        }
    }

    /// Multiplies every tensor by `factor^(1/n)`, changing the norm by
    /// `|factor|`.
    pub fn rescale(&mut self, factor: f64) {
        let f = factor.powf(1.0 / self.sites.len() as f64);
        for s in &mut self.sites {
            for z in &mut s.data {
                *z *= f;
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        let mut env = vec![C64::new(1.0, 0.0)];
        for s in &self.sites {
            env = super::contract::transfer_left(&env, s, crate::pauli::Pauli::I);
        }
        env[0].re
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Contract(format!("MPS norm {n} is not positive")));
        }
        self.rescale(1.0 / n.sqrt());
        Ok(())
    }
}

/// Random MPS with independent complex Gaussian entries, normalized.
pub fn init_mps<R: Rng + ?Sized>(n: usize, chi: usize, rng: &mut R) -> Result<Mps> {
    if n == 0 || chi == 0 {
        return Err(Error::InvalidParameter("MPS needs n >= 1 and chi >= 1".into()));
    }
    let dims = bond_dims(n, chi);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let sites = (0..n)
        .map(|i| {
            let mut s = Site::zeros(dims[i], dims[i + 1]);
            for z in &mut s.data {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = C64::new(re * scale, im * scale);
            }
            s
        })
        .collect();
    let mut psi = Mps::new(chi, sites)?;
    psi.normalize()?;
    Ok(psi)
}
