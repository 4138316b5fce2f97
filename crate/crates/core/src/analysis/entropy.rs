//! Plug-in entropy estimates for pairs of bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::Bit;

/// Joint counts of `(X, Z)` bit pairs, indexed `[x][z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JointCounts(pub [[u64; 2]; 2]);

impl JointCounts {
    pub fn from_pairs(pairs: &[(Bit, Bit)]) -> Self {
        let mut c = JointCounts::default();
        for &(x, z) in pairs {
            c.add(x, z);
        }
        c
    }

    pub fn add(&mut self, x: Bit, z: Bit) {
        self.0[x as usize][z as usize] += 1;
    }

    pub fn merge(&mut self, other: &JointCounts) {
        for x in 0..2 {
            for z in 0..2 {
                self.0[x][z] += other.0[x][z];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    /// `H(X)` in bits.
    pub fn entropy_x(&self) -> Result<f64> {
        let n = self.nonempty_total()?;
        let ones = (self.0[1][0] + self.0[1][1]) as f64 / n;
        Ok(h2(ones))
    }

    /// `H(X|Z)` in bits from the joint frequencies, without bias correction.
    pub fn conditional_entropy(&self) -> Result<f64> {
        let n = self.nonempty_total()?;
        let mut h = 0.0;
        for z in 0..2 {
            let nz = self.0[0][z] + self.0[1][z];
            if nz == 0 {
                continue;
            }
            h += nz as f64 / n * h2(self.0[1][z] as f64 / nz as f64);
        }
        Ok(h)
    }

    /// `I(X;Z) = H(X) − H(X|Z)`.
    pub fn mutual_information(&self) -> Result<f64> {
        Ok((self.entropy_x()? - self.conditional_entropy()?).max(0.0))
    }

    /// Frequency of `Z = 0` among pairs with `X = x`.
    pub fn z_zero_given_x(&self, x: Bit) -> Option<f64> {
        let row = self.0[x as usize];
        let n = row[0] + row[1];
        (n > 0).then(|| row[0] as f64 / n as f64)
    }

    fn nonempty_total(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::input("entropy of an empty sample")),
            n => Ok(n as f64),
        }
    }
}

fn h2(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Plug-in estimate of `H(X|Z)` in bits.
pub fn empirical_conditional_entropy(pairs: &[(Bit, Bit)]) -> Result<f64> {
    JointCounts::from_pairs(pairs).conditional_entropy()
}
