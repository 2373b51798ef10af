//! Finite Abelian groups `Z/n1 x ... x Z/nk` with mixed-radix indexing.
//!
//! Elements are flattened to a single index with the last factor varying
//! fastest, so `Z/2 x Z/3` lays out `(0,0), (0,1), (0,2), (1,0), ...`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    factors: Vec<usize>,
    order: usize,
}

impl Group {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if let Some(&bad) = factors.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidModulus(bad));
        }
        let order = factors.iter().product();
        Ok(Self { factors, order })
    }

    /// The cyclic group `Z/nZ`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    /// The modulus `n` when the group is a single cyclic factor.
    pub fn cyclic_order(&self) -> Result<usize> {
        if self.is_cyclic() {
            Ok(self.order)
        } else {
            Err(Error::NotCyclic(self.to_string()))
        }
    }

    pub fn ensure_same(&self, other: &Group) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// Flat index of an element given by its coordinates, each reduced mod its factor.
    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.factors.len() {
            return Err(Error::BadElement {
                coords: coords.to_vec(),
                group: self.to_string(),
            });
        }
        Ok(coords
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&c, &n)| acc * n + c % n))
    }

    pub fn coords_of(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.factors.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        coords
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if let [n] = self.factors[..] {
            return (a + b) % n;
        }
        let (ca, cb) = (self.coords_of(a), self.coords_of(b));
        self.fold_coords(ca.iter().zip(&cb).map(|(x, y)| x + y))
    }

    pub fn neg(&self, a: usize) -> usize {
        if let [n] = self.factors[..] {
            return (n - a % n) % n;
        }
        let ca = self.coords_of(a);
        self.fold_coords(ca.iter().zip(&self.factors).map(|(&x, &n)| n - x))
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `<eta, t>` in turns: `sum_i eta_i t_i / n_i` reduced to `[0, 1)`.
    pub(crate) fn pairing_turns(&self, eta: usize, t: usize) -> f64 {
        if let [n] = self.factors[..] {
            return ((eta * t) % n) as f64 / n as f64;
        }
        let (ce, ct) = (self.coords_of(eta), self.coords_of(t));
        let total: f64 = ce
            .iter()
            .zip(&ct)
            .zip(&self.factors)
            .map(|((&e, &t), &n)| ((e * t) % n) as f64 / n as f64)
            .sum();
        total.fract()
    }

    fn fold_coords(&self, coords: impl Iterator<Item = usize>) -> usize {
        coords
            .zip(&self.factors)
            .fold(0, |acc, (c, &n)| acc * n + c % n)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
