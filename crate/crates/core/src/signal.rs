//! Complex-valued signals on a finite group and the group-algebra operations.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::Group;

/// A finite complex function `a: G -> C`, stored by flat group index.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    group: Group,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(group: Group, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::LengthMismatch {
                expected: group.order(),
                found: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { group, values })
    }

    /// Build from a closure over flat indices. Panics only if `f` yields non-finite values.
    pub fn from_fn(group: &Group, f: impl FnMut(usize) -> Complex64) -> Self {
        let values = (0..group.order()).map(f).collect();
        Self::new(group.clone(), values).expect("from_fn produced a non-finite value")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    /// Entries drawn uniformly from the closed complex unit disc.
    pub fn random_unit_disc<R: Rng + ?Sized>(group: &Group, rng: &mut R) -> Self {
        Self::from_fn(group, |_| unit_disc(rng))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            group: self.group.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.group.ensure_same(&other.group)?;
        Ok(Self {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.group.ensure_same(&other.group)?;
        Ok(Self {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `a(-k)`.
    pub fn reflect(&self) -> Self {
        Self::from_fn(&self.group, |k| self.values[self.group.neg(k)])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn unit_disc<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let theta = TAU * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}

/// The Dirac mass `δ_k`.
pub fn delta(group: &Group, k: usize) -> Result<Signal> {
    if k >= group.order() {
        return Err(Error::BadElement {
            coords: group.coords_of(k),
            group: group.to_string(),
        });
    }
    Ok(Signal::from_fn(group, |j| {
        if j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `δ_k` for an element given by coordinates.
pub fn delta_at(group: &Group, coords: &[usize]) -> Result<Signal> {
    delta(group, group.index_of(coords)?)
}

/// `c·1`; `constant(g, 1)` is the unit of pointwise multiplication.
pub fn constant(group: &Group, c: Complex64) -> Signal {
    Signal::from_fn(group, |_| c)
}

/// `(f*g)(x) = Σ_t f(t) g(x - t)` with counting measure.
pub fn convolve(f: &Signal, g: &Signal) -> Result<Signal> {
    f.group.ensure_same(&g.group)?;
    let group = &f.group;
    let n = group.order();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (t, &ft) in f.values.iter().enumerate() {
        if ft == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (s, &gs) in g.values.iter().enumerate() {
            out[group.add(t, s)] += ft * gs;
        }
    }
    Ok(Signal {
        group: group.clone(),
        values: out,
    })
}

pub fn pointwise_mul(f: &Signal, g: &Signal) -> Result<Signal> {
    f.group.ensure_same(&g.group)?;
    Ok(Signal {
        group: f.group.clone(),
        values: f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect(),
    })
}

/// `f̂(η) = Σ_t f(t) e^{-2iπ<η,t>}` by direct summation.
pub fn dft(f: &Signal) -> Signal {
    character_sum(f, -1.0, 1.0)
}

/// `(1/|G|) Σ_η F(η) e^{+2iπ<η,t>}`, the exact inverse of [`dft`].
pub fn idft(f: &Signal) -> Signal {
    character_sum(f, 1.0, 1.0 / f.group.order() as f64)
}

/// `𝔼[a] = Σ_j a(j)`.
pub fn expectation(a: &Signal) -> Complex64 {
    a.values.iter().sum()
}

fn character_sum(f: &Signal, sign: f64, scale: f64) -> Signal {
    let group = &f.group;
    let n = group.order();
    let values = if group.is_cyclic() {
        let twiddles: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
            .collect();
        (0..n)
            .map(|eta| {
                let acc: Complex64 = f
                    .values
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| v * twiddles[(eta * t) % n])
                    .sum();
                acc * scale
            })
            .collect()
    } else {
        (0..n)
            .map(|eta| {
                let acc: Complex64 = f
                    .values
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| {
                        v * Complex64::from_polar(1.0, sign * TAU * group.pairing_turns(eta, t))
                    })
                    .sum();
                acc * scale
            })
            .collect()
    };
    Signal {
        group: group.clone(),
        values,
    }
}

/// Iterative radix-2 transform for cyclic groups of power-of-two order.
/// Agrees with [`dft`] up to rounding.
pub fn fft_pow2(f: &Signal) -> Result<Signal> {
    let n = f.group.cyclic_order()?;
    if !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "radix-2 transform needs a power-of-two order, got {n}"
        )));
    }
    let mut buf = f.values.clone();
    let bits = n.trailing_zeros();
    if bits > 0 {
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, -TAU * (k * (n / len)) as f64 / n as f64);
                let u = buf[start + k];
                let v = buf[start + k + half] * w;
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
    Ok(Signal {
        group: f.group.clone(),
        values: buf,
    })
}
