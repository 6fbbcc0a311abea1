use std::f64::consts::PI;

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 40;

/// Elliptic parameter `m` together with its quarter periods and nome.
///
/// `K = K(m)`, `K' = K(1 - m)`, `q = exp(-π K'/K)`. Construction computes all
/// three once; the struct is `Copy` and cheap to pass around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    m: f64,
    k: f64,
    k_prime: f64,
    nome: f64,
}

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        let k = complete_k(m)?;
        let k_prime = complete_k(1.0 - m)?;
        Ok(Self {
            m,
            k,
            k_prime,
            nome: (-PI * k_prime / k).exp(),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// The complementary parameter `1 - m`.
    pub fn m1(&self) -> f64 {
        1.0 - self.m
    }

    /// `K(m)`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `K'(m) = K(1 - m)`.
    pub fn k_prime(&self) -> f64 {
        self.k_prime
    }

    pub fn nome(&self) -> f64 {
        self.nome
    }

    /// The modulus with parameter `1 - m`; quarter periods swap roles.
    pub fn complement(&self) -> Modulus {
        Modulus {
            m: 1.0 - self.m,
            k: self.k_prime,
            k_prime: self.k,
            nome: (-PI * self.k / self.k_prime).exp(),
        }
    }
}

/// Complete elliptic integral of the first kind via the arithmetic-geometric
/// mean, `K(m) = π / (2 AGM(1, √(1-m)))`.
pub fn complete_k(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::ParameterDomain(m));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - m).sqrt())))
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// One descending Landen step. Returns `(α, m̃)` with
/// `α = 1/(1 + √(1-m))` and `m̃ = ((1 - √(1-m)) / (1 + √(1-m)))²`, so that
/// `dn(x, m) + dn(x + K, m) = dn(x/α, m̃) / α`.
pub fn landen_descend(m: f64) -> Result<(f64, f64)> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::ParameterDomain(m));
    }
    let kp = (1.0 - m).sqrt();
    let alpha = 1.0 / (1.0 + kp);
    // 1 - k' = m / (1 + k') avoids cancellation for small m.
    let ratio = m / ((1.0 + kp) * (1.0 + kp));
    Ok((alpha, ratio * ratio))
}
