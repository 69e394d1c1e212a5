//! Octonions via the Cayley-Dickson construction over quaternions.

use std::ops::{Mul, Neg, Sub};

/// Quaternion (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Quat([f64; 4]);

impl Quat {
    fn conj(self) -> Self {
        let [w, x, y, z] = self.0;
        Quat([w, -x, -y, -z])
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        let mut r = self.0;
        for (v, w) in r.iter_mut().zip(o.0) {
            *v -= w;
        }
        Quat(r)
    }
}

impl std::ops::Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        let mut r = self.0;
        for (v, w) in r.iter_mut().zip(o.0) {
            *v += w;
        }
        Quat(r)
    }
}

/// Real octonion with components e0..e7.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    fn halves(self) -> (Quat, Quat) {
        let a = &self.0;
        (Quat([a[0], a[1], a[2], a[3]]), Quat([a[4], a[5], a[6], a[7]]))
    }

    fn join(a: Quat, b: Quat) -> Self {
        Octonion([a.0[0], a.0[1], a.0[2], a.0[3], b.0[0], b.0[1], b.0[2], b.0[3]])
    }

    pub fn conj(self) -> Self {
        let mut r = self.0;
        for v in r.iter_mut().skip(1) {
            *v = -*v;
        }
        Octonion(r)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        let mut r = self.0;
        for v in r.iter_mut() {
            *v *= s;
        }
        Octonion(r)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    /// (a, b)(c, d) = (ac − d̄b, da + bc̄).
    fn mul(self, o: Octonion) -> Octonion {
        let (a, b) = self.halves();
        let (c, d) = o.halves();
        Octonion::join(a * c - d.conj() * b, d * a + b * c.conj())
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(i: usize) -> Octonion {
        let mut v = [0.0; 8];
        v[i] = 1.0;
        Octonion(v)
    }

    #[test]
    fn imaginary_units_square_to_minus_one() {
        for i in 1..8 {
            assert_eq!(basis(i) * basis(i), -Octonion::ONE);
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let a = Octonion([0.3, -1.2, 0.5, 2.0, -0.7, 0.1, 0.9, -0.4]);
        let b = Octonion([1.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8]);
        assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-12);
    }
}
