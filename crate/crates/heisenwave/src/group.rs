//! Exact group algebra of the Heisenberg group.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point `(p, q, t)`; `t` is the central coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupPoint {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl GroupPoint {
    pub const IDENTITY: GroupPoint = GroupPoint { p: 0.0, q: 0.0, t: 0.0 };

    pub const fn new(p: f64, q: f64, t: f64) -> Self {
        Self { p, q, t }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite() && self.t.is_finite()
    }

    pub fn mul(self, other: GroupPoint) -> GroupPoint {
        multiply(self, other)
    }

    pub fn inv(self) -> GroupPoint {
        inverse(self)
    }
}

impl std::ops::Mul for GroupPoint {
    type Output = GroupPoint;
    fn mul(self, rhs: GroupPoint) -> GroupPoint {
        multiply(self, rhs)
    }
}

/// Dilation parameter `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Scale(f64);

impl Scale {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(Scale(a))
        } else {
            Err(Error::NonPositiveScale(a))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn recip(self) -> Scale {
        Scale(1.0 / self.0)
    }
}

impl TryFrom<f64> for Scale {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        Scale::new(a)
    }
}

pub fn multiply(x: GroupPoint, y: GroupPoint) -> GroupPoint {
    GroupPoint {
        p: x.p + y.p,
        q: x.q + y.q,
        t: x.t + y.t + 0.5 * (x.p * y.q - x.q * y.p),
    }
}

pub fn inverse(x: GroupPoint) -> GroupPoint {
    GroupPoint { p: -x.p, q: -x.q, t: -x.t }
}

/// `δ_a(p, q, t) = (ap, aq, a²t)`.
pub fn dilate_point(a: Scale, x: GroupPoint) -> GroupPoint {
    let a = a.get();
    GroupPoint { p: a * x.p, q: a * x.q, t: a * a * x.t }
}

/// `N(ω) = (p⁴ + q⁴ + t²)^{1/4}`, homogeneous of degree one under `δ_a`.
pub fn homogeneous_norm(x: GroupPoint) -> f64 {
    // Rescale by the largest homogeneous component to avoid overflow and
    // underflow in the fourth powers.
    let m = x.p.abs().max(x.q.abs()).max(x.t.abs().sqrt());
    if m == 0.0 {
        return 0.0;
    }
    let (p, q, t) = (x.p / m, x.q / m, x.t / (m * m));
    m * (p.powi(4) + q.powi(4) + t * t).sqrt().sqrt()
}

/// Group commutator `xyx⁻¹y⁻¹`; equals `(0, 0, p₁q₂ − q₁p₂)`.
pub fn commutator(x: GroupPoint, y: GroupPoint) -> GroupPoint {
    multiply(multiply(x, y), multiply(inverse(x), inverse(y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let x = multiply(GroupPoint::new(1.0, 0.0, 0.0), GroupPoint::new(0.0, 1.0, 0.0));
        assert_eq!(x, GroupPoint::new(1.0, 1.0, 0.5));
        let y = GroupPoint::new(1.0, 2.0, 3.0);
        assert_eq!(multiply(y, GroupPoint::IDENTITY), y);
        assert_eq!(multiply(y, GroupPoint::new(-1.0, -2.0, -3.0)), GroupPoint::IDENTITY);
        assert_eq!(inverse(y), GroupPoint::new(-1.0, -2.0, -3.0));
        assert_eq!(inverse(GroupPoint::IDENTITY), GroupPoint::IDENTITY);
    }

    #[test]
    fn dilation_examples() {
        let two = Scale::new(2.0).unwrap();
        assert_eq!(dilate_point(two, GroupPoint::new(1.0, 1.0, 1.0)), GroupPoint::new(2.0, 2.0, 4.0));
        let x = GroupPoint::new(0.3, -1.7, 2.5);
        assert_eq!(dilate_point(Scale::new(1.0).unwrap(), x), x);
        assert!(Scale::new(0.0).is_err());
        assert!(Scale::new(-1.0).is_err());
        assert!(Scale::new(f64::NAN).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(homogeneous_norm(GroupPoint::IDENTITY), 0.0);
        let three = Scale::new(3.0).unwrap();
        let n = homogeneous_norm(dilate_point(three, GroupPoint::new(1.0, 0.0, 0.0)));
        assert!((n - 3.0).abs() < 1e-15);
        let n = homogeneous_norm(GroupPoint::new(1.0, 1.0, 1.0));
        assert!((n - 3f64.powf(0.25)).abs() < 1e-15);
        assert!((3f64.powf(0.25) - 1.31607).abs() < 1e-5);
    }

    #[test]
    fn commutator_is_central() {
        let c = commutator(GroupPoint::new(1.0, 0.0, 0.0), GroupPoint::new(0.0, 1.0, 0.0));
        assert_eq!(c, GroupPoint::new(0.0, 0.0, 1.0));
    }
}
