//! Angles with an exact fast path.
//!
//! Angles between rational vectors under a rational metric have rational
//! `cos^2` and an exact sign of `cos`. All angles occurring in crystallographic
//! wall arrangements are multiples of pi/12 and are recognized exactly; other
//! angles fall back to `f64` (tolerance 1e-9 downstream).

use crate::exact::{rat, rat_to_f64, QMat, QVec, Rat};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// An angle in radians. `exact_pi` is the coefficient of pi when the angle is
/// a known rational multiple of pi; `value` is always populated.
#[derive(Clone, Debug)]
pub struct Angle {
    pub exact_pi: Option<Rat>,
    pub value: f64,
}

impl Angle {
    pub fn zero() -> Self {
        Angle {
            exact_pi: Some(Rat::zero()),
            value: 0.0,
        }
    }

    pub fn pi_mult(r: Rat) -> Self {
        let value = rat_to_f64(&r) * PI;
        Angle {
            exact_pi: Some(r),
            value,
        }
    }

    pub fn pi() -> Self {
        Angle::pi_mult(Rat::one())
    }

    pub fn from_f64(value: f64) -> Self {
        Angle {
            exact_pi: None,
            value,
        }
    }

    pub fn add(&self, o: &Angle) -> Angle {
        match (&self.exact_pi, &o.exact_pi) {
            (Some(a), Some(b)) => Angle::pi_mult(a + b),
            _ => Angle::from_f64(self.value + o.value),
        }
    }

    pub fn sub(&self, o: &Angle) -> Angle {
        match (&self.exact_pi, &o.exact_pi) {
            (Some(a), Some(b)) => Angle::pi_mult(a - b),
            _ => Angle::from_f64(self.value - o.value),
        }
    }

    pub fn cmp_angle(&self, o: &Angle) -> Ordering {
        match (&self.exact_pi, &o.exact_pi) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => self
                .value
                .partial_cmp(&o.value)
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn min(&self, o: &Angle) -> Angle {
        if self.cmp_angle(o) == Ordering::Greater {
            o.clone()
        } else {
            self.clone()
        }
    }

    pub fn lt_pi(&self) -> bool {
        match &self.exact_pi {
            Some(a) => *a < Rat::one(),
            None => self.value < PI - 1e-12,
        }
    }

    pub fn approx_eq(&self, v: f64, tol: f64) -> bool {
        (self.value - v).abs() <= tol
    }
}

/// Exact squared cosine together with the sign of the cosine. Enough to
/// compare two angles in [0, pi] exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosData {
    /// cos^2 as an exact rational.
    pub cos_sq: Rat,
    /// Sign of cos: -1, 0, +1.
    pub sign: i8,
}

impl CosData {
    /// Angle comparison in [0, pi]: larger cosine means smaller angle.
    pub fn cmp_angle(&self, o: &CosData) -> Ordering {
        match self.sign.cmp(&o.sign) {
            // Higher sign => larger cos => smaller angle.
            Ordering::Less => Ordering::Greater,
            Ordering::Greater => Ordering::Less,
            Ordering::Equal => {
                if self.sign == 0 {
                    Ordering::Equal
                } else if self.sign > 0 {
                    // both cos > 0: bigger cos^2 => smaller angle
                    o.cos_sq.cmp(&self.cos_sq)
                } else {
                    self.cos_sq.cmp(&o.cos_sq)
                }
            }
        }
    }

    pub fn is_right_angle(&self) -> bool {
        self.sign == 0
    }

    pub fn is_straight(&self) -> bool {
        self.sign < 0 && self.cos_sq.is_one()
    }

    pub fn is_zero_angle(&self) -> bool {
        self.sign > 0 && self.cos_sq.is_one()
    }
}

/// Metric inner product `u^T M v`.
pub fn ip(metric: &QMat, u: &QVec, v: &QVec) -> Rat {
    metric.mul_vec(v).dot(u)
}

/// Exact cosine data of the angle between `u` and `v` under `metric`.
pub fn cos_data(metric: &QMat, u: &QVec, v: &QVec) -> CosData {
    let iuv = ip(metric, u, v);
    let iuu = ip(metric, u, u);
    let ivv = ip(metric, v, v);
    assert!(!iuu.is_zero() && !ivv.is_zero(), "zero vector in angle");
    let cos_sq = &iuv * &iuv / (iuu * ivv);
    let sign = if iuv.is_zero() {
        0
    } else if iuv.is_positive() {
        1
    } else {
        -1
    };
    CosData { cos_sq, sign }
}

/// Recognize the crystallographic angles (multiples of pi/12 with rational
/// cos^2 in {0, 1/4, 1/2, 3/4, 1}) and return them exactly.
fn recognize_pi_multiple(cd: &CosData) -> Option<Rat> {
    let q = |p: i64, q: i64| rat(p, q);
    let table: [(Rat, i8, Rat); 9] = [
        (Rat::one(), 1, Rat::zero()),       // 0
        (q(3, 4), 1, q(1, 6)),              // pi/6
        (q(1, 2), 1, q(1, 4)),              // pi/4
        (q(1, 4), 1, q(1, 3)),              // pi/3
        (Rat::zero(), 0, q(1, 2)),          // pi/2
        (q(1, 4), -1, q(2, 3)),             // 2pi/3
        (q(1, 2), -1, q(3, 4)),             // 3pi/4
        (q(3, 4), -1, q(5, 6)),             // 5pi/6
        (Rat::one(), -1, Rat::one()),       // pi
    ];
    for (cs, sg, mult) in table {
        if cd.cos_sq == cs && cd.sign == sg {
            return Some(mult);
        }
    }
    None
}

/// Metric angle between rational vectors, exact when crystallographic.
pub fn angle_between(metric: &QMat, u: &QVec, v: &QVec) -> Angle {
    let cd = cos_data(metric, u, v);
    if let Some(m) = recognize_pi_multiple(&cd) {
        return Angle::pi_mult(m);
    }
    let iuv = rat_to_f64(&ip(metric, u, v));
    let iuu = rat_to_f64(&ip(metric, u, u));
    let ivv = rat_to_f64(&ip(metric, v, v));
    let c = (iuv / (iuu * ivv).sqrt()).clamp(-1.0, 1.0);
    Angle::from_f64(c.acos())
}

/// Metric length of a rational vector.
pub fn vec_len(metric: &QMat, u: &QVec) -> f64 {
    rat_to_f64(&ip(metric, u, u)).sqrt()
}

/// Squared metric length, exact.
pub fn vec_len_sq(metric: &QMat, u: &QVec) -> Rat {
    ip(metric, u, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QVec;

    fn euclid() -> QMat {
        QMat::identity(2)
    }

    #[test]
    fn recognizes_crystallographic_angles() {
        let m = euclid();
        let e1 = QVec::from_i64(&[1, 0]);
        let d = QVec::from_i64(&[1, 1]);
        let a = angle_between(&m, &e1, &d);
        assert_eq!(a.exact_pi, Some(rat(1, 4)));
        let a = angle_between(&m, &e1, &QVec::from_i64(&[-1, 0]));
        assert_eq!(a.exact_pi, Some(Rat::one()));
        let a = angle_between(&m, &e1, &QVec::from_i64(&[0, -7]));
        assert_eq!(a.exact_pi, Some(rat(1, 2)));
    }

    #[test]
    fn non_crystallographic_fall_back_to_float() {
        let m = euclid();
        let a = angle_between(&m, &QVec::from_i64(&[1, 0]), &QVec::from_i64(&[4, 3]));
        assert!(a.exact_pi.is_none());
        assert!((a.value - (3f64 / 5.0).asin()).abs() < 1e-12);
    }

    #[test]
    fn exact_angle_comparison() {
        let m = euclid();
        let a = cos_data(&m, &QVec::from_i64(&[1, 0]), &QVec::from_i64(&[1, 1]));
        let b = cos_data(&m, &QVec::from_i64(&[1, 0]), &QVec::from_i64(&[1, 2]));
        // angle(e1, (1,1)) = 45deg < angle(e1, (1,2)) ~ 63deg
        assert_eq!(a.cmp_angle(&b), Ordering::Less);
    }
}
