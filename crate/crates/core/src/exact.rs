//! Exact rational scalars, vectors, and affine maps.
//!
//! All wall/side predicates in the crate run on `Rat` (arbitrary-precision
//! rationals), so there are no robustness failures. Conversion to `f64`
//! happens only when emitting lengths and angles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good to ~1e-15 relative error for desk-scale magnitudes.
    let n = r.numer();
    let d = r.denom();
    bigint_to_f64(n) / bigint_to_f64(d)
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Parse "p/q" or "p" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rat::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(p))
    }
}

/// Render a rational as "p/q" (or "p" if integral).
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Small rational vector (rank 1 or 2 in practice).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVec(pub Vec<Rat>);

impl fmt::Debug for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", rat_str(c))?;
        }
        write!(f, ")")
    }
}

impl QVec {
    pub fn zeros(n: usize) -> Self {
        QVec(vec![Rat::zero(); n])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        QVec(v.iter().map(|&x| rat_i(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &QVec) -> QVec {
        QVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &QVec) -> QVec {
        QVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rat) -> QVec {
        QVec(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> QVec {
        QVec(self.0.iter().map(|a| -a).collect())
    }

    /// Standard (pairing) dot product, no metric involved.
    pub fn dot(&self, o: &QVec) -> Rat {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |acc, x| acc + x)
    }

    /// Coordinate cross product in rank 2 (orientation predicate).
    pub fn cross(&self, o: &QVec) -> Rat {
        debug_assert_eq!(self.dim(), 2);
        &self.0[0] * &o.0[1] - &self.0[1] * &o.0[0]
    }

    /// Divide by the gcd of numerators/lcm of denominators and make the first
    /// nonzero entry positive. Canonical representative of a ray through 0.
    pub fn primitive(&self) -> QVec {
        use num_integer::Integer;
        let mut denom_lcm = BigInt::one();
        for c in &self.0 {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for i in &ints {
            g = g.gcd(i);
        }
        if g.is_zero() {
            return self.clone();
        }
        let mut out: Vec<Rat> = ints.iter().map(|i| Rat::from_integer(i / &g)).collect();
        if let Some(first) = out.iter().find(|c| !c.is_zero()) {
            if first.is_negative() {
                out = out.iter().map(|c| -c).collect();
            }
        }
        QVec(out)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl QMat {
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_i(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat {
            rows: n,
            cols: n,
            data: vec![Rat::zero(); n * n],
        };
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, v: &QVec) -> QVec {
        debug_assert_eq!(self.cols, v.dim());
        QVec(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| self.at(i, j) * &v.0[j])
                        .fold(Rat::zero(), |a, x| a + x)
                })
                .collect(),
        )
    }

    /// Row covector times matrix: `v^T M`.
    pub fn vec_mul(&self, v: &QVec) -> QVec {
        debug_assert_eq!(self.rows, v.dim());
        QVec(
            (0..self.cols)
                .map(|j| {
                    (0..self.rows)
                        .map(|i| &v.0[i] * self.at(i, j))
                        .fold(Rat::zero(), |a, x| a + x)
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        debug_assert_eq!(self.cols, o.rows);
        let mut out = QMat {
            rows: self.rows,
            cols: o.cols,
            data: vec![Rat::zero(); self.rows * o.cols],
        };
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = Rat::zero();
                for k in 0..self.cols {
                    s += self.at(i, k) * o.at(k, j);
                }
                *out.at_mut(i, j) = s;
            }
        }
        out
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat {
            rows: self.cols,
            cols: self.rows,
            data: vec![Rat::zero(); self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        match self.rows {
            1 => self.at(0, 0).clone(),
            2 => self.at(0, 0) * self.at(1, 1) - self.at(0, 1) * self.at(1, 0),
            _ => unimplemented!("det only needed for rank <= 2"),
        }
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        match self.rows {
            1 => Some(QMat::from_rows(vec![vec![d.recip()]])),
            2 => {
                let inv = |x: &Rat| x / &d;
                Some(QMat::from_rows(vec![
                    vec![inv(self.at(1, 1)), inv(&-self.at(0, 1).clone())],
                    vec![inv(&-self.at(1, 0).clone()), inv(self.at(0, 0))],
                ]))
            }
            _ => unimplemented!("inverse only needed for rank <= 2"),
        }
    }
}

/// Affine map `x -> L x + t` with rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub lin: QMat,
    pub tr: QVec,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap {
            lin: QMat::identity(n),
            tr: QVec::zeros(n),
        }
    }

    pub fn apply(&self, p: &QVec) -> QVec {
        self.lin.mul_vec(p).add(&self.tr)
    }

    /// Apply only the linear part (for directions).
    pub fn apply_dir(&self, d: &QVec) -> QVec {
        self.lin.mul_vec(d)
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            lin: self.lin.mul(&other.lin),
            tr: self.lin.mul_vec(&other.tr).add(&self.tr),
        }
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let li = self.lin.inverse()?;
        let tr = li.mul_vec(&self.tr).neg();
        Some(AffineMap { lin: li, tr })
    }

    pub fn is_identity(&self) -> bool {
        self == &AffineMap::identity(self.tr.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rat("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rat("-2"), Some(rat_i(-2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(rat_str(&rat(6, 4)), "3/2");
        assert_eq!(rat_str(&rat_i(5)), "5");
    }

    #[test]
    fn primitive_ray() {
        let v = QVec(vec![rat(-2, 3), rat(4, 3)]);
        assert_eq!(v.primitive(), QVec::from_i64(&[1, -2]));
        assert_eq!(QVec::from_i64(&[0, -3]).primitive(), QVec::from_i64(&[0, 1]));
    }

    #[test]
    fn affine_inverse_roundtrip() {
        let m = AffineMap {
            lin: QMat::from_i64(&[&[0, -1], &[1, 0]]),
            tr: QVec::from_i64(&[3, 1]),
        };
        let mi = m.inverse().unwrap();
        let p = QVec(vec![rat(7, 2), rat(-1, 3)]);
        assert_eq!(mi.apply(&m.apply(&p)), p);
        assert!(m.compose(&mi).is_identity());
    }
}
