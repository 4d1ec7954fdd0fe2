use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SparsePoly;
use crate::rational::{self, Scalar};

/// Dense univariate polynomial, coefficients from the constant term up.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Scalar>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::new(vec![c])
    }

    /// `t - r`
    pub fn linear_root(r: &Scalar) -> Self {
        UniPoly::new(vec![-r.clone(), Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Scalar {
        self.0.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Sign of the value at `t`, computed over the integers without
    /// intermediate fraction reduction.
    pub fn sign_at(&self, t: &Scalar) -> i8 {
        let Some(d) = self.degree() else { return 0 };
        let l = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        let (n, m) = (t.numer(), t.denom());
        // sum a_i n^i m^(d-i), by Horner in n with powers of m folded in
        let mut acc = ints[d].clone();
        let mut mp = BigInt::one();
        for i in (0..d).rev() {
            mp *= m;
            acc = acc * n + &ints[i] * &mp;
        }
        match acc.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => 0,
        }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + rational::to_f64(c))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.0.len().max(other.0.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(Scalar::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(Scalar::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: &Scalar) -> UniPoly {
        UniPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly(Vec::new());
        }
        let mut out = vec![Scalar::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * rational::int(i as i64)).collect())
    }

    /// Euclidean division. Panics when dividing by zero.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading_coefficient();
        let mut rem = self.0.clone();
        let mut quot = vec![Scalar::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / &lc;
            for (i, c) in divisor.0.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading_coefficient().recip())
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> UniPoly {
        if self.is_constant() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    fn sign_at_pos_inf(&self) -> i8 {
        rational::sign(&self.leading_coefficient())
    }

    fn sign_at_neg_inf(&self) -> i8 {
        let s = rational::sign(&self.leading_coefficient());
        if self.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    }

    /// Number of distinct real roots in the open interval `]lo, hi[`, where
    /// `None` stands for the corresponding infinity. Uses a Sturm sequence on
    /// the squarefree part, so the count is exact.
    pub fn count_real_roots(&self, lo: Option<&Scalar>, hi: Option<&Scalar>) -> usize {
        if self.is_constant() {
            return 0;
        }
        let p = self.squarefree_part();
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Scalar::one()));
        }
        let variations = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|s| *s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at = |x: Option<&Scalar>, neg: bool| -> Vec<i8> {
            seq.iter()
                .map(|q| match x {
                    Some(v) => rational::sign(&q.eval(v)),
                    None if neg => q.sign_at_neg_inf(),
                    None => q.sign_at_pos_inf(),
                })
                .collect()
        };
        // Sturm counts roots in ]lo, hi]; drop a root sitting exactly at hi.
        let v_lo = variations(at(lo, true));
        let v_hi = variations(at(hi, false));
        let mut n = v_lo.saturating_sub(v_hi);
        if let Some(h) = hi {
            if p.eval(h).is_zero() && n > 0 {
                n -= 1;
            }
        }
        n
    }

    pub fn to_sparse(&self) -> SparsePoly {
        SparsePoly::from_uni(self, 1, 0)
    }
}

/// `p(r, t)` as a polynomial in `t`, remembering the abscissa `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateSlice {
    uni: UniPoly,
    origin: Scalar,
}

impl UnivariateSlice {
    pub fn new(uni: UniPoly, origin: Scalar) -> Self {
        UnivariateSlice { uni, origin }
    }

    pub fn origin(&self) -> &Scalar {
        &self.origin
    }

    pub fn uni(&self) -> &UniPoly {
        &self.uni
    }

    /// The slice as a one-variable `SparsePoly`.
    pub fn poly(&self) -> SparsePoly {
        self.uni.to_sparse()
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        self.uni.eval(t)
    }

    pub fn degree(&self) -> Option<usize> {
        self.uni.degree()
    }

    pub fn leading_coefficient(&self) -> Scalar {
        self.uni.leading_coefficient()
    }

    pub fn is_negative_leading(&self) -> bool {
        self.uni.leading_coefficient().is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn division_identity() {
        let a = up(&[-1, 0, 0, 2, 5]);
        let b = up(&[3, 1, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (t-1)(t+2) and (t-1)(t-3)
        let a = up(&[-2, 1, 1]);
        let b = up(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), up(&[-1, 1]));
    }

    #[test]
    fn integer_sign_matches_exact_value() {
        let p = UniPoly::new(vec![ratio(-7, 3), ratio(1, 2), int(0), ratio(-5, 4)]);
        for (n, d) in [(0, 1), (1, 3), (-9, 4), (17, 1024), (-1, 7)] {
            let t = ratio(n, d);
            assert_eq!(p.sign_at(&t), rational::sign(&p.eval(&t)));
        }
        let q = UniPoly::new(vec![int(-1), int(0), int(1)]);
        assert_eq!(q.sign_at(&int(1)), 0);
        assert_eq!(UniPoly::new(vec![]).sign_at(&int(3)), 0);
    }

    #[test]
    fn sturm_counts() {
        // (t-1)(t-2)(t+3), with a doubled root at 2
        let p = up(&[-1, 1]).mul(&up(&[-2, 1])).mul(&up(&[-2, 1])).mul(&up(&[3, 1]));
        assert_eq!(p.count_real_roots(None, None), 3);
        assert_eq!(p.count_real_roots(Some(&int(0)), None), 2);
        assert_eq!(p.count_real_roots(Some(&int(0)), Some(&int(2))), 1);
        assert_eq!(p.count_real_roots(Some(&int(1)), Some(&int(2))), 0);
        assert_eq!(p.count_real_roots(None, Some(&int(-3))), 0);
        assert_eq!(p.count_real_roots(Some(&ratio(3, 2)), Some(&ratio(5, 2))), 1);
        // t^2 + 1 has none
        assert_eq!(up(&[1, 0, 1]).count_real_roots(None, None), 0);
    }
}
