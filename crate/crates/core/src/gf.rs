//! Exact arithmetic in GF(p) and GF(p^m).
//!
//! Elements are integer encodings in `[0, q)`. For prime fields the encoding
//! is the residue; for extension fields it is the base-`p` digit vector of
//! the polynomial representative (a plain bitmask when `p = 2`), so F4 in
//! the `x^2 + x + 1` presentation encodes as `00, 01, 10, 11` and addition
//! is XOR.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Encoded field element. Only meaningful together with its [`GaloisField`].
pub type FieldElement = u32;

/// Largest order accepted by [`GaloisField::new`].
pub const MAX_ORDER: u64 = 1 << 31;

/// Orders up to this size get log/antilog tables.
const TABLE_LIMIT: u32 = 1 << 16;

/// Default moduli for GF(2^m), coefficient bitmasks including the leading term.
const BINARY_DEFAULT_MODULI: [u64; 17] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b101_1011,
    0b1000_0011,
    0b1_0001_1101,
    0b10_0001_0001,
    0b100_0110_1111,
    0b1000_0000_0101,
    0b1_0000_1110_1011,
    0b10_0000_0001_1011,
    0b100_0000_1010_1001,
    0b1000_0000_0011_0101,
    0b1_0000_0000_0010_1101,
];

/// Serialized identity of a field: `{"p": .., "m": .., "modulus": ..}`.
///
/// `modulus` encodes the monic modulus polynomial as base-`p` digits
/// (a bitmask for `p = 2`) and is `null` for prime fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub modulus: Option<u64>,
}

impl FieldSpec {
    /// Canonical F4 spec, modulus `x^2 + x + 1`.
    pub const F4: FieldSpec = FieldSpec {
        p: 2,
        m: 2,
        modulus: Some(7),
    };

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus {
            Some(modulus) if self.m > 1 => {
                write!(f, "GF({}^{}) mod {}", self.p, self.m, modulus)
            }
            _ => write!(f, "GF({})", self.p),
        }
    }
}

#[derive(Debug)]
enum Repr {
    Prime,
    Table { exp: Vec<u32>, log: Vec<u32> },
    Poly,
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    q: u32,
    repr: Repr,
}

/// A finite field. Cheap to clone; immutable once built.
#[derive(Clone, Debug)]
pub struct GaloisField(Arc<Inner>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.0.spec == other.0.spec
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    /// Builds GF(p^m). When `modulus` is `None` and `m > 1` a fixed default
    /// irreducible polynomial is used.
    pub fn new(p: u32, m: u32, modulus: Option<u64>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(Error::InvalidModulus(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge)?;
        let modulus = if m == 1 {
            if modulus.is_some() {
                return Err(Error::InvalidModulus(
                    "prime fields take no modulus polynomial".into(),
                ));
            }
            None
        } else {
            let modulus = match modulus {
                Some(md) => md,
                None => default_modulus(p, m),
            };
            check_modulus(p, m, modulus)?;
            Some(modulus)
        };
        let spec = FieldSpec { p, m, modulus };
        let q = q as u32;
        let mut inner = Inner {
            spec,
            q,
            repr: if m == 1 { Repr::Prime } else { Repr::Poly },
        };
        if m > 1 && q <= TABLE_LIMIT {
            inner.repr = build_tables(&inner);
        }
        Ok(GaloisField(Arc::new(inner)))
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Self> {
        GaloisField::new(spec.p, spec.m, spec.modulus)
    }

    /// The field of order `q` with the default modulus.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        GaloisField::new(p as u32, m, None)
    }

    pub fn f4() -> Self {
        GaloisField::from_spec(FieldSpec::F4).expect("F4 is a valid field")
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn characteristic(&self) -> u32 {
        self.0.spec.p
    }

    /// Validates an encoding.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value < self.0.q as u64 {
            Ok(value as FieldElement)
        } else {
            Err(Error::ElementOutOfRange {
                value,
                order: self.0.q as u64,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        0..self.0.q
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let FieldSpec { p, m, .. } = self.0.spec;
        if p == 2 {
            a ^ b
        } else if m == 1 {
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else {
            digitwise(a, b, p, m, |x, y| (x + y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let FieldSpec { p, m, .. } = self.0.spec;
        if p == 2 || a == 0 {
            a
        } else if m == 1 {
            p - a
        } else {
            digitwise(a, 0, p, m, |x, _| (p - x) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.repr {
            Repr::Prime => ((a as u64 * b as u64) % self.0.spec.p as u64) as u32,
            Repr::Table { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
            Repr::Poly => poly_mul(&self.0, a, b),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.0.repr {
            Repr::Prime => mod_inverse(a as i64, self.0.spec.p as i64),
            Repr::Table { exp, log } => {
                let n = self.0.q - 1;
                exp[((n - log[a as usize]) % n) as usize]
            }
            Repr::Poly => self.pow(a, self.0.q as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn digitwise(a: u32, b: u32, p: u32, m: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..m {
        out += f(a % p, b % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn poly_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let FieldSpec { p, m, modulus } = inner.spec;
    let modulus = modulus.expect("extension field has a modulus");
    if p == 2 {
        let (mut a, mut b) = (a as u64, b as u64);
        let top = 1u64 << m;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= modulus;
            }
        }
        return acc as u32;
    }
    let pa = to_digits(a as u64, p, m as usize);
    let pb = to_digits(b as u64, p, m as usize);
    let pm = to_digits(modulus, p, m as usize + 1);
    let mut prod = vec![0u64; 2 * m as usize];
    for (i, &x) in pa.iter().enumerate() {
        for (j, &y) in pb.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p as u64;
        }
    }
    let rem = poly_rem(prod, &pm, p as u64);
    from_digits(&rem[..m as usize], p) as u32
}

fn build_tables(inner: &Inner) -> Repr {
    let q = inner.q;
    let order = q - 1;
    for g in 2..q.max(3) {
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = 1u32;
        let mut primitive = true;
        for step in 0..order {
            if step > 0 && x == 1 {
                primitive = false;
                break;
            }
            exp.push(x);
            x = poly_mul(inner, x, g);
        }
        if !primitive || x != 1 {
            continue;
        }
        let mut log = vec![0u32; q as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        exp.extend_from_within(..);
        return Repr::Table { exp, log };
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

fn to_digits(mut x: u64, p: u32, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % p as u64);
        x /= p as u64;
    }
    out
}

fn from_digits(d: &[u64], p: u32) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p as u64 + c)
}

fn degree(poly: &[u64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0)
}

/// Remainder of `num` by `den` over GF(p), coefficient vectors low degree first.
fn poly_rem(mut num: Vec<u64>, den: &[u64], p: u64) -> Vec<u64> {
    let dd = degree(den).expect("nonzero divisor");
    let lead_inv = mod_inverse(den[dd] as i64, p as i64) as u64;
    while let Some(dn) = degree(&num) {
        if dn < dd {
            break;
        }
        let factor = num[dn] * lead_inv % p;
        let shift = dn - dd;
        for (i, &c) in den[..=dd].iter().enumerate() {
            num[i + shift] = (num[i + shift] + p - factor * c % p) % p;
        }
    }
    num
}

fn check_modulus(p: u32, m: u32, modulus: u64) -> Result<()> {
    let digits = to_digits(modulus, p, m as usize + 2);
    if degree(&digits) != Some(m as usize) {
        return Err(Error::InvalidModulus(format!(
            "modulus {modulus} is not a degree-{m} polynomial over GF({p})"
        )));
    }
    if digits[m as usize] != 1 {
        return Err(Error::InvalidModulus(format!(
            "modulus {modulus} is not monic"
        )));
    }
    if !is_irreducible(&digits[..=m as usize], p) {
        return Err(Error::InvalidModulus(format!(
            "modulus {modulus} is reducible over GF({p})"
        )));
    }
    Ok(())
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(poly: &[u64], p: u32) -> bool {
    let m = degree(poly).unwrap_or(0);
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = to_digits(low, p, d);
            divisor.push(1);
            let rem = poly_rem(poly.to_vec(), &divisor, p as u64);
            if degree(&rem).is_none() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, m: u32) -> u64 {
    if p == 2 && (m as usize) < BINARY_DEFAULT_MODULI.len() {
        return BINARY_DEFAULT_MODULI[m as usize];
    }
    // Smallest monic irreducible in lexicographic order of the low coefficients.
    let lead = (p as u64).pow(m);
    (0..lead)
        .map(|low| lead + low)
        .find(|&cand| is_irreducible(&to_digits(cand, p, m as usize + 1), p))
        .expect("irreducible polynomials exist in every degree")
}

fn mod_inverse(a: i64, p: i64) -> u32 {
    let (mut old_r, mut r) = (a.rem_euclid(p), p);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(p) as u32
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, m))` when `q = p^m` with `p` prime and `m >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|d| d * d <= q)
        .find(|d| q.is_multiple_of(*d))
        .unwrap_or(q);
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive_axioms(f: &GaloisField) {
        let q = f.order();
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "{a} in {}", f.spec());
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
                if q <= 32 {
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn f4_matches_bit_pair_table() {
        let f = GaloisField::f4();
        assert_eq!(f.spec(), FieldSpec::F4);
        assert_eq!(f.add(0b01, 0b11), 0b10);
        assert_eq!(f.mul(0b10, 0b10), 0b11);
        assert_eq!(f.mul(0b10, 0b11), 0b01);
        for a in 0..4 {
            assert_eq!(f.add(a, a), 0);
        }
    }

    #[test]
    fn prime_field_examples() {
        let f = GaloisField::new(113, 1, None).unwrap();
        assert_eq!(f.add(100, 50), 37);
        assert_eq!(f.inv(2).unwrap(), 57);
        assert_eq!(f.sub(3, 5), 111);
        assert!(matches!(f.inv(0), Err(Error::ZeroInverse)));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            GaloisField::new(4, 1, None),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            GaloisField::new(2, 2, Some(0b101)),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            GaloisField::new(2, 3, Some(0b111)),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            GaloisField::new(2, 0, None),
            Err(Error::InvalidModulus(_))
        ));
        assert!(GaloisField::with_order(6).is_err());
        assert!(GaloisField::f4().element(4).is_err());
    }

    #[test]
    fn default_binary_moduli_are_irreducible() {
        for m in 2..BINARY_DEFAULT_MODULI.len() as u32 {
            let digits = to_digits(BINARY_DEFAULT_MODULI[m as usize], 2, m as usize + 1);
            assert!(is_irreducible(&digits, 2), "m = {m}");
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 113, 128] {
            exhaustive_axioms(&GaloisField::with_order(q).unwrap());
        }
    }

    #[test]
    fn odd_extension_field() {
        let f = GaloisField::with_order(169).unwrap();
        assert_eq!(f.characteristic(), 13);
        exhaustive_axioms(&f);
        for a in 1..169 {
            assert_eq!(f.pow(a, 168), 1);
        }
    }

    #[test]
    fn untabled_field_agrees_with_fermat() {
        let f = GaloisField::new(2, 17, None).unwrap();
        for a in [1u32, 2, 3, 12345, 131071] {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), 1);
            assert_eq!(f.pow(a, (1 << 17) - 1), 1);
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(113), Some((113, 1)));
        assert_eq!(prime_power(169), Some((13, 2)));
        assert_eq!(prime_power(256), Some((2, 8)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
