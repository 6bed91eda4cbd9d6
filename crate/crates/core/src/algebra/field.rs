use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported prime characteristic.
pub const MAX_PRIME: u32 = (1 << 31) - 1;
/// Largest supported binary-extension degree.
pub const MAX_BINARY_DEGREE: u32 = 16;

/// An element of a finite field, stored as its canonical representative.
///
/// For GF(p) this is the residue in `[0, p)`. For GF(2^m) it is the bit-packed
/// coefficient vector of the polynomial (bit `i` is the coefficient of `x^i`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct LogTables {
    log: Vec<u32>,
    // exp[i] = g^i for i in [0, 2(q-1)) so that log a + log b never needs a reduction
    exp: Vec<u32>,
}

struct Inner {
    characteristic: u32,
    degree: u32,
    modulus: Option<u32>,
    order: u32,
    tables: Option<LogTables>,
}

/// Descriptor of a finite field GF(p) or GF(2^m).
///
/// Cloning is cheap; the arithmetic tables are shared.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.characteristic == other.0.characteristic
                && self.0.degree == other.0.degree
                && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.modulus {
            Some(m) => write!(f, "GF({}^{}, modulus=0x{:x})", self.0.characteristic, self.0.degree, m),
            None => write!(f, "GF({})", self.0.characteristic),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let p = u64::from(p);
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn poly_degree(a: u32) -> i32 {
    31 - a.leading_zeros() as i32
}

/// Remainder of binary polynomial division.
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn binary_irreducible(modulus: u32, m: u32) -> bool {
    // no factor of degree 1..=m/2
    (2u32..(1u32 << (m / 2 + 1))).all(|f| poly_rem(modulus, f) != 0)
}

/// Carry-less multiply followed by reduction modulo `modulus`.
fn clmul_mod(mut a: u32, mut b: u32, modulus: u32, m: u32) -> u32 {
    let mut acc = 0u32;
    let top = 1u32 << m;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn build_tables(modulus: u32, m: u32) -> Result<LogTables> {
    let q = 1u32 << m;
    let n = (q - 1) as usize;
    // the modulus need not be primitive, so look for a generator explicitly
    for g in 2..q {
        let mut log = vec![0u32; q as usize];
        let mut exp = vec![0u32; 2 * n];
        let mut seen = vec![false; q as usize];
        let mut x = 1u32;
        let mut ok = true;
        for (i, slot) in exp.iter_mut().take(n).enumerate() {
            if seen[x as usize] {
                ok = false;
                break;
            }
            seen[x as usize] = true;
            *slot = x;
            log[x as usize] = i as u32;
            x = clmul_mod(x, g, modulus, m);
        }
        if ok {
            for i in n..2 * n {
                exp[i] = exp[i - n];
            }
            return Ok(LogTables { log, exp });
        }
    }
    Err(Error::Field(format!("no generator found for modulus 0x{modulus:x}")))
}

/// Default irreducible moduli for GF(2^m), indexed by m.
const DEFAULT_BINARY_MODULI: [u32; 17] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003,
    0x1100B,
];

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::Field(format!("characteristic {p} exceeds 2^31-1")));
        }
        if !is_prime(p) {
            return Err(Error::Field(format!("{p} is not prime")));
        }
        Ok(FieldSpec(Arc::new(Inner { characteristic: p, degree: 1, modulus: None, order: p, tables: None })))
    }

    /// GF(2^m) with the given modulus (bit `i` = coefficient of `x^i`, including `x^m`).
    pub fn binary_extension(m: u32, modulus: u32) -> Result<Self> {
        if !(2..=MAX_BINARY_DEGREE).contains(&m) {
            return Err(Error::Field(format!("binary extension degree {m} outside 2..=16")));
        }
        if poly_degree(modulus) != m as i32 {
            return Err(Error::Field(format!("modulus 0x{modulus:x} does not have degree {m}")));
        }
        if !binary_irreducible(modulus, m) {
            return Err(Error::Field(format!("modulus 0x{modulus:x} is reducible")));
        }
        let tables = build_tables(modulus, m)?;
        Ok(FieldSpec(Arc::new(Inner {
            characteristic: 2,
            degree: m,
            modulus: Some(modulus),
            order: 1 << m,
            tables: Some(tables),
        })))
    }

    /// General constructor mirroring the file-format descriptor.
    pub fn new(p: u32, m: u32, modulus: Option<u32>) -> Result<Self> {
        match (m, modulus) {
            (0, _) => Err(Error::Field("degree must be at least 1".into())),
            (1, None) => Self::prime(p),
            (1, Some(_)) => Err(Error::Field("modulus given for a prime field".into())),
            (_, None) => Err(Error::Field(format!("modulus required for degree {m}"))),
            (_, Some(f)) if p == 2 => Self::binary_extension(m, f),
            _ => Err(Error::Field(format!(
                "GF({p}^{m}) is unsupported; extension fields must have characteristic 2"
            ))),
        }
    }

    /// GF(2^m) with a built-in irreducible modulus.
    pub fn binary_default(m: u32) -> Result<Self> {
        match m {
            1 => Self::prime(2),
            2..=MAX_BINARY_DEGREE => Self::binary_extension(m, DEFAULT_BINARY_MODULI[m as usize]),
            _ => Err(Error::Field(format!("binary extension degree {m} outside 1..=16"))),
        }
    }

    /// Field of order `q`, choosing the default modulus when `q` is a power of two.
    pub fn with_order(q: u32) -> Result<Self> {
        if q >= 4 && q.is_power_of_two() {
            Self::binary_default(q.trailing_zeros())
        } else {
            Self::prime(q)
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.0.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn modulus(&self) -> Option<u32> {
        self.0.modulus
    }

    /// Field order q = p^m.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Checked conversion from a canonical representative.
    pub fn elem(&self, v: u64) -> Result<FieldElement> {
        if v < u64::from(self.order()) {
            Ok(FieldElement(v as u32))
        } else {
            Err(Error::Field(format!("{v} is not an element of {self}")))
        }
    }

    /// Reduce an arbitrary integer into the field. For extension fields the
    /// integer is read as a packed polynomial and truncated to `m` bits.
    pub fn reduce(&self, v: u64) -> FieldElement {
        FieldElement((v % u64::from(self.order())) as u32)
    }

    /// Every element in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.0.characteristic == 2 {
            FieldElement(a.0 ^ b.0)
        } else {
            let s = u64::from(a.0) + u64::from(b.0);
            let p = u64::from(self.0.characteristic);
            FieldElement(if s >= p { s - p } else { s } as u32)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.0.characteristic == 2 || a.0 == 0 {
            a
        } else {
            FieldElement(self.0.characteristic - a.0)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.0.tables {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => {
                FieldElement(((u64::from(a.0) * u64::from(b.0)) % u64::from(self.0.characteristic)) as u32)
            }
        }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        match &self.0.tables {
            Some(t) => {
                let n = self.0.order - 1;
                Ok(FieldElement(t.exp[((n - t.log[a.0 as usize]) % n) as usize]))
            }
            None => Ok(self.pow(a, u64::from(self.0.characteristic) - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Reference multiplication that bypasses the log tables.
    #[doc(hidden)]
    pub fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.0.modulus {
            Some(f) => FieldElement(clmul_mod(a.0, b.0, f, self.0.degree)),
            None => self.mul(a, b),
        }
    }
}

/// Multiplicative inverse of `x` in `f`.
pub fn field_inverse(x: FieldElement, f: &FieldSpec) -> Result<FieldElement> {
    f.inv(x)
}
