//! Exact arithmetic in `GF(p^n)` with a polynomial-basis representation.
//!
//! Elements are coefficient vectors `(c_0, ..., c_{n-1})` over `Z_p`, reduced
//! modulo a monic irreducible polynomial. Every element also has a canonical
//! index `sum c_i p^i`, which gives a stable total order on the field and is
//! what the `phi` map and the character matrices are keyed on.
//!
//! [`ExtensionTower`] pairs a base field `F_q` with a degree-`r` extension
//! `F_{q^r}` (both realised directly over `F_p`) and an explicit embedding of
//! the base field, so relative traces can be read back as base-field elements.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `m`, ascending.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Splits `q = p^n`, failing when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u32, usize)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(Error::NotPrimePower(q));
    }
    let p = factors[0];
    let mut n = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        n += 1;
    }
    Ok((p as u32, n))
}

// Polynomial helpers over Z_p, ascending coefficients.

fn trim(mut poly: Vec<u32>) -> Vec<u32> {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
    poly
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Remainder of `num` divided by `den` (den nonzero) over Z_p.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dd = den.len() - 1;
    let lead_inv = inv_mod(den[dd], p) as u64;
    let p64 = p as u64;
    while rem.len() > dd && !(rem.len() == 1 && rem[0] == 0) {
        let shift = rem.len() - 1 - dd;
        let factor = rem[rem.len() - 1] as u64 * lead_inv % p64;
        for (i, &c) in den.iter().enumerate() {
            let sub = factor * c as u64 % p64;
            let slot = &mut rem[shift + i];
            *slot = ((*slot as u64 + p64 - sub) % p64) as u32;
        }
        rem = trim(rem);
    }
    rem
}

fn digits(mut index: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (index % p as u64) as u32;
            index /= p as u64;
            d
        })
        .collect()
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=d/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let poly = trim(poly.to_vec());
    let d = poly.len() - 1;
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = digits(idx, p, k);
            g.push(1);
            let r = poly_rem(&poly, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// Serializable description of a field: `{"p":5,"n":2,"modulus":[2,1,1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub n: usize,
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    pub fn build(&self) -> Result<FiniteField> {
        make_field(self.p, self.n, Some(&self.modulus))
    }
}

#[derive(Debug)]
struct FieldInner {
    p: u32,
    n: usize,
    modulus: Vec<u32>,
    q: u64,
}

/// `GF(p^n)` with a verified irreducible modulus. Cheap to clone.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldInner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.0.p, self.0.n, self.0.modulus)
    }
}

/// Builds `GF(p^n)`. Without an explicit modulus the monic irreducible with
/// the smallest canonical index of its lower coefficients is used.
pub fn make_field(p: u32, n: usize, modulus: Option<&[u32]>) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(Error::NonPrimeP(p));
    }
    if n == 0 {
        return Err(Error::InvalidModulus {
            poly: modulus.map(<[u32]>::to_vec).unwrap_or_default(),
            reason: "extension degree must be at least 1",
        });
    }
    let modulus = match modulus {
        Some(poly) => {
            if poly.len() != n + 1 {
                return Err(Error::InvalidModulus {
                    poly: poly.to_vec(),
                    reason: "degree does not match n",
                });
            }
            if poly[n] != 1 {
                return Err(Error::InvalidModulus {
                    poly: poly.to_vec(),
                    reason: "not monic",
                });
            }
            if poly.iter().any(|&c| c >= p) {
                return Err(Error::InvalidModulus {
                    poly: poly.to_vec(),
                    reason: "coefficient out of range",
                });
            }
            if !is_irreducible(poly, p) {
                return Err(Error::ReduciblePolynomial(poly.to_vec()));
            }
            poly.to_vec()
        }
        None => smallest_irreducible(p, n),
    };
    Ok(FiniteField(Arc::new(FieldInner {
        p,
        n,
        modulus,
        q: (p as u64).pow(n as u32),
    })))
}

fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    let count = (p as u64).pow(n as u32);
    (0..count)
        .map(|idx| {
            let mut poly = digits(idx, p, n);
            poly.push(1);
            poly
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Modulus, ascending coefficients, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p(),
            n: self.n(),
            modulus: self.modulus().to_vec(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n()],
            field: self.clone(),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u32) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = c % self.p();
        e
    }

    /// The polynomial variable `x`, i.e. a root of the modulus.
    pub fn generator(&self) -> FieldElement {
        if self.n() == 1 {
            // x reduces to -c_0 in a prime field.
            let c0 = self.modulus()[0];
            return self.constant((self.p() - c0) % self.p());
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    /// Element with canonical index `sum c_i p^i`.
    pub fn element(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.q());
        FieldElement {
            coeffs: digits(index, self.p(), self.n()),
            field: self.clone(),
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.n() || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::Malformed(format!(
                "coefficients {coeffs:?} do not describe an element of {self:?}"
            )));
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
            field: self.clone(),
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q()).map(move |i| self.element(i))
    }

    /// Reduces an arbitrary-degree product polynomial into the field.
    fn reduce(&self, mut prod: Vec<u64>) -> Vec<u32> {
        let n = self.n();
        let p = self.p() as u64;
        let m = self.modulus();
        for deg in (n..prod.len()).rev() {
            let c = prod[deg] % p;
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            // x^deg = -sum_{i<n} m_i x^{deg-n+i}
            for i in 0..n {
                let slot = &mut prod[deg - n + i];
                *slot = (*slot + (p - c) * m[i] as u64) % p;
            }
        }
        prod.truncate(n);
        prod.into_iter().map(|c| (c % p) as u32).collect()
    }
}

/// Element of a [`FiniteField`] in polynomial basis.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    field: FiniteField,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Exponent is taken from `b`'s canonical index.
    Pow,
    Inv,
    Neg,
}

/// Dispatches a binary or unary field operation. Unary operations ignore `b`
/// apart from the field check.
pub fn field_arithmetic(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    a.same_field(b)?;
    match op {
        FieldOp::Add => a.try_add(b),
        FieldOp::Sub => a.try_sub(b),
        FieldOp::Mul => a.try_mul(b),
        FieldOp::Div => a.try_div(b),
        FieldOp::Pow => Ok(a.pow(b.index())),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(-a),
    }
}

impl FieldElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn index(&self) -> u64 {
        let p = self.field.p() as u64;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + c as u64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Value of a prime-field-valued element (all higher coefficients zero).
    pub fn as_constant(&self) -> Option<u32> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.field.p();
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + b) % p)
                .collect(),
            field: self.field.clone(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let n = self.field.n();
        let p = self.field.p() as u64;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        Ok(Self {
            coeffs: self.field.reduce(prod),
            field: self.field.clone(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.q() - 2))
    }

    /// Multiplicative order; `None` for zero.
    pub fn order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let group = self.field.q() - 1;
        let mut ord = group;
        for r in prime_factors(group) {
            while ord.is_multiple_of(r) && self.pow(ord / r).is_one() {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// Absolute trace `x + x^p + ... + x^{p^{n-1}}` as an integer in `[0, p)`.
    pub fn abs_trace(&self) -> u32 {
        let p = self.field.p() as u64;
        let mut term = self.clone();
        let mut acc = self.clone();
        for _ in 1..self.field.n() {
            term = term.pow(p);
            acc = &acc + &term;
        }
        acc.as_constant()
            .expect("absolute trace always lands in the prime field")
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p();
        FieldElement {
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
            field: self.field.clone(),
        }
    }
}

/// Smallest-index element of multiplicative order `q - 1`.
pub fn find_primitive(field: &FiniteField) -> FieldElement {
    let group = field.q() - 1;
    let factors = prime_factors(group);
    (1..field.q())
        .map(|i| field.element(i))
        .find(|x| factors.iter().all(|&r| !x.pow(group / r).is_one()))
        .expect("every finite field has a primitive element")
}

/// A bijection `F_q -> Z_q`, keyed by canonical element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiMap {
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl PhiMap {
    /// Base-`p` digit reading of the coefficient vector.
    pub fn identity(field: &FiniteField) -> Self {
        let table: Vec<u32> = (0..field.q() as u32).collect();
        Self {
            inverse: table.clone(),
            table,
        }
    }

    pub fn from_permutation(table: Vec<u32>) -> Result<Self> {
        let q = table.len();
        let mut inverse = vec![u32::MAX; q];
        for (i, &v) in table.iter().enumerate() {
            let slot = inverse.get_mut(v as usize).ok_or(Error::NotABijection(q))?;
            if *slot != u32::MAX {
                return Err(Error::NotABijection(q));
            }
            *slot = i as u32;
        }
        Ok(Self { table, inverse })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn apply(&self, element_index: u64) -> u32 {
        self.table[element_index as usize]
    }

    pub fn invert(&self, value: u32) -> u64 {
        self.inverse[value as usize] as u64
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }
}

pub fn phi_default(field: &FiniteField) -> PhiMap {
    PhiMap::identity(field)
}

/// A base field `F_q` together with `F_{q^r}` and primitive elements of both.
#[derive(Debug, Clone)]
pub struct ExtensionTower {
    base: FiniteField,
    ext: FiniteField,
    degree: usize,
    embed: Vec<FieldElement>,
    ext_to_base: HashMap<u64, u64>,
    beta: FieldElement,
    alpha: FieldElement,
}

impl ExtensionTower {
    /// Tower `F_q ⊂ F_{q^2}` used by all five constructions.
    pub fn quadratic(base: FiniteField, ext_modulus: Option<&[u32]>) -> Result<Self> {
        Self::new(base, 2, ext_modulus)
    }

    pub fn new(base: FiniteField, degree: usize, ext_modulus: Option<&[u32]>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Malformed("tower degree must be positive".into()));
        }
        let ext = make_field(base.p(), base.n() * degree, ext_modulus)?;

        // Any root of the base modulus in the extension fixes an embedding.
        let root = ext
            .elements()
            .find(|g| {
                base.modulus()
                    .iter()
                    .rev()
                    .fold(ext.zero(), |acc, &c| &(&acc * g) + &ext.constant(c))
                    .is_zero()
            })
            .ok_or(Error::NotInSubfield)?;

        let mut root_powers = Vec::with_capacity(base.n());
        let mut acc = ext.one();
        for _ in 0..base.n() {
            root_powers.push(acc.clone());
            acc = &acc * &root;
        }
        let embed: Vec<FieldElement> = base
            .elements()
            .map(|x| {
                x.coeffs()
                    .iter()
                    .zip(&root_powers)
                    .fold(ext.zero(), |s, (&c, g)| &s + &(&ext.constant(c) * g))
            })
            .collect();
        let ext_to_base = embed
            .iter()
            .enumerate()
            .map(|(i, e)| (e.index(), i as u64))
            .collect();

        Ok(Self {
            beta: find_primitive(&ext),
            alpha: find_primitive(&base),
            base,
            ext,
            degree,
            embed,
            ext_to_base,
        })
    }

    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn ext(&self) -> &FiniteField {
        &self.ext
    }

    /// Extension degree `r` of `F_{q^r}` over `F_q`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement> {
        if *x.field() != self.base {
            return Err(Error::FieldMismatch);
        }
        Ok(self.embed[x.index() as usize].clone())
    }

    /// Inverse of [`embed`](Self::embed) on its image.
    pub fn restrict(&self, y: &FieldElement) -> Result<FieldElement> {
        if *y.field() != self.ext {
            return Err(Error::FieldMismatch);
        }
        self.ext_to_base
            .get(&y.index())
            .map(|&i| self.base.element(i))
            .ok_or(Error::NotInSubfield)
    }

    /// `Tr(x) = x + x^q + ... + x^{q^{r-1}}`, returned in the base field.
    pub fn rel_trace(&self, x: &FieldElement) -> Result<FieldElement> {
        if *x.field() != self.ext {
            return Err(Error::FieldMismatch);
        }
        let q = self.q();
        let mut term = x.clone();
        let mut acc = x.clone();
        for _ in 1..self.degree {
            term = term.pow(q);
            acc = &acc + &term;
        }
        self.restrict(&acc)
    }

    /// The `q`-ary m-sequence `s(t) = Tr(beta^t)` over one period `q^r - 1`.
    pub fn m_sequence(&self) -> MSequence {
        let period = self.ext.q() - 1;
        let mut values = Vec::with_capacity(period as usize);
        let mut power = self.ext.one();
        for _ in 0..period {
            let tr = self
                .rel_trace(&power)
                .expect("trace of an extension element lies in the base field");
            values.push(tr.index());
            power = &power * &self.beta;
        }
        MSequence { values }
    }

    /// The unique `e` in `[0, q]` with `Tr(beta^e) = 0` (quadratic towers only).
    pub fn find_zero_exponent(&self) -> Result<u32> {
        if self.degree != 2 {
            return Err(Error::DimensionMismatch {
                expected: "tower of degree 2".into(),
                got: format!("degree {}", self.degree),
            });
        }
        let mut power = self.ext.one();
        let mut zeros = Vec::new();
        for t in 0..=self.q() {
            if self.rel_trace(&power)?.is_zero() {
                zeros.push(t as u32);
            }
            power = &power * &self.beta;
        }
        match zeros.as_slice() {
            [e] => Ok(*e),
            _ => Err(Error::ZeroNotFound),
        }
    }
}

/// One period of a trace m-sequence, stored as base-field canonical indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSequence {
    values: Vec<u64>,
}

impl MSequence {
    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Cyclic access: `s(t)` for any integer `t`.
    pub fn at(&self, t: i64) -> u64 {
        self.values[t.rem_euclid(self.values.len() as i64) as usize]
    }

    /// CSV with header `t,value_index`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value_index\n");
        for (t, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}
