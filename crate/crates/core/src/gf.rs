//! Finite fields GF(p^m) and dense linear algebra over them.
//!
//! Elements are stored as their polynomial-basis coefficient vector packed
//! into a single integer, `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. The
//! reduction polynomial for each `(p, m)` is the smallest monic irreducible
//! polynomial in that packed ordering, so encodings are reproducible. GF(4)
//! therefore uses `x^2 + x + 1`, and the element `α` is `Fq(2)`.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 32;

/// Fields at most this large get precomputed addition and multiplication tables.
const TABLE_LIMIT: u64 = 256;

/// A field element, packed as described in the module docs.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Arithmetic operation selector for [`FieldSpec::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

struct Inner {
    p: u32,
    m: u32,
    q: u64,
    /// Monic, lowest degree first, length `m + 1`.
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

/// The field GF(p^m) with its canonical modulus. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.m == other.0.m
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.m)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldParams {
    p: u64,
    m: u32,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldParams {
            p: self.0.p as u64,
            m: self.0.m,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let params = FieldParams::deserialize(d)?;
        FieldSpec::new(params.p, params.m).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn to_digits(mut x: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = x % p;
        x /= p;
    }
    out
}

fn from_digits(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic polynomial `b`, coefficients mod `p`.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let t = (lead * bc) % p;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive factor check: no monic polynomial of degree `1..=m/2` divides `poly`.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let m = poly.len() - 1;
    if m <= 1 {
        return true;
    }
    for d in 1..=m / 2 {
        let count = p.pow(d as u32);
        for c in 0..count {
            let mut f = to_digits(c, p, d);
            f.push(1);
            if poly_rem(poly, &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn canonical_modulus(p: u64, m: u32) -> Vec<u64> {
    let count = p.pow(m);
    (0..count)
        .map(|c| {
            let mut f = to_digits(c, p, m as usize);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

impl FieldSpec {
    /// Builds GF(p^m) with its canonical modulus.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::UnsupportedField { p, m });
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::UnsupportedField { p, m })?;
        let modulus = canonical_modulus(p, m);
        let mut inner = Inner {
            p: p as u32,
            m,
            q,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            add: Vec::new(),
            mul: Vec::new(),
            inv: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0; n * n];
            let mut mul = vec![0; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = inner.add_raw(a, b) as u32;
                    mul[(a * q + b) as usize] = inner.mul_raw(a, b) as u32;
                }
            }
            let mut inv = vec![0; n];
            for a in 1..n {
                inv[a] = (0..n).find(|&b| mul[a * n + b] == 1).unwrap() as u32;
            }
            inner.add = add;
            inner.mul = mul;
            inner.inv = inv;
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    /// GF(2), the field most of the worked examples live in.
    pub fn binary() -> Self {
        FieldSpec::new(2, 1).expect("GF(2)")
    }

    pub fn p(&self) -> u64 {
        self.0.p as u64
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Field order as a `usize`, for sizing tables.
    pub fn order(&self) -> usize {
        self.0.q as usize
    }

    /// Reduction polynomial coefficients, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + Clone {
        (0..self.0.q).map(|x| Fq(x as u32))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fq> + Clone {
        (1..self.0.q).map(|x| Fq(x as u32))
    }

    pub fn contains(&self, a: Fq) -> bool {
        (a.0 as u64) < self.0.q
    }

    pub fn coeffs(&self, a: Fq) -> Vec<u32> {
        to_digits(a.0 as u64, self.p(), self.0.m as usize)
            .into_iter()
            .map(|d| d as u32)
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fq> {
        if coeffs.len() != self.0.m as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::FieldMismatch(format!(
                "coefficients {coeffs:?} do not describe an element of {self}"
            )));
        }
        let digits: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
        Ok(Fq(from_digits(&digits, self.p()) as u32))
    }

    pub fn element(&self, index: u64) -> Result<Fq> {
        if index < self.0.q {
            Ok(Fq(index as u32))
        } else {
            Err(Error::FieldMismatch(format!("{index} is not an element of {self}")))
        }
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if !self.0.add.is_empty() {
            return Fq(self.0.add[a.index() * self.order() + b.index()]);
        }
        Fq(self.0.add_raw(a.0 as u64, b.0 as u64) as u32)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.0.p == 2 {
            return a;
        }
        let p = self.p();
        let d: Vec<u64> = to_digits(a.0 as u64, p, self.0.m as usize)
            .into_iter()
            .map(|c| (p - c) % p)
            .collect();
        Fq(from_digits(&d, p) as u32)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if !self.0.mul.is_empty() {
            return Fq(self.0.mul[a.index() * self.order() + b.index()]);
        }
        Fq(self.0.mul_raw(a.0 as u64, b.0 as u64) as u32)
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.0.inv.is_empty() {
            return Ok(Fq(self.0.inv[a.index()]));
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn arith(&self, a: Fq, b: Fq, op: ArithOp) -> Result<Fq> {
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
        })
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(0..self.0.q) as u32)
    }

    pub fn random_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<Fq> {
        (0..len).map(|_| self.random(rng)).collect()
    }

    /// Elements of the subfield of the given order, in increasing encoding.
    pub fn subfield(&self, order: u64) -> Result<Vec<Fq>> {
        let p = self.p();
        let d = (1..=self.0.m).find(|&d| p.pow(d) == order);
        match d {
            Some(d) if self.0.m.is_multiple_of(d) => Ok(self
                .elements()
                .filter(|&x| self.pow(x, order) == x)
                .collect()),
            _ => Err(Error::InvalidParameter(format!(
                "{self} has no subfield of order {order}"
            ))),
        }
    }

    /// Packs a vector over this field into a single index (first entry least significant).
    pub fn vector_index(&self, v: &[Fq]) -> usize {
        let q = self.order();
        v.iter().rev().fold(0, |acc, x| acc * q + x.index())
    }

    /// Inverse of [`FieldSpec::vector_index`].
    pub fn vector_from_index(&self, mut index: usize, len: usize) -> Vec<Fq> {
        let q = self.order();
        (0..len)
            .map(|_| {
                let x = Fq((index % q) as u32);
                index /= q;
                x
            })
            .collect()
    }
}

impl Inner {
    fn add_raw(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p as u64;
        let m = self.m as usize;
        let da = to_digits(a, p, m);
        let db = to_digits(b, p, m);
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        from_digits(&s, p)
    }

    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let p = self.p as u64;
        let m = self.m as usize;
        if m == 1 {
            return (a * b) % p;
        }
        let da = to_digits(a, p, m);
        let db = to_digits(b, p, m);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let modulus: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let mut r = poly_rem(&prod, &modulus, p);
        r.resize(m, 0);
        from_digits(&r, p)
    }
}

/// Sum of two vectors of equal length.
pub fn vec_add(field: &FieldSpec, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

pub fn vec_scale(field: &FieldSpec, c: Fq, a: &[Fq]) -> Vec<Fq> {
    a.iter().map(|&x| field.mul(c, x)).collect()
}

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Fq>,
    field: FieldSpec,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|x| x.0).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![Fq::ZERO; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fq::ONE);
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(field: &FieldSpec, cols: usize, rows: &[Vec<Fq>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|x| !field.contains(**x)) {
                return Err(Error::FieldMismatch(format!(
                    "{} is not an element of {field}",
                    bad.0
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            entries,
            field: field.clone(),
        })
    }

    /// Convenience constructor from packed integer rows.
    pub fn from_u32_rows(field: &FieldSpec, rows: &[&[u32]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Fq>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Fq(x)).collect())
            .collect();
        Self::from_rows(field, cols, &rows)
    }

    pub fn random<R: Rng + ?Sized>(field: &FieldSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: field.random_vec(rows * cols, rng),
            field: field.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn entries(&self) -> &[Fq] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fq {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fq) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fq] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Fq>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &FieldMatrix) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(FieldMatrix {
            rows: self.rows + other.rows,
            cols,
            entries,
            field: self.field.clone(),
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &FieldMatrix) -> Result<Self> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot join {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let rows: Vec<Vec<Fq>> = (0..self.rows)
            .map(|r| [self.row(r), other.row(r)].concat())
            .collect();
        Self::from_rows(&self.field, self.cols + other.cols, &rows)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(self.row(r));
        }
        FieldMatrix {
            rows: rows.len(),
            cols: self.cols,
            entries,
            field: self.field.clone(),
        }
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v M`, with `v.len() == rows`.
    pub fn vec_mul(&self, v: &[Fq]) -> Result<Vec<Fq>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![Fq::ZERO; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(a, g));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, pr);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = f.mul(inv, m.get(lead, j));
                m.set(lead, j, v);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows, in reduced echelon form) of `{x : M x^T = 0}`.
    pub fn null_space(&self) -> FieldMatrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Fq::ZERO; self.cols];
            v[fc] = Fq::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, fc));
            }
            basis.push(v);
        }
        let m = FieldMatrix::from_rows(f, self.cols, &basis).expect("consistent dimensions");
        let (reduced, pivots) = m.rref();
        reduced.select_rows(&(0..pivots.len()).collect::<Vec<_>>())
    }

    /// Nonzero rows of the reduced echelon form: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> FieldMatrix {
        let (r, pivots) = self.rref();
        r.select_rows(&(0..pivots.len()).collect::<Vec<_>>())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn check_field(&self, other: &FieldMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} versus {}",
                self.field, other.field
            )));
        }
        Ok(())
    }
}

/// Rank of a list of vectors of length `dim`.
pub fn rank_of(field: &FieldSpec, dim: usize, vectors: &[Vec<Fq>]) -> Result<usize> {
    Ok(FieldMatrix::from_rows(field, dim, vectors)?.rank())
}

/// True iff `u` and `v` are linearly dependent. The zero vector is dependent
/// with everything.
pub fn rows_linearly_dependent(field: &FieldSpec, u: &[Fq], v: &[Fq]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(rank_of(field, u.len(), &[u.to_vec(), v.to_vec()])? < 2)
}

/// Outcome of [`unique_complement_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementReport {
    /// Exactly one admissible complement exists.
    pub unique: bool,
    /// The admissible complement when it is unique, as indices into `W`.
    pub complement: Option<Vec<usize>>,
    /// Every subset `T` of `W` with `|T| = k - |Z|` such that `Z ∪ T` spans.
    pub candidates: Vec<Vec<usize>>,
}

/// Enumerates the subsets `T ⊆ W` of size `k - |Z|` that complete the
/// independent set `Z` to a spanning set of the `k`-dimensional space.
pub fn unique_complement_check(
    field: &FieldSpec,
    z: &[Vec<Fq>],
    w: &[Vec<Fq>],
) -> Result<ComplementReport> {
    let dim = z
        .first()
        .or_else(|| w.first())
        .map(|v| v.len())
        .ok_or_else(|| Error::InvalidParameter("empty vector lists".into()))?;
    if z.iter().chain(w).any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vectors of unequal length".into()));
    }
    let r = z.len();
    if r >= dim {
        return Err(Error::InvalidParameter(format!(
            "|Z| = {r} must be smaller than the dimension {dim}"
        )));
    }
    if r > 0 && rank_of(field, dim, z)? < r {
        return Err(Error::LinearlyDependent);
    }
    if rank_of(field, dim, w)? < dim {
        return Err(Error::NotSpanning);
    }
    let mut candidates = Vec::new();
    for t in (0..w.len()).combinations(dim - r) {
        let mut rows: Vec<Vec<Fq>> = z.to_vec();
        rows.extend(t.iter().map(|&i| w[i].clone()));
        if rank_of(field, dim, &rows)? == dim {
            candidates.push(t);
        }
    }
    let unique = candidates.len() == 1;
    Ok(ComplementReport {
        unique,
        complement: unique.then(|| candidates[0].clone()),
        candidates,
    })
}
