//! Nested coset codes sharing one generator matrix.
//!
//! Sender `j` maps a message `m` (length `k_j`) and shaping vector `l`
//! (length `k̂_j`) to `[m l 0] G + d_j`, where the zero block pads to the
//! common row count `κ = max_j (k_j + k̂_j)` of `G`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, FieldSpec, Fq};
use crate::prob::{counts_typical, Pmf};

/// Largest number of shaping vectors the typicality encoder scans.
pub const SHAPING_GUARD: f64 = (1u64 << 24) as f64;

/// Tolerance when turning rates into integral dimensions.
const DIM_TOLERANCE: f64 = 1e-9;

/// Message and shaping dimensions of one sender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderDims {
    pub k: usize,
    pub k_hat: usize,
}

impl SenderDims {
    pub fn new(k: usize, k_hat: usize) -> Self {
        SenderDims { k, k_hat }
    }

    pub fn total(&self) -> usize {
        self.k + self.k_hat
    }
}

/// Converts per-sender rates `(R_j, R̂_j)` in field symbols per channel use
/// into dimensions, rejecting non-integral products.
pub fn dims_from_rates(n: usize, rates: &[(f64, f64)]) -> Result<Vec<SenderDims>> {
    let to_dim = |r: f64| -> Result<usize> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate {r} must be nonnegative")));
        }
        let x = r * n as f64;
        let rounded = x.round();
        if (x - rounded).abs() > DIM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "rate {r} at blocklength {n} gives non-integral dimension {x}"
            )));
        }
        Ok(rounded as usize)
    };
    rates
        .iter()
        .map(|&(r, rh)| Ok(SenderDims::new(to_dim(r)?, to_dim(rh)?)))
        .collect()
}

/// How a sender picks its shaping vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Shaping {
    /// Pick `l` uniformly among those making the codeword `eps_prime`-typical
    /// for `pmf` (a law on the field elements).
    Typicality { pmf: Pmf, eps_prime: f64 },
    /// `l = m L` for a fixed `k × k̂` matrix `L`.
    Linear(FieldMatrix),
}

/// Result of shaping one message.
#[derive(Clone, Debug, PartialEq)]
pub struct Shaped {
    pub l: Vec<Fq>,
    pub codeword: Vec<Fq>,
    pub found: bool,
}

/// A homologous code collection: common `G`, per-sender dithers and shaping.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologousEnsemble {
    field: FieldSpec,
    n: usize,
    dims: Vec<SenderDims>,
    g: FieldMatrix,
    dithers: Vec<Vec<Fq>>,
    shaping: Vec<Shaping>,
    seed: Option<u64>,
}

impl HomologousEnsemble {
    /// Assembles and validates an ensemble from explicit parts.
    pub fn new(
        field: &FieldSpec,
        n: usize,
        dims: Vec<SenderDims>,
        g: FieldMatrix,
        dithers: Vec<Vec<Fq>>,
        shaping: Vec<Shaping>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("blocklength must be positive".into()));
        }
        if dims.is_empty() || dims.len() != dithers.len() || dims.len() != shaping.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} senders, {} dithers, {} shaping rules",
                dims.len(),
                dithers.len(),
                shaping.len()
            )));
        }
        let kappa = dims.iter().map(SenderDims::total).max().unwrap_or(0);
        if g.rows() != kappa || g.cols() != n || g.field() != field {
            return Err(Error::DimensionMismatch(format!(
                "generator is {}x{} over {}, expected {kappa}x{n} over {field}",
                g.rows(),
                g.cols(),
                g.field()
            )));
        }
        for (j, d) in dithers.iter().enumerate() {
            if d.len() != n || d.iter().any(|x| !field.contains(*x)) {
                return Err(Error::DimensionMismatch(format!("dither {} is not a vector in the field of length {n}", j + 1)));
            }
        }
        for (j, (s, d)) in shaping.iter().zip(&dims).enumerate() {
            match s {
                Shaping::Typicality { pmf, eps_prime } => {
                    if pmf.len() != field.order() {
                        return Err(Error::InvalidPmf(format!(
                            "shaping law of sender {} has {} symbols, field has {}",
                            j + 1,
                            pmf.len(),
                            field.q()
                        )));
                    }
                    if !(*eps_prime > 0.0) {
                        return Err(Error::InvalidParameter("shaping eps must be positive".into()));
                    }
                }
                Shaping::Linear(l) => {
                    if l.rows() != d.k || l.cols() != d.k_hat || l.field() != field {
                        return Err(Error::DimensionMismatch(format!(
                            "shaping map of sender {} is {}x{}, expected {}x{}",
                            j + 1,
                            l.rows(),
                            l.cols(),
                            d.k,
                            d.k_hat
                        )));
                    }
                }
            }
        }
        Ok(HomologousEnsemble {
            field: field.clone(),
            n,
            dims,
            g,
            dithers,
            shaping,
            seed: None,
        })
    }

    /// Draws `G` and every dither i.i.d. uniform over the field.
    pub fn sample<R: Rng + ?Sized>(
        field: &FieldSpec,
        n: usize,
        dims: Vec<SenderDims>,
        shaping: Vec<Shaping>,
        rng: &mut R,
    ) -> Result<Self> {
        let kappa = dims.iter().map(SenderDims::total).max().unwrap_or(0);
        let g = FieldMatrix::random(field, kappa, n, rng);
        let dithers = (0..dims.len()).map(|_| field.random_vec(n, rng)).collect();
        Self::new(field, n, dims, g, dithers, shaping)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn senders(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[SenderDims] {
        &self.dims
    }

    pub fn kappa(&self) -> usize {
        self.g.rows()
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.g
    }

    pub fn dither(&self, j: usize) -> &[Fq] {
        &self.dithers[j]
    }

    pub fn shaping(&self, j: usize) -> &Shaping {
        &self.shaping[j]
    }

    /// Rates `(R_j, R̂_j)` in field symbols per channel use.
    pub fn rates(&self) -> Vec<(f64, f64)> {
        let n = self.n as f64;
        self.dims.iter().map(|d| (d.k as f64 / n, d.k_hat as f64 / n)).collect()
    }

    /// The padded row vector `[m l 0]` of length `κ`.
    pub fn padded(&self, j: usize, m: &[Fq], l: &[Fq]) -> Result<Vec<Fq>> {
        let d = self.dims[j];
        if m.len() != d.k || l.len() != d.k_hat {
            return Err(Error::DimensionMismatch(format!(
                "sender {} takes ({}, {}) symbols, got ({}, {})",
                j + 1,
                d.k,
                d.k_hat,
                m.len(),
                l.len()
            )));
        }
        let mut u = Vec::with_capacity(self.kappa());
        u.extend_from_slice(m);
        u.extend_from_slice(l);
        u.resize(self.kappa(), Fq::ZERO);
        Ok(u)
    }

    /// `[m l 0] G + d_j`.
    pub fn encode(&self, j: usize, m: &[Fq], l: &[Fq]) -> Result<Vec<Fq>> {
        let u = self.padded(j, m, l)?;
        let x = self.g.vec_mul(&u)?;
        Ok(crate::gf::vec_add(&self.field, &x, &self.dithers[j]))
    }

    /// Chooses the shaping vector for message `m` of sender `j`.
    ///
    /// Typicality shaping scans every candidate in index order and keeps a
    /// uniformly random typical one; with none typical it falls back to `l = 0`.
    pub fn shape<R: Rng + ?Sized>(&self, j: usize, m: &[Fq], rng: &mut R) -> Result<Shaped> {
        let d = self.dims[j];
        match &self.shaping[j] {
            Shaping::Linear(map) => {
                let l = if d.k == 0 { vec![Fq::ZERO; d.k_hat] } else { map.vec_mul(m)? };
                let codeword = self.encode(j, m, &l)?;
                Ok(Shaped { l, codeword, found: true })
            }
            Shaping::Typicality { pmf, eps_prime } => {
                let space = (self.field.q() as f64).powi(d.k_hat as i32);
                if space > SHAPING_GUARD {
                    return Err(Error::GuardExceeded { size: space, limit: SHAPING_GUARD });
                }
                let base = self.encode(j, m, &vec![Fq::ZERO; d.k_hat])?;
                let mut chosen: Option<(usize, Vec<Fq>)> = None;
                let mut seen = 0u64;
                let q = self.field.order();
                let mut counts = vec![0u64; q];
                let rows: Vec<usize> = (d.k..d.total()).collect();
                for (idx, x) in CodewordIter::new(&self.field, &self.g, &rows, &base) {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for s in &x {
                        counts[s.index()] += 1;
                    }
                    if counts_typical(pmf.probs(), &counts, self.n, *eps_prime) {
                        seen += 1;
                        if rng.gen_range(0..seen) == 0 {
                            chosen = Some((idx, x));
                        }
                    }
                }
                Ok(match chosen {
                    Some((idx, codeword)) => Shaped {
                        l: self.field.vector_from_index(idx, d.k_hat),
                        codeword,
                        found: true,
                    },
                    None => Shaped {
                        l: vec![Fq::ZERO; d.k_hat],
                        codeword: base,
                        found: false,
                    },
                })
            }
        }
    }

    /// Every admissible `(m, l)` pair of sender `j` with its codeword:
    /// all shaping vectors under typicality shaping, `l(m)` under linear shaping.
    /// Indices use [`FieldSpec::vector_index`].
    pub fn codebook(&self, j: usize) -> Result<Vec<(usize, usize, Vec<Fq>)>> {
        let d = self.dims[j];
        match &self.shaping[j] {
            Shaping::Typicality { .. } => {
                let rows: Vec<usize> = (0..d.total()).collect();
                let q = self.field.order();
                let qk = q.pow(d.k as u32);
                Ok(CodewordIter::new(&self.field, &self.g, &rows, &self.dithers[j])
                    .map(|(idx, x)| (idx % qk, idx / qk, x))
                    .collect())
            }
            Shaping::Linear(map) => {
                let count = self.field.order().pow(d.k as u32);
                (0..count)
                    .map(|mi| {
                        let m = self.field.vector_from_index(mi, d.k);
                        let l = if d.k == 0 { vec![Fq::ZERO; d.k_hat] } else { map.vec_mul(&m)? };
                        let x = self.encode(j, &m, &l)?;
                        Ok((mi, self.field.vector_index(&l), x))
                    })
                    .collect()
            }
        }
    }

    /// Number of codebook entries of sender `j`.
    pub fn codebook_size(&self, j: usize) -> f64 {
        let d = self.dims[j];
        let q = self.field.q() as f64;
        match self.shaping[j] {
            Shaping::Typicality { .. } => q.powi(d.total() as i32),
            Shaping::Linear(_) => q.powi(d.k as i32),
        }
    }
}

/// Enumerates `base + Σ_i u_i G_{rows[i]}` over all coefficient vectors `u`,
/// yielding `(vector_index(u), codeword)`. Consecutive codewords differ in one
/// coefficient, so each step costs `O(n)`.
pub struct CodewordIter<'a> {
    field: &'a FieldSpec,
    /// `scaled[i][c]` is `c · G_{rows[i]}`.
    scaled: Vec<Vec<Vec<Fq>>>,
    digits: Vec<usize>,
    current: Vec<Fq>,
    index: usize,
    total: usize,
}

impl<'a> CodewordIter<'a> {
    pub fn new(field: &'a FieldSpec, g: &FieldMatrix, rows: &[usize], base: &[Fq]) -> Self {
        let scaled = rows
            .iter()
            .map(|&r| {
                field
                    .elements()
                    .map(|c| g.row(r).iter().map(|&x| field.mul(c, x)).collect())
                    .collect()
            })
            .collect();
        CodewordIter {
            field,
            scaled,
            digits: vec![0; rows.len()],
            current: base.to_vec(),
            index: 0,
            total: field.order().pow(rows.len() as u32),
        }
    }
}

impl Iterator for CodewordIter<'_> {
    type Item = (usize, Vec<Fq>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.total {
            return None;
        }
        let out = (self.index, self.current.clone());
        self.index += 1;
        if self.index < self.total {
            let q = self.field.order();
            for i in 0..self.digits.len() {
                let old = self.digits[i];
                let new = (old + 1) % q;
                self.digits[i] = new;
                let f = self.field;
                let (a, b) = (&self.scaled[i][old], &self.scaled[i][new]);
                for ((x, &o), &nw) in self.current.iter_mut().zip(a).zip(b) {
                    *x = f.add(f.sub(*x, o), nw);
                }
                if new != 0 {
                    break;
                }
            }
        }
        Some(out)
    }
}

/// Builds the deterministic binary adder pair over GF(2) with `G = I_n`: sender 1 sends
/// `[m1 0]`, sender 2 sends `[m2 0 m2]` through the shaping map `l2(m2) = [0 m2]`.
pub fn construct_adder_example(n: usize, k1: usize, k2: usize) -> Result<HomologousEnsemble> {
    if k1 + k2 != n || k1 < k2 {
        return Err(Error::InvalidParameter(format!(
            "need k1 + k2 = n and k1 >= k2, got k1 = {k1}, k2 = {k2}, n = {n}"
        )));
    }
    let f = FieldSpec::binary();
    let mut l2 = FieldMatrix::zeros(&f, k2, k1);
    for i in 0..k2 {
        l2.set(i, k1 - k2 + i, Fq::ONE);
    }
    HomologousEnsemble::new(
        &f,
        n,
        vec![SenderDims::new(k1, 0), SenderDims::new(k2, k1)],
        FieldMatrix::identity(&f, n),
        vec![vec![Fq::ZERO; n]; 2],
        vec![Shaping::Linear(FieldMatrix::zeros(&f, k1, 0)), Shaping::Linear(l2)],
    )
}

/// Rate-based front end for [`construct_adder_example`].
pub fn construct_adder_example_rates(n: usize, r1: f64, r2: f64) -> Result<HomologousEnsemble> {
    if (r1 + r2 - 1.0).abs() > DIM_TOLERANCE || r1 < r2 {
        return Err(Error::InvalidParameter(format!(
            "need R1 + R2 = 1 and R1 >= R2, got ({r1}, {r2})"
        )));
    }
    let dims = dims_from_rates(n, &[(r1, 0.0), (r2, 0.0)])?;
    construct_adder_example(n, dims[0].k, dims[1].k)
}

/// The deterministic erasure MAC construction over `2n` channel uses.
#[derive(Clone, Debug)]
pub struct ErasureExample {
    pub ensemble: HomologousEnsemble,
    pub a: FieldMatrix,
    /// Reduced echelon basis of the vectors orthogonal to the rows of `a`.
    pub a_perp: FieldMatrix,
    /// `[a; a_perp]`.
    pub b: FieldMatrix,
}

/// Builds the homologous `(2n, n+k, 0)` and `(2n, n+k, n-k)` pair from a
/// `k × n` generator `A` with `k/n < 1/2`.
///
/// Requires `B = [A; A⊥]` to be invertible, i.e. the code of `A` meets its
/// dual only in zero.
pub fn construct_erasure_example(a: &FieldMatrix) -> Result<ErasureExample> {
    let f = a.field().clone();
    let (k, n) = (a.rows(), a.cols());
    if a.rank() < k {
        return Err(Error::RankDeficient);
    }
    if 2 * k >= n {
        return Err(Error::InvalidParameter(format!("rate {k}/{n} must be below 1/2")));
    }
    let a_perp = a.null_space();
    let b = a.vstack(&a_perp)?;
    if b.rank() < n {
        return Err(Error::InvalidParameter(
            "[A; A⊥] is singular: the code of A intersects its dual".into(),
        ));
    }
    let mut g = FieldMatrix::zeros(&f, 2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            g.set(r, c, b.get(r, c));
            g.set(n + r, n + c, b.get(r, c));
        }
    }
    for r in 0..n - k {
        for c in 0..n {
            g.set(n + k + r, c, a_perp.get(r, c));
        }
    }
    let mut l2 = FieldMatrix::zeros(&f, n + k, n - k);
    for i in 0..n - k {
        l2.set(k + i, i, Fq::ONE);
    }
    let ensemble = HomologousEnsemble::new(
        &f,
        2 * n,
        vec![SenderDims::new(n + k, 0), SenderDims::new(n + k, n - k)],
        g,
        vec![vec![Fq::ZERO; 2 * n]; 2],
        vec![Shaping::Linear(FieldMatrix::zeros(&f, n + k, 0)), Shaping::Linear(l2)],
    )?;
    Ok(ErasureExample {
        ensemble,
        a: a.clone(),
        a_perp,
        b,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ShapingJson {
    Typicality { pmf: Vec<f64>, eps_prime: f64 },
    Linear { rows: Vec<Vec<u32>> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    field: FieldSpec,
    n: usize,
    dims: Vec<SenderDims>,
    g: Vec<Vec<u32>>,
    dithers: Vec<Vec<u32>>,
    shaping: Vec<ShapingJson>,
    #[serde(default)]
    seed: Option<u64>,
}

fn matrix_from_json(field: &FieldSpec, rows: &[Vec<u32>], r: usize, c: usize) -> Result<FieldMatrix> {
    if rows.len() != r {
        return Err(Error::DimensionMismatch(format!("{} rows, expected {r}", rows.len())));
    }
    let rows: Vec<Vec<Fq>> = rows.iter().map(|row| row.iter().map(|&x| Fq(x)).collect()).collect();
    FieldMatrix::from_rows(field, c, &rows)
}

fn matrix_to_json(m: &FieldMatrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.0).collect()).collect()
}

impl HomologousEnsemble {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: EnsembleJson = serde_json::from_str(text)?;
        let f = raw.field;
        if raw.dims.len() != raw.shaping.len() {
            return Err(Error::DimensionMismatch("dims and shaping lengths differ".into()));
        }
        let kappa = raw.dims.iter().map(SenderDims::total).max().unwrap_or(0);
        if (kappa as f64) * (raw.n as f64) > (1u64 << 26) as f64 {
            return Err(Error::InvalidParameter("generator too large".into()));
        }
        let g = matrix_from_json(&f, &raw.g, kappa, raw.n)?;
        let dithers = raw.dithers.iter().map(|d| d.iter().map(|&x| Fq(x)).collect()).collect();
        let shaping = raw
            .shaping
            .into_iter()
            .zip(&raw.dims)
            .map(|(s, d)| match s {
                ShapingJson::Typicality { pmf, eps_prime } => Ok(Shaping::Typicality {
                    pmf: Pmf::indexed(pmf)?,
                    eps_prime,
                }),
                ShapingJson::Linear { rows } => {
                    if d.k == 0 {
                        return Ok(Shaping::Linear(FieldMatrix::zeros(&f, 0, d.k_hat)));
                    }
                    Ok(Shaping::Linear(matrix_from_json(&f, &rows, d.k, d.k_hat)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let e = HomologousEnsemble::new(&f, raw.n, raw.dims, g, dithers, shaping)?;
        Ok(match raw.seed {
            Some(s) => e.with_seed(s),
            None => e,
        })
    }

    pub fn to_json(&self) -> String {
        let shaping = self
            .shaping
            .iter()
            .map(|s| match s {
                Shaping::Typicality { pmf, eps_prime } => ShapingJson::Typicality {
                    pmf: pmf.probs().to_vec(),
                    eps_prime: *eps_prime,
                },
                Shaping::Linear(l) => ShapingJson::Linear { rows: matrix_to_json(l) },
            })
            .collect();
        serde_json::to_string_pretty(&EnsembleJson {
            field: self.field.clone(),
            n: self.n,
            dims: self.dims.clone(),
            g: matrix_to_json(&self.g),
            dithers: self.dithers.iter().map(|d| d.iter().map(|x| x.0).collect()).collect(),
            shaping,
            seed: self.seed,
        })
        .expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::vec_add;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(v: &[u32]) -> Vec<Fq> {
        v.iter().map(|&x| Fq(x)).collect()
    }

    fn uniform_shaping(f: &FieldSpec, senders: usize) -> Vec<Shaping> {
        vec![
            Shaping::Typicality {
                pmf: Pmf::uniform(f.order()).unwrap(),
                eps_prime: 0.5
            };
            senders
        ]
    }

    #[test]
    fn sampling_is_reproducible() {
        let f = FieldSpec::binary();
        let dims = dims_from_rates(4, &[(0.5, 0.0), (0.5, 0.0)]).unwrap();
        let make = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            HomologousEnsemble::sample(&f, 4, dims.clone(), uniform_shaping(&f, 2), &mut rng).unwrap()
        };
        assert_eq!(make(5), make(5));
        assert_eq!(make(5).generator().rows(), 2);
        assert_ne!(make(5), make(6));
    }

    #[test]
    fn kappa_is_max_total() {
        let f = FieldSpec::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let dims = vec![SenderDims::new(2, 1), SenderDims::new(3, 2)];
        let e = HomologousEnsemble::sample(&f, 8, dims, uniform_shaping(&f, 2), &mut rng).unwrap();
        assert_eq!(e.kappa(), 5);
    }

    #[test]
    fn non_integral_rates_rejected() {
        assert!(dims_from_rates(10, &[(0.25, 0.0)]).is_err());
        assert_eq!(dims_from_rates(8, &[(0.25, 0.5)]).unwrap(), vec![SenderDims::new(2, 4)]);
    }

    #[test]
    fn generator_entries_uniform() {
        let f = FieldSpec::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 100_000;
        let g = FieldMatrix::random(&f, 100, draws / 100, &mut rng);
        let mut counts = [0f64; 4];
        for x in g.entries() {
            counts[x.index()] += 1.0;
        }
        let mean = draws as f64 / 4.0;
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c - mean).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn codeword_iterator_matches_direct_encoding() {
        let f = FieldSpec::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = vec![SenderDims::new(2, 1), SenderDims::new(1, 1)];
        let e = HomologousEnsemble::sample(&f, 6, dims, uniform_shaping(&f, 2), &mut rng).unwrap();
        for j in 0..2 {
            let d = e.dims()[j];
            let book = e.codebook(j).unwrap();
            assert_eq!(book.len(), 3usize.pow(d.total() as u32));
            for (mi, li, x) in book {
                let m = f.vector_from_index(mi, d.k);
                let l = f.vector_from_index(li, d.k_hat);
                assert_eq!(x, e.encode(j, &m, &l).unwrap());
            }
        }
    }

    #[test]
    fn encoding_is_affine() {
        let f = FieldSpec::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = vec![SenderDims::new(2, 2), SenderDims::new(3, 0)];
        let e = HomologousEnsemble::sample(&f, 8, dims, uniform_shaping(&f, 2), &mut rng).unwrap();
        let d = e.dims()[0];
        for a in 0..16 {
            for b in 0..16 {
                let (ua, ub) = (f.vector_from_index(a, 4), f.vector_from_index(b, 4));
                let xa = e.encode(0, &ua[..d.k], &ua[d.k..]).unwrap();
                let xb = e.encode(0, &ub[..d.k], &ub[d.k..]).unwrap();
                let us = vec_add(&f, &ua, &ub);
                let xs = e.encode(0, &us[..d.k], &us[d.k..]).unwrap();
                assert_eq!(vec_add(&f, &vec_add(&f, &xa, &xb), e.dither(0)), xs);
            }
        }
    }

    #[test]
    fn shaping_returns_consistent_codewords() {
        let f = FieldSpec::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pmf = Pmf::bernoulli(0.3).unwrap();
        let shaping = vec![Shaping::Typicality { pmf: pmf.clone(), eps_prime: 0.3 }; 1];
        let e = HomologousEnsemble::sample(&f, 20, vec![SenderDims::new(3, 8)], shaping, &mut rng).unwrap();
        for mi in 0..8 {
            let m = f.vector_from_index(mi, 3);
            let s = e.shape(0, &m, &mut rng).unwrap();
            assert_eq!(s.codeword, e.encode(0, &m, &s.l).unwrap());
            if s.found {
                let x: Vec<usize> = s.codeword.iter().map(|x| x.index()).collect();
                assert!(crate::prob::is_typical(&x, &pmf, 0.3).unwrap());
            } else {
                assert!(s.l.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn degenerate_shaping() {
        let f = FieldSpec::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pmf = Pmf::uniform(2).unwrap();
        let shaping = vec![Shaping::Typicality { pmf: pmf.clone(), eps_prime: 0.4 }];
        let e = HomologousEnsemble::sample(&f, 10, vec![SenderDims::new(3, 0)], shaping, &mut rng).unwrap();
        let m = bits(&[1, 0, 1]);
        let s = e.shape(0, &m, &mut rng).unwrap();
        assert!(s.l.is_empty());
        let x: Vec<usize> = s.codeword.iter().map(|x| x.index()).collect();
        assert_eq!(s.found, crate::prob::is_typical(&x, &pmf, 0.4).unwrap());
    }

    #[test]
    fn shaping_guard() {
        let f = FieldSpec::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shaping = uniform_shaping(&f, 1);
        let e = HomologousEnsemble::sample(&f, 16, vec![SenderDims::new(0, 13)], shaping, &mut rng).unwrap();
        assert!(matches!(e.shape(0, &[], &mut rng), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn adder_example_codewords() {
        let e = construct_adder_example_rates(4, 0.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x1 = e.shape(0, &bits(&[1, 0]), &mut rng).unwrap().codeword;
        let x2 = e.shape(1, &bits(&[0, 1]), &mut rng).unwrap().codeword;
        assert_eq!(x1, bits(&[1, 0, 0, 0]));
        assert_eq!(x2, bits(&[0, 1, 0, 1]));
        let e = construct_adder_example(6, 6, 0).unwrap();
        let x2 = e.shape(1, &[], &mut rng).unwrap().codeword;
        assert!(x2.iter().all(|x| x.is_zero()));
        assert!(construct_adder_example(6, 2, 4).is_err());
    }

    #[test]
    fn adder_example_is_injective() {
        for n in 1..=12 {
            for k2 in 0..=n / 2 {
                let e = construct_adder_example(n, n - k2, k2).unwrap();
                let b1 = e.codebook(0).unwrap();
                let b2 = e.codebook(1).unwrap();
                let mut seen = std::collections::HashSet::new();
                for (_, _, x1) in &b1 {
                    for (_, _, x2) in &b2 {
                        let y: Vec<u32> = x1.iter().zip(x2).map(|(a, b)| a.0 ^ b.0).collect();
                        assert!(seen.insert(y), "n={n} k2={k2}");
                    }
                }
            }
        }
    }

    #[test]
    fn homologous_generator_shared() {
        let e = construct_adder_example(6, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m1 = bits(&[1, 1, 0, 1]);
        let s1 = e.shape(0, &m1, &mut rng).unwrap();
        let u = e.padded(0, &m1, &s1.l).unwrap();
        assert_eq!(e.generator().vec_mul(&u).unwrap(), s1.codeword);
    }

    #[test]
    fn erasure_example_self_orthogonal_generators_fail() {
        let f = FieldSpec::binary();
        let a = FieldMatrix::from_u32_rows(&f, &[&[1, 1, 1, 1]]).unwrap();
        assert!(construct_erasure_example(&a).is_err());
        // The complement still has the expected size.
        assert_eq!(a.null_space().rows(), 3);
    }

    #[test]
    fn erasure_example_structure() {
        let f = FieldSpec::binary();
        let a = FieldMatrix::from_u32_rows(&f, &[&[1, 1, 1, 1, 1, 1, 1, 0]]).unwrap();
        let ex = construct_erasure_example(&a).unwrap();
        let (n, k) = (8, 1);
        assert_eq!(ex.b.rank(), n);
        assert!(a.mul(&ex.a_perp.transpose()).unwrap().is_zero());
        let e = &ex.ensemble;
        assert_eq!(e.n(), 2 * n);
        let b1 = e.codebook(0).unwrap();
        let b2 = e.codebook(1).unwrap();
        let halves = |book: &[(usize, usize, Vec<Fq>)]| {
            let first: std::collections::HashSet<Vec<Fq>> = book.iter().map(|c| c.2[..n].to_vec()).collect();
            let second: std::collections::HashSet<Vec<Fq>> = book.iter().map(|c| c.2[n..].to_vec()).collect();
            (first.len(), second.len())
        };
        assert_eq!(halves(&b1), (1 << n, 1 << k));
        assert_eq!(halves(&b2), (1 << k, 1 << n));
        let r = k as f64 / n as f64;
        let combined = ((1.0 + r) / 2.0, (r + 1.0) / 2.0);
        assert!((combined.0 - 0.5625).abs() < 1e-12 && combined.0 == combined.1);
    }

    #[test]
    fn erasure_example_first_half_collides() {
        // Sender 1 covers every first-half word, so sender 2's first-half
        // codewords (the code of A) coincide with some of sender 1's.
        let f = FieldSpec::binary();
        let a = FieldMatrix::from_u32_rows(&f, &[&[1, 1, 1, 1, 1, 1, 1, 0]]).unwrap();
        let ex = construct_erasure_example(&a).unwrap();
        let e = &ex.ensemble;
        let n = 8;
        let b1 = e.codebook(0).unwrap();
        let b2 = e.codebook(1).unwrap();
        let y = |x1: &[Fq], x2: &[Fq]| -> Vec<u32> { x1.iter().zip(x2).map(|(a, b)| a.0 + b.0).collect() };
        let c = b2.iter().find(|c| c.2[..n].iter().any(|x| !x.is_zero())).unwrap();
        let zero2 = b2.iter().find(|c| c.2[..n].iter().all(|x| x.is_zero())).unwrap();
        let match1 = b1.iter().find(|b| b.2[..n] == c.2[..n]).unwrap();
        let zero1 = b1.iter().find(|b| b.2[..n].iter().all(|x| x.is_zero())).unwrap();
        assert_eq!(y(&match1.2[..n], &zero2.2[..n]), y(&zero1.2[..n], &c.2[..n]));
    }

    #[test]
    fn json_round_trip() {
        let f = FieldSpec::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut shaping = uniform_shaping(&f, 1);
        shaping.push(Shaping::Linear(FieldMatrix::random(&f, 2, 1, &mut rng)));
        let e = HomologousEnsemble::sample(&f, 5, vec![SenderDims::new(1, 2), SenderDims::new(2, 1)], shaping, &mut rng)
            .unwrap()
            .with_seed(1);
        assert_eq!(HomologousEnsemble::from_json(&e.to_json()).unwrap(), e);
        let ex = construct_adder_example(4, 2, 2).unwrap();
        assert_eq!(HomologousEnsemble::from_json(&ex.to_json()).unwrap(), ex);
    }
}
