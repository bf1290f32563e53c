//! Achievable rate regions as unions and intersections of half-space sets.
//!
//! Every region is downward closed: half-spaces have nonnegative
//! coefficients, so membership and radial extents compose through the tree.
//! Regions are closures, checked with a small tolerance. Rates are in bits.

use std::f64::consts::FRAC_PI_2;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_capacity, gaussian_quantize, ChannelSpec, TransformMap};
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, FieldSpec, Fq};
use crate::prob::{binary_entropy, Axis, JointPmf, Pmf};

/// Membership slack applied to every half-space.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Largest number of `k × k` matrices the family enumeration accepts.
pub const FAMILY_GUARD: f64 = (1u64 << 24) as f64;

/// Largest number of convex pieces produced when flattening a tree.
pub const PIECE_GUARD: usize = 1 << 16;

/// Box used to close unbounded pieces before taking hulls.
const HULL_BOX: f64 = 1e6;

/// `Σ_j coeffs[j] R_j ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl HalfSpace {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Result<Self> {
        let h = HalfSpace { coeffs, bound };
        h.validate()?;
        Ok(h)
    }

    /// `Σ_{j ∈ set} R_j ≤ bound`.
    pub fn sum_over(dim: usize, set: &[usize], bound: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; dim];
        for &j in set {
            if j >= dim {
                return Err(Error::DimensionMismatch(format!("sender {j} in a {dim}-sender region")));
            }
            coeffs[j] = 1.0;
        }
        HalfSpace::new(coeffs, bound)
    }

    fn validate(&self) -> Result<()> {
        if !self.bound.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite bound {}", self.bound)));
        }
        if self.coeffs.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "coefficients must be finite and nonnegative: {:?}",
                self.coeffs
            )));
        }
        Ok(())
    }

    fn dot(&self, r: &[f64]) -> f64 {
        self.coeffs.iter().zip(r).map(|(a, x)| a * x).sum()
    }

    /// Largest `t` with `t·dir` inside, for a nonnegative direction.
    fn extent(&self, dir: &[f64], tol: f64) -> f64 {
        let slope = self.dot(dir);
        if slope > 0.0 {
            self.bound / slope
        } else if self.bound >= -tol {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTree {
    Polytope(Vec<HalfSpace>),
    Union(Vec<RegionTree>),
    Intersection(Vec<RegionTree>),
}

impl RegionTree {
    fn contains(&self, r: &[f64], tol: f64) -> bool {
        match self {
            RegionTree::Polytope(hs) => hs.iter().all(|h| h.dot(r) <= h.bound + tol),
            RegionTree::Union(cs) => cs.iter().any(|c| c.contains(r, tol)),
            RegionTree::Intersection(cs) => cs.iter().all(|c| c.contains(r, tol)),
        }
    }

    fn extent(&self, dir: &[f64], tol: f64) -> f64 {
        match self {
            RegionTree::Polytope(hs) => hs
                .iter()
                .map(|h| h.extent(dir, tol))
                .fold(f64::INFINITY, f64::min),
            RegionTree::Union(cs) => cs
                .iter()
                .map(|c| c.extent(dir, tol))
                .fold(f64::NEG_INFINITY, f64::max),
            RegionTree::Intersection(cs) => cs
                .iter()
                .map(|c| c.extent(dir, tol))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn pieces(&self) -> Result<Vec<Vec<HalfSpace>>> {
        match self {
            RegionTree::Polytope(hs) => Ok(vec![hs.clone()]),
            RegionTree::Union(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    out.extend(c.pieces()?);
                    if out.len() > PIECE_GUARD {
                        return Err(piece_guard(out.len()));
                    }
                }
                Ok(out)
            }
            RegionTree::Intersection(cs) => {
                let mut acc: Vec<Vec<HalfSpace>> = vec![Vec::new()];
                for c in cs {
                    let next = c.pieces()?;
                    if acc.len() * next.len() > PIECE_GUARD {
                        return Err(piece_guard(acc.len() * next.len()));
                    }
                    acc = acc
                        .iter()
                        .flat_map(|a| {
                            next.iter().map(move |b| a.iter().chain(b).cloned().collect())
                        })
                        .collect();
                }
                Ok(acc)
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            RegionTree::Polytope(hs) => hs.iter().try_for_each(|h| {
                h.validate()?;
                if h.coeffs.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "half-space with {} coefficients in a {dim}-sender region",
                        h.coeffs.len()
                    )));
                }
                Ok(())
            }),
            RegionTree::Union(cs) | RegionTree::Intersection(cs) => {
                if cs.is_empty() {
                    return Err(Error::InvalidParameter("empty union or intersection".into()));
                }
                cs.iter().try_for_each(|c| c.validate(dim))
            }
        }
    }

    fn scale(&mut self, factor: f64) {
        match self {
            RegionTree::Polytope(hs) => hs.iter_mut().for_each(|h| h.bound *= factor),
            RegionTree::Union(cs) | RegionTree::Intersection(cs) => {
                cs.iter_mut().for_each(|c| c.scale(factor))
            }
        }
    }
}

fn piece_guard(size: usize) -> Error {
    Error::GuardExceeded {
        size: size as f64,
        limit: PIECE_GUARD as f64,
    }
}

/// A downward-closed set of rate tuples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRegion {
    pub dim: usize,
    pub tolerance: f64,
    pub tree: RegionTree,
}

impl RateRegion {
    pub fn new(dim: usize, tree: RegionTree) -> Result<Self> {
        let region = RateRegion {
            dim,
            tolerance: MEMBERSHIP_TOLERANCE,
            tree,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn polytope(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        RateRegion::new(dim, RegionTree::Polytope(halfspaces))
    }

    /// Polytope from `(coefficients, bound)` rows.
    pub fn from_rows(rows: &[(&[f64], f64)]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.0.len());
        let hs = rows
            .iter()
            .map(|(a, c)| HalfSpace::new(a.to_vec(), *c))
            .collect::<Result<Vec<_>>>()?;
        RateRegion::polytope(dim, hs)
    }

    /// The whole nonnegative orthant.
    pub fn unconstrained(dim: usize) -> Self {
        RateRegion {
            dim,
            tolerance: MEMBERSHIP_TOLERANCE,
            tree: RegionTree::Polytope(Vec::new()),
        }
    }

    pub fn union(parts: Vec<RateRegion>) -> Result<Self> {
        Self::combine(parts, RegionTree::Union)
    }

    pub fn intersection(parts: Vec<RateRegion>) -> Result<Self> {
        Self::combine(parts, RegionTree::Intersection)
    }

    fn combine(parts: Vec<RateRegion>, wrap: fn(Vec<RegionTree>) -> RegionTree) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("no regions to combine".into()))?
            .dim;
        if parts.iter().any(|p| p.dim != dim) {
            return Err(Error::DimensionMismatch("regions of different dimension".into()));
        }
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().expect("one part"));
        }
        RateRegion::new(dim, wrap(parts.into_iter().map(|p| p.tree).collect()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("region dimension must be positive".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!("bad tolerance {}", self.tolerance)));
        }
        self.tree.validate(self.dim)
    }

    pub fn contains(&self, r: &[f64]) -> bool {
        r.len() == self.dim && self.tree.contains(r, self.tolerance)
    }

    /// Largest `t` with `t·dir` inside; `dir` must be nonnegative.
    /// Negative when the ray meets the region nowhere.
    pub fn radial_extent(&self, dir: &[f64]) -> f64 {
        self.tree.extent(dir, self.tolerance)
    }

    /// Largest `t` with `(t, ..., t)` inside.
    pub fn symmetric_rate(&self) -> f64 {
        self.radial_extent(&vec![1.0; self.dim])
    }

    /// Flattens the tree into a union of polytopes.
    pub fn pieces(&self) -> Result<Vec<Vec<HalfSpace>>> {
        self.tree.pieces()
    }

    /// Divides every bound by `factor`, e.g. `log2 q` to move from bits to
    /// `q`-ary symbols.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("bad scale factor {factor}")));
        }
        let mut out = self.clone();
        out.tree.scale(1.0 / factor);
        Ok(out)
    }

    /// Vertices of every convex piece in two dimensions, clipped to the
    /// nonnegative quadrant.
    pub fn vertices(&self) -> Result<Vec<[f64; 2]>> {
        self.require_2d()?;
        let mut out = Vec::new();
        for piece in self.pieces()? {
            out.extend(polygon_vertices(&piece, self.tolerance));
        }
        Ok(out)
    }

    /// Points on the outer boundary along `samples` rays from the `R1` axis
    /// to the `R2` axis.
    pub fn trace_boundary(&self, samples: usize) -> Result<Vec<[f64; 2]>> {
        self.require_2d()?;
        let extents: Vec<f64> = ray_directions(samples)?
            .iter()
            .map(|d| self.radial_extent(d))
            .collect();
        rays_to_points(&extents)
    }

    fn require_2d(&self) -> Result<()> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch(format!(
                "operation needs a 2-sender region, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let region: RateRegion = serde_json::from_str(text)?;
        region.validate()?;
        Ok(region)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("regions serialize")
    }
}

fn ray_directions(samples: usize) -> Result<Vec<[f64; 2]>> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two boundary samples".into()));
    }
    Ok((0..samples)
        .map(|i| {
            let theta = FRAC_PI_2 * i as f64 / (samples - 1) as f64;
            // Snap the end rays onto the axes exactly.
            match i {
                0 => [1.0, 0.0],
                i if i == samples - 1 => [0.0, 1.0],
                _ => [theta.cos(), theta.sin()],
            }
        })
        .collect())
}

fn rays_to_points(extents: &[f64]) -> Result<Vec<[f64; 2]>> {
    let dirs = ray_directions(extents.len())?;
    dirs.iter()
        .zip(extents)
        .map(|(d, &t)| {
            if !t.is_finite() && t > 0.0 {
                return Err(Error::InvalidParameter("region is unbounded along a boundary ray".into()));
            }
            let t = t.max(0.0);
            Ok([t * d[0], t * d[1]])
        })
        .collect()
}

/// Boundary polyline as CSV with columns `R1,R2`.
pub fn boundary_csv(points: &[[f64; 2]]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["R1", "R2"])?;
    for p in points {
        w.write_record([p[0].to_string(), p[1].to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error().to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Vertices of `{a·R ≤ c} ∩ {R ≥ 0}` in two dimensions. Unbounded pieces
/// are closed with a large box first.
pub fn polygon_vertices(halfspaces: &[HalfSpace], tol: f64) -> Vec<[f64; 2]> {
    let mut lines: Vec<([f64; 2], f64)> = halfspaces.iter().map(|h| ([h.coeffs[0], h.coeffs[1]], h.bound)).collect();
    lines.push(([1.0, 0.0], HULL_BOX));
    lines.push(([0.0, 1.0], HULL_BOX));
    let mut bounds = lines.clone();
    bounds.push(([-1.0, 0.0], 0.0));
    bounds.push(([0.0, -1.0], 0.0));
    lines.push(([-1.0, 0.0], 0.0));
    lines.push(([0.0, -1.0], 0.0));
    let mut out = Vec::new();
    for (i, j) in (0..lines.len()).tuple_combinations() {
        let ([a, b], c) = lines[i];
        let ([d, e], f) = lines[j];
        let det = a * e - b * d;
        if det.abs() < 1e-15 {
            continue;
        }
        let x = (c * e - b * f) / det;
        let y = (a * f - c * d) / det;
        let slack = tol * (1.0 + x.abs() + y.abs());
        if bounds.iter().all(|(g, h)| g[0] * x + g[1] * y <= h + slack) {
            out.push([x.max(0.0), y.max(0.0)]);
        }
    }
    out
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

fn distance_to_polyline(p: [f64; 2], line: &[[f64; 2]]) -> f64 {
    match line.len() {
        0 => f64::INFINITY,
        1 => point_segment_distance(p, line[0], line[0]),
        _ => line
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Hausdorff distance between two polylines, measured from their vertices
/// to the other polyline's segments.
pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one_way = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .map(|&p| distance_to_polyline(p, y))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// A symmetric rate achieved by one point, or by time sharing between two.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricRate {
    /// Bits per channel use.
    pub rate: f64,
    /// Grid points used, with their time-sharing weights.
    pub witnesses: Vec<(Vec<f64>, f64)>,
}

/// Largest `t` with `(t, t)` in the downward-closed convex hull of `points`.
/// Returns the rate and the indices and weights of the points that reach it.
pub fn hull_symmetric_rate(points: &[[f64; 2]]) -> Option<(f64, Vec<(usize, f64)>)> {
    // Pareto frontier, sorted by increasing R1 and decreasing R2.
    let mut order: Vec<usize> = (0..points.len())
        .filter(|&i| points[i][0] >= 0.0 && points[i][1] >= 0.0)
        .collect();
    if order.is_empty() {
        return None;
    }
    order.sort_by(|&i, &j| {
        points[j][0]
            .total_cmp(&points[i][0])
            .then(points[j][1].total_cmp(&points[i][1]))
    });
    let mut frontier: Vec<usize> = Vec::new();
    let mut best_y = f64::NEG_INFINITY;
    for i in order {
        if points[i][1] > best_y {
            best_y = points[i][1];
            frontier.push(i);
        }
    }
    frontier.reverse();
    // Upper concave chain over the frontier.
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<usize> = Vec::new();
    for i in frontier {
        while hull.len() >= 2 {
            let (o, a) = (points[hull[hull.len() - 2]], points[hull[hull.len() - 1]]);
            if cross(o, a, points[i]) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // Along the chain, R1 - R2 increases; find where it crosses zero.
    let gap = |i: usize| points[i][0] - points[i][1];
    let first = hull[0];
    if gap(first) >= 0.0 {
        // Every hull point is on or below the diagonal; the leftmost one
        // limits through its R2 coordinate projected onto the R2 axis.
        return Some((points[first][1], vec![(first, 1.0)]));
    }
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if gap(b) >= 0.0 {
            let lambda = gap(b) / (gap(b) - gap(a));
            let t = lambda * points[a][0] + (1.0 - lambda) * points[b][0];
            if lambda <= 0.0 {
                return Some((t, vec![(b, 1.0)]));
            }
            return Some((t, vec![(a, lambda), (b, 1.0 - lambda)]));
        }
    }
    let last = *hull.last().expect("nonempty hull");
    Some((points[last][0], vec![(last, 1.0)]))
}

/// Information quantities of a two-sender, one-receiver channel under
/// independent inputs, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairInfo {
    /// `H(X1)`, `H(X2)`.
    pub h1: f64,
    pub h2: f64,
    /// `H(Y)`, `H(Y|X1)`, `H(Y|X2)`, `H(Y|X1,X2)`.
    pub hy: f64,
    pub hy_given1: f64,
    pub hy_given2: f64,
    pub hy_given12: f64,
    /// `H(X1|Y)`, `H(X2|Y)` from the input-output tables.
    pub h1_given_y: f64,
    pub h2_given_y: f64,
}

fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

impl PairInfo {
    pub fn compute(c: &ChannelSpec, p1: &Pmf, p2: &Pmf) -> Result<Self> {
        if c.k() != 2 || c.r() != 1 {
            return Err(Error::InvalidChannel(format!(
                "need 2 senders and 1 receiver, got {} and {}",
                c.k(),
                c.r()
            )));
        }
        let sizes = c.input_sizes();
        if p1.len() != sizes[0] || p2.len() != sizes[1] {
            return Err(Error::InvalidChannel("input pmfs do not match the input alphabets".into()));
        }
        let ny = c.num_outputs();
        let (n1, n2) = (sizes[0], sizes[1]);
        let mut y_x1 = vec![0.0; n1 * ny];
        let mut y_x2 = vec![0.0; n2 * ny];
        let mut hy_given12 = 0.0;
        for a in 0..n1 {
            for b in 0..n2 {
                let w = c.row(&[a, b]);
                let (pa, pb) = (p1.prob(a), p2.prob(b));
                for (y, &t) in w.iter().enumerate() {
                    y_x1[a * ny + y] += pb * t;
                    y_x2[b * ny + y] += pa * t;
                }
                if pa * pb > 0.0 {
                    hy_given12 += pa * pb * entropy_bits(w);
                }
            }
        }
        let conditional = |table: &[f64], p: &Pmf| -> f64 {
            table
                .chunks(ny)
                .enumerate()
                .filter(|(x, _)| p.prob(*x) > 0.0)
                .map(|(x, row)| p.prob(x) * entropy_bits(row))
                .sum()
        };
        let mut py = vec![0.0; ny];
        for a in 0..n1 {
            for y in 0..ny {
                py[y] += p1.prob(a) * y_x1[a * ny + y];
            }
        }
        let hy = entropy_bits(&py);
        // H(X|Y) = H(X, Y) - H(Y) from the joint tables.
        let joint_entropy = |table: &[f64], p: &Pmf| -> f64 {
            let cells: Vec<f64> = table
                .chunks(ny)
                .enumerate()
                .flat_map(|(x, row)| row.iter().map(move |&t| p.prob(x) * t))
                .collect();
            entropy_bits(&cells)
        };
        Ok(PairInfo {
            h1: p1.entropy(2.0),
            h2: p2.entropy(2.0),
            hy,
            hy_given1: conditional(&y_x1, p1),
            hy_given2: conditional(&y_x2, p2),
            hy_given12,
            h1_given_y: (joint_entropy(&y_x1, p1) - hy).max(0.0),
            h2_given_y: (joint_entropy(&y_x2, p2) - hy).max(0.0),
        })
    }

    /// `I(X1;Y)`.
    pub fn i1(&self) -> f64 {
        (self.hy - self.hy_given1).max(0.0)
    }

    /// `I(X2;Y)`.
    pub fn i2(&self) -> f64 {
        (self.hy - self.hy_given2).max(0.0)
    }

    /// `I(X1;Y|X2)`.
    pub fn i1_given2(&self) -> f64 {
        (self.hy_given2 - self.hy_given12).max(0.0)
    }

    /// `I(X2;Y|X1)`.
    pub fn i2_given1(&self) -> f64 {
        (self.hy_given1 - self.hy_given12).max(0.0)
    }

    /// `I(X1,X2;Y)`.
    pub fn i12(&self) -> f64 {
        (self.hy - self.hy_given12).max(0.0)
    }

    /// The pentagon `R1 ≤ I(X1;Y|X2)`, `R2 ≤ I(X2;Y|X1)`, `R1+R2 ≤ I(X1,X2;Y)`.
    pub fn mac(&self) -> Result<RateRegion> {
        RateRegion::from_rows(&[
            (&[1.0, 0.0], self.i1_given2()),
            (&[0.0, 1.0], self.i2_given1()),
            (&[1.0, 1.0], self.i12()),
        ])
    }

    /// Shaping region: `R1` below `max{I(X1;Y), H1 - H2 + I(X2;Y)}` or `R2`
    /// below the mirrored bound, with entropies `h1`, `h2` supplied so the
    /// virtual-input variant can reuse it.
    fn shaping_with(&self, h1: f64, h2: f64) -> Result<RateRegion> {
        let c1 = self.i1().max(h1 - h2 + self.i2());
        let c2 = self.i2().max(h2 - h1 + self.i1());
        one_coordinate_union(c1, c2)
    }

    pub fn shaping(&self) -> Result<RateRegion> {
        self.shaping_with(self.h1, self.h2)
    }

    /// The same region written as
    /// `min{R1 + H2, R2 + H1} ≤ H1 + H2 - min{H(X1|Y), H(X2|Y)}`.
    pub fn shaping_min_form(&self) -> Result<RateRegion> {
        let m = self.h1_given_y.min(self.h2_given_y);
        one_coordinate_union(self.h1 - m, self.h2 - m)
    }

    /// `min(R1, R2) ≤ max{I(X1;Y), I(X2;Y)}`.
    pub fn transform(&self) -> Result<RateRegion> {
        let t = self.i1().max(self.i2());
        one_coordinate_union(t, t)
    }
}

/// `{R1 ≤ c1} ∪ {R2 ≤ c2}` in two dimensions.
fn one_coordinate_union(c1: f64, c2: f64) -> Result<RateRegion> {
    RateRegion::union(vec![
        RateRegion::from_rows(&[(&[1.0, 0.0], c1)])?,
        RateRegion::from_rows(&[(&[0.0, 1.0], c2)])?,
    ])
}

fn require_single_receiver(c: &ChannelSpec) -> Result<()> {
    if c.r() != 1 {
        return Err(Error::InvalidChannel(format!(
            "expected a single receiver, got {}; select one with receiver()",
            c.r()
        )));
    }
    Ok(())
}

fn require_two_senders(c: &ChannelSpec) -> Result<()> {
    if c.k() != 2 {
        return Err(Error::InvalidChannel(format!("expected 2 senders, got {}", c.k())));
    }
    Ok(())
}

fn subsets(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << k)).map(move |mask| (0..k).filter(|j| mask >> j & 1 == 1).collect())
}

/// `Σ_{j∈S} R_j ≤ I(X_S; Y | X_{S^c})` for every nonempty `S`.
pub fn mac_region(c: &ChannelSpec, pmfs: &[Pmf]) -> Result<RateRegion> {
    require_single_receiver(c)?;
    let k = c.k();
    let joint = c.joint(pmfs)?;
    let y = [k];
    let hs = subsets(k)
        .map(|s| {
            let rest: Vec<usize> = (0..k).filter(|j| !s.contains(j)).collect();
            let bound = joint.mutual_information(&s, &y, &rest, 2.0)?;
            HalfSpace::sum_over(k, &s, bound)
        })
        .collect::<Result<Vec<_>>>()?;
    RateRegion::polytope(k, hs)
}

/// Union of the two single-coordinate constraints that shaping adds.
pub fn shaping_region(c: &ChannelSpec, pmfs: &[Pmf]) -> Result<RateRegion> {
    require_two_senders(c)?;
    PairInfo::compute(c, &pmfs[0], &pmfs[1])?.shaping()
}

/// The shaping constraint in its equivalent min form.
pub fn shaping_region_min_form(c: &ChannelSpec, pmfs: &[Pmf]) -> Result<RateRegion> {
    require_two_senders(c)?;
    PairInfo::compute(c, &pmfs[0], &pmfs[1])?.shaping_min_form()
}

/// The constraint added by coset codes over a transformed channel.
pub fn transform_region(c: &ChannelSpec, pmfs: &[Pmf]) -> Result<RateRegion> {
    require_two_senders(c)?;
    PairInfo::compute(c, &pmfs[0], &pmfs[1])?.transform()
}

/// Shaping over virtual inputs `U_j` mapped to the channel by `maps`:
/// entropies are those of `U`, mutual informations those of `X = φ(U)`.
pub fn combined_region(c: &ChannelSpec, u_pmfs: &[Pmf], maps: &TransformMap) -> Result<RateRegion> {
    require_two_senders(c)?;
    let x = push_forward(c, u_pmfs, maps)?;
    let info = PairInfo::compute(c, &x[0], &x[1])?;
    info.shaping_with(u_pmfs[0].entropy(2.0), u_pmfs[1].entropy(2.0))
}

fn push_forward(c: &ChannelSpec, u_pmfs: &[Pmf], maps: &TransformMap) -> Result<Vec<Pmf>> {
    if u_pmfs.len() != c.k() || maps.maps.len() != c.k() {
        return Err(Error::InvalidParameter("one virtual pmf and one map per sender".into()));
    }
    let sizes = c.input_sizes();
    for (j, (p, m)) in u_pmfs.iter().zip(&maps.maps).enumerate() {
        if p.len() != m.len() {
            return Err(Error::InvalidParameter(format!(
                "sender {}: pmf over {} symbols, map over {}",
                j + 1,
                p.len(),
                m.len()
            )));
        }
        if m.iter().any(|&x| x >= sizes[j]) {
            return Err(Error::InvalidParameter(format!("sender {}: map leaves the input alphabet", j + 1)));
        }
    }
    maps.push_forward(u_pmfs, &sizes)
}

/// Rates at which a receiver recovers `a1 U1 + a2 U2`:
/// `R_j ≤ H(U_j) - H(a1 U1 + a2 U2 | Y)`.
pub fn computation_region(
    c: &ChannelSpec,
    u_pmfs: &[Pmf],
    maps: &TransformMap,
    field: &FieldSpec,
    coeffs: [Fq; 2],
) -> Result<RateRegion> {
    require_single_receiver(c)?;
    require_two_senders(c)?;
    push_forward(c, u_pmfs, maps)?;
    let q = field.order();
    if u_pmfs.iter().any(|p| p.len() != q) {
        return Err(Error::FieldMismatch(format!("virtual pmfs must be over GF({q})")));
    }
    let joint = c.transform(maps)?.joint(u_pmfs)?;
    let joint = joint.with_derived_axis(Axis::indexed("S", q), |t| {
        let a = field.mul(coeffs[0], Fq(t[0] as u32));
        let b = field.mul(coeffs[1], Fq(t[1] as u32));
        field.add(a, b).index()
    })?;
    let h_sum_given_y = joint.conditional_entropy(&[3], &[2], 2.0)?;
    RateRegion::from_rows(&[
        (&[1.0, 0.0], u_pmfs[0].entropy(2.0) - h_sum_given_y),
        (&[0.0, 1.0], u_pmfs[1].entropy(2.0) - h_sum_given_y),
    ])
}

/// Which rank-deficient matrices a family collects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    /// Every rank-deficient matrix.
    RankDeficient,
    /// Rank-deficient and not row equivalent to a diagonal matrix.
    NonDiagonal,
}

/// One matrix per row space, each in reduced row echelon form padded with
/// zero rows to `k × k`.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    pub k: usize,
    pub field: FieldSpec,
    pub kind: MatrixKind,
    pub representatives: Vec<FieldMatrix>,
}

/// Whether a row space is spanned by standard basis vectors, given its
/// reduced basis.
fn axis_aligned(basis: &FieldMatrix) -> bool {
    (0..basis.rows()).all(|r| basis.row(r).iter().filter(|a| !a.is_zero()).count() == 1)
}

pub fn matrix_family(k: usize, field: &FieldSpec, kind: MatrixKind) -> Result<MatrixFamily> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let size = (field.order() as f64).powi((k * k) as i32);
    if size > FAMILY_GUARD {
        return Err(Error::GuardExceeded {
            size,
            limit: FAMILY_GUARD,
        });
    }
    let q = field.order();
    let mut reps = Vec::new();
    for rank in 0..k {
        for pivots in (0..k).combinations(rank) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &p)| {
                    (p + 1..k)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (r, c))
                        .collect::<Vec<_>>()
                })
                .collect();
            let count = q.pow(free.len() as u32);
            for code in 0..count {
                let mut m = FieldMatrix::zeros(field, k, k);
                for (r, &p) in pivots.iter().enumerate() {
                    m.set(r, p, Fq::ONE);
                }
                for (pos, &(r, c)) in free.iter().enumerate() {
                    m.set(r, c, Fq(((code / q.pow(pos as u32)) % q) as u32));
                }
                let basis = m.select_rows(&(0..rank).collect::<Vec<_>>());
                if kind == MatrixKind::NonDiagonal && axis_aligned(&basis) {
                    continue;
                }
                reps.push(m);
            }
        }
    }
    Ok(MatrixFamily {
        k,
        field: field.clone(),
        kind,
        representatives: reps,
    })
}

/// Index sets `S` of size `k - rank(A)` whose standard basis rows complete
/// `A` to full rank. Indices are 0-based.
pub fn completion_sets(a: &FieldMatrix) -> Result<Vec<Vec<usize>>> {
    let k = a.cols();
    if a.rows() != k {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{k}", a.rows())));
    }
    let rank = a.rank();
    if rank == k {
        return Err(Error::FullRank);
    }
    let field = a.field();
    let mut out = Vec::new();
    for s in (0..k).combinations(k - rank) {
        let rows: Vec<Vec<Fq>> = s
            .iter()
            .map(|&j| (0..k).map(|c| if c == j { Fq::ONE } else { Fq::ZERO }).collect())
            .collect();
        let stacked = a.vstack(&FieldMatrix::from_rows(field, k, &rows)?)?;
        if stacked.rank() == k {
            out.push(s);
        }
    }
    Ok(out)
}

fn check_field_inputs(c: &ChannelSpec, pmfs: &[Pmf], field: &FieldSpec) -> Result<()> {
    let q = field.order();
    if c.input_sizes().iter().any(|&s| s != q) || pmfs.iter().any(|p| p.len() != q) {
        return Err(Error::FieldMismatch(format!("inputs must be over GF({q})")));
    }
    if pmfs.len() != c.k() {
        return Err(Error::InvalidParameter(format!("{} pmfs for {} senders", pmfs.len(), c.k())));
    }
    Ok(())
}

/// Joint law of `X1..Xk, Y, W` with `W = B [X1 .. Xk]^T` for the reduced
/// basis `B` of the row space of `a`.
fn joint_with_combination(joint: &JointPmf, a: &FieldMatrix) -> Result<JointPmf> {
    let field = a.field().clone();
    let k = a.cols();
    let (basis, pivots) = a.rref();
    let basis = basis.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
    let size = field.order().pow(pivots.len() as u32);
    joint.with_derived_axis(Axis::indexed("W", size), move |t| {
        let x: Vec<Fq> = t[..k].iter().map(|&s| Fq(s as u32)).collect();
        let w: Vec<Fq> = (0..basis.rows())
            .map(|r| {
                basis
                    .row(r)
                    .iter()
                    .zip(&x)
                    .fold(Fq::ZERO, |acc, (&g, &v)| field.add(acc, field.mul(g, v)))
            })
            .collect();
        field.vector_index(&w)
    })
}

/// Intersection over rank-deficient row spaces `A` of the union over
/// completion sets `S` of `Σ_{j∈S} R_j ≤ I(X_S; Y, W_A)`.
pub fn linear_combination_region(c: &ChannelSpec, pmfs: &[Pmf], field: &FieldSpec) -> Result<RateRegion> {
    require_single_receiver(c)?;
    check_field_inputs(c, pmfs, field)?;
    let k = c.k();
    let family = matrix_family(k, field, MatrixKind::RankDeficient)?;
    let joint = c.joint(pmfs)?;
    let mut parts = Vec::new();
    for a in &family.representatives {
        let extended = joint_with_combination(&joint, a)?;
        let branches = completion_sets(a)?
            .into_iter()
            .map(|s| {
                let bound = extended.mutual_information(&s, &[k, k + 1], &[], 2.0)?;
                RateRegion::polytope(k, vec![HalfSpace::sum_over(k, &s, bound)?])
            })
            .collect::<Result<Vec<_>>>()?;
        parts.push(RateRegion::union(branches)?);
    }
    RateRegion::intersection(parts)
}

/// The pentagon intersected with, for every non-diagonal row space `A`, the
/// union over `S` of `Σ_{j∈S} R_j ≤ H(X_S) - min_J H(X_J | Y)`.
pub fn simplified_combination_region(c: &ChannelSpec, pmfs: &[Pmf], field: &FieldSpec) -> Result<RateRegion> {
    require_single_receiver(c)?;
    check_field_inputs(c, pmfs, field)?;
    let k = c.k();
    let family = matrix_family(k, field, MatrixKind::NonDiagonal)?;
    let joint = c.joint(pmfs)?;
    let mut parts = vec![mac_region(c, pmfs)?];
    for a in &family.representatives {
        let sets = completion_sets(a)?;
        let floor = sets
            .iter()
            .map(|j| joint.conditional_entropy(j, &[k], 2.0))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let branches = sets
            .iter()
            .map(|s| {
                let bound = joint.entropy(s, 2.0)? - floor;
                RateRegion::polytope(k, vec![HalfSpace::sum_over(k, s, bound)?])
            })
            .collect::<Result<Vec<_>>>()?;
        parts.push(RateRegion::union(branches)?);
    }
    RateRegion::intersection(parts)
}

/// `I(X1;Y)` of the binary erasure MAC with `X1 ~ Bern(x)`, `X2 ~ Bern(y)`,
/// in closed form, for `x, y ∈ [0, 1/2]`.
pub fn erasure_mi_closed_form(x: f64, y: f64) -> Result<f64> {
    if !((0.0..=0.5).contains(&x) && (0.0..=0.5).contains(&y)) {
        return Err(Error::InvalidParameter(format!("({x}, {y}) outside [0, 1/2]^2")));
    }
    let term = |w: f64, ratio: f64| -> f64 {
        if w == 0.0 || ratio == 0.0 {
            0.0
        } else {
            w * ratio.ln_1p() / std::f64::consts::LN_2
        }
    };
    let a = if x == 0.0 || y == 0.0 {
        0.0
    } else {
        term(y * (1.0 - x), x / (1.0 - x) * (1.0 - y) / y)
    };
    let b = if x == 0.0 || y == 0.0 {
        0.0
    } else {
        term(x * (1.0 - y), (1.0 - x) / x * y / (1.0 - y))
    };
    Ok(binary_entropy(x) - a - b)
}

/// Uniform grid over `[lo, hi]^dims` with spacing close to `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub dims: usize,
    pub lo: f64,
    pub hi: f64,
    pub delta: f64,
}

impl ParamGrid {
    pub fn new(dims: usize, lo: f64, hi: f64, delta: f64) -> Result<Self> {
        let g = ParamGrid { dims, lo, hi, delta };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.dims == 0 || !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::InvalidParameter(format!("empty grid {self:?}")));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {}", self.delta)));
        }
        let points = (self.steps() as f64 + 1.0).powi(self.dims as i32);
        if points > FAMILY_GUARD * 4.0 {
            return Err(Error::GuardExceeded {
                size: points,
                limit: FAMILY_GUARD * 4.0,
            });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.hi - self.lo) / self.delta).round().max(0.0) as usize
    }

    /// Coordinate values along one axis, endpoints included.
    pub fn axis(&self) -> Vec<f64> {
        let steps = self.steps();
        if steps == 0 {
            return vec![self.lo];
        }
        (0..=steps)
            .map(|i| {
                if i == steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / steps as f64
                }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        (self.steps() + 1).pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid point `index`, first coordinate slowest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let axis = self.axis();
        let n = axis.len();
        let mut p = vec![0.0; self.dims];
        for slot in p.iter_mut().rev() {
            *slot = axis[index % n];
            index /= n;
        }
        p
    }
}

/// Largest symmetric rate over the union of `build(point)` for every grid
/// point, optionally after time sharing between two-sender operating points.
pub fn symmetric_rate_max<F>(build: F, grid: &ParamGrid, convexify: bool) -> Result<SymmetricRate>
where
    F: Fn(&[f64]) -> Result<RateRegion> + Sync,
{
    grid.validate()?;
    if !convexify {
        let rates = (0..grid.len())
            .into_par_iter()
            .map(|i| build(&grid.point(i)).map(|r| r.symmetric_rate()))
            .collect::<Result<Vec<f64>>>()?;
        let (best, rate) = rates
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        return Ok(SymmetricRate {
            rate,
            witnesses: vec![(grid.point(best), 1.0)],
        });
    }
    let per_point = (0..grid.len())
        .into_par_iter()
        .map(|i| build(&grid.point(i)).and_then(|r| r.vertices()))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    let mut owner = Vec::new();
    for (i, vs) in per_point.into_iter().enumerate() {
        owner.extend(std::iter::repeat_n(i, vs.len()));
        points.extend(vs);
    }
    let (rate, used) = hull_symmetric_rate(&points)
        .ok_or_else(|| Error::InvalidParameter("no operating points in the nonnegative quadrant".into()))?;
    Ok(SymmetricRate {
        rate,
        witnesses: used.into_iter().map(|(i, w)| (grid.point(owner[i]), w)).collect(),
    })
}

/// Boundary of the union of `build(point)` over the grid, traced along
/// `samples` rays.
pub fn union_boundary<F>(build: F, grid: &ParamGrid, samples: usize) -> Result<Vec<[f64; 2]>>
where
    F: Fn(&[f64]) -> Result<RateRegion> + Sync,
{
    grid.validate()?;
    let dirs = ray_directions(samples)?;
    let extents = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let region = build(&grid.point(i))?;
            region.require_2d()?;
            Ok::<_, Error>(dirs.iter().map(|d| region.radial_extent(d)).collect::<Vec<f64>>())
        })
        .try_reduce(
            || vec![f64::NEG_INFINITY; samples],
            |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect()),
        )?;
    rays_to_points(&extents)
}

/// `R1 ≤ C(S1)`, `R2 ≤ C(S2)`, `R1 + R2 ≤ C(S1 + S2)` in bits.
pub fn gaussian_region(s1: f64, s2: f64) -> Result<RateRegion> {
    if !(s1 >= 0.0 && s2 >= 0.0 && s1.is_finite() && s2.is_finite()) {
        return Err(Error::InvalidParameter(format!("SNRs must be finite and nonnegative: ({s1}, {s2})")));
    }
    RateRegion::from_rows(&[
        (&[1.0, 0.0], gaussian_capacity(s1)),
        (&[0.0, 1.0], gaussian_capacity(s2)),
        (&[1.0, 1.0], gaussian_capacity(s1 + s2)),
    ])
}

/// Pentagon of the Gaussian MAC quantized to `2^j` input and `2^kq` output
/// levels, unit power and gains `sqrt(S_j)`.
pub fn quantized_gaussian_region(s1: f64, s2: f64, j: u32, kq: u32) -> Result<RateRegion> {
    gaussian_region(s1, s2)?;
    let qg = gaussian_quantize(1.0, s1.sqrt(), s2.sqrt(), j, kq)?;
    mac_region(&qg.channel, &[qg.input_pmf.clone(), qg.input_pmf])
}

/// Polygonal regions of the worked binary examples, unions over all inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// Shaping on the binary adder MAC; equals the capacity region.
    AdderShaping,
    ErasureShaping,
    ErasureTransform,
    OnOffShaping,
    OnOffTransform,
    /// Capacity region of the on-off erasure MAC.
    OnOffCapacity,
}

impl ClosedForm {
    pub fn parse(tag: &str) -> Result<Self> {
        Ok(match tag {
            "C" | "adder" | "adder-shaping" => ClosedForm::AdderShaping,
            "D-shaping" | "erasure-shaping" => ClosedForm::ErasureShaping,
            "D-transform" | "erasure-transform" => ClosedForm::ErasureTransform,
            "E-shaping" | "onoff-shaping" => ClosedForm::OnOffShaping,
            "E-transform" | "onoff-transform" => ClosedForm::OnOffTransform,
            "E-capacity" | "onoff-capacity" => ClosedForm::OnOffCapacity,
            other => return Err(Error::InvalidParameter(format!("unknown closed form {other:?}"))),
        })
    }
}

/// The closed-form region; `p` is the switch probability of the on-off
/// channel and is ignored otherwise. For `p ≤ 2/3` the on-off regions all
/// equal the capacity region.
pub fn closed_form_region(form: ClosedForm, p: f64) -> Result<RateRegion> {
    let onoff = matches!(
        form,
        ClosedForm::OnOffShaping | ClosedForm::OnOffTransform | ClosedForm::OnOffCapacity
    );
    if onoff && !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("switch probability {p} outside [0, 1]")));
    }
    let poly = |rows: &[(&[f64], f64)]| RateRegion::from_rows(rows);
    let trapezoid_pair = || -> Result<RateRegion> {
        RateRegion::union(vec![
            poly(&[(&[0.0, 1.0], 1.0), (&[2.0, 1.0], 2.0)])?,
            poly(&[(&[1.0, 0.0], 1.0), (&[1.0, 2.0], 2.0)])?,
        ])
    };
    let capacity = || poly(&[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], p), (&[1.0, 1.0], 1.0 + p / 2.0)]);
    match form {
        ClosedForm::AdderShaping => poly(&[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0), (&[1.0, 1.0], 1.0)]),
        ClosedForm::ErasureShaping | ClosedForm::ErasureTransform => trapezoid_pair(),
        ClosedForm::OnOffCapacity => capacity(),
        _ if p <= 2.0 / 3.0 => capacity(),
        ClosedForm::OnOffShaping => RateRegion::union(vec![
            poly(&[(&[0.0, 1.0], p), (&[2.0, 1.0], 2.0)])?,
            poly(&[
                (&[1.0, 0.0], 1.0),
                (&[0.0, 1.0], p),
                (&[1.0, 1.0], 1.0 + p / 2.0),
                (&[p / 2.0, 1.0], 1.0 - p / 2.0 + p * p / 2.0),
            ])?,
        ]),
        ClosedForm::OnOffTransform => RateRegion::union(vec![
            poly(&[(&[0.0, 1.0], p), (&[2.0, 1.0], 2.0)])?,
            poly(&[
                (&[1.0, 0.0], 1.0),
                (&[0.0, 1.0], 2.0 / 3.0),
                (&[1.0, 1.0], 1.0 + p / 2.0),
                (&[1.0, 2.0], 2.0),
            ])?,
            poly(&[(&[1.0, 0.0], p), (&[p / 2.0, 1.0], p)])?,
        ]),
    }
}

/// Coding technique whose region a builder evaluates at a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    /// Random i.i.d. codes: the pentagon alone.
    Mac,
    /// Homologous codes with shaping.
    Shaping,
    /// Coset codes over a transformed channel.
    Transform,
    /// Homologous codes over GF(4) with the parity map; one parameter.
    Combined,
    /// The row-space intersection over GF(2).
    Prop4,
}

impl Technique {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "mac" | "rmac" => Technique::Mac,
            "shaping" => Technique::Shaping,
            "transform" => Technique::Transform,
            "combined" => Technique::Combined,
            "prop4" | "linear" => Technique::Prop4,
            other => return Err(Error::InvalidParameter(format!("unknown technique {other:?}"))),
        })
    }

    /// Number of grid coordinates the builder reads.
    pub fn params(self) -> usize {
        match self {
            Technique::Combined => 1,
            _ => 2,
        }
    }

    /// Default grid domain per coordinate.
    pub fn domain(self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// Virtual inputs over GF(4): `U1` uniform and `U2` with masses
/// `((1-γ)/2, (1-γ)/2, γ/2, γ/2)` on `0, 1, α, α+1`. Both map to bits
/// through the parity map, giving uniform bits.
pub fn combined_family(gamma: f64) -> Result<(Vec<Pmf>, TransformMap)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1]")));
    }
    let u1 = Pmf::uniform(4)?;
    let u2 = Pmf::indexed(vec![(1.0 - gamma) / 2.0, (1.0 - gamma) / 2.0, gamma / 2.0, gamma / 2.0])?;
    Ok((vec![u1, u2], TransformMap::parity(4, 2)))
}

fn require_binary_pair(c: &ChannelSpec) -> Result<()> {
    require_two_senders(c)?;
    if c.input_sizes() != [2, 2] {
        return Err(Error::InvalidChannel("technique builders need binary inputs".into()));
    }
    Ok(())
}

fn bernoulli_pair(params: &[f64]) -> Result<Vec<Pmf>> {
    if params.len() != 2 {
        return Err(Error::InvalidParameter(format!("expected 2 parameters, got {}", params.len())));
    }
    params.iter().map(|&a| Pmf::bernoulli(a)).collect()
}

/// Evaluates one technique's region at grid points of a binary two-sender
/// channel, intersected over receivers. Pentagon-based techniques read
/// `(α, β)` Bernoulli parameters; the combined technique reads `γ`.
#[derive(Clone, Debug)]
pub struct TechniqueBuilder {
    receivers: Vec<ChannelSpec>,
    technique: Technique,
}

impl TechniqueBuilder {
    pub fn new(c: &ChannelSpec, technique: Technique) -> Result<Self> {
        require_binary_pair(c)?;
        let receivers = (0..c.r()).map(|i| c.receiver(i)).collect::<Result<Vec<_>>>()?;
        Ok(TechniqueBuilder { receivers, technique })
    }

    pub fn technique(&self) -> Technique {
        self.technique
    }

    pub fn build(&self, params: &[f64]) -> Result<RateRegion> {
        if params.len() != self.technique.params() {
            return Err(Error::InvalidParameter(format!(
                "{:?} takes {} parameters, got {}",
                self.technique,
                self.technique.params(),
                params.len()
            )));
        }
        let parts = self
            .receivers
            .iter()
            .map(|rc| self.build_one(rc, params))
            .collect::<Result<Vec<_>>>()?;
        RateRegion::intersection(parts)
    }

    fn build_one(&self, rc: &ChannelSpec, params: &[f64]) -> Result<RateRegion> {
        match self.technique {
            Technique::Combined => {
                let (u, maps) = combined_family(params[0])?;
                let x = push_forward(rc, &u, &maps)?;
                RateRegion::intersection(vec![
                    PairInfo::compute(rc, &x[0], &x[1])?.mac()?,
                    combined_region(rc, &u, &maps)?,
                ])
            }
            Technique::Prop4 => linear_combination_region(rc, &bernoulli_pair(params)?, &FieldSpec::binary()),
            t => {
                let x = bernoulli_pair(params)?;
                let info = PairInfo::compute(rc, &x[0], &x[1])?;
                match t {
                    Technique::Mac => info.mac(),
                    Technique::Shaping => RateRegion::intersection(vec![info.mac()?, info.shaping()?]),
                    _ => RateRegion::intersection(vec![info.mac()?, info.transform()?]),
                }
            }
        }
    }
}

/// One-off evaluation of [`TechniqueBuilder::build`].
pub fn technique_region(c: &ChannelSpec, technique: Technique, params: &[f64]) -> Result<RateRegion> {
    TechniqueBuilder::new(c, technique)?.build(params)
}

/// First receiver computes `U1 + U2` over GF(4); the others decode both
/// messages with the combined technique.
pub fn compute_communicate_region(c: &ChannelSpec, gamma: f64) -> Result<RateRegion> {
    require_binary_pair(c)?;
    if c.r() < 2 {
        return Err(Error::InvalidChannel("need a computing receiver and at least one more".into()));
    }
    let (u, maps) = combined_family(gamma)?;
    let field = FieldSpec::new(2, 2)?;
    let mut parts = vec![computation_region(&c.receiver(0)?, &u, &maps, &field, [Fq::ONE, Fq::ONE])?];
    for i in 1..c.r() {
        let rc = c.receiver(i)?;
        let x = push_forward(&rc, &u, &maps)?;
        parts.push(PairInfo::compute(&rc, &x[0], &x[1])?.mac()?);
        parts.push(combined_region(&rc, &u, &maps)?);
    }
    RateRegion::intersection(parts)
}
