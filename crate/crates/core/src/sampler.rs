//! One-to-many mapping from a target color to its equivalence class of
//! basis weight vectors.
//!
//! A target chromaticity `c` is written in generalized homogeneous barycentric
//! coordinates `a` of the basis chromaticities `b_k`. Picking a triangle of
//! bases that encloses `c` gives one solution `[a_T, 0]`; the remaining `K - 3`
//! coordinates `a_F` are degrees of freedom, offset on the triangle by
//! `Δa = M a_F` with `M = T⁻¹ F`. Each barycentric vector then fixes a line of
//! weight vectors along which the target luminance is sought.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::PuBasis;
use crate::colorimetry::Chromaticity;
use crate::error::{Error, Result};
use crate::lp;

/// Point-in-triangle and gamut-boundary tolerance.
pub const TRIANGLE_TOL: f64 = 1e-9;
/// Chromaticity agreement required of every class member.
pub const CHROMATICITY_TOL: f64 = 1e-6;
/// Luminance agreement for `luminance_met`.
pub const LUMINANCE_TOL: f64 = 1e-6;
/// Determinant below which a triangle is degenerate.
pub const DEGENERATE_DET: f64 = 1e-12;

/// Target chromaticity and luminance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorTarget {
    pub chromaticity: Chromaticity,
    pub luminance: f64,
}

impl ColorTarget {
    /// `luminance` must lie in `[0, 1]`; zero is accepted only for
    /// feasibility queries.
    pub fn new(x: f64, y: f64, luminance: f64) -> Result<Self> {
        if !(x >= 0.0 && y > 0.0 && x + y <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}) is not a valid chromaticity"
            )));
        }
        if !(0.0..=1.0).contains(&luminance) {
            return Err(Error::InvalidParameter(format!(
                "target luminance {luminance} is outside [0, 1]"
            )));
        }
        Ok(ColorTarget {
            chromaticity: Chromaticity::new(x, y),
            luminance,
        })
    }
}

/// Which enclosing triangle seeds each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum TrianglePolicy {
    /// The enclosing triangle with the largest area.
    #[default]
    Largest,
    /// The first triangle in lexicographic index order.
    First,
    /// A uniformly random enclosing triangle per sample.
    Random,
    /// The `n`-th triangle of the enumeration.
    Fixed(usize),
}

/// Visiting order of the degrees of freedom during sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DofOrder {
    /// Fresh uniform permutation per sample.
    #[default]
    Shuffled,
    /// `a_3, a_4, …` in index order.
    Sequential,
}

/// Homogeneous barycentric coordinates of the barycentric triangle.
fn triangle_barycentric(p: [Chromaticity; 3], c: Chromaticity) -> [f64; 3] {
    let det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    let l1 = ((c.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (c.y - p[0].y)) / det;
    let l2 = ((p[1].x - p[0].x) * (c.y - p[0].y) - (c.x - p[0].x) * (p[1].y - p[0].y)) / det;
    [1.0 - l1 - l2, l1, l2]
}

fn triangle_area(p: [Chromaticity; 3]) -> f64 {
    0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y)).abs()
}

/// Checks that `c` is strictly inside the reachable gamut (the convex hull of
/// the basis chromaticities).
pub fn check_in_gamut(basis: &PuBasis, c: Chromaticity) -> Result<()> {
    let hull = basis.reachable_hull();
    if !hull.contains(c, TRIANGLE_TOL) {
        return Err(Error::OutOfGamut { x: c.x, y: c.y });
    }
    if hull.boundary_distance(c) <= TRIANGLE_TOL {
        let (first, second) = boundary_pair(basis, c);
        return Err(Error::BoundarySingular {
            x: c.x,
            y: c.y,
            first,
            second,
        });
    }
    Ok(())
}

/// Basis indices of the hull edge closest to `c`.
fn boundary_pair(basis: &PuBasis, c: Chromaticity) -> (usize, usize) {
    let b = basis.chromaticities();
    let hull = basis.reachable_hull();
    let index_of = |p: Chromaticity| b.iter().position(|q| *q == p).unwrap_or(0);
    let (a, e) = hull
        .edges()
        .min_by(|(a1, b1), (a2, b2)| {
            crate::colorimetry::segment_distance(c, *a1, *b1)
                .total_cmp(&crate::colorimetry::segment_distance(c, *a2, *b2))
        })
        .expect("hull has edges");
    let (i, j) = (index_of(a), index_of(e));
    (i.min(j), i.max(j))
}

/// All index triples (lexicographic) whose triangle contains `c`,
/// edge-inclusive within [`TRIANGLE_TOL`], skipping degenerate triangles.
pub fn enclosing_triangles(basis: &PuBasis, c: Chromaticity) -> Result<Vec<[usize; 3]>> {
    check_in_gamut(basis, c)?;
    let b = basis.chromaticities();
    let k = b.len();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                let p = [b[i], b[j], b[l]];
                if 2.0 * triangle_area(p) < DEGENERATE_DET {
                    continue;
                }
                if triangle_barycentric(p, c).iter().all(|v| *v >= -TRIANGLE_TOL) {
                    out.push([i, j, l]);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::OutOfGamut { x: c.x, y: c.y });
    }
    Ok(out)
}

/// The triangle/free-column split of the barycentric system for one
/// enclosing triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleDecomposition {
    /// Basis indices of the triangle.
    pub indices: [usize; 3],
    /// Basis indices of the degrees of freedom, in basis order.
    pub free: Vec<usize>,
    /// Homogeneous triangle columns `[1, b_x, b_y]`, stored row-major.
    pub t: [[f64; 3]; 3],
    /// Homogeneous columns of the free bases.
    pub f: Vec<[f64; 3]>,
    /// Columns of `M = T⁻¹ F`.
    pub m: Vec<[f64; 3]>,
    /// Triangular barycentric coordinates of the target.
    pub a_t: [f64; 3],
}

fn invert3(t: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let det = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
        + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    if !(det.abs() >= DEGENERATE_DET) {
        return Err(Error::DegenerateTriangle { det });
    }
    let inv = [
        [
            (t[1][1] * t[2][2] - t[1][2] * t[2][1]) / det,
            (t[0][2] * t[2][1] - t[0][1] * t[2][2]) / det,
            (t[0][1] * t[1][2] - t[0][2] * t[1][1]) / det,
        ],
        [
            (t[1][2] * t[2][0] - t[1][0] * t[2][2]) / det,
            (t[0][0] * t[2][2] - t[0][2] * t[2][0]) / det,
            (t[0][2] * t[1][0] - t[0][0] * t[1][2]) / det,
        ],
        [
            (t[1][0] * t[2][1] - t[1][1] * t[2][0]) / det,
            (t[0][1] * t[2][0] - t[0][0] * t[2][1]) / det,
            (t[0][0] * t[1][1] - t[0][1] * t[1][0]) / det,
        ],
    ];
    Ok(inv)
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
}

fn homogeneous(c: Chromaticity) -> [f64; 3] {
    [1.0, c.x, c.y]
}

/// Splits the barycentric system for `triple` and solves for `a_T` and `M`.
pub fn decompose(basis: &PuBasis, triple: [usize; 3], c: Chromaticity) -> Result<TriangleDecomposition> {
    let count = basis.count();
    if let Some(&bad) = triple.iter().find(|&&i| i >= count) {
        return Err(Error::IndexOutOfRange { index: bad, len: count });
    }
    if triple[0] == triple[1] || triple[1] == triple[2] || triple[0] == triple[2] {
        return Err(Error::DegenerateTriangle { det: 0.0 });
    }
    let b = basis.chromaticities();
    let cols = triple.map(|i| homogeneous(b[i]));
    let t: [[f64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|col| cols[col][r]));
    let inv = invert3(&t)?;
    let a_t = mat_vec(&inv, homogeneous(c));
    let free: Vec<usize> = (0..count).filter(|i| !triple.contains(i)).collect();
    let f: Vec<[f64; 3]> = free.iter().map(|&i| homogeneous(b[i])).collect();
    let m = f.iter().map(|col| mat_vec(&inv, *col)).collect();
    Ok(TriangleDecomposition {
        indices: triple,
        free,
        t,
        f,
        m,
        a_t,
    })
}

impl TriangleDecomposition {
    /// Number of degrees of freedom, `K - 3`.
    pub fn dof_count(&self) -> usize {
        self.free.len()
    }

    /// `M a_F`.
    pub fn offset(&self, a_f: &[f64]) -> [f64; 3] {
        let mut d = [0.0; 3];
        for (col, a) in self.m.iter().zip(a_f) {
            for r in 0..3 {
                d[r] += col[r] * a;
            }
        }
        d
    }

    /// Twice the triangle area in chromaticity space.
    pub fn det(&self) -> f64 {
        let t = &self.t;
        t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
            + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])
    }
}

/// Largest admissible value of degree of freedom `n` given the values of the
/// others in `a_f` (entry `n` is ignored). Negative bounds clamp to zero.
pub fn dof_upper_bound(d: &TriangleDecomposition, a_f: &[f64], n: usize) -> f64 {
    let mut bound = 1.0f64;
    for i in 0..3 {
        let m_in = d.m[n][i];
        if m_in.abs() <= 1e-15 {
            continue;
        }
        let rest: f64 =
            d.m.iter()
                .zip(a_f)
                .enumerate()
                .filter(|(l, _)| *l != n)
                .map(|(_, (col, a))| col[i] * a)
                .sum();
        let heaviside = if m_in > 0.0 { 1.0 } else { 0.0 };
        bound = bound.min((d.a_t[i] + heaviside - 1.0 - rest) / m_in);
    }
    bound.max(0.0)
}

/// Draws the degrees of freedom one at a time, each uniform on
/// `[0, dof_upper_bound]` given those already drawn (undrawn ones at zero).
pub fn sample_dof<R: Rng + ?Sized>(d: &TriangleDecomposition, rng: &mut R, order: DofOrder) -> Vec<f64> {
    let n = d.dof_count();
    let mut visit: Vec<usize> = (0..n).collect();
    if order == DofOrder::Shuffled {
        visit.shuffle(rng);
    }
    let mut a_f = vec![0.0; n];
    for idx in visit {
        let ub = dof_upper_bound(d, &a_f, idx);
        a_f[idx] = if ub > 0.0 { rng.random::<f64>() * ub } else { 0.0 };
    }
    a_f
}

/// Generalized homogeneous barycentric coordinates, one per basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BaryVector(pub Vec<f64>);

impl BaryVector {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// `Σ_k a_k b_k`.
    pub fn chromaticity(&self, basis: &PuBasis) -> Chromaticity {
        let (x, y) = self
            .0
            .iter()
            .zip(basis.chromaticities())
            .fold((0.0, 0.0), |(x, y), (a, b)| (x + a * b.x, y + a * b.y));
        Chromaticity::new(x, y)
    }
}

/// `a = [a_T - M a_F (triangle), a_F (free)]` in basis order.
pub fn bary_from_dof(d: &TriangleDecomposition, a_f: &[f64]) -> Result<BaryVector> {
    if a_f.len() != d.dof_count() {
        return Err(Error::LengthMismatch {
            expected: d.dof_count(),
            found: a_f.len(),
        });
    }
    let tol = 1e-9;
    if let Some(v) = a_f.iter().find(|v| !(**v >= -tol && **v <= 1.0 + tol)) {
        return Err(Error::Infeasible(format!("degree of freedom {v} outside [0, 1]")));
    }
    let delta = d.offset(a_f);
    let count = d.dof_count() + 3;
    let mut a = vec![0.0; count];
    for r in 0..3 {
        let v = d.a_t[r] - delta[r];
        if !(v >= -tol && v <= 1.0 + tol) {
            return Err(Error::Infeasible(format!("triangle coordinate {v} outside [0, 1]")));
        }
        a[d.indices[r]] = v.clamp(0.0, 1.0);
    }
    for (&i, &v) in d.free.iter().zip(a_f) {
        a[i] = v.clamp(0.0, 1.0);
    }
    Ok(BaryVector(a))
}

/// Line of weight vectors `w(w0) = L w0`, `w0 ∈ (0, w0_max]`, sharing one
/// barycentric vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuminanceLine {
    pub direction: Vec<f64>,
    pub w0_max: f64,
    pub pivot: usize,
}

impl LuminanceLine {
    pub fn at(&self, w0: f64) -> Vec<f64> {
        self.direction.iter().map(|l| l * w0).collect()
    }
}

/// Inverts `a_k = w_k |B_k| / Σ_l w_l |B_l|` up to scale, pivoting on the
/// largest coordinate.
pub fn weights_from_bary(basis: &PuBasis, a: &BaryVector) -> Result<LuminanceLine> {
    let coords = a.coords();
    if coords.len() != basis.count() {
        return Err(Error::LengthMismatch {
            expected: basis.count(),
            found: coords.len(),
        });
    }
    let (pivot, &a_p) = coords
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty");
    if !(a_p > 0.0) {
        return Err(Error::InvalidParameter("barycentric vector is all zero".into()));
    }
    let mags = basis.magnitudes();
    let direction: Vec<f64> = coords
        .iter()
        .zip(mags)
        .map(|(a_k, m_k)| {
            if *a_k > 0.0 {
                a_k * mags[pivot] / (a_p * m_k)
            } else {
                0.0
            }
        })
        .collect();
    let w0_max = direction
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| 1.0 / l)
        .fold(1.0, f64::min);
    Ok(LuminanceLine {
        direction,
        w0_max,
        pivot,
    })
}

/// Outcome of fitting the target luminance along a [`LuminanceLine`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuminanceFit {
    pub w: Vec<f64>,
    pub achieved_luminance: f64,
    pub luminance_met: bool,
    /// The weights were rescaled past the unit box, bounded by `max_λ f ≤ 1`.
    pub scaled: bool,
}

/// Picks the point of the line with the target luminance, or the brightest
/// admissible rescaling of its end point when the target is out of reach.
pub fn achieve_luminance(basis: &PuBasis, line: &LuminanceLine, target_luminance: f64) -> Result<LuminanceFit> {
    let slope = basis.luminance_of(&line.direction)?;
    if !(slope > 0.0) {
        return Err(Error::Infeasible("luminance line has zero slope".into()));
    }
    let w0_star = target_luminance / slope;
    if w0_star <= line.w0_max {
        let w = line.at(w0_star);
        let achieved = basis.luminance_of(&w)?;
        return Ok(LuminanceFit {
            w,
            achieved_luminance: achieved,
            luminance_met: true,
            scaled: false,
        });
    }
    let w_end = line.at(line.w0_max);
    let f_max = basis.max_reconstructed(&w_end)?;
    let y_end = basis.luminance_of(&w_end)?;
    let divisor = f_max.max(y_end / target_luminance);
    let w: Vec<f64> = w_end.iter().map(|v| v / divisor).collect();
    let achieved = basis.luminance_of(&w)?;
    Ok(LuminanceFit {
        luminance_met: (achieved - target_luminance).abs() < LUMINANCE_TOL,
        achieved_luminance: achieved,
        w,
        scaled: true,
    })
}

/// Equality rows of the max-luminance program: `Σ_k w_k (B_{k,X} - c_x |B_k|) = 0`
/// and the same for `Y`. The homogeneity row is identically zero and dropped.
fn chromaticity_rows(basis: &PuBasis, c: Chromaticity) -> Vec<Vec<f64>> {
    let colors = basis.colors();
    let mut rows = vec![
        colors.iter().map(|b| b.x - c.x * b.magnitude()).collect::<Vec<f64>>(),
        colors.iter().map(|b| b.y - c.y * b.magnitude()).collect::<Vec<f64>>(),
    ];
    for row in rows.iter_mut() {
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale > 0.0 {
            row.iter_mut().for_each(|v| *v /= scale);
        }
    }
    rows
}

/// Weight vector of maximum luminance with chromaticity `c` and `0 ≤ w ≤ 1`.
pub fn max_luminance_weights(basis: &PuBasis, c: Chromaticity) -> Result<Vec<f64>> {
    match check_in_gamut(basis, c) {
        Ok(()) | Err(Error::BoundarySingular { .. }) => {}
        Err(e) => return Err(e),
    }
    let rows = chromaticity_rows(basis, c);
    let k = basis.count();
    let sol = lp::maximize(&basis.luminances(), &rows, &[0.0, 0.0], &vec![1.0; k])?;
    if !(sol.objective > 0.0) {
        return Err(Error::OutOfGamut { x: c.x, y: c.y });
    }
    Ok(sol.x)
}

/// Conservative a-priori feasibility of a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// Always true: only the conservative test is implemented.
    pub conservative: bool,
    /// Max-luminance weights `w̄`.
    pub max_luminance_weights: Vec<f64>,
    /// `w̄ᵀ B_Y`.
    pub max_luminance: f64,
    /// Luminance of `w̄` after rescaling so that `max_λ f = 1`.
    pub max_scaled_luminance: f64,
}

/// Solves for `w̄` and reports whether its rescaled luminance reaches the
/// target.
pub fn feasibility_check(basis: &PuBasis, target: &ColorTarget) -> Result<Feasibility> {
    let w_bar = max_luminance_weights(basis, target.chromaticity)?;
    let y_bar = basis.luminance_of(&w_bar)?;
    let f_max = basis.max_reconstructed(&w_bar)?;
    let max_scaled = if f_max > 0.0 { y_bar / f_max } else { 0.0 };
    let achieved = if target.luminance > 0.0 {
        y_bar / f_max.max(y_bar / target.luminance)
    } else {
        0.0
    };
    Ok(Feasibility {
        feasible: achieved >= target.luminance * (1.0 - 1e-12),
        conservative: true,
        max_luminance_weights: w_bar,
        max_luminance: y_bar,
        max_scaled_luminance: max_scaled,
    })
}

/// One member of an equivalence class, with the seed and stream that drew it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSample {
    pub seed: u64,
    pub stream: u64,
    /// Triangle basis indices (two indices for a boundary target).
    pub triangle: Vec<usize>,
    pub a_f: Vec<f64>,
    pub a: BaryVector,
    pub w: Vec<f64>,
    pub achieved_luminance: f64,
    pub luminance_met: bool,
    pub scaled: bool,
}

/// Precomputed triangles and decompositions for one basis and target.
#[derive(Debug, Clone)]
pub struct ClassSampler<'a> {
    basis: &'a PuBasis,
    target: ColorTarget,
    decompositions: Vec<TriangleDecomposition>,
    dof_order: DofOrder,
}

impl<'a> ClassSampler<'a> {
    pub fn new(basis: &'a PuBasis, target: ColorTarget) -> Result<Self> {
        if !(target.luminance > 0.0) {
            return Err(Error::InvalidParameter(
                "sampling needs a positive target luminance".into(),
            ));
        }
        let triangles = enclosing_triangles(basis, target.chromaticity)?;
        let decompositions = triangles
            .into_iter()
            .map(|t| decompose(basis, t, target.chromaticity))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassSampler {
            basis,
            target,
            decompositions,
            dof_order: DofOrder::Shuffled,
        })
    }

    pub fn with_dof_order(mut self, order: DofOrder) -> Self {
        self.dof_order = order;
        self
    }

    pub fn decompositions(&self) -> &[TriangleDecomposition] {
        &self.decompositions
    }

    fn largest(&self) -> usize {
        self.decompositions
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.det().abs().total_cmp(&b.1.det().abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    fn pick<R: Rng>(&self, policy: TrianglePolicy, rng: &mut R) -> Result<&TriangleDecomposition> {
        let index = match policy {
            TrianglePolicy::Largest => self.largest(),
            TrianglePolicy::First => 0,
            TrianglePolicy::Random => rng.random_range(0..self.decompositions.len()),
            TrianglePolicy::Fixed(i) => i,
        };
        self.decompositions.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.decompositions.len(),
        })
    }

    /// Runs the full pipeline on a given degree-of-freedom vector.
    pub fn sample_from_dof(&self, d: &TriangleDecomposition, a_f: Vec<f64>) -> Result<ClassSample> {
        let a = bary_from_dof(d, &a_f)?;
        let line = weights_from_bary(self.basis, &a)?;
        let fit = achieve_luminance(self.basis, &line, self.target.luminance)?;
        Ok(ClassSample {
            seed: 0,
            stream: 0,
            triangle: d.indices.to_vec(),
            a_f,
            a,
            w: fit.w,
            achieved_luminance: fit.achieved_luminance,
            luminance_met: fit.luminance_met,
            scaled: fit.scaled,
        })
    }

    /// Sample number `stream` of the generator seeded with `seed`.
    pub fn sample_one(&self, seed: u64, stream: u64, policy: TrianglePolicy) -> Result<ClassSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let d = self.pick(policy, &mut rng)?;
        let a_f = sample_dof(d, &mut rng, self.dof_order);
        let mut s = self.sample_from_dof(d, a_f)?;
        s.seed = seed;
        s.stream = stream;
        Ok(s)
    }

    /// `count` samples; sample `i` uses generator stream `i`.
    pub fn sample(&self, count: usize, seed: u64, policy: TrianglePolicy) -> Result<Vec<ClassSample>> {
        self.sample_streams(0..count as u64, seed, policy)
    }

    /// One sample per stream in `streams`, in stream order.
    pub fn sample_streams(&self, streams: Range<u64>, seed: u64, policy: TrianglePolicy) -> Result<Vec<ClassSample>> {
        streams
            .into_par_iter()
            .map(|i| self.sample_one(seed, i, policy))
            .collect()
    }
}

/// Samples an equivalence class. Targets on the gamut boundary yield their
/// single two-basis solution instead.
pub fn sample_class(
    basis: &PuBasis,
    target: &ColorTarget,
    count: usize,
    seed: u64,
    policy: TrianglePolicy,
) -> Result<Vec<ClassSample>> {
    match ClassSampler::new(basis, *target) {
        Ok(sampler) => sampler.sample(count, seed, policy),
        Err(Error::BoundarySingular { first, second, .. }) => {
            Ok(vec![boundary_solution(basis, target, first, second, seed)?])
        }
        Err(e) => Err(e),
    }
}

/// The unique class member of a target on the edge between `first` and
/// `second`.
pub fn boundary_solution(
    basis: &PuBasis,
    target: &ColorTarget,
    first: usize,
    second: usize,
    seed: u64,
) -> Result<ClassSample> {
    let b = basis.chromaticities();
    let c = target.chromaticity;
    let (p, q) = (b[first], b[second]);
    let len2 = (q.x - p.x).powi(2) + (q.y - p.y).powi(2);
    let t = (((c.x - p.x) * (q.x - p.x) + (c.y - p.y) * (q.y - p.y)) / len2).clamp(0.0, 1.0);
    let mut a = vec![0.0; basis.count()];
    a[first] = 1.0 - t;
    a[second] = t;
    let a = BaryVector(a);
    let line = weights_from_bary(basis, &a)?;
    let fit = achieve_luminance(basis, &line, target.luminance)?;
    Ok(ClassSample {
        seed,
        stream: 0,
        triangle: vec![first, second],
        a_f: Vec::new(),
        a,
        w: fit.w,
        achieved_luminance: fit.achieved_luminance,
        luminance_met: fit.luminance_met,
        scaled: fit.scaled,
    })
}
