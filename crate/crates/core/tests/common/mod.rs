#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use spectral_pu::colorimetry::{integrate_to_xyz, Chromaticity, ColorXyz, Illuminant};
use spectral_pu::PuBasis;

/// XYZ of `w` by dense integration of the reconstructed spectrum.
pub fn dense_color(basis: &PuBasis, w: &[f64], illuminant: &Illuminant) -> ColorXyz {
    let f = basis.reconstruct_visible(w).unwrap();
    integrate_to_xyz(&f, Some(illuminant)).unwrap()
}

pub fn chroma(c: ColorXyz) -> (f64, f64) {
    let s = c.x + c.y + c.z;
    (c.x / s, c.y / s)
}

/// Random point strictly inside the convex hull of the basis chromaticities.
pub fn interior_chromaticity<R: Rng>(basis: &PuBasis, rng: &mut R) -> Chromaticity {
    let b = basis.chromaticities();
    let raw: Vec<f64> = (0..b.len()).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let (x, y) = raw
        .iter()
        .zip(b)
        .fold((0.0, 0.0), |(x, y), (a, c)| (x + a / total * c.x, y + a / total * c.y));
    Chromaticity::new(x, y)
}

/// Gaussian elimination with partial pivoting on a small dense system.
pub fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Angle in degrees between two chromaticities as seen from the equal-energy
/// white.
pub fn angle_around_white(a: Chromaticity, b: Chromaticity) -> f64 {
    let e = 1.0 / 3.0;
    let (ux, uy) = (a.x - e, a.y - e);
    let (vx, vy) = (b.x - e, b.y - e);
    let cos = (ux * vx + uy * vy) / ((ux * ux + uy * uy).sqrt() * (vx * vx + vy * vy).sqrt());
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}
