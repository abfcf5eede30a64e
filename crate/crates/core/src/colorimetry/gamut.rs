use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Chromaticity;
use crate::error::{Error, Result};

/// RGB working spaces whose primaries bound the gamut comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RgbSpace {
    Srgb,
    AdobeWideGamut,
}

impl RgbSpace {
    /// Red, green and blue primary chromaticities.
    pub fn primaries(self) -> [Chromaticity; 3] {
        match self {
            RgbSpace::Srgb => [
                Chromaticity::new(0.64, 0.33),
                Chromaticity::new(0.30, 0.60),
                Chromaticity::new(0.15, 0.06),
            ],
            RgbSpace::AdobeWideGamut => [
                Chromaticity::new(0.7347, 0.2653),
                Chromaticity::new(0.1152, 0.8264),
                Chromaticity::new(0.1566, 0.0177),
            ],
        }
    }

    /// Triangle of the primaries.
    pub fn gamut(self) -> GamutPolygon {
        GamutPolygon::new(self.primaries().to_vec()).expect("three primaries")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RgbSpace::Srgb => "srgb",
            RgbSpace::AdobeWideGamut => "adobe-wide-gamut",
        }
    }
}

impl fmt::Display for RgbSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RgbSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "srgb" => Ok(RgbSpace::Srgb),
            "adobewidegamut" | "adobewidegamutrgb" | "widegamut" | "wide" => Ok(RgbSpace::AdobeWideGamut),
            _ => Err(Error::UnknownName {
                kind: "RGB space",
                name: s.to_string(),
            }),
        }
    }
}

/// Triangle of standard primaries for the named space.
pub fn rgb_gamut(space: &str) -> Result<GamutPolygon> {
    Ok(space.parse::<RgbSpace>()?.gamut())
}

/// A closed polygon in chromaticity space. The last vertex connects back to
/// the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamutPolygon {
    vertices: Vec<Chromaticity>,
}

#[inline]
fn cross(o: Chromaticity, a: Chromaticity, b: Chromaticity) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Chromaticity, a: Chromaticity, b: Chromaticity) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Chromaticity::new(a.x + t * dx, a.y + t * dy))
}

impl GamutPolygon {
    pub fn new(vertices: Vec<Chromaticity>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::DegeneratePolygon("non-finite vertex".into()));
        }
        Ok(GamutPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Chromaticity] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Chromaticity, Chromaticity)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area; positive for counter-clockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Distance from `p` to the polygon outline.
    pub fn boundary_distance(&self, p: Chromaticity) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point-in-polygon (non-zero winding); points within `tol` of an edge
    /// count as inside.
    pub fn contains(&self, p: Chromaticity, tol: f64) -> bool {
        if self.boundary_distance(p) <= tol {
            return true;
        }
        let mut winding = 0i32;
        for (a, b) in self.edges() {
            if a.y <= p.y {
                if b.y > p.y && cross(a, b, p) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && cross(a, b, p) < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(edges[i], edges[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let mut sign = 0.0f64;
        for i in 0..n {
            let c = cross(self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]);
            if c != 0.0 {
                if sign != 0.0 && c.signum() != sign {
                    return false;
                }
                sign = c.signum();
            }
        }
        true
    }

    /// Same polygon, vertex order reversed if needed so the winding is
    /// counter-clockwise.
    pub fn counter_clockwise(&self) -> GamutPolygon {
        let mut vertices = self.vertices.clone();
        if self.signed_area() < 0.0 {
            vertices.reverse();
        }
        GamutPolygon { vertices }
    }

    /// Sutherland–Hodgman clip of `self` against a convex `clip` polygon.
    ///
    /// The area of the result is the area of the intersection even for a
    /// non-convex subject; the outline may then contain zero-width bridges.
    /// Returns `None` when nothing remains.
    pub fn clip_convex(&self, clip: &GamutPolygon) -> Option<GamutPolygon> {
        let clip = clip.counter_clockwise();
        let mut output = self.vertices.clone();
        for (a, b) in clip.edges() {
            if output.is_empty() {
                break;
            }
            let input = std::mem::take(&mut output);
            let inside = |p: Chromaticity| cross(a, b, p) >= 0.0;
            let m = input.len();
            for i in 0..m {
                let cur = input[i];
                let prev = input[(i + m - 1) % m];
                match (inside(prev), inside(cur)) {
                    (true, true) => output.push(cur),
                    (true, false) => output.push(line_intersection(prev, cur, a, b)),
                    (false, true) => {
                        output.push(line_intersection(prev, cur, a, b));
                        output.push(cur);
                    }
                    (false, false) => {}
                }
            }
        }
        if output.len() < 3 {
            None
        } else {
            Some(GamutPolygon { vertices: output })
        }
    }

    /// Area of the intersection with a convex polygon.
    pub fn intersection_area_convex(&self, clip: &GamutPolygon) -> f64 {
        self.clip_convex(clip).map_or(0.0, |p| p.area())
    }

    /// Convex hull (Andrew's monotone chain), counter-clockwise, collinear
    /// points dropped.
    pub fn convex_hull(points: &[Chromaticity]) -> Result<GamutPolygon> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegeneratePolygon("hull of fewer than 3 points".into()));
        }
        let mut hull: Vec<Chromaticity> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Chromaticity>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        GamutPolygon::new(hull)
    }
}

fn line_intersection(p: Chromaticity, q: Chromaticity, a: Chromaticity, b: Chromaticity) -> Chromaticity {
    let r = (q.x - p.x, q.y - p.y);
    let s = (b.x - a.x, b.y - a.y);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return q;
    }
    let t = ((a.x - p.x) * s.1 - (a.y - p.y) * s.0) / denom;
    Chromaticity::new(p.x + t * r.0, p.y + t * r.1)
}

fn segments_intersect((p1, p2): (Chromaticity, Chromaticity), (q1, q2): (Chromaticity, Chromaticity)) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Chromaticity, b: Chromaticity, p: Chromaticity, d: f64| {
        d == 0.0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square() -> GamutPolygon {
        GamutPolygon::new(vec![
            Chromaticity::new(0.0, 0.0),
            Chromaticity::new(1.0, 0.0),
            Chromaticity::new(1.0, 1.0),
            Chromaticity::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn area_and_orientation() {
        let sq = square();
        assert_abs_diff_eq!(sq.signed_area(), 1.0);
        let mut v = sq.vertices().to_vec();
        v.reverse();
        let cw = GamutPolygon::new(v).unwrap();
        assert_abs_diff_eq!(cw.signed_area(), -1.0);
        assert_abs_diff_eq!(cw.counter_clockwise().signed_area(), 1.0);
    }

    #[test]
    fn too_few_vertices() {
        assert!(GamutPolygon::new(vec![Chromaticity::default(); 2]).is_err());
    }

    #[test]
    fn containment_with_tolerance() {
        let sq = square();
        assert!(sq.contains(Chromaticity::new(0.5, 0.5), 0.0));
        assert!(sq.contains(Chromaticity::new(1.0, 0.5), 1e-9));
        assert!(!sq.contains(Chromaticity::new(1.0 + 1e-6, 0.5), 1e-9));
    }

    #[test]
    fn clipping_overlapping_squares() {
        let sq = square();
        let shifted = GamutPolygon::new(
            sq.vertices()
                .iter()
                .map(|p| Chromaticity::new(p.x + 0.5, p.y + 0.25))
                .collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(sq.intersection_area_convex(&shifted), 0.5 * 0.75, epsilon = 1e-12);
    }

    #[test]
    fn clipping_non_convex_subject() {
        // L-shape of area 3 clipped by the unit square [0,1]² gives area 1.
        let l = GamutPolygon::new(vec![
            Chromaticity::new(0.0, 0.0),
            Chromaticity::new(2.0, 0.0),
            Chromaticity::new(2.0, 1.0),
            Chromaticity::new(1.0, 1.0),
            Chromaticity::new(1.0, 2.0),
            Chromaticity::new(0.0, 2.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(l.area(), 3.0);
        assert!(!l.is_convex());
        let big = GamutPolygon::new(vec![
            Chromaticity::new(0.5, 0.5),
            Chromaticity::new(3.0, 0.5),
            Chromaticity::new(3.0, 3.0),
            Chromaticity::new(0.5, 3.0),
        ])
        .unwrap();
        // L ∩ [0.5,3]² = [0.5,2]×[0.5,1] ∪ [0.5,1]×[1,2]
        assert_abs_diff_eq!(l.intersection_area_convex(&big), 0.75 + 0.5, epsilon = 1e-12);
    }

    #[test]
    fn disjoint_clip_is_empty() {
        let sq = square();
        let far = GamutPolygon::new(
            sq.vertices()
                .iter()
                .map(|p| Chromaticity::new(p.x + 5.0, p.y))
                .collect(),
        )
        .unwrap();
        assert!(sq.clip_convex(&far).is_none());
    }

    #[test]
    fn simplicity() {
        assert!(square().is_simple());
        let bowtie = GamutPolygon::new(vec![
            Chromaticity::new(0.0, 0.0),
            Chromaticity::new(1.0, 1.0),
            Chromaticity::new(1.0, 0.0),
            Chromaticity::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(!bowtie.is_simple());
    }

    #[test]
    fn hull_drops_interior_points() {
        let mut pts = square().vertices().to_vec();
        pts.push(Chromaticity::new(0.5, 0.5));
        pts.push(Chromaticity::new(0.5, 0.0));
        let hull = GamutPolygon::convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 4);
        assert_abs_diff_eq!(hull.signed_area(), 1.0);
    }

    #[test]
    fn rgb_spaces() {
        let srgb = rgb_gamut("sRGB").unwrap();
        let wide = rgb_gamut("AdobeWideGamut").unwrap();
        assert_eq!(srgb.len(), 3);
        assert!(wide.area() > srgb.area());
        assert!(RgbSpace::AdobeWideGamut.primaries()[1].y > RgbSpace::Srgb.primaries()[1].y);
        assert!(rgb_gamut("ProPhoto").is_err());
    }
}
