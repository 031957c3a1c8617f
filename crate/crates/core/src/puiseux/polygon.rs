use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::GermPolynomial;

/// A lower edge of the Newton polygon, in `(U-order, Z-exponent)` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// Roots along this edge have `Z`-order `order_num / order_den` in `U`.
    pub order_num: i64,
    pub order_den: i64,
    /// Number of roots (with multiplicity) carried by the edge.
    pub z_extent: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    /// Diagram points `(U-order, Z-exponent)` of the lowest term of each
    /// nonzero coefficient.
    pub points: Vec<(usize, usize)>,
    pub vertices: Vec<(usize, usize)>,
    pub edges: Vec<Edge>,
    /// Maximal ordinate (`Z`-exponent) of the vertices.
    pub height: usize,
    /// Lowest `Z`-exponent present: that many roots are `Z = 0`.
    pub zero_roots: usize,
    /// Smallest `U`-order over all coefficients.
    pub u_multiplicity: usize,
    /// `Z`-exponents whose coefficient vanishes through the truncation
    /// order without being known to vanish identically.
    pub truncated_zero: Vec<usize>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Lower convex hull of `(Z-exponent, U-order)` points sorted by exponent.
pub(crate) fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut h: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0 {
            h.pop();
        }
        h.push(p);
    }
    h
}

/// `(q, p)` with `q/p = (o1 − o2)/(i2 − i1)` in lowest terms, `p > 0`.
pub(crate) fn edge_order(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    let num = a.1 - b.1;
    let den = b.0 - a.0;
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

/// Polygon from the `U`-orders of the coefficients `c_0, …, c_n` (`None`
/// for a vanishing coefficient).
pub fn polygon_from_orders(orders: &[Option<usize>], truncated_zero: Vec<usize>) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, i64)> = orders
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| (i as i64, o as i64)))
        .collect();
    if pts.is_empty() {
        return Err(Error::AllCoefficientsVanish);
    }
    let hull = lower_hull(&pts);
    let edges = hull
        .windows(2)
        .map(|w| {
            let (q, p) = edge_order(w[0], w[1]);
            Edge {
                from: (w[0].1 as usize, w[0].0 as usize),
                to: (w[1].1 as usize, w[1].0 as usize),
                order_num: q,
                order_den: p,
                z_extent: (w[1].0 - w[0].0) as usize,
            }
        })
        .collect();
    Ok(NewtonPolygon {
        points: pts.iter().map(|&(i, o)| (o as usize, i as usize)).collect(),
        vertices: hull.iter().map(|&(i, o)| (o as usize, i as usize)).collect(),
        edges,
        height: hull.iter().map(|v| v.0 as usize).max().unwrap_or(0),
        zero_roots: pts[0].0 as usize,
        u_multiplicity: pts.iter().map(|p| p.1 as usize).min().unwrap_or(0),
        truncated_zero,
    })
}

/// The polygon of the germ, using exact valuations in ℚ(β).
pub fn newton_polygon(germ: &GermPolynomial) -> Result<NewtonPolygon> {
    let orders: Vec<Option<usize>> = germ.coeffs.iter().map(|c| c.valuation()).collect();
    let truncated_zero = if germ.finite {
        Vec::new()
    } else {
        let top = germ.deg_z().unwrap_or(0);
        (0..germ.d()).filter(|&i| i < top && orders[i].is_none()).collect()
    };
    let last = orders.iter().rposition(|o| o.is_some()).map_or(0, |i| i + 1);
    polygon_from_orders(&orders[..last], truncated_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp() {
        let p = polygon_from_orders(&[Some(1), None, Some(0)], vec![]).unwrap();
        assert_eq!(p.vertices, vec![(1, 0), (0, 2)]);
        assert_eq!(p.height, 2);
        assert_eq!(p.edges.len(), 1);
        assert_eq!((p.edges[0].order_num, p.edges[0].order_den), (1, 2));
    }

    #[test]
    fn single_point() {
        let p = polygon_from_orders(&[Some(1)], vec![]).unwrap();
        assert_eq!(p.points, vec![(1, 0)]);
        assert_eq!(p.height, 0);
        assert!(p.edges.is_empty());
        assert_eq!(p.u_multiplicity, 1);
    }

    #[test]
    fn collinear_points_are_one_edge() {
        let p = polygon_from_orders(&[Some(2), Some(1), Some(0)], vec![]).unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(p.edges[0].z_extent, 2);
        assert!(polygon_from_orders(&[None, None], vec![]).is_err());
    }
}
