//! SVG rendering in the unit-disc model: the boundary circle, highlighted
//! boundary arcs, and generator axes drawn as directed geodesics (arrows run
//! from the repelling to the attracting fixed point).

use crate::circle::{ArcUnion, BoundaryPoint};
use crate::moebius::{FixedPoints, MoebiusMap};

const SIZE: f64 = 500.0;
const CX: f64 = 250.0;
const CY: f64 = 250.0;
const R: f64 = 200.0;

/// Chart angle theta (period pi) to disc boundary angle (period 2 pi).
fn disc_angle(theta: f64) -> f64 {
    -2.0 * theta
}

fn unit_xy(phi: f64) -> (f64, f64) {
    (phi.cos(), phi.sin())
}

fn screen(p: (f64, f64)) -> (f64, f64) {
    (CX + R * p.0, CY - R * p.1)
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Directed geodesic between two boundary angles as a quadratic Bezier
/// through the geodesic's closest point to the origin.
fn geodesic_path(phi_from: f64, phi_to: f64) -> String {
    let p = unit_xy(phi_from);
    let q = unit_xy(phi_to);
    let dot = p.0 * q.0 + p.1 * q.1;
    let m = if dot < -1.0 + 1e-9 {
        // antipodal: the geodesic is a diameter
        (0.0, 0.0)
    } else {
        let c = ((p.0 + q.0) / (1.0 + dot), (p.1 + q.1) / (1.0 + dot));
        let norm = (c.0 * c.0 + c.1 * c.1).sqrt();
        let r = (norm * norm - 1.0).sqrt();
        // nearest point of the orthogonal circle to the origin
        (c.0 * (1.0 - r / norm), c.1 * (1.0 - r / norm))
    };
    // control point making the curve pass through m at its midpoint
    let k = (2.0 * m.0 - (p.0 + q.0) / 2.0, 2.0 * m.1 - (p.1 + q.1) / 2.0);
    let (x0, y0) = screen(p);
    let (kx, ky) = screen(k);
    let (x1, y1) = screen(q);
    format!(
        "M {} {} Q {} {} {} {}",
        fmt(x0),
        fmt(y0),
        fmt(kx),
        fmt(ky),
        fmt(x1),
        fmt(y1)
    )
}

/// Boundary arc at a given radius offset, swept in increasing chart angle.
fn boundary_arc_path(theta_start: f64, len: f64, offset: f64) -> String {
    let r = R + offset;
    let phi0 = disc_angle(theta_start);
    let phi1 = disc_angle(theta_start + len);
    let (x0, y0) = (CX + r * phi0.cos(), CY - r * phi0.sin());
    let (x1, y1) = (CX + r * phi1.cos(), CY - r * phi1.sin());
    // the sweep covers 2*len of disc angle, decreasing phi
    let large = if 2.0 * len > std::f64::consts::PI { 1 } else { 0 };
    format!(
        "M {} {} A {} {} 0 {} 1 {} {}",
        fmt(x0),
        fmt(y0),
        fmt(r),
        fmt(r),
        large,
        fmt(x1),
        fmt(y1)
    )
}

const ARC_COLORS: [&str; 4] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

/// Render a figure: the disc, each arc union (offset outward per union),
/// each generator's axis or fixed point, and marked boundary points.
pub fn render_figure(
    gens: &[MoebiusMap<f64>],
    unions: &[ArcUnion<f64>],
    points: &[BoundaryPoint<f64>],
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    out.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" \
         markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333\"/></marker></defs>\n",
    );
    out.push_str(&format!(
        "<circle cx=\"{CX}\" cy=\"{CY}\" r=\"{R}\" fill=\"none\" stroke=\"#888\" \
         stroke-width=\"1.5\"/>\n"
    ));
    for (ui, u) in unions.iter().enumerate() {
        let color = ARC_COLORS[ui % ARC_COLORS.len()];
        let offset = 8.0 + 8.0 * ui as f64;
        for a in u.arcs() {
            out.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"4\" \
                 stroke-linecap=\"round\"/>\n",
                boundary_arc_path(a.start_angle(), a.length(), offset)
            ));
        }
    }
    for g in gens {
        match g.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, .. } => {
                out.push_str(&format!(
                    "<path d=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\" \
                     marker-end=\"url(#arrow)\"/>\n",
                    geodesic_path(disc_angle(repelling), disc_angle(attracting))
                ));
            }
            FixedPoints::Parabolic { boundary } => {
                // a parabolic has no axis; mark its boundary fixed point
                let (x, y) = screen(unit_xy(disc_angle(boundary)));
                out.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#333\"/>\n",
                    fmt(x),
                    fmt(y)
                ));
            }
            FixedPoints::Elliptic { x, y } => {
                // Cayley transform of the interior fixed point into the disc
                let den = x * x + (y + 1.0) * (y + 1.0);
                let wr = (x * x + y * y - 1.0) / den;
                let wi = -2.0 * x / den;
                let (sx, sy) = screen((wr, wi));
                out.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"#333\" \
                     stroke-width=\"1.5\"/>\n",
                    fmt(sx),
                    fmt(sy)
                ));
            }
            FixedPoints::AllFixed => {}
        }
    }
    for p in points {
        let (x, y) = screen(unit_xy(disc_angle(p.theta())));
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#d62728\"/>\n",
            fmt(x),
            fmt(y)
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Arc;
    use crate::Map as M;

    #[test]
    fn renders_all_element_kinds() {
        let gens = vec![
            M::affine(2.0, 0.0).unwrap(),
            M::affine(1.0, 1.0).unwrap(),
            M::rotation(1.0),
        ];
        let u = ArcUnion::single(Arc::interval(0.0, 1.0).unwrap());
        let pts = vec![BoundaryPoint::from_real(2.0), BoundaryPoint::infinity()];
        let svg = render_figure(&gens, &[u], &pts);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("marker-end"), "hyperbolic axis with arrow");
        assert!(svg.matches("<circle").count() >= 5, "disc + dots");
        assert!(svg.contains("stroke-width=\"4\""), "highlighted arc");
    }

    #[test]
    fn diameter_geodesic_does_not_blow_up() {
        // fixed points at 0 and infinity: axis is a diameter
        let svg = render_figure(&[M::affine(2.0, 0.0).unwrap()], &[], &[]);
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }
}
