//! Dependency-free SVG rendering of a plan over planar points: red source
//! circles, blue target circles, one segment per plan entry with stroke
//! width proportional to mass. Output is deterministic text.

use std::fmt::Write;

use thiserror::Error;

use crate::measures::DiscreteMeasure;
use crate::plan::TransportPlan;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FigureError {
    #[error("figures need 2-dimensional points, got dimension {dim}")]
    NotPlanar { dim: usize },
    #[error("plan is {m}x{n}, measures are {mu_len}x{nu_len}")]
    ShapeMismatch { m: usize, n: usize, mu_len: usize, nu_len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureConfig {
    pub width: u32,
    pub height: u32,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig { width: 800, height: 800 }
    }
}

const MARGIN: f64 = 40.0;
const SOURCE_RADIUS: f64 = 5.0;
const TARGET_RADIUS: f64 = 3.5;
/// A mass of 1 maps to this stroke width in pixels.
const STROKE_PER_UNIT_MASS: f64 = 40.0;

struct Viewport {
    min_x: f64,
    min_y: f64,
    off_x: f64,
    off_y: f64,
    scale: f64,
    height: f64,
}

impl Viewport {
    fn fit(points: impl Iterator<Item = (f64, f64)>, config: &FigureConfig) -> Viewport {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        let height = f64::from(config.height);
        let usable_x = (f64::from(config.width) - 2.0 * MARGIN).max(1.0);
        let usable_y = (height - 2.0 * MARGIN).max(1.0);
        let span_x = max_x - min_x;
        let span_y = max_y - min_y;
        // Degenerate extents (a single point, axis-aligned data) fall back
        // to centering instead of dividing by zero.
        let scale_x = if span_x > 0.0 { usable_x / span_x } else { f64::INFINITY };
        let scale_y = if span_y > 0.0 { usable_y / span_y } else { f64::INFINITY };
        let mut scale = scale_x.min(scale_y);
        if !scale.is_finite() {
            scale = 1.0;
        }
        Viewport {
            min_x,
            min_y,
            off_x: MARGIN + (usable_x - span_x * scale) / 2.0,
            off_y: MARGIN + (usable_y - span_y * scale) / 2.0,
            scale,
            height,
        }
    }

    fn x(&self, x: f64) -> f64 {
        self.off_x + (x - self.min_x) * self.scale
    }

    /// SVG y grows downward; flip so larger coordinates render higher.
    fn y(&self, y: f64) -> f64 {
        self.height - self.off_y - (y - self.min_y) * self.scale
    }
}

/// Renders the plan as an SVG document string.
pub fn render_figure(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    config: &FigureConfig,
) -> Result<String, FigureError> {
    if mu.dim() != 2 || nu.dim() != 2 {
        return Err(FigureError::NotPlanar {
            dim: if mu.dim() != 2 { mu.dim() } else { nu.dim() },
        });
    }
    if plan.m != mu.len() || plan.n != nu.len() {
        return Err(FigureError::ShapeMismatch {
            m: plan.m,
            n: plan.n,
            mu_len: mu.len(),
            nu_len: nu.len(),
        });
    }

    let coords = |p: &crate::measures::Point| (p.coords[0], p.coords[1]);
    let view = Viewport::fit(
        mu.points().iter().chain(nu.points()).map(coords),
        config,
    );

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = config.width,
        h = config.height
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        config.width, config.height
    );

    for (i, j, mass) in &plan.entries {
        let (x1, y1) = coords(&mu.points()[*i]);
        let (x2, y2) = coords(&nu.points()[*j]);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555555" stroke-width="{:.3}" stroke-linecap="round"/>"##,
            view.x(x1),
            view.y(y1),
            view.x(x2),
            view.y(y2),
            mass.to_f64() * STROKE_PER_UNIT_MASS,
        );
    }
    for p in mu.points() {
        let (x, y) = coords(p);
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="#d62728"/>"##,
            view.x(x),
            view.y(y),
            SOURCE_RADIUS,
        );
    }
    for p in nu.points() {
        let (x, y) = coords(p);
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="#1f77b4"/>"##,
            view.x(x),
            view.y(y),
            TARGET_RADIUS,
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Point, Rational};

    fn planar(points: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::uniform(
            points
                .iter()
                .map(|&(x, y)| Point::new(vec![x, y]))
                .collect(),
        )
        .unwrap()
    }

    fn single_entry_plan() -> TransportPlan {
        TransportPlan {
            m: 1,
            n: 1,
            entries: vec![(0, 0, Rational::one())],
            cost: 1.0,
        }
    }

    #[test]
    fn one_segment_per_plan_entry() {
        let mu = planar(&[(0.0, 0.0), (1.0, 0.0)]);
        let nu = planar(&[(0.0, 1.0), (1.0, 1.0)]);
        let third = Rational::new(1u64, 4u64).unwrap();
        let plan = TransportPlan {
            m: 2,
            n: 2,
            entries: vec![
                (0, 0, third.clone()),
                (0, 1, third.clone()),
                (1, 0, third.clone()),
                (1, 1, third),
            ],
            cost: 0.0,
        };
        let svg = render_figure(&plan, &mu, &nu, &FigureConfig::default()).unwrap();
        assert_eq!(svg.matches("<line ").count(), 4);
        assert_eq!(svg.matches("<circle ").count(), 4);
        assert_eq!(svg.matches("#d62728").count(), 2);
        assert_eq!(svg.matches("#1f77b4").count(), 2);
    }

    #[test]
    fn degenerate_single_pair_renders_one_segment() {
        let mu = planar(&[(0.5, 0.5)]);
        let nu = planar(&[(0.5, 0.5)]);
        let svg = render_figure(&single_entry_plan(), &mu, &nu, &FigureConfig::default()).unwrap();
        assert_eq!(svg.matches("<line ").count(), 1);
        assert!(!svg.contains("NaN"), "{svg}");
        assert!(!svg.contains("inf"), "{svg}");
    }

    #[test]
    fn output_is_deterministic() {
        let mu = planar(&[(0.1, 0.9), (0.4, 0.2)]);
        let nu = planar(&[(0.8, 0.3), (0.6, 0.7)]);
        let plan = TransportPlan {
            m: 2,
            n: 2,
            entries: vec![
                (0, 1, Rational::new(1u64, 2u64).unwrap()),
                (1, 0, Rational::new(1u64, 2u64).unwrap()),
            ],
            cost: 0.5,
        };
        let a = render_figure(&plan, &mu, &nu, &FigureConfig::default()).unwrap();
        let b = render_figure(&plan, &mu, &nu, &FigureConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_planar_points_are_rejected() {
        let mu = DiscreteMeasure::uniform(vec![Point::new(vec![0.0])]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![Point::new(vec![0.0])]).unwrap();
        let err = render_figure(&single_entry_plan(), &mu, &nu, &FigureConfig::default())
            .unwrap_err();
        assert_eq!(err, FigureError::NotPlanar { dim: 1 });
    }

    #[test]
    fn coordinates_stay_inside_the_canvas() {
        let mu = planar(&[(-3.0, 10.0), (5.0, -2.0)]);
        let nu = planar(&[(0.0, 0.0), (4.0, 9.0)]);
        let plan = TransportPlan {
            m: 2,
            n: 2,
            entries: vec![
                (0, 0, Rational::new(1u64, 2u64).unwrap()),
                (1, 1, Rational::new(1u64, 2u64).unwrap()),
            ],
            cost: 0.0,
        };
        let config = FigureConfig { width: 400, height: 300 };
        let svg = render_figure(&plan, &mu, &nu, &config).unwrap();
        for (attr, limit) in [
            ("x1", 400.0),
            ("x2", 400.0),
            ("cx", 400.0),
            ("y1", 300.0),
            ("y2", 300.0),
            ("cy", 300.0),
        ] {
            let needle = format!("{attr}=\"");
            let mut rest = svg.as_str();
            while let Some(pos) = rest.find(&needle) {
                let after = &rest[pos + needle.len()..];
                let end = after.find('"').unwrap();
                let v: f64 = after[..end].parse().unwrap();
                assert!((0.0..=limit).contains(&v), "{attr}={v} escapes");
                rest = &after[end..];
            }
        }
    }
}
