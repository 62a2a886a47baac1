use std::fmt::Write as _;

use crate::calibration::{Ordering, RadiiVector};

/// Pixels per unit radius.
pub const PLOT_SCALE: f64 = 100.0;

const MARGIN: f64 = 70.0;
const LEGEND_ROW: f64 = 18.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PentagonSeries {
    pub label: String,
    pub radii: RadiiVector,
    /// Any SVG paint value, e.g. `#1f77b4` or `red`.
    pub color: String,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn angle(slot: usize) -> f64 {
    (90.0 + 72.0 * slot as f64).to_radians()
}

/// Overlaid radar pentagons, one polygon per series, with a dashed unit
/// pentagon for reference. Slot `k` sits at `90° + k·72°`, counter-clockwise
/// from the top.
pub fn render_pentagon_svg(series: &[PentagonSeries], ordering: Ordering) -> String {
    let extent = series
        .iter()
        .flat_map(|s| s.radii.values())
        .filter(|r| r.is_finite())
        .fold(1.0_f64, f64::max);
    let half = extent * PLOT_SCALE + MARGIN;
    let legend_h = LEGEND_ROW * series.len() as f64 + 10.0;
    let (w, h) = ((2.0 * half).ceil(), (2.0 * half + legend_h).ceil());
    let (cx, cy) = (half, half + legend_h);
    let point = |slot: usize, r: f64| {
        let a = angle(slot);
        (cx + r * PLOT_SCALE * a.cos(), cy - r * PLOT_SCALE * a.sin())
    };
    let polygon = |radii: [f64; 5]| {
        (0..5)
            .map(|k| {
                let (x, y) = point(k, radii[k].max(0.0));
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for k in 0..5 {
        let (x, y) = point(k, extent);
        let _ = writeln!(
            s,
            r##"<line x1="{cx:.3}" y1="{cy:.3}" x2="{x:.3}" y2="{y:.3}" stroke="#bbbbbb"/>"##
        );
        let (lx, ly) = point(k, extent + 30.0 / PLOT_SCALE);
        let _ = writeln!(
            s,
            r#"<text x="{lx:.3}" y="{ly:.3}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            escape(ordering.slot(k).label())
        );
    }
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="none" stroke="#888888" stroke-dasharray="4 3"/>"##,
        polygon([1.0; 5])
    );
    for series in series {
        let color = escape(&series.color);
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            polygon(series.radii.values())
        );
    }
    for (i, series) in series.iter().enumerate() {
        let y = 10.0 + LEGEND_ROW * i as f64;
        let color = escape(&series.color);
        let _ = writeln!(s, r#"<rect x="10" y="{y:.0}" width="12" height="12" fill="{color}"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="28" y="{:.0}">{}</text>"#,
            y + 10.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Measure::*;

    fn ordering() -> Ordering {
        Ordering::new([GlcmContrast, Ced, Ms, GlcmEnergy, Vbm]).unwrap()
    }

    fn polygons(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polygon"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn unit_series_has_plot_scale_circumradius() {
        let svg = render_pentagon_svg(
            &[PentagonSeries {
                label: "unit".into(),
                radii: RadiiVector([1.0; 5]),
                color: "red".into(),
            }],
            ordering(),
        );
        let polys = polygons(&svg);
        assert_eq!(polys.len(), 2);
        let pts = &polys[1];
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / 5.0;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / 5.0;
        for (x, y) in pts {
            let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            assert!((r - PLOT_SCALE).abs() < 1e-2, "{r}");
        }
        // first vertex straight up
        assert!((pts[0].0 - cx).abs() < 1e-2 && pts[0].1 < cy);
    }

    #[test]
    fn legend_and_escaping() {
        let svg = render_pentagon_svg(
            &[
                PentagonSeries {
                    label: "real <mean> & co".into(),
                    radii: RadiiVector([1.5; 5]),
                    color: "#1f77b4".into(),
                },
                PentagonSeries {
                    label: "fake".into(),
                    radii: RadiiVector([1.0; 5]),
                    color: "#d62728".into(),
                },
            ],
            ordering(),
        );
        assert!(svg.contains("real &lt;mean&gt; &amp; co"));
        assert!(svg.contains(">fake</text>"));
        assert_eq!(polygons(&svg).len(), 3);
        for m in ["GLCM_C", "GLCM_E", "CED", "VBM", "MS"] {
            assert!(svg.contains(&format!(">{m}</text>")), "{m}");
        }
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
