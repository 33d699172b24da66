//! SVG rendering. Plots are decorative companions to the CSV files and
//! never feed back into them.

use anyhow::anyhow;
use onebit_mimo::geometry::HyperplaneArrangement;
use plotters::prelude::*;

const SIZE: (u32, u32) = (640, 640);
const CURVE_SIZE: (u32, u32) = (800, 560);
const CIRCLE_SEGMENTS: usize = 96;

fn plot_err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow!("rendering SVG: {e:?}")
}

fn circle(cx: f64, cy: f64, r: f64) -> Vec<(f64, f64)> {
    (0..=CIRCLE_SEGMENTS)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SEGMENTS as f64;
            (cx + r * t.cos(), cy + r * t.sin())
        })
        .collect()
}

/// The part of the line `a . x = b` inside the square `[-half, half]^2`.
fn clip_line(a: [f64; 2], b: f64, half: f64) -> Option<[(f64, f64); 2]> {
    let norm2 = a[0] * a[0] + a[1] * a[1];
    let p = [a[0] * b / norm2, a[1] * b / norm2];
    let d = [-a[1], a[0]];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..2 {
        if d[k].abs() < 1e-15 {
            if p[k].abs() > half {
                return None;
            }
            continue;
        }
        let (t1, t2) = ((-half - p[k]) / d[k], (half - p[k]) / d[k]);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
    }
    (lo < hi).then(|| {
        [
            (p[0] + lo * d[0], p[1] + lo * d[1]),
            (p[0] + hi * d[0], p[1] + hi * d[1]),
        ]
    })
}

/// Hyperplanes, the power circle of radius `radius` and unit circles at
/// `centers`, on a fixed square viewport.
pub fn packing_svg(arr: &HyperplaneArrangement, radius: f64, centers: &[(f64, f64)]) -> anyhow::Result<String> {
    let half = radius + 1.0;
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .margin(16)
            .x_label_area_size(30)
            .y_label_area_size(40)
            .build_cartesian_2d(-half..half, -half..half)
            .map_err(plot_err)?;
        chart.configure_mesh().disable_mesh().draw().map_err(plot_err)?;
        chart
            .draw_series(LineSeries::new(circle(0.0, 0.0, radius), BLACK.mix(0.4)))
            .map_err(plot_err)?;
        for i in 0..arr.count() {
            let a = arr.normal(i);
            if let Some(seg) = clip_line([a[0], a[1]], arr.offsets()[i], half) {
                chart
                    .draw_series(LineSeries::new(seg, BLUE.stroke_width(2)))
                    .map_err(plot_err)?;
            }
        }
        for &(x, y) in centers {
            chart
                .draw_series(LineSeries::new(circle(x, y, 1.0), RED.stroke_width(2)))
                .map_err(plot_err)?;
            chart
                .draw_series(std::iter::once(Circle::new((x, y), 2, RED.filled())))
                .map_err(plot_err)?;
        }
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

pub struct Curve<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Rate against power, one line per curve.
pub fn curves_svg(curves: &[Curve<'_>], x_label: &str, y_label: &str) -> anyhow::Result<String> {
    let xs = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0));
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let y_hi = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.1))
        .fold(0.0_f64, f64::max);
    let (x_lo, x_hi) = if x_lo < x_hi { (x_lo, x_hi) } else { (x_lo - 1.0, x_lo + 1.0) };
    let y_hi = if y_hi > 0.0 { 1.05 * y_hi } else { 1.0 };

    let palette = [RED, BLUE, GREEN, MAGENTA, CYAN, BLACK];
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, CURVE_SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .margin(16)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .build_cartesian_2d(x_lo..x_hi, 0.0..y_hi)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc(x_label)
            .y_desc(y_label)
            .draw()
            .map_err(plot_err)?;
        for (k, c) in curves.iter().enumerate() {
            let color = palette[k % palette.len()];
            chart
                .draw_series(LineSeries::new(c.points.clone(), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(c.label)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .position(SeriesLabelPosition::UpperLeft)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping() {
        let [p, q] = clip_line([1.0, 0.0], 0.5, 2.0).unwrap();
        assert!((p.0 - 0.5).abs() < 1e-12 && (q.0 - 0.5).abs() < 1e-12);
        assert!((p.1.abs() - 2.0).abs() < 1e-12 && (q.1.abs() - 2.0).abs() < 1e-12);
        assert!(clip_line([0.0, 1.0], 3.0, 2.0).is_none());
        assert!(clip_line([1.0, 1.0], 10.0, 2.0).is_none());
    }

    #[test]
    fn renders_svg() {
        let arr = crate::instances::select_layout();
        let svg = packing_svg(&arr, 5.0, &[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        assert!(svg.starts_with("<svg"));
        let svg = curves_svg(
            &[Curve { label: "a", points: vec![(0.0, 1.0), (10.0, 2.0)] }],
            "power (dB)",
            "rate (bits)",
        )
        .unwrap();
        assert!(svg.contains("</svg>"));
    }
}
