use std::path::Path;

use plotters::prelude::*;

/// Draws best objective against epoch as an SVG line chart.
pub fn convergence_svg(path: &Path, series: &[(usize, f64)]) -> Result<(), Box<dyn std::error::Error>> {
    let root = SVGBackend::new(path, (640, 400)).into_drawing_area();
    root.fill(&WHITE)?;
    let x_max = series.last().map_or(1, |p| p.0.max(1));
    let (lo, hi) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let pad = ((hi - lo) * 0.05).max(hi.abs() * 1e-6).max(1e-9);
    let mut chart = ChartBuilder::on(&root).margin(20).build_cartesian_2d(0..x_max, (lo - pad)..(hi + pad))?;
    chart.draw_series(LineSeries::new(series.iter().copied(), &BLUE))?;
    root.present()?;
    Ok(())
}
