use std::path::Path;

use plotters::prelude::*;

use super::sweep::ResultRow;
use crate::{Error, Result};

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

fn draw_error<E: std::error::Error + Send + Sync>(e: DrawingAreaErrorKind<E>) -> Error {
    Error::Internal(format!("plot: {e}"))
}

/// `p_q` against β, one series per size, with error bars and the classically
/// attainable region `p ≤ p_classical` shaded.
pub fn plot_rows(rows: &[ResultRow], path: &Path) -> Result<()> {
    let beta_max = rows.iter().map(|r| r.beta).fold(0.0f64, f64::max).max(0.1);
    let p_cl = rows.first().map_or(0.75, |r| r.p_classical);
    let y_min = rows.iter().map(|r| r.pq_err_lo).fold(0.5f64, f64::min).max(0.0);
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(draw_error)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d(0.0..beta_max * 1.02, y_min..1.02)
        .map_err(draw_error)?;
    chart
        .configure_mesh()
        .x_desc("beta")
        .y_desc("p_q")
        .draw()
        .map_err(draw_error)?;
    chart
        .draw_series(std::iter::once(Rectangle::new(
            [(0.0, y_min), (beta_max * 1.02, p_cl)],
            RGBColor(200, 200, 200).mix(0.4).filled(),
        )))
        .map_err(draw_error)?;
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    for (k, &size) in sizes.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<&ResultRow> = rows.iter().filter(|r| r.size == size).collect();
        let label = pts.first().map_or(String::new(), |r| format!("{} {}", r.game, size));
        chart
            .draw_series(LineSeries::new(pts.iter().map(|r| (r.beta, r.pq)), color.stroke_width(2)))
            .map_err(draw_error)?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
        chart
            .draw_series(pts.iter().filter(|r| r.pq_err_hi > r.pq_err_lo).map(|r| {
                PathElement::new(vec![(r.beta, r.pq_err_lo), (r.beta, r.pq_err_hi)], color)
            }))
            .map_err(draw_error)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(draw_error)?;
    root.present().map_err(draw_error)?;
    Ok(())
}
