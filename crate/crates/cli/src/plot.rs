//! SVG plots derived from the CSV results; never parsed back.

use std::path::Path;

use plotters::prelude::*;

use crate::CliError;

fn plot_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("plot output failed: {e}"))
}

/// Log-magnitude impedance spectrum with detected peaks (circles) and
/// eigen-frequency markers (vertical lines).
pub fn plot_sweep(
    path: &Path,
    frequencies_hz: &[f64],
    magnitudes: &[f64],
    peaks: &[(f64, f64)],
    eigenfrequencies_hz: &[f64],
) -> Result<(), CliError> {
    let finite: Vec<(f64, f64)> = frequencies_hz
        .iter()
        .zip(magnitudes)
        .filter(|(_, m)| m.is_finite() && **m > 0.0)
        .map(|(f, m)| (*f, *m))
        .collect();
    if finite.len() < 2 {
        return Err(CliError::Numerical(
            "plot needs at least two finite spectrum points".into(),
        ));
    }
    let f_min = finite.first().unwrap().0;
    let f_max = finite.last().unwrap().0;
    let m_min = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let m_max = finite.iter().map(|p| p.1).fold(0.0f64, f64::max);

    let root = SVGBackend::new(path, (1024, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_error)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .caption("input impedance magnitude", ("sans-serif", 22))
        .build_cartesian_2d(f_min..f_max, (m_min * 0.8..m_max * 1.25).log_scale())
        .map_err(plot_error)?;
    chart
        .configure_mesh()
        .x_desc("frequency / Hz")
        .y_desc("|Z0| / ohm")
        .draw()
        .map_err(plot_error)?;

    for &f in eigenfrequencies_hz {
        chart
            .draw_series(LineSeries::new(
                [(f, m_min * 0.8), (f, m_max * 1.25)],
                BLACK.mix(0.4).stroke_width(1),
            ))
            .map_err(plot_error)?;
    }
    chart
        .draw_series(LineSeries::new(finite, BLUE.stroke_width(2)))
        .map_err(plot_error)?
        .label("|Z0(f)|");
    chart
        .draw_series(
            peaks
                .iter()
                .map(|&(f, m)| Circle::new((f, m), 5, RED.filled())),
        )
        .map_err(plot_error)?;

    root.present().map_err(plot_error)?;
    Ok(())
}

/// Per-mode relative peak deviation against series resistance, log-log.
pub fn plot_damping(
    path: &Path,
    resistances: &[f64],
    deviations_per_mode: &[Vec<Option<f64>>],
) -> Result<(), CliError> {
    let all: Vec<f64> = deviations_per_mode
        .iter()
        .flatten()
        .filter_map(|d| d.map(f64::abs))
        .filter(|d| *d > 0.0)
        .collect();
    if all.is_empty() || resistances.len() < 2 {
        return Err(CliError::Numerical(
            "plot needs at least two resistances with matched peaks".into(),
        ));
    }
    let d_min = all.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = all.iter().copied().fold(0.0f64, f64::max);

    let root = SVGBackend::new(path, (1024, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_error)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .caption("peak deviation vs damping", ("sans-serif", 22))
        .build_cartesian_2d(
            (resistances[0]..resistances[resistances.len() - 1]).log_scale(),
            (d_min * 0.5..d_max * 2.0).log_scale(),
        )
        .map_err(plot_error)?;
    chart
        .configure_mesh()
        .x_desc("series resistance / ohm")
        .y_desc("|relative deviation|")
        .draw()
        .map_err(plot_error)?;

    let palette = [BLUE, RED, GREEN, MAGENTA, CYAN, BLACK];
    let mode_count = deviations_per_mode.len();
    for mode in 0..mode_count {
        let series: Vec<(f64, f64)> = resistances
            .iter()
            .zip(&deviations_per_mode[mode])
            .filter_map(|(&r, d)| d.map(|d| (r, d.abs().max(1e-300))))
            .collect();
        if series.is_empty() {
            continue;
        }
        let color = palette[mode % palette.len()];
        chart
            .draw_series(LineSeries::new(series.clone(), color.stroke_width(2)))
            .map_err(plot_error)?;
        chart
            .draw_series(series.iter().map(|&p| Circle::new(p, 4, color.filled())))
            .map_err(plot_error)?;
    }
    root.present().map_err(plot_error)?;
    Ok(())
}
