//! One function per subcommand. Each returns the rendered table so the
//! binary stays a thin argument-parsing shell.

use std::fs;
use std::path::{Path, PathBuf};

use overcoupled::{
    classify_modes, damping_study, detect_peaks, dispersion_curve, fit_coupling,
    identical_coupled_frequencies, match_peaks_to_modes, solve_modes, sweep, DriveSpec, PeakList,
    SplitPair, DEFAULT_NODE_TOLERANCE, DEFAULT_PROMINENCE_FLOOR,
};
use std::f64::consts::TAU;

use crate::config::{load_config, LoadedConfig};
use crate::plot;
use crate::table::{int, num, Table};
use crate::CliError;

/// Write-or-print plus the optional derived plot path.
pub struct Output {
    pub table: Table,
    pub plot_written: Option<PathBuf>,
}

fn write_table(table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, table.render())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    }
}

/// Plot path: beside --out when given, else beside the config file.
fn derived_plot_path(out: Option<&Path>, config: &Path) -> PathBuf {
    out.unwrap_or(config).with_extension("svg")
}

fn required_grid(loaded: &LoadedConfig) -> Result<overcoupled::FrequencyGrid, CliError> {
    loaded
        .grid
        .clone()
        .ok_or_else(|| CliError::Config("sweep: section required for this command".into()))
}

fn resolve_drive(loaded: &LoadedConfig, drive_override: Option<usize>) -> Result<usize, CliError> {
    match drive_override {
        None => Ok(loaded.drive_index),
        Some(d) if (1..=loaded.model.len()).contains(&d) => Ok(d - 1),
        Some(d) => Err(CliError::Validation(format!(
            "--drive {d} out of range: must lie in 1..={}",
            loaded.model.len()
        ))),
    }
}

/// Eigen-frequency and mode-shape table with node and degeneracy notes.
pub fn cmd_modes(config: &Path, out: Option<&Path>) -> Result<Output, CliError> {
    let loaded = load_config(config)?;
    let modes = solve_modes(&loaded.model)?;
    let classification = classify_modes(&modes, DEFAULT_NODE_TOLERANCE)?;

    let n = modes.len();
    let mut headers = vec!["mode_index".to_string(), "frequency_Hz".to_string()];
    headers.extend((1..=n).map(|e| format!("v_{e}")));
    let mut table = Table::new(headers);
    for mode in 0..n {
        let mut row = vec![int(mode + 1), num(modes.frequencies_hz()[mode])];
        row.extend((0..n).map(|e| num(modes.mode_shapes()[(e, mode)])));
        table.push_row(row);
    }
    let groups: Vec<String> = modes
        .degeneracy_groups()
        .iter()
        .map(|g| {
            let inner: Vec<String> = g.iter().map(|m| (m + 1).to_string()).collect();
            format!("[{}]", inner.join(" "))
        })
        .collect();
    table.push_footer(format!("degeneracy_groups: {}", groups.join(" ")));
    for mode in 0..n {
        let nodes = classification.nodes(mode);
        if !nodes.is_empty() {
            let elements: Vec<String> = nodes.iter().map(|e| (e + 1).to_string()).collect();
            table.push_footer(format!(
                "nodes: mode {} -> elements {}",
                mode + 1,
                elements.join(" ")
            ));
        }
    }
    write_table(&table, out)?;
    Ok(Output {
        table,
        plot_written: None,
    })
}

/// Full sweep CSV with detected-peak annotations and an optional plot.
pub fn cmd_sweep(
    config: &Path,
    drive_override: Option<usize>,
    out: Option<&Path>,
    want_plot: bool,
) -> Result<Output, CliError> {
    let loaded = load_config(config)?;
    let driven = resolve_drive(&loaded, drive_override)?;
    let grid = required_grid(&loaded)?;
    let drive = DriveSpec { driven, grid };

    let result = sweep(&loaded.model, &drive)?;
    let modes = solve_modes(&loaded.model)?;
    let peaks = detect_peaks(&loaded.model, &drive, DEFAULT_PROMINENCE_FLOOR)?;
    let matched = match_peaks_to_modes(&peaks, &modes, driven)?;

    let n = loaded.model.len();
    let mut headers = vec![
        "frequency_Hz".to_string(),
        "Z_abs_ohm".to_string(),
        "Z_phase_rad".to_string(),
    ];
    for element in 1..=n {
        headers.push(format!("V_abs_{element}"));
        headers.push(format!("V_phase_{element}"));
    }
    let mut table = Table::new(headers);
    for (point, &f) in result.frequencies_hz().iter().enumerate() {
        let z = result.input_impedance()[point];
        let mut row = vec![num(f), num(z.norm()), num(z.arg())];
        for element in 0..n {
            let v = result.element_voltages()[(element, point)];
            row.push(num(v.norm()));
            row.push(num(v.arg()));
        }
        table.push_row(row);
    }

    annotate_peaks(&mut table, &matched);
    let eigen: Vec<String> = modes.frequencies_hz().iter().map(|f| num(*f)).collect();
    table.push_footer(format!("eigenfrequencies_Hz: {}", eigen.join(" ")));
    if !result.singular_points().is_empty() {
        table.push_footer(format!(
            "singular_points: {} lossless grid points skipped",
            result.singular_points().len()
        ));
    }
    write_table(&table, out)?;

    let plot_written = if want_plot {
        let path = derived_plot_path(out, config);
        let peak_markers: Vec<(f64, f64)> = matched
            .peaks()
            .iter()
            .map(|p| (p.frequency_hz, p.magnitude))
            .collect();
        plot::plot_sweep(
            &path,
            result.frequencies_hz(),
            &result.magnitudes(),
            &peak_markers,
            modes.frequencies_hz(),
        )?;
        Some(path)
    } else {
        None
    };
    Ok(Output {
        table,
        plot_written,
    })
}

fn annotate_peaks(table: &mut Table, matched: &PeakList) {
    table.push_footer(format!("peaks: {}", matched.len()));
    table
        .push_footer("peak_index,frequency_Hz,Z_abs_ohm,prominence_ohm,matched_mode,deviation_rel");
    for (i, peak) in matched.peaks().iter().enumerate() {
        let mode = peak
            .matched_mode
            .map(|m| int(m + 1))
            .unwrap_or_else(|| "-".into());
        let deviation = peak.deviation.map(num).unwrap_or_else(|| "-".into());
        table.push_footer(format!(
            "{},{},{},{},{},{}",
            i + 1,
            num(peak.frequency_hz),
            num(peak.magnitude),
            num(peak.prominence),
            mode,
            deviation
        ));
    }
}

/// Closed-form split of an identical pair; with a k range, the dispersion
/// curve with resolvability flags.
pub fn cmd_two_coil(
    l_uh: f64,
    c_pf: f64,
    r_ohm: f64,
    k: f64,
    k_max: Option<f64>,
    steps: usize,
    out: Option<&Path>,
) -> Result<Output, CliError> {
    let inductance = l_uh * 1e-6;
    let capacitance = c_pf * 1e-12;
    let table = match k_max {
        Some(k_max) => dispersion_table(inductance, capacitance, r_ohm, k_max, steps)?,
        None => {
            let pair = identical_coupled_frequencies(inductance, capacitance, k)?;
            let (f_lo, f_hi) = pair.frequencies_hz();
            let recovered = overcoupled::estimate_k_from_split(&pair);
            let mut table = Table::new(
                ["k", "f_plus_Hz", "f_minus_Hz", "k_recovered"]
                    .map(String::from)
                    .to_vec(),
            );
            table.push_row(vec![num(k), num(f_lo), num(f_hi), num(recovered)]);
            table.push_footer(format!(
                "split round trip: |k_recovered - k| = {:.3e}",
                (recovered - k).abs()
            ));
            table
        }
    };
    write_table(&table, out)?;
    Ok(Output {
        table,
        plot_written: None,
    })
}

/// Dispersion curve over a coupling range.
pub fn cmd_dispersion(
    l_uh: f64,
    c_pf: f64,
    r_ohm: f64,
    k_max: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<Output, CliError> {
    let table = dispersion_table(l_uh * 1e-6, c_pf * 1e-12, r_ohm, k_max, steps)?;
    write_table(&table, out)?;
    Ok(Output {
        table,
        plot_written: None,
    })
}

fn dispersion_table(
    inductance: f64,
    capacitance: f64,
    r_ohm: f64,
    k_max: f64,
    steps: usize,
) -> Result<Table, CliError> {
    let curve = dispersion_curve(inductance, capacitance, r_ohm, k_max, steps)?;
    let mut table = Table::new(
        ["k", "f_lower_Hz", "f_upper_Hz", "resolvable"]
            .map(String::from)
            .to_vec(),
    );
    for i in 0..curve.k_values.len() {
        table.push_row(vec![
            num(curve.k_values[i]),
            num(curve.lower_branch_hz[i]),
            num(curve.upper_branch_hz[i]),
            int(curve.resolvable[i] as usize),
        ]);
    }
    if let Some(first) = curve
        .k_values
        .iter()
        .zip(&curve.resolvable)
        .find(|(_, &r)| r)
    {
        table.push_footer(format!("first_resolvable_k: {}", num(*first.0)));
    }
    Ok(table)
}

/// Scalar coupling fit against observed resonant frequencies (MHz).
pub fn cmd_fit_k(
    config: &Path,
    observed_mhz: &[f64],
    bracket: (f64, f64),
    out: Option<&Path>,
) -> Result<Output, CliError> {
    if observed_mhz.is_empty() {
        return Err(CliError::Validation(
            "--observed: at least one frequency required".into(),
        ));
    }
    let loaded = load_config(config)?;
    let observed_hz: Vec<f64> = observed_mhz.iter().map(|f| f * 1e6).collect();
    let fit = fit_coupling(loaded.model.coils(), &observed_hz, bracket)?;

    let mut table = Table::new(["mode_index", "frequency_Hz"].map(String::from).to_vec());
    for (i, f) in fit.frequencies_hz.iter().enumerate() {
        table.push_row(vec![int(i + 1), num(*f)]);
    }
    table.push_footer(format!("k_estimate: {}", num(fit.k)));
    table.push_footer(format!("residual: {}", num(fit.residual)));
    write_table(&table, out)?;
    Ok(Output {
        table,
        plot_written: None,
    })
}

/// Peak-deviation table over a list of uniform series resistances.
pub fn cmd_damping(
    config: &Path,
    r_list: &[f64],
    out: Option<&Path>,
    want_plot: bool,
) -> Result<Output, CliError> {
    let loaded = load_config(config)?;
    let grid = required_grid(&loaded)?;
    let drive = DriveSpec {
        driven: loaded.drive_index,
        grid,
    };
    let rows = damping_study(&loaded.model, r_list, &drive)?;
    let n = loaded.model.len();

    let mut headers = vec!["R_ohm".to_string(), "detected_peaks".to_string()];
    headers.extend((1..=n).map(|m| format!("dev_mode_{m}")));
    let mut table = Table::new(headers);
    for row in &rows {
        let mut cells = vec![num(row.resistance), int(row.detected_peaks)];
        cells.extend(
            row.deviations
                .iter()
                .map(|d| d.map(num).unwrap_or_else(|| "NaN".into())),
        );
        table.push_row(cells);
    }
    let visible = rows.first().map(|r| r.detected_peaks).unwrap_or(0);
    for row in &rows {
        if row.detected_peaks < visible {
            table.push_footer(format!(
                "mode_merge: R = {} detected {} of {} peaks",
                row.resistance, row.detected_peaks, visible
            ));
        }
    }
    write_table(&table, out)?;

    let plot_written = if want_plot {
        let path = derived_plot_path(out, config);
        let per_mode: Vec<Vec<Option<f64>>> = (0..n)
            .map(|mode| rows.iter().map(|row| row.deviations[mode]).collect())
            .collect();
        let resistances: Vec<f64> = rows.iter().map(|r| r.resistance).collect();
        plot::plot_damping(&path, &resistances, &per_mode)?;
        Some(path)
    } else {
        None
    };
    Ok(Output {
        table,
        plot_written,
    })
}

/// Split estimate from two observed frequencies in hertz; used by tests and
/// kept here so the estimate path matches the CLI exactly.
pub fn split_from_hz(f_a: f64, f_b: f64) -> Result<SplitPair, CliError> {
    Ok(SplitPair::new(TAU * f_a, TAU * f_b)?)
}
