//! Plot-script emission: a self-contained gnuplot file drawing ratio_J and
//! ratio_I against N on log-log axes. Byte-identical output for identical
//! records and paths.

use std::path::Path;

use sievelab::verify::ExperimentRecord;

use crate::CliError;

pub fn render_plot_script(
    records: &[ExperimentRecord],
    csv_ref: &str,
    png_name: &str,
) -> Result<String, CliError> {
    if records.len() < 2 {
        return Err(CliError::Validation(format!(
            "plot script needs at least 2 records, got {}",
            records.len()
        )));
    }
    let n_lo = records.first().map(|r| r.n).unwrap_or_default();
    let n_hi = records.last().map(|r| r.n).unwrap_or_default();
    let mut s = String::new();
    s.push_str("# gnuplot script generated by sievelab experiment\n");
    s.push_str(&format!(
        "# {} grid cells, N from {} to {}\n",
        records.len(),
        n_lo,
        n_hi
    ));
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{png_name}'\n"));
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'N'\n");
    s.push_str("set ylabel 'integral / (N h^2)'\n");
    s.push_str("set key top right\n");
    s.push_str(&format!(
        "plot '{csv_ref}' using 'N':'ratio_J' with linespoints lw 2 title 'J/(N h^2)', \\\n     '{csv_ref}' using 'N':'ratio_I' with linespoints lw 2 title 'I/(N h^2)'\n"
    ));
    Ok(s)
}

/// How the plot script should refer to the CSV: by bare file name when the
/// two land in the same directory, by the given path otherwise.
pub fn csv_reference(csv_path: &Path, plot_path: &Path) -> String {
    if csv_path.parent() == plot_path.parent() {
        if let Some(name) = csv_path.file_name() {
            return name.to_string_lossy().into_owned();
        }
    }
    csv_path.to_string_lossy().into_owned()
}

/// The PNG the script writes: plot path with extension swapped for `.png`.
pub fn png_name(plot_path: &Path) -> String {
    plot_path
        .with_extension("png")
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "grid.png".into())
}
