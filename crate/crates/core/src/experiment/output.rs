use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{DataSet, PlotKind, Report};

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn file_stem(kind: &str, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    format!("{kind}-{clean}")
}

fn write_csv(path: &Path, set: &DataSet) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&set.columns)?;
    for row in &set.rows {
        w.write_record(row.iter().map(|v| sci(*v)))?;
    }
    w.flush()
}

/// Writes `report.json`, one CSV per data set, and the plot files under
/// `plot/`. Returns the written paths in creation order.
pub fn write_outputs(report: &Report, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    let path = dir.join("report.json");
    fs::write(&path, json + "\n")?;
    written.push(path);
    for r in &report.results {
        for set in &r.data {
            let path = dir.join(format!("{}.csv", file_stem(r.kind.name(), &set.name)));
            write_csv(&path, set)?;
            written.push(path);
        }
    }
    written.extend(emit_plot_data(report, &dir.join("plot"))?);
    Ok(written)
}

/// Plain two-column files: `ln eps` against `ln |value|` for scaling data, one
/// `x` against `|residual|` file per time slice for PDE data. A data set
/// without rows yields a header-only file.
pub fn emit_plot_data(report: &Report, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in &report.results {
        for set in &r.data {
            let stem = file_stem(r.kind.name(), &set.name);
            match set.plot {
                PlotKind::None => {}
                PlotKind::Scaling => {
                    let mut text = String::from("# ln_epsilon ln_abs_value\n");
                    for row in &set.rows {
                        if row[0] > 0.0 && row[1].abs() > 0.0 {
                            text.push_str(&format!("{} {}\n", sci(row[0].ln()), sci(row[1].abs().ln())));
                        }
                    }
                    let path = dir.join(format!("{stem}.dat"));
                    fs::write(&path, text)?;
                    written.push(path);
                }
                PlotKind::Pde => {
                    let header = "# x abs_residual\n";
                    if set.rows.is_empty() {
                        let path = dir.join(format!("{stem}.dat"));
                        fs::write(&path, header)?;
                        written.push(path);
                        continue;
                    }
                    // group by t, keeping first-seen order of slices
                    let mut order: Vec<u64> = Vec::new();
                    let mut slices: BTreeMap<u64, String> = BTreeMap::new();
                    for row in &set.rows {
                        let key = row[1].to_bits();
                        let text = slices.entry(key).or_insert_with(|| {
                            order.push(key);
                            String::from(header)
                        });
                        text.push_str(&format!("{} {}\n", sci(row[0]), sci(row[2].hypot(row[3]))));
                    }
                    for (i, key) in order.iter().enumerate() {
                        let path = dir.join(format!("{stem}-t{i:03}.dat"));
                        fs::write(&path, &slices[key])?;
                        written.push(path);
                    }
                }
            }
        }
    }
    Ok(written)
}
