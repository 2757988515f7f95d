//! SVG line charts from curve CSVs.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

struct Series {
    name: String,
    mean: Vec<f64>,
    std: Option<Vec<f64>>,
}

fn read_series(csv_path: &Path) -> Result<(Vec<f64>, Vec<Series>)> {
    let mut r = csv::Reader::from_path(csv_path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("t") {
        return Err(Error::Format(format!(
            "{}: first column must be t",
            csv_path.display()
        )));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for rec in r.records() {
        let rec = rec?;
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            col.push(field.parse().unwrap_or(f64::NAN));
        }
    }
    let mut series = Vec::new();
    for (i, name) in header.iter().enumerate().skip(1) {
        if name.ends_with("_std") {
            continue;
        }
        let base = name.strip_suffix("_mean").unwrap_or(name);
        let std = header
            .iter()
            .position(|h| *h == format!("{base}_std"))
            .map(|j| columns[j].clone());
        series.push(Series {
            name: base.to_string(),
            mean: columns[i].clone(),
            std,
        });
    }
    Ok((columns.swap_remove(0), series))
}

/// Render every `<name>_mean` column of a CSV whose first column is `t` as
/// a line, shading `<name>_std` bands where present. Plain value columns
/// are drawn as lines too.
pub fn plot_csv(csv_path: &Path, svg_path: &Path, title: &str) -> Result<()> {
    let (t, series) = read_series(csv_path)?;
    if t.is_empty() || series.is_empty() {
        return Err(Error::Format(format!(
            "{}: no data to plot",
            csv_path.display()
        )));
    }
    let finite = |x: &f64| x.is_finite();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &series {
        for (i, m) in s.mean.iter().enumerate().filter(|(_, m)| finite(m)) {
            let sd = s.std.as_ref().map_or(0.0, |v| v[i]);
            lo = lo.min(m - sd);
            hi = hi.max(m + sd);
        }
    }
    if !lo.is_finite() {
        return Err(Error::Format(format!(
            "{}: no finite values",
            csv_path.display()
        )));
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let (x0, x1) = (t[0], *t.last().unwrap_or(&t[0]));
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };

    let draw = || -> std::result::Result<(), Box<dyn std::error::Error>> {
        let root = SVGBackend::new(svg_path, (800, 500)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(10)
            .x_label_area_size(35)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, lo..hi)?;
        chart.configure_mesh().x_desc("t").draw()?;
        for (idx, s) in series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            if let Some(sd) = &s.std {
                let upper = t.iter().zip(&s.mean).zip(sd).map(|((&x, m), d)| (x, m + d));
                let lower = t
                    .iter()
                    .zip(&s.mean)
                    .zip(sd)
                    .rev()
                    .map(|((&x, m), d)| (x, m - d));
                let band: Vec<(f64, f64)> =
                    upper.chain(lower).filter(|p| p.1.is_finite()).collect();
                chart.draw_series(std::iter::once(Polygon::new(band, color.mix(0.2))))?;
            }
            let line = t
                .iter()
                .zip(&s.mean)
                .filter(|(_, m)| m.is_finite())
                .map(|(&x, &m)| (x, m));
            chart
                .draw_series(LineSeries::new(line, color.stroke_width(2)))?
                .label(s.name.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()?;
        root.present()?;
        Ok(())
    };
    draw().map_err(|e| Error::Format(format!("plot {}: {e}", svg_path.display())))
}
