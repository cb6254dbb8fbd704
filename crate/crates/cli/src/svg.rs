//! Minimal hand-rolled SVG output: learning curves and grid heat maps.
//! CSV remains the authoritative record; these are quick-look renderings.

use advq_core::adversarial::MetricsRow;

use crate::experiment::RepOutcome;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

fn polyline(points: &[(f64, f64)], color: &str, width: f64) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn frame(title: &str, x_label: &str, y_label: &str, y_max: f64, x_max: f64) -> String {
    let mut s = String::new();
    let x0 = MARGIN;
    let y0 = HEIGHT - MARGIN;
    let x1 = WIDTH - MARGIN;
    let y1 = MARGIN;
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    ));
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let y = y0 - frac * (y0 - y1);
        let value = frac * y_max;
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"10\">{value:.2}</text>\n",
            x0 - 6.0,
            y + 3.0
        ));
        let x = x0 + frac * (x1 - x0);
        let xv = frac * x_max;
        s.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">{xv:.0}</text>\n",
            y0 + 14.0
        ));
    }
    s
}

fn scale(points: &[(f64, f64)], x_max: f64, y_max: f64) -> Vec<(f64, f64)> {
    let x0 = MARGIN;
    let y0 = HEIGHT - MARGIN;
    let x1 = WIDTH - MARGIN;
    let y1 = MARGIN;
    points
        .iter()
        .map(|(x, y)| {
            let sx = x0 + (x / x_max.max(1.0)) * (x1 - x0);
            let sy = y0 - (y / y_max).clamp(0.0, 1.0) * (y0 - y1);
            (sx, sy)
        })
        .collect()
}

fn mean_series(outcomes: &[RepOutcome], f: &dyn Fn(&MetricsRow) -> f64) -> Vec<(f64, f64)> {
    let max_len = outcomes.iter().map(|o| o.result.metrics.len()).max().unwrap_or(0);
    (0..max_len)
        .filter_map(|i| {
            let vals: Vec<f64> = outcomes.iter().filter_map(|o| o.result.metrics.get(i)).map(f).collect();
            if vals.is_empty() {
                None
            } else {
                let iter = outcomes.iter().find_map(|o| o.result.metrics.get(i)).map(|m| m.iter)?;
                Some((iter as f64, vals.iter().sum::<f64>() / vals.len() as f64))
            }
        })
        .collect()
}

/// Mean trace distance and mean estimated entanglement entropy vs iteration.
pub fn learning_curves(outcomes: &[RepOutcome]) -> String {
    let dist = mean_series(outcomes, &|m| m.trace_dist);
    let bee = mean_series(outcomes, &|m| m.bee_est);
    let x_max = dist.last().map_or(1.0, |(x, _)| *x);
    let mut body = frame("learning curves (mean over repetitions)", "iteration", "value", 1.0, x_max);
    body.push_str(&polyline(&scale(&dist, x_max, 1.0), "#2a7e43", 1.6));
    body.push_str(&polyline(&scale(&bee, x_max, 1.0), "#2155a8", 1.6));
    let ln2 = std::f64::consts::LN_2;
    body.push_str(&polyline(
        &scale(&[(0.0, ln2), (x_max, ln2)], x_max, 1.0),
        "#999999",
        0.8,
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"40\" font-size=\"11\" fill=\"#2a7e43\">trace distance</text>\n\
         <text x=\"{:.1}\" y=\"54\" font-size=\"11\" fill=\"#2155a8\">BEE estimate</text>\n",
        WIDTH - 190.0,
        WIDTH - 190.0
    ));
    svg_document(&body)
}

/// Several labeled mean-distance curves on one chart.
pub fn comparison_curves(series: &[(String, Vec<(f64, f64)>)]) -> String {
    let palette = ["#2a7e43", "#a8323a", "#2155a8", "#b07a1e", "#6a3fa0"];
    let x_max = series
        .iter()
        .filter_map(|(_, pts)| pts.last().map(|(x, _)| *x))
        .fold(1.0f64, f64::max);
    let mut body = frame("mean trace distance", "iteration", "trace distance", 1.0, x_max);
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        body.push_str(&polyline(&scale(pts, x_max, 1.0), color, 1.6));
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{label}</text>\n",
            WIDTH - 190.0,
            40 + 14 * i
        ));
    }
    svg_document(&body)
}

pub fn mean_distance_series(outcomes: &[RepOutcome]) -> Vec<(f64, f64)> {
    mean_series(outcomes, &|m| m.trace_dist)
}

/// Heat map over (c_g, c_d) cells; values in [0, 1], darker is lower.
pub fn grid_heatmap(gen_layers: &[usize], disc_layers: &[usize], values: &[Vec<f64>]) -> String {
    let cell = 90.0;
    let x0 = 110.0;
    let y0 = 70.0;
    let mut body = String::new();
    body.push_str("<text x=\"20\" y=\"30\" font-size=\"15\">mean final trace distance</text>\n");
    for (i, &cg) in gen_layers.iter().enumerate() {
        for (j, &cd) in disc_layers.iter().enumerate() {
            let v = values[i][j].clamp(0.0, 1.0);
            let tone = (v * 255.0).round() as u8;
            let x = x0 + j as f64 * cell;
            let y = y0 + i as f64 * cell;
            body.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({tone},{},{tone})\" stroke=\"white\"/>\n",
                255 - tone / 3
            ));
            let text_fill = if v > 0.5 { "black" } else { "white" };
            body.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\" fill=\"{text_fill}\">{:.3}</text>\n",
                x + cell / 2.0,
                y + cell / 2.0 + 4.0,
                values[i][j]
            ));
            if i == 0 {
                body.push_str(&format!(
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">c(D)={cd}</text>\n",
                    x + cell / 2.0,
                    y0 - 10.0
                ));
            }
        }
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"12\">c(G)={cg}</text>\n",
            x0 - 10.0,
            y0 + i as f64 * cell + cell / 2.0 + 4.0
        ));
    }
    svg_document(&body)
}

/// Heat map of the absolute values of a density matrix.
pub fn density_heatmap(abs_entries: &[Vec<f64>], title: &str) -> String {
    let dim = abs_entries.len();
    let cell = (360.0 / dim as f64).min(24.0);
    let x0 = 60.0;
    let y0 = 50.0;
    let mut body = format!("<text x=\"20\" y=\"28\" font-size=\"14\">{title}</text>\n");
    let max = abs_entries
        .iter()
        .flat_map(|r| r.iter())
        .fold(1e-12f64, |a, &b| a.max(b));
    for (i, row) in abs_entries.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let tone = 255 - ((v / max).clamp(0.0, 1.0) * 255.0).round() as u8;
            body.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"rgb({tone},{tone},255)\"/>\n",
                x0 + j as f64 * cell,
                y0 + i as f64 * cell
            ));
        }
    }
    svg_document(&body)
}

fn svg_document(body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}
