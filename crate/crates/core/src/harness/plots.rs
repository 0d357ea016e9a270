//! Hand-written SVG figures. Coordinates are printed with fixed precision
//! so repeated runs produce byte-identical files.

use std::fmt::Write as _;

use super::{BenchReport, Outcome, SortKey};
use crate::analytics::{Dendrogram, DistanceMatrix, PairHistogram};

/// Values with magnitude below `10^SYMLOG_FLOOR_EXP` plot on the zero line.
pub const SYMLOG_FLOOR_EXP: f64 = -15.0;

/// Signed number of decades above the floor, used as the plot ordinate.
pub fn symlog_offset(value: f64) -> f64 {
    let magnitude = value.abs();
    if magnitude == 0.0 || magnitude.log10() <= SYMLOG_FLOOR_EXP {
        0.0
    } else {
        value.signum() * (magnitude.log10() - SYMLOG_FLOOR_EXP)
    }
}

fn color(outcome: Option<Outcome>) -> &'static str {
    match outcome {
        Some(Outcome::Win) => "#1f77b4",
        Some(Outcome::Tie) => "#2ca02c",
        Some(Outcome::Loss) => "#d62728",
        None => "#7f7f7f",
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 110.0;

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(out, r##"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"##, width / 2.0, escape(title));
}

fn x_positions(count: usize) -> impl Fn(usize) -> f64 {
    let span = WIDTH - LEFT - RIGHT;
    move |k| LEFT + span * (k as f64 + 0.5) / count.max(1) as f64
}

fn x_label(out: &mut String, x: f64, name: &str) {
    let y = HEIGHT - BOTTOM + 12.0;
    let _ = writeln!(
        out,
        r##"<text x="{x:.2}" y="{y:.2}" transform="rotate(60 {x:.2} {y:.2})">{}</text>"##,
        escape(name)
    );
}

/// Relative delta energy per instance on a symmetric log axis. Positive
/// values (wins) sit above the zero line, losses below, exact ties on it.
pub fn rde_svg(report: &BenchReport, key: SortKey) -> String {
    let order = report.sorted_indices(key);
    let offsets: Vec<Option<f64>> =
        order.iter().map(|&k| report.instances[k].relative_delta_energy.map(symlog_offset)).collect();
    let extent = offsets.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs())).ceil();
    let plot_h = HEIGHT - TOP - BOTTOM;
    let zero = TOP + plot_h / 2.0;
    let y_of = |v: f64| zero - v / extent * (plot_h / 2.0);
    let x_of = x_positions(order.len());

    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, &format!("Relative delta energy by {}", key.slug().replace('-', " ")));
    let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="black" data-role="axis"/>"##, WIDTH - RIGHT);
    let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/>"##, TOP + plot_h);
    let step = (extent / 5.0).ceil().max(1.0);
    let mut d = step;
    while d <= extent {
        let label = format!("1e{}", (d + SYMLOG_FLOOR_EXP) as i64);
        for (sign, prefix) in [(1.0, ""), (-1.0, "-")] {
            let y = y_of(sign * d);
            let _ = writeln!(out, r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT, WIDTH - RIGHT);
            let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{prefix}{label}</text>"##, LEFT - 4.0, y + 4.0);
        }
        d += step;
    }
    let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">0</text>"##, LEFT - 4.0, zero + 4.0);
    for (pos, (&k, offset)) in order.iter().zip(&offsets).enumerate() {
        let row = &report.instances[k];
        let x = x_of(pos);
        match (row.relative_delta_energy, offset) {
            (Some(rde), Some(v)) => {
                let _ = writeln!(
                    out,
                    r##"<circle cx="{x:.2}" cy="{:.2}" r="4" fill="{}" data-name="{}" data-rde="{rde:e}"/>"##,
                    y_of(*v),
                    color(row.outcome),
                    escape(&row.name)
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle" fill="{}" data-name="{}">?</text>"##,
                    zero + 4.0,
                    color(None),
                    escape(&row.name)
                );
            }
        }
        x_label(&mut out, x, &row.name);
    }
    out.push_str("</svg>\n");
    out
}

/// First-found (upward triangle) and end (downward triangle) times of the
/// selected repeat for each instance.
pub fn time_markers_svg(report: &BenchReport, key: SortKey) -> String {
    let order = report.sorted_indices(key);
    let max_t = order
        .iter()
        .filter_map(|&k| report.instances[k].selected().map(|r| r.end_time))
        .fold(report.time_limit.max(1e-3), f64::max);
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = TOP + plot_h;
    let y_of = |t: f64| base - t / max_t * plot_h;
    let x_of = x_positions(order.len());

    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, "Time to best sample and search end");
    let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"##, WIDTH - RIGHT);
    let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base:.2}" stroke="black"/>"##);
    for tick in 0..=4 {
        let t = max_t * f64::from(tick) / 4.0;
        let y = y_of(t);
        let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.1} s</text>"##, LEFT - 4.0, y + 4.0);
    }
    for (pos, &k) in order.iter().enumerate() {
        let row = &report.instances[k];
        let x = x_of(pos);
        if let Some(rep) = row.selected() {
            let fill = color(row.outcome);
            let (y0, y1) = (y_of(rep.first_found_time), y_of(rep.end_time));
            let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="{fill}" stroke-opacity="0.5"/>"##);
            let _ = writeln!(
                out,
                r##"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="{fill}" data-name="{}" data-first-found="{:e}"/>"##,
                x - 5.0, y0 + 4.0, x + 5.0, y0 + 4.0, x, y0 - 5.0,
                escape(&row.name),
                rep.first_found_time
            );
            let _ = writeln!(
                out,
                r##"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="none" stroke="{fill}" data-end="{:e}"/>"##,
                x - 5.0, y1 - 4.0, x + 5.0, y1 - 4.0, x, y1 + 5.0,
                rep.end_time
            );
        }
        x_label(&mut out, x, &row.name);
    }
    out.push_str("</svg>\n");
    out
}

/// Most heatmap cells drawn per side; larger matrices are block-averaged.
const MAX_CELLS: usize = 150;

/// Dendrogram over a heatmap of the reordered distance matrix, with the
/// pair-distance histogram beside it.
pub fn diversity_svg(
    title: &str,
    distances: &DistanceMatrix,
    dendrogram: &Dendrogram,
    histogram: &PairHistogram,
) -> String {
    let (w, h) = (900.0, 620.0);
    let (map_x, map_y, map_side) = (40.0, 200.0, 400.0);
    let mut out = String::new();
    header(&mut out, w, h, title);

    let k = distances.size();
    let ordered = distances.reordered(&dendrogram.leaf_order);
    let max_d = (0..k).flat_map(|a| ordered.row(a).iter().copied()).max().unwrap_or(0).max(1);
    if k > 0 {
        let cells = k.min(MAX_CELLS);
        let cell = map_side / cells as f64;
        let block = |c: usize| (c * k / cells, ((c + 1) * k / cells).max(c * k / cells + 1));
        for r in 0..cells {
            let (r0, r1) = block(r);
            for c in 0..cells {
                let (c0, c1) = block(c);
                let mut sum = 0u64;
                for a in r0..r1 {
                    sum += ordered.row(a)[c0..c1].iter().map(|&d| u64::from(d)).sum::<u64>();
                }
                let mean = sum as f64 / ((r1 - r0) * (c1 - c0)) as f64;
                let shade = (255.0 * (1.0 - mean / f64::from(max_d))).round() as u8;
                let _ = writeln!(
                    out,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"##,
                    map_x + c as f64 * cell,
                    map_y + r as f64 * cell,
                    cell + 0.01,
                    cell + 0.01
                );
            }
        }
    }

    // dendrogram in the band above the heatmap
    if !dendrogram.merges.is_empty() {
        let (top, bottom) = (40.0, map_y - 10.0);
        let max_h = dendrogram.merges.iter().fold(0.0f64, |m, g| m.max(g.height)).max(1e-12);
        let mut x_of_leaf = vec![0.0; k];
        for (pos, &leaf) in dendrogram.leaf_order.iter().enumerate() {
            x_of_leaf[leaf] = map_x + map_side * (pos as f64 + 0.5) / k as f64;
        }
        // (x, y) of each node's top
        let mut node: Vec<(f64, f64)> = x_of_leaf.iter().map(|&x| (x, bottom)).collect();
        for m in &dendrogram.merges {
            let (xa, ya) = node[m.cluster_a];
            let (xb, yb) = node[m.cluster_b];
            let y = bottom - (bottom - top) * m.height / max_h;
            let _ = writeln!(
                out,
                r##"<path d="M{xa:.2},{ya:.2} V{y:.2} H{xb:.2} V{yb:.2}" fill="none" stroke="black" stroke-width="0.6"/>"##
            );
            node.push(((xa + xb) / 2.0, y));
        }
    }

    // histogram panel
    let (hx, hy, hw, hh) = (500.0, 200.0, 360.0, 400.0);
    let _ = writeln!(out, r##"<line x1="{hx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"##, hy + hh, hx + hw, hy + hh);
    let max_count = histogram.counts.values().copied().max().unwrap_or(0).max(1);
    let max_dist = distances.num_bits().max(1);
    let bar_w = (hw / (max_dist + 1) as f64).max(0.5);
    for (&d, &c) in &histogram.counts {
        let bh = hh * c as f64 / max_count as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{bar_w:.2}" height="{bh:.2}" fill="#1f77b4" data-distance="{d}" data-pairs="{c}"/>"##,
            hx + hw * f64::from(d) / (max_dist + 1) as f64,
            hy + hh - bh
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">Hamming distance (0 to {max_dist}), {} pairs</text>"##,
        hx + hw / 2.0,
        hy + hh + 16.0,
        histogram.total()
    );
    out.push_str("</svg>\n");
    out
}
