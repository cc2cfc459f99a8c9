//! Minimal static SVG charts. Each chart embeds its data as a CSV comment.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::blockmodel::BlockMetaGraph;

const W: f64 = 720.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(title: &str, data_csv: &str, w: f64, h: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, "<!-- data\n{}-->", data_csv.replace("--", "- -"));
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, y_max: f64, y_label: &str) {
    let (x0, y0, y1) = (LEFT, H - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} V{y0} H{}" stroke="black" fill="none"/>"#,
        W - RIGHT
    );
    for k in 0..=4 {
        let v = y_max * k as f64 / 4.0;
        let y = y0 - (y0 - y1) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0,
            trim_num(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn trim_num(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn legend(s: &mut String, names: &[&str]) {
    for (i, n) in names.iter().enumerate() {
        let y = TOP + 16.0 * i as f64;
        let x = W - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{}" y="{:.1}">{}</text>"#,
            y,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            y + 9.0,
            escape(n)
        );
    }
}

fn nice_max(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= v {
            return m * mag;
        }
    }
    10.0 * mag
}

/// One polyline per series over shared x labels.
pub fn line_chart(
    title: &str,
    y_label: &str,
    x: &[String],
    series: &[(&str, Vec<f64>)],
    data_csv: &str,
) -> String {
    let mut s = open(title, data_csv, W, H);
    let y_max = nice_max(
        series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(0.0, f64::max),
    );
    axes(&mut s, y_max, y_label);
    let plot_w = W - LEFT - RIGHT;
    let step = if x.len() > 1 { plot_w / (x.len() - 1) as f64 } else { 0.0 };
    let px = |i: usize| LEFT + step * i as f64;
    let py = |v: f64| H - BOTTOM - (H - TOP - BOTTOM) * v / y_max;
    let every = x.len().div_ceil(12).max(1);
    for (i, label) in x.iter().enumerate() {
        if i % every == 0 {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                px(i),
                H - BOTTOM + 16.0,
                escape(label)
            );
        }
    }
    for (k, (_, v)) in series.iter().enumerate() {
        let pts: Vec<String> = v
            .iter()
            .enumerate()
            .map(|(i, &y)| format!("{:.1},{:.1}", px(i), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            PALETTE[k % PALETTE.len()]
        );
    }
    legend(&mut s, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Grouped bars: `values[group][series]`.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    groups: &[String],
    series: &[&str],
    values: &[Vec<f64>],
    data_csv: &str,
) -> String {
    let mut s = open(title, data_csv, W, H);
    let y_max = nice_max(values.iter().flatten().copied().fold(0.0, f64::max));
    axes(&mut s, y_max, y_label);
    let plot_w = W - LEFT - RIGHT;
    let gw = plot_w / groups.len().max(1) as f64;
    let bw = gw * 0.8 / series.len().max(1) as f64;
    for (g, label) in groups.iter().enumerate() {
        let gx = LEFT + gw * g as f64 + gw * 0.1;
        for (k, &v) in values[g].iter().enumerate() {
            let h = (H - TOP - BOTTOM) * v / y_max;
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                gx + bw * k as f64,
                H - BOTTOM - h,
                bw,
                h,
                PALETTE[k % PALETTE.len()]
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            gx + gw * 0.4,
            H - BOTTOM + 16.0,
            escape(label)
        );
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    s
}

/// Blocks on a circle; node area follows `node_weight`, arrow width
/// follows p. Hidden pairs are not drawn.
pub fn meta_graph_svg(
    title: &str,
    meta: &BlockMetaGraph,
    labels: &[String],
    node_weight: &[f64],
    data_csv: &str,
) -> String {
    let (w, h) = (480.0, 480.0);
    let mut s = open(title, data_csv, w, h);
    let _ = writeln!(
        s,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#555"/></marker></defs>"##
    );
    let nb = meta.sizes.len();
    let (cx, cy, ring) = (w / 2.0, h / 2.0 + 10.0, 150.0);
    let max_w = node_weight.iter().copied().fold(0.0, f64::max);
    let radius = |b: usize| {
        if max_w > 0.0 {
            12.0 + 28.0 * (node_weight[b] / max_w).sqrt()
        } else {
            20.0
        }
    };
    let pos = |b: usize| {
        if nb == 1 {
            return (cx, cy);
        }
        let a = 2.0 * PI * b as f64 / nb as f64 - PI / 2.0;
        (cx + ring * a.cos(), cy + ring * a.sin())
    };
    let p_max = meta.visible().map(|e| e.p).fold(0.0, f64::max);
    for e in meta.visible() {
        let width = 1.0 + 7.0 * e.p / p_max;
        let (x1, y1) = pos(e.r);
        if e.r == e.s {
            let r = radius(e.r);
            let _ = writeln!(
                s,
                r##"<circle cx="{:.1}" cy="{:.1}" r="{:.1}" fill="none" stroke="#555" stroke-width="{width:.2}"/>"##,
                x1,
                y1 - r,
                r * 0.6
            );
            continue;
        }
        let (x2, y2) = pos(e.s);
        let len = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
        let (ux, uy) = ((x2 - x1) / len, (y2 - y1) / len);
        // offset sideways so r->s and s->r do not overlap
        let (ox, oy) = (-uy * 5.0, ux * 5.0);
        let (r1, r2) = (radius(e.r), radius(e.s));
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#555" stroke-width="{width:.2}" marker-end="url(#arrow)"/>"##,
            x1 + ux * r1 + ox,
            y1 + uy * r1 + oy,
            x2 - ux * r2 + ox,
            y2 - uy * r2 + oy
        );
    }
    for b in 0..nb {
        let (x, y) = pos(b);
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="{:.1}" fill="{}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
            radius(b),
            PALETTE[b % PALETTE.len()],
            y + 5.0,
            escape(&labels[b])
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_shapes() {
        let x = vec!["2000".to_owned(), "2001".to_owned()];
        let svg = line_chart("t", "y", &x, &[("a", vec![0.2, 0.4])], "year,a\n");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        let svg = bar_chart("t", "%", &x, &["a", "b"], &[vec![1.0, 2.0], vec![3.0, 0.0]], "");
        assert_eq!(svg.matches("<rect x=").count(), 4 + 2);
    }

    #[test]
    fn nice_axis() {
        assert_eq!(nice_max(0.0), 1.0);
        assert_eq!(nice_max(0.62), 1.0);
        assert_eq!(nice_max(43.0), 50.0);
        assert_eq!(nice_max(0.19), 0.2);
    }
}
