//! Minimal SVG line plots of entropy against `1/Z`.

use std::fmt::Write;

use super::pipeline::ZScanResult;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 260.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const GAP: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Panel<'a> {
    title: &'a str,
    reference: f64,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn draw_panel(svg: &mut String, p: &Panel, y0: f64) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let (mut lo, mut hi) = (p.reference, p.reference);
    for (_, pts) in &p.series {
        for &(_, y) in pts {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    let pad = ((hi - lo) * 0.1).max(1e-4);
    let (lo, hi) = (lo - pad, hi + pad);
    let sx = |x: f64| LEFT + x * plot_w;
    let sy = |y: f64| y0 + PANEL_HEIGHT * (hi - y) / (hi - lo);

    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{y0}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        y0 - 8.0,
        p.title
    );
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let px = sx(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##,
            y0 + PANEL_HEIGHT,
            y0 + PANEL_HEIGHT + 5.0
        );
        if i % 2 == 0 {
            let _ = writeln!(
                svg,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{x:.1}</text>"#,
                y0 + PANEL_HEIGHT + 18.0
            );
        }
    }
    let step = nice_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let digits = (-step.log10().floor()).max(0.0) as usize;
    while t <= hi {
        let py = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#000"/>"##,
            LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{t:.digits$}</text>"#,
            LEFT - 8.0,
            py + 4.0
        );
        t += step;
    }
    let ry = sy(p.reference);
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{ry:.2}" x2="{:.2}" y2="{ry:.2}" stroke="#555" stroke-dasharray="6,4"/>"##,
        LEFT + plot_w
    );
    for (k, (name, pts)) in p.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = y0 + 20.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12">{name}</text>"#, lx + 26.0, ly + 4.0);
    }
}

/// Two stacked panels, von Neumann entropy above linear entropy, both
/// against `1/Z`, with dashed lines at 1.0 and 0.5.
pub fn entropy_plot(scan: &ZScanResult) -> String {
    let mut vn = Vec::new();
    let mut lin = Vec::new();
    for &state in &scan.config.scan_states {
        let rows = scan.series(state);
        let mut a: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.inv_z, r.s_von_neumann?))).collect();
        let mut b: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.inv_z, r.s_linear?))).collect();
        a.sort_by(|x, y| x.0.total_cmp(&y.0));
        b.sort_by(|x, y| x.0.total_cmp(&y.0));
        vn.push((state.to_string(), a));
        lin.push((state.to_string(), b));
    }
    let height = TOP + 2.0 * PANEL_HEIGHT + GAP + 50.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let top = Panel {
        title: "von Neumann entropy vs 1/Z",
        reference: 1.0,
        series: vn,
    };
    let bottom = Panel {
        title: "linear entropy vs 1/Z",
        reference: 0.5,
        series: lin,
    };
    draw_panel(&mut svg, &top, TOP);
    draw_panel(&mut svg, &bottom, TOP + PANEL_HEIGHT + GAP);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">1/Z</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        height - 8.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_are_round() {
        for (span, step) in [(1.0, 0.2), (0.012, 0.002), (30.0, 5.0)] {
            assert!((nice_step(span) / step - 1.0).abs() < 1e-12);
        }
    }
}
