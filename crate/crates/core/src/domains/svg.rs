use std::collections::BTreeMap;
use std::fmt::Write;

use super::{RuleDomain, SymbolicState};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

/// Top-down drawing: stations as labelled squares, objects as discs placed at
/// the station named by their `at` attribute, other attributes as captions.
pub(super) fn draw(domain: &RuleDomain, state: &SymbolicState) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in domain.stations.values() {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-6);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let px = |x: f64| MARGIN + (x - x0) * scale;
    // SVG y grows downwards; flip so +y is up on the page.
    let py = |y: f64| SIZE - MARGIN - (y - y0) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fafafa"/>"##);
    for (name, p) in &domain.stations {
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="28" height="28" fill="none" stroke="#999"/><text x="{:.1}" y="{:.1}" font-size="9" fill="#777">{}</text>"##,
            px(p[0]) - 14.0,
            py(p[1]) - 14.0,
            px(p[0]) - 14.0,
            py(p[1]) + 24.0,
            escape(name)
        );
    }

    let mut occupancy: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, (object, attrs)) in state.0.iter().enumerate() {
        let Some(at) = attrs.get("at") else { continue };
        let Some(p) = domain.stations.get(at) else { continue };
        let slot = occupancy.entry(at.as_str()).or_default();
        let (cx, cy) = (px(p[0]), py(p[1]) - 10.0 * *slot as f64);
        *slot += 1;
        let caption: Vec<String> = attrs
            .iter()
            .filter(|(k, _)| k.as_str() != "at")
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let _ = writeln!(
            out,
            r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="6" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="10">{}{}</text>"##,
            PALETTE[i % PALETTE.len()],
            cx + 9.0,
            cy + 3.0,
            escape(object),
            if caption.is_empty() {
                String::new()
            } else {
                format!(" ({})", escape(&caption.join(", ")))
            }
        );
    }
    for (object, attrs) in &state.0 {
        if !attrs.contains_key("at") {
            let summary: Vec<String> = attrs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                r#"<desc>{}: {}</desc>"#,
                escape(object),
                escape(&summary.join(", "))
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
