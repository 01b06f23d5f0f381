use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::Error;

use super::diagram::PersistenceDiagram;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarcodeFormat {
    Text,
    Svg,
}

impl FromStr for BarcodeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Self::Text),
            "svg" => Ok(Self::Svg),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Renders one panel per degree with a bar from birth to death for every
/// pair of persistence at least `min_length`. Essential bars run to the end
/// of the axis with an open-end marker.
pub fn render_barcode(
    diagrams: &[PersistenceDiagram],
    format: BarcodeFormat,
    min_length: f64,
) -> Vec<u8> {
    let shown: Vec<PersistenceDiagram> = diagrams.iter().map(|d| d.filtered(min_length)).collect();
    match format {
        BarcodeFormat::Text => render_text(&shown).into_bytes(),
        BarcodeFormat::Svg => render_svg(&shown).into_bytes(),
    }
}

/// Level range covered by the finite coordinates, widened when degenerate.
fn level_range(diagrams: &[PersistenceDiagram]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in diagrams.iter().flat_map(|d| d.pairs()) {
        hi = hi.max(p.birth);
        lo = lo.min(p.birth);
        if !p.is_essential() {
            lo = lo.min(p.death);
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 0.0 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi)
}

fn render_text(diagrams: &[PersistenceDiagram]) -> String {
    const WIDTH: usize = 60;
    let (lo, hi) = level_range(diagrams);
    let col = |x: f64| {
        (((hi - x) / (hi - lo)) * WIDTH as f64)
            .round()
            .clamp(0.0, WIDTH as f64) as usize
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# level axis runs from {hi} (left) down to {lo} (right)"
    );
    for d in diagrams {
        let _ = writeln!(out, "H{} ({} bars)", d.degree(), d.len());
        for p in d.pairs() {
            let start = col(p.birth);
            let (end, tail) = if p.is_essential() {
                (WIDTH, ">")
            } else {
                (col(p.death).max(start + 1), "|")
            };
            let death = if p.is_essential() {
                "-inf".to_string()
            } else {
                format!("{:.6}", p.death)
            };
            let _ = writeln!(
                out,
                "{:>12.6} {:>12} {}{}{}",
                p.birth,
                death,
                " ".repeat(start),
                "=".repeat(end - start),
                tail
            );
        }
    }
    out
}

fn render_svg(diagrams: &[PersistenceDiagram]) -> String {
    const WIDTH: f64 = 640.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 30.0;
    const BAR: f64 = 6.0;
    const GAP: f64 = 3.0;
    const HEADER: f64 = 28.0;
    let (lo, hi) = level_range(diagrams);
    let span = WIDTH - LEFT - RIGHT;
    let x = |v: f64| LEFT + (hi - v) / (hi - lo) * span;
    let panel_height = |d: &PersistenceDiagram| HEADER + d.len() as f64 * (BAR + GAP) + 10.0;
    let height = 40.0 + diagrams.iter().map(panel_height).sum::<f64>();

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="16" font-family="sans-serif" font-size="11">level {hi:.4} → {lo:.4} (decreasing left to right)</text>"#
    );
    let mut y = 30.0;
    for d in diagrams {
        let _ = writeln!(
            s,
            r#"<text x="8" y="{:.1}" font-family="sans-serif" font-size="13" font-weight="bold">H{}</text>"#,
            y + 14.0,
            d.degree()
        );
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#999" stroke-width="0.5"/>"##,
            y + 20.0,
            LEFT + span,
            y + 20.0
        );
        let mut by = y + HEADER;
        for p in d.pairs() {
            let x0 = x(p.birth);
            let x1 = if p.is_essential() {
                LEFT + span
            } else {
                x(p.death).max(x0 + 1.0)
            };
            let _ = writeln!(
                s,
                r##"<rect x="{x0:.2}" y="{by:.1}" width="{:.2}" height="{BAR}" fill="#3465a4"/>"##,
                x1 - x0
            );
            if p.is_essential() {
                let _ = writeln!(
                    s,
                    r##"<polygon points="{:.2},{:.1} {:.2},{:.1} {:.2},{:.1}" fill="#3465a4"/>"##,
                    x1,
                    by - 2.0,
                    x1 + 8.0,
                    by + BAR / 2.0,
                    x1,
                    by + BAR + 2.0
                );
            }
            by += BAR + GAP;
        }
        y += panel_height(d);
    }
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::diagram::Pair;

    #[test]
    fn unknown_format() {
        assert!(matches!(
            "png".parse::<BarcodeFormat>(),
            Err(Error::UnsupportedFormat(_))
        ));
        assert_eq!("SVG".parse::<BarcodeFormat>().unwrap(), BarcodeFormat::Svg);
    }

    #[test]
    fn empty_document_is_valid() {
        let svg = String::from_utf8(render_barcode(&[], BarcodeFormat::Svg, 0.0)).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<rect x="));
        let text = String::from_utf8(render_barcode(&[], BarcodeFormat::Text, 0.0)).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn essential_bar_runs_to_the_edge() {
        let d = PersistenceDiagram::new(0, vec![Pair::essential(2.0)]).unwrap();
        let svg = String::from_utf8(render_barcode(std::slice::from_ref(&d), BarcodeFormat::Svg, 0.0)).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 1);
        let text = String::from_utf8(render_barcode(&[d], BarcodeFormat::Text, 0.0)).unwrap();
        assert!(text.lines().last().unwrap().ends_with("=>"));
    }

    #[test]
    fn short_bars_are_suppressed() {
        let d =
            PersistenceDiagram::new(1, vec![Pair::new(2.0, 1.99), Pair::new(2.0, 0.5)]).unwrap();
        let svg = String::from_utf8(render_barcode(&[d], BarcodeFormat::Svg, 0.1)).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 1);
    }
}
