//! SVG renderings of a barcode and a persistence diagram.
//!
//! One `class="bar"` element per feature in the barcode and one
//! `class="point"` element per feature in the diagram. Infinite deaths are
//! drawn at 1.05 times the truncation scale.

use std::fmt::Write as _;

use topohunt::{Barcode, PersistenceFeature};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn color(dim: usize) -> &'static str {
    match dim {
        0 => "black",
        1 => "red",
        2 => "blue",
        _ => "green",
    }
}

fn axis_max(bc: &Barcode) -> f64 {
    let finite = bc
        .features()
        .iter()
        .flat_map(|f| [f.birth, f.death])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let top = if bc.epsilon_max().is_finite() {
        bc.epsilon_max().max(finite)
    } else {
        finite
    };
    if top > 0.0 {
        top * 1.05
    } else {
        1.0
    }
}

fn drawn_death(f: &PersistenceFeature, cap: f64) -> f64 {
    if f.is_infinite() {
        cap
    } else {
        f.death
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
}

/// Horizontal bars, grouped by dimension from the top.
pub fn barcode_svg(bc: &Barcode) -> String {
    let mut out = String::new();
    header(&mut out, "barcode");
    let cap = axis_max(bc);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + v / cap * plot_w;
    let n = bc.len().max(1) as f64;
    let row_h = ((HEIGHT - 2.0 * MARGIN) / n).min(12.0);
    let stroke = (row_h * 0.6).max(0.5);

    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{x2:.3}\" y2=\"{y}\" stroke=\"gray\"/>",
        y = HEIGHT - MARGIN,
        x2 = WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"end\">{cap:.3}</text>",
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    for (row, f) in bc.features().iter().enumerate() {
        let y = MARGIN + (row as f64 + 0.5) * row_h;
        let class = if f.is_infinite() { "bar infinite" } else { "bar" };
        let _ = writeln!(
            out,
            "<line class=\"{class}\" data-dim=\"{}\" x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\" stroke=\"{}\" stroke-width=\"{stroke:.3}\"/>",
            f.dimension,
            x(f.birth),
            x(drawn_death(f, cap)),
            color(f.dimension)
        );
        if f.is_infinite() {
            // arrow head marks a bar that outlives the filtration
            let xe = x(cap);
            let _ = writeln!(
                out,
                "<path d=\"M{:.3},{:.3} L{xe:.3},{y:.3} L{:.3},{:.3} Z\" fill=\"{}\"/>",
                xe - 6.0,
                y - 3.0,
                xe - 6.0,
                y + 3.0,
                color(f.dimension)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Birth against death, with the diagonal. Infinite points are triangles
/// on the line `death = 1.05 * epsilon_max`.
pub fn diagram_svg(bc: &Barcode) -> String {
    let mut out = String::new();
    header(&mut out, "persistence diagram");
    let cap = axis_max(bc);
    let side = (WIDTH.min(HEIGHT)) - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + v / cap * side;
    let y = |v: f64| HEIGHT - MARGIN - v / cap * side;
    let _ = writeln!(
        out,
        "<line class=\"diagonal\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"gray\"/>",
        x(0.0),
        y(0.0),
        x(cap),
        y(cap)
    );
    let _ = writeln!(
        out,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"lightgray\" stroke-dasharray=\"4 4\"/>",
        x(0.0),
        y(cap),
        x(cap),
        y(cap)
    );
    for f in bc.features() {
        let (px, py) = (x(f.birth), y(drawn_death(f, cap)));
        if f.is_infinite() {
            let _ = writeln!(
                out,
                "<path class=\"point infinite\" data-dim=\"{}\" d=\"M{px:.3},{:.3} L{:.3},{:.3} L{:.3},{:.3} Z\" fill=\"{}\"/>",
                f.dimension,
                py - 4.0,
                px - 4.0,
                py + 3.0,
                px + 4.0,
                py + 3.0,
                color(f.dimension)
            );
        } else {
            let _ = writeln!(
                out,
                "<circle class=\"point\" data-dim=\"{}\" cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"3\" fill=\"{}\"/>",
                f.dimension,
                color(f.dimension)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
