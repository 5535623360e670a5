//! ASCII and SVG drawings of a polyomino with optional face labels.

use std::fmt::Write as _;

use foldlab::engine::Facemapping;
use foldlab::grid::{Cell, Polyomino, Segment};

/// Cell side in SVG user units.
const UNIT: i32 = 40;
const MARGIN: i32 = 10;

/// True when the segment is drawn as a boundary: outer edge, cut, or the
/// rim of a removed cell.
fn is_wall(p: &Polyomino, s: Segment) -> bool {
    let (a, b) = s.cells();
    !p.is_attached(s) && (p.is_present(a) || p.is_present(b))
}

fn label(fm: Option<&Facemapping>, c: Cell) -> Option<u8> {
    fm.and_then(|fm| fm.face(c))
}

/// Text grid: walls as `|` and `---`, cells as face digits, removed cells as `#`.
pub fn ascii(p: &Polyomino, fm: Option<&Facemapping>) -> String {
    let (w, h) = (p.width(), p.height());
    let corner = |x: i32, y: i32| {
        let touching = [Segment::h(x - 1, y), Segment::h(x, y), Segment::v(x, y - 1), Segment::v(x, y)];
        if touching.iter().any(|&s| is_wall(p, s)) {
            '+'
        } else {
            ' '
        }
    };
    let mut out = String::new();
    for y in (0..=h).rev() {
        for x in 0..w {
            out.push(corner(x, y));
            out.push_str(if is_wall(p, Segment::h(x, y)) { "---" } else { "   " });
        }
        out.push(corner(w, y));
        out.push('\n');
        if y == 0 {
            break;
        }
        let row = y - 1;
        for x in 0..=w {
            out.push(if is_wall(p, Segment::v(x, row)) { '|' } else { ' ' });
            if x < w {
                let c = Cell::new(x, row);
                let _ = match (p.is_present(c), label(fm, c)) {
                    (false, _) => write!(out, " # "),
                    (true, Some(l)) => write!(out, " {l} "),
                    (true, None) => write!(out, "   "),
                };
            }
        }
        out.push('\n');
    }
    out
}

/// SVG drawing: solid boundaries and cuts, dashed creases, shaded removed cells.
pub fn svg(p: &Polyomino, fm: Option<&Facemapping>) -> String {
    let (w, h) = (p.width(), p.height());
    let px = |x: i32| MARGIN + x * UNIT;
    let py = |y: i32| MARGIN + (h - y) * UNIT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {0} {1}">"#,
        w * UNIT + 2 * MARGIN,
        h * UNIT + 2 * MARGIN
    );
    for x in 0..w {
        for y in 0..h {
            let c = Cell::new(x, y);
            let fill = if p.is_present(c) { "white" } else { "#d0d0d0" };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{UNIT}" height="{UNIT}" fill="{fill}"/>"#,
                px(x),
                py(y + 1)
            );
            if let Some(l) = label(fm, c) {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="serif" font-size="20" text-anchor="middle" dominant-baseline="central">{l}</text>"#,
                    px(x) + UNIT / 2,
                    py(y) - UNIT / 2
                );
            }
        }
    }
    let segments = (0..=w)
        .flat_map(|x| (0..h).map(move |y| Segment::v(x, y)))
        .chain((0..w).flat_map(|x| (0..=h).map(move |y| Segment::h(x, y))));
    for s in segments {
        let style = if is_wall(p, s) {
            r#"stroke="black" stroke-width="3" stroke-linecap="round""#
        } else if p.is_attached(s) {
            r##"stroke="#909090" stroke-width="1" stroke-dasharray="4 3""##
        } else {
            continue;
        };
        let [(x1, y1), (x2, y2)] = s.endpoints();
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#,
            px(x1),
            py(y1),
            px(x2),
            py(y2)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use foldlab::grid::{Axis, HoleSpec};

    #[test]
    fn ascii_outline_shows_slit_and_removed_cell() {
        let p = Polyomino::build(
            3,
            4,
            vec![HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 1 }],
        )
        .unwrap();
        let text = ascii(&p, None);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "+---+---+---+");
        assert_eq!(lines[3], "|   |       |");
        assert_eq!(lines[5], "|   |       |");
        assert_eq!(lines[7], "|           |");

        let sq = Polyomino::build(3, 3, vec![HoleSpec::Square { x: 1, y: 1 }]).unwrap();
        assert_eq!(ascii(&sq, None).lines().nth(3).unwrap(), "|   | # |   |");
    }

    #[test]
    fn svg_has_one_rect_per_cell() {
        let p = Polyomino::build(2, 3, vec![]).unwrap();
        let s = svg(&p, None);
        assert_eq!(s.matches("<rect").count(), 6);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }
}
