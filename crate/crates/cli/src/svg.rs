//! Static scatter of the two Beiter triangles with their lattice points,
//! β along x and β̄ along y, axes spanning [0, p].  Fixed 800×800 viewport,
//! 3-unit circles, one stroke class per side — a print exhibit, nothing
//! interactive.

use std::fmt::Write as _;

use beiterlab::beiter::{BeiterSets, Side};
use beiterlab::inversegeo::beiter_triangle;
use beiterlab::rat::rat_to_f64;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 48.0;

pub fn beiter_figure(p: u64, sets: &BeiterSets) -> String {
    let scale = (SIZE - 2.0 * MARGIN) / p as f64;
    let fx = |x: f64| MARGIN + x * scale;
    let fy = |y: f64| SIZE - MARGIN - y * scale;

    let mut s = String::new();
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n",
    );
    writeln!(s, "<title>Beiter sets at p = {p}</title>").unwrap();
    s.push_str("<style>\n");
    s.push_str(".frame { fill: none; stroke: #444444; stroke-width: 1 }\n");
    s.push_str(".diag { stroke: #bbbbbb; stroke-width: 0.75; stroke-dasharray: 2 4 }\n");
    s.push_str(".tri-minus { fill: none; stroke: #1f6fb2; stroke-width: 1.5 }\n");
    s.push_str(
        ".tri-plus { fill: none; stroke: #c23b3b; stroke-width: 1.5; stroke-dasharray: 7 3 }\n",
    );
    s.push_str(".pt-minus { fill: #1f6fb2; stroke: #1f6fb2; stroke-width: 1 }\n");
    s.push_str(".pt-plus { fill: #ffffff; stroke: #c23b3b; stroke-width: 1.5 }\n");
    s.push_str("text { font-family: monospace; font-size: 14px; fill: #333333 }\n");
    s.push_str("</style>\n");

    let inner = SIZE - 2.0 * MARGIN;
    writeln!(
        s,
        "<rect class=\"frame\" x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{inner}\" height=\"{inner}\"/>"
    )
    .unwrap();
    writeln!(
        s,
        "<line class=\"diag\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
        fx(0.0),
        fy(0.0),
        fx(p as f64),
        fy(p as f64)
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\">p = {p}</text>",
        MARGIN,
        MARGIN - 16.0
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\">β</text>",
        SIZE - MARGIN + 10.0,
        fy(0.0) + 5.0
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\">β̄</text>",
        MARGIN - 26.0,
        MARGIN + 5.0
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\">0</text>",
        fx(0.0) - 14.0,
        fy(0.0) + 18.0
    )
    .unwrap();

    // Triangle outlines only exist once the sets can be non-trivial.
    if p >= 11 {
        for (side, class) in [(Side::Minus, "tri-minus"), (Side::Plus, "tri-plus")] {
            let tri = beiter_triangle(p, side);
            let mut pts = String::new();
            for (vx, vy) in &tri.vertices {
                write!(
                    pts,
                    "{:.2},{:.2} ",
                    fx(rat_to_f64(*vx)),
                    fy(rat_to_f64(*vy))
                )
                .unwrap();
            }
            writeln!(
                s,
                "<polygon class=\"{class}\" points=\"{}\"/>",
                pts.trim_end()
            )
            .unwrap();
        }
    }

    for pt in sets.iter() {
        let class = match pt.side {
            Side::Minus => "pt-minus",
            Side::Plus => "pt-plus",
        };
        writeln!(
            s,
            "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>",
            fx(pt.beta as f64),
            fy(pt.betabar as f64)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
