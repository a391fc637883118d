//! SVG frame sets: one file per polygon plus a ghosted overlay of all of
//! them, sharing a view box.

use std::fmt::Write as _;
use std::path::Path;

use polylink::PolygonChain;

/// Union bounding box of all chains, padded by 5% per side, in SVG
/// coordinates (y pointing down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewBox {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl ViewBox {
    pub fn of(chains: &[PolygonChain]) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in chains.iter().flat_map(|c| c.vertices()) {
            x0 = x0.min(v.x);
            x1 = x1.max(v.x);
            y0 = y0.min(-v.y);
            y1 = y1.max(-v.y);
        }
        let size = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        let (w, h) = ((x1 - x0).max(1e-3 * size), (y1 - y0).max(1e-3 * size));
        Self { x: x0 - 0.05 * w, y: y0 - 0.05 * h, width: 1.1 * w, height: 1.1 * h }
    }

    fn scale(&self) -> f64 {
        self.width.max(self.height)
    }
}

/// Six decimals, without a sign on values that round to zero.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn header(vb: &ViewBox) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        num(vb.x),
        num(vb.y),
        num(vb.width),
        num(vb.height)
    )
}

fn path_data(chain: &PolygonChain) -> String {
    let mut d = String::new();
    for (i, v) in chain.vertices().iter().enumerate() {
        let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(v.x), num(-v.y));
    }
    d.push('Z');
    d
}

/// One polygon: a single closed path and a circle at each vertex.
pub fn frame(chain: &PolygonChain, vb: &ViewBox, caption: &str) -> String {
    let s = vb.scale();
    let mut out = header(vb);
    let _ = writeln!(out, "<title>{caption}</title>");
    let _ = writeln!(
        out,
        "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>",
        path_data(chain),
        num(0.004 * s)
    );
    for v in chain.vertices() {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"steelblue\"/>",
            num(v.x),
            num(-v.y),
            num(0.008 * s)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Every chain ghosted, with the last one drawn solid.
pub fn summary(chains: &[PolygonChain], vb: &ViewBox) -> String {
    let s = vb.scale();
    let mut out = header(vb);
    let _ = writeln!(out, "<title>{} frames</title>", chains.len());
    for (i, c) in chains.iter().enumerate() {
        let last = i + 1 == chains.len();
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-opacity=\"{}\" stroke-width=\"{}\"/>",
            path_data(c),
            if last { "black" } else { "gray" },
            if last { "1" } else { "0.3" },
            num(0.003 * s)
        );
    }
    if let Some(c) = chains.last() {
        for v in c.vertices() {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"steelblue\"/>",
                num(v.x),
                num(-v.y),
                num(0.008 * s)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `frame_NNNNN.svg` for each chain and `summary.svg` into `dir`.
pub fn write_frame_set(dir: &Path, chains: &[PolygonChain], captions: &[String]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let vb = ViewBox::of(chains);
    for (i, (c, caption)) in chains.iter().zip(captions).enumerate() {
        std::fs::write(dir.join(format!("frame_{i:05}.svg")), frame(c, &vb, caption))?;
    }
    std::fs::write(dir.join("summary.svg"), summary(chains, &vb))
}
