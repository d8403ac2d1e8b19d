//! Edge colorings of `Q_n`.
//!
//! The four-coloring assigns an edge `xy` in layer `k` with common prefix `p`
//! the pair `(k mod 2, w(p) mod 2)`, encoded as `2 * c1 + c2`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::hypercube::{self, check_dim, Edge, Vertex, MAX_SUBGRAPH_DIM};
use crate::{Error, Result};

/// A color, `0..palette`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
#[serde(transparent)]
pub struct ColorId(pub u8);

impl ColorId {
    pub fn from_pair(c1: u32, c2: u32) -> Self {
        ColorId((2 * (c1 & 1) + (c2 & 1)) as u8)
    }

    pub fn pair(self) -> (u8, u8) {
        (self.0 >> 1, self.0 & 1)
    }
}

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn prefix_parity_color(e: Edge) -> ColorId {
    ColorId::from_pair(e.layer(), e.prefix_weight())
}

pub fn layer_parity_color(e: Edge) -> ColorId {
    ColorId((e.layer() & 1) as u8)
}

pub fn reversed_prefix_parity_color(e: Edge) -> ColorId {
    prefix_parity_color(e.reverse())
}

/// A fully specified coloring table, as loaded from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorTable {
    n: u32,
    palette: u8,
    // indexed by Edge::index; slots for non-edges hold u8::MAX
    colors: Vec<u8>,
}

impl ColorTable {
    pub fn color(&self, e: Edge) -> ColorId {
        ColorId(self.colors[e.index()])
    }
}

#[derive(Clone, Debug)]
pub enum ColoringKind {
    /// The four-coloring by layer parity and prefix-weight parity.
    Paper4,
    /// Two colors alternating on successive edge layers.
    Layer2,
    /// `Paper4` applied to the reversed endpoints.
    Paper4Reversed,
    /// Every edge gets color 0.
    Constant,
    File { path: PathBuf, table: Arc<ColorTable> },
}

/// A named coloring of `E(Q_n)`.
#[derive(Clone, Debug)]
pub struct ColoringSpec {
    pub n: u32,
    pub kind: ColoringKind,
}

impl ColoringSpec {
    pub fn new(n: u32, kind: ColoringKind) -> Result<Self> {
        check_dim(n)?;
        if let ColoringKind::File { table, .. } = &kind {
            if table.n != n {
                return Err(Error::DimensionMismatch(n, table.n));
            }
        }
        Ok(ColoringSpec { n, kind })
    }

    pub fn paper4(n: u32) -> Result<Self> {
        Self::new(n, ColoringKind::Paper4)
    }

    pub fn layer2(n: u32) -> Result<Self> {
        Self::new(n, ColoringKind::Layer2)
    }

    /// Parses `paper4`, `layer2`, `paper4-reversed`, `constant` or `file:PATH`.
    /// A file coloring must have dimension `n`.
    pub fn from_name(name: &str, n: u32) -> Result<Self> {
        let kind = match name {
            "paper4" => ColoringKind::Paper4,
            "layer2" => ColoringKind::Layer2,
            "paper4-reversed" => ColoringKind::Paper4Reversed,
            "constant" => ColoringKind::Constant,
            other => match other.strip_prefix("file:") {
                Some(path) => {
                    let spec = load_coloring(path)?;
                    if spec.n != n {
                        return Err(Error::DimensionMismatch(n, spec.n));
                    }
                    return Ok(spec);
                }
                None => {
                    return Err(Error::InvalidArgument(format!("unknown coloring {other:?}")))
                }
            },
        };
        Self::new(n, kind)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ColoringKind::Paper4 => "paper4".into(),
            ColoringKind::Layer2 => "layer2".into(),
            ColoringKind::Paper4Reversed => "paper4-reversed".into(),
            ColoringKind::Constant => "constant".into(),
            ColoringKind::File { path, .. } => format!("file:{}", path.display()),
        }
    }

    pub fn palette(&self) -> u8 {
        match &self.kind {
            ColoringKind::Paper4 | ColoringKind::Paper4Reversed => 4,
            ColoringKind::Layer2 => 2,
            ColoringKind::Constant => 1,
            ColoringKind::File { table, .. } => table.palette,
        }
    }

    pub fn color(&self, e: Edge) -> ColorId {
        debug_assert_eq!(e.dim(), self.n);
        match &self.kind {
            ColoringKind::Paper4 => prefix_parity_color(e),
            ColoringKind::Layer2 => layer_parity_color(e),
            ColoringKind::Paper4Reversed => reversed_prefix_parity_color(e),
            ColoringKind::Constant => ColorId(0),
            ColoringKind::File { table, .. } => table.color(e),
        }
    }

    /// True when no color appears on two consecutive edge layers. Every
    /// color class is then a vertex-disjoint union of single layers, so any
    /// monochromatic cycle lies inside one layer.
    pub fn is_layer_separated(&self) -> bool {
        let n = self.n;
        let palette = self.palette() as usize;
        let mut seen = vec![vec![false; palette]; n as usize];
        for e in hypercube::edges(n) {
            seen[e.layer() as usize][self.color(e).0 as usize] = true;
        }
        seen.windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| !(a & b)))
    }

    /// Fully materialized table of this coloring.
    pub fn to_table(&self) -> Result<ColorTable> {
        guard_table(self.n)?;
        let mut colors = vec![u8::MAX; (1usize << self.n) * self.n as usize];
        for e in hypercube::edges(self.n) {
            colors[e.index()] = self.color(e).0;
        }
        Ok(ColorTable {
            n: self.n,
            palette: self.palette(),
            colors,
        })
    }
}

fn guard_table(n: u32) -> Result<()> {
    if n > MAX_SUBGRAPH_DIM {
        return Err(Error::Guard(format!(
            "coloring tables are limited to n <= {MAX_SUBGRAPH_DIM}"
        )));
    }
    Ok(())
}

/// Exact number of edges per color.
pub fn class_sizes(spec: &ColoringSpec) -> Result<BTreeMap<ColorId, u64>> {
    guard_table(spec.n)?;
    let mut sizes: BTreeMap<ColorId, u64> =
        (0..spec.palette()).map(|c| (ColorId(c), 0)).collect();
    for e in hypercube::edges(spec.n) {
        *sizes.entry(spec.color(e)).or_default() += 1;
    }
    Ok(sizes)
}

/// Writes the text form: `qcube-coloring n=<n> palette=<k>`, then
/// `<low> <high> <color>` per edge in ascending `(low, pos)` order.
pub fn write_coloring(spec: &ColoringSpec, mut w: impl Write) -> Result<()> {
    guard_table(spec.n)?;
    writeln!(w, "qcube-coloring n={} palette={}", spec.n, spec.palette())?;
    for e in hypercube::edges(spec.n) {
        writeln!(w, "{} {} {}", e.low(), e.high(), spec.color(e))?;
    }
    Ok(())
}

pub fn save_coloring(spec: &ColoringSpec, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_coloring(spec, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_coloring(path: impl AsRef<Path>) -> Result<ColoringSpec> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let table = read_coloring(std::io::BufReader::new(file))?;
    ColoringSpec::new(
        table.n,
        ColoringKind::File {
            path: path.to_path_buf(),
            table: Arc::new(table),
        },
    )
}

fn parse_header(line: &str) -> Option<(u32, u8)> {
    let rest = line.strip_prefix("qcube-coloring ")?;
    let mut fields = rest.split_whitespace();
    let n = fields.next()?.strip_prefix("n=")?.parse().ok()?;
    let k = fields.next()?.strip_prefix("palette=")?.parse().ok()?;
    if fields.next().is_some() {
        return None;
    }
    Some((n, k))
}

pub fn read_coloring(r: impl BufRead) -> Result<ColorTable> {
    let mut lines = r.lines().enumerate();
    let (n, palette) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::malformed(1, "missing header"));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (n, k) = parse_header(line.trim()).ok_or_else(|| {
            Error::malformed(i + 1, "expected header `qcube-coloring n=<n> palette=<k>`")
        })?;
        check_dim(n)?;
        guard_table(n)?;
        if k == 0 {
            return Err(Error::malformed(i + 1, "palette must be positive"));
        }
        break (n, k);
    };
    let mut colors = vec![u8::MAX; (1usize << n) * n as usize];
    let mut assigned = 0usize;
    for (i, line) in lines {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (a, b, c) = match fields.as_slice() {
            [] => continue,
            [a, b, c] => (a, b, c),
            _ => return Err(Error::malformed(i + 1, "expected `<low> <high> <color>`")),
        };
        let x = Vertex::parse(a, n)?;
        let y = Vertex::parse(b, n)?;
        let e = Edge::between(x, y)?;
        if e.low() != x {
            return Err(Error::malformed(i + 1, "lower endpoint must come first"));
        }
        let color: u8 = c
            .parse()
            .map_err(|_| Error::malformed(i + 1, format!("bad color {c:?}")))?;
        if color >= palette {
            return Err(Error::malformed(
                i + 1,
                format!("color {color} outside palette of size {palette}"),
            ));
        }
        let slot = &mut colors[e.index()];
        if *slot != u8::MAX {
            return Err(Error::malformed(i + 1, format!("duplicate edge {e}")));
        }
        *slot = color;
        assigned += 1;
    }
    let total = hypercube::edge_count(n) as usize;
    if assigned != total {
        return Err(Error::IncompleteColoring {
            missing: total - assigned,
            total,
        });
    }
    Ok(ColorTable { n, palette, colors })
}
