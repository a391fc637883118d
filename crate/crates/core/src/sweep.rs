//! Topology of grid-sampled regions of the configuration space.
//!
//! A region is sampled on the oracle grid of the free turn angles. Each
//! sample is a vertex of a cubical complex, tagged by cell and elbow
//! branch. Grid neighbors on the same branch are joined by edges, and full
//! blocks of four by squares. The two branches meet where the closing
//! circles become tangent, i.e. at the edge of the feasible cells; there
//! they are glued by rungs and by the squares between adjacent rungs.

use std::collections::VecDeque;

use serde::Serialize;

use crate::config_space::{
    default_tolerance, for_each_configuration, straight_line_sign_vectors, ConfigSample, ElbowBranch,
};
use crate::error::{Error, Result};
use crate::geometry::{PolygonChain, SideLengths, GEOM_TOL};

/// Side lengths whose configuration space is a figure eight.
pub const FIGURE_EIGHT_LENGTHS: [f64; 4] = [6.0, 4.0, 2.0, 4.0];

/// Sampled membership of a region, per grid cell and elbow branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRegion {
    pub grid: usize,
    pub dims: usize,
    /// Grid angles are periodic, so the first and last cells are adjacent.
    pub wrap: bool,
    feasible: Vec<bool>,
    /// `[left, right]`; a tangent sample counts for both.
    member: Vec<[bool; 2]>,
    tangent: Vec<bool>,
}

impl SampledRegion {
    /// Samples the configurations with the given `prefix` on a `grid` per
    /// remaining free angle and keeps those accepted by `include`. At most
    /// two gridded angles are supported.
    pub fn sample(
        lengths: &SideLengths,
        prefix: &[f64],
        grid: usize,
        wrap: bool,
        mut include: impl FnMut(&ConfigSample) -> bool,
    ) -> Result<Self> {
        let dims = lengths.len().saturating_sub(3 + prefix.len());
        if !(1..=2).contains(&dims) {
            return Err(Error::InvalidParameter(format!("{dims} gridded angles; regions support 1 or 2")));
        }
        let cells = grid.pow(dims as u32);
        let mut region = Self {
            grid,
            dims,
            wrap,
            feasible: vec![false; cells],
            member: vec![[false; 2]; cells],
            tangent: vec![false; cells],
        };
        for_each_configuration(lengths, prefix, grid, |s| {
            let c = region.flat(&s.grid_index);
            region.feasible[c] = true;
            if include(&s) {
                match s.branch {
                    ElbowBranch::Left => region.member[c][0] = true,
                    ElbowBranch::Right => region.member[c][1] = true,
                    ElbowBranch::Tangent => {
                        region.member[c] = [true, true];
                        region.tangent[c] = true;
                    }
                }
            }
        })?;
        Ok(region)
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.grid + i)
    }

    fn unflat(&self, mut c: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims];
        for k in (0..self.dims).rev() {
            idx[k] = c % self.grid;
            c /= self.grid;
        }
        idx
    }

    /// Neighbor of cell `c` one step up along `axis`.
    fn step(&self, c: usize, axis: usize) -> Option<usize> {
        let mut idx = self.unflat(c);
        idx[axis] += 1;
        if idx[axis] == self.grid {
            if !self.wrap || self.grid < 3 {
                return None;
            }
            idx[axis] = 0;
        }
        Some(self.flat(&idx))
    }

    fn step_down(&self, c: usize, axis: usize) -> Option<usize> {
        let mut idx = self.unflat(c);
        if idx[axis] == 0 {
            if !self.wrap || self.grid < 3 {
                return None;
            }
            idx[axis] = self.grid;
        }
        idx[axis] -= 1;
        Some(self.flat(&idx))
    }

    /// Drops members within `width` cells (in every axis) of an infeasible
    /// cell. Near the fold of the chart the two branches separate like the
    /// square root of the distance to it, so samples there are unreliable.
    pub fn without_fold_collar(mut self, width: usize) -> Self {
        for _ in 0..width {
            let near: Vec<bool> =
                (0..self.member.len()).map(|c| self.ring(c).iter().flatten().any(|&nb| !self.feasible[nb])).collect();
            for (c, &drop) in near.iter().enumerate() {
                if drop {
                    self.member[c] = [false, false];
                    self.tangent[c] = false;
                    self.feasible[c] = false;
                }
            }
        }
        self
    }

    /// Cells with at least one member sample.
    pub fn cell_count(&self) -> usize {
        self.member.iter().filter(|m| m[0] || m[1]).count()
    }

    pub fn sample_count(&self) -> usize {
        self.member.iter().zip(&self.tangent).map(|(m, &t)| if t { 1 } else { m[0] as usize + m[1] as usize }).sum()
    }

    /// Cells whose index differs from `c` by at most one in every axis.
    fn ring(&self, c: usize) -> Vec<Option<usize>> {
        let mut out = vec![Some(c)];
        for a in 0..self.dims {
            out = out
                .into_iter()
                .flat_map(|x| {
                    let up = x.and_then(|x| self.step(x, a));
                    let down = x.and_then(|x| self.step_down(x, a));
                    [x, up, down]
                })
                .collect();
        }
        out
    }

    /// Both branches are present and some cell in the surrounding block is
    /// infeasible, so the closing circles are close to tangent.
    fn is_seam(&self, c: usize) -> bool {
        if !(self.member[c][0] && self.member[c][1]) {
            return false;
        }
        self.tangent[c] || self.ring(c).iter().flatten().any(|&nb| !self.feasible[nb])
    }

    /// Cubical complex of the region. With `merge_branches` a cell is one
    /// vertex whenever any branch is a member.
    pub fn complex(&self, merge_branches: bool) -> RegionComplex {
        let mut labels: Vec<(usize, ElbowBranch)> = Vec::new();
        let mut id = vec![[usize::MAX; 2]; self.member.len()];
        for (c, m) in self.member.iter().enumerate() {
            if merge_branches {
                if m[0] || m[1] {
                    id[c] = [labels.len(); 2];
                    labels.push((c, if m[0] { ElbowBranch::Left } else { ElbowBranch::Right }));
                }
                continue;
            }
            for b in 0..2 {
                if m[b] {
                    id[c][b] = labels.len();
                    labels.push((c, if b == 0 { ElbowBranch::Left } else { ElbowBranch::Right }));
                }
            }
        }
        let layers: &[usize] = if merge_branches { &[0] } else { &[0, 1] };
        let present = |c: usize, b: usize| id[c][b] != usize::MAX;

        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut faces = 0usize;
        for c in 0..self.member.len() {
            for &b in layers {
                if !present(c, b) {
                    continue;
                }
                for a in 0..self.dims {
                    let Some(d) = self.step(c, a) else { continue };
                    if d != c && present(d, b) {
                        edges.push((id[c][b], id[d][b]));
                    }
                }
                if self.dims == 2 {
                    if let (Some(x), Some(y)) = (self.step(c, 0), self.step(c, 1)) {
                        if let Some(xy) = self.step(x, 1) {
                            if present(x, b) && present(y, b) && present(xy, b) {
                                faces += 1;
                            }
                        }
                    }
                }
            }
        }
        // the seam times an interval: rungs, rung squares and rung cubes
        let mut cubes = 0usize;
        if !merge_branches {
            let seam: Vec<bool> = (0..self.member.len()).map(|c| self.is_seam(c)).collect();
            for c in (0..seam.len()).filter(|&c| seam[c]) {
                edges.push((id[c][0], id[c][1]));
                for a in 0..self.dims {
                    if self.step(c, a).is_some_and(|d| d != c && seam[d]) {
                        faces += 1;
                    }
                }
                if self.dims == 2 {
                    if let (Some(x), Some(y)) = (self.step(c, 0), self.step(c, 1)) {
                        if self.step(x, 1).is_some_and(|xy| seam[x] && seam[y] && seam[xy]) {
                            cubes += 1;
                        }
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let components = component_roots(&adjacency).len();
        RegionComplex { vertices: labels.len(), edges: edges.len(), faces, cubes, components, labels, adjacency }
    }
}

/// First vertex of each connected component.
fn component_roots(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; adjacency.len()];
    let mut roots = Vec::new();
    for s in 0..adjacency.len() {
        if seen[s] {
            continue;
        }
        roots.push(s);
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    roots
}

/// Cell counts and connectivity of a sampled region's complex.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionComplex {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub cubes: usize,
    pub components: usize,
    /// Flat cell index and branch of each vertex.
    pub labels: Vec<(usize, ElbowBranch)>,
    adjacency: Vec<Vec<usize>>,
}

impl RegionComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64 - self.cubes as i64
    }

    pub fn component_roots(&self) -> Vec<usize> {
        component_roots(&self.adjacency)
    }

    /// Vertex count of each component, in root order.
    pub fn component_sizes(&self) -> Vec<usize> {
        let roots = self.component_roots();
        let mut label = vec![usize::MAX; self.vertices];
        let mut sizes = vec![0; roots.len()];
        for (k, &r) in roots.iter().enumerate() {
            let mut stack = vec![r];
            label[r] = k;
            while let Some(u) = stack.pop() {
                sizes[k] += 1;
                for &v in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = k;
                        stack.push(v);
                    }
                }
            }
        }
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    /// Vertices of the component containing the first vertex of smallest
    /// degree, in walk order. Along a path this is the path order.
    pub fn walk(&self) -> Vec<usize> {
        let Some(start) = (0..self.vertices).min_by_key(|&v| self.adjacency[v].len()) else {
            return Vec::new();
        };
        let mut seen = vec![false; self.vertices];
        let mut order = Vec::new();
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            order.push(u);
            for &v in self.adjacency[u].iter().rev() {
                if !seen[v] {
                    stack.push(v);
                }
            }
        }
        order
    }
}

/// Findings of the one-parameter sweep of the figure-eight linkage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureEightReport {
    pub lengths: Vec<f64>,
    pub samples: usize,
    pub configurations: usize,
    pub space_components: usize,
    pub space_euler_characteristic: i64,
    /// Connected classes of non-embedded samples.
    pub nonembedded_count: usize,
    /// Edge direction signs of one sample per non-embedded class.
    pub nonembedded_sign_vectors: Vec<Vec<i8>>,
    /// Sign vectors of the straight-line configurations of the lengths.
    pub straight_line: Vec<Vec<i8>>,
    pub ccw_samples: usize,
    pub ccw_arc_contiguous: bool,
    pub ccw_euler_characteristic: i64,
    /// Configurations spread evenly along the embedded counterclockwise arc.
    #[serde(skip)]
    pub representatives: Vec<PolygonChain>,
}

fn edge_signs(chain: &PolygonChain) -> Vec<i8> {
    let scale = chain.side_lengths().iter().cloned().fold(0.0, f64::max);
    (0..chain.len())
        .map(|i| {
            let e = chain.edge(i);
            let s = if e.x.abs() > GEOM_TOL * scale { e.x } else { e.y };
            if s >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Sweeps the first turn angle of the `(6, 4, 2, 4)` linkage over
/// `samples` grid cells, and picks `representatives` configurations along
/// the embedded counterclockwise arc.
pub fn figure_eight_sweep(samples: usize, representatives: usize) -> Result<FigureEightReport> {
    if samples < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 samples, got {samples}")));
    }
    let lengths = SideLengths::new(FIGURE_EIGHT_LENGTHS.to_vec())?;
    let mut chains: Vec<[Option<PolygonChain>; 2]> = vec![[None, None]; samples];
    let mut configurations = 0;
    let space = SampledRegion::sample(&lengths, &[], samples, true, |s| {
        configurations += 1;
        let c = s.grid_index[0];
        match s.branch {
            ElbowBranch::Left => chains[c][0] = Some(s.chain.clone()),
            ElbowBranch::Right => chains[c][1] = Some(s.chain.clone()),
            ElbowBranch::Tangent => chains[c] = [Some(s.chain.clone()), Some(s.chain.clone())],
        }
        true
    })?;
    let space = space.complex(false);
    let nonembedded = SampledRegion::sample(&lengths, &[], samples, true, |s| !s.class.embedded)?.complex(false);
    let ccw = SampledRegion::sample(&lengths, &[], samples, true, |s| s.class.embedded && s.class.is_ccw())?;
    let ccw_complex = ccw.complex(false);

    let chain_of = |(c, b): (usize, ElbowBranch)| {
        chains[c][if b == ElbowBranch::Left { 0 } else { 1 }].clone().expect("member sample has a chain")
    };
    let nonembedded_sign_vectors =
        nonembedded.component_roots().into_iter().map(|v| edge_signs(&chain_of(nonembedded.labels[v]))).collect();

    let order = ccw_complex.walk();
    let picks = representatives.min(order.len());
    let reps = (0..picks)
        .map(|k| {
            let at = if picks == 1 { 0 } else { k * (order.len() - 1) / (picks - 1) };
            chain_of(ccw_complex.labels[order[at]])
        })
        .collect();

    Ok(FigureEightReport {
        lengths: FIGURE_EIGHT_LENGTHS.to_vec(),
        samples,
        configurations,
        space_components: space.components,
        space_euler_characteristic: space.euler_characteristic(),
        nonembedded_count: nonembedded.components,
        nonembedded_sign_vectors,
        straight_line: straight_line_sign_vectors(&lengths, default_tolerance(&lengths))?.sign_vectors,
        ccw_samples: ccw.sample_count(),
        ccw_arc_contiguous: ccw_complex.is_connected(),
        ccw_euler_characteristic: ccw_complex.euler_characteristic(),
        representatives: reps,
    })
}
