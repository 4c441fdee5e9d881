//! Quadriculated disks: bicolored square complexes with boundary structure.
//!
//! A disk is stored as a list of squares, each a 4-tuple of vertex ids in
//! counterclockwise order (square 0 fixes the global orientation, everything
//! else is oriented by propagation). Validation enforces the disk axioms:
//! interior vertices lie in exactly four squares, the boundary is a single
//! simple cycle, and the Euler characteristic is 1.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::matrix::IntMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareId(pub u32);

impl VertexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl SquareId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for SquareId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiskError {
    EmptyGrid,
    UnexpectedGridCharacter { row: usize, ch: char },
    GridNotEdgeConnected,
    GridHasHole,
    EmptyComplex,
    RepeatedVertexInSquare { square: usize },
    EdgeInMoreThanTwoSquares { a: String, b: String },
    Disconnected,
    NonOrientable,
    BoundaryNotSingleCycle,
    InteriorVertexDegree { vertex: String, squares: usize },
    EulerCharacteristic { euler: i64 },
    NotABoard,
    NoSuchEdge,
    NotACorner { vertex: String },
}

impl fmt::Display for DiskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiskError::EmptyGrid => write!(f, "grid contains no cells"),
            DiskError::UnexpectedGridCharacter { row, ch } => {
                write!(f, "unexpected character {ch:?} in grid row {row}")
            }
            DiskError::GridNotEdgeConnected => write!(f, "cell set is not edge-connected"),
            DiskError::GridHasHole => write!(f, "cell set is not simply connected (it has a hole)"),
            DiskError::EmptyComplex => write!(f, "complex contains no squares"),
            DiskError::RepeatedVertexInSquare { square } => {
                write!(f, "square {square} repeats a vertex")
            }
            DiskError::EdgeInMoreThanTwoSquares { a, b } => {
                write!(f, "edge {a}-{b} belongs to more than two squares")
            }
            DiskError::Disconnected => write!(f, "complex is disconnected"),
            DiskError::NonOrientable => write!(f, "squares cannot be consistently oriented"),
            DiskError::BoundaryNotSingleCycle => {
                write!(f, "boundary edges do not form a single simple cycle")
            }
            DiskError::InteriorVertexDegree { vertex, squares } => {
                write!(f, "interior vertex {vertex} belongs to {squares} squares, expected 4")
            }
            DiskError::EulerCharacteristic { euler } => {
                write!(f, "Euler characteristic is {euler}, expected 1")
            }
            DiskError::NotABoard => write!(f, "disk is not a board (developing map overlaps)"),
            DiskError::NoSuchEdge => write!(f, "seed is not an edge of the complex"),
            DiskError::NotACorner { vertex } => write!(f, "vertex {vertex} is not a corner"),
        }
    }
}

impl std::error::Error for DiskError {}

/// Vertex/edge/face counts of a validated disk, split the way the boundary
/// combinatorics needs them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskCounts {
    pub vertices: usize,
    pub edges: usize,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    pub squares: usize,
    pub interior_vertices: usize,
    /// `boundary_degree[r]` = number of boundary vertices lying in exactly `r` squares.
    pub boundary_degree: Vec<usize>,
}

impl DiskCounts {
    pub fn corners(&self) -> usize {
        self.boundary_degree.get(1).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct QuadDisk {
    vertex_names: Vec<String>,
    squares: Vec<[VertexId; 4]>,
    neighbors: Vec<[Option<SquareId>; 4]>,
    vertex_squares: Vec<Vec<SquareId>>,
    boundary_vertex: Vec<bool>,
    boundary_cycle: Vec<VertexId>,
    counts: DiskCounts,
}

fn sorted_pair(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuadDisk {
    /// Builds and validates a disk from squares given as vertex-token 4-tuples.
    /// Tuples may be arbitrarily oriented; orientation is fixed by declaring
    /// square 0 counterclockwise and propagating.
    pub fn from_squares<S: AsRef<str>>(squares: &[[S; 4]]) -> Result<QuadDisk, DiskError> {
        let mut names: Vec<String> = Vec::new();
        let mut intern: HashMap<&str, VertexId> = HashMap::new();
        let mut tuples = Vec::with_capacity(squares.len());
        for sq in squares {
            let mut tuple = [VertexId(0); 4];
            for (slot, token) in tuple.iter_mut().zip(sq.iter()) {
                let token = token.as_ref();
                let id = *intern.entry(token).or_insert_with(|| {
                    names.push(token.to_string());
                    VertexId(names.len() as u32 - 1)
                });
                *slot = id;
            }
            tuples.push(tuple);
        }
        // `intern` borrows tokens from the input, so drop it before moving on.
        let names: Vec<String> = names;
        Self::from_tuples(names, tuples)
    }

    /// Builds a disk from already-interned tuples. Vertex ids may be sparse;
    /// they are compacted in first-appearance order.
    pub(crate) fn from_tuples(
        names: Vec<String>,
        tuples: Vec<[VertexId; 4]>,
    ) -> Result<QuadDisk, DiskError> {
        if tuples.is_empty() {
            return Err(DiskError::EmptyComplex);
        }

        // Compact vertex ids, first appearance first.
        let mut remap: HashMap<VertexId, VertexId> = HashMap::new();
        let mut vertex_names: Vec<String> = Vec::new();
        let mut squares: Vec<[VertexId; 4]> = Vec::with_capacity(tuples.len());
        for tuple in &tuples {
            let mut mapped = [VertexId(0); 4];
            for (slot, &old) in mapped.iter_mut().zip(tuple.iter()) {
                let new = *remap.entry(old).or_insert_with(|| {
                    vertex_names.push(names[old.idx()].clone());
                    VertexId(vertex_names.len() as u32 - 1)
                });
                *slot = new;
            }
            squares.push(mapped);
        }
        let nv = vertex_names.len();
        let nf = squares.len();

        for (i, sq) in squares.iter().enumerate() {
            for a in 0..4 {
                for b in a + 1..4 {
                    if sq[a] == sq[b] {
                        return Err(DiskError::RepeatedVertexInSquare { square: i });
                    }
                }
            }
        }

        // Edge table over unordered vertex pairs.
        let mut edge_map: HashMap<(VertexId, VertexId), Vec<(SquareId, usize)>> = HashMap::new();
        for (i, sq) in squares.iter().enumerate() {
            for pos in 0..4 {
                let key = sorted_pair(sq[pos], sq[(pos + 1) % 4]);
                let slots = edge_map.entry(key).or_default();
                slots.push((SquareId(i as u32), pos));
                if slots.len() > 2 {
                    return Err(DiskError::EdgeInMoreThanTwoSquares {
                        a: vertex_names[key.0.idx()].clone(),
                        b: vertex_names[key.1.idx()].clone(),
                    });
                }
            }
        }

        // Connectivity through shared vertices (a vertex-pinched complex is
        // still connected; it fails the boundary-cycle check below instead).
        let mut vertex_squares: Vec<Vec<SquareId>> = vec![Vec::new(); nv];
        for (i, sq) in squares.iter().enumerate() {
            for &v in sq {
                vertex_squares[v.idx()].push(SquareId(i as u32));
            }
        }
        {
            let mut seen = vec![false; nf];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(s) = queue.pop_front() {
                for &v in &squares[s] {
                    for &t in &vertex_squares[v.idx()] {
                        if !seen[t.idx()] {
                            seen[t.idx()] = true;
                            queue.push_back(t.idx());
                        }
                    }
                }
            }
            if seen.iter().any(|&s| !s) {
                return Err(DiskError::Disconnected);
            }
        }

        // Orient by propagation over shared edges; square 0 stays as stored.
        let mut flip: Vec<Option<bool>> = vec![None; nf];
        for start in 0..nf {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                let s_flip = flip[s].unwrap();
                for pos in 0..4 {
                    let a = squares[s][pos];
                    let b = squares[s][(pos + 1) % 4];
                    let slots = &edge_map[&sorted_pair(a, b)];
                    for &(t, tpos) in slots {
                        if t.idx() == s {
                            continue;
                        }
                        // The two squares must traverse the edge oppositely.
                        let s_from = if s_flip { b } else { a };
                        let t_needs_from = if s_from == a { b } else { a };
                        let t_stored_from = squares[t.idx()][tpos];
                        let want_flip = t_stored_from != t_needs_from;
                        match flip[t.idx()] {
                            None => {
                                flip[t.idx()] = Some(want_flip);
                                queue.push_back(t.idx());
                            }
                            Some(existing) => {
                                if existing != want_flip {
                                    return Err(DiskError::NonOrientable);
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut squares = squares;
        for (s, tuple) in squares.iter_mut().enumerate() {
            if flip[s] == Some(true) {
                tuple.reverse();
            }
        }

        // Re-derive directed edges from the oriented tuples; every shared
        // edge must now be traversed in opposite directions.
        let mut edge_map: HashMap<(VertexId, VertexId), Vec<(SquareId, usize)>> = HashMap::new();
        for (i, sq) in squares.iter().enumerate() {
            for pos in 0..4 {
                let key = sorted_pair(sq[pos], sq[(pos + 1) % 4]);
                edge_map.entry(key).or_default().push((SquareId(i as u32), pos));
            }
        }
        for slots in edge_map.values() {
            if slots.len() == 2 {
                let (s, spos) = slots[0];
                let (t, tpos) = slots[1];
                if squares[s.idx()][spos] == squares[t.idx()][tpos] {
                    return Err(DiskError::NonOrientable);
                }
            }
        }

        let mut neighbors: Vec<[Option<SquareId>; 4]> = vec![[None; 4]; nf];
        for (key, slots) in &edge_map {
            let _ = key;
            if slots.len() == 2 {
                let (s, spos) = slots[0];
                let (t, tpos) = slots[1];
                neighbors[s.idx()][spos] = Some(t);
                neighbors[t.idx()][tpos] = Some(s);
            }
        }

        // Boundary structure: directed boundary edges, one out and one in per
        // boundary vertex, forming a single cycle.
        let mut out_edge: Vec<Option<VertexId>> = vec![None; nv];
        let mut in_count: Vec<usize> = vec![0; nv];
        let mut boundary_edge_count = 0usize;
        for (s, sq) in squares.iter().enumerate() {
            for pos in 0..4 {
                if neighbors[s][pos].is_none() {
                    let from = sq[pos];
                    let to = sq[(pos + 1) % 4];
                    if out_edge[from.idx()].is_some() {
                        return Err(DiskError::BoundaryNotSingleCycle);
                    }
                    out_edge[from.idx()] = Some(to);
                    in_count[to.idx()] += 1;
                    if in_count[to.idx()] > 1 {
                        return Err(DiskError::BoundaryNotSingleCycle);
                    }
                    boundary_edge_count += 1;
                }
            }
        }
        if boundary_edge_count == 0 {
            return Err(DiskError::BoundaryNotSingleCycle);
        }
        let boundary_vertex: Vec<bool> = out_edge.iter().map(|e| e.is_some()).collect();
        for v in 0..nv {
            if boundary_vertex[v] != (in_count[v] == 1) {
                return Err(DiskError::BoundaryNotSingleCycle);
            }
        }
        let start = VertexId(
            (0..nv)
                .find(|&v| boundary_vertex[v])
                .expect("boundary edges exist") as u32,
        );
        let mut boundary_cycle = Vec::with_capacity(boundary_edge_count);
        let mut at = start;
        loop {
            boundary_cycle.push(at);
            at = out_edge[at.idx()].expect("boundary vertex has an outgoing edge");
            if at == start {
                break;
            }
            if boundary_cycle.len() > boundary_edge_count {
                return Err(DiskError::BoundaryNotSingleCycle);
            }
        }
        if boundary_cycle.len() != boundary_edge_count {
            return Err(DiskError::BoundaryNotSingleCycle);
        }

        // Interior vertices sit in exactly four squares.
        for v in 0..nv {
            if !boundary_vertex[v] && vertex_squares[v].len() != 4 {
                return Err(DiskError::InteriorVertexDegree {
                    vertex: vertex_names[v].clone(),
                    squares: vertex_squares[v].len(),
                });
            }
        }

        let interior_edges = edge_map.values().filter(|s| s.len() == 2).count();
        let edges = edge_map.len();
        let euler = nv as i64 - edges as i64 + nf as i64;
        if euler != 1 {
            return Err(DiskError::EulerCharacteristic { euler });
        }

        let interior_vertices = (0..nv).filter(|&v| !boundary_vertex[v]).count();
        let max_deg = (0..nv)
            .filter(|&v| boundary_vertex[v])
            .map(|v| vertex_squares[v].len())
            .max()
            .unwrap_or(0);
        let mut boundary_degree = vec![0usize; max_deg + 1];
        for v in 0..nv {
            if boundary_vertex[v] {
                boundary_degree[vertex_squares[v].len()] += 1;
            }
        }

        let counts = DiskCounts {
            vertices: nv,
            edges,
            interior_edges,
            boundary_edges: boundary_edge_count,
            squares: nf,
            interior_vertices,
            boundary_degree,
        };

        // Count identities from the disk axioms; a failure here is a bug in
        // the validation above, not bad input.
        assert_eq!(4 * counts.squares, 2 * counts.interior_edges + counts.boundary_edges);
        let excess: usize = counts
            .boundary_degree
            .iter()
            .enumerate()
            .skip(3)
            .map(|(r, &n)| (r - 2) * n)
            .sum();
        assert_eq!(counts.corners() as i64 - 4, excess as i64);

        Ok(QuadDisk {
            vertex_names,
            squares,
            neighbors,
            vertex_squares,
            boundary_vertex,
            boundary_cycle,
            counts,
        })
    }

    /// Parses the board text format: `#` for a cell, `.` or space for empty.
    pub fn parse_board(text: &str) -> Result<QuadDisk, DiskError> {
        let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
        let mut cells = Vec::new();
        let nrows = lines.len();
        for (r, line) in lines.iter().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '#' => cells.push((c as i64, (nrows - 1 - r) as i64)),
                    '.' | ' ' => {}
                    ch => return Err(DiskError::UnexpectedGridCharacter { row: r, ch }),
                }
            }
        }
        if cells.is_empty() {
            return Err(DiskError::EmptyGrid);
        }
        check_cells_connected(&cells)?;
        check_cells_hole_free(&cells)?;
        Ok(Self::from_cells(&cells))
    }

    /// Builds the board on an edge-connected, hole-free cell set. Cells are
    /// taken in reading order (top row first).
    pub(crate) fn from_cells(cells: &[(i64, i64)]) -> QuadDisk {
        let mut cells: Vec<(i64, i64)> = cells.to_vec();
        cells.sort_by_key(|&(x, y)| (-y, x));
        cells.dedup();
        let squares: Vec<[String; 4]> = cells
            .iter()
            .map(|&(x, y)| {
                [
                    format!("{x},{y}"),
                    format!("{},{y}", x + 1),
                    format!("{},{}", x + 1, y + 1),
                    format!("{x},{}", y + 1),
                ]
            })
            .collect();
        QuadDisk::from_squares(&squares).expect("a connected hole-free cell set forms a disk")
    }

    pub fn counts(&self) -> &DiskCounts {
        &self.counts
    }

    pub fn num_squares(&self) -> usize {
        self.squares.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn square(&self, s: SquareId) -> [VertexId; 4] {
        self.squares[s.idx()]
    }

    pub fn square_ids(&self) -> impl Iterator<Item = SquareId> {
        (0..self.squares.len()).map(|i| SquareId(i as u32))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.idx()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(|i| VertexId(i as u32))
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertex[v.idx()]
    }

    /// Boundary cycle, counterclockwise (the disk lies on the left), starting
    /// at the smallest boundary vertex id.
    pub fn boundary_cycle(&self) -> &[VertexId] {
        &self.boundary_cycle
    }

    pub fn squares_at(&self, v: VertexId) -> &[SquareId] {
        &self.vertex_squares[v.idx()]
    }

    /// The square across edge position `pos` of `s`, if any.
    pub fn neighbor(&self, s: SquareId, pos: usize) -> Option<SquareId> {
        self.neighbors[s.idx()][pos]
    }

    /// The square sharing the edge `{a, b}` with `s`, if the edge is interior.
    pub fn neighbor_across(&self, s: SquareId, a: VertexId, b: VertexId) -> Option<SquareId> {
        let pos = self.edge_position(s, a, b)?;
        self.neighbors[s.idx()][pos]
    }

    /// Position `pos` such that the edge `{a, b}` of `s` is `(tuple[pos], tuple[pos+1])`.
    pub fn edge_position(&self, s: SquareId, a: VertexId, b: VertexId) -> Option<usize> {
        let sq = &self.squares[s.idx()];
        (0..4).find(|&pos| {
            let (u, v) = (sq[pos], sq[(pos + 1) % 4]);
            (u == a && v == b) || (u == b && v == a)
        })
    }

    pub fn is_boundary_edge(&self, s: SquareId, a: VertexId, b: VertexId) -> bool {
        match self.edge_position(s, a, b) {
            Some(pos) => self.neighbors[s.idx()][pos].is_none(),
            None => false,
        }
    }

    /// True when two squares share an edge.
    pub fn squares_adjacent(&self, s: SquareId, t: SquareId) -> bool {
        self.neighbors[s.idx()].iter().any(|&n| n == Some(t))
    }

    /// Reads the tuple of `s` cyclically starting at `start`; counterclockwise
    /// when `clockwise` is false.
    pub fn tuple_from(&self, s: SquareId, start: VertexId, clockwise: bool) -> [VertexId; 4] {
        let sq = &self.squares[s.idx()];
        let p = sq
            .iter()
            .position(|&v| v == start)
            .expect("start vertex must belong to the square");
        let mut out = [VertexId(0); 4];
        for (i, slot) in out.iter_mut().enumerate() {
            let off = if clockwise { 4 - i } else { i };
            *slot = sq[(p + off) % 4];
        }
        out
    }

    /// Proper 2-coloring with the lowest-index square black.
    pub fn bicolor(&self) -> Bicoloring {
        self.bicolor_from(Color::Black)
    }

    /// Proper 2-coloring with the lowest-index square given the chosen color.
    pub fn bicolor_from(&self, first: Color) -> Bicoloring {
        let mut colors: Vec<Option<Color>> = vec![None; self.squares.len()];
        colors[0] = Some(first);
        let mut queue = VecDeque::from([SquareId(0)]);
        while let Some(s) = queue.pop_front() {
            let c = colors[s.idx()].unwrap();
            for pos in 0..4 {
                if let Some(t) = self.neighbors[s.idx()][pos] {
                    match colors[t.idx()] {
                        None => {
                            colors[t.idx()] = Some(c.opposite());
                            queue.push_back(t);
                        }
                        Some(tc) => assert_ne!(
                            tc, c,
                            "square adjacency graph of a valid disk is bipartite"
                        ),
                    }
                }
            }
        }
        let colors: Vec<Color> = colors
            .into_iter()
            .map(|c| c.expect("valid disks are edge-connected"))
            .collect();
        Bicoloring::from_colors(colors)
    }

    /// The b x w adjacency matrix between black and white squares.
    pub fn black_to_white_matrix(&self, coloring: &Bicoloring) -> IntMatrix {
        let mut m = IntMatrix::zeros(coloring.blacks().len(), coloring.whites().len());
        for (bi, &bs) in coloring.blacks().iter().enumerate() {
            for pos in 0..4 {
                if let Some(t) = self.neighbors[bs.idx()][pos] {
                    let wj = coloring.white_index(t).expect("neighbor has opposite color");
                    m.set(bi, wj, 1);
                }
            }
        }
        m
    }

    /// Developing map seeded on the first edge of square 0.
    pub fn develop(&self) -> DevelopingMap {
        let sq = self.squares[0];
        self.develop_from(sq[0], sq[1])
            .expect("the first edge of square 0 is an edge")
    }

    /// Developing map with `v0 -> (0,0)` and `v1 -> (1,0)`; the directed edge
    /// must be traversed by some square.
    pub fn develop_from(&self, v0: VertexId, v1: VertexId) -> Result<DevelopingMap, DiskError> {
        let mut start = None;
        for (s, sq) in self.squares.iter().enumerate() {
            for pos in 0..4 {
                if sq[pos] == v0 && sq[(pos + 1) % 4] == v1 {
                    start = Some(SquareId(s as u32));
                }
            }
        }
        let start = start.ok_or(DiskError::NoSuchEdge)?;
        Ok(self.develop_inner(start, v0, None))
    }

    /// Worker shared with the traversal-order tests: when `order` is given it
    /// decides which frontier square to place next.
    pub(crate) fn develop_inner(
        &self,
        start: SquareId,
        v0: VertexId,
        order: Option<&[SquareId]>,
    ) -> DevelopingMap {
        let nf = self.squares.len();
        let mut vertex_image: Vec<Option<(i64, i64)>> = vec![None; self.vertex_names.len()];
        let mut placed: Vec<bool> = vec![false; nf];
        let mut corner_images: Vec<[(i64, i64); 4]> = vec![[(0, 0); 4]; nf];

        let place = |s: SquareId,
                     a: VertexId,
                     pa: (i64, i64),
                     pb: (i64, i64),
                     vertex_image: &mut Vec<Option<(i64, i64)>>,
                     corner_images: &mut Vec<[(i64, i64); 4]>| {
            // `s` traverses a->b with the square on the left; the other two
            // corners follow by the left normal.
            let d = (pb.0 - pa.0, pb.1 - pa.1);
            let n = (-d.1, d.0);
            let tuple = self.squares[s.idx()];
            let p = tuple.iter().position(|&v| v == a).unwrap();
            let images = [pa, pb, (pb.0 + n.0, pb.1 + n.1), (pa.0 + n.0, pa.1 + n.1)];
            for (off, &img) in images.iter().enumerate() {
                let v = tuple[(p + off) % 4];
                match vertex_image[v.idx()] {
                    None => vertex_image[v.idx()] = Some(img),
                    Some(prev) => assert_eq!(
                        prev, img,
                        "developing map is single-valued on valid disks"
                    ),
                }
                corner_images[s.idx()][(p + off) % 4] = img;
            }
        };

        place(start, v0, (0, 0), (1, 0), &mut vertex_image, &mut corner_images);
        placed[start.idx()] = true;
        let mut frontier: Vec<SquareId> = vec![start];
        let mut done = 1usize;
        while done < nf {
            // Pick an expandable frontier square; with an explicit order, take
            // the first listed square that is placed and has unplaced work.
            let pick = match order {
                None => 0,
                Some(seq) => {
                    let mut found = 0;
                    'search: for &want in seq {
                        for (i, &f) in frontier.iter().enumerate() {
                            if f == want {
                                found = i;
                                break 'search;
                            }
                        }
                    }
                    found
                }
            };
            let s = frontier[pick];
            let mut expanded = false;
            for pos in 0..4 {
                if let Some(t) = self.neighbors[s.idx()][pos] {
                    if placed[t.idx()] {
                        continue;
                    }
                    let a = self.squares[s.idx()][pos];
                    let b = self.squares[s.idx()][(pos + 1) % 4];
                    // t traverses b->a.
                    let pa = vertex_image[a.idx()].unwrap();
                    let pb = vertex_image[b.idx()].unwrap();
                    place(t, b, pb, pa, &mut vertex_image, &mut corner_images);
                    placed[t.idx()] = true;
                    frontier.push(t);
                    done += 1;
                    expanded = true;
                }
            }
            if !expanded {
                frontier.remove(pick);
            }
        }

        let vertex_image: Vec<(i64, i64)> = vertex_image
            .into_iter()
            .map(|v| v.expect("valid disks are edge-connected"))
            .collect();
        let square_cell: Vec<(i64, i64)> = corner_images
            .iter()
            .map(|c| {
                let x = c.iter().map(|p| p.0).min().unwrap();
                let y = c.iter().map(|p| p.1).min().unwrap();
                (x, y)
            })
            .collect();
        DevelopingMap {
            vertex_image,
            corner_images,
            square_cell,
        }
    }

    /// True when the developing map sends squares to pairwise distinct
    /// lattice cells.
    pub fn is_board(&self) -> bool {
        self.develop().is_injective_on_cells()
    }

    /// Serializes in the complex text format.
    pub fn to_complex_text(&self) -> String {
        let mut out = String::from("quadcomplex\n");
        for (i, sq) in self.squares.iter().enumerate() {
            out.push_str(&format!(
                "s {}: {} {} {} {}\n",
                i,
                self.vertex_names[sq[0].idx()],
                self.vertex_names[sq[1].idx()],
                self.vertex_names[sq[2].idx()],
                self.vertex_names[sq[3].idx()],
            ));
        }
        out
    }

    /// ASCII rendering of the developed cells; only sensible for boards.
    pub fn to_board_text(&self) -> Option<String> {
        let dev = self.develop();
        if !dev.is_injective_on_cells() {
            return None;
        }
        let cells: Vec<(i64, i64)> = (0..self.squares.len())
            .map(|s| dev.cell(SquareId(s as u32)))
            .collect();
        let minx = cells.iter().map(|c| c.0).min().unwrap();
        let maxx = cells.iter().map(|c| c.0).max().unwrap();
        let miny = cells.iter().map(|c| c.1).min().unwrap();
        let maxy = cells.iter().map(|c| c.1).max().unwrap();
        let mut out = String::new();
        for y in (miny..=maxy).rev() {
            for x in minx..=maxx {
                out.push(if cells.contains(&(x, y)) { '#' } else { '.' });
            }
            out.push('\n');
        }
        Some(out)
    }
}

fn check_cells_connected(cells: &[(i64, i64)]) -> Result<(), DiskError> {
    let set: std::collections::HashSet<(i64, i64)> = cells.iter().copied().collect();
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some((x, y)) = queue.pop_front() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    if seen.len() == set.len() {
        Ok(())
    } else {
        Err(DiskError::GridNotEdgeConnected)
    }
}

fn check_cells_hole_free(cells: &[(i64, i64)]) -> Result<(), DiskError> {
    let set: std::collections::HashSet<(i64, i64)> = cells.iter().copied().collect();
    let minx = cells.iter().map(|c| c.0).min().unwrap() - 1;
    let maxx = cells.iter().map(|c| c.0).max().unwrap() + 1;
    let miny = cells.iter().map(|c| c.1).min().unwrap() - 1;
    let maxy = cells.iter().map(|c| c.1).max().unwrap() + 1;
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([(minx, miny)]);
    seen.insert((minx, miny));
    while let Some((x, y)) = queue.pop_front() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if n.0 < minx || n.0 > maxx || n.1 < miny || n.1 > maxy {
                continue;
            }
            if !set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let total = ((maxx - minx + 1) * (maxy - miny + 1)) as usize;
    if seen.len() + set.len() == total {
        Ok(())
    } else {
        Err(DiskError::GridHasHole)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// A proper 2-coloring with label maps: black squares are numbered in
/// square-index order, likewise white.
#[derive(Clone, Debug)]
pub struct Bicoloring {
    colors: Vec<Color>,
    blacks: Vec<SquareId>,
    whites: Vec<SquareId>,
    black_index: Vec<Option<usize>>,
    white_index: Vec<Option<usize>>,
}

impl Bicoloring {
    pub fn from_colors(colors: Vec<Color>) -> Bicoloring {
        let mut blacks = Vec::new();
        let mut whites = Vec::new();
        let mut black_index = vec![None; colors.len()];
        let mut white_index = vec![None; colors.len()];
        for (i, &c) in colors.iter().enumerate() {
            match c {
                Color::Black => {
                    black_index[i] = Some(blacks.len());
                    blacks.push(SquareId(i as u32));
                }
                Color::White => {
                    white_index[i] = Some(whites.len());
                    whites.push(SquareId(i as u32));
                }
            }
        }
        Bicoloring {
            colors,
            blacks,
            whites,
            black_index,
            white_index,
        }
    }

    pub fn color(&self, s: SquareId) -> Color {
        self.colors[s.idx()]
    }

    pub fn blacks(&self) -> &[SquareId] {
        &self.blacks
    }

    pub fn whites(&self) -> &[SquareId] {
        &self.whites
    }

    pub fn black_index(&self, s: SquareId) -> Option<usize> {
        self.black_index[s.idx()]
    }

    pub fn white_index(&self, s: SquareId) -> Option<usize> {
        self.white_index[s.idx()]
    }
}

/// Per-square placements in the integer lattice plane. Each vertex gets a
/// single image; squares may overlap when the disk is not a board.
#[derive(Clone, Debug)]
pub struct DevelopingMap {
    vertex_image: Vec<(i64, i64)>,
    corner_images: Vec<[(i64, i64); 4]>,
    square_cell: Vec<(i64, i64)>,
}

impl DevelopingMap {
    pub fn vertex_image(&self, v: VertexId) -> (i64, i64) {
        self.vertex_image[v.idx()]
    }

    /// Lower-left corner of the image cell of `s`.
    pub fn cell(&self, s: SquareId) -> (i64, i64) {
        self.square_cell[s.idx()]
    }

    pub fn corner_images(&self, s: SquareId) -> [(i64, i64); 4] {
        self.corner_images[s.idx()]
    }

    pub fn is_injective_on_cells(&self) -> bool {
        let mut cells = self.square_cell.clone();
        cells.sort_unstable();
        cells.windows(2).all(|w| w[0] != w[1])
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn parse(text: &str) -> QuadDisk {
        QuadDisk::parse_board(text).unwrap()
    }

    #[test]
    fn single_square_counts() {
        let d = parse("#");
        let c = d.counts();
        assert_eq!((c.vertices, c.edges, c.squares), (4, 4, 1));
        assert_eq!(c.boundary_edges, 4);
        assert_eq!(c.corners(), 4);
    }

    #[test]
    fn two_by_two_counts() {
        let d = parse("##\n##");
        let c = d.counts();
        assert_eq!((c.vertices, c.edges, c.squares), (9, 12, 4));
        assert_eq!(c.interior_vertices, 1);
        assert_eq!(c.vertices as i64 - c.edges as i64 + c.squares as i64, 1);
    }

    #[test]
    fn l_tromino_counts() {
        let d = parse("##\n#.");
        let c = d.counts();
        assert_eq!((c.vertices, c.edges, c.squares), (8, 10, 3));
        assert_eq!(c.corners(), 5);
    }

    #[test]
    fn grid_errors() {
        assert_eq!(QuadDisk::parse_board("...").unwrap_err(), DiskError::EmptyGrid);
        assert_eq!(
            QuadDisk::parse_board("#.#").unwrap_err(),
            DiskError::GridNotEdgeConnected
        );
        assert_eq!(
            QuadDisk::parse_board("###\n#.#\n###").unwrap_err(),
            DiskError::GridHasHole
        );
        assert!(matches!(
            QuadDisk::parse_board("#x").unwrap_err(),
            DiskError::UnexpectedGridCharacter { .. }
        ));
    }

    #[test]
    fn build_complex_single_square() {
        let d = QuadDisk::from_squares(&[["a", "b", "c", "d"]]).unwrap();
        assert_eq!(d.counts().squares, 1);
        assert_eq!(d.counts().corners(), 4);
    }

    #[test]
    fn build_complex_domino() {
        let d = QuadDisk::from_squares(&[["a", "b", "c", "d"], ["b", "e", "f", "c"]]).unwrap();
        let c = d.counts();
        assert_eq!(c.boundary_edges, 6);
        assert_eq!(c.interior_edges, 1);
    }

    #[test]
    fn build_complex_flips_reversed_square() {
        // Second square stored clockwise relative to the first.
        let d = QuadDisk::from_squares(&[["a", "b", "c", "d"], ["c", "f", "e", "b"]]).unwrap();
        assert_eq!(d.counts().squares, 2);
        assert_eq!(d.counts().interior_edges, 1);
    }

    #[test]
    fn pinched_complex_rejected() {
        // Two squares sharing only the vertex c.
        let err = QuadDisk::from_squares(&[["a", "b", "c", "d"], ["c", "e", "f", "g"]])
            .unwrap_err();
        assert_eq!(err, DiskError::BoundaryNotSingleCycle);
    }

    #[test]
    fn interior_degree_three_rejected() {
        // Three squares forming a cone around v: Euler works out but the
        // interior vertex has degree 3.
        let err = QuadDisk::from_squares(&[
            ["v", "a", "x", "b"],
            ["v", "b", "y", "c"],
            ["v", "c", "z", "a"],
        ])
        .unwrap_err();
        assert!(matches!(err, DiskError::InteriorVertexDegree { squares: 3, .. }));
    }

    #[test]
    fn nonorientable_rejected() {
        let err =
            QuadDisk::from_squares(&[["a", "b", "c", "d"], ["a", "b", "d", "c"]]).unwrap_err();
        assert_eq!(err, DiskError::NonOrientable);
    }

    #[test]
    fn disconnected_rejected() {
        let err = QuadDisk::from_squares(&[["a", "b", "c", "d"], ["e", "f", "g", "h"]])
            .unwrap_err();
        assert_eq!(err, DiskError::Disconnected);
    }

    #[test]
    fn bicolor_examples() {
        let d = parse("#");
        let col = d.bicolor();
        assert_eq!((col.blacks().len(), col.whites().len()), (1, 0));

        let d = parse("##");
        let col = d.bicolor();
        assert_eq!((col.blacks().len(), col.whites().len()), (1, 1));

        let d = parse("##\n##");
        let col = d.bicolor();
        assert_eq!((col.blacks().len(), col.whites().len()), (2, 2));
        // Diagonal cells share a color: squares 0 and 3 in reading order.
        assert_eq!(col.color(SquareId(0)), col.color(SquareId(3)));
        assert_eq!(col.color(SquareId(1)), col.color(SquareId(2)));
    }

    #[test]
    fn bicolor_is_proper_on_small_boards() {
        for text in ["#", "##", "##\n##", "###\n###", "##\n#.", "###\n..#"] {
            let d = parse(text);
            let col = d.bicolor();
            for s in d.square_ids() {
                for pos in 0..4 {
                    if let Some(t) = d.neighbor(s, pos) {
                        assert_ne!(col.color(s), col.color(t));
                    }
                }
            }
        }
    }

    #[test]
    fn recoloring_transposes_matrix() {
        let d = parse("###\n##.");
        let black_first = d.black_to_white_matrix(&d.bicolor_from(Color::Black));
        let white_first = d.black_to_white_matrix(&d.bicolor_from(Color::White));
        assert_eq!(black_first.transpose(), white_first);
    }

    #[test]
    fn black_to_white_examples() {
        let d = parse("##");
        let m = d.black_to_white_matrix(&d.bicolor());
        assert_eq!(m.to_rows(), vec![vec![1]]);

        let d = parse("##\n##");
        let m = d.black_to_white_matrix(&d.bicolor());
        assert_eq!(m.to_rows(), vec![vec![1, 1], vec![1, 1]]);

        let d = parse("###\n###");
        let m = d.black_to_white_matrix(&d.bicolor());
        let mut row_sums: Vec<i64> = (0..3).map(|i| m.row(i).iter().sum()).collect();
        row_sums.sort_unstable();
        assert_eq!(row_sums, vec![2, 2, 3]);
        let mt = m.transpose();
        let mut col_sums: Vec<i64> = (0..3).map(|i| mt.row(i).iter().sum()).collect();
        col_sums.sort_unstable();
        assert_eq!(col_sums, vec![2, 2, 3]);
    }

    fn parse_name(name: &str) -> (i64, i64) {
        let (x, y) = name.split_once(',').unwrap();
        (x.parse().unwrap(), y.parse().unwrap())
    }

    /// Develop must reproduce grid coordinates up to an orientation-preserving
    /// lattice isometry.
    fn assert_develop_matches_grid(d: &QuadDisk) {
        let dev = d.develop();
        let sq = d.square(SquareId(0));
        let t0 = parse_name(d.vertex_name(sq[0]));
        let t1 = parse_name(d.vertex_name(sq[1]));
        let d0 = dev.vertex_image(sq[0]);
        let d1 = dev.vertex_image(sq[1]);
        // Rotation taking the developed edge direction onto the true one.
        let dd = (d1.0 - d0.0, d1.1 - d0.1);
        let td = (t1.0 - t0.0, t1.1 - t0.1);
        let rots: [fn((i64, i64)) -> (i64, i64); 4] = [
            |p| p,
            |p| (-p.1, p.0),
            |p| (-p.0, -p.1),
            |p| (p.1, -p.0),
        ];
        let rot = rots
            .iter()
            .find(|r| r(dd) == td)
            .expect("edge directions differ by a rotation");
        let rp = rot(d0);
        let shift = (t0.0 - rp.0, t0.1 - rp.1);
        for v in 0..d.num_vertices() {
            let v = VertexId(v as u32);
            let img = rot(dev.vertex_image(v));
            let mapped = (img.0 + shift.0, img.1 + shift.1);
            assert_eq!(mapped, parse_name(d.vertex_name(v)));
        }
    }

    #[test]
    fn develop_reproduces_grid_coordinates() {
        for text in ["#", "##", "##\n##", "###\n###", "##\n#.", "###\n..#", "#.\n##\n.#"] {
            assert_develop_matches_grid(&parse(text));
        }
    }

    #[test]
    fn develop_single_square_unit() {
        let d = parse("#");
        let dev = d.develop();
        assert_eq!(dev.cell(SquareId(0)), (0, 0));
    }

    #[test]
    fn develop_is_traversal_order_independent() {
        // A crude deterministic shuffle; placements must not depend on it.
        let d = parse("####\n...#\n####");
        let baseline = d.develop();
        let n = d.num_squares();
        let mut order: Vec<SquareId> = (0..n).map(|i| SquareId(i as u32)).collect();
        let mut state = 0x9e3779b97f4a7c15u64;
        for round in 0..8 {
            let _ = round;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                order.swap(i, j);
            }
            let sq = d.square(SquareId(0));
            let dev = d.develop_inner(SquareId(0), sq[0], Some(&order));
            for s in d.square_ids() {
                assert_eq!(dev.corner_images(s), baseline.corner_images(s));
            }
        }
    }

    #[test]
    fn parsed_boards_are_boards() {
        for text in ["#", "##\n##", "###\n#..", "####"] {
            assert!(parse(text).is_board());
        }
    }

    /// Winding strip of nine squares: the ninth lands on the first cell.
    pub(crate) fn spiral_disk() -> QuadDisk {
        let ring = [
            (1i64, 0i64),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
            (1, 0),
        ];
        // Build abstract squares: consecutive ring cells share one edge; the
        // ninth square reuses no vertices of the first.
        let mut squares: Vec<[String; 4]> = Vec::new();
        let mut fresh = 0usize;
        let mut prev_edge: Option<[(String, (i64, i64)); 2]> = None;
        for (i, &cell) in ring.iter().enumerate() {
            let corners = [
                (cell.0, cell.1),
                (cell.0 + 1, cell.1),
                (cell.0 + 1, cell.1 + 1),
                (cell.0, cell.1 + 1),
            ];
            let mut names: Vec<(String, (i64, i64))> = Vec::new();
            for &c in &corners {
                let reused = prev_edge
                    .as_ref()
                    .and_then(|e| e.iter().find(|(_, p)| *p == c).map(|(n, _)| n.clone()));
                let name = reused.unwrap_or_else(|| {
                    fresh += 1;
                    format!("p{fresh}")
                });
                names.push((name, c));
            }
            squares.push([
                names[0].0.clone(),
                names[1].0.clone(),
                names[2].0.clone(),
                names[3].0.clone(),
            ]);
            if i + 1 < ring.len() {
                let next = ring[i + 1];
                let shared: Vec<(String, (i64, i64))> = names
                    .iter()
                    .filter(|(_, p)| {
                        let dx = p.0 - next.0;
                        let dy = p.1 - next.1;
                        (0..=1).contains(&dx) && (0..=1).contains(&dy)
                    })
                    .cloned()
                    .collect();
                assert_eq!(shared.len(), 2);
                prev_edge = Some([shared[0].clone(), shared[1].clone()]);
            }
        }
        QuadDisk::from_squares(&squares).unwrap()
    }

    #[test]
    fn spiral_is_valid_but_not_a_board() {
        let d = spiral_disk();
        assert_eq!(d.counts().squares, 9);
        assert!(!d.is_board());
        // Exactly one colliding cell pair: the first and the last square.
        let dev = d.develop();
        assert_eq!(dev.cell(SquareId(0)), dev.cell(SquareId(8)));
    }

    #[test]
    fn board_text_round_trip() {
        let d = parse("##.\n.##");
        let text = d.to_board_text().unwrap();
        assert_eq!(text, "##.\n.##\n");
    }
}
