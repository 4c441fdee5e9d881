//! Diagonals of a quadriculated disk.
//!
//! A diagonal starts at a corner and steps through opposite vertices of
//! squares that meet only at single vertices, ending at the first boundary
//! vertex. Good diagonals (at least one side of the final square at the end
//! vertex lies on the boundary) are the raw material for surgery; on boards,
//! excellent diagonals additionally have a boundary arc monotone in both
//! coordinates, which keeps surgery inside the class of boards.

use crate::disk::{DevelopingMap, DiskError, QuadDisk, SquareId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalClass {
    Bad,
    GoodBalanced,
    GoodUnbalanced,
}

impl DiagonalClass {
    pub fn is_good(self) -> bool {
        self != DiagonalClass::Bad
    }

    pub fn label(self) -> &'static str {
        match self {
            DiagonalClass::Bad => "bad",
            DiagonalClass::GoodBalanced => "good-balanced",
            DiagonalClass::GoodUnbalanced => "good-unbalanced",
        }
    }
}

/// A traced diagonal `v_0 .. v_k` with its squares `s_1 .. s_k` and, for each
/// square, the neighbor vertices read off the counterclockwise order
/// (`right_vertices[i-1]` and `left_vertices[i-1]` flank `s_i`).
#[derive(Clone, Debug)]
pub struct Diagonal {
    pub vertices: Vec<VertexId>,
    pub squares: Vec<SquareId>,
    pub right_vertices: Vec<VertexId>,
    pub left_vertices: Vec<VertexId>,
    pub class: DiagonalClass,
}

impl Diagonal {
    pub fn corner(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn k(&self) -> usize {
        self.squares.len()
    }

    pub fn is_good(&self) -> bool {
        self.class.is_good()
    }
}

/// Boundary vertices belonging to a single square, in ascending id order.
pub fn corners(disk: &QuadDisk) -> Vec<VertexId> {
    (0..disk.num_vertices() as u32)
        .map(VertexId)
        .filter(|&v| disk.is_boundary_vertex(v) && disk.squares_at(v).len() == 1)
        .collect()
}

/// Traces the unique diagonal starting at `corner`.
pub fn trace_diagonal(disk: &QuadDisk, corner: VertexId) -> Result<Diagonal, DiskError> {
    if !disk.is_boundary_vertex(corner) || disk.squares_at(corner).len() != 1 {
        return Err(DiskError::NotACorner {
            vertex: disk.vertex_name(corner).to_string(),
        });
    }
    let mut vertices = vec![corner];
    let mut squares = Vec::new();
    let mut right_vertices = Vec::new();
    let mut left_vertices = Vec::new();

    let mut square = disk.squares_at(corner)[0];
    let mut from = corner;
    loop {
        let tuple = disk.tuple_from(square, from, false);
        let to = tuple[2];
        squares.push(square);
        right_vertices.push(tuple[1]);
        left_vertices.push(tuple[3]);
        vertices.push(to);
        if disk.is_boundary_vertex(to) {
            break;
        }
        // Interior vertex: of its four squares, the next one shares only `to`
        // with the current square.
        let wheel = disk.squares_at(to);
        debug_assert_eq!(wheel.len(), 4);
        let n1 = disk.neighbor_across(square, tuple[1], to);
        let n2 = disk.neighbor_across(square, to, tuple[3]);
        let next = wheel
            .iter()
            .copied()
            .find(|&s| Some(s) != n1 && Some(s) != n2 && s != square)
            .expect("interior vertex wheel contains the opposite square");
        square = next;
        from = to;
        assert!(
            squares.len() <= disk.num_squares(),
            "diagonal tracing must terminate"
        );
    }

    let class = classify_parts(disk, *squares.last().unwrap(), &vertices, &right_vertices, &left_vertices);
    Ok(Diagonal {
        vertices,
        squares,
        right_vertices,
        left_vertices,
        class,
    })
}

fn classify_parts(
    disk: &QuadDisk,
    last_square: SquareId,
    vertices: &[VertexId],
    right_vertices: &[VertexId],
    left_vertices: &[VertexId],
) -> DiagonalClass {
    let end = *vertices.last().unwrap();
    let vr = *right_vertices.last().unwrap();
    let vl = *left_vertices.last().unwrap();
    let right_on_boundary = disk.is_boundary_edge(last_square, vr, end);
    let left_on_boundary = disk.is_boundary_edge(last_square, end, vl);
    match (right_on_boundary, left_on_boundary) {
        (false, false) => DiagonalClass::Bad,
        (true, true) => DiagonalClass::GoodUnbalanced,
        _ => DiagonalClass::GoodBalanced,
    }
}

/// Re-derives the classification of an already traced diagonal.
pub fn classify(disk: &QuadDisk, diagonal: &Diagonal) -> DiagonalClass {
    classify_parts(
        disk,
        *diagonal.squares.last().unwrap(),
        &diagonal.vertices,
        &diagonal.right_vertices,
        &diagonal.left_vertices,
    )
}

/// Every good diagonal, ordered by starting corner id. A valid disk always
/// has at least four.
pub fn good_diagonals(disk: &QuadDisk) -> Vec<Diagonal> {
    let good: Vec<Diagonal> = corners(disk)
        .into_iter()
        .map(|c| trace_diagonal(disk, c).expect("corners() yields corners"))
        .filter(Diagonal::is_good)
        .collect();
    assert!(
        good.len() >= 4,
        "every quadriculated disk admits at least four good diagonals"
    );
    good
}

/// Which of the two boundary arcs between the diagonal's endpoints are
/// monotone in both coordinates. `right` refers to the arc on the right of
/// the (oriented) diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcMonotonicity {
    pub right: bool,
    pub left: bool,
}

impl ArcMonotonicity {
    pub fn any(self) -> bool {
        self.right || self.left
    }
}

fn weakly_monotone(values: &[i64]) -> bool {
    values.windows(2).all(|w| w[0] <= w[1]) || values.windows(2).all(|w| w[0] >= w[1])
}

fn arc_is_monotone(dev: &DevelopingMap, arc: &[VertexId]) -> bool {
    let xs: Vec<i64> = arc.iter().map(|&v| dev.vertex_image(v).0).collect();
    let ys: Vec<i64> = arc.iter().map(|&v| dev.vertex_image(v).1).collect();
    weakly_monotone(&xs) && weakly_monotone(&ys)
}

/// Splits the boundary cycle at the diagonal's endpoints and tests each arc.
pub fn arc_monotonicity(disk: &QuadDisk, dev: &DevelopingMap, diagonal: &Diagonal) -> ArcMonotonicity {
    let (right_arc, left_arc) = boundary_arcs(disk, diagonal);
    ArcMonotonicity {
        right: arc_is_monotone(dev, &right_arc),
        left: arc_is_monotone(dev, &left_arc),
    }
}

/// The two boundary arcs from `v_0` to `v_k`, as vertex paths. The first
/// returned arc lies to the right of the diagonal.
pub fn boundary_arcs(disk: &QuadDisk, diagonal: &Diagonal) -> (Vec<VertexId>, Vec<VertexId>) {
    let cycle = disk.boundary_cycle();
    let n = cycle.len();
    let i0 = cycle
        .iter()
        .position(|&v| v == diagonal.corner())
        .expect("corner lies on the boundary");
    let ik = cycle
        .iter()
        .position(|&v| v == diagonal.end())
        .expect("diagonal end lies on the boundary");
    // The boundary is traversed with the disk on the left, so the walk
    // leaving the corner starts along the right side of the diagonal.
    debug_assert_eq!(cycle[(i0 + 1) % n], diagonal.right_vertices[0]);
    let mut right_arc = Vec::new();
    let mut at = i0;
    loop {
        right_arc.push(cycle[at]);
        if at == ik {
            break;
        }
        at = (at + 1) % n;
    }
    let mut left_arc = Vec::new();
    let mut at = ik;
    loop {
        left_arc.push(cycle[at]);
        if at == i0 {
            break;
        }
        at = (at + 1) % n;
    }
    left_arc.reverse();
    (right_arc, left_arc)
}

/// All diagonals of a board with a monotone boundary arc, ordered by starting
/// corner. Errors on non-boards; the result is never empty and every entry is
/// good.
pub fn excellent_diagonals(disk: &QuadDisk) -> Result<Vec<Diagonal>, DiskError> {
    let dev = disk.develop();
    if !dev.is_injective_on_cells() {
        return Err(DiskError::NotABoard);
    }
    let mut out = Vec::new();
    for c in corners(disk) {
        let diag = trace_diagonal(disk, c).expect("corners() yields corners");
        if arc_monotonicity(disk, &dev, &diag).any() {
            assert!(diag.is_good(), "excellent diagonals are good");
            out.push(diag);
        }
    }
    assert!(!out.is_empty(), "every board admits an excellent diagonal");
    Ok(out)
}

/// Deterministic pick for the factorization pipeline: the smallest
/// `(k, corner id)` among excellent diagonals on boards, among good
/// diagonals otherwise.
pub fn select_pipeline_diagonal(disk: &QuadDisk) -> Diagonal {
    let candidates = match excellent_diagonals(disk) {
        Ok(diags) => diags,
        Err(DiskError::NotABoard) => good_diagonals(disk),
        Err(e) => unreachable!("excellent_diagonals only fails on non-boards: {e}"),
    };
    candidates
        .into_iter()
        .min_by_key(|d| (d.k(), d.corner()))
        .expect("candidate list is never empty")
}
