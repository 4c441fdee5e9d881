//! Cut-and-paste surgery along a good diagonal.
//!
//! The plan normalizes handedness so that the excised flank always sits on
//! the *left* of the diagonal: removing the diagonal squares together with
//! the left flank leaves two zig-zags, and identifying the left one onto the
//! right one glues the remainder back into a disjoint union of smaller disks.
//! Side classification is purely combinatorial (flood fill over surviving
//! squares), never geometric.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::diagonal::{self, ArcMonotonicity, Diagonal, DiagonalClass};
use crate::disk::{Bicoloring, Color, QuadDisk, SquareId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanSide {
    /// Same side as the excised flank.
    Left,
    /// Opposite side; these squares pick up the -1 signs in the step factors.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    BadDiagonal,
    /// A balanced diagonal forces the flank onto the side with k squares.
    IncompatibleSide,
}

impl std::fmt::Display for SurgeryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurgeryError::BadDiagonal => write!(f, "surgery requires a good diagonal"),
            SurgeryError::IncompatibleSide => {
                write!(f, "balanced diagonals force the excised side")
            }
        }
    }
}

impl std::error::Error for SurgeryError {}

#[derive(Clone, Debug)]
pub struct SurgeryPlan {
    pub diagonal: Diagonal,
    /// True when the excised flank lies on the diagonal's intrinsic right;
    /// all other plan fields are already expressed in the normalized frame.
    pub flipped: bool,
    pub k: usize,
    pub k_prime: usize,
    /// Excised flank squares `s^l_1 .. s^l_{k'}`.
    pub flank: Vec<SquareId>,
    /// Surviving flank squares `s^r_1 .. s^r_{k-1}` on the kept side.
    pub kept_flank: Vec<SquareId>,
    /// Zig-zag on the excised side (identified onto `zig_kept`).
    pub zig_flank: Vec<VertexId>,
    pub zig_kept: Vec<VertexId>,
    /// In the balanced case two segments longer than `zig_flank`.
    pub zig_flank_plus: Vec<VertexId>,
    /// Side of every surviving square; `None` for excised squares.
    pub side: Vec<Option<PlanSide>>,
}

impl SurgeryPlan {
    pub fn removed_squares(&self) -> Vec<SquareId> {
        let mut out = self.diagonal.squares.clone();
        out.extend_from_slice(&self.flank);
        out
    }

    /// Flank vertex `v^l_{i-1/2}` in the normalized frame.
    fn frame_left(&self) -> &[VertexId] {
        if self.flipped {
            &self.diagonal.right_vertices
        } else {
            &self.diagonal.left_vertices
        }
    }

    fn frame_right(&self) -> &[VertexId] {
        if self.flipped {
            &self.diagonal.left_vertices
        } else {
            &self.diagonal.right_vertices
        }
    }
}

/// Plans surgery with the deterministic default side choice.
pub fn plan_surgery(disk: &QuadDisk, diagonal: &Diagonal) -> Result<SurgeryPlan, SurgeryError> {
    plan_surgery_with_flip(disk, diagonal, None)
}

/// Plans surgery, optionally forcing the excised flank onto the intrinsic
/// right (`flip = true`) or left (`false`). Balanced diagonals admit only one
/// choice and reject the other.
pub fn plan_surgery_with_flip(
    disk: &QuadDisk,
    diagonal: &Diagonal,
    flip: Option<bool>,
) -> Result<SurgeryPlan, SurgeryError> {
    let k = diagonal.k();
    let end = diagonal.end();
    let s_k = *diagonal.squares.last().unwrap();
    let vr_k = *diagonal.right_vertices.last().unwrap();
    let vl_k = *diagonal.left_vertices.last().unwrap();

    let flipped = match diagonal.class {
        DiagonalClass::Bad => return Err(SurgeryError::BadDiagonal),
        DiagonalClass::GoodBalanced => {
            // The flank goes on the side whose edge at the end vertex is
            // interior, so that it has k squares.
            let left_interior = disk.neighbor_across(s_k, end, vl_k).is_some();
            let right_interior = disk.neighbor_across(s_k, vr_k, end).is_some();
            assert!(left_interior ^ right_interior);
            let forced = right_interior;
            if let Some(requested) = flip {
                if requested != forced {
                    return Err(SurgeryError::IncompatibleSide);
                }
            }
            forced
        }
        DiagonalClass::GoodUnbalanced => flip.unwrap_or_else(|| {
            if k == 1 {
                // Single-square disk: no flank on either side.
                false
            } else {
                let v1 = diagonal.vertices[1];
                let s1 = diagonal.squares[0];
                let left = disk
                    .neighbor_across(s1, v1, diagonal.left_vertices[0])
                    .expect("interior diagonal vertices have full wheels");
                let right = disk
                    .neighbor_across(s1, diagonal.right_vertices[0], v1)
                    .expect("interior diagonal vertices have full wheels");
                right < left
            }
        }),
    };

    let mut plan = SurgeryPlan {
        diagonal: diagonal.clone(),
        flipped,
        k,
        k_prime: match diagonal.class {
            DiagonalClass::GoodBalanced => k,
            _ => k - 1,
        },
        flank: Vec::new(),
        kept_flank: Vec::new(),
        zig_flank: Vec::new(),
        zig_kept: Vec::new(),
        zig_flank_plus: Vec::new(),
        side: vec![None; disk.num_squares()],
    };

    let verts = &plan.diagonal.vertices;
    let frame_left: Vec<VertexId> = plan.frame_left().to_vec();
    let frame_right: Vec<VertexId> = plan.frame_right().to_vec();

    for i in 1..=plan.k_prime {
        let s_i = plan.diagonal.squares[i - 1];
        let flank_sq = disk
            .neighbor_across(s_i, verts[i], frame_left[i - 1])
            .expect("flank square exists on the chosen side");
        plan.flank.push(flank_sq);
    }
    for i in 1..k {
        let s_i = plan.diagonal.squares[i - 1];
        let kept = disk
            .neighbor_across(s_i, frame_right[i - 1], verts[i])
            .expect("kept flank squares exist at interior diagonal vertices");
        let from_next = disk.neighbor_across(plan.diagonal.squares[i], verts[i], frame_right[i]);
        assert_eq!(from_next, Some(kept), "kept flank square is shared");
        plan.kept_flank.push(kept);
    }
    // There is never a kept flank square past the end of the diagonal.
    assert!(disk.neighbor_across(s_k, *frame_right.last().unwrap(), end).is_none());

    if plan.k_prime > 0 {
        for i in 1..=k {
            plan.zig_flank.push(frame_left[i - 1]);
            plan.zig_kept.push(frame_right[i - 1]);
            if i <= k - 1 {
                let tuple = disk.tuple_from(plan.flank[i - 1], frame_left[i - 1], plan.flipped);
                assert_eq!(tuple[1], verts[i]);
                assert_eq!(tuple[2], frame_left[i]);
                plan.zig_flank.push(tuple[3]);
                plan.zig_kept.push(verts[i]);
            }
        }
        plan.zig_flank_plus = plan.zig_flank.clone();
        if diagonal.class == DiagonalClass::GoodBalanced {
            let tuple = disk.tuple_from(plan.flank[k - 1], frame_left[k - 1], plan.flipped);
            assert_eq!(tuple[1], end);
            plan.zig_flank_plus.push(tuple[3]);
            plan.zig_flank_plus.push(tuple[2]);
        }
        assert!(disk.is_boundary_vertex(*plan.zig_kept.first().unwrap()));
        assert!(disk.is_boundary_vertex(*plan.zig_kept.last().unwrap()));
        assert!(disk.is_boundary_vertex(*plan.zig_flank_plus.first().unwrap()));
        if diagonal.class == DiagonalClass::GoodUnbalanced {
            // Balanced diagonals can end the extended zig-zag at an interior
            // vertex (the far flank corner may sit inside the disk).
            assert!(disk.is_boundary_vertex(*plan.zig_flank_plus.last().unwrap()));
        }
    }

    plan.side = classify_sides(disk, &plan);
    Ok(plan)
}

/// Flood-fills surviving squares from seeds adjacent to the excised strip.
fn classify_sides(disk: &QuadDisk, plan: &SurgeryPlan) -> Vec<Option<PlanSide>> {
    let mut side = vec![None; disk.num_squares()];
    let removed: HashSet<SquareId> = plan.removed_squares().into_iter().collect();
    let mut queue: VecDeque<SquareId> = VecDeque::new();
    let seed = |sq: Option<SquareId>,
                    s: PlanSide,
                    side: &mut Vec<Option<PlanSide>>,
                    queue: &mut VecDeque<SquareId>| {
        if let Some(sq) = sq {
            assert!(!removed.contains(&sq), "strip squares have distinct cells");
            match side[sq.idx()] {
                None => {
                    side[sq.idx()] = Some(s);
                    queue.push_back(sq);
                }
                Some(existing) => assert_eq!(existing, s, "strip separates the two sides"),
            }
        }
    };

    for &sq in &plan.kept_flank {
        seed(Some(sq), PlanSide::Right, &mut side, &mut queue);
    }
    let frame_left: Vec<VertexId> = plan.frame_left().to_vec();
    for (i, &flank_sq) in plan.flank.iter().enumerate() {
        let tuple = disk.tuple_from(flank_sq, frame_left[i], plan.flipped);
        // Far edges (tuple[2], tuple[3]) and (tuple[3], tuple[0]).
        seed(
            disk.neighbor_across(flank_sq, tuple[2], tuple[3]),
            PlanSide::Left,
            &mut side,
            &mut queue,
        );
        seed(
            disk.neighbor_across(flank_sq, tuple[3], tuple[0]),
            PlanSide::Left,
            &mut side,
            &mut queue,
        );
        if i + 1 == plan.k && plan.k_prime == plan.k {
            // Balanced: the square beyond the end vertex, if any, is on the
            // flank side.
            seed(
                disk.neighbor_across(flank_sq, tuple[1], tuple[2]),
                PlanSide::Left,
                &mut side,
                &mut queue,
            );
        }
    }

    while let Some(sq) = queue.pop_front() {
        let s = side[sq.idx()].unwrap();
        for pos in 0..4 {
            if let Some(t) = disk.neighbor(sq, pos) {
                if removed.contains(&t) {
                    continue;
                }
                match side[t.idx()] {
                    None => {
                        side[t.idx()] = Some(s);
                        queue.push_back(t);
                    }
                    Some(existing) => assert_eq!(existing, s, "strip separates the two sides"),
                }
            }
        }
    }

    for s in disk.square_ids() {
        assert_eq!(
            side[s.idx()].is_some(),
            !removed.contains(&s),
            "every surviving square is reached by exactly one side"
        );
    }
    side
}

/// The raw glued region produced by cut-and-paste, before splitting at pinch
/// vertices. Squares reference `vertex_names` by index.
#[derive(Clone, Debug)]
pub struct GluedComplex {
    pub vertex_names: Vec<String>,
    pub squares: Vec<[u32; 4]>,
}

#[derive(Clone)]
pub struct SurgeryResult {
    pub plan: SurgeryPlan,
    /// Components of the glued region, each a valid disk.
    pub components: Vec<QuadDisk>,
    /// For every square of the input disk: where it survives, if it does.
    pub relabel: Vec<Option<(usize, SquareId)>>,
    /// Diagonal squares `s_1 .. s_k`, in diagonal order.
    pub removed_diagonal: Vec<SquareId>,
    /// Flank squares `s^l_1 .. s^l_{k'}`, in diagonal order.
    pub removed_flank: Vec<SquareId>,
    /// The identification actually applied (flank vertex, kept vertex).
    pub identified: Vec<(VertexId, VertexId)>,
}

impl SurgeryResult {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Removed squares of the given color, in diagonal order.
    pub fn removed_of_color(&self, coloring: &Bicoloring, color: Color) -> &[SquareId] {
        if coloring.color(self.removed_diagonal[0]) == color {
            &self.removed_diagonal
        } else {
            &self.removed_flank
        }
    }
}

/// Removes the diagonal and flank squares, renames the flank zig-zag onto the
/// kept one, splits at pinch vertices, and validates every component.
pub fn cut_and_paste(disk: &QuadDisk, plan: &SurgeryPlan) -> SurgeryResult {
    let rename: HashMap<VertexId, VertexId> = plan
        .zig_flank
        .iter()
        .copied()
        .zip(plan.zig_kept.iter().copied())
        .collect();
    let removed: HashSet<SquareId> = plan.removed_squares().into_iter().collect();

    let mut survivors: Vec<SquareId> = Vec::new();
    let mut raw_squares: Vec<[u32; 4]> = Vec::new();
    for s in disk.square_ids() {
        if removed.contains(&s) {
            continue;
        }
        let tuple = disk.square(s);
        let mut mapped = [0u32; 4];
        for (slot, &v) in mapped.iter_mut().zip(tuple.iter()) {
            *slot = rename.get(&v).copied().unwrap_or(v).0;
        }
        for a in 0..4 {
            for b in a + 1..4 {
                assert_ne!(mapped[a], mapped[b], "identification degenerates a square");
            }
        }
        survivors.push(s);
        raw_squares.push(mapped);
    }
    {
        let mut keys: Vec<[u32; 4]> = raw_squares
            .iter()
            .map(|t| {
                let mut k = *t;
                k.sort_unstable();
                k
            })
            .collect();
        keys.sort_unstable();
        assert!(
            keys.windows(2).all(|w| w[0] != w[1]),
            "identification merges two squares onto one cell"
        );
    }

    let glued = GluedComplex {
        vertex_names: (0..disk.num_vertices() as u32)
            .map(|v| disk.vertex_name(VertexId(v)).to_string())
            .collect(),
        squares: raw_squares,
    };
    let (components, assignment) = split_components(&glued);

    let mut relabel: Vec<Option<(usize, SquareId)>> = vec![None; disk.num_squares()];
    for (raw_idx, &orig) in survivors.iter().enumerate() {
        let (comp, idx) = assignment[raw_idx];
        relabel[orig.idx()] = Some((comp, SquareId(idx as u32)));
    }

    let total: usize = components.iter().map(QuadDisk::num_squares).sum();
    assert_eq!(total, disk.num_squares() - (plan.k + plan.k_prime));

    SurgeryResult {
        plan: plan.clone(),
        components,
        relabel,
        removed_diagonal: plan.diagonal.squares.clone(),
        removed_flank: plan.flank.clone(),
        identified: plan
            .zig_flank
            .iter()
            .copied()
            .zip(plan.zig_kept.iter().copied())
            .collect(),
    }
}

/// Splits a glued region into edge-connected components, duplicating pinch
/// vertices, and validates each component as a disk. Returns the components
/// together with, for every input square, its (component, index) position.
pub fn split_components(glued: &GluedComplex) -> (Vec<QuadDisk>, Vec<(usize, usize)>) {
    let n = glued.squares.len();
    let mut edge_map: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (i, sq) in glued.squares.iter().enumerate() {
        for pos in 0..4 {
            let (a, b) = (sq[pos], sq[(pos + 1) % 4]);
            let key = (a.min(b), a.max(b));
            edge_map.entry(key).or_default().push(i);
        }
    }

    let mut component: Vec<Option<usize>> = vec![None; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start].is_some() {
            continue;
        }
        let comp = groups.len();
        let mut group = Vec::new();
        let mut queue = VecDeque::from([start]);
        component[start] = Some(comp);
        while let Some(i) = queue.pop_front() {
            group.push(i);
            for pos in 0..4 {
                let sq = &glued.squares[i];
                let (a, b) = (sq[pos], sq[(pos + 1) % 4]);
                let key = (a.min(b), a.max(b));
                for &j in &edge_map[&key] {
                    if component[j].is_none() {
                        component[j] = Some(comp);
                        queue.push_back(j);
                    }
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }

    let mut assignment = vec![(0usize, 0usize); n];
    let mut components = Vec::with_capacity(groups.len());
    for (comp, group) in groups.iter().enumerate() {
        let named: Vec<[String; 4]> = group
            .iter()
            .map(|&i| {
                let sq = glued.squares[i];
                [
                    glued.vertex_names[sq[0] as usize].clone(),
                    glued.vertex_names[sq[1] as usize].clone(),
                    glued.vertex_names[sq[2] as usize].clone(),
                    glued.vertex_names[sq[3] as usize].clone(),
                ]
            })
            .collect();
        let disk = QuadDisk::from_squares(&named)
            .unwrap_or_else(|e| panic!("surgery component is not a valid disk: {e}"));
        for (idx, &i) in group.iter().enumerate() {
            assignment[i] = (comp, idx);
        }
        components.push(disk);
    }
    (components, assignment)
}

/// Deterministic end-to-end surgery used by the factorization pipeline:
/// excellent diagonal with board handedness when the disk is a board, good
/// diagonal with the default side otherwise.
pub fn pipeline_plan(disk: &QuadDisk) -> SurgeryPlan {
    let dev = disk.develop();
    let diagonal = diagonal::select_pipeline_diagonal(disk);
    if dev.is_injective_on_cells() {
        let arcs: ArcMonotonicity = diagonal::arc_monotonicity(disk, &dev, &diagonal);
        assert!(arcs.any(), "pipeline diagonals on boards are excellent");
        let flip = match diagonal.class {
            DiagonalClass::GoodBalanced => None, // forced; must oppose the monotone arc
            _ => Some(!arcs.right),
        };
        let plan = plan_surgery_with_flip(disk, &diagonal, flip)
            .expect("pipeline side choice is compatible");
        // The kept side carries a monotone arc.
        assert!(if plan.flipped { arcs.left } else { arcs.right });
        plan
    } else {
        plan_surgery(disk, &diagonal).expect("pipeline diagonals are good")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::trace_diagonal;

    fn parse(text: &str) -> QuadDisk {
        QuadDisk::parse_board(text).unwrap()
    }

    fn diagonal_from(disk: &QuadDisk, name: &str) -> Diagonal {
        trace_diagonal(disk, disk.vertex_by_name(name).unwrap()).unwrap()
    }

    #[test]
    fn domino_surgery_removes_everything() {
        let d = parse("##");
        let diag = diagonal_from(&d, "0,0");
        assert_eq!(diag.class, DiagonalClass::GoodBalanced);
        let plan = plan_surgery(&d, &diag).unwrap();
        assert_eq!((plan.k, plan.k_prime), (1, 1));
        assert_eq!(plan.removed_squares().len(), 2);
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 0);
    }

    #[test]
    fn single_square_degenerate_plan() {
        let d = parse("#");
        let diag = diagonal_from(&d, "0,0");
        assert_eq!(diag.class, DiagonalClass::GoodUnbalanced);
        let plan = plan_surgery(&d, &diag).unwrap();
        assert_eq!((plan.k, plan.k_prime), (1, 0));
        assert!(plan.zig_flank.is_empty());
        assert!(plan.zig_kept.is_empty());
        assert!(plan.zig_flank_plus.is_empty());
        assert_eq!(plan.removed_squares().len(), 1);
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 0);
    }

    #[test]
    fn two_by_two_unbalanced_surgery() {
        let d = parse("##\n##");
        let diag = diagonal_from(&d, "0,0");
        let plan = plan_surgery(&d, &diag).unwrap();
        assert_eq!((plan.k, plan.k_prime), (2, 1));
        assert_eq!(plan.removed_squares().len(), 3);
        assert_eq!(plan.kept_flank.len(), 1);
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 1);
        assert_eq!(result.components[0].num_squares(), 1);
    }

    #[test]
    fn two_by_three_balanced_surgery_leaves_domino() {
        let d = parse("###\n###");
        let diag = diagonal_from(&d, "0,0");
        assert_eq!(diag.class, DiagonalClass::GoodBalanced);
        let plan = plan_surgery(&d, &diag).unwrap();
        assert_eq!((plan.k, plan.k_prime), (2, 2));
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 1);
        let leftover = &result.components[0];
        assert_eq!(leftover.num_squares(), 2);
        assert_eq!(leftover.counts().interior_edges, 1);
    }

    #[test]
    fn balanced_rejects_wrong_side() {
        let d = parse("###\n###");
        let diag = diagonal_from(&d, "0,0");
        let forced = plan_surgery(&d, &diag).unwrap().flipped;
        let err = plan_surgery_with_flip(&d, &diag, Some(!forced)).unwrap_err();
        assert_eq!(err, SurgeryError::IncompatibleSide);
    }

    #[test]
    fn bad_diagonal_rejected() {
        // 3x3 square with the middle of an edge... a bad diagonal needs a
        // corner whose diagonal ends with no boundary side; the C-board from
        // the diagonals tests has one.
        let d = parse("###\n#..\n###");
        let mut found = false;
        for c in diagonal::corners(&d) {
            let diag = trace_diagonal(&d, c).unwrap();
            if !diag.is_good() {
                found = true;
                assert_eq!(plan_surgery(&d, &diag).unwrap_err(), SurgeryError::BadDiagonal);
            }
        }
        assert!(found, "fixture should contain a bad diagonal");
    }

    /// T-tetromino: every k=1 surgery separates the two arms.
    #[test]
    fn t_tetromino_surgery_splits_in_two() {
        let d = parse(".#.\n###");
        let diag = diagonal_from(&d, "1,2");
        assert_eq!(diag.class, DiagonalClass::GoodBalanced);
        let plan = plan_surgery(&d, &diag).unwrap();
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 2);
        for comp in &result.components {
            assert_eq!(comp.num_squares(), 1);
        }
    }

    /// Regression fixture found by brute force: a surgery whose glued region
    /// is pinched at a vertex before splitting.
    #[test]
    fn t_tetromino_pinch_fixture() {
        let d = parse(".#.\n###");
        let diag = diagonal_from(&d, "0,0");
        assert_eq!(diag.k(), 1);
        let plan = plan_surgery(&d, &diag).unwrap();
        let result = cut_and_paste(&d, &plan);
        assert_eq!(result.num_components(), 2);
        // The two surviving unit squares share a vertex in the glued region.
        assert_eq!(result.components.iter().map(QuadDisk::num_squares).sum::<usize>(), 2);
    }

    #[test]
    fn split_components_trivial_cases() {
        // Already a disk.
        let glued = GluedComplex {
            vertex_names: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            squares: vec![[0, 1, 2, 3]],
        };
        let (comps, map) = split_components(&glued);
        assert_eq!(comps.len(), 1);
        assert_eq!(map, vec![(0, 0)]);

        // Two unit squares pinched at one vertex.
        let glued = GluedComplex {
            vertex_names: (0..7).map(|i| format!("p{i}")).collect(),
            squares: vec![[0, 1, 2, 3], [2, 4, 5, 6]],
        };
        let (comps, map) = split_components(&glued);
        assert_eq!(comps.len(), 2);
        assert_eq!(map, vec![(0, 0), (1, 0)]);
        for c in &comps {
            assert_eq!(c.num_squares(), 1);
        }
    }

    #[test]
    fn surgery_shrinks_by_exactly_k_plus_k_prime() {
        for text in ["##", "##\n##", "###\n###", "###\n##.", "####\n####"] {
            let d = parse(text);
            for c in diagonal::corners(&d) {
                let diag = trace_diagonal(&d, c).unwrap();
                if !diag.is_good() {
                    continue;
                }
                let plan = plan_surgery(&d, &diag).unwrap();
                let result = cut_and_paste(&d, &plan);
                let left: usize = result.components.iter().map(QuadDisk::num_squares).sum();
                assert_eq!(left, d.num_squares() - plan.k - plan.k_prime);
                assert!(plan.k + plan.k_prime >= 1);
            }
        }
    }

    #[test]
    fn removed_squares_monochromatic() {
        for text in ["##\n##", "###\n###", "####\n#...", "###\n.##"] {
            let d = parse(text);
            let coloring = d.bicolor();
            let plan = pipeline_plan(&d);
            let result = cut_and_paste(&d, &plan);
            let diag_color = coloring.color(result.removed_diagonal[0]);
            for &s in &result.removed_diagonal {
                assert_eq!(coloring.color(s), diag_color);
            }
            for &s in &result.removed_flank {
                assert_eq!(coloring.color(s), diag_color.opposite());
            }
        }
    }

    #[test]
    fn iterated_pipeline_surgery_terminates_empty() {
        let mut stack = vec![parse("####\n####\n####")];
        let mut steps = 0;
        while let Some(d) = stack.pop() {
            steps += 1;
            assert!(steps <= 100, "surgery strictly shrinks");
            let plan = pipeline_plan(&d);
            let result = cut_and_paste(&d, &plan);
            stack.extend(result.components.into_iter());
        }
    }

    /// Board closure: along the pipeline's excellent diagonal, every
    /// component is a board, and the cells (flank side fixed, kept side
    /// shifted onto it) stay inside the original board.
    #[test]
    fn board_closure_with_cell_subset() {
        for text in ["##\n##", "###\n###", ".#.\n###", "###\n#..\n###", "####\n##..", "#.\n##\n.#"] {
            let d = parse(text);
            let dev = d.develop();
            let plan = pipeline_plan(&d);
            let result = cut_and_paste(&d, &plan);
            for comp in &result.components {
                assert!(comp.is_board());
            }
            if plan.zig_flank.is_empty() {
                continue;
            }
            let lp = dev.vertex_image(plan.zig_flank[0]);
            let rp = dev.vertex_image(plan.zig_kept[0]);
            let shift = (lp.0 - rp.0, lp.1 - rp.1);
            let original: std::collections::HashSet<(i64, i64)> =
                d.square_ids().map(|s| dev.cell(s)).collect();
            let mut new_cells = Vec::new();
            for s in d.square_ids() {
                if result.relabel[s.idx()].is_none() {
                    continue;
                }
                let cell = dev.cell(s);
                let cell = match plan.side[s.idx()].unwrap() {
                    PlanSide::Left => cell,
                    PlanSide::Right => (cell.0 + shift.0, cell.1 + shift.1),
                };
                assert!(original.contains(&cell), "surgery stays inside the board");
                new_cells.push(cell);
            }
            new_cells.sort_unstable();
            let before = new_cells.len();
            new_cells.dedup();
            assert_eq!(before, new_cells.len(), "moved cells stay disjoint");
        }
    }
}
