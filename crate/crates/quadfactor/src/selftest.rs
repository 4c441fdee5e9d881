//! The self-test driver: runs the full invariant suite over the exhaustive
//! board universe and reports deterministic, byte-stable summaries.

use crate::arith;
use crate::diagonal;
use crate::disk::{Color, QuadDisk};
use crate::enumerate;
use crate::factor;
use crate::surgery::{self, PlanSide};

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub max_cells: usize,
    /// Instance count per size `1..=max_cells`.
    pub per_size: Vec<usize>,
    pub instances: usize,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("selftest: boards with up to {} cells\n", self.max_cells));
        for (i, n) in self.per_size.iter().enumerate() {
            out.push_str(&format!("size {}: {} boards\n", i + 1, n));
        }
        out.push_str(&format!(
            "instances: {}, checks: {}\n",
            self.instances, self.checks
        ));
        for f in &self.failures {
            out.push_str(&format!("failure: {f}\n"));
        }
        out.push_str(if self.passed() { "result: PASS\n" } else { "result: FAIL\n" });
        out
    }
}

/// Runs every invariant on every board with up to `max_cells` cells,
/// partitioning the instance stream across `threads` workers. Aggregation is
/// in instance order, so the report does not depend on the thread count.
pub fn selftest(max_cells: usize, threads: usize) -> Result<SelftestReport, crate::DiskError> {
    let cell_sets = {
        enumerate::InstanceUniverse::new(max_cells)?;
        enumerate::enumerate_cell_sets(max_cells)
    };
    let mut per_size = vec![0usize; max_cells];
    for cells in &cell_sets {
        per_size[cells.len() - 1] += 1;
    }
    let threads = threads.max(1);

    let results: Vec<Result<u64, String>> = if threads == 1 {
        cell_sets
            .iter()
            .map(|cells| check_instance(&QuadDisk::from_cells(cells)))
            .collect()
    } else {
        let mut slots: Vec<Option<Result<u64, String>>> = vec![None; cell_sets.len()];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for worker in 0..threads {
                let cell_sets = &cell_sets;
                handles.push(scope.spawn(move || {
                    let mut local = Vec::new();
                    let mut idx = worker;
                    while idx < cell_sets.len() {
                        let disk = QuadDisk::from_cells(&cell_sets[idx]);
                        local.push((idx, check_instance(&disk)));
                        idx += threads;
                    }
                    local
                }));
            }
            for handle in handles {
                for (idx, res) in handle.join().expect("selftest worker panicked") {
                    slots[idx] = Some(res);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("all slots filled")).collect()
    };

    let mut checks = 0u64;
    let mut failures = Vec::new();
    for res in results {
        match res {
            Ok(n) => checks += n,
            Err(msg) => failures.push(msg),
        }
    }
    Ok(SelftestReport {
        max_cells,
        per_size,
        instances: cell_sets.len(),
        checks,
        failures,
    })
}

/// Every invariant bundle for one instance; returns the number of checks run
/// or a failure message carrying the offending board.
pub fn check_instance(disk: &QuadDisk) -> Result<u64, String> {
    let mut checks = 0u64;
    let dump = || {
        disk.to_board_text()
            .unwrap_or_else(|| disk.to_complex_text())
            .replace('\n', "/")
    };
    let fail = |what: &str| Err(format!("{what} on {}", dump()));

    // Structural identities.
    let c = disk.counts();
    if c.vertices as i64 - c.edges as i64 + c.squares as i64 != 1 {
        return fail("Euler characteristic");
    }
    if 4 * c.squares != 2 * c.interior_edges + c.boundary_edges {
        return fail("edge count identity");
    }
    let excess: usize = c
        .boundary_degree
        .iter()
        .enumerate()
        .skip(3)
        .map(|(r, &n)| (r - 2) * n)
        .sum();
    if c.corners() as i64 - 4 != excess as i64 {
        return fail("corner count identity");
    }
    checks += 3;

    // Coloring.
    let coloring = disk.bicolor();
    for s in disk.square_ids() {
        for pos in 0..4 {
            if let Some(t) = disk.neighbor(s, pos) {
                if coloring.color(s) == coloring.color(t) {
                    return fail("proper 2-coloring");
                }
            }
        }
    }
    if coloring.blacks().len() + coloring.whites().len() != c.squares {
        return fail("color counts");
    }
    checks += 2;

    // Diagonals.
    let dev = disk.develop();
    if !dev.is_injective_on_cells() {
        return fail("enumerated instance is a board");
    }
    let corners = diagonal::corners(disk);
    if corners.len() != c.corners() {
        return fail("corner enumeration");
    }
    let mut good = 0usize;
    let mut bad = 0usize;
    for &corner in &corners {
        let diag = diagonal::trace_diagonal(disk, corner).expect("corner");
        if diag.is_good() {
            good += 1;
        } else {
            bad += 1;
        }
        let imgs: Vec<(i64, i64)> = diag.vertices.iter().map(|&v| dev.vertex_image(v)).collect();
        for w in imgs.windows(2) {
            if (w[1].0 - w[0].0).signum() != (imgs[1].0 - imgs[0].0).signum()
                || (w[1].1 - w[0].1).signum() != (imgs[1].1 - imgs[0].1).signum()
            {
                return fail("diagonal coordinates strictly monotone");
            }
        }
    }
    if good < 4 {
        return fail("at least four good diagonals");
    }
    if bad + 4 > corners.len() {
        return fail("bad diagonal bound");
    }
    let excellent = match diagonal::excellent_diagonals(disk) {
        Ok(list) => list,
        Err(_) => return fail("excellent diagonals on a board"),
    };
    if excellent.is_empty() {
        return fail("excellent diagonal exists");
    }
    if excellent.iter().any(|d| !d.is_good()) {
        return fail("excellent implies good");
    }
    checks += 4;

    // Pipeline surgery: board closure.
    let plan = surgery::pipeline_plan(disk);
    let result = surgery::cut_and_paste(disk, &plan);
    let survivor_total: usize = result.components.iter().map(QuadDisk::num_squares).sum();
    if survivor_total + plan.k + plan.k_prime != c.squares {
        return fail("surgery removes exactly k + k' squares");
    }
    for comp in &result.components {
        if !comp.is_board() {
            return fail("surgery keeps boards inside boards");
        }
    }
    let diag_color = coloring.color(result.removed_diagonal[0]);
    if result
        .removed_diagonal
        .iter()
        .any(|&s| coloring.color(s) != diag_color)
        || result
            .removed_flank
            .iter()
            .any(|&s| coloring.color(s) == diag_color)
    {
        return fail("removed squares monochromatic per role");
    }
    if !plan.zig_flank.is_empty() {
        let lp = dev.vertex_image(plan.zig_flank[0]);
        let rp = dev.vertex_image(plan.zig_kept[0]);
        let shift = (lp.0 - rp.0, lp.1 - rp.1);
        let original: std::collections::HashSet<(i64, i64)> =
            disk.square_ids().map(|s| dev.cell(s)).collect();
        let mut moved = Vec::new();
        for s in disk.square_ids() {
            if result.relabel[s.idx()].is_none() {
                continue;
            }
            let cell = dev.cell(s);
            let cell = match plan.side[s.idx()].expect("survivors are classified") {
                PlanSide::Left => cell,
                PlanSide::Right => (cell.0 + shift.0, cell.1 + shift.1),
            };
            if !original.contains(&cell) {
                return fail("surgery cells stay inside the board");
            }
            moved.push(cell);
        }
        moved.sort_unstable();
        let len = moved.len();
        moved.dedup();
        if len != moved.len() {
            return fail("surgery cells stay disjoint");
        }
    }
    checks += 4;

    // Factorization.
    let b = disk.black_to_white_matrix(&coloring);
    let f = factor::ldu_with(disk, &coloring, true);
    if factor::verify_factorization(&b, &f).is_err() {
        return fail("factorization verifies");
    }
    checks += 1;

    // Oracle cross-checks.
    let rank = arith::rank_via_ldu(&f);
    if rank != arith::rank_oracle(&b, 0)
        || rank != arith::rank_oracle(&b, 2)
        || rank != arith::rank_oracle(&b, 3)
    {
        return fail("rank agrees over Q, GF(2), GF(3)");
    }
    let snf = arith::smith_normal_form(&b);
    if snf.invariant_factors.iter().any(|&f| f != 1) {
        return fail("cokernel is free (all invariant factors 1)");
    }
    checks += 2;
    if coloring.blacks().len() == coloring.whites().len() {
        let det = arith::det_via_ldu(&f).expect("square");
        if det.abs() > 1 {
            return fail("determinant in {-1,0,1}");
        }
        if det != arith::det_oracle(&b).expect("square")
            || det != arith::signed_matchings(&b).expect("small")
        {
            return fail("determinant agrees with both oracles");
        }
        checks += 2;
        // One deterministic solve round-trip: v = B * (1, .., 1).
        let ones = vec![1i64; coloring.whites().len()];
        let v = b.mul_vec(&ones);
        match arith::solve_integer(&f, &v).expect("shape") {
            arith::SolveOutcome::Solution(x) => {
                if b.mul_vec(&x) != v {
                    return fail("solve round-trip");
                }
            }
            arith::SolveOutcome::NoSolution { .. } => return fail("solvable system solved"),
        }
        checks += 1;
    }
    // Removed colors balance the black/white deficit.
    {
        let b_removed = result.removed_of_color(&coloring, Color::Black).len();
        let w_removed = result.removed_of_color(&coloring, Color::White).len();
        if b_removed + w_removed != plan.k + plan.k_prime {
            return fail("removed squares accounted by color");
        }
        checks += 1;
    }

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_selftest_passes() {
        let report = selftest(4, 1).unwrap();
        assert!(report.passed());
        assert_eq!(report.per_size, vec![1, 2, 6, 19]);
        assert_eq!(report.instances, 28);
    }

    #[test]
    fn report_identical_across_thread_counts() {
        let one = selftest(4, 1).unwrap().render();
        let four = selftest(4, 4).unwrap().render();
        assert_eq!(one, four);
    }

    /// An injected fault must surface with the offending instance attached.
    #[test]
    fn injected_fault_is_reported_with_instance_dump() {
        let disk = QuadDisk::parse_board("##\n##").unwrap();
        let coloring = disk.bicolor();
        let b = disk.black_to_white_matrix(&coloring);
        let mut f = factor::ldu_with(&disk, &coloring, true);
        let flipped = -f.upper.get(0, 1);
        f.upper.set(0, 1, flipped);
        let err = factor::verify_factorization(&b, &f).unwrap_err();
        let message = format!("{err} on {}", disk.to_board_text().unwrap().replace('\n', "/"));
        assert!(message.contains("##/##"));
    }
}
