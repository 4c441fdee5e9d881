use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use quadfactor::arith::{self, SolveOutcome};
use quadfactor::diagonal;
use quadfactor::disk::{Color, QuadDisk};
use quadfactor::enumerate;
use quadfactor::factor::{self, LduFactorization};
use quadfactor::io::read_disk;
use quadfactor::matrix::IntMatrix;
use quadfactor::selftest;
use quadfactor::surgery;

/// Exit codes: 0 ok, 1 invariant or verification failure, 2 input error.
#[derive(Parser)]
#[command(name = "quadfactor", version, about = "Exact L·D·U factorization of quadriculated disks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a board or complex file and print its counts.
    Validate { file: PathBuf },
    /// Counts, corners and an ASCII rendering when the disk is a board.
    Info { file: PathBuf },
    /// One line per corner: id, length, classification, excellent flag.
    Diagonals { file: PathBuf },
    /// Cut and paste along a good diagonal; writes each component to a file.
    Cutpaste {
        file: PathBuf,
        /// Corner vertex id to start from (default: pipeline selection).
        #[arg(long)]
        corner: Option<String>,
        /// Output prefix for component files (default: the input path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factor the black-to-white matrix as P_b B P_w = L D U.
    Factor {
        file: PathBuf,
        #[arg(long, value_parser = ["text", "json"], default_value = "text")]
        format: String,
        /// Skip the redundant internal re-verification.
        #[arg(long)]
        no_verify: bool,
        /// Color the lowest-index square white instead of black.
        #[arg(long)]
        white_first: bool,
    },
    /// Determinant of the black-to-white matrix (square disks only).
    Det {
        file: PathBuf,
        #[arg(long)]
        white_first: bool,
    },
    /// Rank of the black-to-white matrix.
    Rank {
        file: PathBuf,
        #[arg(long)]
        white_first: bool,
    },
    /// Solve B x = rhs in integers, or print an inconsistency certificate.
    Solve {
        file: PathBuf,
        /// Comma-separated integers, one per black square.
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        white_first: bool,
    },
    /// Run every oracle cross-check on one disk; exits nonzero on mismatch.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        white_first: bool,
    },
    /// Enumerate all boards with up to N cells (deduplicated by translation).
    Enumerate {
        n: usize,
        /// Print each board, blank-line separated, after the counts.
        #[arg(long)]
        print: bool,
    },
    /// Exhaustive invariant suite over all boards with up to N cells.
    Selftest { n: usize },
}

enum CmdError {
    Input(String),
    Invariant(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Invariant(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Invariant(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Input(e.to_string())
}

fn load(file: &Path) -> Result<QuadDisk, CmdError> {
    read_disk(file).map_err(input_err)
}

fn coloring_of(disk: &QuadDisk, white_first: bool) -> quadfactor::Bicoloring {
    disk.bicolor_from(if white_first { Color::White } else { Color::Black })
}

fn print_matrix(name: &str, m: &IntMatrix) {
    println!("{name} ({}x{}):", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:2}")).collect();
        println!("  [{}]", row.join(" "));
    }
}

fn fmt_perm(p: &[usize]) -> String {
    let items: Vec<String> = p.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(" "))
}

#[derive(Serialize, Deserialize)]
struct FactorReport {
    b: usize,
    w: usize,
    black_perm: Vec<usize>,
    white_perm: Vec<usize>,
    lower: Vec<Vec<i64>>,
    middle: Vec<Vec<i64>>,
    upper: Vec<Vec<i64>>,
    rank: usize,
    det: Option<i64>,
    matrix: Vec<Vec<i64>>,
}

impl FactorReport {
    fn new(b: &IntMatrix, f: &LduFactorization) -> Self {
        FactorReport {
            b: f.black_count(),
            w: f.white_count(),
            black_perm: f.black_perm.clone(),
            white_perm: f.white_perm.clone(),
            lower: f.lower.to_rows(),
            middle: f.middle.to_matrix().to_rows(),
            upper: f.upper.to_rows(),
            rank: f.middle.rank(),
            det: arith::det_via_ldu(f).ok(),
            matrix: b.to_rows(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let disk = load(&file)?;
            let coloring = disk.bicolor();
            let c = disk.counts();
            println!(
                "ok: F={} V={} E={} (interior {}, boundary {}) b={} w={}",
                c.squares,
                c.vertices,
                c.edges,
                c.interior_edges,
                c.boundary_edges,
                coloring.blacks().len(),
                coloring.whites().len()
            );
            Ok(())
        }
        Cmd::Info { file } => {
            let disk = load(&file)?;
            let coloring = disk.bicolor();
            let c = disk.counts();
            println!("squares: {}", c.squares);
            println!("vertices: {} ({} interior)", c.vertices, c.interior_vertices);
            println!(
                "edges: {} ({} interior, {} boundary)",
                c.edges, c.interior_edges, c.boundary_edges
            );
            println!(
                "colors: {} black, {} white",
                coloring.blacks().len(),
                coloring.whites().len()
            );
            let corner_names: Vec<&str> = diagonal::corners(&disk)
                .into_iter()
                .map(|v| disk.vertex_name(v))
                .collect();
            println!("corners: {}", corner_names.join(" "));
            match disk.to_board_text() {
                Some(text) => {
                    println!("board: yes");
                    print!("{text}");
                }
                None => println!("board: no"),
            }
            Ok(())
        }
        Cmd::Diagonals { file } => {
            let disk = load(&file)?;
            let board = disk.is_board();
            let dev = disk.develop();
            for corner in diagonal::corners(&disk) {
                let diag = diagonal::trace_diagonal(&disk, corner).expect("corner");
                let excellent = if board {
                    if diagonal::arc_monotonicity(&disk, &dev, &diag).any() {
                        "yes"
                    } else {
                        "no"
                    }
                } else {
                    "n/a"
                };
                println!(
                    "corner {}: k={} {} excellent={}",
                    disk.vertex_name(corner),
                    diag.k(),
                    diag.class.label(),
                    excellent
                );
            }
            Ok(())
        }
        Cmd::Cutpaste { file, corner, out } => {
            let disk = load(&file)?;
            let plan = match corner {
                None => surgery::pipeline_plan(&disk),
                Some(name) => {
                    let v = disk
                        .vertex_by_name(&name)
                        .ok_or_else(|| CmdError::Input(format!("no vertex named {name}")))?;
                    let diag = diagonal::trace_diagonal(&disk, v).map_err(input_err)?;
                    surgery::plan_surgery(&disk, &diag).map_err(input_err)?
                }
            };
            let names = |vs: &[quadfactor::VertexId]| -> String {
                let parts: Vec<&str> = vs.iter().map(|&v| disk.vertex_name(v)).collect();
                parts.join(" ")
            };
            println!(
                "diagonal: corner {} k={} {}",
                disk.vertex_name(plan.diagonal.corner()),
                plan.k,
                plan.diagonal.class.label()
            );
            println!("k'={}", plan.k_prime);
            let removed: Vec<String> = plan
                .removed_squares()
                .iter()
                .map(|s| s.idx().to_string())
                .collect();
            println!("removed squares: {}", removed.join(" "));
            println!("zig-zag (excised side): {}", names(&plan.zig_flank_plus));
            println!("zig-zag (kept side):    {}", names(&plan.zig_kept));
            let result = surgery::cut_and_paste(&disk, &plan);
            println!("components: {}", result.num_components());
            let prefix = out.unwrap_or(file);
            for (i, comp) in result.components.iter().enumerate() {
                let path = prefix.with_extension(format!("delta{}", i + 1));
                std::fs::write(&path, comp.to_complex_text()).map_err(input_err)?;
                println!("wrote {} ({} squares)", path.display(), comp.num_squares());
            }
            Ok(())
        }
        Cmd::Factor {
            file,
            format,
            no_verify,
            white_first,
        } => {
            let disk = load(&file)?;
            let coloring = coloring_of(&disk, white_first);
            let b = disk.black_to_white_matrix(&coloring);
            let f = factor::ldu_with(&disk, &coloring, !no_verify);
            factor::verify_factorization(&b, &f)
                .map_err(|e| CmdError::Invariant(e.to_string()))?;
            if format == "json" {
                let report = FactorReport::new(&b, &f);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                println!("b={} w={}", f.black_count(), f.white_count());
                println!("rank: {}", f.middle.rank());
                match arith::det_via_ldu(&f) {
                    Ok(det) => println!("det: {det}"),
                    Err(_) => println!("det: n/a (not square)"),
                }
                println!("black perm: {}", fmt_perm(&f.black_perm));
                println!("white perm: {}", fmt_perm(&f.white_perm));
                print_matrix("L", &f.lower);
                print_matrix("D", &f.middle.to_matrix());
                print_matrix("U", &f.upper);
            }
            Ok(())
        }
        Cmd::Det { file, white_first } => {
            let disk = load(&file)?;
            let coloring = coloring_of(&disk, white_first);
            let f = factor::ldu_with(&disk, &coloring, true);
            let det = arith::det_via_ldu(&f).map_err(input_err)?;
            println!("{det}");
            Ok(())
        }
        Cmd::Rank { file, white_first } => {
            let disk = load(&file)?;
            let coloring = coloring_of(&disk, white_first);
            let f = factor::ldu_with(&disk, &coloring, true);
            println!("{}", arith::rank_via_ldu(&f));
            Ok(())
        }
        Cmd::Solve {
            file,
            rhs,
            white_first,
        } => {
            let disk = load(&file)?;
            let coloring = coloring_of(&disk, white_first);
            let v: Vec<i64> = rhs
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CmdError::Input("rhs must be comma-separated integers".into()))?;
            let f = factor::ldu_with(&disk, &coloring, true);
            match arith::solve_integer(&f, &v).map_err(input_err)? {
                SolveOutcome::Solution(x) => {
                    let parts: Vec<String> = x.iter().map(i64::to_string).collect();
                    println!("x = [{}]", parts.join(", "));
                }
                SolveOutcome::NoSolution { zero_row, residual } => {
                    println!(
                        "no rational solution: zero row {zero_row} of D has residual {residual}"
                    );
                }
            }
            Ok(())
        }
        Cmd::Oracle { file, white_first } => {
            let disk = load(&file)?;
            let coloring = coloring_of(&disk, white_first);
            let b = disk.black_to_white_matrix(&coloring);
            let f = factor::ldu_with(&disk, &coloring, true);
            let mut ok = true;
            let mut check = |name: &str, good: bool, detail: String| {
                println!("{name}: {detail} {}", if good { "ok" } else { "MISMATCH" });
                ok &= good;
            };
            factor::verify_factorization(&b, &f)
                .map_err(|e| CmdError::Invariant(e.to_string()))?;
            check("factorization", true, "exact".into());
            let rank = arith::rank_via_ldu(&f);
            let (r0, r2, r3) = (
                arith::rank_oracle(&b, 0),
                arith::rank_oracle(&b, 2),
                arith::rank_oracle(&b, 3),
            );
            check(
                "rank",
                rank == r0 && rank == r2 && rank == r3,
                format!("ldu={rank} Q={r0} GF2={r2} GF3={r3}"),
            );
            let snf = arith::smith_normal_form(&b);
            let free = snf.invariant_factors.iter().all(|&x| x == 1);
            let parts: Vec<String> = snf.invariant_factors.iter().map(i64::to_string).collect();
            check("smith", free, format!("[{}]", parts.join(", ")));
            if f.black_count() == f.white_count() {
                let det = arith::det_via_ldu(&f).expect("square");
                let bareiss = arith::det_oracle(&b).expect("square");
                let matchings = arith::signed_matchings(&b);
                match matchings {
                    Ok(m) => check(
                        "det",
                        det == bareiss && det == m && det.abs() <= 1,
                        format!("ldu={det} bareiss={bareiss} matchings={m}"),
                    ),
                    Err(_) => check(
                        "det",
                        det == bareiss && det.abs() <= 1,
                        format!("ldu={det} bareiss={bareiss} matchings=skipped"),
                    ),
                }
            }
            if ok {
                println!("all checks passed");
                Ok(())
            } else {
                Err(CmdError::Invariant("oracle cross-check mismatch".into()))
            }
        }
        Cmd::Enumerate { n, print } => {
            if n == 0 || n > enumerate::MAX_CELLS {
                return Err(CmdError::Input(format!(
                    "cell count must be between 1 and {}",
                    enumerate::MAX_CELLS
                )));
            }
            let counts = enumerate::board_counts(n);
            for (i, c) in counts.iter().enumerate() {
                println!("size {}: {}", i + 1, c);
            }
            println!("total: {}", counts.iter().sum::<usize>());
            if print {
                for board in enumerate::enumerate_boards(n).map_err(input_err)? {
                    println!();
                    print!("{}", board.to_board_text().expect("enumerated boards render"));
                }
            }
            Ok(())
        }
        Cmd::Selftest { n } => {
            if n == 0 || n > enumerate::MAX_CELLS {
                return Err(CmdError::Input(format!(
                    "cell count must be between 1 and {}",
                    enumerate::MAX_CELLS
                )));
            }
            let threads = std::env::var("QUADFACTOR_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .unwrap_or(1)
                .max(1);
            let report = selftest::selftest(n, threads).map_err(input_err)?;
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(CmdError::Invariant("selftest failures".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
