//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::io::Cursor;
use std::process::ExitCode;

use hgspdc::analysis::{parity_violation, schmidt_spectrum, sign_pattern, support_pattern};
use hgspdc::analytic::{coefficient_matrix, CoefficientMatrix, PhysicalParams, SigmaMode};
use hgspdc::figures::{generate_figure, panel_matrix, panels, CELL_PX, FIGURE_CONVENTION};
use hgspdc::oracle::QuadratureSpec;
use hgspdc::special_functions::{log_factorial, ModeFunctionConvention, Normalization, PhaseConvention};
use hgspdc::verify::{
    tolerance_from_env, verify_default_grid, VerifyReport, GRID_MAX_INDEX, GRID_PUMP_ORDERS, GRID_RATIOS,
    GRID_SIGMA_MODES, PARITY_TOLERANCE,
};

type Outcome = Result<String, String>;

const MINUS_I_PHASE: ModeFunctionConvention =
    ModeFunctionConvention::new(Normalization::UnitNorm, PhaseConvention::PaperPhase);

fn params(ratio: f64, mode: SigmaMode, n: usize) -> PhysicalParams {
    PhysicalParams::with_ratio(ratio, mode, (n, 0)).expect("valid parameters")
}

fn matrix(n: usize, p: &PhysicalParams, max_index: usize, normalize: bool) -> Result<CoefficientMatrix, String> {
    coefficient_matrix(n, p, max_index, normalize).map_err(|e| e.to_string())
}

fn check(ok: bool, pass: String, fail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail())
    }
}

fn oracle_equivalence(report: &VerifyReport) -> Outcome {
    check(
        report.max_relative_deviation <= report.tolerance,
        format!(
            "max |analytic - quadrature| / max|C| = {:.2e} over {} cases (tolerance {:.0e})",
            report.max_relative_deviation,
            report.cases.len(),
            report.tolerance
        ),
        || format!("deviation {:.3e} exceeds {:.0e}", report.max_relative_deviation, report.tolerance),
    )
}

fn confocal_binomial() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 0..=10 {
        let m = matrix(n, &params(1.0, SigmaMode::Geometric, n), 12, false)?;
        for a in 0..=12 {
            for b in 0..=12 {
                let expect = if a + b == n {
                    (0.5 * (log_factorial(n as u64)
                        - n as f64 * std::f64::consts::LN_2
                        - log_factorial(a as u64)
                        - log_factorial(b as u64)))
                        .exp()
                } else {
                    0.0
                };
                worst = worst.max((m.get(a, b) - expect).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max error {worst:.2e} for n <= 10"), || {
        format!("max error {worst:.3e} > 1e-12")
    })
}

fn gaussian_diagonality() -> Outcome {
    let mut off: f64 = 0.0;
    let mut ratio_err: f64 = 0.0;
    for &r in &[0.5, 2.0, 3.0] {
        let p = params(r, SigmaMode::Geometric, 0).with_convention(MINUS_I_PHASE);
        let m = matrix(0, &p, 20, false)?;
        let mu = (p.pump_waist - p.pm_width) / (p.pump_waist + p.pm_width);
        for a in 0..=20 {
            for b in 0..=20 {
                if a != b {
                    off = off.max(m.get(a, b).abs());
                }
            }
        }
        for j in 0..=15 {
            ratio_err = ratio_err.max((m.get(j + 1, j + 1) / m.get(j, j) - mu).abs());
        }
    }
    check(
        off < 1e-10 && ratio_err <= 1e-9,
        format!("off-diagonal max {off:.1e}, diagonal ratio error {ratio_err:.1e} (mode phase -i^n)"),
        || format!("off-diagonal {off:.3e}, ratio error {ratio_err:.3e}"),
    )
}

fn schmidt_numbers() -> Outcome {
    let m = matrix(0, &params(2.0, SigmaMode::Geometric, 0), 40, true)?;
    let k = schmidt_spectrum(&m).map_err(|e| e.to_string())?.schmidt_number;
    let c = matrix(1, &params(1.0, SigmaMode::Geometric, 1), 12, true)?;
    let s = schmidt_spectrum(&c).map_err(|e| e.to_string())?;
    let halves = (s.lambdas[0] - 0.5).abs().max((s.lambdas[1] - 0.5).abs()) < 1e-12
        && s.lambdas[2..].iter().all(|&l| l < 1e-12);
    check(
        (k - 1.25).abs() <= 1e-6 && halves && (s.entropy_bits - 1.0).abs() <= 1e-9,
        format!("K = {k:.9}, n=1 confocal entropy = {:.9} bit", s.entropy_bits),
        || format!("K = {k}, lambdas {:?}, entropy {}", &s.lambdas[..3], s.entropy_bits),
    )
}

fn parity_selection(report: &VerifyReport) -> Outcome {
    check(
        report.max_analytic_parity_violation == 0.0
            && report.max_quadrature_parity_violation < PARITY_TOLERANCE,
        format!(
            "analytic violations 0, quadrature max {:.1e}",
            report.max_quadrature_parity_violation
        ),
        || {
            format!(
                "analytic {:.3e}, quadrature {:.3e}",
                report.max_analytic_parity_violation, report.max_quadrature_parity_violation
            )
        },
    )
}

fn support_rules() -> Outcome {
    let pump = matrix(2, &params(2.0, SigmaMode::PumpMatched, 2), 12, true)?;
    let low = [(0, 0), (0, 1), (1, 0)].iter().map(|&ab| pump.get(ab.0, ab.1).abs()).fold(0.0, f64::max);
    let pm = matrix(2, &params(2.0, SigmaMode::PhaseMatched, 2).with_convention(MINUS_I_PHASE), 12, true)?;
    let signs = sign_pattern(&pm);
    let negatives: Vec<(usize, usize)> = (0..pm.dim())
        .flat_map(|a| (0..pm.dim()).map(move |b| (a, b)))
        .filter(|&(a, b)| signs[(a, b)] < 0)
        .collect();
    check(
        low < 1e-10 && pm.get(0, 0).abs() > 1e-3 && negatives == [(0, 0)],
        format!(
            "pump-matched a+b<2 max {low:.1e}; phase-matched C_00 = {:.4} is the only negative entry (mode phase -i^n)",
            pm.get(0, 0)
        ),
        || format!("a+b<2 max {low:.3e}, negatives {negatives:?}"),
    )
}

fn sign_alternation() -> Outcome {
    let mut checked = 0;
    for &r in &[1.0 / 3.0, 0.5] {
        let m = matrix(0, &params(r, SigmaMode::Geometric, 0).with_convention(MINUS_I_PHASE), 40, true)?;
        let signs = sign_pattern(&m);
        for j in 0..m.dim() {
            if signs[(j, j)] == 0 {
                continue;
            }
            let expect = if j % 2 == 0 { 1 } else { -1 };
            if signs[(j, j)] != expect {
                return Err(format!("w/delta = {r}: sign of C_{j}{j} is {}", signs[(j, j)]));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} diagonal entries alternate (mode phase -i^n)"))
}

fn entropy_monotonicity() -> Outcome {
    let mut entropies = Vec::new();
    for n in [0, 1, 2, 5] {
        let m = matrix(n, &params(1.0, SigmaMode::Geometric, n), 12, true)?;
        entropies.push(schmidt_spectrum(&m).map_err(|e| e.to_string())?.entropy_bits);
    }
    check(
        entropies.windows(2).all(|w| w[0] < w[1]),
        format!("entropies {entropies:.4?} bits"),
        || format!("not increasing: {entropies:?}"),
    )
}

fn scale_invariance() -> Outcome {
    let mut worst: f64 = 0.0;
    for &n in &GRID_PUMP_ORDERS {
        for &r in &GRID_RATIOS {
            for &mode in &GRID_SIGMA_MODES {
                let p = params(r, mode, n);
                let base = matrix(n, &p, GRID_MAX_INDEX, false)?;
                for c in [0.1, 10.0] {
                    let scaled = matrix(n, &p.scaled(c), GRID_MAX_INDEX, false)?;
                    worst = worst.max((&base.entries - &scaled.entries).amax());
                }
            }
        }
    }
    check(worst <= 1e-12, format!("max change {worst:.1e} under scaling by 0.1 and 10"), || {
        format!("max change {worst:.3e}")
    })
}

/// Sign of each cell read back from the image: 0 for white.
fn decode_cells(png_bytes: &[u8], dim: usize) -> Result<Vec<Vec<i8>>, String> {
    let mut reader = png::Decoder::new(Cursor::new(png_bytes)).read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0u8; reader.output_buffer_size().ok_or("no buffer size")?];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let width = info.width as usize;
    let cell = CELL_PX as usize;
    let mut out = vec![vec![0i8; dim]; dim];
    for (a, col) in out.iter_mut().enumerate() {
        for (b, v) in col.iter_mut().enumerate() {
            let x = a * cell + cell / 2;
            let y = (dim - 1 - b) * cell + cell / 2;
            let px = &buf[(y * width + x) * 3..(y * width + x) * 3 + 3];
            *v = match (px[0], px[2]) {
                (255, 255) if px[1] == 255 => 0,
                (255, _) => 1,
                (_, 255) => -1,
                _ => return Err(format!("unexpected colour {px:?}")),
            };
        }
    }
    Ok(out)
}

fn figure_regeneration() -> Outcome {
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut images = 0;
    for which in 1..=4u8 {
        let a = generate_figure(which, first.path(), None).map_err(|e| e.to_string())?;
        let b = generate_figure(which, second.path(), None).map_err(|e| e.to_string())?;
        for ((pa, pb), panel) in a.iter().zip(&b).zip(panels(which).map_err(|e| e.to_string())?) {
            let bytes = std::fs::read(pa).map_err(|e| e.to_string())?;
            if bytes != std::fs::read(pb).map_err(|e| e.to_string())? {
                return Err(format!("{} differs between runs", pa.display()));
            }
            let m = panel_matrix(&panel, FIGURE_CONVENTION).map_err(|e| e.to_string())?;
            let cells = decode_cells(&bytes, m.dim())?;
            let support = support_pattern(&m);
            let signs = sign_pattern(&m);
            for a in 0..m.dim() {
                for b in 0..m.dim() {
                    let shown = cells[a][b];
                    if shown != 0 && (!support[(a, b)] || shown != signs[(a, b)]) {
                        return Err(format!("fig {which} panel ({a},{b}) shows {shown} off support or sign"));
                    }
                    if (a + b + panel.n) % 2 == 1 && shown != 0 {
                        return Err(format!("fig {which}: parity-forbidden cell ({a},{b}) coloured"));
                    }
                    if which == 4 && panel.sigma_mode == SigmaMode::PumpMatched && a + b < 2 && shown != 0 {
                        return Err(format!("fig 4: cell ({a},{b}) coloured below a+b=2"));
                    }
                }
            }
            if which == 4 && panel.sigma_mode == SigmaMode::PhaseMatched && panel.ratio == 2.0 {
                let blue: usize = cells.iter().flatten().filter(|&&s| s < 0).count();
                if cells[0][0] != -1 || blue != 1 {
                    return Err(format!("fig 4 phase-matched w/delta=2 has {blue} blue cells"));
                }
            }
            if parity_violation(&m) != 0.0 {
                return Err(format!("fig {which} panel matrix violates parity"));
            }
            images += 1;
        }
    }
    Ok(format!("{images} images byte-identical across runs; masks and signs match"))
}

fn main() -> ExitCode {
    let tolerance = tolerance_from_env();
    let report = verify_default_grid(tolerance, &QuadratureSpec::default());
    let from_report = |f: fn(&VerifyReport) -> Outcome| match &report {
        Ok(r) => f(r),
        Err(e) => Err(format!("verification grid failed: {e}")),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", from_report(oracle_equivalence)),
        ("confocal binomial", confocal_binomial()),
        ("gaussian-pump diagonality", gaussian_diagonality()),
        ("schmidt number", schmidt_numbers()),
        ("parity selection", from_report(parity_selection)),
        ("support rules", support_rules()),
        ("sign alternation", sign_alternation()),
        ("entropy monotonicity", entropy_monotonicity()),
        ("scale invariance", scale_invariance()),
        ("figure regeneration", figure_regeneration()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
