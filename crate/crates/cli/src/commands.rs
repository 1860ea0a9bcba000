//! Subcommand implementations. Exit codes are a stable contract:
//! 0 success, 1 verification failure, 2 input or validation error.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use ridgeline::canonical::{CanonicalType, CanonicalTypeFile};
use ridgeline::chart::NodalChart;
use ridgeline::dynamics;
use ridgeline::exact::QuadraticNumber;
use ridgeline::maps;
use ridgeline::polygon::DelzantPolygon;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

fn input_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INPUT_ERROR
}

fn read_file(path: &Path) -> Result<String, i32> {
    std::fs::read_to_string(path)
        .map_err(|e| input_error(format_args!("cannot read {}: {e}", path.display())))
}

fn load_type(path: &Path) -> Result<CanonicalType, i32> {
    let text = read_file(path)?;
    let file: CanonicalTypeFile = serde_json::from_str(&text)
        .map_err(|e| input_error(format_args!("{}: {e}", path.display())))?;
    CanonicalType::from_file(&file)
        .map_err(|e| input_error(format_args!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, content: &str) -> i32 {
    match out {
        Some(path) => match std::fs::write(path, content) {
            Ok(()) => EXIT_OK,
            Err(e) => input_error(format_args!("cannot write {}: {e}", path.display())),
        },
        None => {
            println!("{content}");
            EXIT_OK
        }
    }
}

pub fn describe(input: &Path, out: Option<&Path>) -> i32 {
    let ctype = match load_type(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let chart = match NodalChart::natural(&ctype) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let mut text = String::new();
    let m = ctype.max_height();
    let w = ctype.width();
    let _ = writeln!(text, "hat class      {}", ctype.hat());
    let _ = writeln!(text, "k = {}", ctype.k());
    let _ = writeln!(text, "M              {m}");
    let _ = writeln!(text, "width w        {w}");
    let _ = writeln!(
        text,
        "end types      ({}, {})",
        ctype.end_types().0.label(),
        ctype.end_types().1.label()
    );
    let _ = writeln!(text, "epsilon        {}", ctype.eps());
    let _ = writeln!(text, "radicand d     {}", ctype.radicand());
    if ctype.parked_heights().is_empty() {
        let _ = writeln!(text, "parked nodes   none");
    } else {
        for (i, a) in ctype.parked_heights().iter().enumerate() {
            let _ = writeln!(text, "parked[{i}]      height {a}");
        }
    }
    let _ = writeln!(text, "ridge          height M = {m}, width {w}");
    // length function at a few heights
    for num in [0i64, 1, 2, 3] {
        let h = m.mul_int(num).div_int(4);
        if let Ok(g) = ctype.level_length(&h) {
            let _ = writeln!(text, "g({h}) = {g}");
        }
    }
    if let Ok(g) = ctype.level_length(m) {
        let _ = writeln!(text, "g({m}) = {g} (= 2w at the ridge)");
    }
    // cross-check the n = 0, k = 8 case against the rectangle model
    if ctype.parked_heights().is_empty() && ctype.k() == 8 {
        let a = &m.mul_int(2) + w;
        let b = m.mul_int(2);
        match DelzantPolygon::rectangle(&a, &b) {
            Ok(rect) => {
                let ridge = rect.ridge();
                let ok = ridge.max_height == *m && ridge.width == *w;
                let _ = writeln!(
                    text,
                    "rectangle model ({a} x {b}): ridge height {}, width {} [{}]",
                    ridge.max_height,
                    ridge.width,
                    if ok { "agrees" } else { "DISAGREES" }
                );
            }
            Err(e) => {
                let _ = writeln!(text, "rectangle model unavailable: {e}");
            }
        }
    }
    let _ = writeln!(text, "nodes ({}):", chart.nodes().len());
    for n in chart.nodes() {
        let _ = writeln!(
            text,
            "  {:<11} u = {}, h = {}, eigen ({}, {})",
            match n.tag {
                ridgeline::chart::NodeTag::Hat { end } => format!("hat end {end}"),
                ridgeline::chart::NodeTag::Parked { index } => format!("parked {index}"),
            },
            n.u,
            n.h,
            n.eigen.x,
            n.eigen.y
        );
    }
    emit(out, text.trim_end())
}

pub fn verify(input: &Path, resolution: u64, horizon: u64, samples: usize) -> i32 {
    let ctype = match load_type(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let chart = match NodalChart::natural(&ctype) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("CHECK {name}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // length oracle: the wedge geometry against the closed formula
    let mut oracle_ok = true;
    let mut oracle_detail = String::new();
    let m = ctype.max_height();
    let excluded = ctype.excluded_set();
    let mut tested = 0;
    for j in 0..200u64 {
        if tested >= 50 {
            break;
        }
        let h = m.mul_int(j as i64).div_int(200);
        if excluded.contains(&h) || h >= *m {
            continue;
        }
        match (chart.wedge_level_length(&h), ctype.level_length(&h)) {
            (Ok(a), Ok(b)) => {
                tested += 1;
                if a != b {
                    oracle_ok = false;
                    oracle_detail = format!("(wedge {a} != formula {b} at h = {h})");
                    break;
                }
            }
            _ => continue,
        }
    }
    check(
        "wedge-oracle-matches-length-formula",
        oracle_ok && tested > 0,
        if oracle_detail.is_empty() {
            format!("({tested} heights)")
        } else {
            oracle_detail
        },
    );

    // the level-translation isomorphism
    match maps::build_level_translation(&ctype) {
        Ok(translation) => {
            let report = maps::verify_iso(&translation, &chart, samples);
            for c in &report.checks {
                check(
                    &format!("map-{}", c.name),
                    c.passed,
                    c.detail.clone().unwrap_or_default(),
                );
            }
        }
        Err(e) => check("map-construction", false, e.to_string()),
    }

    // verdicts across sampled heights
    match dynamics::scan(&ctype, resolution, horizon, 12) {
        Ok(report) => {
            let n = report.entries.len();
            let nr = report.summary.non_recurrent_count;
            let pd = report.summary.periodic_count;
            check(
                "verdicts-computed",
                n > 0,
                format!("({nr} non-recurrent, {pd} periodic)"),
            );
            if pd == 0 && n > 0 {
                println!("NonRecurrent at all sampled heights");
            }
            if nr == 0 && n > 0 {
                // constant rational rotation number: every fiber is periodic
                let periods: Vec<&str> = report
                    .entries
                    .iter()
                    .map(|e| e.outcome.as_str())
                    .collect();
                if let Some(first) = periods.first() {
                    if periods.iter().all(|p| p == first) {
                        println!(
                            "advisory: {first} everywhere; this type yields no \
                             non-recurrent fiber"
                        );
                    }
                }
            }
        }
        Err(e) => check("verdicts-computed", false, e.to_string()),
    }

    if all_ok {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    }
}

pub fn scan(input: &Path, out: Option<&Path>, resolution: u64, horizon: u64, qmax: u64) -> i32 {
    let ctype = match load_type(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match dynamics::scan(&ctype, resolution, horizon, qmax) {
        Ok(report) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(out, &json)
        }
        Err(e) => input_error(e),
    }
}

#[derive(Deserialize)]
struct OrbitFile {
    rho: QuadraticNumber,
    n: u64,
}

#[derive(serde::Serialize)]
struct OrbitReport {
    rho: QuadraticNumber,
    n: u64,
    distinct_gaps: Vec<GapCount>,
}

#[derive(serde::Serialize)]
struct GapCount {
    gap: QuadraticNumber,
    count: usize,
}

pub fn orbit(input: &Path, out: Option<&Path>) -> i32 {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let file: OrbitFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return input_error(format_args!("{}: {e}", input.display())),
    };
    match dynamics::orbit_gaps(&file.rho, file.n) {
        Ok(gaps) => {
            let mut distinct: Vec<GapCount> = Vec::new();
            for g in gaps {
                match distinct.last_mut() {
                    Some(last) if last.gap == g => last.count += 1,
                    _ => distinct.push(GapCount { gap: g, count: 1 }),
                }
            }
            let report = OrbitReport {
                rho: file.rho,
                n: file.n,
                distinct_gaps: distinct,
            };
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(out, &json)
        }
        Err(e) => input_error(e),
    }
}

pub fn render(input: &Path, out: Option<&Path>, levels: u64) -> i32 {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    // a chart file carries a node list; a bare type file does not
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return input_error(format_args!("{}: {e}", input.display())),
    };
    let chart = if value.get("nodes").is_some() {
        match NodalChart::from_json(&text) {
            Ok(c) => c,
            Err(e) => return input_error(format_args!("{}: {e}", input.display())),
        }
    } else {
        let ctype = match load_type(input) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match NodalChart::natural(&ctype) {
            Ok(c) => c,
            Err(e) => return input_error(e),
        }
    };
    match crate::render::chart_svg(&chart, levels) {
        Ok(svg) => emit(out, &svg),
        Err(e) => input_error(e),
    }
}
