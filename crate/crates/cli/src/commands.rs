use std::fmt::Write as _;

use rayon::prelude::*;
use tact_core::analysis::{check_states, SpectrumOptions};
use tact_core::polynomials::BETHE_TOLERANCE;
use tact_core::{
    build_hamiltonian, build_state_with, compare_report_to_oracle, degeneracy_trend, enumerate_sectors,
    full_spectrum_with, overlap, residual_norm_in, solve_sector, symmetric_functions, Error, Precision,
    SectorLabel, SpectrumReport,
};

use crate::args::{Common, Format, JRange};
use crate::format::{polynomial, sig};
use crate::report::*;

const DIGITS: usize = 6;

/// Why a command produced no output. Check violations travel in
/// [`Output::violation`] so the report is still written.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpin(_) | Error::HalfIntegerSpin(_) => Failure::Usage(e.to_string()),
            Error::PrecisionExhausted { .. } => {
                Failure::Numerical(format!("{e} (pass a larger --precision-bits)"))
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// Rendered command output plus an optional verification failure that should
/// be reported after the output is written.
pub struct Output {
    pub body: String,
    pub violation: Option<String>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, violation: None }
    }
}

fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Numerical(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Numerical(e.to_string()))
}

fn js(range: &JRange, step: u32) -> Result<Vec<u32>, Failure> {
    range.values(step).map_err(Failure::Usage)
}

fn sector_tag(s: SectorLabel, zeta: usize) -> String {
    format!("{{{},{}; {},{},{}}}", s.k(), zeta, s.n1(), s.n2(), s.nu())
}

pub fn spectrum(range: &JRange, common: &Common, zeros: bool, oracle_cap: u32) -> Result<Output, Failure> {
    let options = SpectrumOptions {
        precision: common.precision_bits,
        with_zeros: zeros || common.format == Format::Json,
        ..SpectrumOptions::default()
    };
    let results: Vec<(SpectrumReport, Option<f64>)> = js(range, 1)?
        .par_iter()
        .map(|&j| -> Result<_, Failure> {
            let report = full_spectrum_with(j, common.chi, &options)?;
            let dev = if j <= oracle_cap {
                Some(compare_report_to_oracle(&report)?.relative_deviation())
            } else {
                None
            };
            Ok((report, dev))
        })
        .collect::<Result<_, _>>()?;

    let body = match common.format {
        Format::Json => {
            let dtos: Vec<SpectrumDto> = results
                .iter()
                .map(|(r, dev)| SpectrumDto {
                    j: r.j,
                    chi: r.chi,
                    levels: r.levels.iter().map(LevelDto::from).collect(),
                    checks: ChecksDto {
                        completeness: r.is_complete(),
                        symmetry_defect: r.symmetry_defect,
                        max_bethe_residual: r.max_bethe_residual,
                        oracle_max_dev: *dev,
                    },
                })
                .collect();
            if dtos.len() == 1 {
                json(&dtos[0])?
            } else {
                json(&dtos)?
            }
        }
        Format::Csv => {
            let rows = results
                .iter()
                .flat_map(|(r, _)| {
                    r.levels.iter().map(move |l| {
                        let s = l.sector();
                        vec![
                            r.j.to_string(),
                            s.k().to_string(),
                            l.zeta().to_string(),
                            s.n1().to_string(),
                            s.n2().to_string(),
                            s.nu().to_string(),
                            full(l.g0()),
                            full(l.energy_over_chi()),
                        ]
                    })
                })
                .collect();
            csv_body(&["J", "k", "zeta", "n1", "n2", "nu", "g0", "energy_over_chi"], rows)?
        }
        Format::Text => {
            let mut out = String::new();
            for (r, dev) in &results {
                let _ = writeln!(out, "J = {}, chi = {}, {} levels", r.j, sig(r.chi, DIGITS), r.levels.len());
                let _ = writeln!(out, "{:>12}  {:>12}  {:<16}  {:>12}", "E", "E/chi", "sector", "g0");
                for l in &r.levels {
                    let _ = write!(
                        out,
                        "{:>12}  {:>12}  {:<16}  {:>12}",
                        sig(l.solution.energy(r.chi), DIGITS),
                        sig(l.energy_over_chi(), DIGITS),
                        sector_tag(l.sector(), l.zeta()),
                        sig(l.g0(), DIGITS)
                    );
                    if let Some(z) = &l.zeros {
                        let list: Vec<String> = z.zeros_u().iter().map(|u| sig(*u, DIGITS)).collect();
                        let _ = write!(out, "  zeros [{}]", list.join(", "));
                    }
                    out.push('\n');
                }
                let _ = write!(
                    out,
                    "complete: {}, symmetry defect: {}",
                    if r.is_complete() { "yes" } else { "no" },
                    sig(r.symmetry_defect, 3)
                );
                if let Some(b) = r.max_bethe_residual {
                    let _ = write!(out, ", max Bethe residual: {}", sig(b, 3));
                }
                if let Some(d) = dev {
                    let _ = write!(out, ", dense-spectrum deviation: {}", sig(*d, 3));
                }
                out.push_str("\n\n");
            }
            out.pop();
            out
        }
    };
    Ok(Output::ok(body))
}

pub fn table(range: &JRange, common: &Common) -> Result<Output, Failure> {
    let mut rows: Vec<TableRowDto> = Vec::new();
    for j in js(range, 1)? {
        let catalog = enumerate_sectors(j)?;
        let per_sector: Vec<_> = catalog
            .labels()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|s| tact_core::solve_sector_with(s, common.precision_bits))
            .collect::<Result<_, _>>()?;
        for sol in per_sector.into_iter().flatten() {
            rows.push(TableRowDto {
                j,
                sector: sol.sector().into(),
                zeta: sol.zeta(),
                coefficients: sol.coefficients().to_vec(),
                g0: sol.g0(),
                energy_over_chi: sol.energy_over_chi(),
            });
        }
    }
    let body = match common.format {
        Format::Json => json(&rows)?,
        Format::Csv => csv_body(
            &["J", "k", "zeta", "n1", "n2", "nu", "g0", "energy_over_chi", "coefficients"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.j.to_string(),
                        r.sector.k.to_string(),
                        r.zeta.to_string(),
                        r.sector.n1.to_string(),
                        r.sector.n2.to_string(),
                        r.sector.nu.to_string(),
                        full(r.g0),
                        full(r.energy_over_chi),
                        r.coefficients.iter().map(|c| full(*c)).collect::<Vec<_>>().join(" "),
                    ]
                })
                .collect(),
        )?,
        Format::Text => {
            let polys: Vec<String> = rows.iter().map(|r| polynomial(&r.coefficients, DIGITS)).collect();
            let width = polys.iter().map(String::len).max().unwrap_or(0).max(6);
            let mut out = format!("{:>3}  {:<18}  {:<width$}  {:>12}  {:>12}\n", "J", "{k,zeta; n1,n2,nu}", "y(u)", "g0", "E/chi");
            let mut last_j = None;
            for (r, p) in rows.iter().zip(&polys) {
                let j = if last_j == Some(r.j) { String::new() } else { r.j.to_string() };
                last_j = Some(r.j);
                let tag = format!("{{{},{}; {},{},{}}}", r.sector.k, r.zeta, r.sector.n1, r.sector.n2, r.sector.nu);
                let _ = writeln!(
                    out,
                    "{:>3}  {:<18}  {:<width$}  {:>12}  {:>12}",
                    j,
                    tag,
                    p,
                    sig(r.g0, DIGITS),
                    sig(r.energy_over_chi, DIGITS)
                );
            }
            out
        }
    };
    Ok(Output::ok(body))
}

/// Parses `k,n1,n2,nu` or `n1,n2,nu` for the given J.
fn parse_sector(j: u32, text: &str) -> Result<SectorLabel, Failure> {
    let parts: Vec<u8> = text
        .split(',')
        .map(|p| p.trim().parse::<u8>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("cannot parse sector {text:?}; expected k,n1,n2,nu")))?;
    let (k, bits) = match parts.as_slice() {
        [k, n1, n2, nu] => (Some(u32::from(*k)), (*n1, *n2, *nu)),
        [n1, n2, nu] => (None, (*n1, *n2, *nu)),
        _ => return Err(Failure::Usage(format!("cannot parse sector {text:?}; expected k,n1,n2,nu"))),
    };
    let s = SectorLabel::new(j, bits.0, bits.1, bits.2)
        .ok_or_else(|| Failure::Usage(format!("no sector {text:?} at J = {j}")))?;
    if k.is_some_and(|k| k != s.k()) {
        return Err(Failure::Usage(format!("sector {text:?} violates J = 2k + n1 + n2 + nu at J = {j}")));
    }
    Ok(s)
}

pub fn states(j: u32, sector: Option<&str>, zeta: Option<usize>, common: &Common) -> Result<Output, Failure> {
    let sectors: Vec<SectorLabel> = match sector {
        Some(text) => vec![parse_sector(j, text)?],
        None => enumerate_sectors(j)?.labels().collect(),
    };
    let mut solutions = Vec::new();
    for s in sectors {
        let mut sols = solve_sector(s)?;
        if let Some(z) = zeta {
            if z == 0 || z > sols.len() {
                return Err(Failure::Usage(format!("zeta must be in 1..={} for {s}", sols.len())));
            }
            sols = vec![sols.swap_remove(z - 1)];
        }
        solutions.extend(sols);
    }
    let h = build_hamiltonian(j);
    let built: Vec<(tact_core::SpinState, f64, f64)> = solutions
        .par_iter()
        .map(|sol| -> Result<_, Failure> {
            let s = symmetric_functions(sol)?;
            let st = build_state_with(sol, &s, common.precision_bits)?;
            let r = residual_norm_in(&h, &st, sol.energy(common.chi), common.chi);
            Ok((st, sol.energy_over_chi(), r))
        })
        .collect::<Result<_, _>>()?;

    let mut gram: f64 = 0.0;
    for (a, (sa, _, _)) in built.iter().enumerate() {
        for (sb, _, _) in &built[a + 1..] {
            gram = gram.max(overlap(sa, sb)?.norm());
        }
    }

    let dtos: Vec<StateDto> = built
        .iter()
        .map(|(st, e, r)| StateDto {
            sector: st.sector().into(),
            zeta: st.zeta(),
            energy_over_chi: *e,
            residual_norm: *r,
            amplitudes: st
                .m_values()
                .zip(st.amplitudes())
                .filter(|(_, a)| a.norm() != 0.0)
                .map(|(m, a)| AmplitudeDto { m, re: a.re, im: a.im })
                .collect(),
        })
        .collect();

    let body = match common.format {
        Format::Json => json(&StatesDto {
            j,
            chi: common.chi,
            states: dtos,
            gram_max_off_diagonal: gram,
        })?,
        Format::Csv => csv_body(
            &["J", "k", "zeta", "n1", "n2", "nu", "M", "re", "im"],
            dtos.iter()
                .flat_map(|d| {
                    d.amplitudes.iter().map(move |a| {
                        vec![
                            j.to_string(),
                            d.sector.k.to_string(),
                            d.zeta.to_string(),
                            d.sector.n1.to_string(),
                            d.sector.n2.to_string(),
                            d.sector.nu.to_string(),
                            a.m.to_string(),
                            full(a.re),
                            full(a.im),
                        ]
                    })
                })
                .collect(),
        )?,
        Format::Text => {
            let mut out = String::new();
            for d in &dtos {
                let s = &d.sector;
                let _ = writeln!(
                    out,
                    "J = {j} {{{},{}; {},{},{}}}  E/chi = {}  residual = {}",
                    s.k,
                    d.zeta,
                    s.n1,
                    s.n2,
                    s.nu,
                    sig(d.energy_over_chi, DIGITS),
                    sig(d.residual_norm, 3)
                );
                for a in &d.amplitudes {
                    let _ = writeln!(out, "  M = {:>4}  {:>12}  {:>12}", a.m, sig(a.re, DIGITS), sig(a.im, DIGITS));
                }
            }
            let _ = writeln!(out, "max |overlap| between distinct states: {}", sig(gram, 3));
            out
        }
    };
    Ok(Output::ok(body))
}

pub fn verify(range: &JRange, common: &Common, state_cap: u32, inject_fault: bool) -> Result<Output, Failure> {
    let tol = common.tol.unwrap_or(1e-8);
    let options = SpectrumOptions {
        precision: common.precision_bits,
        with_zeros: true,
        corrupt_coupling: inject_fault,
        ..SpectrumOptions::default()
    };
    let rows: Vec<VerifyRowDto> = js(range, 1)?
        .par_iter()
        .map(|&j| verify_one(j, &options, tol, state_cap, common.precision_bits))
        .collect::<Result<_, _>>()?;
    let passed = rows.iter().all(|r| r.violations.is_empty());
    let report = VerifyDto { tolerance: tol, passed, rows };

    let body = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => csv_body(
            &[
                "J",
                "levels",
                "complete",
                "max_bethe_residual",
                "oracle_max_dev",
                "symmetry_defect",
                "state_residual",
                "gram_deviation",
                "violations",
            ],
            report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.j.to_string(),
                        r.levels.to_string(),
                        r.complete.to_string(),
                        full(r.max_bethe_residual),
                        full(r.oracle_max_dev),
                        full(r.symmetry_defect),
                        r.state_residual.map(full).unwrap_or_default(),
                        r.gram_deviation.map(full).unwrap_or_default(),
                        r.violations.join("; "),
                    ]
                })
                .collect(),
        )?,
        Format::Text => {
            let mut out = String::new();
            for r in &report.rows {
                let _ = write!(
                    out,
                    "J = {:>3}  levels {:>4}  bethe {:>9}  dense {:>9}  symmetry {:>9}",
                    r.j,
                    r.levels,
                    sig(r.max_bethe_residual, 3),
                    sig(r.oracle_max_dev, 3),
                    sig(r.symmetry_defect, 3)
                );
                if let (Some(s), Some(g)) = (r.state_residual, r.gram_deviation) {
                    let _ = write!(out, "  states {:>9}  gram {:>9}", sig(s, 3), sig(g, 3));
                }
                if r.violations.is_empty() {
                    out.push_str("  ok\n");
                } else {
                    let _ = writeln!(out, "  FAIL: {}", r.violations.join("; "));
                }
            }
            let failing = report.rows.iter().filter(|r| !r.violations.is_empty()).count();
            let _ = writeln!(
                out,
                "verify: {} J values checked, {}",
                report.rows.len(),
                if failing == 0 { "all checks passed".to_string() } else { format!("{failing} with violations") }
            );
            out
        }
    };
    let violation = (!passed).then(|| {
        let first = report.rows.iter().find(|r| !r.violations.is_empty()).expect("a failing row");
        format!("verification failed at J = {}: {}", first.j, first.violations.join("; "))
    });
    Ok(Output { body, violation })
}

fn verify_one(j: u32, options: &SpectrumOptions, tol: f64, state_cap: u32, precision: Precision) -> Result<VerifyRowDto, Failure> {
    let mut violations = Vec::new();
    let report = match full_spectrum_with(j, 1.0, options) {
        Ok(r) => r,
        Err(Error::InvalidZeros { sector, zeta, reason }) => {
            violations.push(format!("{} zeros invalid: {reason}", sector_tag(sector, zeta)));
            return Ok(VerifyRowDto {
                j,
                levels: 0,
                complete: false,
                max_bethe_residual: f64::NAN,
                oracle_max_dev: f64::NAN,
                symmetry_defect: f64::NAN,
                state_residual: None,
                gram_deviation: None,
                violations,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let complete = report.is_complete();
    if !complete {
        violations.push(format!("{} levels instead of {}", report.levels.len(), 2 * j + 1));
    }
    let bethe = report.max_bethe_residual.unwrap_or(0.0);
    if !(bethe <= BETHE_TOLERANCE) {
        violations.push(format!("Bethe residual {}", sig(bethe, 3)));
    }
    let comparison = compare_report_to_oracle(&report)?;
    let dev = comparison.relative_deviation();
    if !(dev <= tol) {
        let mut sectors: Vec<String> = comparison
            .unmatched_levels(&report, tol)
            .iter()
            .map(|l| sector_tag(l.sector(), l.zeta()))
            .collect();
        sectors.dedup();
        violations.push(format!("dense-spectrum deviation {} in {}", sig(dev, 3), sectors.join(" ")));
    }
    if !(report.symmetry_defect <= 1e-9 * report.diameter.max(1.0)) {
        violations.push(format!("symmetry defect {}", sig(report.symmetry_defect, 3)));
    }
    let (state_residual, gram_deviation) = if j <= state_cap && !options.corrupt_coupling {
        let c = check_states(j, precision)?;
        if !(c.max_scaled_residual <= 1e-8) {
            violations.push(format!("state residual {}", sig(c.max_scaled_residual, 3)));
        }
        if !(c.gram_deviation <= 1e-7) {
            violations.push(format!("Gram deviation {}", sig(c.gram_deviation, 3)));
        }
        (Some(c.max_scaled_residual), Some(c.gram_deviation))
    } else {
        (None, None)
    };
    Ok(VerifyRowDto {
        j,
        levels: report.levels.len(),
        complete,
        max_bethe_residual: bethe,
        oracle_max_dev: dev,
        symmetry_defect: report.symmetry_defect,
        state_residual,
        gram_deviation,
        violations,
    })
}

pub fn gaps(range: &JRange, common: &Common, step: u32, threshold: f64) -> Result<Output, Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Usage("--threshold must be positive".into()));
    }
    let trend = degeneracy_trend(&js(range, step)?, threshold)?;
    let dto = GapsDto {
        threshold,
        non_decreasing: trend.non_decreasing(),
        rows: trend
            .rows
            .iter()
            .map(|r| GapRowDto {
                j: r.j,
                pair_count: r.pair_count,
                min_gap: r.min_gap,
                max_counted_gap: r.max_counted_gap,
                ground_gap: r.ground_gap,
            })
            .collect(),
    };
    let body = match common.format {
        Format::Json => json(&dto)?,
        Format::Csv => csv_body(
            &["J", "pair_count", "min_gap", "max_counted_gap", "ground_gap"],
            dto.rows
                .iter()
                .map(|r| {
                    vec![
                        r.j.to_string(),
                        r.pair_count.to_string(),
                        full(r.min_gap),
                        r.max_counted_gap.map(full).unwrap_or_default(),
                        full(r.ground_gap),
                    ]
                })
                .collect(),
        )?,
        Format::Text => {
            let mut out = format!(
                "{:>4}  {:>6}  {:>12}  {:>12}  {:>12}\n",
                "J", "pairs", "min gap", "max counted", "ground gap"
            );
            for r in &dto.rows {
                let _ = writeln!(
                    out,
                    "{:>4}  {:>6}  {:>12}  {:>12}  {:>12}",
                    r.j,
                    r.pair_count,
                    sig(r.min_gap, DIGITS),
                    r.max_counted_gap.map(|g| sig(g, DIGITS)).unwrap_or_else(|| "-".into()),
                    sig(r.ground_gap, DIGITS)
                );
            }
            let _ = writeln!(
                out,
                "pairs with gap < {} chi {} with J",
                sig(threshold, DIGITS),
                if dto.non_decreasing { "never decrease" } else { "decrease somewhere (flagged)" }
            );
            out
        }
    };
    Ok(Output::ok(body))
}
