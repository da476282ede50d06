//! Command-line driver for the algebroid engine.
//!
//! Exit codes: `0` all checks pass, `1` input error, `2` a mathematical
//! verdict failed (invalid algebroid, broken identity, mismatched family
//! endpoints), `3` internal consistency failure.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use algebroid_core::atiyah::{
    action_chern, atiyah_matrix, check_c1_modular, chern_class, transgress, verify_certificate,
    weil_differential, weil_project, LiftedState,
};
use algebroid_core::element::Element;
use algebroid_core::fedosov::{check_nilpotency, solve_family, RecursionState, Sector, SolveError};
use algebroid_core::generator::Gen;
use algebroid_core::geometry::GeometrySpec;
use algebroid_core::parse::parse_spec;

use report::{
    digest, element_string, summarize_nilpotency, summarize_tensor, AtiyahSection,
    BracketsSection, CheckSection, FamilySection, RunReport, TowerLine,
};

#[derive(Parser)]
#[command(
    name = "algebroid",
    about = "Exact engine for Lie algebroid structure: solve the homotopy recursion, certify the axioms, compute Atiyah-Chern, Weil and modular classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the recursion and certify the Lie algebroid axioms.
    Check {
        spec: PathBuf,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print all solved tower images and the weight-one bracket tensors.
    Brackets {
        spec: PathBuf,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the k-th Atiyah-Chern class, optionally transgress it and
    /// project to the Weil algebra.
    Atiyah {
        spec: PathBuf,
        #[arg(long, default_value = "1")]
        k: usize,
        #[arg(long)]
        transgress: bool,
        #[arg(long)]
        weil: bool,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        deg_cap: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the one-parameter family connecting two geometries with the
    /// same underlying algebroid.
    Family {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled example specs, or write them to a directory.
    Examples {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const CORPUS: &[(&str, &str)] = &[
    ("zero.spec", include_str!("corpus/zero.spec")),
    ("so2_plane.spec", include_str!("corpus/so2_plane.spec")),
    ("affine_line.spec", include_str!("corpus/affine_line.spec")),
    (
        "lie_algebra_bundle.spec",
        include_str!("corpus/lie_algebra_bundle.spec"),
    ),
    (
        "jacobi_violator.spec",
        include_str!("corpus/jacobi_violator.spec"),
    ),
    (
        "metric_modular.spec",
        include_str!("corpus/metric_modular.spec"),
    ),
];

enum Outcome {
    Pass,
    VerdictFail,
    Internal(String),
}

fn fail_input(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn load_spec(path: &PathBuf) -> Result<(GeometrySpec, String), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let spec = parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((spec, text))
}

fn emit(report: &RunReport, format: Format, out: Option<&PathBuf>) -> Result<(), String> {
    let rendered = report.render(format == Format::Json);
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn solve_or_internal(
    spec: &GeometrySpec,
    cutoff: usize,
) -> Result<RecursionState, Outcome> {
    RecursionState::solve(spec, cutoff).map_err(|e| Outcome::Internal(e.to_string()))
}

fn new_report(command: &str, text: &str, spec: &GeometrySpec, cutoff: usize) -> RunReport {
    RunReport {
        command: command.to_string(),
        spec_digest: digest(text.as_bytes()),
        dim: spec.chart.dim,
        rank: spec.chart.rank,
        cutoff,
        deg_cap: spec.deg_cap,
        verdict: String::new(),
        check: None,
        brackets: None,
        atiyah: None,
        family: None,
        timing_ms: 0,
    }
}

fn finish(
    mut report: RunReport,
    outcome: Outcome,
    started: Instant,
    format: Format,
    out: Option<&PathBuf>,
) -> ExitCode {
    report.timing_ms = started.elapsed().as_millis();
    let code = match &outcome {
        Outcome::Pass => {
            report.verdict = "pass".to_string();
            0u8
        }
        Outcome::VerdictFail => {
            report.verdict = "fail".to_string();
            2
        }
        Outcome::Internal(msg) => {
            report.verdict = format!("internal-consistency failure: {msg}");
            3
        }
    };
    if let Err(e) = emit(&report, format, out) {
        return fail_input(e);
    }
    ExitCode::from(code)
}

fn cmd_check(
    spec_path: PathBuf,
    cutoff: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let (spec, text) = match load_spec(&spec_path) {
        Ok(v) => v,
        Err(e) => return fail_input(e),
    };
    let cutoff = cutoff.unwrap_or(spec.cutoff);
    let mut report = new_report("check", &text, &spec, cutoff);

    let anchor = summarize_tensor("anchor", &algebroid_core::algebroid::check_anchor(&spec));
    let bianchi = summarize_tensor("bianchi", &algebroid_core::algebroid::check_bianchi(&spec));

    let state = match solve_or_internal(&spec, cutoff) {
        Ok(s) => s,
        Err(outcome) => return finish(report, outcome, started, format, out.as_ref()),
    };
    let mut nil = Vec::new();
    let mut internal = None;
    let mut vertical_pass = true;
    for sector in [Sector::Horizontal, Sector::Cross, Sector::Vertical] {
        let r = check_nilpotency(&state, sector);
        if !r.pass() && sector != Sector::Vertical {
            internal = Some(format!("{sector} residual nonzero"));
        }
        if sector == Sector::Vertical {
            vertical_pass = r.pass();
        }
        nil.push(summarize_nilpotency(&r));
    }
    let gauge_ok = state.gauge_residuals().is_empty();
    if gauge_ok.eq(&false) {
        internal = Some("gauge postcondition violated".to_string());
    }
    let axioms_pass = anchor.pass && bianchi.pass;
    if axioms_pass != vertical_pass {
        internal = Some("axioms and nilpotency disagree".to_string());
    }
    report.check = Some(CheckSection {
        anchor,
        bianchi,
        nilpotency: nil,
        gauge_postcondition: gauge_ok,
    });
    let outcome = match internal {
        Some(msg) => Outcome::Internal(msg),
        None if axioms_pass => Outcome::Pass,
        None => Outcome::VerdictFail,
    };
    finish(report, outcome, started, format, out.as_ref())
}

fn cmd_brackets(
    spec_path: PathBuf,
    cutoff: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let (spec, text) = match load_spec(&spec_path) {
        Ok(v) => v,
        Err(e) => return fail_input(e),
    };
    let cutoff = cutoff.unwrap_or(spec.cutoff);
    let mut report = new_report("brackets", &text, &spec, cutoff);
    let state = match solve_or_internal(&spec, cutoff) {
        Ok(s) => s,
        Err(outcome) => return finish(report, outcome, started, format, out.as_ref()),
    };
    let names = spec.chart.var_names();
    let mut towers = Vec::new();
    let mut push_tower = |label: &str, n: usize, gen: Gen, img: &Element| {
        let gname = match gen {
            Gen::Y(i) => format!("y{}", i + 1),
            Gen::V(a) => format!("v{}", a + 1),
            _ => unreachable!(),
        };
        towers.push(TowerLine {
            operator: format!("{label}_{n}"),
            generator: gname,
            image: element_string(img, &names),
        });
    };
    for (n, d) in state.d_nabla.iter().enumerate() {
        for i in 0..spec.chart.dim {
            push_tower("d_nabla", n + 1, Gen::Y(i as u16), &d.image(Gen::Y(i as u16)));
        }
    }
    for (n, d) in state.d_nabla_prime.iter().enumerate() {
        for a in 0..spec.chart.rank {
            push_tower("d_nabla_prime", n + 1, Gen::V(a as u16), &d.image(Gen::V(a as u16)));
        }
    }
    for (n, d) in state.d_rho.iter().enumerate() {
        for i in 0..spec.chart.dim {
            push_tower("d_rho", n + 1, Gen::Y(i as u16), &d.image(Gen::Y(i as u16)));
        }
    }
    for (n, d) in state.d_mu.iter().enumerate() {
        for a in 0..spec.chart.rank {
            push_tower("d_mu", n + 2, Gen::V(a as u16), &d.image(Gen::V(a as u16)));
        }
    }
    // dualized weight-one brackets as tensors
    let t = spec.rho11();
    let mut rho11 = Vec::new();
    for (idx, p) in t.iter_indexed() {
        rho11.push(format!(
            "(d_{}; e_{}) -> {} d_{}",
            idx[1] + 1,
            idx[2] + 1,
            p.display(&names),
            idx[0] + 1
        ));
    }
    let npm = spec.nabla_prime_mu();
    let rp = spec.curvature_prime();
    let mut mu21 = Vec::new();
    let (d, r) = (spec.chart.dim, spec.chart.rank);
    for j in 0..d {
        for b in 0..r {
            for c in (b + 1)..r {
                for a in 0..r {
                    // mu_{2+1}(d_j, e_b, e_c)^a in the contraction gauge
                    let mut coeff = -npm.get(&[j, a, b, c]);
                    for m in 0..d {
                        coeff = &coeff
                            - &(rp.get(&[j, m, b, a]) * spec.rho.get(&[m, c]))
                                .scale(&algebroid_core::scalar::frac(1, 2));
                        coeff = &coeff
                            + &(rp.get(&[j, m, c, a]) * spec.rho.get(&[m, b]))
                                .scale(&algebroid_core::scalar::frac(1, 2));
                    }
                    if !coeff.is_zero() {
                        mu21.push(format!(
                            "(d_{}; e_{}, e_{}) -> {} e_{}",
                            j + 1,
                            b + 1,
                            c + 1,
                            coeff.display(&names),
                            a + 1
                        ));
                    }
                }
            }
        }
    }
    report.brackets = Some(BracketsSection {
        towers,
        rho_11: rho11,
        mu_21: mu21,
    });
    finish(report, Outcome::Pass, started, format, out.as_ref())
}

#[allow(clippy::too_many_arguments)]
fn cmd_atiyah(
    spec_path: PathBuf,
    k: usize,
    do_transgress: bool,
    do_weil: bool,
    cutoff: Option<usize>,
    deg_cap: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let (spec, text) = match load_spec(&spec_path) {
        Ok(v) => v,
        Err(e) => return fail_input(e),
    };
    if k == 0 {
        return fail_input("--k must be at least 1");
    }
    let cap = deg_cap.unwrap_or(spec.deg_cap);
    if k > cap {
        return fail_input(format!("--k {k} exceeds the de Rham degree cap {cap}"));
    }
    let cutoff = cutoff.unwrap_or(spec.cutoff);
    let mut report = new_report("atiyah", &text, &spec, cutoff);
    report.deg_cap = cap;
    let state = match solve_or_internal(&spec, cutoff) {
        Ok(s) => s,
        Err(outcome) => return finish(report, outcome, started, format, out.as_ref()),
    };
    let lift = LiftedState::new(&state);
    let names = spec.chart.var_names();
    let at = atiyah_matrix(&lift);
    let ck = chern_class(&at, k);
    let y_cap = cutoff + 3;
    let mut section = AtiyahSection {
        k,
        class: element_string(&ck, &names),
        class_is_zero: ck.is_zero(),
        transgressed: None,
        certificate_pass: None,
        weil_class: None,
        weil_d_closed: None,
        modular_class: None,
        modular_identity: None,
        equivariant_character: None,
        equivariant_match: None,
    };
    let mut outcome = Outcome::Pass;

    if do_transgress || do_weil {
        match transgress(&lift, &ck, y_cap) {
            Err(e) => outcome = Outcome::Internal(e.to_string()),
            Ok(cert) => {
                let checks = verify_certificate(&lift, &cert);
                section.transgressed = Some(element_string(&cert.alpha, &names));
                section.certificate_pass = Some(checks.pass());
                if !checks.pass() {
                    outcome = Outcome::Internal("transgression certificate failed".into());
                }
                if do_weil {
                    let w = weil_project(&cert.alpha);
                    let dw = weil_differential(&lift, &w, y_cap);
                    section.weil_class = Some(element_string(&w, &names));
                    section.weil_d_closed = Some(dw.is_zero());
                    if !dw.is_zero() && matches!(outcome, Outcome::Pass) {
                        outcome = Outcome::VerdictFail;
                    }
                }
            }
        }
    }
    if k == 1 && do_transgress && spec.metric.is_some() {
        match check_c1_modular(&spec, &lift, y_cap) {
            Err(e) => outcome = Outcome::Internal(e.to_string()),
            Ok(m) => {
                section.modular_class = Some(element_string(
                    &algebroid_core::atiyah::modular_class(&spec),
                    &names,
                ));
                section.modular_identity = Some(m.pass());
                if !m.pass() && matches!(outcome, Outcome::Pass) {
                    outcome = Outcome::VerdictFail;
                }
            }
        }
    }
    if spec.action_algebroid {
        match action_chern(&spec, &state, &lift, k, y_cap) {
            Err(e) => outcome = Outcome::Internal(e.to_string()),
            Ok(a) => {
                section.equivariant_character = Some(element_string(&a.equivariant, &names));
                section.equivariant_match = Some(a.pass());
                if !a.pass() && matches!(outcome, Outcome::Pass) {
                    outcome = Outcome::VerdictFail;
                }
            }
        }
    }
    report.atiyah = Some(section);
    finish(report, outcome, started, format, out.as_ref())
}

fn cmd_family(
    a_path: PathBuf,
    b_path: PathBuf,
    cutoff: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let (spec_a, text_a) = match load_spec(&a_path) {
        Ok(v) => v,
        Err(e) => return fail_input(e),
    };
    let (spec_b, text_b) = match load_spec(&b_path) {
        Ok(v) => v,
        Err(e) => return fail_input(e),
    };
    let cutoff = cutoff.unwrap_or_else(|| spec_a.cutoff.min(spec_b.cutoff));
    let digest_both = format!("{}:{}", digest(text_a.as_bytes()), digest(text_b.as_bytes()));
    let mut report = new_report("family", "", &spec_a, cutoff);
    report.spec_digest = digest_both;
    let fam = match solve_family(&spec_a, &spec_b, cutoff) {
        Ok(f) => f,
        Err(SolveError::EndpointMismatch { what }) => {
            report.verdict = format!("fail: endpoints disagree on {what}");
            report.timing_ms = started.elapsed().as_millis();
            if let Err(e) = emit(&report, format, out.as_ref()) {
                return fail_input(e);
            }
            return ExitCode::from(2);
        }
        Err(e) => return finish(report, Outcome::Internal(e.to_string()), started, format, out.as_ref()),
    };
    let names = fam.chart.var_names();
    let mut lines = Vec::new();
    for (n, fd) in fam.f.iter().enumerate() {
        for g in fam.chart.ce_generators() {
            let img = fd.image(g);
            if img.is_zero() {
                continue;
            }
            let gname = match g {
                Gen::Y(i) => format!("y{}", i + 1),
                Gen::V(a) => format!("v{}", a + 1),
                _ => unreachable!(),
            };
            lines.push(TowerLine {
                operator: format!("F_{}", n + 2),
                generator: gname,
                image: element_string(&img, &names),
            });
        }
    }
    let pass = fam.pass();
    report.family = Some(FamilySection {
        f_components: lines,
        defining_pass: fam.defining_residuals.is_empty(),
        compatibility_pass: fam.compatibility_residuals.is_empty(),
        flatness_pass: fam.flatness_residuals.is_empty(),
    });
    let outcome = if pass { Outcome::Pass } else { Outcome::VerdictFail };
    finish(report, outcome, started, format, out.as_ref())
}

fn cmd_examples(out: Option<PathBuf>) -> ExitCode {
    match out {
        None => {
            for (name, text) in CORPUS {
                let first = text
                    .lines()
                    .find(|l| l.starts_with('#'))
                    .unwrap_or("")
                    .trim_start_matches('#')
                    .trim();
                println!("{name}: {first}");
            }
            ExitCode::SUCCESS
        }
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(&dir) {
                return fail_input(format!("cannot create {}: {e}", dir.display()));
            }
            for (name, text) in CORPUS {
                if let Err(e) = std::fs::write(dir.join(name), text) {
                    return fail_input(format!("cannot write {name}: {e}"));
                }
            }
            println!("wrote {} example specs to {}", CORPUS.len(), dir.display());
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            spec,
            cutoff,
            format,
            out,
        } => cmd_check(spec, cutoff, format, out),
        Command::Brackets {
            spec,
            cutoff,
            format,
            out,
        } => cmd_brackets(spec, cutoff, format, out),
        Command::Atiyah {
            spec,
            k,
            transgress,
            weil,
            cutoff,
            deg_cap,
            format,
            out,
        } => cmd_atiyah(spec, k, transgress, weil, cutoff, deg_cap, format, out),
        Command::Family {
            spec_a,
            spec_b,
            cutoff,
            format,
            out,
        } => cmd_family(spec_a, spec_b, cutoff, format, out),
        Command::Examples { out } => cmd_examples(out),
    }
}
