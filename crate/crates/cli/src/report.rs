//! Structured run reports with machine-readable (JSON) and human-readable
//! (text) renderings of the same data. All fields except `timing_ms` are
//! deterministic for identical inputs.

use serde::Serialize;

use algebroid_core::element::Element;
use algebroid_core::fedosov::NilpotencyReport;
use algebroid_core::geometry::Tens;

/// FNV-1a digest of the input document.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub spec_digest: String,
    pub dim: usize,
    pub rank: usize,
    pub cutoff: usize,
    pub deg_cap: usize,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brackets: Option<BracketsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atiyah: Option<AtiyahSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
    pub timing_ms: u128,
}

#[derive(Serialize)]
pub struct ResidualSummary {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_nonzero_weight: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub entries: Vec<String>,
}

#[derive(Serialize)]
pub struct CheckSection {
    pub anchor: ResidualSummary,
    pub bianchi: ResidualSummary,
    pub nilpotency: Vec<ResidualSummary>,
    pub gauge_postcondition: bool,
}

#[derive(Serialize)]
pub struct BracketsSection {
    pub towers: Vec<TowerLine>,
    pub rho_11: Vec<String>,
    pub mu_21: Vec<String>,
}

#[derive(Serialize)]
pub struct TowerLine {
    pub operator: String,
    pub generator: String,
    pub image: String,
}

#[derive(Serialize)]
pub struct AtiyahSection {
    pub k: usize,
    pub class: String,
    pub class_is_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transgressed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weil_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weil_d_closed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modular_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modular_identity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivariant_character: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivariant_match: Option<bool>,
}

#[derive(Serialize)]
pub struct FamilySection {
    pub f_components: Vec<TowerLine>,
    pub defining_pass: bool,
    pub compatibility_pass: bool,
    pub flatness_pass: bool,
}

pub fn summarize_nilpotency(report: &NilpotencyReport) -> ResidualSummary {
    ResidualSummary {
        name: format!("{}", report.sector),
        pass: report.pass(),
        first_nonzero_weight: report.first_nonzero_weight,
        entries: report
            .residuals
            .iter()
            .map(|r| format!("{} at weight {}", r.generator, r.weight))
            .collect(),
    }
}

pub fn summarize_tensor(name: &str, t: &Tens) -> ResidualSummary {
    let entries: Vec<String> = t
        .iter_indexed()
        .map(|(idx, _)| {
            let tuple = idx
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",");
            format!("({tuple})")
        })
        .collect();
    ResidualSummary {
        name: name.to_string(),
        pass: entries.is_empty(),
        first_nonzero_weight: None,
        entries,
    }
}

pub fn element_string(e: &Element, names: &[String]) -> String {
    format!("{}", e.display(names))
}

impl RunReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("command: {}", self.command));
        line(format!("spec_digest: {}", self.spec_digest));
        line(format!("dim: {}  rank: {}", self.dim, self.rank));
        line(format!("cutoff: {}  deg_cap: {}", self.cutoff, self.deg_cap));
        if let Some(check) = &self.check {
            for part in [&check.anchor, &check.bianchi] {
                line(format!(
                    "{}: {}{}",
                    part.name,
                    if part.pass { "pass" } else { "fail" },
                    if part.entries.is_empty() {
                        String::new()
                    } else {
                        format!(" at {}", part.entries.join(" "))
                    }
                ));
            }
            for part in &check.nilpotency {
                line(format!(
                    "nilpotency[{}]: {}{}",
                    part.name,
                    if part.pass { "pass" } else { "fail" },
                    part.first_nonzero_weight
                        .map(|w| format!(" (first nonzero weight {w})"))
                        .unwrap_or_default()
                ));
            }
            line(format!(
                "gauge_postcondition: {}",
                if check.gauge_postcondition { "pass" } else { "fail" }
            ));
        }
        if let Some(br) = &self.brackets {
            for t in &br.towers {
                line(format!("{}({}) = {}", t.operator, t.generator, t.image));
            }
            for s in &br.rho_11 {
                line(format!("rho_11{s}"));
            }
            for s in &br.mu_21 {
                line(format!("mu_21{s}"));
            }
        }
        if let Some(at) = &self.atiyah {
            line(format!("c_{}: {}", at.k, at.class));
            if let Some(tr) = &at.transgressed {
                line(format!("transgressed: {tr}"));
            }
            if let Some(ok) = at.certificate_pass {
                line(format!("certificate: {}", if ok { "pass" } else { "fail" }));
            }
            if let Some(w) = &at.weil_class {
                line(format!("weil_class: {w}"));
            }
            if let Some(ok) = at.weil_d_closed {
                line(format!("weil_d_closed: {}", if ok { "pass" } else { "fail" }));
            }
            if let Some(m) = &at.modular_class {
                line(format!("modular_class: {m}"));
            }
            if let Some(ok) = at.modular_identity {
                line(format!("modular_identity: {}", if ok { "pass" } else { "fail" }));
            }
            if let Some(e) = &at.equivariant_character {
                line(format!("equivariant_character: {e}"));
            }
            if let Some(ok) = at.equivariant_match {
                line(format!("equivariant_match: {}", if ok { "pass" } else { "fail" }));
            }
        }
        if let Some(fam) = &self.family {
            for t in &fam.f_components {
                line(format!("{}({}) = {}", t.operator, t.generator, t.image));
            }
            line(format!(
                "defining: {}",
                if fam.defining_pass { "pass" } else { "fail" }
            ));
            line(format!(
                "compatibility: {}",
                if fam.compatibility_pass { "pass" } else { "fail" }
            ));
            line(format!(
                "flatness: {}",
                if fam.flatness_pass { "pass" } else { "fail" }
            ));
        }
        line(format!("verdict: {}", self.verdict));
        line(format!("timing_ms: {}", self.timing_ms));
        out
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("report serialization");
            s.push('\n');
            s
        } else {
            self.render_text()
        }
    }
}
