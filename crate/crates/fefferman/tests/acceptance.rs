//! Acceptance criteria 1-10, one verdict line each.

use std::io::Write;
use std::time::Instant;

use fefferman::suites::inclusions::InclusionOptions;
use fefferman::suites::metrics::MetricOptions;
use fefferman::suites::model::{ModelMetric, ModelOptions};
use fefferman::suites::{cohomology, inclusions, metrics, model};
use fefferman::{Report, Section, SuiteConfig};

/// Criteria that cannot pass as stated; they still run and print FAIL.
const UNATTAINABLE: &[(u32, &str)] =
    &[(6, "the closed-form x-display is not an element of su(Q), so no Lie algebra map can produce it")];

struct Verdict {
    id: u32,
    title: &'static str,
    pass: bool,
    notes: Vec<String>,
}

fn cfg(suite: &str, n: usize) -> SuiteConfig {
    let mut c = SuiteConfig::new(suite);
    c.n = n;
    c
}

fn sections<'a>(r: &'a Report, prefix: &str) -> Vec<&'a Section> {
    let found: Vec<&Section> = r.sections.iter().filter(|s| s.name.starts_with(prefix)).collect();
    assert!(!found.is_empty(), "no section '{prefix}' in {} report", r.suite);
    found
}

/// Gating failures in the named sections; `tag` labels the run.
fn failures(r: &Report, prefixes: &[&str], tag: &str) -> Vec<String> {
    let mut out = Vec::new();
    for p in prefixes {
        for s in sections(r, p) {
            for e in s.entries.iter().filter(|e| e.gating && !e.pass) {
                out.push(format!("{tag} {} / {}", s.name, e.name));
            }
        }
    }
    out
}

fn verdict(id: u32, title: &'static str, notes: Vec<String>) -> Verdict {
    Verdict { id, title, pass: notes.is_empty(), notes }
}

fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn timed<T>(what: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    say(&format!("  ({what}: {:.1}s)", t.elapsed().as_secs_f64()));
    out
}

fn main() {
    let mut verdicts = Vec::new();

    let coh: Vec<Report> = [1, 2]
        .iter()
        .map(|&n| timed(&format!("cohomology n={n}"), || cohomology::run(&cfg("cohomology", n)).unwrap()))
        .collect();
    let tag = |n: usize| format!("[n={n}]");
    let collect = |reports: &[Report], prefixes: &[&str]| -> Vec<String> {
        reports.iter().zip(1..).flat_map(|(r, n)| failures(r, prefixes, &tag(n))).collect()
    };
    verdicts.push(verdict(1, "H1_l = 0 for l >= 0 (n = 1, 2)", collect(&coh, &["H1"])));
    verdicts.push(verdict(2, "H2 homogeneity structure (n = 1, 2)", collect(&coh, &["H2"])));
    verdicts.push(verdict(
        3,
        "codifferential cross-oracle, squares, Hodge identity",
        collect(&coh, &["codifferential", "Hodge decomposition"]),
    ));

    let opts = InclusionOptions { negative_controls: true, displays: true, ..InclusionOptions::default() };
    let inc: Vec<Report> = [1, 2]
        .iter()
        .map(|&n| timed(&format!("inclusions n={n}"), || inclusions::run(&cfg("inclusions", n), &opts).unwrap()))
        .collect();
    verdicts.push(verdict(4, "transfer lemmas on 100 seeded cochains (n = 1, 2)", collect(&inc, &["codifferential identities"])));
    let mut normality = collect(&inc, &["normality transfer", "negative controls"]);
    let dim = inc[0].find("solution space is nonzero").map(|e| e.detail.clone()).unwrap_or_default();
    if !inc[0].find("solution space is nonzero").is_some_and(|e| e.pass) {
        normality.push("[n=1] empty solution space".into());
    }
    let mut v5 = verdict(5, "normality transfer both ways, negative controls", normality);
    v5.notes.push(format!("n=1 solution space {dim}"));
    verdicts.push(v5);
    verdicts.push(verdict(
        6,
        "displayed image matrices, graded splitting, Killing constants, trace pairings",
        collect(&inc, &["structural conditions", "trace pairings and scaling", "displayed image matrices"]),
    ));

    let quad = timed("model quadric n=1", || {
        model::run(&cfg("model", 1), &ModelOptions { metric: Some(ModelMetric::Quadric), rescale_seed: None }).unwrap()
    });
    verdicts.push(verdict(7, "quadric model, n = 1, 20 points", failures(&quad, &["quadric model"], "")));
    let heis = timed("model heisenberg n=1", || {
        model::run(&cfg("model", 1), &ModelOptions { metric: Some(ModelMetric::Heisenberg), rescale_seed: None })
            .unwrap()
    });
    let mut v8 = verdict(8, "Heisenberg Fefferman metric, n = 1", failures(&heis, &["sigma convention"], ""));
    if let Some(s) = heis.sections.iter().find(|s| s.name == "sigma convention") {
        v8.notes.push(format!("adopted {}", s.data.get("adopted").map(|v| v.to_string()).unwrap_or_default()));
    }
    verdicts.push(v8);

    let mut mcfg = cfg("random-metrics", 1);
    mcfg.samples = 4;
    let met = timed("random metrics dim 4", || metrics::run(&mcfg, &MetricOptions::default()).unwrap());
    verdicts.push(verdict(
        9,
        "tensor pipeline on 10 random quartic metrics, dim 4",
        failures(&met, &["random degree-4 metrics", "reference metrics"], ""),
    ));

    let mut det = Vec::new();
    let mut small = cfg("model", 1);
    small.samples = 5;
    type Run = Box<dyn Fn() -> Report>;
    let runs: [(&str, Run); 3] = [
        ("cohomology", Box::new(|| cohomology::run(&cfg("cohomology", 1)).unwrap())),
        (
            "inclusions",
            Box::new(|| {
                inclusions::run(&cfg("inclusions", 1), &InclusionOptions { seeds: 10, combos: 5, ..Default::default() })
                    .unwrap()
            }),
        ),
        ("model", Box::new(move || model::run(&small, &ModelOptions { metric: None, rescale_seed: Some(7) }).unwrap())),
    ];
    for (name, run) in &runs {
        if run().to_json() != run().to_json() {
            det.push(format!("{name} JSON differs between runs"));
        }
    }
    if met.to_json() != metrics::run(&mcfg, &MetricOptions::default()).unwrap().to_json() {
        det.push("random-metrics JSON differs between runs".into());
    }
    verdicts.push(verdict(10, "determinism (byte-equal JSON)", det));

    say("");
    let mut unexpected = 0;
    for v in &verdicts {
        let known = UNATTAINABLE.iter().find(|(id, _)| *id == v.id);
        say(&format!("criterion {:>2} {}: {}", v.id, if v.pass { "PASS" } else { "FAIL" }, v.title));
        for note in &v.notes {
            say(&format!("      {note}"));
        }
        match (v.pass, known) {
            (false, Some((_, why))) => say(&format!("      unattainable: {why}")),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    say(&format!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures", verdicts.len()));
    if unexpected > 0 {
        std::process::exit(1);
    }
}
