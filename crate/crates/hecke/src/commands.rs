//! The CLI commands as functions returning JSON-lines records and a short
//! human-readable summary.

use std::sync::Arc;

use anyhow::{ensure, Result};
use hecke_core::embed;
use hecke_core::hecke::HeckeAlgebra;
use hecke_core::spheromorph::{format_address, AlmostAutomorphism};
use hecke_core::witness::{
    decay_table, fejer_test_polynomial, haar_convergence_check, search_witness, verify_certificate_with, SearchConfig,
    WitnessCertificate,
};
use hecke_core::TreeShape;
use serde_json::{json, Value};

use crate::cache::{PairKind, TableCache};
use crate::format::element_to_json;

pub const CENSUS_FORMAT: &str = "hecke.census.v1";
pub const GELFAND_FORMAT: &str = "hecke.gelfand.v1";
pub const WITNESS_FORMAT: &str = "hecke.witness.v1";
pub const VERIFY_FORMAT: &str = "hecke.verify.v1";
pub const DECAY_FORMAT: &str = "hecke.decay.v1";
pub const HAAR_FORMAT: &str = "hecke.haar.v1";
pub const EMBED_FORMAT: &str = "hecke.embed-check.v1";
pub const SPHER_FORMAT: &str = "hecke.spher.v1";

/// Deviation below which the decay and Haar checks count as converged.
pub const DECAY_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<Value>,
    pub summary: Vec<String>,
    pub ok: bool,
}

impl Report {
    pub fn jsonl(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

fn pair_fields(kind: &PairKind) -> Value {
    match *kind {
        PairKind::Depth { d, l } => json!({ "kind": "depth", "d": d, "l": l }),
        PairKind::Ball { shape, n } => json!({ "kind": "ball", "d": shape.d, "k": shape.k, "n": n }),
    }
}

fn pair_label(kind: &PairKind) -> String {
    match *kind {
        PairKind::Depth { d, l } => format!("(S_{}, Q_{l}) d={d}", d.pow(l as u32)),
        PairKind::Ball { shape, n } => format!("(S_{}, P_{n}) d={} k={}", shape.level_size(n), shape.d, shape.k),
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn witness_value(alg: &HeckeAlgebra) -> (bool, Value) {
    let verdict = alg.is_commutative();
    let w = verdict.witness.map_or(Value::Null, |w| {
        let reps = alg.table().entries();
        json!({
            "a": w.a,
            "b": w.b,
            "rep_a": reps[w.a].rep.to_vec(),
            "rep_b": reps[w.b].rep.to_vec(),
            "row": w.row,
            "col": w.col,
            "value": w.value,
        })
    });
    (verdict.commutative, w)
}

/// One row per pair: orders, index, double-coset count and Gelfand verdict.
pub fn census(cache: &TableCache, pairs: &[PairKind]) -> Result<Report> {
    let mut report = Report {
        ok: true,
        ..Report::default()
    };
    for kind in pairs {
        let (alg, _) = cache.algebra(kind)?;
        let s = alg.summary();
        let (commutative, witness) = witness_value(&alg);
        report.lines.push(merge(
            json!({
                "format": CENSUS_FORMAT,
                "group_order": s.group_order,
                "subgroup_order": s.subgroup_order,
                "index": s.index,
                "double_cosets": s.double_cosets,
                "unimodular": alg.table().is_unimodular(),
                "commutative": commutative,
                "witness": witness,
            }),
            pair_fields(kind),
        ));
        report.summary.push(format!(
            "{}: |G|={} |H|={} index={} double cosets={} {}",
            pair_label(kind),
            s.group_order,
            s.subgroup_order,
            s.index,
            s.double_cosets,
            if commutative { "commutative" } else { "noncommutative" }
        ));
    }
    Ok(report)
}

/// Commutativity verdicts with a non-commuting basis pair where one exists.
pub fn gelfand(cache: &TableCache, pairs: &[PairKind]) -> Result<Report> {
    let mut report = Report {
        ok: true,
        ..Report::default()
    };
    for kind in pairs {
        let (alg, _) = cache.algebra(kind)?;
        let (commutative, witness) = witness_value(&alg);
        report.summary.push(match &witness {
            Value::Null => format!("{}: Gelfand pair ({} double cosets)", pair_label(kind), alg.dim()),
            w => format!(
                "{}: not a Gelfand pair, e_{} e_{} != e_{} e_{} at ({}, {})",
                pair_label(kind),
                w["a"],
                w["b"],
                w["b"],
                w["a"],
                w["row"],
                w["col"]
            ),
        });
        report.lines.push(merge(
            json!({ "format": GELFAND_FORMAT, "commutative": commutative, "witness": witness }),
            pair_fields(kind),
        ));
    }
    Ok(report)
}

pub fn depth_algebra(cache: &TableCache, d: usize, l: usize) -> Result<Arc<HeckeAlgebra>> {
    Ok(cache.algebra(&PairKind::Depth { d, l })?.0)
}

pub fn witness(cache: &TableCache, d: usize, l: usize, config: &SearchConfig) -> Result<(WitnessCertificate, Report)> {
    let alg = depth_algebra(cache, d, l)?;
    let cert = search_witness(&alg, config)?;
    let report = Report {
        lines: vec![json!({
            "format": WITNESS_FORMAT,
            "d": d,
            "l": l,
            "k_max": cert.k_max(),
            "max_abs_moment": cert.max_abs_moment,
            "unitarity_defect_u": cert.unitarity_defect_u,
            "unitarity_defect_v": cert.unitarity_defect_v,
            "seed": cert.seed,
            "budget": cert.budget,
        })],
        summary: vec![format!(
            "witness on (S_{}, Q_{l}): max_{{k<={}}} |tau(w^k)| = {:.9}, unitarity defects {:.2e} / {:.2e}",
            d.pow(l as u32),
            cert.k_max(),
            cert.max_abs_moment,
            cert.unitarity_defect_u,
            cert.unitarity_defect_v
        )],
        ok: true,
    };
    Ok((cert, report))
}

/// Replays a certificate through `λ` on `ℓ²(H\G)`; `ok` is the verdict.
pub fn verify(cache: &TableCache, cert: &WitnessCertificate) -> Result<Report> {
    let alg = depth_algebra(cache, cert.d, cert.l)?;
    let r = verify_certificate_with(cert, &alg);
    let mut report = Report {
        ok: r.passed(),
        ..Report::default()
    };
    for c in &r.checks {
        report.lines.push(json!({
            "format": VERIFY_FORMAT,
            "check": c.name,
            "passed": c.passed,
            "value": c.value,
            "detail": c.detail,
        }));
        report
            .summary
            .push(format!("{} {:<30} {:.3e}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.value));
    }
    if let Some(scan) = &r.root_scan {
        report.lines.push(json!({
            "format": VERIFY_FORMAT,
            "root_scan": {
                "order": cert.tolerances.root_scan_order,
                "clusters": scan.clusters,
                "min_distance": if scan.min_distance.is_finite() { json!(scan.min_distance) } else { Value::Null },
                "argmin": scan.argmin.map(|(a, b, m)| json!([a, b, m])),
            }
        }));
        report.summary.push(format!(
            "root-of-unity scan: {} heavy clusters, min |(l_j/l_j')^m - 1| = {:.3e} for m <= {}",
            scan.clusters, scan.min_distance, cert.tolerances.root_scan_order
        ));
    }
    report.summary.push(if report.ok { "certificate verified".into() } else { "certificate REJECTED".into() });
    Ok(report)
}

/// `τ(w^k)^{|V_n|}` table and the Haar report for the bundled Fejér polynomial.
pub fn decay(cert: &WitnessCertificate, shape: TreeShape, n_max: usize, k_max: usize) -> Result<Report> {
    ensure!(k_max <= cert.k_max(), "k-max = {k_max} exceeds the {} moments in the certificate", cert.k_max());
    let table = decay_table(cert, shape, n_max, k_max);
    let mut report = Report::default();
    for row in &table.rows {
        report.lines.push(json!({
            "format": DECAY_FORMAT,
            "n": row.n,
            "exponent": row.exponent,
            "max_abs": row.max_abs,
            "max_abs_linear": row.max_abs_linear,
            "entries": row.entries.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }));
    }
    let haar = haar_convergence_check(cert, shape, &fejer_test_polynomial(), n_max, DECAY_THRESHOLD);
    for row in &haar.rows {
        report.lines.push(json!({
            "format": HAAR_FORMAT,
            "n": row.n,
            "value": [row.value.re, row.value.im],
            "deviation": row.deviation,
        }));
    }
    let first = table.first_below(DECAY_THRESHOLD);
    report.lines.push(json!({
        "format": DECAY_FORMAT,
        "d": shape.d,
        "k": shape.k,
        "k_max": k_max,
        "threshold": DECAY_THRESHOLD,
        "first_below": first,
        "monotone": table.is_monotone(),
        "haar_degree": haar.degree,
        "haar_bound_level": haar.bound_level,
        "haar_first_below": haar.first_below,
        "haar_decreasing": haar.is_decreasing(),
    }));
    for n in (0..=n_max).step_by(n_max.div_ceil(10).max(1)) {
        report.summary.push(format!(
            "n={n:>3} |V_n|={:<12} max_k |tau(w^k)|^|V_n| = {:.3e}   haar deviation = {:.3e}",
            table.rows[n].exponent, table.rows[n].max_abs, haar.rows[n].deviation
        ));
    }
    report.summary.push(match first {
        Some(n) => format!("max moment below {DECAY_THRESHOLD:e} from n = {n}"),
        None => format!("max moment stays above {DECAY_THRESHOLD:e} up to n = {n_max}"),
    });
    report.ok = first.is_some() && haar.first_below.is_some() && haar.is_decreasing();
    Ok(report)
}

/// Runs the embedding and commutation checks on catalogued scenarios.
pub fn embed_check(names: &[String]) -> Result<Report> {
    let scenarios = if names.is_empty() {
        embed::catalog()?
    } else {
        names.iter().map(|n| embed::scenario(n)).collect::<hecke_core::Result<_>>()?
    };
    let mut report = Report {
        ok: true,
        ..Report::default()
    };
    let axioms = |a: &embed::AxiomReport| {
        json!({
            "basis_size": a.basis_size,
            "multiplicative": a.multiplicative,
            "star": a.star,
            "trace": a.trace,
            "injective": a.injective,
            "unital": a.unital,
        })
    };
    for s in scenarios {
        let r = s.check()?;
        report.ok &= r.holds();
        report.lines.push(json!({
            "format": EMBED_FORMAT,
            "scenario": r.scenario,
            "ambient_order": r.ambient_order,
            "invariant": axioms(&r.invariant),
            "top": axioms(&r.top),
            "commutant_dim": r.commutant_dim,
            "commutation": r.commutation,
        }));
        let mark = |b: bool| if b { "pass" } else { "FAIL" };
        report.summary.push(format!(
            "{:<18} |G|={:<6} mult={} star={} trace={} inj={} unital={} | top mult={} star={} trace={} inj={} | commute={} (dim {})",
            r.scenario,
            r.ambient_order,
            mark(r.invariant.multiplicative),
            mark(r.invariant.star),
            mark(r.invariant.trace),
            mark(r.invariant.injective),
            mark(r.invariant.unital),
            mark(r.top.multiplicative),
            mark(r.top.star),
            mark(r.top.trace),
            mark(r.top.injective),
            mark(r.commutation),
            r.commutant_dim
        ));
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub enum SpherOp {
    Compose(AlmostAutomorphism, AlmostAutomorphism),
    Inverse(AlmostAutomorphism),
    Canonical(AlmostAutomorphism),
    Key(AlmostAutomorphism, usize),
    Level(AlmostAutomorphism, usize),
}

fn element_value(g: &AlmostAutomorphism) -> Result<Value> {
    Ok(serde_json::from_str(&element_to_json(g)?)?)
}

pub fn spher(op: &SpherOp) -> Result<Report> {
    let mut report = Report {
        ok: true,
        ..Report::default()
    };
    match op {
        SpherOp::Compose(g, h) => {
            let gh = g.compose(h)?.canonical_form();
            report.summary.push(format!("g∘h has {} domain leaves", gh.domain_leaves().count()));
            report.lines.push(json!({ "format": SPHER_FORMAT, "op": "compose", "result": element_value(&gh)? }));
        }
        SpherOp::Inverse(g) => {
            let inv = g.inverse().canonical_form();
            report.summary.push(format!("inverse has {} domain leaves", inv.domain_leaves().count()));
            report.lines.push(json!({ "format": SPHER_FORMAT, "op": "inverse", "result": element_value(&inv)? }));
        }
        SpherOp::Canonical(g) => {
            let c = g.canonical_form();
            report.summary.push(format!(
                "canonical form has {} domain leaves{}",
                c.domain_leaves().count(),
                if c.is_identity() { " (identity)" } else { "" }
            ));
            report.lines.push(json!({
                "format": SPHER_FORMAT,
                "op": "canonical",
                "identity": c.is_identity(),
                "result": element_value(&c)?,
            }));
        }
        SpherOp::Key(g, n) => {
            let key = g.double_coset_key(*n)?;
            let sigma = g.level_permutation(*n)?;
            report.summary.push(format!("level-{n} permutation {sigma}, double coset key {key}"));
            report.lines.push(json!({
                "format": SPHER_FORMAT,
                "op": "key",
                "n": n,
                "level_permutation": sigma.to_vec(),
                "key": key.to_vec(),
                "identity_coset": key.is_identity(),
            }));
        }
        SpherOp::Level(g, n_max) => match g.minimal_level(*n_max) {
            Ok(n) => {
                report.summary.push(format!("in O^({n}), minimal level {n}"));
                report.lines.push(json!({ "format": SPHER_FORMAT, "op": "level", "n_max": n_max, "minimal_level": n }));
            }
            Err(_) => {
                let witness = g.level_obstruction(*n_max).map(|a| format_address(&a));
                report.summary.push(format!("not in O^(n) for n <= {n_max}; obstruction at {witness:?}"));
                report.lines.push(json!({
                    "format": SPHER_FORMAT,
                    "op": "level",
                    "n_max": n_max,
                    "minimal_level": Value::Null,
                    "witness": witness,
                }));
            }
        },
    }
    Ok(report)
}
