//! Versioned JSON formats for certificates, coset tables and almost
//! automorphisms.

use std::collections::BTreeMap;

use anyhow::{bail, ensure, Context, Result};
use hecke_core::scalar::C64;
use hecke_core::spheromorph::{format_address, parse_address, AlmostAutomorphism, FinitaryAutomorphism};
use hecke_core::witness::{SpectralData, Tolerances, WitnessCertificate};
use hecke_core::{DoubleCosetTable, PermGroup, Permutation, TreeShape};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

pub const CERTIFICATE_FORMAT: &str = "hecke.witness-certificate.v1";
pub const TABLE_FORMAT: &str = "hecke.coset-table.v1";
pub const ELEMENT_FORMAT: &str = "hecke.almost-automorphism.v1";

/// An `f64` written with 17 significant digits, enough to round-trip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite float {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(F17)
    }
}

fn complex_out(z: &[C64]) -> Vec<[F17; 2]> {
    z.iter().map(|z| [F17(z.re), F17(z.im)]).collect()
}

fn complex_in(z: &[[F17; 2]]) -> Vec<C64> {
    z.iter().map(|[re, im]| C64::new(re.0, im.0)).collect()
}

fn floats_out(x: &[f64]) -> Vec<F17> {
    x.iter().copied().map(F17).collect()
}

fn floats_in(x: &[F17]) -> Vec<f64> {
    x.iter().map(|f| f.0).collect()
}

#[derive(Serialize, Deserialize)]
struct SpectralFile {
    angles: Vec<F17>,
    weights: Vec<F17>,
    modulus_defect: F17,
}

#[derive(Serialize, Deserialize)]
struct TolerancesFile {
    unitarity: F17,
    moment_margin: F17,
    root_scan_order: u32,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    format: String,
    d: usize,
    l: usize,
    basis: Vec<Vec<usize>>,
    u: Vec<[F17; 2]>,
    v: Vec<[F17; 2]>,
    spectral: SpectralFile,
    moments: Vec<[F17; 2]>,
    max_abs_moment: F17,
    unitarity_defect_u: F17,
    unitarity_defect_v: F17,
    tolerances: TolerancesFile,
    seed: u64,
    budget: u64,
}

pub fn certificate_to_json(cert: &WitnessCertificate) -> Result<String> {
    let file = CertificateFile {
        format: CERTIFICATE_FORMAT.into(),
        d: cert.d,
        l: cert.l,
        basis: cert.basis.clone(),
        u: complex_out(&cert.u),
        v: complex_out(&cert.v),
        spectral: SpectralFile {
            angles: floats_out(&cert.spectral.angles),
            weights: floats_out(&cert.spectral.weights),
            modulus_defect: F17(cert.spectral.modulus_defect),
        },
        moments: complex_out(&cert.moments),
        max_abs_moment: F17(cert.max_abs_moment),
        unitarity_defect_u: F17(cert.unitarity_defect_u),
        unitarity_defect_v: F17(cert.unitarity_defect_v),
        tolerances: TolerancesFile {
            unitarity: F17(cert.tolerances.unitarity),
            moment_margin: F17(cert.tolerances.moment_margin),
            root_scan_order: cert.tolerances.root_scan_order,
        },
        seed: cert.seed,
        budget: cert.budget,
    };
    Ok(serde_json::to_string(&file)? + "\n")
}

pub fn certificate_from_json(text: &str) -> Result<WitnessCertificate> {
    let f: CertificateFile = serde_json::from_str(text).context("malformed certificate")?;
    ensure!(f.format == CERTIFICATE_FORMAT, "unsupported certificate format {:?}", f.format);
    Ok(WitnessCertificate {
        d: f.d,
        l: f.l,
        basis: f.basis,
        u: complex_in(&f.u),
        v: complex_in(&f.v),
        spectral: SpectralData {
            angles: floats_in(&f.spectral.angles),
            weights: floats_in(&f.spectral.weights),
            modulus_defect: f.spectral.modulus_defect.0,
        },
        moments: complex_in(&f.moments),
        max_abs_moment: f.max_abs_moment.0,
        unitarity_defect_u: f.unitarity_defect_u.0,
        unitarity_defect_v: f.unitarity_defect_v.0,
        tolerances: Tolerances {
            unitarity: f.tolerances.unitarity.0,
            moment_margin: f.tolerances.moment_margin.0,
            root_scan_order: f.tolerances.root_scan_order,
        },
        seed: f.seed,
        budget: f.budget,
    })
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    rep: Vec<usize>,
    right_cosets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct TableFile {
    pub format: String,
    pub code_version: String,
    pub key: String,
    m: usize,
    group_generators: Vec<Vec<usize>>,
    subgroup_generators: Vec<Vec<usize>>,
    coset_reps: Vec<Vec<usize>>,
    entries: Vec<EntryFile>,
}

fn perms(list: &[Permutation]) -> Vec<Vec<usize>> {
    list.iter().map(Permutation::to_vec).collect()
}

fn parse_perms(list: &[Vec<usize>]) -> Result<Vec<Permutation>> {
    Ok(list.iter().map(|p| Permutation::from_images(p)).collect::<hecke_core::Result<_>>()?)
}

pub fn table_to_json(table: &DoubleCosetTable, key: &str) -> Result<String> {
    let file = TableFile {
        format: TABLE_FORMAT.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        key: key.into(),
        m: table.group().degree(),
        group_generators: perms(table.group().generators()),
        subgroup_generators: perms(table.subgroup().generators()),
        coset_reps: perms(table.cosets().reps()),
        entries: table
            .entries()
            .iter()
            .map(|e| EntryFile {
                rep: e.rep.to_vec(),
                right_cosets: e.right_cosets.clone(),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

/// Parses a stored table and rebuilds it against the expected pair.
pub fn table_from_json(text: &str, key: &str, group: &PermGroup, subgroup: &PermGroup) -> Result<DoubleCosetTable> {
    let f: TableFile = serde_json::from_str(text).context("malformed coset table")?;
    ensure!(f.format == TABLE_FORMAT, "unsupported table format {:?}", f.format);
    ensure!(f.code_version == env!("CARGO_PKG_VERSION"), "table written by version {}", f.code_version);
    ensure!(f.key == key, "table is for {}, not {key}", f.key);
    ensure!(f.m == group.degree(), "table degree {} differs from {}", f.m, group.degree());
    let stored_g = PermGroup::new(f.m, parse_perms(&f.group_generators)?)?;
    let stored_h = PermGroup::new(f.m, parse_perms(&f.subgroup_generators)?)?;
    ensure!(stored_g.same_group(group) && stored_h.same_group(subgroup), "stored groups differ from the requested pair");
    let blocks = f
        .entries
        .iter()
        .map(|e| Ok((Permutation::from_images(&e.rep)?, e.right_cosets.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DoubleCosetTable::from_parts(group, subgroup, parse_perms(&f.coset_reps)?, blocks)?)
}

#[derive(Serialize, Deserialize)]
struct ElementFile {
    format: String,
    d: usize,
    k: usize,
    #[serde(rename = "A")]
    a: Vec<String>,
    #[serde(rename = "B")]
    b: Vec<String>,
    phi: Vec<[String; 2]>,
    #[serde(default)]
    twists: BTreeMap<String, Vec<(String, Vec<usize>)>>,
}

pub fn element_to_json(g: &AlmostAutomorphism) -> Result<String> {
    let shape = g.shape();
    let mut twists = BTreeMap::new();
    for (a, _, t) in g.entries() {
        if !t.is_identity() {
            twists.insert(format_address(a), t.portrait().map(|(x, p)| (format_address(x), p.to_vec())).collect());
        }
    }
    let file = ElementFile {
        format: ELEMENT_FORMAT.into(),
        d: shape.d,
        k: shape.k,
        a: g.domain_leaves().map(|a| format_address(a)).collect(),
        b: g.range_leaves().iter().map(|b| format_address(b)).collect(),
        phi: g.entries().map(|(a, b, _)| [format_address(a), format_address(b)]).collect(),
        twists,
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn element_from_json(text: &str) -> Result<AlmostAutomorphism> {
    let f: ElementFile = serde_json::from_str(text).context("malformed almost automorphism")?;
    ensure!(f.format == ELEMENT_FORMAT, "unsupported element format {:?}", f.format);
    let shape = TreeShape::new(f.d, f.k)?;
    let mut phi = BTreeMap::new();
    for [a, b] in &f.phi {
        if phi.insert(a.clone(), b.clone()).is_some() {
            bail!("leaf {a:?} appears twice in phi");
        }
    }
    let mut domain: Vec<&String> = phi.keys().collect();
    let mut a_list: Vec<&String> = f.a.iter().collect();
    domain.sort();
    a_list.sort();
    ensure!(domain == a_list, "phi is not defined exactly on the leaves of A");
    let mut range: Vec<&String> = phi.values().collect();
    let mut b_list: Vec<&String> = f.b.iter().collect();
    range.sort();
    b_list.sort();
    ensure!(range == b_list, "phi does not map onto the leaves of B");
    for leaf in f.twists.keys() {
        ensure!(phi.contains_key(leaf), "twist at {leaf:?}, which is not a leaf of A");
    }
    let mut entries = Vec::with_capacity(phi.len());
    for (a, b) in &phi {
        let portrait = f
            .twists
            .get(a)
            .map(|list| {
                list.iter()
                    .map(|(x, p)| Ok((parse_address(x)?, Permutation::from_images(p)?)))
                    .collect::<hecke_core::Result<Vec<_>>>()
            })
            .transpose()?
            .unwrap_or_default();
        entries.push((parse_address(a)?, parse_address(b)?, FinitaryAutomorphism::from_portrait(shape.d, portrait)?));
    }
    Ok(AlmostAutomorphism::new(shape, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f17_round_trips() {
        for x in [0.0, -0.0, 1.0, 0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let text = serde_json::to_string(&F17(x)).unwrap();
            let digits = text.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{text}");
            let back: F17 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits(), "{text}");
        }
        assert!(serde_json::to_string(&F17(f64::NAN)).is_err());
    }

    #[test]
    fn element_round_trips() {
        let shape = TreeShape::new(2, 3).unwrap();
        let t = FinitaryAutomorphism::from_portrait(2, [(vec![1], Permutation::from_images(&[1, 0]).unwrap())]).unwrap();
        let g = AlmostAutomorphism::new(
            shape,
            [
                (vec![0], vec![2, 1], t.clone()),
                (vec![1], vec![0], FinitaryAutomorphism::identity(2)),
                (vec![2, 0], vec![1], t),
                (vec![2, 1], vec![2, 0], FinitaryAutomorphism::identity(2)),
            ],
        )
        .unwrap();
        let text = element_to_json(&g).unwrap();
        assert_eq!(element_from_json(&text).unwrap(), g);
    }

    #[test]
    fn element_rejects_inconsistent_lists() {
        let text = r#"{"format":"hecke.almost-automorphism.v1","d":2,"k":2,"A":["0","1"],"B":["0","1"],"phi":[["0","1"],["1","1"]]}"#;
        assert!(element_from_json(text).is_err());
        let text = r#"{"format":"hecke.almost-automorphism.v1","d":2,"k":2,"A":["0","1"],"B":["0","1"],"phi":[["0","1"],["1","0"]],"twists":{"0.1":[["",[1,0]]]}}"#;
        assert!(element_from_json(text).is_err());
        let ok = r#"{"format":"hecke.almost-automorphism.v1","d":2,"k":2,"A":["0","1"],"B":["0","1"],"phi":[["0","1"],["1","0"]],"twists":{"0":[["",[1,0]]]}}"#;
        assert!(element_from_json(ok).is_ok());
    }
}
