//! Right cosets `H\G`, double cosets `H\G/H`, and the index `R(x)`.
//!
//! `R(x) = [H : H ∩ x⁻¹Hx]`, which equals the number of right cosets `Hy`
//! contained in `HxH`. Double cosets are found as orbits of `H` acting by
//! right multiplication on the right-coset index rather than on raw elements.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::PermGroup;

/// Right-coset indices above this are refused.
pub const COSET_CAP: usize = 100_000;

/// Indexing of `H\G`.
#[derive(Clone, Debug)]
pub struct RightCosetIndex {
    reps: Vec<Permutation>,
    keys: BTreeMap<Permutation, usize>,
}

/// Complete invariant of the right coset `Hx`: the least element of `x⁻¹H`.
fn coset_key(subgroup: &PermGroup, x: &Permutation) -> Permutation {
    subgroup.min_in_left_coset(&x.inverse())
}

fn check_subgroup(group: &PermGroup, subgroup: &PermGroup) -> Result<()> {
    if group.degree() != subgroup.degree() {
        return Err(Error::DomainMismatch {
            expected: group.degree(),
            found: subgroup.degree(),
        });
    }
    if !subgroup.is_subgroup_of(group) {
        return Err(Error::NotSubgroup);
    }
    Ok(())
}

impl RightCosetIndex {
    /// Enumerates `H\G` breadth-first from `H` along the generators of `G`.
    ///
    /// Index 0 is `H` itself with the identity as representative. Each
    /// representative is the inverse of its coset key.
    pub fn new(group: &PermGroup, subgroup: &PermGroup) -> Result<Self> {
        check_subgroup(group, subgroup)?;
        let index = group.order() / subgroup.order();
        if index > num_bigint::BigUint::from(COSET_CAP) {
            return Err(Error::Scale {
                what: "right-coset index",
                value: u128::try_from(&index).unwrap_or(u128::MAX),
                cap: COSET_CAP as u128,
            });
        }
        let mut reps = alloc::vec![Permutation::identity(group.degree())];
        let mut keys = BTreeMap::new();
        keys.insert(Permutation::identity(group.degree()), 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in group.generators() {
                let key = coset_key(subgroup, &reps[i].compose(g));
                if keys.contains_key(&key) {
                    continue;
                }
                if reps.len() == COSET_CAP {
                    return Err(Error::Scale {
                        what: "right-coset index",
                        value: (COSET_CAP + 1) as u128,
                        cap: COSET_CAP as u128,
                    });
                }
                keys.insert(key.clone(), reps.len());
                queue.push_back(reps.len());
                reps.push(key.inverse());
            }
        }
        Ok(Self { reps, keys })
    }

    fn from_reps(subgroup: &PermGroup, reps: Vec<Permutation>) -> Result<Self> {
        let mut keys = BTreeMap::new();
        for (i, r) in reps.iter().enumerate() {
            let key = coset_key(subgroup, r);
            if key.inverse() != *r {
                return Err(Error::InvalidTable(format!("coset representative {i} is not canonical")));
            }
            if keys.insert(key, i).is_some() {
                return Err(Error::InvalidTable(format!("coset {i} listed twice")));
            }
        }
        if reps.first().map_or(true, |r| !r.is_identity()) {
            return Err(Error::InvalidTable("coset 0 must be the subgroup".into()));
        }
        Ok(Self { reps, keys })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Permutation] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Permutation {
        &self.reps[i]
    }

    /// Index of the coset `Hx`; `None` if `x` lies outside `G`.
    pub fn index_of(&self, subgroup: &PermGroup, x: &Permutation) -> Option<usize> {
        self.keys.get(&coset_key(subgroup, x)).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetEntry {
    /// Lexicographically least element of the double coset.
    pub rep: Permutation,
    /// Number of group elements, `|H| * r_index`.
    pub size: u128,
    /// Right cosets contained in this double coset, ascending.
    pub right_cosets: Vec<usize>,
    pub r_index: usize,
    pub r_index_inv: usize,
}

/// `H\G/H` with canonical representatives, sizes, contents and R-indices.
///
/// Entries are sorted by representative, so entry 0 is always `H` itself.
#[derive(Clone, Debug)]
pub struct DoubleCosetTable {
    group: PermGroup,
    subgroup: PermGroup,
    cosets: RightCosetIndex,
    entries: Vec<DoubleCosetEntry>,
    coset_to_entry: Vec<usize>,
    inverse_entry: Vec<usize>,
}

impl DoubleCosetTable {
    pub fn new(group: &PermGroup, subgroup: &PermGroup) -> Result<Self> {
        let cosets = RightCosetIndex::new(group, subgroup)?;
        let n = cosets.len();
        let mut orbit_of = alloc::vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            orbit_of[start] = id;
            let mut members = alloc::vec![start];
            let mut cursor = 0;
            while cursor < members.len() {
                let x = cosets.rep(members[cursor]).clone();
                cursor += 1;
                for h in subgroup.generators() {
                    let j = cosets
                        .index_of(subgroup, &x.compose(h))
                        .expect("right translate stays in G");
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        members.push(j);
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }
        let mut blocks = Vec::with_capacity(orbits.len());
        for members in orbits {
            let rep = subgroup.min_in_double_coset(subgroup, cosets.rep(members[0]))?;
            blocks.push((rep, members));
        }
        Self::assemble(group, subgroup, cosets, blocks)
    }

    /// Rebuilds a table from stored representatives, validating every claim
    /// that is cheap to check (canonical reps, partition, `H`-closure, minima).
    pub fn from_parts(
        group: &PermGroup,
        subgroup: &PermGroup,
        coset_reps: Vec<Permutation>,
        blocks: Vec<(Permutation, Vec<usize>)>,
    ) -> Result<Self> {
        check_subgroup(group, subgroup)?;
        for r in &coset_reps {
            if !group.contains(r) {
                return Err(Error::InvalidTable("coset representative outside G".into()));
            }
        }
        let cosets = RightCosetIndex::from_reps(subgroup, coset_reps)?;
        let expected = group.order() / subgroup.order();
        if num_bigint::BigUint::from(cosets.len()) != expected {
            return Err(Error::InvalidTable(format!(
                "{} cosets listed, index is {expected}",
                cosets.len()
            )));
        }
        let mut owner = alloc::vec![usize::MAX; cosets.len()];
        for (b, (_, members)) in blocks.iter().enumerate() {
            for &c in members {
                if c >= owner.len() || owner[c] != usize::MAX {
                    return Err(Error::InvalidTable(format!("coset {c} misassigned")));
                }
                owner[c] = b;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidTable("double cosets do not cover H\\G".into()));
        }
        for (b, (rep, members)) in blocks.iter().enumerate() {
            for &c in members {
                for h in subgroup.generators() {
                    let j = cosets.index_of(subgroup, &cosets.rep(c).compose(h));
                    if j.map(|j| owner[j]) != Some(b) {
                        return Err(Error::InvalidTable(format!("double coset {b} not H-closed")));
                    }
                }
            }
            if cosets.index_of(subgroup, rep).map(|j| owner[j]) != Some(b) {
                return Err(Error::InvalidTable(format!("representative of {b} misplaced")));
            }
            if subgroup.min_in_double_coset(subgroup, rep)? != *rep {
                return Err(Error::InvalidTable(format!("representative of {b} not minimal")));
            }
        }
        Self::assemble(group, subgroup, cosets, blocks)
    }

    fn assemble(
        group: &PermGroup,
        subgroup: &PermGroup,
        cosets: RightCosetIndex,
        mut blocks: Vec<(Permutation, Vec<usize>)>,
    ) -> Result<Self> {
        blocks.sort_by(|a, b| a.0.cmp(&b.0));
        let h_order = u128::try_from(subgroup.order()).map_err(|_| Error::Scale {
            what: "subgroup order",
            value: u128::MAX,
            cap: u128::MAX,
        })?;
        let mut coset_to_entry = alloc::vec![0usize; cosets.len()];
        for (b, (_, members)) in blocks.iter().enumerate() {
            for &c in members {
                coset_to_entry[c] = b;
            }
        }
        let inverse_entry: Vec<usize> = blocks
            .iter()
            .map(|(rep, _)| {
                let c = cosets
                    .index_of(subgroup, &rep.inverse())
                    .expect("inverse lies in G");
                coset_to_entry[c]
            })
            .collect();
        let entries: Vec<DoubleCosetEntry> = blocks
            .iter()
            .enumerate()
            .map(|(b, (rep, members))| DoubleCosetEntry {
                rep: rep.clone(),
                size: h_order * members.len() as u128,
                right_cosets: members.clone(),
                r_index: members.len(),
                r_index_inv: blocks[inverse_entry[b]].1.len(),
            })
            .collect();
        Ok(Self {
            group: group.clone(),
            subgroup: subgroup.clone(),
            cosets,
            entries,
            coset_to_entry,
            inverse_entry,
        })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &PermGroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &RightCosetIndex {
        &self.cosets
    }

    pub fn entries(&self) -> &[DoubleCosetEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// Double coset containing the right coset with index `coset`.
    #[inline]
    pub fn entry_of_coset(&self, coset: usize) -> usize {
        self.coset_to_entry[coset]
    }

    /// Double coset of `D⁻¹` for entry `D`.
    #[inline]
    pub fn inverse_entry(&self, entry: usize) -> usize {
        self.inverse_entry[entry]
    }

    pub fn coset_of(&self, x: &Permutation) -> Option<usize> {
        self.cosets.index_of(&self.subgroup, x)
    }

    pub fn entry_of(&self, x: &Permutation) -> Option<usize> {
        self.coset_of(x).map(|c| self.coset_to_entry[c])
    }

    /// Canonical (least) representative of `HxH`.
    pub fn canonical_rep(&self, x: &Permutation) -> Option<&Permutation> {
        self.entry_of(x).map(|e| &self.entries[e].rep)
    }

    /// Whether `R(rep) = R(rep⁻¹)` for every double coset.
    pub fn is_unimodular(&self) -> bool {
        self.entries.iter().all(|e| e.r_index == e.r_index_inv)
    }
}

/// `R(x) = [H : H ∩ x⁻¹Hx]`, computed from the definition by enumerating `H`.
pub fn r_index(x: &Permutation, subgroup: &PermGroup) -> Result<usize> {
    if x.degree() != subgroup.degree() {
        return Err(Error::DomainMismatch {
            expected: subgroup.degree(),
            found: x.degree(),
        });
    }
    let elements = subgroup.elements()?;
    let x_inv = x.inverse();
    let common = elements
        .iter()
        .filter(|h| subgroup.contains(&x.compose(h).compose(&x_inv)))
        .count();
    Ok(elements.len() / common)
}
