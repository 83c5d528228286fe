//! Almost automorphisms of `T_{d,k}` with finitary twists.
//!
//! An element is stored as a map from the leaves of a complete finite
//! subtree `A` to pairs `(φ(a), t_a)`: the image leaf in another complete
//! subtree `B` and a finitary automorphism of the `T_{d,d}` hanging below
//! `a`. The vertex `a·x` is sent to `φ(a)·t_a(x)`.
//!
//! Both trees always contain the root and its `k` children, so every leaf
//! has a copy of `T_{d,d}` below it. Under this convention `O^{(0)}` and
//! `O^{(1)}` both equal `K = Aut(T_{d,k})`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cosets::DoubleCosetTable;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::PermGroup;
use crate::treefam::{ball_aut_group, Address, TreeShape, LEVEL_CAP};

/// Dotted decimal form of an address; the root is the empty string.
pub fn format_address(address: &[u8]) -> String {
    let parts: Vec<String> = address.iter().map(|c| format!("{c}")).collect();
    parts.join(".")
}

pub fn parse_address(text: &str) -> Result<Address> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split('.')
        .map(|p| p.parse::<u8>().map_err(|_| Error::InvalidTree(format!("bad address {text:?}"))))
        .collect()
}

/// Automorphism of `T_{d,d}` given by its portrait: the local permutation of
/// the children at each vertex, with only finitely many nontrivial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitaryAutomorphism {
    d: usize,
    portrait: BTreeMap<Address, Permutation>,
}

impl FinitaryAutomorphism {
    pub fn identity(d: usize) -> Self {
        Self {
            d,
            portrait: BTreeMap::new(),
        }
    }

    pub fn from_portrait(d: usize, entries: impl IntoIterator<Item = (Address, Permutation)>) -> Result<Self> {
        let mut portrait = BTreeMap::new();
        for (address, p) in entries {
            if p.degree() != d {
                return Err(Error::DomainMismatch {
                    expected: d,
                    found: p.degree(),
                });
            }
            if address.iter().any(|&c| c as usize >= d) {
                return Err(Error::InvalidTree(format!("address {} leaves T_{{{d},{d}}}", format_address(&address))));
            }
            if portrait.insert(address.clone(), p).is_some() {
                return Err(Error::InvalidTree(format!("repeated portrait vertex {}", format_address(&address))));
            }
        }
        portrait.retain(|_, p| !p.is_identity());
        Ok(Self { d, portrait })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        self.portrait.is_empty()
    }

    /// Nontrivial portrait entries in address order.
    pub fn portrait(&self) -> impl Iterator<Item = (&Address, &Permutation)> {
        self.portrait.iter()
    }

    pub fn local(&self, vertex: &[u8]) -> Option<&Permutation> {
        self.portrait.get(vertex)
    }

    fn local_apply(&self, vertex: &[u8], c: u8) -> u8 {
        self.portrait.get(vertex).map_or(c, |p| p.apply(c as usize) as u8)
    }

    pub fn apply(&self, address: &[u8]) -> Address {
        (0..address.len()).map(|i| self.local_apply(&address[..i], address[i])).collect()
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Self {
        let other_inv = other.inverse();
        let mut vertices: BTreeSet<Address> = other.portrait.keys().cloned().collect();
        vertices.extend(self.portrait.keys().map(|y| other_inv.apply(y)));
        let id = Permutation::identity(self.d);
        let mut portrait = BTreeMap::new();
        for x in vertices {
            let inner = other.portrait.get(&x).unwrap_or(&id);
            let outer = self.portrait.get(&other.apply(&x)).unwrap_or(&id);
            let p = outer.compose(inner);
            if !p.is_identity() {
                portrait.insert(x, p);
            }
        }
        Self { d: self.d, portrait }
    }

    pub fn inverse(&self) -> Self {
        Self {
            d: self.d,
            portrait: self.portrait.iter().map(|(x, p)| (self.apply(x), p.inverse())).collect(),
        }
    }

    /// The automorphism induced below child `c` of the root.
    pub fn restrict(&self, c: u8) -> Self {
        Self {
            d: self.d,
            portrait: self
                .portrait
                .iter()
                .filter(|(x, _)| x.first() == Some(&c))
                .map(|(x, p)| (x[1..].to_vec(), p.clone()))
                .collect(),
        }
    }

    /// Root permutation `top` with `below[c]` acting under child `c`.
    pub fn graft(top: &Permutation, below: &[Self]) -> Self {
        let d = top.degree();
        let mut portrait = BTreeMap::new();
        if !top.is_identity() {
            portrait.insert(Vec::new(), top.clone());
        }
        for (c, t) in below.iter().enumerate() {
            for (x, p) in &t.portrait {
                let mut a = Vec::with_capacity(x.len() + 1);
                a.push(c as u8);
                a.extend_from_slice(x);
                portrait.insert(a, p.clone());
            }
        }
        Self { d, portrait }
    }

    /// Random portrait supported on vertices of depth `< depth`.
    pub fn random<R: Rng + ?Sized>(d: usize, depth: usize, rng: &mut R) -> Self {
        let shape = TreeShape { d, k: d };
        let mut portrait = BTreeMap::new();
        for level in 0..depth {
            for i in 0..shape.level_size(level) as usize {
                if rng.gen_bool(0.5) {
                    let mut images: Vec<usize> = (0..d).collect();
                    images.shuffle(rng);
                    let p = Permutation::from_images(&images).expect("shuffle is a bijection");
                    if !p.is_identity() {
                        portrait.insert(shape.address_at(level, i), p);
                    }
                }
            }
        }
        Self { d, portrait }
    }
}

/// A representative `(A, B, φ, twists)` of an element of the Neretin group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlmostAutomorphism {
    shape: TreeShape,
    map: BTreeMap<Address, (Address, FinitaryAutomorphism)>,
}

/// Checks that `leaves` are the leaves of a complete subtree containing `B_1`.
fn check_leaf_set(shape: TreeShape, leaves: &BTreeSet<Address>) -> Result<()> {
    for a in leaves {
        if a.is_empty() || !shape.is_valid_address(a) {
            return Err(Error::InvalidTree(format!("invalid leaf {:?}", format_address(a))));
        }
    }
    let max_depth = leaves.iter().map(Vec::len).max().unwrap_or(0);
    let mut reached = 0usize;
    let mut stack = alloc::vec![Vec::<u8>::new()];
    while let Some(v) = stack.pop() {
        if leaves.contains(&v) {
            reached += 1;
            continue;
        }
        if v.len() >= max_depth {
            return Err(Error::InvalidTree(format!("vertex {:?} is not covered by a leaf", format_address(&v))));
        }
        for c in 0..shape.children(v.len()) {
            let mut w = v.clone();
            w.push(c as u8);
            stack.push(w);
        }
    }
    if reached != leaves.len() {
        return Err(Error::InvalidTree("leaf set is not an antichain".into()));
    }
    Ok(())
}

fn child(v: &[u8], c: usize) -> Address {
    let mut w = v.to_vec();
    w.push(c as u8);
    w
}

impl AlmostAutomorphism {
    pub fn new(shape: TreeShape, entries: impl IntoIterator<Item = (Address, Address, FinitaryAutomorphism)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, b, t) in entries {
            if t.degree() != shape.d {
                return Err(Error::DomainMismatch {
                    expected: shape.d,
                    found: t.degree(),
                });
            }
            if map.insert(a.clone(), (b, t)).is_some() {
                return Err(Error::InvalidTree(format!("leaf {:?} mapped twice", format_address(&a))));
            }
        }
        let domain: BTreeSet<Address> = map.keys().cloned().collect();
        let range: BTreeSet<Address> = map.values().map(|(b, _)| b.clone()).collect();
        if range.len() != map.len() {
            return Err(Error::InvalidTree("leaf map is not injective".into()));
        }
        check_leaf_set(shape, &domain)?;
        check_leaf_set(shape, &range)?;
        Ok(Self { shape, map })
    }

    pub fn identity(shape: TreeShape) -> Self {
        let t = FinitaryAutomorphism::identity(shape.d);
        Self {
            shape,
            map: (0..shape.k).map(|c| (alloc::vec![c as u8], (alloc::vec![c as u8], t.clone()))).collect(),
        }
    }

    /// `A = B = B_n`, level-`n` vertex `i` sent to vertex `σ(i)` with twist `twists[i]`.
    pub fn from_level_data(shape: TreeShape, n: usize, sigma: &Permutation, twists: Vec<FinitaryAutomorphism>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("level data starts at n = 1".into()));
        }
        let leaves = shape.level_addresses(n)?;
        if sigma.degree() != leaves.len() || twists.len() != leaves.len() {
            return Err(Error::DomainMismatch {
                expected: leaves.len(),
                found: sigma.degree(),
            });
        }
        Self::new(
            shape,
            twists
                .into_iter()
                .enumerate()
                .map(|(i, t)| (leaves[i].clone(), leaves[sigma.apply(i)].clone(), t)),
        )
    }

    pub fn level_permutation_element(shape: TreeShape, n: usize, sigma: &Permutation) -> Result<Self> {
        Self::from_level_data(shape, n, sigma, alloc::vec![FinitaryAutomorphism::identity(shape.d); sigma.degree()])
    }

    /// Random element of `K`: a root permutation with random twists of depth `< depth`.
    pub fn random_in_k<R: Rng + ?Sized>(shape: TreeShape, depth: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..shape.k).collect();
        images.shuffle(rng);
        let sigma = Permutation::from_images(&images).expect("shuffle is a bijection");
        let twists = (0..shape.k).map(|_| FinitaryAutomorphism::random(shape.d, depth, rng)).collect();
        Self::from_level_data(shape, 1, &sigma, twists).expect("level-1 data is valid")
    }

    /// Random element whose trees come from `expansions` random leaf splits of `B_1`.
    pub fn random<R: Rng + ?Sized>(shape: TreeShape, expansions: usize, twist_depth: usize, rng: &mut R) -> Self {
        let grow = |rng: &mut R| {
            let mut leaves: Vec<Address> = (0..shape.k).map(|c| alloc::vec![c as u8]).collect();
            for _ in 0..expansions {
                let v = leaves.swap_remove(rng.gen_range(0..leaves.len()));
                leaves.extend((0..shape.d).map(|c| child(&v, c)));
            }
            leaves.sort();
            leaves
        };
        let domain = grow(rng);
        let mut range = grow(rng);
        range.shuffle(rng);
        let map = domain
            .into_iter()
            .zip(range)
            .map(|(a, b)| (a, (b, FinitaryAutomorphism::random(shape.d, twist_depth, rng))))
            .collect();
        Self { shape, map }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    /// `(a, φ(a), t_a)` for every leaf `a` of `A`, in address order.
    pub fn entries(&self) -> impl Iterator<Item = (&Address, &Address, &FinitaryAutomorphism)> {
        self.map.iter().map(|(a, (b, t))| (a, b, t))
    }

    pub fn domain_leaves(&self) -> impl Iterator<Item = &Address> {
        self.map.keys()
    }

    pub fn range_leaves(&self) -> BTreeSet<Address> {
        self.map.values().map(|(b, _)| b.clone()).collect()
    }

    /// Image of a vertex at or below a leaf of `A`.
    pub fn apply(&self, address: &[u8]) -> Option<Address> {
        let i = (1..=address.len()).find(|&i| self.map.contains_key(&address[..i]))?;
        let (b, t) = &self.map[&address[..i]];
        let mut out = b.clone();
        out.extend(t.apply(&address[i..]));
        Some(out)
    }

    fn expand(&mut self, leaf: &[u8]) {
        let (b, t) = self.map.remove(leaf).expect("expanding a leaf");
        let id = Permutation::identity(self.shape.d);
        let top = t.local(&[]).unwrap_or(&id).clone();
        for c in 0..self.shape.d {
            self.map.insert(child(leaf, c), (child(&b, top.apply(c)), t.restrict(c as u8)));
        }
    }

    /// Splits leaves of `A` until `address` is a vertex of `A`.
    pub fn refine(&mut self, address: &[u8]) {
        while let Some(i) = (1..address.len()).find(|&i| self.map.contains_key(&address[..i])) {
            self.expand(&address[..i].to_vec());
        }
    }

    /// Splits leaves of `A` until `address` is a vertex of `B`.
    fn refine_range(&mut self, address: &[u8]) {
        loop {
            let preimage = self
                .map
                .iter()
                .find(|(_, (b, _))| b.len() < address.len() && address.starts_with(b))
                .map(|(a, _)| a.clone());
            match preimage {
                Some(a) => self.expand(&a),
                None => return,
            }
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        let mut g = self.clone();
        let mut h = other.clone();
        for b in h.range_leaves() {
            g.refine(&b);
        }
        let domain: Vec<Address> = g.map.keys().cloned().collect();
        for a in &domain {
            h.refine_range(a);
        }
        let map = h
            .map
            .into_iter()
            .map(|(a, (b, th))| {
                let (c, tg) = &g.map[&b];
                (a, (c.clone(), tg.compose(&th)))
            })
            .collect();
        Ok(Self { shape: self.shape, map })
    }

    pub fn inverse(&self) -> Self {
        Self {
            shape: self.shape,
            map: self.map.iter().map(|(a, (b, t))| (b.clone(), (a.clone(), t.inverse()))).collect(),
        }
    }

    /// If the `d` children of `v` are leaves of `A` sent onto the children
    /// of a single vertex `w`, the merged entry `v ↦ w`.
    fn mergeable(&self, v: &[u8]) -> Option<(Address, FinitaryAutomorphism)> {
        let d = self.shape.d;
        let mut images = Vec::with_capacity(d);
        let mut twists = Vec::with_capacity(d);
        let mut parent: Option<&[u8]> = None;
        for c in 0..d {
            let (b, t) = self.map.get(&child(v, c))?;
            if b.len() < 2 {
                return None;
            }
            let (w, last) = b.split_at(b.len() - 1);
            if parent.map_or(false, |p| p != w) {
                return None;
            }
            parent = Some(w);
            images.push(last[0] as usize);
            twists.push(t.clone());
        }
        let top = Permutation::from_images(&images).ok()?;
        Some((parent?.to_vec(), FinitaryAutomorphism::graft(&top, &twists)))
    }

    /// The representative with the smallest domain tree.
    ///
    /// Sibling leaves are merged deepest first, ties broken by address.
    pub fn canonical_form(&self) -> Self {
        let mut g = self.clone();
        loop {
            let mut parents: Vec<Address> = g
                .map
                .keys()
                .filter(|a| a.len() >= 2)
                .map(|a| a[..a.len() - 1].to_vec())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            parents.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
            let Some((v, (w, t))) = parents.into_iter().find_map(|v| g.mergeable(&v).map(|m| (v, m))) else {
                return g;
            };
            for c in 0..g.shape.d {
                g.map.remove(&child(&v, c));
            }
            g.map.insert(v, (w, t));
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical_form()
    }

    pub fn is_identity(&self) -> bool {
        self.canonical_form() == Self::identity(self.shape)
    }

    /// `None` when the element lies in `O^{(n)}`, otherwise a leaf of the
    /// canonical domain tree that obstructs it.
    pub fn level_obstruction(&self, n: usize) -> Option<Address> {
        let n = n.max(1);
        let mut g = self.canonical_form();
        if let Some(a) = g.map.keys().find(|a| a.len() > n) {
            return Some(a.clone());
        }
        let canonical: Vec<Address> = g.map.keys().cloned().collect();
        g.refine_all_below(&[], n);
        let (bad, _) = g.map.iter().find(|(_, (b, _))| b.len() != n)?;
        canonical.into_iter().find(|c| bad.starts_with(c))
    }

    fn refine_all_below(&mut self, root: &[u8], n: usize) {
        loop {
            let next = self
                .map
                .keys()
                .find(|a| a.starts_with(root) && a.len() < n)
                .cloned();
            match next {
                Some(a) => self.expand(&a),
                None => return,
            }
        }
    }

    pub fn is_in_level_subgroup(&self, n: usize) -> bool {
        self.level_obstruction(n).is_none()
    }

    /// Smallest `n ≤ n_max` with the element in `O^{(n)}`.
    pub fn minimal_level(&self, n_max: usize) -> Result<usize> {
        let mut last = None;
        for n in 0..=n_max {
            match self.level_obstruction(n) {
                None => return Ok(n),
                Some(a) => last = Some(a),
            }
        }
        Err(level_error(n_max, last.expect("n_max + 1 levels tried")))
    }

    /// The permutation of `V_n` induced by an element of `O^{(n)}`.
    ///
    /// For `n = 0` this is the trivial permutation of the root.
    pub fn level_permutation(&self, n: usize) -> Result<Permutation> {
        if let Some(a) = self.level_obstruction(n) {
            return Err(level_error(n, a));
        }
        if n == 0 {
            return Ok(Permutation::identity(1));
        }
        let size = self.shape.level_size(n);
        if size > LEVEL_CAP as u64 {
            return Err(Error::Scale {
                what: "level size",
                value: size as u128,
                cap: LEVEL_CAP as u128,
            });
        }
        let mut g = self.clone();
        g.refine_all_below(&[], n);
        let mut images = alloc::vec![0usize; size as usize];
        for (a, (b, _)) in &g.map {
            let i = self.shape.address_index(a).expect("valid address");
            images[i] = self.shape.address_index(b).expect("valid address");
        }
        Permutation::from_images(&images)
    }

    /// Canonical representative of `P_n σ P_n` for the level-`n` permutation `σ`.
    pub fn double_coset_key(&self, n: usize) -> Result<Permutation> {
        let sigma = self.level_permutation(n)?;
        if n == 0 {
            return Ok(sigma);
        }
        let p_n: PermGroup = ball_aut_group(self.shape, n)?;
        p_n.min_in_double_coset(&p_n, &sigma)
    }

    /// As [`Self::double_coset_key`], read off a prebuilt `(S_{|V_n|}, P_n)` table.
    pub fn double_coset_key_in(&self, n: usize, table: &DoubleCosetTable) -> Result<Permutation> {
        let sigma = self.level_permutation(n)?;
        table
            .canonical_rep(&sigma)
            .cloned()
            .ok_or_else(|| Error::InvalidTable("level permutation outside the table's group".into()))
    }
}

fn level_error(level: usize, witness: Address) -> Error {
    Error::Level {
        level,
        reason: format!("vertex {:?} is not mapped rigidly from level {level}", format_address(&witness)),
    }
}
