//! The rooted trees `T_{d,k}` and the finite permutation groups they induce
//! on their level sets.
//!
//! Vertices are addressed by words: the root is the empty word and a level-n
//! vertex is `c_1 c_2 .. c_n` with `c_1 < k` and `c_i < d` for `i >= 2`.
//! Level sets are ordered lexicographically, which is also the mixed-radix
//! order, so the descendants of a vertex occupy a contiguous range of every
//! deeper level.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::PermGroup;

/// Largest level set on which groups are realized.
pub const LEVEL_CAP: usize = 64;

pub type Address = Vec<u8>;

/// Root degree `k`, every other vertex has `d` children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape {
    pub d: usize,
    pub k: usize,
}

impl TreeShape {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 || k < 2 || d > 255 || k > 255 {
            return Err(Error::InvalidTree(alloc::format!("need 2 <= d, k <= 255, got d={d}, k={k}")));
        }
        Ok(Self { d, k })
    }

    /// The tree `T_{d,d}` hanging below any non-root vertex.
    pub fn regular(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    /// Number of children of a vertex on `level`.
    #[inline]
    pub fn children(&self, level: usize) -> usize {
        if level == 0 {
            self.k
        } else {
            self.d
        }
    }

    /// `|V_n|`, saturating at `u64::MAX`.
    pub fn level_size(&self, n: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        let mut size = self.k as u64;
        for _ in 1..n {
            size = size.saturating_mul(self.d as u64);
        }
        size
    }

    fn capped_level_size(&self, n: usize) -> Result<usize> {
        let size = self.level_size(n);
        if size > LEVEL_CAP as u64 {
            return Err(Error::Scale {
                what: "level size",
                value: size as u128,
                cap: LEVEL_CAP as u128,
            });
        }
        Ok(size as usize)
    }

    /// Level-`n` addresses in lexicographic order.
    pub fn level_addresses(&self, n: usize) -> Result<Vec<Address>> {
        let size = self.capped_level_size(n)?;
        Ok((0..size).map(|i| self.address_at(n, i)).collect())
    }

    /// The `index`-th address of level `n`.
    pub fn address_at(&self, n: usize, mut index: usize) -> Address {
        let mut word = alloc::vec![0u8; n];
        for pos in (0..n).rev() {
            let radix = self.children(pos);
            word[pos] = (index % radix) as u8;
            index /= radix;
        }
        word
    }

    /// Position of `address` within its level; `None` for invalid digits.
    pub fn address_index(&self, address: &[u8]) -> Option<usize> {
        let mut index = 0usize;
        for (pos, &c) in address.iter().enumerate() {
            let radix = self.children(pos);
            if c as usize >= radix {
                return None;
            }
            index = index.checked_mul(radix)?.checked_add(c as usize)?;
        }
        Some(index)
    }

    pub fn is_valid_address(&self, address: &[u8]) -> bool {
        self.address_index(address).is_some()
    }

    /// `|P_n| = k! · (d!)^{#internal non-root vertices of B_{n-1}}`.
    pub fn ball_group_order(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::from(1u32);
        }
        let internal: u64 = (1..n).map(|j| self.level_size(j)).sum();
        let k_fact: BigUint = (1..=self.k as u32).map(BigUint::from).product();
        let d_fact: BigUint = (1..=self.d as u32).map(BigUint::from).product();
        k_fact * d_fact.pow(internal as u32)
    }
}

/// `|V_n|`: 1 at the root, `k·d^{n-1}` below it.
pub fn level_size(shape: TreeShape, n: usize) -> u64 {
    shape.level_size(n)
}

/// Swap of the subtrees below children `i` and `i+1` of the vertex with
/// index `vertex` on `level`, seen on level `n`.
fn child_swap(shape: TreeShape, level: usize, vertex: usize, i: usize, n: usize, degree: usize) -> Permutation {
    let children = shape.children(level);
    let block = shape.level_size(n) as usize / shape.level_size(level + 1) as usize;
    let first = (vertex * children + i) * block;
    let second = first + block;
    let mut images: Vec<usize> = (0..degree).collect();
    for t in 0..block {
        images.swap(first + t, second + t);
    }
    Permutation::from_images(&images).expect("block swap is a bijection")
}

/// `P_n = Aut(B_n)` acting on the ordered level set `V_n`, generated by
/// adjacent child swaps at every internal vertex of `B_{n-1}`.
pub fn ball_aut_group(shape: TreeShape, n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Ok(PermGroup::trivial(1));
    }
    let degree = shape.capped_level_size(n)?;
    let mut gens = Vec::new();
    for level in 0..n {
        for vertex in 0..shape.level_size(level) as usize {
            for i in 0..shape.children(level) - 1 {
                gens.push(child_swap(shape, level, vertex, i, n, degree));
            }
        }
    }
    PermGroup::new(degree, gens)
}

/// `Q_l`: the image of `Aut(T_{d,d})` on its level `l`, a subgroup of `S_{d^l}`.
pub fn q_group(d: usize, depth: usize) -> Result<PermGroup> {
    ball_aut_group(TreeShape::regular(d)?, depth)
}

/// Which level group to realize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelGroupSpec {
    /// `P_n(d, k)` on `V_n`.
    Ball { shape: TreeShape, level: usize },
    /// `Q_l(d)` on `W_l`.
    Depth { d: usize, depth: usize },
}

impl LevelGroupSpec {
    pub fn realize(&self) -> Result<PermGroup> {
        match *self {
            Self::Ball { shape, level } => ball_aut_group(shape, level),
            Self::Depth { d, depth } => q_group(d, depth),
        }
    }

    pub fn expected_order(&self) -> Result<BigUint> {
        Ok(match *self {
            Self::Ball { shape, level } => shape.ball_group_order(level),
            Self::Depth { d, depth } => TreeShape::regular(d)?.ball_group_order(depth),
        })
    }
}

/// Projects a permutation of `V_{n+1}` to `V_n` through parents; `None` if
/// the permutation does not respect the parent partition.
pub fn restrict_to_level(shape: TreeShape, n: usize, sigma: &Permutation) -> Option<Permutation> {
    let children = shape.children(n);
    let size = shape.level_size(n) as usize;
    if sigma.degree() != size * children {
        return None;
    }
    let mut images = alloc::vec![usize::MAX; size];
    for i in 0..sigma.degree() {
        let (p, q) = (i / children, sigma.apply(i) / children);
        if images[p] == usize::MAX {
            images[p] = q;
        } else if images[p] != q {
            return None;
        }
    }
    Permutation::from_images(&images).ok()
}

/// The block structure of `S_{d^l}^{|V_n|} ⋊ S_{|V_n|}` inside `S_{|V_{n+l}|}`.
///
/// Block `i` holds the level-`(n+l)` vertices below the `i`-th level-`n`
/// vertex; it is the contiguous range `i·d^l .. (i+1)·d^l`.
#[derive(Clone, Debug)]
pub struct WreathEmbedding {
    pub shape: TreeShape,
    pub n: usize,
    pub depth: usize,
    pub blocks: usize,
    pub block_size: usize,
}

/// Result of comparing `⟨Q_l^{|V_n|}, P_n⟩` with `P_{n+l}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathCheck {
    pub generated_order: BigUint,
    pub target_order: BigUint,
    pub generated_in_target: bool,
    pub target_in_generated: bool,
}

impl WreathCheck {
    pub fn holds(&self) -> bool {
        self.generated_in_target && self.target_in_generated && self.generated_order == self.target_order
    }
}

impl WreathEmbedding {
    pub fn degree(&self) -> usize {
        self.blocks * self.block_size
    }

    fn lift_within(&self, block: usize, g: &Permutation) -> Permutation {
        g.shifted(block * self.block_size, self.degree())
    }

    /// Rigid lift of a permutation of blocks.
    pub fn lift_block_permutation(&self, sigma: &Permutation) -> Permutation {
        let mut images = alloc::vec![0usize; self.degree()];
        for b in 0..self.blocks {
            for t in 0..self.block_size {
                images[b * self.block_size + t] = sigma.apply(b) * self.block_size + t;
            }
        }
        Permutation::from_images(&images).expect("rigid block map is a bijection")
    }

    /// Generators of the `block`-th copy of `S_{d^l}`.
    pub fn block_symmetric_gens(&self, block: usize) -> Vec<Permutation> {
        PermGroup::symmetric(self.block_size)
            .generators()
            .iter()
            .map(|g| self.lift_within(block, g))
            .collect()
    }

    /// Generators of the `block`-th copy of `Q_l`.
    pub fn block_q_gens(&self, block: usize) -> Result<Vec<Permutation>> {
        Ok(q_group(self.shape.d, self.depth)?
            .generators()
            .iter()
            .map(|g| self.lift_within(block, g))
            .collect())
    }

    /// Generators of the top copy of `S_{|V_n|}`.
    pub fn top_symmetric_gens(&self) -> Vec<Permutation> {
        PermGroup::symmetric(self.blocks)
            .generators()
            .iter()
            .map(|g| self.lift_block_permutation(g))
            .collect()
    }

    /// `S_{d^l}^{|V_n|}`.
    pub fn block_product(&self) -> Result<PermGroup> {
        let gens = (0..self.blocks).flat_map(|b| self.block_symmetric_gens(b)).collect();
        PermGroup::new(self.degree(), gens)
    }

    /// `⟨Q_l^{|V_n|}, lifted P_n⟩`.
    pub fn generated(&self) -> Result<PermGroup> {
        let mut gens = Vec::new();
        for b in 0..self.blocks {
            gens.extend(self.block_q_gens(b)?);
        }
        for g in ball_aut_group(self.shape, self.n)?.generators() {
            gens.push(self.lift_block_permutation(g));
        }
        PermGroup::new(self.degree(), gens)
    }

    pub fn verify(&self) -> Result<WreathCheck> {
        let generated = self.generated()?;
        let target = ball_aut_group(self.shape, self.n + self.depth)?;
        Ok(WreathCheck {
            generated_order: generated.order(),
            target_order: target.order(),
            generated_in_target: generated.is_subgroup_of(&target),
            target_in_generated: target.is_subgroup_of(&generated),
        })
    }

    /// Order of (lifted `S_{|V_n|}`) ∩ `S_{d^l}^{|V_n|}`, by enumerating the top copy.
    pub fn top_block_intersection_order(&self) -> Result<usize> {
        let blocks = self.block_product()?;
        let top = PermGroup::new(self.degree(), self.top_symmetric_gens())?;
        Ok(top.elements()?.iter().filter(|g| blocks.contains(g)).count())
    }
}

/// Embedding data for `(S_{d^l})^{|V_n|} ⋊ S_{|V_n|} ≤ S_{|V_{n+l}|}`.
pub fn wreath_embed(shape: TreeShape, depth: usize, n: usize) -> Result<WreathEmbedding> {
    if n == 0 {
        return Err(Error::InvalidTree("wreath embedding needs n >= 1".into()));
    }
    shape.capped_level_size(n + depth)?;
    Ok(WreathEmbedding {
        shape,
        n,
        depth,
        blocks: shape.level_size(n) as usize,
        block_size: TreeShape::regular(shape.d)?.level_size(depth) as usize,
    })
}
