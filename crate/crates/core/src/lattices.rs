//! Lattice sequences in block form. Every sequence here is a principal chain
//! on each block: the block-b lattice at index r is 𝔭^{⌈(r + o_b)/e⌉} for a
//! per-block offset o_b and the common period e (so every block's scale is e).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::embeddings::{ComponentId, EmbeddingClass, PartClass};
use crate::error::{Error, Invariant, Result};
use crate::field::{tensor_decompose, TensorShape};

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockLabel {
    Minus,
    Odd,
    Even,
    Component(ComponentId),
    Plus,
}

impl BlockLabel {
    /// The block paired with this one by the Hermitian form.
    pub fn partner(self) -> BlockLabel {
        match self {
            BlockLabel::Minus => BlockLabel::Plus,
            BlockLabel::Plus => BlockLabel::Minus,
            other => other,
        }
    }

    fn height(self) -> u8 {
        match self {
            BlockLabel::Minus => 0,
            BlockLabel::Plus => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Minus => f.write_str("-"),
            BlockLabel::Plus => f.write_str("+"),
            BlockLabel::Odd => f.write_str("Io"),
            BlockLabel::Even => f.write_str("Ie"),
            BlockLabel::Component(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub label: BlockLabel,
    /// Degree over F of the block's field; None on aggregate blocks.
    pub degree: Option<u32>,
    pub offset: i64,
    /// Valuation of the Hermitian form on this block (0 for the GL pair),
    /// None when no pairing data is attached.
    pub form_twist: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLatticeSequence {
    blocks: Vec<Block>,
    period: i64,
}

impl BlockLatticeSequence {
    pub fn new(blocks: Vec<Block>, period: i64) -> Result<BlockLatticeSequence> {
        if period <= 0 {
            return Err(Error::invalid(
                Invariant::PositiveDegree,
                format!("period {period}"),
            ));
        }
        Ok(BlockLatticeSequence { blocks, period })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn labels(&self) -> Vec<BlockLabel> {
        self.blocks.iter().map(|b| b.label).collect()
    }

    pub fn block(&self, label: BlockLabel) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Exponent of the block lattice at index r.
    pub fn exponent(&self, label: BlockLabel, r: i64) -> Option<i64> {
        self.block(label)
            .map(|b| ceil_div(r + b.offset, self.period))
    }

    pub fn lattice_at(&self, r: i64) -> Vec<i64> {
        self.blocks
            .iter()
            .map(|b| ceil_div(r + b.offset, self.period))
            .collect()
    }

    /// r ↦ self((r + shift)/stretch), with Λ(x) := Λ(⌈x⌉) at fractional x.
    pub fn reindex(&self, shift: i64, stretch: i64) -> BlockLatticeSequence {
        assert!(stretch > 0);
        BlockLatticeSequence {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    offset: shift + stretch * b.offset,
                    ..b.clone()
                })
                .collect(),
            period: self.period * stretch,
        }
    }

    fn concat(parts: Vec<BlockLatticeSequence>) -> BlockLatticeSequence {
        let period = parts[0].period;
        debug_assert!(parts.iter().all(|p| p.period == period));
        BlockLatticeSequence {
            blocks: parts.into_iter().flat_map(|p| p.blocks).collect(),
            period,
        }
    }

    pub fn restrict(&self, keep: impl Fn(BlockLabel) -> bool) -> BlockLatticeSequence {
        BlockLatticeSequence {
            blocks: self
                .blocks
                .iter()
                .filter(|b| keep(b.label))
                .cloned()
                .collect(),
            period: self.period,
        }
    }

    /// Splits the aggregate I_o/I_e blocks into one block per component, and
    /// gives the GL pair the degree of i∘.
    pub fn refine(
        &self,
        x: &EmbeddingClass,
        degrees: &[u32],
        i0: Option<ComponentId>,
    ) -> Result<BlockLatticeSequence> {
        let degree_of = |i: ComponentId| {
            degrees.get(i).copied().ok_or_else(|| {
                Error::invalid(
                    Invariant::ComponentMembership,
                    format!("no degree for id {i}"),
                )
            })
        };
        let mut blocks = Vec::new();
        for b in &self.blocks {
            match b.label {
                BlockLabel::Odd | BlockLabel::Even => {
                    let class = if b.label == BlockLabel::Odd {
                        PartClass::Odd
                    } else {
                        PartClass::Even
                    };
                    for &i in x.part(class) {
                        blocks.push(Block {
                            label: BlockLabel::Component(i),
                            degree: Some(degree_of(i)?),
                            ..b.clone()
                        });
                    }
                }
                BlockLabel::Minus | BlockLabel::Plus => {
                    let i0 = i0.ok_or_else(|| {
                        Error::invalid(Invariant::ComponentMembership, "GL pair without i0")
                    })?;
                    blocks.push(Block {
                        degree: Some(degree_of(i0)?),
                        ..b.clone()
                    });
                }
                BlockLabel::Component(_) => blocks.push(b.clone()),
            }
        }
        Ok(BlockLatticeSequence {
            blocks,
            period: self.period,
        })
    }

    /// The period-2 sequence 2t + j ↦ self(t·e + idx_j), j = 0, 1.
    pub fn coarsen(&self, idx0: i64, idx1: i64) -> Result<BlockLatticeSequence> {
        let e = self.period;
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let c0 = ceil_div(idx0 + b.offset, e);
            let c1 = ceil_div(idx1 + b.offset, e);
            let offset = match c1 - c0 {
                0 => 2 * c0 - 1,
                1 => 2 * c0,
                _ => {
                    return Err(Error::inconsistent(format!(
                        "coarsening ({idx0}, {idx1}) is not a lattice sequence on block {}",
                        b.label
                    )))
                }
            };
            blocks.push(Block {
                offset,
                ..b.clone()
            });
        }
        Ok(BlockLatticeSequence { blocks, period: 2 })
    }
}

pub fn direct_sum(l1: &BlockLatticeSequence, l2: &BlockLatticeSequence) -> BlockLatticeSequence {
    let e = l1.period / gcd(l1.period, l2.period) * l2.period;
    BlockLatticeSequence::concat(vec![
        l1.reindex(0, e / l1.period),
        l2.reindex(0, e / l2.period),
    ])
}

/// k ↦ Λ(1 - k)^*, the dual with respect to the attached Hermitian form.
pub fn dual(l: &BlockLatticeSequence) -> Result<BlockLatticeSequence> {
    let mut blocks = Vec::with_capacity(l.blocks.len());
    for b in &l.blocks {
        let twist = b
            .form_twist
            .ok_or_else(|| Error::invalid(Invariant::PairingData, format!("block {}", b.label)))?;
        let partner = l.block(b.label.partner()).ok_or_else(|| {
            Error::invalid(
                Invariant::PairingData,
                format!("no partner for {}", b.label),
            )
        })?;
        blocks.push(Block {
            offset: -partner.offset - l.period * twist,
            ..b.clone()
        });
    }
    Ok(BlockLatticeSequence {
        blocks,
        period: l.period,
    })
}

/// Λ(k)^* = Λ(1 - k), checked over one full period.
pub fn is_self_dual(l: &BlockLatticeSequence) -> Result<bool> {
    let d = dual(l)?;
    Ok((0..l.period).all(|k| d.lattice_at(k) == l.lattice_at(k)))
}

/// The set of lattices met by the sequence, normalized to exponent 0 on the
/// first block (the chain is stable under ϖ).
pub fn lattice_chain(l: &BlockLatticeSequence) -> BTreeSet<Vec<i64>> {
    let e = l.period;
    (-2 * e..2 * e)
        .map(|r| l.lattice_at(r))
        .filter(|t| t.first() == Some(&0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LatticeKind {
    Lambda,
    My,
    Mz,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [LatticeKind::Lambda, LatticeKind::My, LatticeKind::Mz];

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Lambda => "Lambda",
            LatticeKind::My => "My",
            LatticeKind::Mz => "Mz",
        }
    }

    pub fn parse(s: &str) -> Option<LatticeKind> {
        LatticeKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

fn class_label(c: PartClass) -> BlockLabel {
    match c {
        PartClass::Odd => BlockLabel::Odd,
        PartClass::Even => BlockLabel::Even,
    }
}

/// Λ_x normalized so that the class `near` carries the Λ(0) ⊋ Λ(1) jump
/// (form twist 0) and the other class the Λ(1) ⊋ Λ(2) jump (form twist 1).
/// With `near` = I_o this is Λ_x for the form with x_i = 1 on I_o; with
/// `near` = I_e it is Λ_x for the form rescaled by ϖ^{-1}.
pub fn build_lambda_x_normalized(near: PartClass) -> BlockLatticeSequence {
    let block = |class: PartClass| {
        let is_near = class == near;
        Block {
            label: class_label(class),
            degree: None,
            offset: if is_near { 0 } else { -1 },
            form_twist: Some(if is_near { 0 } else { 1 }),
        }
    };
    BlockLatticeSequence {
        blocks: vec![block(PartClass::Odd), block(PartClass::Even)],
        period: 2,
    }
}

pub fn build_lambda_x(_x: &EmbeddingClass) -> BlockLatticeSequence {
    build_lambda_x_normalized(PartClass::Odd)
}

/// Rank-one sequence on V_± (a copy of E_{i∘} with the near-class jump).
fn gl_line(label: BlockLabel) -> BlockLatticeSequence {
    BlockLatticeSequence {
        blocks: vec![Block {
            label,
            degree: None,
            offset: 0,
            form_twist: Some(0),
        }],
        period: 2,
    }
}

/// Λ_{i∘,x}, 𝔐^y or 𝔐^z on W = V_- ⊕ V ⊕ V_+, with aggregate I_o/I_e
/// blocks ordered (-, class of i∘, other class, +).
pub fn build_higher(
    x: &EmbeddingClass,
    i0: ComponentId,
    kind: LatticeKind,
) -> Result<BlockLatticeSequence> {
    let near = x.class_of(i0)?;
    let v = build_lambda_x_normalized(near);
    let mut v_blocks = v.blocks.clone();
    if near == PartClass::Even {
        v_blocks.reverse();
    }
    let v = BlockLatticeSequence {
        blocks: v_blocks,
        period: 2,
    };
    let lambda = BlockLatticeSequence::concat(vec![
        gl_line(BlockLabel::Minus).reindex(-1, 3),
        v.reindex(0, 3),
        gl_line(BlockLabel::Plus).reindex(1, 3),
    ]);
    match kind {
        LatticeKind::Lambda => Ok(lambda),
        LatticeKind::My | LatticeKind::Mz => {
            let want = if kind == LatticeKind::My {
                GroupFamily::U3
            } else {
                GroupFamily::U2
            };
            // the two maximal self-dual coarsenings; w = y is the one whose
            // reductive quotient carries U3
            for (a, b) in [(-2, 3), (0, 1)] {
                let m = lambda.coarsen(a, b)?;
                let fams = i0_triple_family(&m, near);
                if fams.contains(&want) {
                    return Ok(m);
                }
            }
            Err(Error::inconsistent(format!(
                "no coarsening realizes {}",
                kind.name()
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupFamily {
    U1,
    U2,
    U3,
    GL1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductiveQuotientType {
    /// (family, degree over k_F of the residue field it is defined over)
    pub factors: Vec<(GroupFamily, u32)>,
}

fn same_jump(l: &BlockLatticeSequence, a: BlockLabel, b: BlockLabel) -> bool {
    let (Some(x), Some(y)) = (l.block(a), l.block(b)) else {
        return false;
    };
    (x.offset - y.offset).rem_euclid(l.period) == 0
}

fn i0_triple_family(l: &BlockLatticeSequence, near: PartClass) -> Vec<GroupFamily> {
    let near = class_label(near);
    if same_jump(l, BlockLabel::Minus, BlockLabel::Plus) {
        if same_jump(l, BlockLabel::Minus, near) {
            vec![GroupFamily::U3]
        } else {
            vec![GroupFamily::U2, GroupFamily::U1]
        }
    } else {
        vec![GroupFamily::GL1, GroupFamily::U1]
    }
}

/// Reductive quotient of the E-centralizer of a refined sequence: the i∘
/// triple (-, i∘, +) fuses according to its jump positions, every other
/// component contributes U1.
pub fn reductive_quotient(
    l: &BlockLatticeSequence,
    i0: Option<ComponentId>,
) -> Result<ReductiveQuotientType> {
    let mut factors = Vec::new();
    let deg = |b: &Block| {
        b.degree.ok_or_else(|| {
            Error::invalid(
                Invariant::ComponentMembership,
                format!("aggregate block {}", b.label),
            )
        })
    };
    if let Some(i0) = i0 {
        let c = BlockLabel::Component(i0);
        let b0 = l.block(c).ok_or_else(|| {
            Error::invalid(Invariant::ComponentMembership, format!("no block for {i0}"))
        })?;
        let n0 = deg(b0)?;
        let pair = same_jump(l, BlockLabel::Minus, BlockLabel::Plus);
        if pair && same_jump(l, BlockLabel::Minus, c) {
            factors.push((GroupFamily::U3, n0));
        } else if pair {
            factors.push((GroupFamily::U2, n0));
            factors.push((GroupFamily::U1, n0));
        } else {
            factors.push((GroupFamily::GL1, n0));
            factors.push((GroupFamily::U1, n0));
        }
    }
    for b in &l.blocks {
        match b.label {
            BlockLabel::Component(i) if Some(i) != i0 => factors.push((GroupFamily::U1, deg(b)?)),
            BlockLabel::Odd | BlockLabel::Even => {
                return Err(Error::invalid(
                    Invariant::ComponentMembership,
                    "reductive quotient needs a refined sequence",
                ))
            }
            _ => {}
        }
    }
    Ok(ReductiveQuotientType { factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Entry {
    Value(i64),
    Bullet,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Value(v) => write!(f, "{v}"),
            Entry::Bullet => f.write_str("*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockValuationMatrix {
    pub labels: Vec<BlockLabel>,
    pub entries: Vec<Vec<Entry>>,
}

impl BlockValuationMatrix {
    pub fn get(&self, row: BlockLabel, col: BlockLabel) -> Option<Entry> {
        let r = self.labels.iter().position(|&l| l == row)?;
        let c = self.labels.iter().position(|&l| l == col)?;
        Some(self.entries[r][c])
    }

    pub fn value(&self, row: BlockLabel, col: BlockLabel) -> Option<i64> {
        match self.get(row, col)? {
            Entry::Value(v) => Some(v),
            Entry::Bullet => None,
        }
    }

    /// Rows of space-separated entries, `*` for bullets.
    pub fn to_grid(&self) -> String {
        let mut out = String::new();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Entry (J, K): least a with ϖ^a Hom(O_K, O_J) ⊆ 𝔓^r in that block.
pub fn valuation_matrix(l: &BlockLatticeSequence, r: i64) -> BlockValuationMatrix {
    let labels = l.labels();
    let entries = l
        .blocks
        .iter()
        .map(|bj| {
            l.blocks
                .iter()
                .map(|bk| Entry::Value(ceil_div(r + bj.offset - bk.offset, l.period)))
                .collect()
        })
        .collect();
    BlockValuationMatrix { labels, entries }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubgroupKind {
    H1,
    J1,
    J,
}

impl SubgroupKind {
    pub fn name(self) -> &'static str {
        match self {
            SubgroupKind::H1 => "H1",
            SubgroupKind::J1 => "J1",
            SubgroupKind::J => "J",
        }
    }

    pub fn parse(s: &str) -> Option<SubgroupKind> {
        [SubgroupKind::H1, SubgroupKind::J1, SubgroupKind::J]
            .into_iter()
            .find(|k| k.name() == s)
    }

    /// Filtration index of the subgroup outside the torus, for level d on a
    /// sequence of period e: U^{(ed/2)+} for H¹, U^{⌈ed/2⌉} for J¹ and J.
    pub fn index(self, period: i64, d: u32) -> i64 {
        let ed = period * d as i64;
        match self {
            SubgroupKind::H1 => ed.div_euclid(2) + 1,
            SubgroupKind::J1 | SubgroupKind::J => ceil_div(ed, 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    U,
    Uminus,
    M,
}

pub fn region_of(row: BlockLabel, col: BlockLabel) -> Region {
    match row.height().cmp(&col.height()) {
        std::cmp::Ordering::Less => Region::U,
        std::cmp::Ordering::Greater => Region::Uminus,
        std::cmp::Ordering::Equal => Region::M,
    }
}

fn check_level(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid(
            Invariant::PositiveLevel,
            "filtration tables need d >= 1",
        ));
    }
    Ok(())
}

/// The 4×4 table of a compact subgroup: rows and columns (-, class of i∘,
/// other class, +), bullets on the Levi blocks.
pub fn filtration_matrix(
    group: SubgroupKind,
    base: LatticeKind,
    d: u32,
    x: &EmbeddingClass,
    i0: ComponentId,
) -> Result<BlockValuationMatrix> {
    check_level(d)?;
    let l = build_higher(x, i0, base)?;
    let mut m = valuation_matrix(&l, group.index(l.period, d));
    for (r, &row) in m.labels.iter().enumerate() {
        for (c, &col) in m.labels.iter().enumerate() {
            if region_of(row, col) == Region::M {
                m.entries[r][c] = Entry::Bullet;
            }
        }
    }
    Ok(m)
}

/// A compact subgroup attached to one of the three lattices, with the
/// component degrees needed to refine it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationSpec {
    pub group: SubgroupKind,
    pub base: LatticeKind,
    pub d: u32,
    pub x: EmbeddingClass,
    pub i0: ComponentId,
    pub degrees: Vec<u32>,
}

impl FiltrationSpec {
    pub fn with(&self, group: SubgroupKind, base: LatticeKind) -> FiltrationSpec {
        FiltrationSpec {
            group,
            base,
            ..self.clone()
        }
    }

    pub fn sequence(&self) -> Result<BlockLatticeSequence> {
        build_higher(&self.x, self.i0, self.base)?.refine(&self.x, &self.degrees, Some(self.i0))
    }

    /// Full per-component exponent matrix (no bullets).
    pub fn entries(&self) -> Result<BlockValuationMatrix> {
        check_level(self.d)?;
        let l = self.sequence()?;
        Ok(valuation_matrix(&l, self.group.index(l.period, self.d)))
    }
}

/// One σ-stable piece of a quotient: the block Hom(V_col, V_row), its σ
/// partner, and how many filtration layers of it occur.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientBlock {
    pub block: (BlockLabel, BlockLabel),
    pub partner: (BlockLabel, BlockLabel),
    pub multiplicity: u32,
    /// k_{E_row} ⊗ k_{E_col}
    pub shape: TensorShape,
    pub degrees: (u32, u32),
}

impl QuotientBlock {
    pub fn self_paired(&self) -> bool {
        self.block == self.partner
    }
}

fn sigma(block: (BlockLabel, BlockLabel)) -> (BlockLabel, BlockLabel) {
    (block.1.partner(), block.0.partner())
}

fn block_layers(
    a: &BlockValuationMatrix,
    b: &BlockValuationMatrix,
    seq: &BlockLatticeSequence,
    region: Region,
    mut layers: impl FnMut(i64, i64) -> Result<u32>,
) -> Result<Vec<QuotientBlock>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for blk_row in seq.blocks() {
        for blk_col in seq.blocks() {
            let block = (blk_row.label, blk_col.label);
            if region_of(block.0, block.1) != region || seen.contains(&block) {
                continue;
            }
            let partner = sigma(block);
            seen.insert(block);
            seen.insert(partner);
            let count = |blk: (BlockLabel, BlockLabel),
                         layers: &mut dyn FnMut(i64, i64) -> Result<u32>| {
                let va = a.value(blk.0, blk.1).expect("refined entries");
                let vb = b.value(blk.0, blk.1).expect("refined entries");
                layers(va, vb)
            };
            let m = count(block, &mut layers)?;
            let mp = count(partner, &mut layers)?;
            if m != mp {
                return Err(Error::inconsistent(format!(
                    "block {}{} and its partner differ ({m} vs {mp})",
                    block.0, block.1
                )));
            }
            if m == 0 {
                continue;
            }
            let degrees = (
                blk_row.degree.expect("refined block"),
                blk_col.degree.expect("refined block"),
            );
            out.push(QuotientBlock {
                block,
                partner,
                multiplicity: m,
                shape: tensor_decompose(degrees.0, degrees.1)?,
                degrees,
            });
        }
    }
    Ok(out)
}

/// numerator / denominator on one region, as σ-fixed block spaces.
pub fn quotient_space(
    numerator: &FiltrationSpec,
    denominator: &FiltrationSpec,
    region: Region,
) -> Result<Vec<QuotientBlock>> {
    let num = numerator.entries()?;
    let den = denominator.entries()?;
    let seq = numerator.sequence()?;
    block_layers(&num, &den, &seq, region, |a, b| {
        if b < a {
            return Err(Error::invalid(
                Invariant::Containment,
                format!("denominator exponent {b} below numerator exponent {a}"),
            ));
        }
        if b - a > 1 {
            return Err(Error::inconsistent(format!(
                "entry difference {} > 1 has no agreed multiplicity convention",
                b - a
            )));
        }
        Ok((b - a) as u32)
    })
}

/// The layers of B/(B∩C) and C/(B∩C) together; their signature is sgn(B : C).
pub fn relative_index(
    b: &FiltrationSpec,
    c: &FiltrationSpec,
    region: Region,
) -> Result<Vec<QuotientBlock>> {
    let eb = b.entries()?;
    let ec = c.entries()?;
    let seq = b.sequence()?;
    block_layers(&eb, &ec, &seq, region, |x, y| Ok(x.abs_diff(y) as u32))
}

/// Symbolic table entry relative to k (d = 2k+1 or d = 2k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GoldenEntry {
    Bullet,
    K(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenTable {
    pub lattice: LatticeKind,
    pub group: SubgroupKind,
    pub odd: bool,
    pub rows: Vec<Vec<GoldenEntry>>,
}

impl GoldenTable {
    pub fn k_of(d: u32) -> i64 {
        (d / 2) as i64
    }

    pub fn instantiate(&self, d: u32) -> Vec<Vec<Entry>> {
        let k = GoldenTable::k_of(d);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        GoldenEntry::Bullet => Entry::Bullet,
                        GoldenEntry::K(o) => Entry::Value(k + o),
                    })
                    .collect()
            })
            .collect()
    }
}

pub const APPENDIX_TABLES: &str = include_str!("../data/appendix_tables.txt");

fn parse_golden_entry(tok: &str) -> Option<GoldenEntry> {
    if tok == "*" {
        return Some(GoldenEntry::Bullet);
    }
    let rest = tok.strip_prefix('k')?;
    if rest.is_empty() {
        return Some(GoldenEntry::K(0));
    }
    let (sign, digits) = rest.split_at(1);
    let v: i64 = digits.parse().ok()?;
    match sign {
        "+" => Some(GoldenEntry::K(v)),
        "-" => Some(GoldenEntry::K(-v)),
        _ => None,
    }
}

/// Parses stanzas `lattice group parity` followed by four rows.
pub fn parse_golden_tables(text: &str) -> Result<Vec<GoldenTable>> {
    let bad = |msg: String| Error::inconsistent(format!("golden table file: {msg}"));
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some(header) = lines.next() {
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(bad(format!("bad header {header:?}")));
        }
        let lattice = LatticeKind::parse(h[0]).ok_or_else(|| bad(format!("lattice {}", h[0])))?;
        let group = SubgroupKind::parse(h[1]).ok_or_else(|| bad(format!("group {}", h[1])))?;
        let odd = match h[2] {
            "odd" => true,
            "even" => false,
            p => return Err(bad(format!("parity {p}"))),
        };
        let mut rows = Vec::with_capacity(4);
        for _ in 0..4 {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("stanza {header:?} too short")))?;
            let row = line
                .split_whitespace()
                .map(|t| parse_golden_entry(t).ok_or_else(|| bad(format!("entry {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != 4 {
                return Err(bad(format!("row {line:?}")));
            }
            rows.push(row);
        }
        out.push(GoldenTable {
            lattice,
            group,
            odd,
            rows,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixCheck {
    pub lattice: LatticeKind,
    pub group: SubgroupKind,
    pub d: u32,
    pub expected: Vec<Vec<Entry>>,
    pub computed: Vec<Vec<Entry>>,
}

impl AppendixCheck {
    pub fn matches(&self) -> bool {
        self.expected == self.computed
    }
}

/// Computes every (lattice, group, d) of the golden tables for d in `levels`,
/// at the reference layout I = {0}, i∘ = 0 (which fixes the table's
/// orientation; the entries depend only on the jump patterns).
pub fn check_appendix(levels: impl IntoIterator<Item = u32> + Clone) -> Result<Vec<AppendixCheck>> {
    let tables = parse_golden_tables(APPENDIX_TABLES)?;
    let x = EmbeddingClass::all_odd(vec![0])?;
    let mut out = Vec::new();
    for t in &tables {
        for d in levels.clone() {
            if (d % 2 == 1) != t.odd {
                continue;
            }
            let computed = filtration_matrix(t.group, t.lattice, d, &x, 0)?.entries;
            out.push(AppendixCheck {
                lattice: t.lattice,
                group: t.group,
                d,
                expected: t.instantiate(d),
                computed,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_valuation(l: &BlockLatticeSequence, r: i64) -> Vec<Vec<i64>> {
        let e = l.period();
        l.blocks()
            .iter()
            .map(|bj| {
                l.blocks()
                    .iter()
                    .map(|bk| {
                        (-3 * e..3 * e)
                            .map(|m| {
                                l.exponent(bj.label, m + r).unwrap()
                                    - l.exponent(bk.label, m).unwrap()
                            })
                            .max()
                            .unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    fn values(m: &BlockValuationMatrix) -> Vec<Vec<i64>> {
        m.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| match e {
                        Entry::Value(v) => *v,
                        Entry::Bullet => panic!("bullet"),
                    })
                    .collect()
            })
            .collect()
    }

    fn mixed() -> EmbeddingClass {
        EmbeddingClass::new(vec![0, 1, 2], [1, 2].into()).unwrap()
    }

    #[test]
    fn ceil_div_signs() {
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(-6, 2), -3);
        assert_eq!(ceil_div(0, 6), 0);
    }

    #[test]
    fn rank_one_example_is_self_dual() {
        // Λ(-1) = Λ(0) = 𝔬, Λ(1) = Λ(2) = 𝔭
        let l = build_lambda_x_normalized(PartClass::Odd).restrict(|b| b == BlockLabel::Odd);
        assert_eq!(
            (-1..=2)
                .map(|r| l.exponent(BlockLabel::Odd, r).unwrap())
                .collect::<Vec<_>>(),
            vec![0, 0, 1, 1]
        );
        assert!(is_self_dual(&l).unwrap());
        let e = build_lambda_x_normalized(PartClass::Odd).restrict(|b| b == BlockLabel::Even);
        assert_eq!(
            (0..=3)
                .map(|r| e.exponent(BlockLabel::Even, r).unwrap())
                .collect::<Vec<_>>(),
            vec![0, 0, 1, 1]
        );
        assert!(is_self_dual(&e).unwrap());
    }

    #[test]
    fn lambda_x_jumps() {
        let l = build_lambda_x(&mixed());
        assert_eq!(l.period(), 2);
        assert!(is_self_dual(&l).unwrap());
        // I_o jumps between 0 and 1, I_e between 1 and 2
        assert_eq!(l.lattice_at(0), vec![0, 0]);
        assert_eq!(l.lattice_at(1), vec![1, 0]);
        assert_eq!(l.lattice_at(2), vec![1, 1]);
    }

    #[test]
    fn dual_is_an_involution_and_needs_pairing() {
        let l = build_higher(&mixed(), 0, LatticeKind::Lambda).unwrap();
        assert_eq!(dual(&dual(&l).unwrap()).unwrap(), l);
        let mut bad = l.clone();
        bad.blocks[0].form_twist = None;
        assert_eq!(
            dual(&bad).unwrap_err().invariant(),
            Some(Invariant::PairingData)
        );
        let shifted = l.reindex(1, 1);
        assert!(!is_self_dual(&shifted).unwrap());
    }

    #[test]
    fn higher_sequences_are_self_dual_with_expected_periods() {
        for x in crate::embeddings::enumerate_embeddings(&[0, 1, 2]).unwrap() {
            for i0 in 0..3 {
                for kind in LatticeKind::ALL {
                    let l = build_higher(&x, i0, kind).unwrap();
                    assert!(is_self_dual(&l).unwrap(), "{x} {i0} {kind:?}");
                    let e = if kind == LatticeKind::Lambda { 6 } else { 2 };
                    assert_eq!(l.period(), e);
                }
            }
        }
    }

    #[test]
    fn lambda_i0_profile() {
        let x = EmbeddingClass::all_odd(vec![0]).unwrap();
        let l = build_higher(&x, 0, LatticeKind::Lambda).unwrap();
        let offs: Vec<i64> = l.blocks().iter().map(|b| b.offset).collect();
        assert_eq!(offs, vec![-1, 0, -3, 1]);
        let my = build_higher(&x, 0, LatticeKind::My).unwrap();
        assert_eq!(
            my.blocks().iter().map(|b| b.offset).collect::<Vec<_>>(),
            vec![0, 0, -1, 0]
        );
        let mz = build_higher(&x, 0, LatticeKind::Mz).unwrap();
        assert_eq!(
            mz.blocks().iter().map(|b| b.offset).collect::<Vec<_>>(),
            vec![-1, 0, -1, 1]
        );
        // 𝔐^y(0) = Λ(-2), 𝔐^y(1) = Λ(3), 𝔐^z(0) = Λ(0), 𝔐^z(1) = Λ(1)
        for t in -3..3i64 {
            assert_eq!(my.lattice_at(2 * t), l.lattice_at(6 * t - 2));
            assert_eq!(my.lattice_at(2 * t + 1), l.lattice_at(6 * t + 3));
            assert_eq!(mz.lattice_at(2 * t), l.lattice_at(6 * t));
            assert_eq!(mz.lattice_at(2 * t + 1), l.lattice_at(6 * t + 1));
        }
    }

    #[test]
    fn lambda_i0_is_a_direct_sum() {
        let x = EmbeddingClass::new(vec![0, 1], [0, 1].into()).unwrap();
        let l = build_higher(&x, 1, LatticeKind::Lambda).unwrap();
        let near = PartClass::Even;
        let pm = BlockLatticeSequence::concat(vec![
            gl_line(BlockLabel::Minus).reindex(-1, 3),
            gl_line(BlockLabel::Plus).reindex(1, 3),
        ]);
        let v = build_lambda_x_normalized(near).restrict(|b| b == BlockLabel::Even);
        let sum = direct_sum(&pm, &v);
        assert_eq!(sum.period(), 6);
        for r in -6..6 {
            assert_eq!(
                sum.exponent(BlockLabel::Even, r),
                l.exponent(BlockLabel::Even, r)
            );
            assert_eq!(
                sum.exponent(BlockLabel::Minus, r),
                l.exponent(BlockLabel::Minus, r)
            );
            assert_eq!(
                sum.exponent(BlockLabel::Plus, r),
                l.exponent(BlockLabel::Plus, r)
            );
        }
    }

    #[test]
    fn restriction_to_v_recovers_lambda_x() {
        for x in crate::embeddings::enumerate_embeddings(&[0, 1, 2]).unwrap() {
            for i0 in 0..3 {
                let near = x.class_of(i0).unwrap();
                let want = lattice_chain(&build_lambda_x_normalized(near));
                for kind in LatticeKind::ALL {
                    let l = build_higher(&x, i0, kind).unwrap();
                    let v = l.restrict(|b| matches!(b, BlockLabel::Odd | BlockLabel::Even));
                    let mut v_sorted = v.clone();
                    v_sorted.blocks.sort_by_key(|b| b.label);
                    assert_eq!(lattice_chain(&v_sorted), want, "{x} {i0} {kind:?}");
                }
                if near == PartClass::Odd {
                    assert_eq!(want, lattice_chain(&build_lambda_x(&x)));
                }
            }
        }
    }

    #[test]
    fn reductive_quotients() {
        let x = mixed();
        let degs = [3, 1, 5];
        for i0 in 0..3 {
            let get = |k| {
                let l = build_higher(&x, i0, k)
                    .unwrap()
                    .refine(&x, &degs, Some(i0))
                    .unwrap();
                let mut f = reductive_quotient(&l, Some(i0)).unwrap().factors;
                f[1..].sort();
                f
            };
            let others: Vec<(GroupFamily, u32)> = (0..3)
                .filter(|&i| i != i0)
                .map(|i| (GroupFamily::U1, degs[i]))
                .collect();
            let n0 = degs[i0];
            let mut y = vec![(GroupFamily::U3, n0)];
            y.extend(others.iter().copied());
            y[1..].sort();
            assert_eq!(get(LatticeKind::My), y);
            let mut z = vec![(GroupFamily::U2, n0), (GroupFamily::U1, n0)];
            z.extend(others.iter().copied());
            z[1..].sort();
            assert_eq!(get(LatticeKind::Mz), z);
            assert_eq!(get(LatticeKind::Lambda)[0].0, GroupFamily::GL1);
        }
        let l = build_lambda_x(&x).refine(&x, &degs, None).unwrap();
        assert_eq!(reductive_quotient(&l, None).unwrap().factors.len(), 3);
    }

    #[test]
    fn valuation_closed_form_matches_brute_force() {
        for x in crate::embeddings::enumerate_embeddings(&[0, 1]).unwrap() {
            for kind in LatticeKind::ALL {
                let l = build_higher(&x, 0, kind).unwrap();
                for r in -4..14 {
                    assert_eq!(values(&valuation_matrix(&l, r)), brute_valuation(&l, r));
                }
            }
        }
    }

    #[test]
    fn valuation_periodicity_and_triangle() {
        let l = build_higher(&mixed(), 1, LatticeKind::Lambda).unwrap();
        let e = l.period();
        for r in 0..=12 {
            let a = values(&valuation_matrix(&l, r));
            let b = values(&valuation_matrix(&l, r + e));
            for (ra, rb) in a.iter().zip(&b) {
                for (x, y) in ra.iter().zip(rb) {
                    assert_eq!(x + 1, *y);
                }
            }
            for s in 0..=12 {
                let bs = values(&valuation_matrix(&l, s));
                let c = values(&valuation_matrix(&l, r + s));
                let n = a.len();
                for j in 0..n {
                    for k in 0..n {
                        for m in 0..n {
                            assert!(a[j][k] + bs[k][m] >= c[j][m]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn filtration_examples() {
        let x = EmbeddingClass::all_odd(vec![0]).unwrap();
        let m = filtration_matrix(SubgroupKind::H1, LatticeKind::Lambda, 3, &x, 0).unwrap();
        assert_eq!(m.value(BlockLabel::Minus, BlockLabel::Odd), Some(2));
        assert_eq!(m.value(BlockLabel::Even, BlockLabel::Plus), Some(1));
        let m = filtration_matrix(SubgroupKind::J1, LatticeKind::Mz, 2, &x, 0).unwrap();
        assert_eq!(m.value(BlockLabel::Minus, BlockLabel::Plus), Some(0));
        let m = filtration_matrix(SubgroupKind::J1, LatticeKind::My, 3, &x, 0).unwrap();
        assert_eq!(m.value(BlockLabel::Even, BlockLabel::Minus), Some(1));
        assert_eq!(
            m.get(BlockLabel::Odd, BlockLabel::Even),
            Some(Entry::Bullet)
        );
        assert!(filtration_matrix(SubgroupKind::J1, LatticeKind::My, 0, &x, 0).is_err());
        // J agrees with J¹ off the Levi
        for d in 1..6 {
            for kind in LatticeKind::ALL {
                assert_eq!(
                    filtration_matrix(SubgroupKind::J, kind, d, &x, 0).unwrap(),
                    filtration_matrix(SubgroupKind::J1, kind, d, &x, 0).unwrap()
                );
            }
        }
    }

    #[test]
    fn golden_tables_parse_and_match() {
        let tables = parse_golden_tables(APPENDIX_TABLES).unwrap();
        assert_eq!(tables.len(), 12);
        let checks = check_appendix(2..=7).unwrap();
        assert_eq!(checks.len(), 36);
        for c in &checks {
            assert!(c.matches(), "{:?} {:?} d={}", c.lattice, c.group, c.d);
        }
    }

    #[test]
    fn golden_orientation_is_independent_of_side() {
        // i∘ in I_e gives the same table in the (-, near, far, +) orientation
        let x = EmbeddingClass::new(vec![0, 1, 2], [1, 2].into()).unwrap();
        for d in 1..8 {
            for kind in LatticeKind::ALL {
                for g in [SubgroupKind::H1, SubgroupKind::J1] {
                    let a = filtration_matrix(g, kind, d, &x, 0).unwrap().entries;
                    let b = filtration_matrix(g, kind, d, &x, 1).unwrap().entries;
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn golden_parser_rejects_garbage() {
        assert!(parse_golden_tables("Lambda H1 odd\n* k k k\n").is_err());
        assert!(parse_golden_tables("Foo H1 odd\n").is_err());
        assert!(
            parse_golden_tables("Lambda H1 odd\n* k k q\nk * * k\nk * * k\nk k k *\n").is_err()
        );
    }

    #[test]
    fn quotient_examples() {
        let x = EmbeddingClass::new(vec![0, 1, 2], [1, 2].into()).unwrap();
        let spec = FiltrationSpec {
            group: SubgroupKind::J1,
            base: LatticeKind::My,
            d: 3,
            x,
            i0: 0,
            degrees: vec![1, 3, 1],
        };
        assert!(quotient_space(&spec, &spec, Region::Uminus)
            .unwrap()
            .is_empty());
        let h = spec.with(SubgroupKind::H1, LatticeKind::My);
        let q = quotient_space(&spec, &h, Region::Uminus).unwrap();
        // d odd on 𝔐^y: only the far class (I_e here) pairs with the GL blocks
        let blocks: Vec<_> = q.iter().map(|b| b.block).collect();
        assert_eq!(
            blocks,
            vec![
                (BlockLabel::Component(1), BlockLabel::Minus),
                (BlockLabel::Component(2), BlockLabel::Minus)
            ]
        );
        assert_eq!(q[0].partner, (BlockLabel::Plus, BlockLabel::Component(1)));
        assert_eq!((q[0].shape.g, q[0].shape.ell), (1, 3));
        assert_eq!(
            quotient_space(&h, &spec, Region::Uminus)
                .unwrap_err()
                .invariant(),
            Some(Invariant::Containment)
        );
        // Λ-based J¹ and 𝔐-based J¹ agree on the Levi
        let jl = spec.with(SubgroupKind::J1, LatticeKind::Lambda);
        assert!(relative_index(&jl, &spec, Region::M).unwrap().is_empty());
    }
}
