//! Amending characters ν^y, ν^z, ν^P and the transfer character χ_y^z.
//!
//! Three independent routes are provided: the parity table
//! ([`amending_character`]), the block formula evaluated with
//! [`mult_action_sign`] ([`amending_block_formula`]), and a brute-force
//! signature oracle over the filtration quotients ([`amending_brute_force`]).

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::embeddings::{enumerate_embeddings, ComponentId, EmbeddingClass, PartClass};
use crate::error::{Error, Invariant, Result};
use crate::field::{checked_pow, mult_action_sign, tensor_decompose};
use crate::lattices::{
    quotient_space, relative_index, BlockLabel, FiltrationSpec, LatticeKind, QuotientBlock, Region,
    SubgroupKind,
};
use crate::sign::{permutation_sign, Sign};

pub const DEFAULT_LITERAL_CUTOFF: u64 = 1_000_000;
pub const CUTOFF_ENV: &str = "UPACKET_GRID_CUTOFF";

/// The literal-enumeration cutoff, overridable through `UPACKET_GRID_CUTOFF`.
pub fn cutoff_from_env() -> u64 {
    std::env::var(CUTOFF_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_LITERAL_CUTOFF)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Tag {
    Trivial,
    Quadratic,
}

impl Tag {
    pub fn from_sign(s: Sign) -> Tag {
        match s {
            Sign::Plus => Tag::Trivial,
            Sign::Minus => Tag::Quadratic,
        }
    }

    pub fn from_bool(quadratic: bool) -> Tag {
        if quadratic {
            Tag::Quadratic
        } else {
            Tag::Trivial
        }
    }

    pub fn flip(self) -> Tag {
        match self {
            Tag::Trivial => Tag::Quadratic,
            Tag::Quadratic => Tag::Trivial,
        }
    }

    pub fn is_quadratic(self) -> bool {
        self == Tag::Quadratic
    }

    pub fn times(self, other: Tag) -> Tag {
        Tag::from_bool(self != other)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Trivial => "trivial",
            Tag::Quadratic => "quadratic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Vertex {
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
}

impl Vertex {
    pub const BOTH: [Vertex; 2] = [Vertex::Y, Vertex::Z];

    pub fn lattice(self) -> LatticeKind {
        match self {
            Vertex::Y => LatticeKind::My,
            Vertex::Z => LatticeKind::Mz,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vertex::Y => "y",
            Vertex::Z => "z",
        })
    }
}

/// A character of μ_{E_{i∘}} × ∏ μ_{E_i/E_{i,0}}, at most quadratic on each
/// factor, extended by 1 at ϖ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignCharacter {
    pub i0: ComponentId,
    pub gl: Tag,
    pub unitary: BTreeMap<ComponentId, Tag>,
    pub value_at_uniformizer: i64,
}

impl SignCharacter {
    fn new(i0: ComponentId, gl: Tag, unitary: BTreeMap<ComponentId, Tag>) -> SignCharacter {
        SignCharacter {
            i0,
            gl,
            unitary,
            value_at_uniformizer: 1,
        }
    }

    fn trivial_unitary(x: &EmbeddingClass) -> BTreeMap<ComponentId, Tag> {
        x.index_set().iter().map(|&i| (i, Tag::Trivial)).collect()
    }

    pub fn times(&self, other: &SignCharacter) -> SignCharacter {
        let unitary = self
            .unitary
            .iter()
            .map(|(&i, &t)| {
                (
                    i,
                    t.times(other.unitary.get(&i).copied().unwrap_or(Tag::Trivial)),
                )
            })
            .collect();
        SignCharacter::new(self.i0, self.gl.times(other.gl), unitary)
    }

    pub fn unitary_trivial(&self) -> bool {
        self.unitary.values().all(|&t| t == Tag::Trivial)
    }
}

fn side_of(x: &EmbeddingClass, i0: ComponentId) -> Result<PartClass> {
    x.class_of(i0)
}

/// The parity table: for i∘ ∈ I_o, ν^y is quadratic iff d and #I are both
/// even, and ν^z iff d is even or #I is odd; i∘ ∈ I_e swaps the two.
pub fn parity_rule(w: Vertex, side: PartClass, d: u32, count: usize) -> Tag {
    let d_even = d % 2 == 0;
    let i_even = count % 2 == 0;
    let y_rule = d_even && i_even;
    let z_rule = d_even || !i_even;
    let w_eff = match side {
        PartClass::Odd => w,
        PartClass::Even => match w {
            Vertex::Y => Vertex::Z,
            Vertex::Z => Vertex::Y,
        },
    };
    Tag::from_bool(match w_eff {
        Vertex::Y => y_rule,
        Vertex::Z => z_rule,
    })
}

/// ν^w_{i∘,x} from the parity table; unitary components are trivial.
pub fn amending_character(
    w: Vertex,
    i0: ComponentId,
    x: &EmbeddingClass,
    d: u32,
) -> Result<SignCharacter> {
    let side = side_of(x, i0)?;
    Ok(SignCharacter::new(
        i0,
        parity_rule(w, side, d, x.len()),
        SignCharacter::trivial_unitary(x),
    ))
}

/// χ_y^z = ν^y · ν^z.
pub fn transfer_character(i0: ComponentId, x: &EmbeddingClass, d: u32) -> Result<SignCharacter> {
    Ok(amending_character(Vertex::Y, i0, x, d)?.times(&amending_character(Vertex::Z, i0, x, d)?))
}

/// ν^P on the unitary side (always trivial); the GL part comes from the oracle.
pub fn nu_p(x: &EmbeddingClass, i0: ComponentId, _d: u32) -> Result<BTreeMap<ComponentId, Tag>> {
    side_of(x, i0)?;
    Ok(SignCharacter::trivial_unitary(x))
}

fn degree(degrees: &[u32], i: ComponentId) -> Result<u32> {
    degrees.get(i).copied().ok_or_else(|| {
        Error::invalid(
            Invariant::ComponentMembership,
            format!("no degree for id {i}"),
        )
    })
}

/// Signature of ζ ∈ k_{E∘}^× (a generator) on k_{E∘} ⊗ k_{E_i}.
fn tensor_block_sign(q0: u64, n0: u32, ni: u32) -> Result<Sign> {
    let t = tensor_decompose(n0, ni)?;
    let q = q0 * q0;
    mult_action_sign(checked_pow(q, n0)? - 1, checked_pow(q, t.ell)?, t.g as u64)
}

/// Signature of ζ on the σ-fixed part of Hom(V_-, V_+).
fn hermitian_block_sign(q0: u64, n0: u32) -> Result<Sign> {
    hermitian_pieces(q0, n0)?
        .into_iter()
        .map(|p| mult_action_sign(p.order, p.card, 1))
        .product()
}

/// ν^w by the block formula: with "near" the class of i∘ and "far" the other,
/// ν^y = sgn(far)^d · sgn(near ⊕ (+,-))^{d+1} and
/// ν^z = sgn(near)^d · sgn(far ⊕ (+,-))^{d+1}.
pub fn amending_block_formula(
    w: Vertex,
    i0: ComponentId,
    x: &EmbeddingClass,
    d: u32,
    q0: u64,
    degrees: &[u32],
) -> Result<SignCharacter> {
    let near = side_of(x, i0)?;
    let n0 = degree(degrees, i0)?;
    let class_sign = |class: PartClass| -> Result<Sign> {
        x.part(class)
            .iter()
            .map(|&i| tensor_block_sign(q0, n0, degree(degrees, i)?))
            .product()
    };
    let s_near = class_sign(near)?;
    let s_far = class_sign(near.other())?;
    let s_herm = hermitian_block_sign(q0, n0)?;
    let d = d as u64;
    let s = match w {
        Vertex::Y => s_far.pow(d) * (s_near * s_herm).pow(d + 1),
        Vertex::Z => s_near.pow(d) * (s_far * s_herm).pow(d + 1),
    };
    Ok(SignCharacter::new(
        i0,
        Tag::from_sign(s),
        SignCharacter::trivial_unitary(x),
    ))
}

/// A finite field factor of a block space and the order of the element
/// through which the torus generator acts on it by multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub card: u64,
    pub order: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Acting {
    /// A generator of μ_{E_{i∘}} (the GL factor of the Levi).
    Gl,
    /// A generator of μ_{E_i/E_{i,0}}.
    Unitary(ComponentId),
}

fn power_order(order: u64, exponent: u64) -> u64 {
    order / exponent.gcd(&order)
}

fn hermitian_pieces(q0: u64, n0: u32) -> Result<Vec<Piece>> {
    let q = q0 * q0;
    let q0n = checked_pow(q0, n0)?;
    let big = checked_pow(q, n0)?;
    let units = big - 1;
    // j = 0: the norm ζ^{1 + q0^n} generates k_{E∘,0}^×
    let mut pieces = vec![Piece {
        card: q0n,
        order: q0n - 1,
    }];
    for j in 1..=(n0 as u64 - 1) / 2 {
        let e = (1 + (q0n % units) * (q.pow(j as u32) % units) % units) % units;
        pieces.push(Piece {
            card: big,
            order: power_order(units, e),
        });
    }
    Ok(pieces)
}

fn is_gl(l: BlockLabel) -> bool {
    matches!(l, BlockLabel::Minus | BlockLabel::Plus)
}

/// One filtration layer of a quotient block as a product of field pieces.
pub fn realize(block: &QuotientBlock, acting: Acting, q0: u64, n0: u32) -> Result<Vec<Piece>> {
    let q = q0 * q0;
    let (a, b) = block.block;
    let fail = |msg: &str| {
        Error::inconsistent(format!(
            "block-space realization failure at ({a},{b}): {msg}"
        ))
    };
    let tensor = |acting_on: Option<u64>| -> Result<Vec<Piece>> {
        let card = checked_pow(q, block.shape.ell)?;
        let order = acting_on.unwrap_or(1);
        Ok((0..block.shape.g).map(|_| Piece { card, order }).collect())
    };
    let gl_units = checked_pow(q, n0)? - 1;
    let unitary_order = |i: ComponentId, deg: u32| -> Result<Option<u64>> {
        Ok(match acting {
            Acting::Unitary(k) if k == i => Some(checked_pow(q0, deg)? + 1),
            _ => None,
        })
    };
    if block.self_paired() {
        return match (a, b) {
            (BlockLabel::Plus, BlockLabel::Minus) | (BlockLabel::Minus, BlockLabel::Plus) => {
                match acting {
                    Acting::Gl => hermitian_pieces(q0, n0),
                    Acting::Unitary(_) => Ok(hermitian_pieces(q0, n0)?
                        .into_iter()
                        .map(|p| Piece { order: 1, ..p })
                        .collect()),
                }
            }
            (BlockLabel::Component(i), BlockLabel::Component(j)) if i == j => {
                // root spaces of U(V_i): pairs (l, -l), multiplier u^{q^l - 1}
                let deg = block.degrees.0;
                let card = checked_pow(q, deg)?;
                let ord = unitary_order(i, deg)?;
                Ok((1..=(deg as u64 - 1) / 2)
                    .map(|l| Piece {
                        card,
                        order: ord.map_or(1, |o| power_order(o, q.pow(l as u32) - 1)),
                    })
                    .collect())
            }
            _ => Err(fail("unexpected self-paired block")),
        };
    }
    match (a, b) {
        (x, y) if is_gl(x) && is_gl(y) => {
            // End(V_-) paired with End(V_+): root spaces j = 1..n0-1 under
            // conjugation by c(ζ)
            let card = checked_pow(q, n0)?;
            Ok((1..n0 as u64)
                .map(|j| Piece {
                    card,
                    order: match acting {
                        Acting::Gl => power_order(gl_units, q.pow(j as u32) - 1),
                        Acting::Unitary(_) => 1,
                    },
                })
                .collect())
        }
        (BlockLabel::Component(i), y) | (y, BlockLabel::Component(i)) if is_gl(y) => match acting {
            Acting::Gl => tensor(Some(gl_units)),
            Acting::Unitary(_) => tensor(unitary_order(i, degree_of_block(block, i))?),
        },
        (BlockLabel::Component(i), BlockLabel::Component(j)) => {
            let ord = match acting {
                Acting::Gl => None,
                Acting::Unitary(k) if k == i => unitary_order(i, block.degrees.0)?,
                Acting::Unitary(k) if k == j => unitary_order(j, block.degrees.1)?,
                Acting::Unitary(_) => None,
            };
            tensor(ord)
        }
        _ => Err(fail("aggregate block in a refined quotient")),
    }
}

fn degree_of_block(block: &QuotientBlock, i: ComponentId) -> u32 {
    if block.block.0 == BlockLabel::Component(i) {
        block.degrees.0
    } else {
        block.degrees.1
    }
}

/// Sign of a permutation product π_1 × … × π_k on A_1 × … × A_k from the
/// per-factor cycle types.
pub fn product_sign_by_cycles(pieces: &[Piece]) -> Result<Sign> {
    let mut total = Sign::Plus;
    for (i, p) in pieces.iter().enumerate() {
        let s = mult_action_sign(p.order, p.card, 1)?;
        let others_odd = pieces
            .iter()
            .enumerate()
            .all(|(j, o)| j == i || o.card % 2 == 1);
        if others_odd {
            total = total * s;
        }
    }
    Ok(total)
}

/// Same sign, by enumerating the product set and decomposing the diagonal
/// multiplication permutation into cycles. None when the set exceeds `cutoff`.
pub fn product_sign_literal(pieces: &[Piece], cutoff: u64) -> Result<Option<Sign>> {
    let mut size: u64 = 1;
    for p in pieces {
        size = match size.checked_mul(p.card) {
            Some(s) if s <= cutoff => s,
            _ => return Ok(None),
        };
        if p.order == 0 || (p.card - 1) % p.order != 0 {
            return Err(Error::invalid(Invariant::DivisibleOrder, format!("{p:?}")));
        }
    }
    let size = size as usize;
    let mut perm = vec![0u32; size];
    for (idx, slot) in perm.iter_mut().enumerate() {
        let mut rest = idx as u64;
        let mut image = 0u64;
        let mut stride = 1u64;
        for p in pieces {
            let digit = rest % p.card;
            rest /= p.card;
            let units = p.card - 1;
            let moved = if digit == 0 {
                0
            } else {
                1 + (digit - 1 + units / p.order) % units
            };
            image += moved * stride;
            stride *= p.card;
        }
        *slot = image as u32;
    }
    Ok(Some(permutation_sign(&perm)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModeCounts {
    /// Blocks evaluated both by enumeration and by cycle count.
    pub literal: usize,
    /// Blocks too large to enumerate.
    pub cycle_only: usize,
}

struct SignEvaluator {
    q0: u64,
    n0: u32,
    cutoff: u64,
    counts: ModeCounts,
}

impl SignEvaluator {
    fn sign(&mut self, blocks: &[QuotientBlock], acting: Acting) -> Result<Sign> {
        let mut total = Sign::Plus;
        for b in blocks {
            let pieces = realize(b, acting, self.q0, self.n0)?;
            let by_cycles = product_sign_by_cycles(&pieces)?;
            match product_sign_literal(&pieces, self.cutoff)? {
                Some(lit) => {
                    self.counts.literal += 1;
                    if lit != by_cycles {
                        return Err(Error::inconsistent(format!(
                            "literal and cycle-count signatures differ on block ({},{})",
                            b.block.0, b.block.1
                        )));
                    }
                }
                None => self.counts.cycle_only += 1,
            }
            total = total * by_cycles.pow(b.multiplicity as u64);
        }
        Ok(total)
    }
}

/// Everything the oracle computed at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleOutcome {
    /// ν^{w,P}: GL tag from sgn(𝔙_{𝔐^w,U⁻}), unitary tags from
    /// sgn(J¹_Λ : J¹_𝔐)·sgn(𝔙_{Λ,U⁻}).
    pub character: SignCharacter,
    /// ν^P = sgn(𝔙_{Λ,U⁻}).
    pub nu_p: SignCharacter,
    /// The four factors of sgn(J¹_Λ : J¹_𝔐)·sgn(𝔙_{Λ,U⁻}) for the GL generator:
    /// (J¹ on M), (J¹ on U), 𝔙_{𝔐^w,U⁻}, (H¹ on U⁻).
    pub factors: [Sign; 4],
    pub modes: ModeCounts,
}

/// ν^{w,P} by brute force over the filtration quotients, with the factor
/// cancellations checked rather than assumed.
pub fn amending_brute_force(
    w: Vertex,
    i0: ComponentId,
    x: &EmbeddingClass,
    d: u32,
    q0: u64,
    degrees: &[u32],
    cutoff: u64,
) -> Result<OracleOutcome> {
    side_of(x, i0)?;
    if d == 0 {
        return Err(Error::invalid(
            Invariant::PositiveLevel,
            "the oracle needs d >= 1",
        ));
    }
    let n0 = degree(degrees, i0)?;
    let base = FiltrationSpec {
        group: SubgroupKind::J1,
        base: LatticeKind::Lambda,
        d,
        x: x.clone(),
        i0,
        degrees: degrees.to_vec(),
    };
    let mw = w.lattice();
    let j_l = base.with(SubgroupKind::J1, LatticeKind::Lambda);
    let h_l = base.with(SubgroupKind::H1, LatticeKind::Lambda);
    let j_m = base.with(SubgroupKind::J1, mw);
    let h_m = base.with(SubgroupKind::H1, mw);

    let v_m = quotient_space(&j_m, &h_m, Region::Uminus)?;
    let v_l = quotient_space(&j_l, &h_l, Region::Uminus)?;
    let idx_m = relative_index(&j_l, &j_m, Region::M)?;
    let idx_u = relative_index(&j_l, &j_m, Region::U)?;
    let idx_um = relative_index(&j_l, &j_m, Region::Uminus)?;
    let idx_h = relative_index(&h_l, &h_m, Region::Uminus)?;

    let mut ev = SignEvaluator {
        q0,
        n0,
        cutoff,
        counts: ModeCounts::default(),
    };
    let direct = |ev: &mut SignEvaluator, acting| -> Result<Sign> {
        Ok(ev.sign(&idx_m, acting)?
            * ev.sign(&idx_u, acting)?
            * ev.sign(&idx_um, acting)?
            * ev.sign(&v_l, acting)?)
    };

    let factors = [
        ev.sign(&idx_m, Acting::Gl)?,
        ev.sign(&idx_u, Acting::Gl)?,
        ev.sign(&v_m, Acting::Gl)?,
        ev.sign(&idx_h, Acting::Gl)?,
    ];
    if factors[0] != Sign::Plus {
        return Err(Error::inconsistent(
            "the Levi factor (J¹_Λ : J¹_𝔐) ∩ M is not trivial",
        ));
    }
    if factors[1] * factors[3] != Sign::Plus {
        return Err(Error::inconsistent(
            "the U and U⁻ index factors do not cancel",
        ));
    }
    let gl_direct = direct(&mut ev, Acting::Gl)?;
    if gl_direct != factors[2] {
        return Err(Error::inconsistent(
            "direct signature differs from the product of the four factors",
        ));
    }

    let mut unitary = BTreeMap::new();
    let mut nu_p_unitary = BTreeMap::new();
    for &i in x.index_set() {
        unitary.insert(i, Tag::from_sign(direct(&mut ev, Acting::Unitary(i))?));
        nu_p_unitary.insert(i, Tag::from_sign(ev.sign(&v_l, Acting::Unitary(i))?));
    }
    let nu_p_gl = Tag::from_sign(ev.sign(&v_l, Acting::Gl)?);

    Ok(OracleOutcome {
        character: SignCharacter::new(i0, Tag::from_sign(factors[2]), unitary),
        nu_p: SignCharacter::new(i0, nu_p_gl, nu_p_unitary),
        factors,
        modes: ev.counts,
    })
}

/// One point of an oracle grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub q0: u64,
    pub degrees: Vec<u32>,
    pub d: u32,
    pub x: EmbeddingClass,
    pub i0: ComponentId,
    pub w: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridResult {
    pub point: GridPoint,
    /// Block formula evaluated with mult_action_sign.
    pub formula: Tag,
    pub oracle: Tag,
    /// The parity table.
    pub rule: Tag,
    pub unitary_trivial: bool,
    pub nu_p_gl: Tag,
    pub modes: ModeCounts,
}

impl GridResult {
    pub fn agree(&self) -> bool {
        self.formula == self.oracle && self.oracle == self.rule && self.unitary_trivial
    }

    /// `q0 nvec d partition i0 w formula oracle agree`
    pub fn report_line(&self) -> String {
        let p = &self.point;
        let nvec = p
            .degrees
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{} {} {} {} {} {} {} {} {}",
            p.q0,
            nvec,
            p.d,
            p.x,
            p.i0,
            p.w,
            self.formula,
            self.oracle,
            if self.agree() { "yes" } else { "no" }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridOptions {
    pub cutoff: u64,
    /// Negative control: evaluate the parity table with its answer flipped.
    pub flip_rule: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            cutoff: DEFAULT_LITERAL_CUTOFF,
            flip_rule: false,
        }
    }
}

/// All points for the given residue cardinalities, degree alphabet, levels
/// and sizes of I; every degree vector, partition, i∘ and w.
pub fn grid_points(
    q0s: &[u64],
    degree_choices: &[u32],
    levels: &[u32],
    max_components: usize,
) -> Result<Vec<GridPoint>> {
    let mut out = Vec::new();
    for &q0 in q0s {
        for k in 1..=max_components {
            let mut vectors: Vec<Vec<u32>> = vec![vec![]];
            for _ in 0..k {
                vectors = vectors
                    .into_iter()
                    .flat_map(|v| {
                        degree_choices.iter().map(move |&n| {
                            let mut v = v.clone();
                            v.push(n);
                            v
                        })
                    })
                    .collect();
            }
            let ids: Vec<ComponentId> = (0..k).collect();
            for degrees in vectors {
                for &d in levels {
                    for x in enumerate_embeddings(&ids)? {
                        for i0 in 0..k {
                            for w in Vertex::BOTH {
                                out.push(GridPoint {
                                    q0,
                                    degrees: degrees.clone(),
                                    d,
                                    x: x.clone(),
                                    i0,
                                    w,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn evaluate_point(p: &GridPoint, opts: GridOptions) -> Result<GridResult> {
    let formula = amending_block_formula(p.w, p.i0, &p.x, p.d, p.q0, &p.degrees)?;
    let oracle = amending_brute_force(p.w, p.i0, &p.x, p.d, p.q0, &p.degrees, opts.cutoff)?;
    let mut rule = amending_character(p.w, p.i0, &p.x, p.d)?.gl;
    if opts.flip_rule {
        rule = rule.flip();
    }
    Ok(GridResult {
        point: p.clone(),
        formula: formula.gl,
        oracle: oracle.character.gl,
        rule,
        unitary_trivial: oracle.character.unitary_trivial() && oracle.nu_p.unitary_trivial(),
        nu_p_gl: oracle.nu_p.gl,
        modes: oracle.modes,
    })
}

/// Evaluates every point, in order, on `jobs` threads (0 = rayon default).
pub fn run_grid(points: &[GridPoint], jobs: usize, opts: GridOptions) -> Result<Vec<GridResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::inconsistent(format!("thread pool: {e}")))?;
    pool.install(|| points.par_iter().map(|p| evaluate_point(p, opts)).collect())
}
