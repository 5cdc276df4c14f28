//! Groebner bases of homogeneous submodules of graded free modules over
//! `k[x_0..x_n]`.
//!
//! Module terms `m * e_i` are ordered first by total degree
//! `deg(m) + twist(i)`, then by grevlex on `m`, then by component (lower index
//! leads). Inputs are processed degree by degree, which lets one run answer
//! three questions at once: a Groebner basis, which input generators are
//! minimal modulo the fixed part, and (with tracking switched on) generators
//! of the syzygies among the inputs, read off from the S-pair reductions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use log::trace;

use crate::complexes::Complex;
use crate::error::{Error, Result};
use crate::gradedmod::{minimal_free_resolution, PresentedModule};
use crate::linal::PrimeField;
use crate::polyring::{Monomial, Polynomial, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    /// Total degree: monomial degree plus the twist of the component.
    pub deg: i32,
    pub mono: Monomial,
    pub comp: usize,
    pub coeff: u32,
}

#[inline]
fn term_cmp(a: &Term, b: &Term) -> Ordering {
    a.deg.cmp(&b.deg).then_with(|| a.mono.grevlex_cmp(&b.mono)).then_with(|| b.comp.cmp(&a.comp))
}

/// Element of a graded free module, terms sorted descending in the module order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vector {
    terms: Vec<Term>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector { terms: Vec::new() }
    }

    pub fn unit(nvars: usize, comp: usize, twist: i32) -> Self {
        Vector { terms: vec![Term { deg: twist, mono: Monomial::one(nvars), comp, coeff: 1 }] }
    }

    pub fn from_terms(field: &PrimeField, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| term_cmp(b, a));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(l) if l.comp == t.comp && l.mono == t.mono => l.coeff = field.add(l.coeff, t.coeff),
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coeff != 0);
        Vector { terms: out }
    }

    /// `sum_i polys[i] * e_i` in a free module with the given twists.
    pub fn from_polys(polys: &[Polynomial], twists: &[i32]) -> Self {
        let mut terms = Vec::new();
        for (i, f) in polys.iter().enumerate() {
            for (m, c) in f.terms() {
                terms.push(Term { deg: m.degree() as i32 + twists[i], mono: m.clone(), comp: i, coeff: *c });
            }
        }
        terms.sort_by(|a, b| term_cmp(b, a));
        Vector { terms }
    }

    /// `f * e_comp`
    pub fn from_poly(f: &Polynomial, comp: usize, twist: i32) -> Self {
        let terms = f
            .terms()
            .iter()
            .map(|(m, c)| Term { deg: m.degree() as i32 + twist, mono: m.clone(), comp, coeff: *c })
            .collect();
        Vector { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Common total degree, `None` if zero or inhomogeneous.
    pub fn degree(&self) -> Option<i32> {
        let d = self.terms.first()?.deg;
        self.terms.iter().all(|t| t.deg == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn component(&self, comp: usize) -> Polynomial {
        let mut terms: Vec<(Monomial, u32)> =
            self.terms.iter().filter(|t| t.comp == comp).map(|t| (t.mono.clone(), t.coeff)).collect();
        terms.sort_by(|a, b| b.0.grevlex_cmp(&a.0));
        Polynomial::from_sorted_unchecked(terms)
    }

    pub fn components(&self, rank: usize) -> Vec<Polynomial> {
        let mut buckets: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); rank];
        for t in &self.terms {
            buckets[t.comp].push((t.mono.clone(), t.coeff));
        }
        buckets
            .into_iter()
            .map(|mut b| {
                b.sort_by(|x, y| y.0.grevlex_cmp(&x.0));
                Polynomial::from_sorted_unchecked(b)
            })
            .collect()
    }

    pub fn scale(&self, field: &PrimeField, c: u32) -> Vector {
        if c == 0 {
            return Vector::zero();
        }
        Vector { terms: self.terms.iter().map(|t| Term { coeff: field.mul(t.coeff, c), ..t.clone() }).collect() }
    }

    pub fn neg(&self, field: &PrimeField) -> Vector {
        self.scale(field, field.neg(1))
    }

    pub fn mul_term(&self, field: &PrimeField, m: &Monomial, c: u32) -> Vector {
        if c == 0 {
            return Vector::zero();
        }
        let d = m.degree() as i32;
        Vector {
            terms: self
                .terms
                .iter()
                .map(|t| Term { deg: t.deg + d, mono: t.mono.mul(m), comp: t.comp, coeff: field.mul(t.coeff, c) })
                .collect(),
        }
    }

    pub fn mul_poly(&self, field: &PrimeField, f: &Polynomial) -> Vector {
        let mut acc = Vector::zero();
        for (m, c) in f.terms() {
            acc = acc.axpy(field, &self.mul_term(field, m, *c), 1);
        }
        acc
    }

    pub fn add(&self, field: &PrimeField, other: &Vector) -> Vector {
        self.axpy(field, other, 1)
    }

    pub fn sub(&self, field: &PrimeField, other: &Vector) -> Vector {
        self.axpy(field, other, field.neg(1))
    }

    /// `self + c * other`
    pub fn axpy(&self, field: &PrimeField, other: &Vector, c: u32) -> Vector {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        merge_into(field, &self.terms, &other.terms, c, None, &mut out);
        Vector { terms: out }
    }

    /// `self + c * m * other`, applied only to the terms from `pos` on.
    fn axpy_tail(&mut self, field: &PrimeField, pos: usize, other: &Vector, c: u32, m: &Monomial) {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        out.extend_from_slice(&self.terms[..pos]);
        merge_into(field, &self.terms[pos..], &other.terms, c, Some(m), &mut out);
        self.terms = out;
    }

    /// Moves component `i` to `map[i]` and shifts degrees by `deg_shift`;
    /// `None` entries are dropped.
    pub fn reindex(&self, field: &PrimeField, map: &[Option<usize>], deg_shift: i32) -> Vector {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| map[t.comp].map(|c| Term { deg: t.deg + deg_shift, comp: c, ..t.clone() }))
            .collect();
        Vector::from_terms(field, terms)
    }

    /// Shifts every component index by `offset` (order is preserved only
    /// when twists are shifted consistently, so re-sort anyway).
    pub fn offset(&self, field: &PrimeField, offset: usize) -> Vector {
        let terms = self.terms.iter().map(|t| Term { comp: t.comp + offset, ..t.clone() }).collect();
        Vector::from_terms(field, terms)
    }

    pub fn max_comp(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.comp).max()
    }
}

fn merge_into(field: &PrimeField, a: &[Term], b: &[Term], c: u32, m: Option<&Monomial>, out: &mut Vec<Term>) {
    let scaled = |t: &Term| -> Term {
        match m {
            Some(m) => {
                Term { deg: t.deg + m.degree() as i32, mono: t.mono.mul(m), comp: t.comp, coeff: field.mul(t.coeff, c) }
            }
            None => Term { coeff: field.mul(t.coeff, c), ..t.clone() },
        }
    };
    let (mut i, mut j) = (0, 0);
    let mut pending: Option<Term> = None;
    loop {
        if pending.is_none() && j < b.len() {
            pending = Some(scaled(&b[j]));
            j += 1;
        }
        match (a.get(i), pending.as_ref()) {
            (None, None) => break,
            (Some(x), None) => {
                out.push(x.clone());
                i += 1;
            }
            (None, Some(_)) => {
                let y = pending.take().unwrap();
                if y.coeff != 0 {
                    out.push(y);
                }
            }
            (Some(x), Some(y)) => match term_cmp(x, y) {
                Ordering::Greater => {
                    out.push(x.clone());
                    i += 1;
                }
                Ordering::Less => {
                    let y = pending.take().unwrap();
                    if y.coeff != 0 {
                        out.push(y);
                    }
                }
                Ordering::Equal => {
                    let v = field.add(x.coeff, y.coeff);
                    if v != 0 {
                        out.push(Term { coeff: v, ..x.clone() });
                    }
                    i += 1;
                    pending = None;
                }
            },
        }
    }
}

/// One step `coeff * mono * basis[index]` of a division.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub index: usize,
    pub mono: Monomial,
    pub coeff: u32,
}

/// A Groebner basis of a submodule of `⊕ S(-twist_i)`; elements are monic.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    field: PrimeField,
    nvars: usize,
    twists: Vec<i32>,
    elements: Vec<Vector>,
    by_comp: Vec<Vec<usize>>,
}

impl GroebnerBasis {
    fn empty(field: PrimeField, nvars: usize, twists: Vec<i32>) -> Self {
        let by_comp = vec![Vec::new(); twists.len()];
        GroebnerBasis { field, nvars, twists, elements: Vec::new(), by_comp }
    }

    pub fn twists(&self) -> &[i32] {
        &self.twists
    }

    pub fn elements(&self) -> &[Vector] {
        &self.elements
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    fn push(&mut self, v: Vector) -> usize {
        let comp = v.lead().expect("basis elements are nonzero").comp;
        self.elements.push(v);
        let i = self.elements.len() - 1;
        self.by_comp[comp].push(i);
        i
    }

    fn find_reducer(&self, t: &Term) -> Option<usize> {
        self.by_comp[t.comp].iter().copied().find(|&i| self.elements[i].terms[0].mono.divides(&t.mono))
    }

    /// Full reduction, returning the remainder and the division steps.
    pub fn reduce_with_quotients(&self, v: &Vector) -> (Vector, Vec<Quotient>) {
        let mut work = v.clone();
        let mut quotients = Vec::new();
        let mut pos = 0;
        while pos < work.terms.len() {
            let t = &work.terms[pos];
            match self.find_reducer(t) {
                Some(i) => {
                    let lead = &self.elements[i].terms[0];
                    let m = lead.mono.quotient_of(&t.mono).unwrap();
                    let c = t.coeff;
                    work.axpy_tail(&self.field, pos, &self.elements[i], self.field.neg(c), &m);
                    quotients.push(Quotient { index: i, mono: m, coeff: c });
                }
                None => pos += 1,
            }
        }
        (work, quotients)
    }

    pub fn normal_form(&self, v: &Vector) -> Vector {
        self.reduce_with_quotients(v).0
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.normal_form(v).is_zero()
    }

    pub fn leading_terms(&self) -> impl Iterator<Item = &Term> {
        self.elements.iter().map(|e| &e.terms[0])
    }

    /// Standard monomials `(m, i)` with `deg(m) + twist_i = d`: the basis of
    /// the degree-`d` piece of the quotient module.
    pub fn standard_monomials(&self, d: i32) -> Vec<(Monomial, usize)> {
        let mut out = Vec::new();
        for (comp, &tw) in self.twists.iter().enumerate() {
            let md = d - tw;
            if md < 0 {
                continue;
            }
            for m in Monomial::all_of_degree(self.nvars, md as u32) {
                let reducible = self.by_comp[comp].iter().any(|&i| self.elements[i].terms[0].mono.divides(&m));
                if !reducible {
                    out.push((m, comp));
                }
            }
        }
        out
    }

    /// Number of standard monomials of degree `d` (the Hilbert function).
    pub fn hilbert_function(&self, d: i32) -> usize {
        self.standard_monomials(d).len()
    }

    /// Whether the quotient module is zero, i.e. every component has a unit lead.
    pub fn quotient_is_zero(&self) -> bool {
        (0..self.twists.len()).all(|c| self.by_comp[c].iter().any(|&i| self.elements[i].terms[0].mono.is_one()))
    }

    /// Assembles the basis of a direct sum from bases of the summands.
    pub fn direct_sum(parts: &[(&GroebnerBasis, i32)]) -> GroebnerBasis {
        let first = parts.first().expect("nonempty direct sum");
        let field = first.0.field;
        let nvars = first.0.nvars;
        let mut twists = Vec::new();
        let mut elements = Vec::new();
        for (gb, shift) in parts {
            let offset = twists.len();
            twists.extend(gb.twists.iter().map(|t| t + shift));
            let map: Vec<Option<usize>> = (0..gb.twists.len()).map(|c| Some(c + offset)).collect();
            elements.extend(gb.elements.iter().map(|e| e.reindex(&field, &map, *shift)));
        }
        let mut out = GroebnerBasis::empty(field, nvars, twists);
        for e in elements {
            out.push(e);
        }
        out
    }
}

/// Reduces each component of `v` modulo the ideal basis.
pub fn reduce_mod_ideal(field: &PrimeField, v: &Vector, ideal: &[Polynomial]) -> Vector {
    if ideal.is_empty() || v.is_zero() {
        return v.clone();
    }
    let mut work = v.clone();
    let mut pos = 0;
    while pos < work.terms.len() {
        let t = &work.terms[pos];
        let hit = ideal.iter().find(|g| g.leading().unwrap().0.divides(&t.mono));
        match hit {
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let m = lm.quotient_of(&t.mono).unwrap();
                let c = field.mul(t.coeff, field.inv(*lc).unwrap());
                let twist = t.deg - t.mono.degree() as i32;
                let gv = Vector::from_poly(g, t.comp, twist);
                work.axpy_tail(field, pos, &gv, field.neg(c), &m);
            }
            None => pos += 1,
        }
    }
    work
}

/// Result of a degree-by-degree Buchberger run.
#[derive(Clone, Debug)]
pub struct GbRun {
    pub basis: GroebnerBasis,
    /// Indices of the user generators that are minimal modulo the fixed part.
    pub minimal: Vec<usize>,
    /// Syzygies among the user generators modulo the fixed part, in the free
    /// module whose twists are the user degrees; empty unless tracking.
    pub syzygies: Vec<Vector>,
    /// Each basis element in user coordinates, modulo the fixed part.
    pub tracks: Vec<Vector>,
}

impl GbRun {
    /// Coefficients `c` with `sum c_u * user_u = w` modulo the fixed part.
    /// Needs a tracked run.
    pub fn lift(&self, w: &Vector) -> Result<Vector> {
        let (r, qs) = self.basis.reduce_with_quotients(w);
        if !r.is_zero() {
            return Err(Error::NotInImage);
        }
        let field = self.basis.field;
        Ok(subtract_quotients(&field, Vector::zero(), &qs, &self.tracks).neg(&field))
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    comp: usize,
    deg: i32,
}

/// Input description for [`run`].
pub struct GbProblem<'a> {
    pub field: PrimeField,
    pub nvars: usize,
    pub twists: &'a [i32],
    /// Quotient ideal basis; `I * e_j` joins the fixed part for every `j`.
    pub ideal: &'a [Polynomial],
    /// Generators that only enlarge the submodule (relations).
    pub fixed: Vec<Vector>,
    /// Generators whose minimality and syzygies are reported, with degrees.
    pub user: Vec<(Vector, i32)>,
    pub track: bool,
}

enum Item {
    Fixed(Vector, bool),
    User(usize),
}

pub fn run(problem: GbProblem<'_>) -> Result<GbRun> {
    let GbProblem { field, nvars, twists, ideal, fixed, user, track } = problem;
    let mut items: BTreeMap<i32, Vec<Item>> = BTreeMap::new();
    let user_degs: Vec<i32> = user.iter().map(|(_, d)| *d).collect();
    let check = |v: &Vector| -> Result<()> {
        if !v.is_homogeneous() {
            return Err(Error::Inhomogeneous(format!("module element with {} terms", v.terms.len())));
        }
        if let Some(c) = v.max_comp() {
            if c >= twists.len() {
                return Err(Error::Shape(format!("component {c} outside free module of rank {}", twists.len())));
            }
        }
        if v.terms.iter().any(|t| t.deg != t.mono.degree() as i32 + twists[t.comp]) {
            return Err(Error::Inhomogeneous("term degree disagrees with twist".into()));
        }
        Ok(())
    };
    for (j, &tw) in twists.iter().enumerate() {
        for g in ideal {
            let v = Vector::from_poly(g, j, tw);
            let d = v.degree().expect("homogeneous ideal");
            items.entry(d).or_default().push(Item::Fixed(v, true));
        }
    }
    for v in fixed {
        check(&v)?;
        if let Some(d) = v.degree() {
            items.entry(d).or_default().push(Item::Fixed(v, false));
        }
    }
    let mut user_vecs = Vec::with_capacity(user.len());
    let mut syzygies = Vec::new();
    for (u, (v, d)) in user.into_iter().enumerate() {
        check(&v)?;
        if let Some(vd) = v.degree() {
            if vd != d {
                return Err(Error::Inhomogeneous(format!("generator {u} has degree {vd}, declared {d}")));
            }
        }
        if v.is_zero() {
            if track {
                syzygies.push(Vector::unit(nvars, u, d));
            }
        } else {
            items.entry(d).or_default().push(Item::User(u));
        }
        user_vecs.push(v);
    }

    let mut basis = GroebnerBasis::empty(field, nvars, twists.to_vec());
    let mut tracks: Vec<Vector> = Vec::new();
    let mut pure_ideal: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut minimal = Vec::new();

    let reduce_track = |t: Vector| reduce_mod_ideal(&field, &t, ideal);

    loop {
        let next_pair = pairs.iter().map(|p| p.deg).min();
        let next_item = items.keys().next().copied();
        let d = match (next_pair, next_item) {
            (None, None) => break,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let (mut now, rest): (Vec<Pair>, Vec<Pair>) = pairs.into_iter().partition(|p| p.deg == d);
        pairs = rest;
        now.sort_by_key(|a| (a.i, a.j));
        trace!("degree {d}: {} pairs, basis size {}", now.len(), basis.elements.len());

        let mut additions: Vec<(Vector, Vector, bool, Option<usize>)> = Vec::new();
        for p in now {
            let (bi, bj) = (&basis.elements[p.i], &basis.elements[p.j]);
            let mi = bi.terms[0].mono.quotient_of(&p.lcm).unwrap();
            let mj = bj.terms[0].mono.quotient_of(&p.lcm).unwrap();
            let mut s = bi.mul_term(&field, &mi, 1);
            s = s.axpy(&field, &bj.mul_term(&field, &mj, 1), field.neg(1));
            let (r, qs) = basis.reduce_with_quotients(&s);
            let t = if track {
                let mut t = tracks[p.i].mul_term(&field, &mi, 1);
                t = t.axpy(&field, &tracks[p.j].mul_term(&field, &mj, 1), field.neg(1));
                subtract_quotients(&field, t, &qs, &tracks)
            } else {
                Vector::zero()
            };
            if r.is_zero() {
                if track {
                    let t = reduce_track(t);
                    if !t.is_zero() {
                        syzygies.push(t);
                    }
                }
            } else {
                let idx = add_element(&field, &mut basis, &mut tracks, &mut pure_ideal, r, t, false, track, ideal);
                update_pairs(&basis, &pure_ideal, &mut pairs, idx);
            }
        }
        for item in items.remove(&d).unwrap_or_default() {
            match item {
                Item::Fixed(v, pure) => {
                    let (r, qs) = basis.reduce_with_quotients(&v);
                    let t =
                        if track { subtract_quotients(&field, Vector::zero(), &qs, &tracks) } else { Vector::zero() };
                    if r.is_zero() {
                        if track {
                            let t = reduce_track(t);
                            if !t.is_zero() {
                                syzygies.push(t);
                            }
                        }
                    } else {
                        let pure = pure && qs.is_empty();
                        let idx =
                            add_element(&field, &mut basis, &mut tracks, &mut pure_ideal, r, t, pure, track, ideal);
                        update_pairs(&basis, &pure_ideal, &mut pairs, idx);
                    }
                }
                Item::User(u) => {
                    additions.push((user_vecs[u].clone(), Vector::unit(nvars, u, user_degs[u]), false, Some(u)))
                }
            }
        }
        for (v, unit, _, u) in additions {
            let (r, qs) = basis.reduce_with_quotients(&v);
            let t = if track { subtract_quotients(&field, unit, &qs, &tracks) } else { Vector::zero() };
            if r.is_zero() {
                if track {
                    let t = reduce_track(t);
                    if !t.is_zero() {
                        syzygies.push(t);
                    }
                }
            } else {
                minimal.push(u.unwrap());
                let idx = add_element(&field, &mut basis, &mut tracks, &mut pure_ideal, r, t, false, track, ideal);
                update_pairs(&basis, &pure_ideal, &mut pairs, idx);
            }
        }
    }
    Ok(GbRun { basis, minimal, syzygies, tracks })
}

fn subtract_quotients(field: &PrimeField, mut t: Vector, qs: &[Quotient], tracks: &[Vector]) -> Vector {
    for q in qs {
        if !tracks[q.index].is_zero() {
            t.axpy_tail(field, 0, &tracks[q.index], field.neg(q.coeff), &q.mono);
        }
    }
    t
}

#[allow(clippy::too_many_arguments)]
fn add_element(
    field: &PrimeField,
    basis: &mut GroebnerBasis,
    tracks: &mut Vec<Vector>,
    pure_ideal: &mut Vec<bool>,
    r: Vector,
    t: Vector,
    pure: bool,
    track: bool,
    ideal: &[Polynomial],
) -> usize {
    let inv = field.inv(r.terms[0].coeff).unwrap();
    let r = r.scale(field, inv);
    let t = if track { reduce_mod_ideal(field, &t.scale(field, inv), ideal) } else { t };
    tracks.push(t);
    pure_ideal.push(pure);
    basis.push(r)
}

/// Gebauer-Moeller update after appending basis element `t`.
fn update_pairs(basis: &GroebnerBasis, pure_ideal: &[bool], pairs: &mut Vec<Pair>, t: usize) {
    let lt = &basis.elements[t].terms[0];
    let lead = |i: usize| &basis.elements[i].terms[0];
    pairs.retain(|p| {
        if p.comp != lt.comp || !lt.mono.divides(&p.lcm) {
            return true;
        }
        let li = lead(p.i).mono.lcm(&lt.mono);
        let lj = lead(p.j).mono.lcm(&lt.mono);
        li == p.lcm || lj == p.lcm
    });
    let mut cands: Vec<(usize, Monomial)> =
        basis.by_comp[lt.comp].iter().copied().filter(|&i| i != t).map(|i| (i, lead(i).mono.lcm(&lt.mono))).collect();
    // criterion M: drop pairs whose lcm is a proper multiple of another new lcm
    let snapshot = cands.clone();
    cands.retain(|(_, l)| !snapshot.iter().any(|(_, o)| o != l && o.divides(l)));
    // criterion F: one pair per lcm
    let mut seen: HashMap<Monomial, ()> = HashMap::new();
    cands.retain(|(_, l)| seen.insert(l.clone(), ()).is_none());
    for (i, l) in cands {
        if pure_ideal[i] && pure_ideal[t] {
            continue;
        }
        let deg = l.degree() as i32 + basis.twists[lt.comp];
        pairs.push(Pair { i, j: t, lcm: l, comp: lt.comp, deg });
    }
}

/// Groebner basis of the submodule generated by `generators` in `⊕ S(-twist_i)`.
pub fn buchberger(ring: &Ring, twists: &[i32], generators: &[Vector]) -> Result<GroebnerBasis> {
    let user = generators
        .iter()
        .map(|v| {
            let d = v.degree().or(if v.is_zero() { Some(0) } else { None });
            d.map(|d| (v.clone(), d)).ok_or_else(|| Error::Inhomogeneous("generator".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let run = run(GbProblem {
        field: *ring.field(),
        nvars: ring.nvars(),
        twists,
        ideal: ring.ideal_gb(),
        fixed: Vec::new(),
        user,
        track: false,
    })?;
    Ok(interreduce(run.basis))
}

/// Reduces every tail so the basis is the reduced Groebner basis.
pub fn interreduce(gb: GroebnerBasis) -> GroebnerBasis {
    let mut out = GroebnerBasis::empty(gb.field, gb.nvars, gb.twists.clone());
    for (i, e) in gb.elements.iter().enumerate() {
        let mut others = GroebnerBasis::empty(gb.field, gb.nvars, gb.twists.clone());
        for (j, f) in gb.elements.iter().enumerate() {
            if j != i {
                others.push(f.clone());
            }
        }
        let lead = Vector { terms: vec![e.terms[0].clone()] };
        let tail = Vector { terms: e.terms[1..].to_vec() };
        out.push(lead.add(&gb.field, &others.normal_form(&tail)));
    }
    out
}

/// Syzygies of the generators of a Groebner basis, as columns of a matrix
/// from `⊕ S(-deg g_i)` into the free module on the generators.
pub fn syzygies(ring: &Ring, gb: &GroebnerBasis) -> Result<Vec<Vector>> {
    let user: Vec<(Vector, i32)> = gb.elements.iter().map(|e| (e.clone(), e.terms[0].deg)).collect();
    let run = run(GbProblem {
        field: *ring.field(),
        nvars: ring.nvars(),
        twists: &gb.twists,
        ideal: &[],
        fixed: Vec::new(),
        user,
        track: true,
    })?;
    Ok(run.syzygies)
}

impl Ring {
    /// The quotient `S/(gens)`; generators must be homogeneous.
    pub fn quotient(&self, gens: Vec<Polynomial>) -> Result<Ring> {
        if self.is_quotient() {
            let mut all = self.ideal_generators().to_vec();
            all.extend(gens);
            return self.ambient().quotient(all);
        }
        for g in &gens {
            if !g.is_homogeneous() {
                return Err(Error::Inhomogeneous(self.format(g)));
            }
        }
        let vecs: Vec<Vector> = gens.iter().filter(|g| !g.is_zero()).map(|g| Vector::from_poly(g, 0, 0)).collect();
        let gb = buchberger(self, &[0], &vecs)?;
        let mut polys: Vec<Polynomial> = gb.elements.iter().map(|e| e.component(0)).collect();
        polys.sort_by(|a, b| b.leading().unwrap().0.grevlex_cmp(&a.leading().unwrap().0));
        Ok(self.with_ideal(gens, polys))
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let v = Vector::from_poly(f, 0, 0);
        reduce_mod_ideal(self.field(), &v, self.ideal_gb()).component(0)
    }
}

/// Laurent polynomial `Q(t)` with `H_M(t) = Q(t) / (1 - t)^{n+1}`, read off
/// a finite free resolution over `S` as `sum (-1)^i β_{i,j} t^j`.
pub fn hilbert_numerator(resolution: &Complex) -> BTreeMap<i32, i64> {
    let mut q: BTreeMap<i32, i64> = BTreeMap::new();
    for (k, degs) in resolution.twists() {
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        for d in degs {
            *q.entry(d).or_insert(0) += s;
        }
    }
    q.retain(|_, c| *c != 0);
    q
}

/// Krull dimension via the order of the pole of the Hilbert series at
/// `t = 1`; `None` for the zero module.
pub fn krull_dimension(m: &PresentedModule) -> Result<Option<i32>> {
    let over_s = m.over_polynomial_ring()?;
    let n1 = over_s.ring().nvars();
    let res = minimal_free_resolution(&over_s, n1 + 1)?;
    let q = hilbert_numerator(&res.complex);
    let Some((&lo, _)) = q.iter().next() else {
        return Ok(None);
    };
    let hi = *q.keys().next_back().unwrap();
    let mut coeffs: Vec<i64> = (lo..=hi).map(|e| q.get(&e).copied().unwrap_or(0)).collect();
    let mut mult = 0;
    // divide by (t - 1) while 1 is a root
    while coeffs.len() > 1 && coeffs.iter().sum::<i64>() == 0 {
        let mut quotient = vec![0i64; coeffs.len() - 1];
        let mut carry = 0;
        for i in (1..coeffs.len()).rev() {
            carry += coeffs[i];
            quotient[i - 1] = carry;
        }
        coeffs = quotient;
        mult += 1;
    }
    Ok(Some(n1 as i32 - mult))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Ring {
        Ring::standard(32003, n).unwrap()
    }

    fn ideal_gb(r: &Ring, gens: &[&str]) -> GroebnerBasis {
        let vs: Vec<Vector> = gens.iter().map(|g| Vector::from_poly(&r.parse(g).unwrap(), 0, 0)).collect();
        buchberger(r, &[0], &vs).unwrap()
    }

    fn polys(gb: &GroebnerBasis) -> Vec<Polynomial> {
        gb.elements().iter().map(|e| e.component(0)).collect()
    }

    pub(crate) const F2_QUADRICS: [&str; 6] =
        ["x4^2-x3*x5", "x3*x4-x2*x5", "x1*x4-x0*x5", "x3^2-x2*x4", "x1*x3-x0*x4", "x1*x2-x0*x3"];

    #[test]
    fn monomial_ideals_are_their_own_basis() {
        let r = ring(3);
        let gb = ideal_gb(&r, &["x0^2", "x0*x1"]);
        assert_eq!(polys(&gb), vec![r.parse("x0^2").unwrap(), r.parse("x0*x1").unwrap()]);
        let gb = ideal_gb(&r, &["x0*x1"]);
        assert_eq!(polys(&gb), vec![r.parse("x0*x1").unwrap()]);
    }

    #[test]
    fn normal_forms() {
        let r = ring(3);
        let gb = ideal_gb(&r, &["x0*x1"]);
        let nf = |s: &str| gb.normal_form(&Vector::from_poly(&r.parse(s).unwrap(), 0, 0)).component(0);
        assert!(nf("x0*x1*x2").is_zero());
        assert_eq!(nf("x2^2"), r.parse("x2^2").unwrap());
    }

    #[test]
    fn f2_quadrics() {
        let r = ring(6);
        let gb = ideal_gb(&r, &F2_QUADRICS);
        // every S-pair reduces to zero
        for (i, a) in gb.elements().iter().enumerate() {
            for b in &gb.elements()[i + 1..] {
                let (la, lb) = (&a.lead().unwrap().mono, &b.lead().unwrap().mono);
                let l = la.lcm(lb);
                let k = r.field();
                let s = a
                    .mul_term(k, &la.quotient_of(&l).unwrap(), 1)
                    .sub(k, &b.mul_term(k, &lb.quotient_of(&l).unwrap(), 1));
                assert!(gb.contains(&s));
            }
        }
        let x4sq = Vector::from_poly(&r.parse("x4^2").unwrap(), 0, 0);
        let nf = gb.normal_form(&x4sq);
        assert_eq!(nf.component(0), r.parse("x3*x5").unwrap());
        assert_eq!(gb.normal_form(&nf), nf);
        // affine cone over a surface of degree 4: HF(d) = (d+1)(2d+1) for this scroll
        for d in 0..6 {
            assert_eq!(gb.hilbert_function(d) as i32, (d + 1) * (2 * d + 1));
        }
    }

    #[test]
    fn syzygy_examples() {
        let r = ring(3);
        let k = *r.field();
        let gb = ideal_gb(&r, &["x0^2", "x0*x1"]);
        let syz = syzygies(&r, &gb).unwrap();
        assert_eq!(syz.len(), 1);
        assert_eq!(syz[0].degree(), Some(3));
        let comps = syz[0].components(2);
        let x1 = r.parse("x1").unwrap();
        let neg_x0 = r.parse("-x0").unwrap();
        assert!(comps == vec![x1.clone(), neg_x0.clone()] || comps == vec![x1.neg(&k), neg_x0.neg(&k)]);

        let gb = ideal_gb(&r, &["x0", "x1"]);
        let syz = syzygies(&r, &gb).unwrap();
        assert_eq!(syz.len(), 1);
        assert_eq!(syz[0].degree(), Some(2));

        let r6 = ring(6);
        let gb = ideal_gb(&r6, &F2_QUADRICS);
        let syz = syzygies(&r6, &gb).unwrap();
        for s in &syz {
            let comps = s.components(gb.elements().len());
            let mut acc = Polynomial::zero();
            for (c, g) in comps.iter().zip(polys(&gb)) {
                acc = acc.add(r6.field(), &c.mul(r6.field(), &g));
            }
            assert!(acc.is_zero());
        }
        // 8 linear syzygies generate; the run returns a generating set containing them
        let linear = syz.iter().filter(|s| s.degree() == Some(3)).count();
        assert!(linear >= 8);
    }

    #[test]
    fn rejects_inhomogeneous_input() {
        let r = ring(2);
        let v = Vector::from_poly(&r.parse("x0^2 + x1").unwrap(), 0, 0);
        assert!(matches!(buchberger(&r, &[0], &[v]), Err(Error::Inhomogeneous(_))));
        assert!(r.quotient(vec![r.parse("x0 + 1").unwrap()]).is_err());
    }

    #[test]
    fn quotient_ring_normal_form() {
        let r = ring(3).quotient(vec![ring(3).parse("x0*x1").unwrap()]).unwrap();
        assert!(r.normal_form(&r.parse("x0*x1").unwrap()).is_zero());
        assert_eq!(r.normal_form(&r.parse("x0*x2").unwrap()), r.parse("x0*x2").unwrap());
    }

    #[test]
    fn graded_piece_sizes() {
        let r = ring(3);
        let gb = ideal_gb(&r, &[]);
        assert_eq!(gb.hilbert_function(2), 6);
        let gb = ideal_gb(&r, &["x0*x1"]);
        assert_eq!(gb.hilbert_function(2), 5);
        assert_eq!(gb.hilbert_function(-1), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_ideal() -> impl Strategy<Value = Vec<Vec<u16>>> {
            proptest::collection::vec(proptest::collection::vec(0u16..3, 4), 1..4)
        }

        // brute-force dimension: largest set of variables containing no generator support
        fn independent_set_dim(gens: &[Vec<u16>]) -> usize {
            let n = 4;
            (0u32..(1 << n))
                .filter(|mask| gens.iter().all(|g| g.iter().enumerate().any(|(i, &e)| e > 0 && mask & (1 << i) == 0)))
                .map(|mask| mask.count_ones() as usize)
                .max()
                .unwrap_or(0)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn nf_idempotent_and_hilbert_consistent(
                coeffs in proptest::collection::vec(1u32..100, 6),
                degs in proptest::collection::vec(1u32..3, 2),
            ) {
                let r = ring(3);
                let k = *r.field();
                let gens: Vec<Vector> = degs.iter().enumerate().map(|(g, &d)| {
                    let ms = Monomial::all_of_degree(3, d);
                    let terms = ms.iter().enumerate()
                        .map(|(i, m)| (m.clone(), coeffs[(i + 3 * g) % coeffs.len()] * ((i + g) as u32 % 3)))
                        .collect();
                    Vector::from_poly(&Polynomial::from_terms(&k, terms), 0, 0)
                }).collect();
                let gb = buchberger(&r, &[0], &gens).unwrap();
                for d in 0..=8u32 {
                    for m in Monomial::all_of_degree(3, d) {
                        let v = Vector::from_poly(&Polynomial::monomial(m, 1), 0, 0);
                        let nf = gb.normal_form(&v);
                        prop_assert_eq!(gb.normal_form(&nf), nf.clone());
                        for t in nf.terms() {
                            prop_assert!(gb.find_reducer(t).is_none());
                        }
                    }
                }
                for g in &gens { prop_assert!(gb.contains(g)); }
            }

            #[test]
            fn monomial_dimension_oracle(gens in small_ideal()) {
                let r = ring(4);
                let vs: Vec<Vector> = gens.iter()
                    .map(|e| Vector::from_poly(&Polynomial::monomial(Monomial::from_exponents(e).unwrap(), 1), 0, 0))
                    .collect();
                let gb = buchberger(&r, &[0], &vs).unwrap();
                // growth rate of the Hilbert function of S/I detects the dimension
                let dim = crate::groebner::tests::dimension_from_growth(&gb);
                prop_assert_eq!(dim, independent_set_dim(&gens));
            }
        }
    }

    /// Degree of polynomial growth of the Hilbert function via finite differences.
    pub(crate) fn dimension_from_growth(gb: &GroebnerBasis) -> usize {
        let vals: Vec<i64> = (0..24).map(|d| gb.hilbert_function(d) as i64).collect();
        let mut diffs = vals;
        let mut dim = 0;
        // dimension = 1 + degree of the Hilbert polynomial; 0 if eventually zero
        if diffs[20..].iter().all(|&x| x == 0) {
            return 0;
        }
        loop {
            dim += 1;
            let next: Vec<i64> = diffs.windows(2).map(|w| w[1] - w[0]).collect();
            if next[next.len() - 4..].iter().all(|&x| x == 0) {
                return dim;
            }
            diffs = next;
        }
    }
}
