//! Bounded cochain complexes of presented modules.
//!
//! Sign conventions, fixed here and nowhere else:
//! * shift: `C[i]^j = C^{i+j}` with differential `(-1)^i d`;
//! * cone of `f: A -> B`: `cone^j = A^{j+1} ⊕ B^j`, differential `[[-d_A, 0], [f, d_B]]`;
//! * Hom complex: a map `g` of degree `m` goes to `d_D g - (-1)^m g d_F`.
//!
//! A differential is stored by columns: column `b` is the image of generator
//! `b` of the source term, written in the free cover of the target term.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use log::debug;

use crate::error::{Error, Result};
use crate::gradedmod::{apply_columns, kernel_generators, ModuleMap, PresentedModule};
use crate::groebner::{reduce_mod_ideal, Vector};
use crate::linal::{cohomology_rank, sparse_cohomology_dim, Cohomology, DenseMatrix, PrimeField, SparseMatrix};
use crate::polyring::{Monomial, Polynomial, Ring};

fn sign(field: &PrimeField, i: i32) -> u32 {
    if i.rem_euclid(2) == 0 {
        1
    } else {
        field.neg(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    ring: Ring,
    lo: i32,
    terms: Vec<PresentedModule>,
    /// `diffs[k]` maps `terms[k]` to `terms[k + 1]`.
    diffs: Vec<Vec<Vector>>,
}

impl Complex {
    /// Builds and validates a complex whose lowest term sits in degree `lo`.
    pub fn new(ring: Ring, lo: i32, terms: Vec<PresentedModule>, diffs: Vec<Vec<Vector>>) -> Result<Self> {
        let c = Self::assemble(ring, lo, terms, diffs)?;
        c.check_well_defined()?;
        c.check_square_zero()?;
        Ok(c)
    }

    fn assemble(ring: Ring, lo: i32, terms: Vec<PresentedModule>, diffs: Vec<Vec<Vector>>) -> Result<Self> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::Shape(format!("{} terms need {} differentials", terms.len(), terms.len().max(1) - 1)));
        }
        for t in &terms {
            if t.ring() != &ring {
                return Err(Error::RingMismatch);
            }
        }
        let field = *ring.field();
        let mut reduced = Vec::with_capacity(diffs.len());
        for (k, cols) in diffs.into_iter().enumerate() {
            let (src, tgt) = (&terms[k], &terms[k + 1]);
            if cols.len() != src.rank() {
                return Err(Error::Shape(format!(
                    "differential from degree {} has {} columns for rank {}",
                    lo + k as i32,
                    cols.len(),
                    src.rank()
                )));
            }
            let mut out = Vec::with_capacity(cols.len());
            for (b, col) in cols.into_iter().enumerate() {
                for t in col.terms() {
                    let tw = *tgt.generator_degrees().get(t.comp).ok_or_else(|| {
                        Error::Shape(format!("differential from degree {} leaves the target", lo + k as i32))
                    })?;
                    if t.deg != src.generator_degrees()[b] || t.deg != t.mono.degree() as i32 + tw {
                        return Err(Error::Inhomogeneous(format!(
                            "differential from degree {} is not of degree 0",
                            lo + k as i32
                        )));
                    }
                }
                out.push(reduce_mod_ideal(&field, &col, ring.ideal_gb()));
            }
            reduced.push(out);
        }
        let mut c = Complex { ring, lo, terms, diffs: reduced };
        c.trim();
        Ok(c)
    }

    /// Drops rank-zero terms at both ends.
    fn trim(&mut self) {
        while self.terms.last().is_some_and(|t| t.rank() == 0) {
            self.terms.pop();
            self.diffs.pop();
        }
        while self.terms.first().is_some_and(|t| t.rank() == 0) {
            self.terms.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        if self.terms.is_empty() {
            self.lo = 0;
            self.diffs.clear();
        }
    }

    fn check_well_defined(&self) -> Result<()> {
        let field = *self.ring.field();
        for (k, cols) in self.diffs.iter().enumerate() {
            for rel in self.terms[k].relations() {
                let image = apply_columns(&field, cols, rel);
                if !self.terms[k + 1].is_zero_element(&image) {
                    return Err(Error::NotAComplex(format!(
                        "differential from degree {} does not respect relations",
                        self.lo + k as i32
                    )));
                }
            }
        }
        Ok(())
    }

    /// Verifies `d^{j+1} d^j = 0` for every `j`.
    pub fn check_square_zero(&self) -> Result<()> {
        let field = *self.ring.field();
        for k in 0..self.diffs.len().saturating_sub(1) {
            for col in &self.diffs[k] {
                let image = apply_columns(&field, &self.diffs[k + 1], col);
                if !self.terms[k + 2].is_zero_element(&image) {
                    return Err(Error::NotAComplex(format!("d^2 != 0 at degree {}", self.lo + k as i32)));
                }
            }
        }
        Ok(())
    }

    pub fn zero(ring: Ring) -> Self {
        Complex { ring, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    /// A module placed in degree `at`.
    pub fn from_module(m: PresentedModule, at: i32) -> Self {
        let ring = m.ring().clone();
        let mut c = Complex { ring, lo: at, terms: vec![m], diffs: Vec::new() };
        c.trim();
        c
    }

    /// Free complex `F^{top-k} -> ... -> F^top` from composable maps listed
    /// source first.
    pub fn from_maps(maps: &[ModuleMap], top: i32) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::Shape("no maps given".into()))?;
        let ring = first.source().ring().clone();
        let mut terms = vec![PresentedModule::free(ring.clone(), first.source().twists().to_vec())];
        let mut diffs = Vec::new();
        for (i, f) in maps.iter().enumerate() {
            if i > 0 && maps[i - 1].target().twists() != f.source().twists() {
                return Err(Error::Shape(format!("map {} does not start where map {} ends", i + 1, i)));
            }
            terms.push(PresentedModule::free(ring.clone(), f.target().twists().to_vec()));
            diffs.push(f.columns().to_vec());
        }
        Complex::new(ring, top - maps.len() as i32, terms, diffs)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &PrimeField {
        self.ring.field()
    }

    /// Lowest and highest stored degree, `None` for the zero complex.
    pub fn range(&self) -> Option<(i32, i32)> {
        (!self.terms.is_empty()).then(|| (self.lo, self.lo + self.terms.len() as i32 - 1))
    }

    pub fn term(&self, j: i32) -> Option<&PresentedModule> {
        let k = j.checked_sub(self.lo)?;
        usize::try_from(k).ok().and_then(|k| self.terms.get(k))
    }

    fn term_or_zero(&self, j: i32) -> PresentedModule {
        self.term(j).cloned().unwrap_or_else(|| PresentedModule::zero(self.ring.clone()))
    }

    /// Columns of `d^j`, empty outside the stored range.
    pub fn differential(&self, j: i32) -> &[Vector] {
        let k = j - self.lo;
        if k < 0 {
            return &[];
        }
        self.diffs.get(k as usize).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn differential_or_zero(&self, j: i32) -> Vec<Vector> {
        let d = self.differential(j);
        if d.is_empty() {
            vec![Vector::zero(); self.term(j).map_or(0, |t| t.rank())]
        } else {
            d.to_vec()
        }
    }

    pub fn is_free(&self) -> bool {
        self.terms.iter().all(PresentedModule::is_free)
    }

    /// Smallest degree of a nonzero term.
    pub fn inf(&self) -> Option<i32> {
        self.terms.iter().position(|t| !t.is_zero()).map(|k| self.lo + k as i32)
    }

    pub fn sup(&self) -> Option<i32> {
        self.terms.iter().rposition(|t| !t.is_zero()).map(|k| self.lo + k as i32)
    }

    pub fn shift(&self, i: i32) -> Complex {
        let field = *self.field();
        let s = sign(&field, i);
        Complex {
            ring: self.ring.clone(),
            lo: self.lo - i,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|cols| cols.iter().map(|c| c.scale(&field, s)).collect()).collect(),
        }
    }

    pub fn twist(&self, j: i32) -> Complex {
        let field = *self.field();
        Complex {
            ring: self.ring.clone(),
            lo: self.lo,
            terms: self.terms.iter().map(|t| t.twist(j)).collect(),
            diffs: self
                .diffs
                .iter()
                .enumerate()
                .map(|(k, cols)| {
                    let map: Vec<Option<usize>> = (0..self.terms[k + 1].rank()).map(Some).collect();
                    cols.iter().map(|c| c.reindex(&field, &map, -j)).collect()
                })
                .collect(),
        }
    }

    /// Termwise direct sum.
    pub fn direct_sum(ring: &Ring, parts: &[&Complex]) -> Result<Complex> {
        let field = *ring.field();
        let ranges: Vec<(i32, i32)> = parts.iter().filter_map(|c| c.range()).collect();
        if ranges.is_empty() {
            return Ok(Complex::zero(ring.clone()));
        }
        for p in parts {
            if p.ring() != ring {
                return Err(Error::RingMismatch);
            }
        }
        let lo = ranges.iter().map(|r| r.0).min().unwrap();
        let hi = ranges.iter().map(|r| r.1).max().unwrap();
        let zero = PresentedModule::zero(ring.clone());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for j in lo..=hi {
            let pieces: Vec<&PresentedModule> = parts.iter().map(|c| c.term(j).unwrap_or(&zero)).collect();
            terms.push(PresentedModule::direct_sum(ring, &pieces));
            if j < hi {
                let mut cols = Vec::new();
                let mut offset = 0;
                for c in parts {
                    let d = c.differential_or_zero(j);
                    cols.extend(d.iter().map(|v| v.offset(&field, offset)));
                    offset += c.term(j + 1).map_or(0, |t| t.rank());
                }
                diffs.push(cols);
            }
        }
        let mut c = Complex { ring: ring.clone(), lo, terms, diffs };
        c.trim();
        Ok(c)
    }

    /// Koszul complex on `elements`, in degrees `-c..=0`.
    pub fn koszul(ring: &Ring, elements: &[Polynomial]) -> Result<Complex> {
        let c = elements.len();
        let mut degs = Vec::with_capacity(c);
        for f in elements {
            if f.is_zero() {
                // degree is irrelevant for a zero entry
                degs.push(0);
            } else {
                degs.push(f.degree().ok_or_else(|| Error::Inhomogeneous(ring.format(f)))? as i32);
            }
        }
        let field = *ring.field();
        // subsets of size i, lexicographic
        let subsets: Vec<Vec<Vec<usize>>> = (0..=c).map(|i| subsets_of(c, i)).collect();
        let index: Vec<HashMap<Vec<usize>, usize>> =
            subsets.iter().map(|level| level.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect()).collect();
        let twist_of = |s: &[usize]| s.iter().map(|&i| degs[i]).sum::<i32>();
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for i in (0..=c).rev() {
            terms.push(PresentedModule::free(ring.clone(), subsets[i].iter().map(|s| twist_of(s)).collect()));
            if i == 0 {
                break;
            }
            let tgt_twists: Vec<i32> = subsets[i - 1].iter().map(|s| twist_of(s)).collect();
            let cols = subsets[i]
                .iter()
                .map(|s| {
                    let mut polys = vec![Polynomial::zero(); subsets[i - 1].len()];
                    for (pos, &e) in s.iter().enumerate() {
                        let mut rest = s.clone();
                        rest.remove(pos);
                        let sg = sign(&field, pos as i32);
                        polys[index[i - 1][&rest]] = elements[e].scale(&field, sg);
                    }
                    Vector::from_polys(&polys, &tgt_twists)
                })
                .collect();
            diffs.push(cols);
        }
        Complex::new(ring.clone(), -(c as i32), terms, diffs)
    }

    /// Componentwise `C_{≥r}` with the induced differentials and the inclusion.
    pub fn truncate(&self, r: i32) -> Result<(Complex, ChainMap)> {
        let Some((lo, hi)) = self.range() else {
            return Ok((self.clone(), ChainMap::zero(self.clone(), self.clone())));
        };
        let field = *self.field();
        let mut terms = Vec::new();
        let mut incls = Vec::new();
        for j in lo..=hi {
            let (t, incl) = self.term(j).unwrap().truncate(r)?;
            terms.push(t);
            incls.push(incl);
        }
        let mut diffs = Vec::new();
        for (k, j) in (lo..hi).enumerate() {
            let target = self.term(j + 1).unwrap();
            let degs = terms[k + 1].generator_degrees().to_vec();
            let lifter = target.lifter(&incls[k + 1], &degs)?;
            let mut cols = Vec::new();
            for g in &incls[k] {
                let w = apply_columns(&field, self.differential(j), g);
                let c = lifter.lift(&w)?;
                cols.push(reduce_mod_ideal(&field, &c, self.ring.ideal_gb()));
            }
            diffs.push(cols);
        }
        let trunc = Complex::assemble(self.ring.clone(), lo, terms, diffs)?;
        trunc.check_square_zero()?;
        let components = (lo..=hi).zip(incls).filter(|(j, _)| trunc.term(*j).is_some()).collect::<BTreeMap<_, _>>();
        let map = ChainMap { source: trunc.clone(), target: self.clone(), components };
        Ok((trunc, map))
    }

    /// The good truncation `τ_{≥k}`: degree `k` becomes `coker d^{k-1}`.
    pub fn good_truncation(&self, k: i32) -> Result<Complex> {
        let Some((lo, hi)) = self.range() else {
            return Ok(self.clone());
        };
        if k <= lo {
            return Ok(self.clone());
        }
        if k > hi {
            return Ok(Complex::zero(self.ring.clone()));
        }
        let mut terms: Vec<PresentedModule> = (k..=hi).map(|j| self.term(j).unwrap().clone()).collect();
        terms[0] = terms[0].with_relations(self.differential(k - 1))?;
        let diffs = (k..hi).map(|j| self.differential(j).to_vec()).collect();
        let c = Complex::assemble(self.ring.clone(), k, terms, diffs)?;
        Ok(c)
    }

    /// Good truncation just below the lowest nonzero cohomology module, a
    /// quasi-isomorphic complex with fewer terms.
    pub fn drop_exact_bottom(&self) -> Result<Complex> {
        let mut c = self.clone();
        while let Some(inf) = c.inf() {
            if !c.cohomology_module(inf)?.is_zero() {
                break;
            }
            c = c.good_truncation(inf + 1)?;
        }
        Ok(c)
    }

    /// `H^m` as a presented module.
    pub fn cohomology_module(&self, m: i32) -> Result<PresentedModule> {
        let Some(term) = self.term(m) else {
            return Ok(PresentedModule::zero(self.ring.clone()));
        };
        let next = self.term_or_zero(m + 1);
        let cycles = kernel_generators(&self.differential_or_zero(m), term.generator_degrees(), &next)?;
        let quotient = term.with_relations(self.differential(m - 1))?;
        Ok(quotient.submodule(&cycles)?.0)
    }

    /// The degree-`v` strand: a complex of finite-dimensional vector spaces.
    pub fn strand(&self, v: i32) -> StrandComplex {
        match self.range() {
            Some((lo, hi)) => self.strand_window(v, lo, hi),
            None => StrandComplex { field: *self.field(), lo: 0, bases: Vec::new(), matrices: Vec::new() },
        }
    }

    /// The degree-`v` strand restricted to positions `lo..=hi`.
    pub fn strand_window(&self, v: i32, lo: i32, hi: i32) -> StrandComplex {
        let field = *self.field();
        let bases: Vec<Vec<(Monomial, usize)>> =
            (lo..=hi).map(|j| self.term(j).map(|t| t.graded_piece_basis(v)).unwrap_or_default()).collect();
        let mut matrices = Vec::new();
        for (k, j) in (lo..hi).enumerate() {
            let index: HashMap<(Monomial, usize), usize> =
                bases[k + 1].iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
            let d = self.differential(j);
            let columns = match self.term(j + 1) {
                Some(next) if !d.is_empty() => bases[k]
                    .iter()
                    .map(|(mono, g)| next.sparse_coordinates(&d[*g].mul_term(&field, mono, 1), &index))
                    .collect(),
                _ => vec![Vec::new(); bases[k].len()],
            };
            matrices.push(SparseMatrix::from_columns(bases[k + 1].len(), columns).expect("coordinates are sorted"));
        }
        StrandComplex { field, lo, bases, matrices }
    }

    /// `(inf, sup, dim)`; `None` entries are the infinite sentinels of the
    /// zero complex.
    pub fn stats(&self) -> Result<ComplexStats> {
        let mut dim = None;
        if let Some((lo, hi)) = self.range() {
            for m in lo..=hi {
                let h = self.cohomology_module(m)?;
                dim = dim.max(crate::groebner::krull_dimension(&h)?);
            }
        }
        Ok(ComplexStats { inf: self.inf(), sup: self.sup(), dim })
    }

    /// `Hom(F, D)` for a complex `F` of free modules.
    pub fn hom(f: &Complex, d: &Complex) -> Result<Complex> {
        Ok(Self::hom_with_layout(f, d)?.0)
    }

    /// `Hom(F, D)` together with the position of each `Hom(F^j e_a, D^{j+m})` block.
    pub fn hom_with_layout(f: &Complex, d: &Complex) -> Result<(Complex, HomLayout)> {
        let ring = f.ring.clone();
        if d.ring != ring {
            return Err(Error::RingMismatch);
        }
        if let Some(j) = f.terms.iter().position(|t| !t.is_free()) {
            return Err(Error::NotFree(f.lo + j as i32));
        }
        let (Some((fl, fh)), Some((dl, dh))) = (f.range(), d.range()) else {
            return Ok((Complex::zero(ring), HomLayout::default()));
        };
        let field = *ring.field();
        let nvars = ring.nvars();
        let (mlo, mhi) = (dl - fh, dh - fl);
        // layout[m] lists blocks (j, a, offset) of Hom^m
        let mut layout: Vec<Vec<(i32, usize, usize)>> = Vec::new();
        let mut terms = Vec::new();
        for m in mlo..=mhi {
            let mut blocks = Vec::new();
            let mut parts: Vec<(&PresentedModule, i32)> = Vec::new();
            let mut offset = 0;
            for j in fl..=fh {
                let Some(target) = d.term(j + m) else { continue };
                for (a, &da) in f.term(j).unwrap().generator_degrees().iter().enumerate() {
                    blocks.push((j, a, offset));
                    parts.push((target, -da));
                    offset += target.rank();
                }
            }
            terms.push(PresentedModule::direct_sum_shifted(&ring, &parts));
            layout.push(blocks);
        }
        // coefficient polynomials of d_F: coeffs[j][a'] = components of column a' of d^j
        let fcoeff: BTreeMap<i32, Vec<Vec<Polynomial>>> = (fl..fh)
            .map(|j| {
                let rank = f.term(j + 1).unwrap().rank();
                (j, f.differential(j).iter().map(|c| c.components(rank)).collect())
            })
            .collect();
        let mut diffs = Vec::new();
        for (mi, m) in (mlo..mhi).enumerate() {
            let tgt_offsets: HashMap<(i32, usize), usize> =
                layout[mi + 1].iter().map(|&(j, a, off)| ((j, a), off)).collect();
            let tgt_twists = terms[mi + 1].generator_degrees().to_vec();
            let s = field.neg(sign(&field, m));
            let mut cols = Vec::with_capacity(terms[mi].rank());
            for &(j, a, _) in &layout[mi] {
                let dj = d.term(j + m).unwrap();
                let da = f.term(j).unwrap().generator_degrees()[a];
                let d_cols = d.differential(j + m);
                for b in 0..dj.rank() {
                    let mut col = Vector::zero();
                    if let Some(&off) = tgt_offsets.get(&(j, a)) {
                        if let Some(dc) = d_cols.get(b) {
                            let map: Vec<Option<usize>> =
                                (0..d.term(j + m + 1).map_or(0, |t| t.rank())).map(|c| Some(c + off)).collect();
                            col = col.add(&field, &dc.reindex(&field, &map, -da));
                        }
                    }
                    if let Some(coeffs) = fcoeff.get(&(j - 1)) {
                        let gb = dj.generator_degrees()[b];
                        for (a2, comps) in coeffs.iter().enumerate() {
                            let c = &comps[a];
                            if c.is_zero() {
                                continue;
                            }
                            let off = tgt_offsets[&(j - 1, a2)];
                            let unit = Vector::unit(nvars, off + b, tgt_twists[off + b]);
                            debug_assert_eq!(tgt_twists[off + b], gb - f.term(j - 1).unwrap().generator_degrees()[a2]);
                            col = col.axpy(&field, &unit.mul_poly(&field, c), s);
                        }
                    }
                    cols.push(col);
                }
            }
            diffs.push(cols);
        }
        let blocks = (mlo..=mhi)
            .zip(&layout)
            .map(|(m, blocks)| {
                let list = blocks
                    .iter()
                    .map(|&(j, a, offset)| HomBlock {
                        j,
                        a,
                        offset,
                        rank: d.term(j + m).unwrap().rank(),
                        degree: f.term(j).unwrap().generator_degrees()[a],
                    })
                    .collect();
                (m, list)
            })
            .collect();
        let c = Complex::assemble(ring, mlo, terms, diffs)?;
        c.check_square_zero()?;
        Ok((c, HomLayout { blocks }))
    }

    /// Total rank of all terms.
    pub fn size(&self) -> usize {
        self.terms.iter().map(|t| t.rank()).sum()
    }

    /// Generator degrees of each term from low to high.
    pub fn twists(&self) -> Vec<(i32, Vec<i32>)> {
        self.terms.iter().enumerate().map(|(k, t)| (self.lo + k as i32, t.generator_degrees().to_vec())).collect()
    }
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let rels = if t.is_free() { String::new() } else { format!("/{}", t.relations().len()) };
                let twists: Vec<String> = t.generator_degrees().iter().map(|d| (-d).to_string()).collect();
                format!("[{}] R({}){}", self.lo + k as i32, twists.join(","), rels)
            })
            .collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

/// Block `Hom(R(-degree), D^{j+m})` for generator `a` of `F^j`, occupying
/// generators `offset..offset + rank` of `Hom^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomBlock {
    pub j: i32,
    pub a: usize,
    pub offset: usize,
    pub rank: usize,
    pub degree: i32,
}

#[derive(Clone, Debug, Default)]
pub struct HomLayout {
    pub blocks: BTreeMap<i32, Vec<HomBlock>>,
}

impl HomLayout {
    /// Splits an element of `Hom^m` into the components `F^j -> D^{j+m}`,
    /// one column per generator of `F^j`.
    pub fn decode(&self, field: &PrimeField, f: &Complex, m: i32, element: &Vector) -> BTreeMap<i32, Vec<Vector>> {
        let mut out: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
        for b in self.blocks.get(&m).map(|v| v.as_slice()).unwrap_or(&[]) {
            let map: Vec<Option<usize>> = (0..b.offset + b.rank).map(|c| c.checked_sub(b.offset)).collect();
            let restricted = Vector::from_terms(
                field,
                element.terms().iter().filter(|t| t.comp >= b.offset && t.comp < b.offset + b.rank).cloned().collect(),
            );
            let col = restricted.reindex(field, &map, b.degree);
            let rank = f.term(b.j).map_or(0, |t| t.rank());
            out.entry(b.j).or_insert_with(|| vec![Vector::zero(); rank])[b.a] = col;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexStats {
    pub inf: Option<i32>,
    pub sup: Option<i32>,
    /// Krull dimension of the support of the cohomology.
    pub dim: Option<i32>,
}

/// Degree-0 chain map; `components[j]` has one column per generator of
/// `source^j`, written in the cover of `target^j`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Complex,
    pub target: Complex,
    pub components: BTreeMap<i32, Vec<Vector>>,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, components: BTreeMap<i32, Vec<Vector>>) -> Result<Self> {
        let map = ChainMap { source, target, components };
        map.validate()?;
        Ok(map)
    }

    pub fn zero(source: Complex, target: Complex) -> Self {
        ChainMap { source, target, components: BTreeMap::new() }
    }

    pub fn component(&self, j: i32) -> Vec<Vector> {
        match self.components.get(&j) {
            Some(c) => c.clone(),
            None => vec![Vector::zero(); self.source.term(j).map_or(0, |t| t.rank())],
        }
    }

    /// Checks degrees, compatibility with relations and with differentials.
    pub fn validate(&self) -> Result<()> {
        let field = *self.source.field();
        if self.source.ring != self.target.ring {
            return Err(Error::RingMismatch);
        }
        for (&j, cols) in &self.components {
            let src = self.source.term(j);
            let rank = src.map_or(0, |t| t.rank());
            if cols.len() != rank {
                return Err(Error::NotAChainMap(format!("component {j} has {} columns for rank {rank}", cols.len())));
            }
            let Some(src) = src else { continue };
            let tgt = self.target.term_or_zero(j);
            for (b, col) in cols.iter().enumerate() {
                if col.terms().iter().any(|t| t.deg != src.generator_degrees()[b] || t.comp >= tgt.rank()) {
                    return Err(Error::NotAChainMap(format!("component {j} is not homogeneous of degree 0")));
                }
            }
            for rel in src.relations() {
                if !tgt.is_zero_element(&apply_columns(&field, cols, rel)) {
                    return Err(Error::NotAChainMap(format!("component {j} does not respect relations")));
                }
            }
        }
        let Some((lo, hi)) = self.source.range() else { return Ok(()) };
        for j in lo..=hi {
            let next = self.target.term_or_zero(j + 1);
            let f_j = self.component(j);
            let f_next = self.component(j + 1);
            let d_src = self.source.differential_or_zero(j);
            let d_tgt = self.target.differential_or_zero(j);
            for b in 0..f_j.len() {
                let lhs = if d_tgt.is_empty() { Vector::zero() } else { apply_columns(&field, &d_tgt, &f_j[b]) };
                let rhs = if f_next.is_empty() { Vector::zero() } else { apply_columns(&field, &f_next, &d_src[b]) };
                if !next.is_zero_element(&lhs.sub(&field, &rhs)) {
                    return Err(Error::NotAChainMap(format!("square at degree {j} does not commute")));
                }
            }
        }
        Ok(())
    }

    /// `cone^j = source^{j+1} ⊕ target^j`.
    pub fn cone(&self) -> Result<Complex> {
        self.validate()?;
        let ring = self.source.ring.clone();
        let field = *ring.field();
        let ranges: Vec<(i32, i32)> =
            [self.source.range().map(|(a, b)| (a - 1, b - 1)), self.target.range()].into_iter().flatten().collect();
        if ranges.is_empty() {
            return Ok(Complex::zero(ring));
        }
        let lo = ranges.iter().map(|r| r.0).min().unwrap();
        let hi = ranges.iter().map(|r| r.1).max().unwrap();
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        let minus = field.neg(1);
        for j in lo..=hi {
            let a = self.source.term_or_zero(j + 1);
            let b = self.target.term_or_zero(j);
            terms.push(PresentedModule::direct_sum(&ring, &[&a, &b]));
            if j == hi {
                break;
            }
            let a_next_rank = self.source.term(j + 2).map_or(0, |t| t.rank());
            let mut cols = Vec::new();
            let d_a = self.source.differential_or_zero(j + 1);
            let f = self.component(j + 1);
            for k in 0..a.rank() {
                let da = if d_a.is_empty() { Vector::zero() } else { d_a[k].scale(&field, minus) };
                let fk = f.get(k).cloned().unwrap_or_default().offset(&field, a_next_rank);
                cols.push(da.add(&field, &fk));
            }
            let d_b = self.target.differential_or_zero(j);
            for k in 0..b.rank() {
                let db = d_b.get(k).cloned().unwrap_or_default();
                cols.push(db.offset(&field, a_next_rank));
            }
            diffs.push(cols);
        }
        let c = Complex::assemble(ring, lo, terms, diffs)?;
        c.check_square_zero()?;
        Ok(c)
    }
}

/// Finite-dimensional complex of vector spaces with monomial bases.
#[derive(Clone, Debug)]
pub struct StrandComplex {
    field: PrimeField,
    lo: i32,
    bases: Vec<Vec<(Monomial, usize)>>,
    /// `matrices[k]` goes from position `lo + k` to `lo + k + 1`.
    matrices: Vec<SparseMatrix>,
}

impl StrandComplex {
    pub fn dim(&self, m: i32) -> usize {
        self.index(m).map_or(0, |k| self.bases[k].len())
    }

    fn index(&self, m: i32) -> Option<usize> {
        let k = m - self.lo;
        (k >= 0 && (k as usize) < self.bases.len()).then_some(k as usize)
    }

    pub fn basis(&self, m: i32) -> &[(Monomial, usize)] {
        self.index(m).map_or(&[], |k| &self.bases[k])
    }

    /// Matrix of the differential leaving position `m`.
    pub fn matrix(&self, m: i32) -> DenseMatrix {
        self.sparse_matrix(m).to_dense()
    }

    pub fn sparse_matrix(&self, m: i32) -> SparseMatrix {
        match self.index(m) {
            Some(k) if k < self.matrices.len() => self.matrices[k].clone(),
            _ => SparseMatrix::zeros(self.dim(m + 1), self.dim(m)),
        }
    }

    pub fn positions(&self) -> std::ops::Range<i32> {
        self.lo..self.lo + self.bases.len() as i32
    }

    /// Cohomology at `m` with a basis of representative cycles.
    pub fn cohomology(&self, m: i32) -> Result<Cohomology> {
        cohomology_rank(&self.field, &self.matrix(m - 1), &self.matrix(m))
    }

    /// Cohomology dimension at `m` from sparse ranks.
    pub fn cohomology_dim(&self, m: i32) -> Result<usize> {
        sparse_cohomology_dim(&self.field, &self.sparse_matrix(m - 1), &self.sparse_matrix(m))
    }

    pub fn cohomology_dims(&self) -> Result<BTreeMap<i32, usize>> {
        self.positions().map(|m| Ok((m, self.cohomology_dim(m)?))).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.positions().map(|m| if m % 2 == 0 { self.dim(m) as i64 } else { -(self.dim(m) as i64) }).sum()
    }
}

/// Renders cohomology dimensions the way a homologically indexed complex is
/// printed: highest cohomological degree first, `k^a <- k^b <- ... <- 0`.
pub fn display_dims(dims: &BTreeMap<i32, usize>) -> String {
    let support: Vec<i32> = dims.iter().filter(|(_, &d)| d > 0).map(|(&m, _)| m).collect();
    let (Some(&lo), Some(&hi)) = (support.first(), support.last()) else {
        return "0".to_string();
    };
    let mut parts: Vec<String> = (lo..=hi)
        .rev()
        .map(|m| match dims.get(&m).copied().unwrap_or(0) {
            0 => "0".to_string(),
            d => format!("k^{d}"),
        })
        .collect();
    parts.push("0".to_string());
    parts.join(" <- ")
}

/// A free resolution and its quasi-isomorphism onto the input.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: Complex,
    pub augmentation: ChainMap,
}

/// Minimal free resolution of a bounded complex, computed down to degree
/// `sup(C) - length_cap`.
///
/// Works from the top degree down. At step `k` the free term `F^k` is a
/// minimal generating set for the degree-`k` cycles of the mapping cone of
/// `F^{>k} -> C` modulo its boundaries, which makes the cone acyclic in
/// degree `k` and keeps the resolution minimal.
pub fn resolve_complex(c: &Complex, length_cap: usize) -> Result<Resolution> {
    let ring = c.ring().clone();
    let field = *ring.field();
    let Some(sup) = c.sup() else {
        let z = Complex::zero(ring.clone());
        return Ok(Resolution { complex: z.clone(), augmentation: ChainMap::zero(z, c.clone()) });
    };
    let inf = c.inf().unwrap();
    let stop = sup - length_cap as i32;
    // F^k: generator degrees, d^k columns, augmentation columns
    let mut degs: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    let mut dcols: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
    let mut eps: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
    let empty: Vec<i32> = Vec::new();
    for k in (stop..=sup).rev() {
        let f1 = degs.get(&(k + 1)).unwrap_or(&empty).clone();
        let f2 = degs.get(&(k + 2)).unwrap_or(&empty).clone();
        let ck = c.term_or_zero(k);
        let cnext = c.term_or_zero(k + 1);
        let free2 = PresentedModule::free(ring.clone(), f2.clone());
        let target = PresentedModule::direct_sum(&ring, &[&free2, &cnext]);
        let minus = field.neg(1);
        let mut columns = Vec::with_capacity(f1.len() + ck.rank());
        for a in 0..f1.len() {
            let y = dcols.get(&(k + 1)).map(|d| d[a].scale(&field, minus)).unwrap_or_default();
            let e = eps[&(k + 1)][a].offset(&field, f2.len());
            columns.push(y.add(&field, &e));
        }
        let dk = c.differential_or_zero(k);
        for b in 0..ck.rank() {
            columns.push(dk.get(b).cloned().unwrap_or_default().offset(&field, f2.len()));
        }
        let mut src_degs = f1.clone();
        src_degs.extend_from_slice(ck.generator_degrees());
        let cycles = kernel_generators(&columns, &src_degs, &target)?;
        let mut boundaries: Vec<Vector> = ck.relations().iter().map(|r| r.offset(&field, f1.len())).collect();
        boundaries.extend(c.differential(k - 1).iter().map(|v| v.offset(&field, f1.len())));
        let q = PresentedModule::new(ring.clone(), src_degs, boundaries)?;
        let keep = q.minimal_subset(&cycles)?;
        let mut new_degs = Vec::with_capacity(keep.len());
        let mut new_d = Vec::with_capacity(keep.len());
        let mut new_eps = Vec::with_capacity(keep.len());
        let split_y: Vec<Option<usize>> = (0..f1.len() + ck.rank()).map(|i| (i < f1.len()).then_some(i)).collect();
        let split_c: Vec<Option<usize>> = (0..f1.len() + ck.rank()).map(|i| i.checked_sub(f1.len())).collect();
        for &i in &keep {
            let z = &cycles[i];
            new_degs.push(z.degree().expect("minimal generators are nonzero"));
            new_d.push(z.reindex(&field, &split_y, 0).scale(&field, minus));
            new_eps.push(z.reindex(&field, &split_c, 0));
        }
        debug!("resolution step {k}: {} generators", new_degs.len());
        if new_degs.is_empty() && k <= inf {
            break;
        }
        degs.insert(k, new_degs);
        dcols.insert(k, new_d);
        eps.insert(k, new_eps);
    }
    let Some((&lo, _)) = degs.iter().find(|(_, d)| !d.is_empty()) else {
        let z = Complex::zero(ring.clone());
        return Ok(Resolution { complex: z.clone(), augmentation: ChainMap::zero(z, c.clone()) });
    };
    let hi = *degs.keys().next_back().unwrap();
    let terms: Vec<PresentedModule> =
        (lo..=hi).map(|k| PresentedModule::free(ring.clone(), degs.get(&k).cloned().unwrap_or_default())).collect();
    let diffs: Vec<Vec<Vector>> = (lo..hi).map(|k| dcols.get(&k).cloned().unwrap_or_default()).collect();
    let complex = Complex::assemble(ring, lo, terms, diffs)?;
    complex.check_square_zero()?;
    let components = (lo..=hi).filter_map(|k| eps.remove(&k).map(|e| (k, e))).collect();
    let augmentation = ChainMap { source: complex.clone(), target: c.clone(), components };
    Ok(Resolution { complex, augmentation })
}

/// Removes constant entries by Gaussian elimination, leaving a homotopy
/// equivalent complex. A unit entry `e_b -> e_a` is eliminated only when no
/// relation involves `e_b` or `e_a`, so on free complexes the result is minimal.
pub fn minimize(c: &Complex) -> Result<Complex> {
    let field = *c.field();
    let ideal = c.ring.ideal_gb();
    let mut degs: Vec<Vec<i32>> = c.terms.iter().map(|t| t.generator_degrees().to_vec()).collect();
    let mut rels: Vec<Vec<Vector>> = c.terms.iter().map(|t| t.relations().to_vec()).collect();
    let mut diffs = c.diffs.clone();
    let touched = |rels: &[Vector], comp: usize| rels.iter().any(|r| r.terms().iter().any(|t| t.comp == comp));
    let drop = |n: usize, x: usize| -> Vec<Option<usize>> {
        (0..n).map(|i| (i != x).then(|| if i < x { i } else { i - 1 })).collect()
    };
    'outer: loop {
        for k in 0..diffs.len() {
            for (b, col) in diffs[k].iter().enumerate() {
                let Some(t) = col.terms().iter().find(|t| t.mono.is_one() && !touched(&rels[k + 1], t.comp)) else {
                    continue;
                };
                if touched(&rels[k], b) {
                    continue;
                }
                let (a, u) = (t.comp, t.coeff);
                let uinv = field.inv(u)?;
                let pivot = diffs[k][b].clone();
                let ncols = diffs[k].len();
                let drop_a = drop(degs[k + 1].len(), a);
                let drop_b = drop(ncols, b);
                let mut new_cols = Vec::with_capacity(ncols - 1);
                for j in 0..ncols {
                    if j == b {
                        continue;
                    }
                    let col = &diffs[k][j];
                    let w = col.component(a);
                    let mut v = col.clone();
                    if !w.is_zero() {
                        v = v.sub(&field, &pivot.mul_poly(&field, &w.scale(&field, uinv)));
                    }
                    new_cols.push(reduce_mod_ideal(&field, &v.reindex(&field, &drop_a, 0), ideal));
                }
                diffs[k] = new_cols;
                if k > 0 {
                    diffs[k - 1] = diffs[k - 1].iter().map(|v| v.reindex(&field, &drop_b, 0)).collect();
                }
                if k + 1 < diffs.len() {
                    diffs[k + 1].remove(a);
                }
                rels[k] = rels[k].iter().map(|r| r.reindex(&field, &drop_b, 0)).collect();
                rels[k + 1] = rels[k + 1].iter().map(|r| r.reindex(&field, &drop_a, 0)).collect();
                degs[k].remove(b);
                degs[k + 1].remove(a);
                continue 'outer;
            }
        }
        break;
    }
    let terms = degs
        .into_iter()
        .zip(rels)
        .map(|(d, r)| PresentedModule::new(c.ring.clone(), d, r))
        .collect::<Result<Vec<_>>>()?;
    let out = Complex::assemble(c.ring.clone(), c.lo, terms, diffs)?;
    out.check_square_zero()?;
    Ok(out)
}
