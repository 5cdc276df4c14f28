//! Graded free modules, homogeneous maps and finitely presented modules over
//! `S` or `R = S/I`.
//!
//! Generator degrees are stored directly: `⊕ R(-d_i)` has degrees `d_i`, so
//! the line bundle `O(d)` corresponds to degree `-d`. Elements of a presented
//! module are vectors over `S` in its free cover; they are compared modulo
//! the relations and `I`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::complexes::{resolve_complex, Complex};
use crate::error::{Error, Result};
use crate::groebner::{self, reduce_mod_ideal, GbProblem, GbRun, GroebnerBasis, Term, Vector};
use crate::linal::PrimeField;
use crate::polyring::{Monomial, Polynomial, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    ring: Ring,
    twists: Vec<i32>,
}

impl FreeModule {
    pub fn new(ring: Ring, twists: Vec<i32>) -> Self {
        FreeModule { ring, twists }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn twists(&self) -> &[i32] {
        &self.twists
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    /// `F(j)`: every generator degree drops by `j`.
    pub fn twist(&self, j: i32) -> FreeModule {
        FreeModule { ring: self.ring.clone(), twists: self.twists.iter().map(|t| t - j).collect() }
    }
}

/// `sum_j v_j * columns[j]`
pub fn apply_columns(field: &PrimeField, columns: &[Vector], v: &Vector) -> Vector {
    let mut out = Vector::zero();
    for t in v.terms() {
        let col = &columns[t.comp];
        if !col.is_zero() {
            out = out.axpy(field, &col.mul_term(field, &t.mono, t.coeff), 1);
        }
    }
    out
}

fn check_vector(v: &Vector, twists: &[i32], expected: Option<i32>) -> Result<()> {
    for t in v.terms() {
        let tw = twists
            .get(t.comp)
            .ok_or_else(|| Error::Shape(format!("component {} outside rank {}", t.comp, twists.len())))?;
        if t.deg != t.mono.degree() as i32 + tw {
            return Err(Error::Inhomogeneous("term degree disagrees with twist".into()));
        }
        if let Some(d) = expected {
            if t.deg != d {
                return Err(Error::Inhomogeneous(format!("entry of degree {} where {d} is required", t.deg)));
            }
        }
    }
    if expected.is_none() && !v.is_homogeneous() {
        return Err(Error::Inhomogeneous("mixed degrees".into()));
    }
    Ok(())
}

/// Degree-0 homogeneous map between free modules, stored by columns.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    source: FreeModule,
    target: FreeModule,
    columns: Vec<Vector>,
}

impl ModuleMap {
    /// `entries[i][j]` maps source generator `j` to target generator `i`.
    pub fn from_entries(source: FreeModule, target: FreeModule, entries: &[Vec<Polynomial>]) -> Result<Self> {
        if entries.len() != target.rank() || entries.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::Shape(format!(
                "matrix does not fit a map from rank {} to rank {}",
                source.rank(),
                target.rank()
            )));
        }
        let columns = (0..source.rank())
            .map(|j| {
                let col: Vec<Polynomial> = entries.iter().map(|row| row[j].clone()).collect();
                Vector::from_polys(&col, target.twists())
            })
            .collect();
        Self::from_columns(source, target, columns)
    }

    pub fn from_columns(source: FreeModule, target: FreeModule, columns: Vec<Vector>) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch);
        }
        if columns.len() != source.rank() {
            return Err(Error::Shape(format!("{} columns for rank {}", columns.len(), source.rank())));
        }
        let field = *source.ring.field();
        let ideal = source.ring.ideal_gb().to_vec();
        let mut reduced = Vec::with_capacity(columns.len());
        for (j, c) in columns.into_iter().enumerate() {
            check_vector(&c, target.twists(), Some(source.twists[j]))?;
            reduced.push(reduce_mod_ideal(&field, &c, &ideal));
        }
        Ok(ModuleMap { source, target, columns: reduced })
    }

    pub fn identity(f: FreeModule) -> Self {
        let nvars = f.ring.nvars();
        let columns = f.twists.iter().enumerate().map(|(i, &t)| Vector::unit(nvars, i, t)).collect();
        ModuleMap { source: f.clone(), target: f, columns }
    }

    pub fn zero(source: FreeModule, target: FreeModule) -> Self {
        let columns = vec![Vector::zero(); source.rank()];
        ModuleMap { source, target, columns }
    }

    pub fn source(&self) -> &FreeModule {
        &self.source
    }

    pub fn target(&self) -> &FreeModule {
        &self.target
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn entry(&self, i: usize, j: usize) -> Polynomial {
        self.columns[j].component(i)
    }

    pub fn entries(&self) -> Vec<Vec<Polynomial>> {
        let cols: Vec<Vec<Polynomial>> = self.columns.iter().map(|c| c.components(self.target.rank())).collect();
        (0..self.target.rank()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vector::is_zero)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let field = self.source.ring.field();
        reduce_mod_ideal(field, &apply_columns(field, &self.columns, v), self.source.ring.ideal_gb())
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &ModuleMap) -> Result<ModuleMap> {
        if inner.target.twists != self.source.twists || inner.target.ring != self.source.ring {
            return Err(Error::Shape("maps are not composable".into()));
        }
        let columns = inner.columns.iter().map(|c| self.apply(c)).collect();
        Ok(ModuleMap { source: inner.source.clone(), target: self.target.clone(), columns })
    }

    /// The dual map `G* -> F*` of `F -> G`.
    pub fn transpose(&self) -> ModuleMap {
        let entries = self.entries();
        let source = FreeModule::new(self.source.ring.clone(), self.target.twists.iter().map(|t| -t).collect());
        let target = FreeModule::new(self.source.ring.clone(), self.source.twists.iter().map(|t| -t).collect());
        let transposed: Vec<Vec<Polynomial>> =
            (0..self.source.rank()).map(|j| entries.iter().map(|row| row[j].clone()).collect()).collect();
        ModuleMap::from_entries(source, target, &transposed).expect("transpose of a homogeneous map")
    }

    pub fn cokernel(&self) -> PresentedModule {
        PresentedModule {
            ring: self.source.ring.clone(),
            gens: self.target.twists.clone(),
            relations: self.columns.iter().filter(|c| !c.is_zero()).cloned().collect(),
            gb: OnceLock::new(),
        }
    }

    pub fn image(&self) -> Result<PresentedModule> {
        let target = PresentedModule::free(self.target.ring.clone(), self.target.twists.clone());
        Ok(target.submodule(&self.columns)?.0)
    }

    pub fn kernel(&self) -> Result<PresentedModule> {
        let target = PresentedModule::free(self.target.ring.clone(), self.target.twists.clone());
        let gens = kernel_generators(&self.columns, self.source.twists(), &target)?;
        let source = PresentedModule::free(self.source.ring.clone(), self.source.twists.clone());
        Ok(source.submodule(&gens)?.0)
    }
}

/// Finitely presented graded module: the cokernel of `relations` in
/// `⊕ R(-gens_i)`.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    ring: Ring,
    gens: Vec<i32>,
    relations: Vec<Vector>,
    gb: OnceLock<GroebnerBasis>,
}

impl PresentedModule {
    pub fn new(ring: Ring, gens: Vec<i32>, relations: Vec<Vector>) -> Result<Self> {
        let field = *ring.field();
        let mut rels = Vec::with_capacity(relations.len());
        for r in relations {
            check_vector(&r, &gens, None)?;
            let r = reduce_mod_ideal(&field, &r, ring.ideal_gb());
            if !r.is_zero() {
                rels.push(r);
            }
        }
        Ok(PresentedModule { ring, gens, relations: rels, gb: OnceLock::new() })
    }

    pub fn free(ring: Ring, gens: Vec<i32>) -> Self {
        PresentedModule { ring, gens, relations: Vec::new(), gb: OnceLock::new() }
    }

    pub fn zero(ring: Ring) -> Self {
        Self::free(ring, Vec::new())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generator_degrees(&self) -> &[i32] {
        &self.gens
    }

    pub fn relations(&self) -> &[Vector] {
        &self.relations
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn cover(&self) -> FreeModule {
        FreeModule::new(self.ring.clone(), self.gens.clone())
    }

    pub fn field(&self) -> &PrimeField {
        self.ring.field()
    }

    /// Groebner basis of the relations together with `I` times the cover.
    pub fn gb(&self) -> &GroebnerBasis {
        self.gb.get_or_init(|| {
            groebner::buchberger(&self.ring, &self.gens, &self.relations).expect("relations were validated")
        })
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.gb().quotient_is_zero()
    }

    pub fn normal_form(&self, v: &Vector) -> Vector {
        self.gb().normal_form(v)
    }

    /// Whether `v` vanishes in the module.
    pub fn is_zero_element(&self, v: &Vector) -> bool {
        self.gb().contains(v)
    }

    pub fn graded_piece_basis(&self, d: i32) -> Vec<(Monomial, usize)> {
        self.gb().standard_monomials(d)
    }

    pub fn hilbert_function(&self, d: i32) -> usize {
        self.gb().hilbert_function(d)
    }

    pub fn max_generator_degree(&self) -> Option<i32> {
        self.gens.iter().copied().max()
    }

    pub fn min_generator_degree(&self) -> Option<i32> {
        self.gens.iter().copied().min()
    }

    /// `M(j)`: generator degrees drop by `j`.
    pub fn twist(&self, j: i32) -> PresentedModule {
        let field = *self.field();
        let map: Vec<Option<usize>> = (0..self.rank()).map(Some).collect();
        PresentedModule {
            ring: self.ring.clone(),
            gens: self.gens.iter().map(|g| g - j).collect(),
            relations: self.relations.iter().map(|r| r.reindex(&field, &map, -j)).collect(),
            gb: match self.gb.get() {
                Some(gb) => OnceLock::from(GroebnerBasis::direct_sum(&[(gb, -j)])),
                None => OnceLock::new(),
            },
        }
    }

    /// Direct sum; part `k` is twisted so its generator degrees move by `shift_k`.
    pub fn direct_sum_shifted(ring: &Ring, parts: &[(&PresentedModule, i32)]) -> PresentedModule {
        let field = *ring.field();
        let mut gens = Vec::new();
        let mut relations = Vec::new();
        for (m, shift) in parts {
            let offset = gens.len();
            gens.extend(m.gens.iter().map(|g| g + shift));
            let map: Vec<Option<usize>> = (0..m.rank()).map(|c| Some(c + offset)).collect();
            relations.extend(m.relations.iter().map(|r| r.reindex(&field, &map, *shift)));
        }
        let gb = OnceLock::new();
        if !parts.is_empty() {
            let gbs: Vec<(&GroebnerBasis, i32)> = parts.iter().map(|(m, s)| (m.gb(), *s)).collect();
            let _ = gb.set(GroebnerBasis::direct_sum(&gbs));
        }
        PresentedModule { ring: ring.clone(), gens, relations, gb }
    }

    pub fn direct_sum(ring: &Ring, parts: &[&PresentedModule]) -> PresentedModule {
        let parts: Vec<(&PresentedModule, i32)> = parts.iter().map(|m| (*m, 0)).collect();
        Self::direct_sum_shifted(ring, &parts)
    }

    /// Same generators with additional relations.
    pub fn with_relations(&self, extra: &[Vector]) -> Result<PresentedModule> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        PresentedModule::new(self.ring.clone(), self.gens.clone(), rels)
    }

    /// Indices of the candidates that form a minimal generating set of their
    /// span modulo the relations.
    pub fn minimal_subset(&self, candidates: &[Vector]) -> Result<Vec<usize>> {
        let user = with_degrees(candidates)?;
        let run = self.run(user, false)?;
        Ok(run.minimal)
    }

    fn run(&self, user: Vec<(Vector, i32)>, track: bool) -> Result<GbRun> {
        groebner::run(GbProblem {
            field: *self.field(),
            nvars: self.ring.nvars(),
            twists: &self.gens,
            ideal: self.ring.ideal_gb(),
            fixed: self.relations.clone(),
            user,
            track,
        })
    }

    /// A tracked run that expresses elements through `gens`.
    pub fn lifter(&self, gens: &[Vector], degrees: &[i32]) -> Result<GbRun> {
        let user = gens.iter().cloned().zip(degrees.iter().copied()).collect();
        self.run(user, true)
    }

    /// The submodule generated by `gens`, presented on a minimal subset of
    /// them; also returns that subset (the inclusion map's columns).
    pub fn submodule(&self, gens: &[Vector]) -> Result<(PresentedModule, Vec<Vector>)> {
        let keep = self.minimal_subset(gens)?;
        let chosen: Vec<Vector> = keep.iter().map(|&i| gens[i].clone()).collect();
        let degs: Vec<i32> = chosen.iter().map(|v| v.degree().expect("minimal generators are nonzero")).collect();
        let syz = kernel_generators(&chosen, &degs, self)?;
        let module = PresentedModule::new(self.ring.clone(), degs, syz)?;
        Ok((module, chosen))
    }

    /// The same graded vector space as an `S`-module.
    pub fn restrict_scalars(&self) -> Result<PresentedModule> {
        if !self.ring.is_quotient() {
            return Err(Error::NoQuotient);
        }
        let s = self.ring.ambient();
        let mut rels = self.relations.clone();
        for (j, &d) in self.gens.iter().enumerate() {
            for g in self.ring.ideal_generators() {
                rels.push(Vector::from_poly(g, j, d));
            }
        }
        PresentedModule::new(s, self.gens.clone(), rels)
    }

    /// This module viewed over `S`, restricting scalars when needed.
    pub fn over_polynomial_ring(&self) -> Result<PresentedModule> {
        if self.ring.is_quotient() {
            self.restrict_scalars()
        } else {
            Ok(self.clone())
        }
    }

    /// `M_{≥r}` together with the columns of its inclusion into `M`.
    ///
    /// Generated by a basis of `M_r` and the generators of degree above `r`.
    pub fn truncate(&self, r: i32) -> Result<(PresentedModule, Vec<Vector>)> {
        let nvars = self.ring.nvars();
        let mut gens: Vec<Vector> = self
            .graded_piece_basis(r)
            .into_iter()
            .map(|(m, c)| Vector::from_terms(self.field(), vec![Term { deg: r, mono: m, comp: c, coeff: 1 }]))
            .collect();
        for (j, &d) in self.gens.iter().enumerate() {
            if d > r {
                gens.push(Vector::unit(nvars, j, d));
            }
        }
        self.submodule(&gens)
    }

    /// Coordinates of `v` (homogeneous of degree `d`) in `graded_piece_basis(d)`.
    pub fn coordinates(&self, v: &Vector, index: &HashMap<(Monomial, usize), usize>, dim: usize) -> Vec<u32> {
        let mut out = vec![0u32; dim];
        for (k, x) in self.sparse_coordinates(v, index) {
            out[k] = x;
        }
        out
    }

    /// Nonzero coordinates of `v`, sorted by basis index.
    pub fn sparse_coordinates(&self, v: &Vector, index: &HashMap<(Monomial, usize), usize>) -> Vec<(usize, u32)> {
        let nf = self.normal_form(v);
        let mut out: Vec<(usize, u32)> =
            nf.terms().iter().map(|t| (index[&(t.mono.clone(), t.comp)], t.coeff)).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

impl PartialEq for PresentedModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.gens == other.gens && self.relations == other.relations
    }
}

impl fmt::Display for PresentedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens.iter().map(|d| format!("R({})", -d)).collect();
        if gens.is_empty() {
            return write!(f, "0");
        }
        write!(f, "coker({} relations on {})", self.relations.len(), gens.join(" + "))
    }
}

fn with_degrees(vs: &[Vector]) -> Result<Vec<(Vector, i32)>> {
    // zero candidates get a dummy degree; they are never minimal
    vs.iter()
        .map(|v| match v.degree() {
            Some(d) => Ok((v.clone(), d)),
            None if v.is_zero() => Ok((Vector::zero(), 0)),
            None => Err(Error::Inhomogeneous("generator".into())),
        })
        .collect()
}

/// Generators of the kernel of `⊕ R(-degrees_j) -> target`, `e_j ↦ columns[j]`.
pub fn kernel_generators(columns: &[Vector], degrees: &[i32], target: &PresentedModule) -> Result<Vec<Vector>> {
    let user: Vec<(Vector, i32)> = columns.iter().cloned().zip(degrees.iter().copied()).collect();
    let run = target.run(user, true)?;
    Ok(run.syzygies)
}

/// Minimal free resolution of a module with its Betti table.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    /// Free complex in cohomological degrees `-length..=0`.
    pub complex: Complex,
    pub betti: BettiTable,
}

/// Minimal free resolution over the module's own ring, stopping after
/// `length_cap` steps (resolutions over quotient rings need not end).
pub fn minimal_free_resolution(m: &PresentedModule, length_cap: usize) -> Result<FreeResolution> {
    let res = resolve_complex(&Complex::from_module(m.clone(), 0), length_cap)?;
    let levels: Vec<Vec<i32>> = (0..=length_cap as i32)
        .map(|i| res.complex.term(-i).map(|t| t.generator_degrees().to_vec()).unwrap_or_default())
        .collect();
    Ok(FreeResolution { complex: res.complex, betti: BettiTable::from_levels(&levels) })
}

/// Projective dimension and extreme generator degrees of the minimal
/// resolution over `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiStats {
    pub pd: Option<usize>,
    /// `max_degrees[i]` is the largest generator degree at step `i`.
    pub max_degrees: Vec<i32>,
    pub min_degrees: Vec<i32>,
}

impl BettiStats {
    /// Largest degree at step `i`; `None` plays minus infinity.
    pub fn a_max(&self, i: usize) -> Option<i32> {
        self.max_degrees.get(i).copied()
    }

    pub fn a_min(&self, i: usize) -> Option<i32> {
        self.min_degrees.get(i).copied()
    }
}

/// Betti data of `M` viewed as an `S`-module.
pub fn betti_stats(m: &PresentedModule) -> Result<BettiStats> {
    let over_s = m.over_polynomial_ring()?;
    let res = minimal_free_resolution(&over_s, over_s.ring().nvars() + 1)?;
    let pd = res.betti.projective_dimension();
    let steps = pd.map_or(0, |p| p + 1);
    Ok(BettiStats {
        pd,
        max_degrees: (0..steps).map(|i| res.betti.max_degree(i).expect("steps up to pd are nonempty")).collect(),
        min_degrees: (0..steps).map(|i| res.betti.min_degree(i).expect("steps up to pd are nonempty")).collect(),
    })
}

/// Graded Betti numbers `β_{i,j}` of a minimal free resolution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    entries: BTreeMap<(usize, i32), usize>,
}

impl BettiTable {
    /// From generator degrees of the homological steps `F_0, F_1, ...`.
    pub fn from_levels(levels: &[Vec<i32>]) -> Self {
        let mut entries = BTreeMap::new();
        for (i, degs) in levels.iter().enumerate() {
            for &d in degs {
                *entries.entry((i, d)).or_insert(0) += 1;
            }
        }
        BettiTable { entries }
    }

    pub fn get(&self, i: usize, j: i32) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, i32, usize)> + '_ {
        self.entries.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    /// Length of the resolution; `None` for the zero module.
    pub fn projective_dimension(&self) -> Option<usize> {
        self.entries.keys().map(|k| k.0).max()
    }

    pub fn total(&self, i: usize) -> usize {
        self.entries.iter().filter(|(k, _)| k.0 == i).map(|(_, b)| b).sum()
    }

    /// Largest degree at step `i`, `None` (that is, minus infinity) if the step is empty.
    pub fn max_degree(&self, i: usize) -> Option<i32> {
        self.entries.keys().filter(|k| k.0 == i).map(|k| k.1).max()
    }

    pub fn min_degree(&self, i: usize) -> Option<i32> {
        self.entries.keys().filter(|k| k.0 == i).map(|k| k.1).min()
    }

    /// Grid with rows `j - i` and columns `i`.
    pub fn to_grid(&self) -> String {
        let Some(pd) = self.projective_dimension() else {
            return "0\n".to_string();
        };
        let rows: Vec<i32> = self.entries.keys().map(|&(i, j)| j - i as i32).collect();
        let (lo, hi) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
        let cells = |i: usize, row: i32| -> String {
            match self.get(i, row + i as i32) {
                0 => ".".to_string(),
                b => b.to_string(),
            }
        };
        let width = (0..=pd)
            .map(|i| self.total(i).to_string().len())
            .chain((lo..=hi).flat_map(|r| (0..=pd).map(move |i| (r, i))).map(|(r, i)| cells(i, r).len()))
            .max()
            .unwrap_or(1);
        let label = (lo..=hi).map(|r| format!("{r}:").len()).max().unwrap().max("total:".len());
        let mut out = String::new();
        out.push_str(&format!("{:>label$}", ""));
        for i in 0..=pd {
            out.push_str(&format!(" {:>width$}", i));
        }
        out.push('\n');
        out.push_str(&format!("{:>label$}", "total:"));
        for i in 0..=pd {
            out.push_str(&format!(" {:>width$}", self.total(i)));
        }
        out.push('\n');
        for r in lo..=hi {
            out.push_str(&format!("{:>label$}", format!("{r}:")));
            for i in 0..=pd {
                out.push_str(&format!(" {:>width$}", cells(i, r)));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            i: usize,
            j: i32,
            beta: usize,
        }
        let v: Vec<Entry> = self.entries().map(|(i, j, beta)| Entry { i, j, beta }).collect();
        v.serialize(serializer)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn f2_ring() -> Ring {
        let s = Ring::standard(32003, 6).unwrap();
        let quadrics = ["x4^2-x3*x5", "x3*x4-x2*x5", "x1*x4-x0*x5", "x3^2-x2*x4", "x1*x3-x0*x4", "x1*x2-x0*x3"];
        s.quotient(quadrics.iter().map(|q| s.parse(q).unwrap()).collect()).unwrap()
    }

    fn row_map(r: &Ring, src: Vec<i32>, tgt: Vec<i32>, rows: &[&[&str]]) -> ModuleMap {
        let entries: Vec<Vec<Polynomial>> =
            rows.iter().map(|row| row.iter().map(|e| r.parse(e).unwrap()).collect()).collect();
        ModuleMap::from_entries(FreeModule::new(r.clone(), src), FreeModule::new(r.clone(), tgt), &entries).unwrap()
    }

    #[test]
    fn degree_condition_is_checked() {
        let r = Ring::standard(32003, 3).unwrap();
        let entries = vec![vec![r.parse("x0^2").unwrap()]];
        let bad =
            ModuleMap::from_entries(FreeModule::new(r.clone(), vec![1]), FreeModule::new(r.clone(), vec![0]), &entries);
        assert!(matches!(bad, Err(Error::Inhomogeneous(_))));
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let r = Ring::standard(32003, 3).unwrap();
        let id = ModuleMap::identity(FreeModule::new(r, vec![0, 1]));
        assert!(id.kernel().unwrap().is_zero());
        assert_eq!(id.kernel().unwrap().rank(), 0);
    }

    #[test]
    fn graded_pieces() {
        let s = Ring::standard(32003, 3).unwrap();
        assert_eq!(PresentedModule::free(s.clone(), vec![0]).graded_piece_basis(2).len(), 6);
        let r = s.quotient(vec![s.parse("x0*x1").unwrap()]).unwrap();
        assert_eq!(PresentedModule::free(r.clone(), vec![0]).graded_piece_basis(2).len(), 5);
        assert!(PresentedModule::free(r, vec![3]).graded_piece_basis(2).is_empty());
    }

    #[test]
    fn exact_sequence_hilbert_functions() {
        let s = Ring::standard(32003, 3).unwrap();
        let f = row_map(&s, vec![1, 1, 1], vec![0], &[&["x0", "x1", "x2"]]);
        let ker = f.kernel().unwrap();
        let im = f.image().unwrap();
        let coker = f.cokernel();
        for d in 0..6 {
            let src = 3 * PresentedModule::free(s.clone(), vec![1]).hilbert_function(d);
            assert_eq!(src, ker.hilbert_function(d) + im.hilbert_function(d));
            let tgt = PresentedModule::free(s.clone(), vec![0]).hilbert_function(d);
            assert_eq!(tgt, im.hilbert_function(d) + coker.hilbert_function(d));
        }
        assert_eq!(ker.generator_degrees(), &[2, 2, 2]);
    }

    #[test]
    fn f2_objects() {
        let r = f2_ring();
        let oe = row_map(&r, vec![1, 1, 1, 1], vec![0], &[&["x2", "x3", "x4", "x5"]]).cokernel();
        // a rational curve of degree 1 in the embedding: HF(d) = d + 1
        for d in 0..6 {
            assert_eq!(oe.hilbert_function(d), d as usize + 1);
        }
        let m = row_map(
            &r,
            vec![0, 0],
            vec![-1, -1, -1, -1],
            &[&["x5", "x4"], &["x4", "x3"], &["x3", "x2"], &["x1", "x0"]],
        );
        let b = m.image().unwrap();
        assert_eq!(b.rank(), 2);
        let s = restrict_example(&oe);
        for d in 0..5 {
            assert_eq!(s.hilbert_function(d), oe.hilbert_function(d));
        }
    }

    fn restrict_example(m: &PresentedModule) -> PresentedModule {
        let s = m.restrict_scalars().unwrap();
        assert!(!s.ring().is_quotient());
        assert_eq!(s.relations().len(), m.relations().len() + 6);
        s
    }

    #[test]
    fn truncation() {
        let s = Ring::standard(32003, 3).unwrap();
        let free = PresentedModule::free(s.clone(), vec![0]);
        assert_eq!(free.truncate(0).unwrap().0.rank(), 1);
        assert_eq!(free.truncate(1).unwrap().0.rank(), 3);
        let (t, _) = free.truncate(2).unwrap();
        assert_eq!(t.generator_degrees(), &[2; 6]);
        for d in 0..7 {
            let expected = if d >= 2 { free.hilbert_function(d) } else { 0 };
            assert_eq!(t.hilbert_function(d), expected);
        }
    }

    #[test]
    fn betti_grid() {
        let b = BettiTable::from_levels(&[vec![0], vec![1, 1, 1], vec![2, 2, 2], vec![3]]);
        assert_eq!(b.projective_dimension(), Some(3));
        assert_eq!(b.to_grid(), "       0 1 2 3\ntotal: 1 3 3 1\n    0: 1 3 3 1\n");
        assert_eq!(b.max_degree(1), Some(1));
        assert_eq!(b.max_degree(4), None);
    }

    #[test]
    fn transpose_degrees() {
        let s = Ring::standard(32003, 3).unwrap();
        let f = row_map(&s, vec![1, 1], vec![0], &[&["x0", "x1"]]);
        let t = f.transpose();
        assert_eq!(t.source().twists(), &[0]);
        assert_eq!(t.target().twists(), &[-1, -1]);
        assert_eq!(t.entry(1, 0), s.parse("x1").unwrap());
    }
}
