//! Ext groups of sheafified complexes and derived global sections.
//!
//! `Ext^m_X(C~, D~(v))` for `v >= 0` is the degree-`v` part of
//! `Ext^m_R(C_{>=r}, D)` once `r` clears the truncation bound. Everything here
//! works on copies shifted so that `sup C = sup D = 0`; indices are shifted
//! back on output.

use std::collections::BTreeMap;

use log::debug;
use serde::Serialize;

use crate::complexes::{resolve_complex, Complex, HomLayout, Resolution, StrandComplex};
use crate::error::{Error, Result};
use crate::gradedmod::{betti_stats, BettiStats, PresentedModule};
use crate::groebner::Vector;

/// Which inequality picks the truncation degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// Every Betti degree of every term of `D`; independent of `m`.
    #[default]
    Simple,
    /// Only the steps `i >= n - ell` that can matter for `Ext^m`.
    General,
    /// Sharper pair of inequalities, valid when `C` has cohomology in one degree.
    Concentrated,
}

/// The quantities entering the bound for a fixed `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EllData {
    /// `min(dim D + sup D, m + sup C - inf D)`; `None` when `D` is acyclic.
    pub ell: Option<i32>,
    pub dim_d: Option<i32>,
    pub inf_c: i32,
    pub sup_c: i32,
    pub inf_d: i32,
    pub sup_d: i32,
}

/// Shifted copies with `sup = 0` and the Betti data of the terms of `D`.
struct Normalized {
    c: Complex,
    d: Complex,
    /// `m' = m + offset` indexes `Ext` of the shifted copies.
    offset: i32,
    inf_d: i32,
    stats: BTreeMap<i32, BettiStats>,
    n: i32,
}

fn normalize(c: &Complex, d: &Complex) -> Result<Option<Normalized>> {
    if c.ring() != d.ring() {
        return Err(Error::RingMismatch);
    }
    let (Some(sc), Some(sd)) = (c.sup(), d.sup()) else {
        return Ok(None);
    };
    let c = c.shift(sc);
    let d = d.shift(sd);
    let inf_d = d.inf().unwrap();
    let mut stats = BTreeMap::new();
    for j in inf_d..=0 {
        if let Some(t) = d.term(j) {
            stats.insert(j, betti_stats(t)?);
        }
    }
    let n = d.ring().projective_dimension();
    Ok(Some(Normalized { c, d, offset: sc - sd, inf_d, stats, n }))
}

impl Normalized {
    fn a_max(&self, j: i32, i: i32) -> Option<i32> {
        if i < 0 {
            return None;
        }
        self.stats.get(&j).and_then(|s| s.a_max(i as usize))
    }

    fn pd(&self, j: i32) -> Option<i32> {
        self.stats.get(&j).and_then(|s| s.pd).map(|p| p as i32)
    }

    fn ell(&self, m: i32) -> Result<EllData> {
        let dim_d = self.d.stats()?.dim;
        let ell = dim_d.map(|dd| dd.min(m - self.inf_d));
        Ok(EllData { ell, dim_d, inf_c: self.c.inf().unwrap(), sup_c: 0, inf_d: self.inf_d, sup_d: 0 })
    }

    fn simple(&self) -> Option<i32> {
        let mut r: Option<i32> = None;
        for j in self.inf_d..=0 {
            for i in 0..=self.pd(j).unwrap_or(-1) {
                r = r.max(self.a_max(j, i).map(|a| a - self.n));
            }
        }
        r
    }

    fn general(&self, m: i32) -> Result<Option<i32>> {
        let Some(ell) = self.ell(m)?.ell else { return Ok(None) };
        let mut r: Option<i32> = None;
        for j in self.inf_d..=0 {
            for i in (self.n - ell).max(0)..=self.pd(j).unwrap_or(-1) {
                if j <= (m - self.n + i).min(0) {
                    r = r.max(self.a_max(j, i).map(|a| a - self.n));
                }
            }
        }
        Ok(r)
    }

    fn concentrated(&self, m: i32) -> Result<Option<i32>> {
        let (Some(lo), Some(hi)) = (self.c.range().map(|r| r.0), self.c.sup()) else {
            return Ok(None);
        };
        for j in lo..=hi {
            if j != 0 && !self.c.cohomology_module(j)?.is_zero() {
                return Err(Error::Domain(format!("cohomology of the source is nonzero in degree {j}")));
            }
        }
        let Some(ell) = self.ell(m)?.ell else { return Ok(None) };
        let n = self.n;
        let mut r: Option<i32> = None;
        for j in self.inf_d..=0.min(m - ell) {
            if self.pd(j).is_some_and(|p| n - ell <= p) {
                r = r.max(self.a_max(j, n - ell).map(|a| a + j - n + ell - m));
            }
        }
        for j in self.inf_d..=0 {
            for i in (n - ell + 1).max(0)..=self.pd(j).unwrap_or(-1) {
                if j <= (m - n + i - 1).min(0) {
                    r = r.max(self.a_max(j, i).map(|a| a + j - i + 1 - m));
                }
            }
        }
        Ok(r)
    }

    fn bound(&self, m: i32, mode: BoundMode) -> Result<Option<i32>> {
        match mode {
            BoundMode::Simple => Ok(self.simple()),
            BoundMode::General => self.general(m),
            BoundMode::Concentrated => self.concentrated(m),
        }
    }
}

/// Truncation degree for `Ext^m(C, D)`; `None` means no truncation is needed.
pub fn truncation_bound(c: &Complex, d: &Complex, m: i32, mode: BoundMode) -> Result<Option<i32>> {
    match normalize(c, d)? {
        None => Ok(None),
        Some(norm) => norm.bound(m + norm.offset, mode),
    }
}

/// `ell` and the ranges that enter the bound for `Ext^m(C, D)`.
pub fn ell_data(c: &Complex, d: &Complex, m: i32) -> Result<Option<EllData>> {
    match normalize(c, d)? {
        None => Ok(None),
        Some(norm) => norm.ell(m + norm.offset).map(Some),
    }
}

#[derive(Clone, Debug, Default)]
pub struct RHomOptions {
    pub mode: BoundMode,
    /// Use this truncation degree instead of the computed bound.
    pub force_r: Option<i32>,
    /// Resolve at least this far below the top of the source.
    pub min_length: usize,
}

/// One Ext group: its dimension and representative cycles.
#[derive(Clone, Debug, Serialize)]
pub struct ExtResult {
    pub m: i32,
    pub dim: usize,
    pub r_used: i32,
    pub v: i32,
    /// Cycles of the degree-`v` strand, coordinates in its monomial basis.
    #[serde(skip)]
    pub basis: Vec<Vec<u32>>,
}

/// Everything computed on the way to `RHom(C, D)`.
#[derive(Clone, Debug)]
pub struct RHomComputation {
    /// Shifted copies of the inputs with `sup = 0`.
    pub source: Complex,
    pub target: Complex,
    /// `Ext^m` of the inputs is `Ext^{m + offset}` of the shifted copies.
    pub offset: i32,
    pub r_used: i32,
    /// Hom positions that were requested, in shifted indexing.
    pub positions: (i32, i32),
    /// Minimal free resolution of the truncated shifted source.
    pub resolution: Resolution,
    pub hom: Complex,
    pub layout: HomLayout,
}

impl RHomComputation {
    /// The degree-`v` strand, one position beyond the requested range on
    /// each side.
    pub fn strand(&self, v: i32) -> StrandComplex {
        self.hom.strand_window(v, self.positions.0 - 1, self.positions.1 + 1)
    }

    /// `Ext^m` in degree `v` with representative cycles, `m` indexed as for
    /// the original inputs.
    pub fn ext(&self, m: i32, v: i32) -> Result<ExtResult> {
        let strand = self.strand(v);
        let h = strand.cohomology(m + self.offset)?;
        Ok(ExtResult { m, dim: h.dim, r_used: self.r_used, v, basis: h.basis })
    }

    fn ext_dim(&self, strand: &StrandComplex, m: i32, v: i32) -> Result<ExtResult> {
        let dim = strand.cohomology_dim(m + self.offset)?;
        Ok(ExtResult { m, dim, r_used: self.r_used, v, basis: Vec::new() })
    }

    /// A strand cycle as an element of `Hom^{m'}` in the Hom complex's cover.
    pub fn cycle_element(&self, strand: &StrandComplex, m_shifted: i32, coords: &[u32]) -> Vector {
        let field = *self.hom.field();
        let basis = strand.basis(m_shifted);
        let degs = self.hom.term(m_shifted).map(|t| t.generator_degrees().to_vec()).unwrap_or_default();
        let terms = basis
            .iter()
            .zip(coords)
            .filter(|(_, &c)| c != 0)
            .map(|((mono, g), &c)| crate::groebner::Term {
                deg: mono.degree() as i32 + degs[*g],
                mono: mono.clone(),
                comp: *g,
                coeff: c,
            })
            .collect();
        Vector::from_terms(&field, terms)
    }
}

/// Resolves the truncated source and forms the Hom complex for the Ext
/// degrees `m_lo..=m_hi`. Returns `None` if either complex is zero.
pub fn prepare(c: &Complex, d: &Complex, m_lo: i32, m_hi: i32, opts: &RHomOptions) -> Result<Option<RHomComputation>> {
    if m_lo > m_hi {
        return Err(Error::EmptyRange(m_lo, m_hi));
    }
    let Some(norm) = normalize(c, d)? else { return Ok(None) };
    let (lo, hi) = (m_lo + norm.offset, m_hi + norm.offset);
    let r = match opts.force_r {
        Some(r) => Some(r),
        None => {
            let mut r = None;
            for m in lo..=hi {
                r = r.max(norm.bound(m, opts.mode)?);
                if opts.mode == BoundMode::Simple {
                    break;
                }
            }
            r
        }
    };
    let floor = norm.c.twists().iter().flat_map(|(_, degs)| degs.iter().copied()).min().unwrap_or(0);
    let r_used = r.unwrap_or(floor);
    let source = if r_used > floor { norm.c.truncate(r_used)?.0 } else { norm.c.clone() };
    let cap = ((hi - norm.inf_d + 2).max(0) as usize).max(opts.min_length);
    debug!("truncating at {r_used}, resolving {cap} steps");
    let resolution = resolve_complex(&source, cap)?;
    let (hom, layout) = Complex::hom_with_layout(&resolution.complex, &norm.d)?;
    Ok(Some(RHomComputation {
        source: norm.c,
        target: norm.d,
        offset: norm.offset,
        r_used,
        positions: (lo, hi),
        resolution,
        hom,
        layout,
    }))
}

/// Result of [`rhom_sheaf`]: the degree-0 strand and one record per `m`.
#[derive(Clone, Debug)]
pub struct RHomResult {
    pub strand: Option<StrandComplex>,
    /// `Ext^m` is strand cohomology at position `m + offset`.
    pub offset: i32,
    pub results: Vec<ExtResult>,
}

impl RHomResult {
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.results.iter().map(|r| (r.m, r.dim)).collect()
    }
}

/// `dim Ext^m_X(C~, D~)` for `m_lo <= m <= m_hi`. Representative cycles
/// come from [`prepare`] and [`RHomComputation::ext`].
pub fn rhom_sheaf(c: &Complex, d: &Complex, m_lo: i32, m_hi: i32, opts: &RHomOptions) -> Result<RHomResult> {
    let Some(comp) = prepare(c, d, m_lo, m_hi, opts)? else {
        let results = (m_lo..=m_hi).map(|m| ExtResult { m, dim: 0, r_used: 0, v: 0, basis: Vec::new() }).collect();
        return Ok(RHomResult { strand: None, offset: 0, results });
    };
    let strand = comp.strand(0);
    let results = (m_lo..=m_hi).map(|m| comp.ext_dim(&strand, m, 0)).collect::<Result<Vec<_>>>()?;
    Ok(RHomResult { strand: Some(strand), offset: comp.offset, results })
}

/// `dim Ext^m_X(C~, D~(v))` for `0 <= v <= max_v`, from the strands of one
/// graded Ext computation.
pub fn graded_ext(c: &Complex, d: &Complex, m: i32, max_v: i32) -> Result<Vec<(i32, usize)>> {
    let Some(comp) = prepare(c, d, m, m, &RHomOptions::default())? else {
        return Ok((0..=max_v).map(|v| (v, 0)).collect());
    };
    (0..=max_v).map(|v| Ok((v, comp.ext_dim(&comp.strand(v), m, v)?.dim))).collect()
}

/// `Ext^m_X(C~, D~(v))` for any `v`, by twisting `D` and recomputing the bound.
pub fn ext_twisted(c: &Complex, d: &Complex, m: i32, v: i32) -> Result<ExtResult> {
    let mut r = rhom_sheaf(c, &d.twist(v), m, m, &RHomOptions::default())?.results.remove(0);
    r.v = v;
    Ok(r)
}

/// `dim H^m(X, D~(v))`, the hypercohomology of the sheafified complex.
pub fn sheaf_cohomology(d: &Complex, m: i32, v: i32) -> Result<usize> {
    let one = Complex::from_module(PresentedModule::free(d.ring().clone(), vec![0]), 0);
    Ok(ext_twisted(&one, d, m, v)?.dim)
}

/// Whether `v >= a_{n-m}(N) - n`, which forces `H^m(X, N~(v)) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCertificate {
    pub m: i32,
    pub v: i32,
    /// Smallest twist covered; `None` means every twist is.
    pub threshold: Option<i32>,
    pub holds: bool,
}

pub fn vanishing_check(module: &PresentedModule, m: i32, v: i32) -> Result<VanishingCertificate> {
    if m <= 0 {
        return Err(Error::Domain(format!("vanishing certificates need m > 0, got {m}")));
    }
    let n = module.ring().projective_dimension();
    let stats = betti_stats(module)?;
    let i = n - m;
    let threshold = if i < 0 { None } else { stats.a_max(i as usize).map(|a| a - n) };
    let holds = threshold.is_none_or(|t| v >= t);
    Ok(VanishingCertificate { m, v, threshold, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{Polynomial, Ring};

    fn line(r: &Ring, d: i32) -> Complex {
        Complex::from_module(PresentedModule::free(r.clone(), vec![-d]), 0)
    }

    fn polys(r: &Ring, fs: &[&str]) -> Vec<Polynomial> {
        fs.iter().map(|f| r.parse(f).unwrap()).collect()
    }

    #[test]
    fn example_koszul_bound_and_sections() {
        let s = Ring::standard(32003, 3).unwrap();
        let k = Complex::koszul(&s, &polys(&s, &["x0^2", "x0*x1"])).unwrap();
        let one = line(&s, 0);
        assert_eq!(truncation_bound(&one, &k, 0, BoundMode::Simple).unwrap(), Some(2));
        let res = rhom_sheaf(&one, &k, -3, 3, &RHomOptions::default()).unwrap();
        let dims = res.dims();
        for m in -3..=3 {
            assert_eq!(dims[&m], if m == 0 { 4 } else { 0 }, "m = {m}");
        }
        let under = rhom_sheaf(&one, &k, 0, 0, &RHomOptions { force_r: Some(1), ..Default::default() }).unwrap();
        assert_eq!(under.results[0].dim, 1);
    }

    #[test]
    fn example_hypersurface() {
        let s = Ring::standard(32003, 3).unwrap();
        let r = s.quotient(polys(&s, &["x0*x1"])).unwrap();
        let k = Complex::koszul(&r, &polys(&r, &["x0"])).unwrap();
        let k1 = k.twist(1);
        assert_eq!(truncation_bound(&k, &k1, 0, BoundMode::Simple).unwrap(), Some(0));
        let res = rhom_sheaf(&k, &k1, -3, 3, &RHomOptions::default()).unwrap();
        let dims = res.dims();
        for m in -3..=3 {
            assert_eq!(dims[&m], if m == 0 || m == 1 { 3 } else { 0 }, "m = {m}");
        }
        assert_eq!(graded_ext(&k, &k, 0, 1).unwrap()[1].1, 3);
    }

    #[test]
    fn line_bundles_on_the_plane() {
        let s = Ring::standard(32003, 3).unwrap();
        assert_eq!(sheaf_cohomology(&line(&s, 2), 0, 0).unwrap(), 6);
        assert_eq!(sheaf_cohomology(&line(&s, -4), 2, 0).unwrap(), 3);
        for m in [1, 2] {
            assert_eq!(sheaf_cohomology(&line(&s, 0), m, 0).unwrap(), 0);
        }
        let graded = graded_ext(&line(&s, 0), &line(&s, 0), 0, 3).unwrap();
        assert_eq!(graded, vec![(0, 1), (1, 3), (2, 6), (3, 10)]);
        let free = line(&s, 0);
        assert!(truncation_bound(&free, &free, 0, BoundMode::Simple).unwrap().unwrap() <= 0);
    }

    #[test]
    fn bound_modes_are_ordered() {
        let s = Ring::standard(32003, 3).unwrap();
        let k = Complex::koszul(&s, &polys(&s, &["x0^2", "x0*x1"])).unwrap();
        let one = line(&s, 0);
        for m in -2..=2 {
            let simple = truncation_bound(&one, &k, m, BoundMode::Simple).unwrap();
            let general = truncation_bound(&one, &k, m, BoundMode::General).unwrap();
            let conc = truncation_bound(&one, &k, m, BoundMode::Concentrated).unwrap();
            assert!(general <= simple);
            for r in [general, conc].into_iter().flatten() {
                let res = rhom_sheaf(&one, &k, m, m, &RHomOptions { force_r: Some(r), ..Default::default() });
                assert_eq!(res.unwrap().results[0].dim, if m == 0 { 4 } else { 0 });
            }
        }
        assert_eq!(truncation_bound(&one, &Complex::zero(s), 0, BoundMode::Simple).unwrap(), None);
    }

    #[test]
    fn vanishing_certificates() {
        let s = Ring::standard(32003, 3).unwrap();
        let free = PresentedModule::free(s.clone(), vec![0]);
        let c = vanishing_check(&free, 1, -5).unwrap();
        assert!(c.holds && c.threshold.is_none());
        let q = PresentedModule::new(s.clone(), vec![0], vec![Vector::from_poly(&s.parse("x0*x1").unwrap(), 0, 0)])
            .unwrap();
        let c = vanishing_check(&q, 1, 0).unwrap();
        assert_eq!(c.threshold, Some(0));
        for v in 0..=2 {
            assert!(vanishing_check(&q, 1, v).unwrap().holds);
            let d = Complex::from_module(q.clone(), 0);
            assert_eq!(sheaf_cohomology(&d, 1, v).unwrap(), 0);
        }
        assert!(!vanishing_check(&free, 2, -3).unwrap().holds);
        assert_eq!(sheaf_cohomology(&line(&s, 0), 2, -3).unwrap(), 1);
    }

    #[test]
    fn stable_above_the_bound() {
        let s = Ring::standard(32003, 3).unwrap();
        let k = Complex::koszul(&s, &polys(&s, &["x0^2", "x0*x1"])).unwrap();
        let one = line(&s, 0);
        let r = truncation_bound(&one, &k, 0, BoundMode::Simple).unwrap().unwrap();
        let q = s.quotient(polys(&s, &["x0*x1"])).unwrap();
        let kq = Complex::koszul(&q, &polys(&q, &["x0"])).unwrap();
        let rq = truncation_bound(&kq, &kq.twist(1), 0, BoundMode::Simple).unwrap().unwrap();
        for extra in 0..3 {
            let a =
                rhom_sheaf(&one, &k, -2, 2, &RHomOptions { force_r: Some(r + extra), ..Default::default() }).unwrap();
            assert_eq!(a.dims(), (-2..=2).map(|m| (m, if m == 0 { 4 } else { 0 })).collect());
            let opts = RHomOptions { force_r: Some(rq + extra), ..Default::default() };
            let b = rhom_sheaf(&kq, &kq.twist(1), -2, 2, &opts).unwrap();
            assert_eq!(b.dims(), (-2..=2).map(|m| (m, if m == 0 || m == 1 { 3 } else { 0 })).collect());
        }
    }

    #[test]
    fn euler_characteristic_matches_strand() {
        let s = Ring::standard(32003, 3).unwrap();
        let k = Complex::koszul(&s, &polys(&s, &["x0^2", "x0*x1"])).unwrap();
        let one = line(&s, 0);
        let res = rhom_sheaf(&one, &k, -6, 6, &RHomOptions::default()).unwrap();
        let strand = res.strand.as_ref().unwrap();
        let pos = strand.positions();
        let full =
            rhom_sheaf(&one, &k, pos.start - res.offset, pos.end - 1 - res.offset, &RHomOptions::default()).unwrap();
        let chi: i64 =
            full.results.iter().map(|r| if r.m.rem_euclid(2) == 0 { r.dim as i64 } else { -(r.dim as i64) }).sum();
        let sign = if res.offset.rem_euclid(2) == 0 { 1 } else { -1 };
        assert_eq!(sign * chi, strand.euler_characteristic());
    }

    #[test]
    fn serre_duality_on_small_projective_spaces() {
        fn binom(a: i64, b: i64) -> usize {
            if a < b || b < 0 {
                return 0;
            }
            (0..b).fold(1i64, |acc, i| acc * (a - i) / (i + 1)) as usize
        }
        for n in 1..=3usize {
            let s = Ring::standard(32003, n + 1).unwrap();
            for d in -5..=2i32 {
                let h0 = sheaf_cohomology(&line(&s, d), 0, 0).unwrap();
                assert_eq!(h0, binom(d as i64 + n as i64, n as i64), "n = {n}, d = {d}");
                for m in 0..=n as i32 {
                    let a = sheaf_cohomology(&line(&s, d), m, 0).unwrap();
                    let b = sheaf_cohomology(&line(&s, -d - n as i32 - 1), n as i32 - m, 0).unwrap();
                    assert_eq!(a, b, "n = {n}, d = {d}, m = {m}");
                }
            }
        }
    }

    #[test]
    fn disjoint_supports_have_no_ext() {
        let s = Ring::standard(32003, 3).unwrap();
        let p = Complex::from_module(
            PresentedModule::new(
                s.clone(),
                vec![0],
                polys(&s, &["x0", "x1"]).iter().map(|f| Vector::from_poly(f, 0, 0)).collect(),
            )
            .unwrap(),
            0,
        );
        let q = Complex::from_module(
            PresentedModule::new(
                s.clone(),
                vec![0],
                polys(&s, &["x1", "x2"]).iter().map(|f| Vector::from_poly(f, 0, 0)).collect(),
            )
            .unwrap(),
            0,
        );
        for m in 0..=2 {
            assert!(graded_ext(&p, &q, m, 2).unwrap().iter().all(|&(_, d)| d == 0));
        }
        assert_eq!(graded_ext(&p, &p, 0, 1).unwrap(), vec![(0, 1), (1, 1)]);
    }
}
