//! Exceptional objects, Ext tables, mutations and spherical twists.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::complexes::{minimize, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::globalext::{prepare, rhom_sheaf, RHomOptions};
use crate::gradedmod::PresentedModule;
use crate::groebner::{krull_dimension, Vector};
use crate::polyring::Ring;

/// A bounded complex viewed as an object of the derived category of `Proj R`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedObject {
    pub complex: Complex,
    pub name: String,
}

impl DerivedObject {
    pub fn new(name: impl Into<String>, complex: Complex) -> Self {
        DerivedObject { complex, name: name.into() }
    }

    /// The sheaf of a module, placed in degree 0.
    pub fn sheaf(name: impl Into<String>, module: PresentedModule) -> Self {
        Self::new(name, Complex::from_module(module, 0))
    }

    pub fn ring(&self) -> &Ring {
        self.complex.ring()
    }

    pub fn shift(&self, i: i32) -> Self {
        Self::new(format!("{}[{i}]", self.name), self.complex.shift(i))
    }

    pub fn twist(&self, j: i32) -> Self {
        Self::new(format!("{}({j})", self.name), self.complex.twist(j))
    }

    /// Cohomology modules whose sheaves are nonzero, i.e. of positive Krull
    /// dimension.
    pub fn cohomology_sheaves(&self) -> Result<Vec<(i32, PresentedModule)>> {
        let mut out = Vec::new();
        if let Some((lo, hi)) = self.complex.range() {
            for m in lo..=hi {
                let h = self.complex.cohomology_module(m)?;
                if krull_dimension(&h)?.is_some_and(|d| d > 0) {
                    out.push((m, h));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for DerivedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.complex)
    }
}

/// `dim X` for `X = Proj R`.
pub fn variety_dimension(ring: &Ring) -> Result<i32> {
    let r = PresentedModule::free(ring.clone(), vec![0]);
    Ok(krull_dimension(&r)?.map_or(-1, |d| d - 1))
}

/// Degrees outside this window carry no `Ext^m(E, F)` for dimension reasons.
pub fn ext_window(e: &Complex, f: &Complex, dim_x: i32) -> Option<(i32, i32)> {
    let (ie, se) = (e.inf()?, e.sup()?);
    let (i_f, s_f) = (f.inf()?, f.sup()?);
    Some((i_f - se - dim_x, s_f - ie + dim_x))
}

/// Nonzero `dim Ext^m_X(E, F)` over the full window.
pub fn ext_dims(e: &DerivedObject, f: &DerivedObject) -> Result<BTreeMap<i32, usize>> {
    let dim_x = variety_dimension(e.ring())?;
    let Some((lo, hi)) = ext_window(&e.complex, &f.complex, dim_x) else {
        return Ok(BTreeMap::new());
    };
    let res = rhom_sheaf(&e.complex, &f.complex, lo, hi, &RHomOptions::default())?;
    Ok(res.results.into_iter().filter(|r| r.dim > 0).map(|r| (r.m, r.dim)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalCheck {
    pub exceptional: bool,
    /// Nonzero `dim Ext^m(E, E)`.
    pub dims: BTreeMap<i32, usize>,
}

pub fn is_exceptional(e: &DerivedObject) -> Result<ExceptionalCheck> {
    let dims = ext_dims(e, e)?;
    let exceptional = dims.len() == 1 && dims.get(&0) == Some(&1);
    Ok(ExceptionalCheck { exceptional, dims })
}

/// Both objects exceptional and `Ext^*(F, E) = 0`.
pub fn is_exceptional_pair(e: &DerivedObject, f: &DerivedObject) -> Result<bool> {
    Ok(is_exceptional(e)?.exceptional && is_exceptional(f)?.exceptional && ext_dims(f, e)?.is_empty())
}

/// Entry `(i, j)` is the polynomial `sum_m dim Ext^m(E_i, E_j) T^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTable {
    pub names: Vec<String>,
    pub entries: Vec<Vec<BTreeMap<i32, usize>>>,
}

impl ExtTable {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BTreeMap<i32, usize> {
        &self.entries[i][j]
    }

    /// The `T^0` coefficients.
    pub fn hom_ranks(&self) -> Vec<Vec<usize>> {
        self.entries.iter().map(|row| row.iter().map(|e| e.get(&0).copied().unwrap_or(0)).collect()).collect()
    }

    /// Diagonal `1` and zero below the diagonal.
    pub fn is_exceptional_collection(&self) -> bool {
        (0..self.size()).all(|i| {
            let diag = &self.entries[i][i];
            diag.len() == 1 && diag.get(&0) == Some(&1) && (0..i).all(|j| self.entries[i][j].is_empty())
        })
    }

    /// Exceptional with every forward Ext concentrated in `T^0`.
    pub fn is_strong(&self) -> bool {
        self.is_exceptional_collection() && self.entries.iter().flatten().all(|e| e.keys().all(|&m| m == 0))
    }

    /// `sum_m (-1)^m dim Ext^m(E_i, E_j)`.
    pub fn euler_form(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.iter().map(|(&m, &d)| if m.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum())
                    .collect()
            })
            .collect()
    }
}

fn format_entry(e: &BTreeMap<i32, usize>) -> String {
    if e.is_empty() {
        return "0".into();
    }
    e.iter()
        .map(|(&m, &d)| {
            let c = if d == 1 { String::new() } else { d.to_string() };
            match m {
                0 => d.to_string(),
                1 => format!("{c}T"),
                _ => format!("{c}T^{m}"),
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

impl fmt::Display for ExtTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.entries.iter().map(|row| row.iter().map(format_entry).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            write!(f, "| {} |", padded.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for ExtTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<BTreeMap<String, usize>>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.iter().map(|(m, d)| (m.to_string(), *d)).collect()).collect())
            .collect();
        let mut s = serializer.serialize_struct("ExtTable", 5)?;
        s.serialize_field("names", &self.names)?;
        s.serialize_field("ranks", &self.hom_ranks())?;
        s.serialize_field("entries", &entries)?;
        s.serialize_field("exceptional", &self.is_exceptional_collection())?;
        s.serialize_field("strong", &self.is_strong())?;
        s.end()
    }
}

pub fn ext_table(objects: &[DerivedObject]) -> Result<ExtTable> {
    if objects.is_empty() {
        return Err(Error::Domain("ext table of an empty collection".into()));
    }
    let entries = objects
        .iter()
        .map(|e| objects.iter().map(|f| ext_dims(e, f)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtTable { names: objects.iter().map(|o| o.name.clone()).collect(), entries })
}

/// Representative chain maps for a basis of `Ext^*(E, F)`.
///
/// Works with `E' = E[sup E]` and `F' = F[sup F]`. `tau` is a good truncation
/// of a free resolution of `E'` (truncated in internal degree), low enough
/// that every class is a genuine chain map `tau[-m'] -> F'`.
struct Evaluation {
    shift_e: i32,
    shift_f: i32,
    tau: Complex,
    target: Complex,
    /// `(m', components)`; `components[j]` maps `tau^j` to `F'^{j+m'}`.
    classes: Vec<(i32, BTreeMap<i32, Vec<Vector>>)>,
}

fn evaluation(e: &DerivedObject, f: &DerivedObject) -> Result<Option<Evaluation>> {
    let dim_x = variety_dimension(e.ring())?;
    let Some((lo, hi)) = ext_window(&e.complex, &f.complex, dim_x) else {
        return Ok(None);
    };
    let (shift_e, shift_f) = (e.complex.sup().unwrap(), f.complex.sup().unwrap());
    let offset = shift_e - shift_f;
    let inf_e = e.complex.inf().unwrap() - shift_e;
    let inf_f = f.complex.inf().unwrap() - shift_f;
    let k = inf_e.min(inf_f - (hi + offset));
    let opts = RHomOptions { min_length: (1 - k).max(0) as usize, ..Default::default() };
    let comp = prepare(&e.complex, &f.complex, lo, hi, &opts)?.expect("nonzero complexes");
    let strand = comp.strand(0);
    let field = *e.complex.field();
    let mut classes = Vec::new();
    for m in lo..=hi {
        let ms = m + comp.offset;
        for cycle in strand.cohomology(ms)?.basis {
            let element = comp.cycle_element(&strand, ms, &cycle);
            let components = comp.layout.decode(&field, &comp.resolution.complex, ms, &element);
            classes.push((ms, components));
        }
    }
    let tau = comp.resolution.complex.good_truncation(k)?;
    Ok(Some(Evaluation { shift_e, shift_f, tau, target: comp.target, classes }))
}

impl Evaluation {
    /// Restriction of a class to `tau`, as columns at each degree of `tau`.
    fn columns(&self, comps: &BTreeMap<i32, Vec<Vector>>, j: i32) -> Vec<Vector> {
        let rank = self.tau.term(j).map_or(0, |t| t.rank());
        comps.get(&j).cloned().unwrap_or_else(|| vec![Vector::zero(); rank])
    }

    /// `ev: sum_m Ext^m ⊗ tau[-m'] -> F'`.
    fn left_map(&self) -> Result<ChainMap> {
        let ring = self.tau.ring().clone();
        let copies: Vec<Complex> = self.classes.iter().map(|(m, _)| self.tau.shift(-m)).collect();
        let refs: Vec<&Complex> = copies.iter().collect();
        let source = Complex::direct_sum(&ring, &refs)?;
        let mut components = BTreeMap::new();
        if let Some((lo, hi)) = source.range() {
            for j in lo..=hi {
                let mut cols = Vec::new();
                for (m, comps) in &self.classes {
                    cols.extend(self.columns(comps, j - m));
                }
                components.insert(j, cols);
            }
        }
        ChainMap::new(source, self.target.clone(), components)
    }

    /// `ev*: tau -> sum_m Ext^m* ⊗ F'[m']`.
    fn right_map(&self) -> Result<ChainMap> {
        let ring = self.tau.ring().clone();
        let copies: Vec<Complex> = self.classes.iter().map(|(m, _)| self.target.shift(*m)).collect();
        let refs: Vec<&Complex> = copies.iter().collect();
        let target = Complex::direct_sum(&ring, &refs)?;
        let field = *ring.field();
        let mut components = BTreeMap::new();
        if let Some((lo, hi)) = self.tau.range() {
            for j in lo..=hi {
                let rank = self.tau.term(j).map_or(0, |t| t.rank());
                let mut cols = vec![Vector::zero(); rank];
                let mut offset = 0;
                for (i, (_, comps)) in self.classes.iter().enumerate() {
                    for (col, v) in cols.iter_mut().zip(self.columns(comps, j)) {
                        *col = col.add(&field, &v.offset(&field, offset));
                    }
                    offset += copies[i].term(j).map_or(0, |t| t.rank());
                }
                components.insert(j, cols);
            }
        }
        ChainMap::new(self.tau.clone(), target, components)
    }
}

fn check_pair(e: &DerivedObject, f: &DerivedObject) -> Result<()> {
    if !is_exceptional_pair(e, f)? {
        return Err(Error::NotExceptional(format!("({}, {}) is not an exceptional pair", e.name, f.name)));
    }
    Ok(())
}

/// `cone(ev)` for `ev: RHom(E, F) ⊗ E -> F`, minimized, in the indexing of `F`.
fn evaluation_cone(e: &DerivedObject, f: &DerivedObject) -> Result<Complex> {
    let Some(ev) = evaluation(e, f)? else {
        return Ok(f.complex.clone());
    };
    let cone = ev.left_map()?.cone()?;
    minimize(&cone.shift(-ev.shift_f).drop_exact_bottom()?)
}

/// `L_E(F)`, the fiber of the evaluation map `RHom(E, F) ⊗ E -> F`.
/// With `check`, `(E, F)` must be an exceptional pair.
pub fn mutate_left(e: &DerivedObject, f: &DerivedObject, check: bool) -> Result<DerivedObject> {
    if check {
        check_pair(e, f)?;
    }
    let cone = evaluation_cone(e, f)?;
    Ok(DerivedObject::new(format!("L_{{{}}}({})", e.name, f.name), cone.shift(-1)))
}

/// `R_F(E)`, the cone of the coevaluation `E -> RHom(E, F)* ⊗ F`.
/// With `check`, `(E, F)` must be an exceptional pair.
pub fn mutate_right(f: &DerivedObject, e: &DerivedObject, check: bool) -> Result<DerivedObject> {
    if check {
        check_pair(e, f)?;
    }
    let name = format!("R_{{{}}}({})", f.name, e.name);
    let Some(ev) = evaluation(e, f)? else {
        return Ok(DerivedObject::new(name, e.complex.shift(1)));
    };
    let cone = ev.right_map()?.cone()?;
    Ok(DerivedObject::new(name, minimize(&cone.shift(-ev.shift_e).drop_exact_bottom()?)?))
}

/// `Hom(E, E[i])` is `k` for `i = 0` and `i = dim X` and zero otherwise.
/// The condition `E ⊗ ω_X ≅ E` is left to the caller.
pub fn spherical_ext_check(e: &DerivedObject) -> Result<bool> {
    let dim_x = variety_dimension(e.ring())?;
    let dims = ext_dims(e, e)?;
    let expected: BTreeMap<i32, usize> = [(0, 1), (dim_x, 1)].into_iter().collect();
    Ok(dim_x > 0 && dims == expected)
}

/// `T_E(F) = L_E(F)[1]`, the cone of evaluation.
pub fn spherical_twist(e: &DerivedObject, f: &DerivedObject) -> Result<DerivedObject> {
    if !spherical_ext_check(e)? {
        return Err(Error::NotSpherical(e.name.clone()));
    }
    Ok(DerivedObject::new(format!("T_{{{}}}({})", e.name, f.name), evaluation_cone(e, f)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedmod::{FreeModule, ModuleMap};
    use proptest::prelude::*;

    fn p2() -> Ring {
        Ring::standard(32003, 3).unwrap()
    }

    fn line(r: &Ring, d: i32) -> DerivedObject {
        let name = if d == 0 { "O".to_string() } else { format!("O({d})") };
        DerivedObject::sheaf(name, PresentedModule::free(r.clone(), vec![-d]))
    }

    fn table_of(objs: &[DerivedObject]) -> Vec<Vec<BTreeMap<i32, usize>>> {
        ext_table(objs).unwrap().entries
    }

    fn hom_only(rows: &[&[usize]]) -> Vec<Vec<BTreeMap<i32, usize>>> {
        rows.iter()
            .map(|row| row.iter().map(|&d| if d == 0 { BTreeMap::new() } else { [(0, d)].into() }).collect())
            .collect()
    }

    fn hf_window(m: &PresentedModule) -> Vec<usize> {
        (0..6).map(|d| m.hilbert_function(d)).collect()
    }

    #[test]
    fn exceptional_objects() {
        let r = p2();
        assert!(is_exceptional(&line(&r, 0)).unwrap().exceptional);
        let two = DerivedObject::sheaf("O+O", PresentedModule::free(r.clone(), vec![0, 0]));
        let check = is_exceptional(&two).unwrap();
        assert!(!check.exceptional);
        assert_eq!(check.dims, [(0, 4)].into());
        assert!(is_exceptional(&line(&r, 3).shift(2)).unwrap().exceptional);
        assert!(!spherical_ext_check(&line(&r, 0)).unwrap());
        assert!(!spherical_ext_check(&two).unwrap());
        assert_eq!(variety_dimension(&r).unwrap(), 2);
    }

    #[test]
    fn beilinson_table() {
        let r = p2();
        let objs: Vec<_> = (0..3).map(|d| line(&r, d)).collect();
        let t = ext_table(&objs).unwrap();
        assert_eq!(t.entries, hom_only(&[&[1, 3, 6], &[0, 1, 3], &[0, 0, 1]]));
        assert!(t.is_exceptional_collection() && t.is_strong());
        assert_eq!(t.to_string(), "| 1 3 6 |\n| 0 1 3 |\n| 0 0 1 |");
        assert_eq!(ext_table(&objs[..1]).unwrap().hom_ranks(), vec![vec![1]]);
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["strong"], true);
        assert_eq!(json["ranks"][0][2], 6);
    }

    #[test]
    fn left_mutation_orbit() {
        let r = p2();
        let (o, o1, o2) = (line(&r, 0), line(&r, 1), line(&r, 2));
        let l1 = mutate_left(&o1, &o2, true).unwrap();
        let sheaves = l1.cohomology_sheaves().unwrap();
        assert_eq!(sheaves.len(), 1);
        assert_eq!(sheaves[0].0, 0);
        let ev = ModuleMap::from_entries(
            FreeModule::new(r.clone(), vec![-1; 3]),
            FreeModule::new(r.clone(), vec![-2]),
            &[vec![r.var(0), r.var(1), r.var(2)]],
        )
        .unwrap();
        assert_eq!(hf_window(&sheaves[0].1), hf_window(&ev.kernel().unwrap()));
        assert!(ext_dims(&o1, &l1).unwrap().is_empty());

        let l2 = mutate_left(&o, &l1, true).unwrap();
        let l3 = mutate_left(&o, &o1, true).unwrap();
        let t = ext_table(&[l2.clone(), l3.clone(), o.clone()]).unwrap();
        assert_eq!(t.entries, hom_only(&[&[1, 3, 3], &[0, 1, 3], &[0, 0, 1]]));
        assert!(t.is_strong());
        assert_eq!(l2.cohomology_sheaves().unwrap().len(), 1);
    }

    #[test]
    fn left_mutation_of_o1_past_o() {
        let r = p2();
        let l = mutate_left(&line(&r, 0), &line(&r, 1), true).unwrap();
        assert_eq!(l.complex.twists(), vec![(0, vec![0, 0, 0]), (1, vec![-1])]);
    }

    #[test]
    fn orthogonal_mutations_are_shifts() {
        let r = p2();
        let o = line(&r, 0);
        let om = line(&r, -1);
        assert!(ext_dims(&o, &om).unwrap().is_empty());
        assert_eq!(mutate_left(&o, &om, false).unwrap().complex, om.complex.shift(-1));
        assert!(matches!(mutate_left(&line(&r, 1), &o, true), Err(Error::NotExceptional(_))));
        assert!(matches!(spherical_twist(&o, &om), Err(Error::NotSpherical(_))));
    }

    #[test]
    fn right_mutation() {
        let r = p2();
        let (o, o1) = (line(&r, 0), line(&r, 1));
        let rm = mutate_right(&o1, &o, true).unwrap();
        assert!(ext_dims(&rm, &o1).unwrap().is_empty());
        assert!(is_exceptional(&rm).unwrap().exceptional);
        let sheaves = rm.cohomology_sheaves().unwrap();
        assert_eq!(sheaves.len(), 1);
        let coker = |d: usize| 3 * (d + 3) * (d + 2) / 2 - (d + 2) * (d + 1) / 2;
        assert_eq!(hf_window(&sheaves[0].1), (0..6).map(coker).collect::<Vec<_>>());
    }

    #[test]
    fn euler_form_is_twist_invariant() {
        let r = p2();
        let objs: Vec<_> = [0, 1, 3].iter().map(|&d| line(&r, d)).collect();
        let twisted: Vec<_> = objs.iter().map(|o| o.twist(-1)).collect();
        assert_eq!(ext_table(&objs).unwrap().euler_form(), ext_table(&twisted).unwrap().euler_form());
        let t = ext_table(&objs).unwrap();
        assert_eq!(t.entry(2, 0), &[(2, 1)].into());
        assert!(!t.is_exceptional_collection());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn mutation_keeps_pairs_exceptional(a in -2i32..2, gap in 1i32..3, s in -1i32..=1) {
            let r = p2();
            let (e, f) = (line(&r, a), line(&r, a + gap).shift(s));
            let l = mutate_left(&e, &f, true).unwrap();
            prop_assert!(is_exceptional_pair(&l, &e).unwrap());
            let rm = mutate_right(&f, &e, true).unwrap();
            prop_assert!(is_exceptional_pair(&f, &rm).unwrap());
        }
    }

    #[test]
    fn table_helper_sanity() {
        let r = p2();
        assert_eq!(table_of(&[line(&r, 0)]), hom_only(&[&[1]]));
    }
}
