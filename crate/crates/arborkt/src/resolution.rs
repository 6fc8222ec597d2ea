//! Free resolutions of `O/I`: the generic syzygy-driven construction, the
//! Koszul complex, and the Taylor complex of a monomial ideal with its
//! graded-commutative product. Also the JSON exchange format.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::freemod::{
    groebner, kernel_generators, FreeModule, GroebnerBasis, ModuleElement, ModuleMap,
};
use crate::polyring::{Poly, Ring};
use crate::treealg::GenRef;
use crate::{Error, Result};

/// An element of `O ⊕ M_•`: a scalar part plus module components indexed by
/// basis generators (possibly of mixed homological degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    ring: Arc<Ring>,
    scalar: Poly,
    comps: BTreeMap<GenRef, Poly>,
}

impl Element {
    pub fn zero(ring: &Arc<Ring>) -> Element {
        Element {
            ring: ring.clone(),
            scalar: Poly::zero(ring),
            comps: BTreeMap::new(),
        }
    }

    pub fn from_scalar(p: Poly) -> Element {
        let ring = p.ring().clone();
        Element {
            ring,
            scalar: p,
            comps: BTreeMap::new(),
        }
    }

    pub fn from_gen(ring: &Arc<Ring>, g: GenRef) -> Element {
        Element::from_gen_scaled(ring, g, Poly::one(ring))
    }

    pub fn from_gen_scaled(ring: &Arc<Ring>, g: GenRef, p: Poly) -> Element {
        let mut comps = BTreeMap::new();
        if !p.is_zero() {
            comps.insert(g, p);
        }
        Element {
            ring: ring.clone(),
            scalar: Poly::zero(ring),
            comps,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn scalar(&self) -> &Poly {
        &self.scalar
    }

    pub fn comps(&self) -> impl Iterator<Item = (GenRef, &Poly)> {
        self.comps.iter().map(|(g, p)| (*g, p))
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.comps.is_empty()
    }

    pub fn coeff(&self, g: GenRef) -> Poly {
        self.comps
            .get(&g)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.scalar = out.scalar.add(&other.scalar);
        for (g, p) in &other.comps {
            out.add_comp(*g, p);
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale_poly(&Poly::from_int(&self.ring, -1))
    }

    pub fn scale_int(&self, k: i64) -> Element {
        self.scale_poly(&Poly::from_int(&self.ring, k))
    }

    pub fn scale_poly(&self, p: &Poly) -> Element {
        let mut out = Element::zero(&self.ring);
        out.scalar = self.scalar.mul(p);
        for (g, q) in &self.comps {
            out.add_comp(*g, &q.mul(p));
        }
        out
    }

    fn add_comp(&mut self, g: GenRef, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let entry = self
            .comps
            .entry(g)
            .or_insert_with(|| Poly::zero(&self.ring));
        *entry = entry.add(p);
        if entry.is_zero() {
            self.comps.remove(&g);
        }
    }

    /// The homological degree when all module components agree (scalars are
    /// degree 0 and do not constrain).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for g in self.comps.keys() {
            match deg {
                None => deg = Some(g.degree),
                Some(d) if d == g.degree => {}
                _ => return None,
            }
        }
        deg
    }

    /// The part of this element in one homological degree.
    pub fn module_part(&self, res: &Resolution, degree: usize) -> ModuleElement {
        let module = res.module(degree);
        let coords: Vec<(usize, Poly)> = self
            .comps
            .iter()
            .filter(|(g, _)| g.degree == degree)
            .map(|(g, p)| (g.index, p.clone()))
            .collect();
        ModuleElement::from_coords(&self.ring, module, coords)
    }

    pub fn from_module_element(e: &ModuleElement) -> Element {
        let degree = e.module().degree;
        let mut out = Element::zero(e.ring());
        for (i, p) in e.coords() {
            out.add_comp(GenRef::new(degree, i), p);
        }
        out
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if !self.scalar.is_zero() {
            parts.push(format!("({})", self.scalar));
        }
        for (g, p) in &self.comps {
            parts.push(format!("({})*g{}_{}", p, g.degree, g.index));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Graded-commutative product on `O ⊕ M_•`, given by a table on generator
/// pairs; absent pairs multiply to zero. Products with scalars are the
/// module action.
#[derive(Debug, Clone, Default)]
pub struct DgcaProduct {
    entries: BTreeMap<(GenRef, GenRef), Element>,
}

impl DgcaProduct {
    pub fn new() -> DgcaProduct {
        DgcaProduct {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, a: GenRef, b: GenRef, value: Element) {
        if !value.is_zero() {
            self.entries.insert((a, b), value);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(GenRef, GenRef), &Element)> {
        self.entries.iter()
    }

    pub fn of_gens(&self, ring: &Arc<Ring>, a: GenRef, b: GenRef) -> Element {
        self.entries
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Element::zero(ring))
    }

    /// Bilinear extension with scalar parts acting by multiplication.
    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let ring = x.ring().clone();
        let mut out = Element::from_scalar(x.scalar().mul(y.scalar()));
        for (g, p) in y.comps() {
            out = out.add(&Element::from_gen_scaled(&ring, g, p.mul(x.scalar())));
        }
        for (g, p) in x.comps() {
            out = out.add(&Element::from_gen_scaled(&ring, g, p.mul(y.scalar())));
        }
        for (g, p) in x.comps() {
            for (h, q) in y.comps() {
                out = out.add(&self.of_gens(&ring, g, h).scale_poly(&p.mul(q)));
            }
        }
        out
    }

    /// Iterated product `a_1 ⋆ ... ⋆ a_n` over generators.
    pub fn product_of_gens(&self, ring: &Arc<Ring>, gens: &[GenRef]) -> Element {
        assert!(!gens.is_empty());
        let mut acc = Element::from_gen(ring, gens[0]);
        for g in &gens[1..] {
            acc = self.mul(&acc, &Element::from_gen(ring, *g));
        }
        acc
    }
}

/// A free resolution `M_N -> ... -> M_1 -> O` of `O/I`, optionally carrying
/// a graded-commutative product.
#[derive(Debug, Clone)]
pub struct Resolution {
    ring: Arc<Ring>,
    ideal_gens: Vec<Poly>,
    /// `modules[0]` is the rank-one module `O`, then `M_1 .. M_N`.
    modules: Vec<Arc<FreeModule>>,
    /// `diffs[i]` is `d_{i+1} : M_{i+1} -> M_i`.
    diffs: Vec<ModuleMap>,
    truncated: bool,
    product: Option<DgcaProduct>,
    names: BTreeMap<String, GenRef>,
}

impl Resolution {
    fn assemble(
        ring: Arc<Ring>,
        ideal_gens: Vec<Poly>,
        modules: Vec<Arc<FreeModule>>,
        diffs: Vec<ModuleMap>,
        truncated: bool,
        product: Option<DgcaProduct>,
    ) -> Result<Resolution> {
        let mut names = BTreeMap::new();
        for (d, m) in modules.iter().enumerate().skip(1) {
            for (i, n) in m.gen_names.iter().enumerate() {
                if names.insert(n.clone(), GenRef::new(d, i)).is_some() {
                    return Err(Error::Invalid(format!(
                        "generator name `{}` is not unique across degrees",
                        n
                    )));
                }
            }
        }
        Ok(Resolution {
            ring,
            ideal_gens,
            modules,
            diffs,
            truncated,
            product,
            names,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn ideal_gens(&self) -> &[Poly] {
        &self.ideal_gens
    }

    /// Homological length `N`.
    pub fn length(&self) -> usize {
        self.modules.len() - 1
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn product(&self) -> Option<&DgcaProduct> {
        self.product.as_ref()
    }

    /// The free module in homological degree `0..=N` (`0` is `O` itself).
    pub fn module(&self, degree: usize) -> &Arc<FreeModule> {
        &self.modules[degree]
    }

    /// Rank of `M_degree`; zero above the length.
    pub fn rank(&self, degree: usize) -> usize {
        if degree <= self.length() {
            self.modules[degree].rank
        } else {
            0
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        (1..=self.length()).map(|d| self.rank(d)).collect()
    }

    /// The differential `d : M_degree -> M_{degree-1}`, `1 <= degree <= N`.
    pub fn d(&self, degree: usize) -> &ModuleMap {
        &self.diffs[degree - 1]
    }

    pub fn gen_by_name(&self, name: &str) -> Option<GenRef> {
        self.names.get(name).copied()
    }

    pub fn gen_name(&self, g: GenRef) -> &str {
        &self.modules[g.degree].gen_names[g.index]
    }

    pub fn gens_of_degree(&self, degree: usize) -> Vec<GenRef> {
        (0..self.rank(degree))
            .map(|i| GenRef::new(degree, i))
            .collect()
    }

    /// All module generators, ascending by (degree, index).
    pub fn all_gens(&self) -> Vec<GenRef> {
        (1..=self.length())
            .flat_map(|d| self.gens_of_degree(d))
            .collect()
    }

    /// Apply the differential to a mixed-degree element; degree-1 components
    /// land in the scalar part.
    pub fn apply_d(&self, e: &Element) -> Element {
        let mut out = Element::zero(&self.ring);
        for (g, p) in e.comps() {
            if g.degree == 1 {
                let img = self.d(1).column(g.index);
                out = out.add(&Element::from_scalar(img.coord(0).mul(p)));
            } else {
                let img = self.d(g.degree).column(g.index);
                out = out.add(&Element::from_module_element(&img.scale_poly(p)));
            }
        }
        out
    }

    /// `d` applied to a single generator.
    pub fn d_of_gen(&self, g: GenRef) -> Element {
        self.apply_d(&Element::from_gen(&self.ring, g))
    }
}

/// Render an element with the resolution's generator names.
pub fn format_element(res: &Resolution, e: &Element) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    if !e.scalar().is_zero() {
        parts.push(format!("({})", e.scalar()));
    }
    for (g, p) in e.comps() {
        parts.push(format!("({})*{}", p, res.gen_name(g)));
    }
    parts.join(" + ")
}

fn o_module() -> Arc<FreeModule> {
    FreeModule::new(0, vec!["1".to_string()])
}

/// Build `M_1` free on the ideal generators and extend by kernels until the
/// resolution terminates or `max_length` is reached (setting the truncation
/// flag in that case).
pub fn resolve_ideal(
    ring: &Arc<Ring>,
    gens: &[Poly],
    names: Option<Vec<String>>,
    max_length: usize,
) -> Result<Resolution> {
    if gens.is_empty() || gens.iter().any(|g| g.is_zero()) {
        return Err(Error::Invalid("ideal generators must be nonzero".into()));
    }
    if max_length < 1 {
        return Err(Error::Invalid("max_length must be at least 1".into()));
    }
    let m0 = o_module();
    let gen_names = match names {
        Some(ns) => {
            if ns.len() != gens.len() {
                return Err(Error::Invalid("need one name per ideal generator".into()));
            }
            ns
        }
        None => (1..=gens.len()).map(|i| format!("g1_{}", i)).collect(),
    };
    let m1 = FreeModule::new(1, gen_names);
    let d1 = ModuleMap::new(ring, &m1, &m0, vec![gens.to_vec()]);

    let mut modules = vec![m0, m1];
    let mut diffs = vec![d1];
    let mut truncated = false;
    loop {
        let k = modules.len() - 1;
        let ker = kernel_generators(&diffs[k - 1]);
        if ker.is_empty() {
            break;
        }
        if k == max_length {
            truncated = true;
            break;
        }
        let names: Vec<String> = (1..=ker.len())
            .map(|i| format!("g{}_{}", k + 1, i))
            .collect();
        let mk1 = FreeModule::new(k + 1, names);
        let dk1 = ModuleMap::from_columns(ring, &mk1, &modules[k], &ker);
        modules.push(mk1);
        diffs.push(dk1);
    }
    Resolution::assemble(ring.clone(), gens.to_vec(), modules, diffs, truncated, None)
}

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(k, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(k, size, 0, &mut cur, &mut out);
    out
}

fn subset_name(prefix: &str, s: &[usize]) -> String {
    let inner: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
    format!("{}{{{}}}", prefix, inner.join(","))
}

/// Sign `(−1)^N` where `N` counts pairs `(i, j)` with `i ∈ s`, `j ∈ t`,
/// `i > j`.
fn inversion_sign(s: &[usize], t: &[usize]) -> i64 {
    let count = s
        .iter()
        .flat_map(|i| t.iter().map(move |j| (i, j)))
        .filter(|(i, j)| i > j)
        .count();
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

struct SubsetComplex {
    /// Subsets by size (index 0 = size-1 subsets), lexicographic.
    by_degree: Vec<Vec<Vec<usize>>>,
    index: BTreeMap<Vec<usize>, GenRef>,
}

impl SubsetComplex {
    fn new(k: usize) -> SubsetComplex {
        let mut by_degree = Vec::new();
        let mut index = BTreeMap::new();
        for size in 1..=k {
            let subsets = subsets_of_size(k, size);
            for (i, s) in subsets.iter().enumerate() {
                index.insert(s.clone(), GenRef::new(size, i));
            }
            by_degree.push(subsets);
        }
        SubsetComplex { by_degree, index }
    }

    fn gen_of(&self, s: &[usize]) -> GenRef {
        self.index[s]
    }
}

/// The Koszul complex of the generators: `M_i = Λ^i O^k` with the
/// contraction differential and the wedge product.
pub fn build_koszul(ring: &Arc<Ring>, gens: &[Poly]) -> Result<Resolution> {
    if gens.is_empty() || gens.iter().any(|g| g.is_zero()) {
        return Err(Error::Invalid("need nonzero generators".into()));
    }
    let k = gens.len();
    let sc = SubsetComplex::new(k);
    let m0 = o_module();
    let mut modules = vec![m0.clone()];
    for size in 1..=k {
        let names = sc.by_degree[size - 1]
            .iter()
            .map(|s| subset_name("th", s))
            .collect();
        modules.push(FreeModule::new(size, names));
    }
    let mut diffs = Vec::new();
    for size in 1..=k {
        let source = modules[size].clone();
        let target = modules[size - 1].clone();
        let cols: Vec<ModuleElement> = sc.by_degree[size - 1]
            .iter()
            .map(|s| {
                if size == 1 {
                    ModuleElement::single(ring, &target, 0, gens[s[0]].clone())
                } else {
                    let mut coords = Vec::new();
                    for (j, &elt) in s.iter().enumerate() {
                        let rest: Vec<usize> = s.iter().copied().filter(|&x| x != elt).collect();
                        let sign = if j % 2 == 0 { 1i64 } else { -1 };
                        let coeff = gens[elt].mul(&Poly::from_int(ring, sign));
                        coords.push((sc.gen_of(&rest).index, coeff));
                    }
                    ModuleElement::from_coords(ring, &target, coords)
                }
            })
            .collect();
        diffs.push(ModuleMap::from_columns(ring, &source, &target, &cols));
    }
    let mut product = DgcaProduct::new();
    for (s, gs) in &sc.index {
        for (t, gt) in &sc.index {
            if s.iter().any(|i| t.contains(i)) {
                continue;
            }
            let mut union: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
            union.sort_unstable();
            let sign = inversion_sign(s, t);
            let gu = sc.gen_of(&union);
            product.insert(
                *gs,
                *gt,
                Element::from_gen_scaled(ring, gu, Poly::from_int(ring, sign)),
            );
        }
    }
    Resolution::assemble(
        ring.clone(),
        gens.to_vec(),
        modules,
        diffs,
        false,
        Some(product),
    )
}

/// The Taylor complex of a monomial ideal: generators `e_τ` for nonempty
/// subsets, with differential and product built from least common
/// multiples.
pub fn build_taylor(ring: &Arc<Ring>, gens: &[Poly]) -> Result<Resolution> {
    if gens.is_empty() {
        return Err(Error::Invalid("need at least one monomial".into()));
    }
    let mut monomials = Vec::new();
    for g in gens {
        match g.terms() {
            [(m, c)] if c.is_one() => monomials.push(m.clone()),
            _ => {
                return Err(Error::Invalid(format!(
                    "`{}` is not a monic monomial; the Taylor complex needs monomial generators",
                    g
                )))
            }
        }
    }
    let k = gens.len();
    let sc = SubsetComplex::new(k);
    let lcm_of = |s: &[usize]| -> crate::polyring::Monomial {
        let mut m = monomials[s[0]].clone();
        for &i in &s[1..] {
            m = m.lcm(&monomials[i]);
        }
        m
    };
    let m0 = o_module();
    let mut modules = vec![m0.clone()];
    for size in 1..=k {
        let names = sc.by_degree[size - 1]
            .iter()
            .map(|s| subset_name("e", s))
            .collect();
        modules.push(FreeModule::new(size, names));
    }
    let mut diffs = Vec::new();
    for size in 1..=k {
        let source = modules[size].clone();
        let target = modules[size - 1].clone();
        let cols: Vec<ModuleElement> = sc.by_degree[size - 1]
            .iter()
            .map(|s| {
                let ms = lcm_of(s);
                if size == 1 {
                    let p = Poly::monomial(ring, ms, num_rational::BigRational::one());
                    ModuleElement::single(ring, &target, 0, p)
                } else {
                    let mut coords = Vec::new();
                    for (j, &elt) in s.iter().enumerate() {
                        let rest: Vec<usize> = s.iter().copied().filter(|&x| x != elt).collect();
                        let quotient = ms
                            .quotient(&lcm_of(&rest))
                            .expect("lcm of a subset divides the full lcm");
                        let sign = if j % 2 == 0 { 1i64 } else { -1 };
                        let coeff = Poly::monomial(
                            ring,
                            quotient,
                            num_rational::BigRational::from_integer(sign.into()),
                        );
                        coords.push((sc.gen_of(&rest).index, coeff));
                    }
                    ModuleElement::from_coords(ring, &target, coords)
                }
            })
            .collect();
        diffs.push(ModuleMap::from_columns(ring, &source, &target, &cols));
    }
    let mut product = DgcaProduct::new();
    for (s, gs) in &sc.index {
        for (t, gt) in &sc.index {
            if s.iter().any(|i| t.contains(i)) {
                continue;
            }
            let mut union: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
            union.sort_unstable();
            let coeff_mon = lcm_of(s)
                .mul(&lcm_of(t))
                .quotient(&lcm_of(&union))
                .expect("lcm of the union divides the product");
            let sign = inversion_sign(s, t);
            let coeff = Poly::monomial(
                ring,
                coeff_mon,
                num_rational::BigRational::from_integer(sign.into()),
            );
            let gu = sc.gen_of(&union);
            product.insert(*gs, *gt, Element::from_gen_scaled(ring, gu, coeff));
        }
    }
    Resolution::assemble(
        ring.clone(),
        gens.to_vec(),
        modules,
        diffs,
        false,
        Some(product),
    )
}

/// Per-degree validation results; failures are entries, not errors.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// `d_i ∘ d_{i+1} = 0` for `1 <= i < N`.
    pub d_squared: Vec<(usize, bool)>,
    /// `im(d_1)` equals the ideal, both inclusions via Gröbner membership.
    pub image_d1_matches_ideal: bool,
    /// `ker(d_i) ⊆ im(d_{i+1})` for `1 <= i < N`.
    pub exactness: Vec<(usize, bool)>,
    /// `ker(d_N) = 0`; `None` when the resolution was truncated.
    pub top_kernel_zero: Option<bool>,
    pub dgca: Option<DgcaReport>,
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct DgcaReport {
    pub commutative: bool,
    pub associative: bool,
    pub leibniz: bool,
}

impl DgcaReport {
    pub fn passed(&self) -> bool {
        self.commutative && self.associative && self.leibniz
    }
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.d_squared.iter().all(|(_, ok)| *ok)
            && self.image_d1_matches_ideal
            && self.exactness.iter().all(|(_, ok)| *ok)
            && self.top_kernel_zero.unwrap_or(true)
            && self.dgca.as_ref().map(|d| d.passed()).unwrap_or(true)
            && !self.truncated
    }

    pub fn exact(&self) -> bool {
        self.exactness.iter().all(|(_, ok)| *ok) && self.top_kernel_zero.unwrap_or(true)
    }
}

/// Check the resolution axioms degree by degree, plus the product laws when
/// a product is present.
pub fn validate(res: &Resolution) -> ValidationReport {
    let n = res.length();
    let ring = res.ring();

    let mut d_squared = Vec::new();
    for i in 1..n {
        d_squared.push((i, res.d(i).compose(res.d(i + 1)).is_zero()));
    }

    let o = res.module(0);
    let ideal_elems: Vec<ModuleElement> = res
        .ideal_gens()
        .iter()
        .map(|p| ModuleElement::single(ring, o, 0, p.clone()))
        .collect();
    let d1_cols = res.d(1).columns();
    let gb_ideal = groebner(&ideal_elems);
    let gb_image = groebner(&d1_cols);
    let image_d1_matches_ideal = d1_cols.iter().all(|c| gb_ideal.contains(c))
        && ideal_elems.iter().all(|g| gb_image.contains(g));

    let mut exactness = Vec::new();
    for i in 1..n {
        let ker = kernel_generators(res.d(i));
        let gb_next = groebner_or_empty(res, i + 1);
        let ok = ker.iter().all(|z| match &gb_next {
            Some(gb) => gb.contains(z),
            None => z.is_zero(),
        });
        exactness.push((i, ok));
    }

    let top_kernel_zero = if res.truncated() {
        None
    } else {
        Some(kernel_generators(res.d(n)).is_empty())
    };

    let dgca = res.product().map(|prod| check_dgca_laws(res, prod));

    ValidationReport {
        d_squared,
        image_d1_matches_ideal,
        exactness,
        top_kernel_zero,
        dgca,
        truncated: res.truncated(),
    }
}

fn groebner_or_empty(res: &Resolution, degree: usize) -> Option<GroebnerBasis> {
    if degree > res.length() {
        return None;
    }
    Some(groebner(&res.d(degree).columns()))
}

/// Check graded commutativity, associativity, and the Leibniz rule of a
/// product table on every generator pair and triple.
pub fn check_dgca_laws(res: &Resolution, prod: &DgcaProduct) -> DgcaReport {
    let ring = res.ring();
    let gens = res.all_gens();

    let mut commutative = true;
    let mut leibniz = true;
    for &a in &gens {
        for &b in &gens {
            let ab = prod.of_gens(ring, a, b);
            let ba = prod.of_gens(ring, b, a);
            let sign = if (a.degree * b.degree) % 2 == 0 {
                1
            } else {
                -1
            };
            if ab != ba.scale_int(sign) {
                commutative = false;
            }
            let lhs = res.apply_d(&ab);
            let da = res.d_of_gen(a);
            let db = res.d_of_gen(b);
            let ea = Element::from_gen(ring, a);
            let eb = Element::from_gen(ring, b);
            let sign_a = if a.degree % 2 == 0 { 1 } else { -1 };
            let rhs = prod
                .mul(&da, &eb)
                .add(&prod.mul(&ea, &db).scale_int(sign_a));
            if lhs != rhs {
                leibniz = false;
            }
        }
    }

    let mut associative = true;
    for &a in &gens {
        let ea = Element::from_gen(ring, a);
        for &b in &gens {
            let eb = Element::from_gen(ring, b);
            for &c in &gens {
                let ec = Element::from_gen(ring, c);
                let left = prod.mul(&prod.mul(&ea, &eb), &ec);
                let right = prod.mul(&ea, &prod.mul(&eb, &ec));
                if left != right {
                    associative = false;
                }
            }
        }
    }

    DgcaReport {
        commutative,
        associative,
        leibniz,
    }
}

// ---------------------------------------------------------------------------
// JSON exchange format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ResolutionJson {
    pub ring: RingJson,
    pub ideal: Vec<String>,
    pub modules: Vec<ModuleJson>,
    pub differentials: Vec<DiffJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<ProductEntryJson>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RingJson {
    pub variables: Vec<String>,
    pub field: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModuleJson {
    pub degree: usize,
    pub rank: usize,
    pub names: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiffJson {
    pub degree: usize,
    /// `matrix[i][j]` = coefficient of target generator `i` in the image of
    /// source generator `j`.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProductEntryJson {
    /// `[degree, generator name]`.
    pub left: [String; 2],
    pub right: [String; 2],
    /// Module element as generator-name -> polynomial.
    pub value: BTreeMap<String, String>,
}

impl Resolution {
    pub fn to_json(&self) -> ResolutionJson {
        let modules = (1..=self.length())
            .map(|d| ModuleJson {
                degree: d,
                rank: self.rank(d),
                names: self.module(d).gen_names.clone(),
            })
            .collect();
        let differentials = (1..=self.length())
            .map(|d| DiffJson {
                degree: d,
                matrix: self
                    .d(d)
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|p| p.to_string()).collect())
                    .collect(),
            })
            .collect();
        let product = self.product.as_ref().map(|prod| {
            prod.entries()
                .map(|((a, b), v)| ProductEntryJson {
                    left: [a.degree.to_string(), self.gen_name(*a).to_string()],
                    right: [b.degree.to_string(), self.gen_name(*b).to_string()],
                    value: v
                        .comps()
                        .map(|(g, p)| (self.gen_name(g).to_string(), p.to_string()))
                        .collect(),
                })
                .collect()
        });
        ResolutionJson {
            ring: RingJson {
                variables: self.ring.vars().to_vec(),
                field: "QQ".into(),
            },
            ideal: self.ideal_gens.iter().map(|p| p.to_string()).collect(),
            modules,
            differentials,
            product,
            truncated: self.truncated,
        }
    }

    pub fn from_json(json: &ResolutionJson) -> Result<Resolution> {
        if json.ring.field != "QQ" {
            return Err(Error::Invalid(format!(
                "unsupported coefficient field `{}` (only QQ)",
                json.ring.field
            )));
        }
        let ring = Ring::new(json.ring.variables.clone());
        let ideal_gens: Result<Vec<Poly>> =
            json.ideal.iter().map(|s| Poly::parse(&ring, s)).collect();
        let ideal_gens = ideal_gens?;

        let mut modules = vec![o_module()];
        for (i, m) in json.modules.iter().enumerate() {
            if m.degree != i + 1 {
                return Err(Error::Invalid(
                    "module degrees must be 1,2,... in order".into(),
                ));
            }
            if m.rank != m.names.len() {
                return Err(Error::Invalid(format!(
                    "module degree {} declares rank {} but {} names",
                    m.degree,
                    m.rank,
                    m.names.len()
                )));
            }
            modules.push(FreeModule::new(m.degree, m.names.clone()));
        }
        if json.differentials.len() != json.modules.len() {
            return Err(Error::Invalid("need one differential per module".into()));
        }
        let mut diffs = Vec::new();
        for (i, dj) in json.differentials.iter().enumerate() {
            if dj.degree != i + 1 {
                return Err(Error::Invalid(
                    "differential degrees must be 1,2,...".into(),
                ));
            }
            let source = modules[i + 1].clone();
            let target = modules[i].clone();
            if dj.matrix.len() != target.rank {
                return Err(Error::Invalid(format!(
                    "differential {} has {} rows, target rank is {}",
                    dj.degree,
                    dj.matrix.len(),
                    target.rank
                )));
            }
            let mut matrix = Vec::new();
            for row in &dj.matrix {
                if row.len() != source.rank {
                    return Err(Error::Invalid(format!(
                        "differential {} has a row of width {}, source rank is {}",
                        dj.degree,
                        row.len(),
                        source.rank
                    )));
                }
                let parsed: Result<Vec<Poly>> = row.iter().map(|s| Poly::parse(&ring, s)).collect();
                matrix.push(parsed?);
            }
            diffs.push(ModuleMap::new(&ring, &source, &target, matrix));
        }
        let mut res = Resolution::assemble(
            ring.clone(),
            ideal_gens,
            modules,
            diffs,
            json.truncated,
            None,
        )?;
        if let Some(entries) = &json.product {
            let mut prod = DgcaProduct::new();
            for e in entries {
                let a = res
                    .gen_by_name(&e.left[1])
                    .ok_or_else(|| Error::UnknownGenerator(e.left[1].clone()))?;
                let b = res
                    .gen_by_name(&e.right[1])
                    .ok_or_else(|| Error::UnknownGenerator(e.right[1].clone()))?;
                let mut value = Element::zero(&ring);
                for (name, poly) in &e.value {
                    let g = res
                        .gen_by_name(name)
                        .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                    value = value.add(&Element::from_gen_scaled(
                        &ring,
                        g,
                        Poly::parse(&ring, poly)?,
                    ));
                }
                prod.insert(a, b, value);
            }
            res.product = Some(prod);
        }
        Ok(res)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Resolution> {
        let json: ResolutionJson = serde_json::from_str(s)?;
        Resolution::from_json(&json)
    }

    /// Construct directly from parts; used by fixtures and tests.
    pub fn from_parts(
        ring: &Arc<Ring>,
        ideal_gens: Vec<Poly>,
        degree_names: Vec<Vec<String>>,
        matrices: Vec<Vec<Vec<Poly>>>,
        product: Option<DgcaProduct>,
    ) -> Result<Resolution> {
        let mut modules = vec![o_module()];
        for (i, names) in degree_names.iter().enumerate() {
            modules.push(FreeModule::new(i + 1, names.clone()));
        }
        let mut diffs = Vec::new();
        for (i, matrix) in matrices.into_iter().enumerate() {
            let source = modules[i + 1].clone();
            let target = modules[i].clone();
            diffs.push(ModuleMap::new(ring, &source, &target, matrix));
        }
        Resolution::assemble(ring.clone(), ideal_gens, modules, diffs, false, product)
    }
}
