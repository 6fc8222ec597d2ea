//! Free modules over the polynomial ring and the two linear solvers the
//! whole construction rests on: membership/lifting through a map, and
//! generators of its kernel (syzygies).
//!
//! Gröbner bases use the position-over-term extension of the ring order,
//! positions ranked by generator index. Reduction always uses the first
//! applicable basis element, which makes `lift` a deterministic function
//! of its inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::polyring::{Monomial, Poly, Ring};
use crate::{Error, Result};

/// A free `O`-module with named generators sitting in one homological degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeModule {
    pub rank: usize,
    pub gen_names: Vec<String>,
    pub degree: usize,
}

impl FreeModule {
    pub fn new(degree: usize, gen_names: Vec<String>) -> Arc<FreeModule> {
        let mut seen = std::collections::BTreeSet::new();
        for n in &gen_names {
            assert!(seen.insert(n.clone()), "duplicate generator name `{}`", n);
        }
        Arc::new(FreeModule {
            rank: gen_names.len(),
            gen_names,
            degree,
        })
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gen_names.iter().position(|n| n == name)
    }
}

/// An element of a free module: finitely many nonzero polynomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleElement {
    module: Arc<FreeModule>,
    ring: Arc<Ring>,
    coords: BTreeMap<usize, Poly>,
}

impl ModuleElement {
    pub fn zero(ring: &Arc<Ring>, module: &Arc<FreeModule>) -> ModuleElement {
        ModuleElement {
            module: module.clone(),
            ring: ring.clone(),
            coords: BTreeMap::new(),
        }
    }

    pub fn gen(ring: &Arc<Ring>, module: &Arc<FreeModule>, idx: usize) -> ModuleElement {
        ModuleElement::single(ring, module, idx, Poly::one(ring))
    }

    pub fn single(
        ring: &Arc<Ring>,
        module: &Arc<FreeModule>,
        idx: usize,
        p: Poly,
    ) -> ModuleElement {
        assert!(idx < module.rank);
        let mut coords = BTreeMap::new();
        if !p.is_zero() {
            coords.insert(idx, p);
        }
        ModuleElement {
            module: module.clone(),
            ring: ring.clone(),
            coords,
        }
    }

    pub fn from_coords(
        ring: &Arc<Ring>,
        module: &Arc<FreeModule>,
        coords: Vec<(usize, Poly)>,
    ) -> ModuleElement {
        let mut e = ModuleElement::zero(ring, module);
        for (i, p) in coords {
            e.add_assign_coord(i, &p);
        }
        e
    }

    pub fn module(&self) -> &Arc<FreeModule> {
        &self.module
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, &Poly)> {
        self.coords.iter().map(|(i, p)| (*i, p))
    }

    pub fn coord(&self, idx: usize) -> Poly {
        self.coords
            .get(&idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    fn add_assign_coord(&mut self, idx: usize, p: &Poly) {
        assert!(idx < self.module.rank);
        if p.is_zero() {
            return;
        }
        let entry = self
            .coords
            .entry(idx)
            .or_insert_with(|| Poly::zero(&self.ring));
        *entry = entry.add(p);
        if entry.is_zero() {
            self.coords.remove(&idx);
        }
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        assert!(self.module == other.module, "module mismatch");
        let mut out = self.clone();
        for (i, p) in &other.coords {
            out.add_assign_coord(*i, p);
        }
        out
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleElement {
        self.scale_poly(&Poly::from_int(&self.ring, -1))
    }

    pub fn scale(&self, c: &BigRational) -> ModuleElement {
        self.scale_poly(&Poly::constant(&self.ring, c.clone()))
    }

    pub fn scale_poly(&self, p: &Poly) -> ModuleElement {
        let mut out = ModuleElement::zero(&self.ring, &self.module);
        for (i, q) in &self.coords {
            out.add_assign_coord(*i, &q.mul(p));
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> ModuleElement {
        let mut out = ModuleElement::zero(&self.ring, &self.module);
        for (i, q) in &self.coords {
            out.add_assign_coord(*i, &q.mul_monomial(m, c));
        }
        out
    }

    /// Leading term under position-over-term: the smallest occupied position
    /// wins, then the largest monomial of that coordinate.
    fn leading(&self) -> Option<(usize, &Monomial, &BigRational)> {
        let (i, p) = self.coords.iter().next()?;
        let (m, c) = p.leading_term().expect("stored coords are nonzero");
        Some((*i, m, c))
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(i, p)| format!("({})*{}", p, self.module.gen_names[*i]))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An `O`-linear map between free modules, stored as a matrix whose entry
/// `[i][j]` is the coefficient of target generator `i` in the image of
/// source generator `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap {
    pub source: Arc<FreeModule>,
    pub target: Arc<FreeModule>,
    pub matrix: Vec<Vec<Poly>>,
    ring: Arc<Ring>,
}

impl ModuleMap {
    pub fn new(
        ring: &Arc<Ring>,
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        matrix: Vec<Vec<Poly>>,
    ) -> ModuleMap {
        assert_eq!(
            matrix.len(),
            target.rank,
            "matrix row count must equal target rank"
        );
        for row in &matrix {
            assert_eq!(
                row.len(),
                source.rank,
                "matrix column count must equal source rank"
            );
        }
        ModuleMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
            ring: ring.clone(),
        }
    }

    pub fn from_columns(
        ring: &Arc<Ring>,
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        cols: &[ModuleElement],
    ) -> ModuleMap {
        assert_eq!(cols.len(), source.rank);
        let mut matrix = vec![vec![Poly::zero(ring); source.rank]; target.rank];
        for (j, col) in cols.iter().enumerate() {
            assert!(col.module() == target);
            for (i, p) in col.coords() {
                matrix[i][j] = p.clone();
            }
        }
        ModuleMap::new(ring, source, target, matrix)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn zero(ring: &Arc<Ring>, source: &Arc<FreeModule>, target: &Arc<FreeModule>) -> ModuleMap {
        let matrix = vec![vec![Poly::zero(ring); source.rank]; target.rank];
        ModuleMap::new(ring, source, target, matrix)
    }

    pub fn column(&self, j: usize) -> ModuleElement {
        let coords = (0..self.target.rank)
            .map(|i| (i, self.matrix[i][j].clone()))
            .collect();
        ModuleElement::from_coords(&self.ring, &self.target, coords)
    }

    pub fn columns(&self) -> Vec<ModuleElement> {
        (0..self.source.rank).map(|j| self.column(j)).collect()
    }

    pub fn apply(&self, e: &ModuleElement) -> ModuleElement {
        assert!(e.module() == &self.source, "element not in source module");
        let mut out = ModuleElement::zero(&self.ring, &self.target);
        for (j, p) in e.coords() {
            out = out.add(&self.column(j).scale_poly(p));
        }
        out
    }

    /// Matrix composition `self ∘ other`.
    pub fn compose(&self, other: &ModuleMap) -> ModuleMap {
        assert!(other.target == self.source);
        let cols: Vec<ModuleElement> = other.columns().iter().map(|c| self.apply(c)).collect();
        ModuleMap::from_columns(&self.ring, &other.source, &self.target, &cols)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix
            .iter()
            .all(|row| row.iter().all(|p| p.is_zero()))
    }
}

/// A Buchberger-complete, auto-reduced, monic basis of the submodule
/// generated by the input elements, with each basis element expressed in
/// the original generators.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<Ring>,
    module: Arc<FreeModule>,
    elements: Vec<ModuleElement>,
    /// `elements[k] = Σ_j transformation[k][j] · gens[j]`.
    transformation: Vec<Vec<Poly>>,
    n_gens: usize,
}

impl GroebnerBasis {
    pub fn module(&self) -> &Arc<FreeModule> {
        &self.module
    }

    pub fn elements(&self) -> &[ModuleElement] {
        &self.elements
    }

    pub fn transformation(&self) -> &[Vec<Poly>] {
        &self.transformation
    }

    /// Deterministic normal form against the basis.
    pub fn normal_form(&self, e: &ModuleElement) -> ModuleElement {
        let (_, rem) = divide(e, &self.elements);
        rem
    }

    pub fn contains(&self, e: &ModuleElement) -> bool {
        self.normal_form(e).is_zero()
    }

    /// Express `target` in the *original* generators, or report failure.
    pub fn lift(&self, target: &ModuleElement) -> Result<Vec<Poly>> {
        let (q, rem) = divide(target, &self.elements);
        if !rem.is_zero() {
            return Err(Error::NotInImage);
        }
        let ring = &self.ring;
        let mut out = vec![Poly::zero(ring); self.n_gens];
        for (k, qk) in q.iter().enumerate() {
            if qk.is_zero() {
                continue;
            }
            for (j, t) in self.transformation[k].iter().enumerate() {
                out[j] = out[j].add(&qk.mul(t));
            }
        }
        Ok(out)
    }
}

/// Full division of `e` by `basis`: returns quotients (one per basis
/// element) and the remainder, none of whose terms is reducible.
fn divide(e: &ModuleElement, basis: &[ModuleElement]) -> (Vec<Poly>, ModuleElement) {
    let ring = e.ring().clone();
    let module = e.module().clone();
    let mut quot = vec![Poly::zero(&ring); basis.len()];
    let mut rem = ModuleElement::zero(&ring, &module);
    let mut cur = e.clone();
    'outer: while let Some((pos, mon, coeff)) = cur.leading() {
        let (pos, mon, coeff) = (pos, mon.clone(), coeff.clone());
        for (k, g) in basis.iter().enumerate() {
            if let Some((gpos, gmon, gcoeff)) = g.leading() {
                if gpos == pos {
                    if let Some(q) = mon.quotient(gmon) {
                        let factor = &coeff / gcoeff;
                        quot[k] = quot[k].add(&Poly::monomial(&ring, q.clone(), factor.clone()));
                        cur = cur.sub(&g.mul_monomial(&q, &factor));
                        continue 'outer;
                    }
                }
            }
        }
        // Irreducible leading term: move it to the remainder.
        let t = ModuleElement::single(
            &ring,
            &module,
            pos,
            Poly::monomial(&ring, mon.clone(), coeff.clone()),
        );
        rem = rem.add(&t);
        cur = cur.sub(&t);
    }
    (quot, rem)
}

struct BuchbergerRun {
    ring: Arc<Ring>,
    module: Arc<FreeModule>,
    basis: Vec<ModuleElement>,
    transformation: Vec<Vec<Poly>>,
    /// Syzygies among the basis elements collected from zero reductions.
    basis_syzygies: Vec<Vec<Poly>>,
    n_gens: usize,
}

/// Core Buchberger loop. When `collect_syzygies` is set, the coprime-lead
/// shortcut is disabled so every pair contributes its relation.
fn buchberger(gens: &[ModuleElement], collect_syzygies: bool) -> Option<BuchbergerRun> {
    let first = gens.first()?;
    let ring = first.ring().clone();
    let module = first.module().clone();
    let n_gens = gens.len();

    let mut basis: Vec<ModuleElement> = Vec::new();
    let mut transformation: Vec<Vec<Poly>> = Vec::new();
    // Zero generators contribute no basis elements; their relations surface
    // through the (Id − R·T) rows assembled by the caller.
    for (j, g) in gens.iter().enumerate() {
        assert!(g.module() == &module, "generators from different modules");
        let mut row = vec![Poly::zero(&ring); n_gens];
        if let Some((_, _, c)) = g.leading() {
            let inv = c.clone().recip();
            basis.push(g.scale(&inv));
            row[j] = Poly::constant(&ring, inv);
            transformation.push(row);
        }
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let enqueue = |pairs: &mut Vec<(usize, usize)>, basis: &[ModuleElement], new: usize| {
        for i in 0..new {
            let (pi, _, _) = basis[i].leading().unwrap();
            let (pj, _, _) = basis[new].leading().unwrap();
            if pi == pj {
                pairs.push((i, new));
            }
        }
    };
    for k in 0..basis.len() {
        enqueue(&mut pairs, &basis, k);
    }

    let mut raw_syzygies: Vec<Vec<Poly>> = Vec::new();
    while !pairs.is_empty() {
        // Deterministic selection: smallest lcm degree, then indices.
        pairs.sort_by_key(|&(i, j)| {
            let (_, mi, _) = basis[i].leading().unwrap();
            let (_, mj, _) = basis[j].leading().unwrap();
            (
                std::cmp::Reverse(mi.lcm(mj).total_degree()),
                std::cmp::Reverse((i, j)),
            )
        });
        let (i, j) = pairs.pop().unwrap();
        let mi = basis[i].leading().unwrap().1.clone();
        let mj = basis[j].leading().unwrap().1.clone();
        let lcm = mi.lcm(&mj);
        let ui = lcm.quotient(&mi).unwrap();
        let uj = lcm.quotient(&mj).unwrap();

        // Coprime-lead criterion: valid for elements supported on a single
        // position (ordinary polynomials); only applied when we are not
        // collecting syzygies.
        if !collect_syzygies && mi.is_coprime(&mj) && is_pure(&basis[i]) && is_pure(&basis[j]) {
            continue;
        }

        let one = BigRational::one();
        let spoly = basis[i]
            .mul_monomial(&ui, &one)
            .sub(&basis[j].mul_monomial(&uj, &one));
        let (q, rem) = divide(&spoly, &basis);
        if rem.is_zero() {
            if collect_syzygies {
                // ui·g_i − uj·g_j − Σ q_k g_k = 0 in basis coordinates.
                let mut s = vec![Poly::zero(&ring); basis.len()];
                s[i] = s[i].add(&Poly::monomial(&ring, ui.clone(), one.clone()));
                s[j] = s[j].sub(&Poly::monomial(&ring, uj.clone(), one.clone()));
                for (k, qk) in q.iter().enumerate() {
                    s[k] = s[k].sub(qk);
                }
                raw_syzygies.push(s);
            }
        } else {
            let (_, _, c) = rem.leading().unwrap();
            let inv = c.clone().recip();
            let new_elt = rem.scale(&inv);
            // transformation row: (ui·T_i − uj·T_j − Σ q_k·T_k) / c
            let mut row = vec![Poly::zero(&ring); n_gens];
            for t in 0..n_gens {
                let mut acc = transformation[i][t].mul_monomial(&ui, &one);
                acc = acc.sub(&transformation[j][t].mul_monomial(&uj, &one));
                for (k, qk) in q.iter().enumerate() {
                    acc = acc.sub(&qk.mul(&transformation[k][t]));
                }
                row[t] = acc.scale(&inv);
            }
            basis.push(new_elt);
            transformation.push(row);
            let new = basis.len() - 1;
            enqueue(&mut pairs, &basis, new);
        }
    }

    // Pad raw syzygies to final basis length.
    for s in &mut raw_syzygies {
        s.resize(basis.len(), Poly::zero(&ring));
    }

    Some(BuchbergerRun {
        ring,
        module,
        basis,
        transformation,
        basis_syzygies: raw_syzygies,
        n_gens,
    })
}

fn is_pure(e: &ModuleElement) -> bool {
    e.coords().count() <= 1
}

/// The reduced Gröbner basis of the submodule generated by `gens`, with
/// transformation rows recorded. Empty input yields an empty basis.
pub fn groebner(gens: &[ModuleElement]) -> GroebnerBasis {
    let run = match buchberger(gens, false) {
        Some(run) => run,
        None => {
            panic!("groebner of an empty generator list needs a module; use groebner_in")
        }
    };
    reduce_basis(run)
}

/// As `groebner` but usable with an empty generator list.
pub fn groebner_in(
    ring: &Arc<Ring>,
    module: &Arc<FreeModule>,
    gens: &[ModuleElement],
) -> GroebnerBasis {
    match buchberger(gens, false) {
        Some(run) => reduce_basis(run),
        None => GroebnerBasis {
            ring: ring.clone(),
            module: module.clone(),
            elements: Vec::new(),
            transformation: Vec::new(),
            n_gens: 0,
        },
    }
}

fn reduce_basis(run: BuchbergerRun) -> GroebnerBasis {
    let BuchbergerRun {
        ring,
        module,
        basis,
        transformation,
        n_gens,
        ..
    } = run;
    // Drop elements whose lead is divisible by another kept element's lead.
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (pi, mi, _) = basis[i].leading().unwrap();
        let (pi, mi) = (pi, mi.clone());
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (pj, mj, _) = basis[j].leading().unwrap();
            if pj == pi && mj.divides(&mi) && (mj != &mi || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<(ModuleElement, Vec<Poly>)> = basis
        .into_iter()
        .zip(transformation)
        .zip(keep)
        .filter_map(|(pair, k)| if k { Some(pair) } else { None })
        .map(|(e, t)| (e, t))
        .collect();
    // Sort by leading term for a canonical ordering: position, then monomial
    // descending so "largest" leads come first.
    kept.sort_by(|a, b| {
        let (pa, ma, _) = a.0.leading().unwrap();
        let (pb, mb, _) = b.0.leading().unwrap();
        pa.cmp(&pb).then(mb.cmp(ma))
    });
    // Tail-reduce every element against the others.
    let mut elements: Vec<ModuleElement> = kept.iter().map(|(e, _)| e.clone()).collect();
    let mut transf: Vec<Vec<Poly>> = kept.into_iter().map(|(_, t)| t).collect();
    for i in 0..elements.len() {
        let others: Vec<ModuleElement> = elements
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        let (q, rem) = divide(&elements[i], &others);
        if rem != elements[i] {
            // rem = elements[i] − Σ q_k·others_k; adjust the row accordingly.
            let mut row = transf[i].clone();
            let mut k_other = 0;
            for j in 0..elements.len() {
                if j == i {
                    continue;
                }
                let qk = &q[k_other];
                if !qk.is_zero() {
                    for t in 0..row.len() {
                        row[t] = row[t].sub(&qk.mul(&transf[j][t]));
                    }
                }
                k_other += 1;
            }
            elements[i] = rem;
            transf[i] = row;
        }
    }
    GroebnerBasis {
        ring,
        module,
        elements,
        transformation: transf,
        n_gens,
    }
}

/// Deterministic lift of `target` through the submodule generated by `gens`:
/// on success `target = Σ c_j·gens[j]` exactly.
pub fn lift(target: &ModuleElement, gens: &[ModuleElement]) -> Result<Vec<Poly>> {
    if gens.is_empty() {
        return if target.is_zero() {
            Ok(Vec::new())
        } else {
            Err(Error::NotInImage)
        };
    }
    let gb = groebner(gens);
    gb.lift(target)
}

/// A generating set for the relations `Σ c_j·gens[j] = 0`, returned as
/// elements of a fresh free module of rank `gens.len()`.
pub fn syzygies(gens: &[ModuleElement]) -> Vec<ModuleElement> {
    syzygies_named(gens, |j| format!("s{}", j + 1))
}

pub fn syzygies_named(
    gens: &[ModuleElement],
    name: impl Fn(usize) -> String,
) -> Vec<ModuleElement> {
    if gens.is_empty() {
        return Vec::new();
    }
    let ring = gens[0].ring().clone();
    let degree = gens[0].module().degree + 1;
    let syz_module = FreeModule::new(degree, (0..gens.len()).map(name).collect());

    let run = buchberger(gens, true).expect("nonempty");
    let BuchbergerRun {
        basis,
        transformation,
        basis_syzygies,
        ..
    } = run;

    let mut rows: Vec<Vec<Poly>> = Vec::new();
    // Schreyer rows: basis syzygies pushed through the transformation.
    for s in &basis_syzygies {
        let mut row = vec![Poly::zero(&ring); gens.len()];
        for (k, sk) in s.iter().enumerate() {
            if sk.is_zero() {
                continue;
            }
            for (j, t) in transformation[k].iter().enumerate() {
                row[j] = row[j].add(&sk.mul(t));
            }
        }
        rows.push(row);
    }
    // Rows of (Id − R·T), where R expresses each original generator over the
    // basis. These witness relations hidden by the reduction of redundant
    // generators (including zero generators).
    for (j, g) in gens.iter().enumerate() {
        let (r, rem) = divide(g, &basis);
        assert!(
            rem.is_zero(),
            "generator must reduce to zero against its own basis"
        );
        let mut row = vec![Poly::zero(&ring); gens.len()];
        row[j] = Poly::one(&ring);
        for (k, rk) in r.iter().enumerate() {
            if rk.is_zero() {
                continue;
            }
            for (t, tr) in transformation[k].iter().enumerate() {
                row[t] = row[t].sub(&rk.mul(tr));
            }
        }
        rows.push(row);
    }

    let mut elems: Vec<ModuleElement> = rows
        .into_iter()
        .map(|row| {
            ModuleElement::from_coords(&ring, &syz_module, row.into_iter().enumerate().collect())
        })
        .filter(|e| !e.is_zero())
        .collect();
    elems.dedup();

    // Make the generating set irredundant: drop any element lying in the
    // submodule generated by the others. For graded inputs this yields a
    // minimal generating set.
    let mut idx = elems.len();
    while idx > 0 {
        idx -= 1;
        if elems.len() <= 1 {
            break;
        }
        let candidate = elems[idx].clone();
        let others: Vec<ModuleElement> = elems
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, e)| e.clone())
            .collect();
        let gb = groebner(&others);
        if gb.contains(&candidate) {
            elems.remove(idx);
        }
    }
    elems
}

/// Generators of `ker f`, obtained as syzygies of the column images.
pub fn kernel_generators(f: &ModuleMap) -> Vec<ModuleElement> {
    let cols = f.columns();
    let syz = syzygies(&cols);
    // Rewrite syzygy coordinates as elements of the source module.
    syz.into_iter()
        .map(|s| {
            let coords: Vec<(usize, Poly)> = s.coords().map(|(i, p)| (i, p.clone())).collect();
            ModuleElement::from_coords(f.ring(), &f.source, coords)
        })
        .collect()
}
