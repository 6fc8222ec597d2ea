//! The multilinear structure induced on the resolution by the arborescent
//! operations: the binary-tree elements `k_n`, the products `μ_n`, and the
//! checkers for the higher-associativity and shuffle relations.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::ktcore::KtComplex;
use crate::polyring::{Monomial, Poly, Ring};
use crate::resolution::Element;
use crate::treealg::{boundary, left_weight_p, DecoratedTree, GenRef, Node, TreeAlg};
use crate::{Error, Result};

/// All ordered binary trees with the given leaf decorations, by splitting
/// the leaf list at every position.
pub fn binary_trees(decs: &[GenRef]) -> Vec<DecoratedTree> {
    fn nodes(decs: &[GenRef]) -> Vec<Node> {
        if decs.len() == 1 {
            return vec![Node::Leaf(decs[0])];
        }
        let mut out = Vec::new();
        for j in 1..decs.len() {
            for l in nodes(&decs[..j]) {
                for r in nodes(&decs[j..]) {
                    out.push(Node::Branch(vec![l.clone(), r]));
                }
            }
        }
        out
    }
    nodes(decs)
        .into_iter()
        .map(|root| DecoratedTree { root })
        .collect()
}

/// A signed combination of ordered binary trees, stored before
/// canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnElement {
    pub n: usize,
    pub terms: Vec<(i64, DecoratedTree)>,
}

impl KnElement {
    /// Total degree (all terms agree).
    pub fn degree(&self) -> usize {
        self.terms[0].1.degree()
    }

    /// Project into the quotient algebra.
    pub fn to_alg(&self, ring: &Arc<Ring>) -> TreeAlg {
        let mut out = TreeAlg::zero(ring);
        for (sign, t) in &self.terms {
            out = out.add(&TreeAlg::from_ordered_tree(ring, t, *sign as i32));
        }
        out
    }

    fn normalized(mut self) -> KnElement {
        self.terms
            .sort_by(|a, b| crate::treealg::cmp_subtree(&a.1.root, &b.1.root));
        self
    }
}

/// `k_n` by the splitting recursion, starting from the trivial tree.
pub fn kn_recursive(decs: &[GenRef]) -> KnElement {
    assert!(!decs.is_empty());
    if decs.len() == 1 {
        return KnElement {
            n: 1,
            terms: vec![(1, DecoratedTree::trivial(decs[0]))],
        };
    }
    let n = decs.len();
    let mut terms = Vec::new();
    for j in 1..n {
        let left = kn_recursive(&decs[..j]);
        let right = kn_recursive(&decs[j..]);
        // All terms of k_j share one degree: Σ|a| + j − 1.
        let left_degree: usize = decs[..j].iter().map(|g| g.degree).sum::<usize>() + (j - 1);
        let sign = if left_degree % 2 == 0 { 1i64 } else { -1 };
        for (s1, t1) in &left.terms {
            for (s2, t2) in &right.terms {
                terms.push((
                    sign * s1 * s2,
                    DecoratedTree::branch(vec![t1.root.clone(), t2.root.clone()]),
                ));
            }
        }
    }
    KnElement { n, terms }.normalized()
}

/// `k_n` by the closed formula: every binary shape with prefactor
/// `(−1)^{P(t[a])}`, the sum of the degrees of all left subtrees.
pub fn kn_closed(decs: &[GenRef]) -> KnElement {
    assert!(!decs.is_empty());
    let terms = binary_trees(decs)
        .into_iter()
        .map(|t| {
            let p = left_weight_p(&t).expect("binary by construction");
            (if p % 2 == 0 { 1i64 } else { -1 }, t)
        })
        .collect();
    KnElement {
        n: decs.len(),
        terms,
    }
    .normalized()
}

/// `∂ k_n` as an element of the quotient algebra; zero for every `n`.
pub fn kn_boundary(ring: &Arc<Ring>, kn: &KnElement) -> TreeAlg {
    let mut out = TreeAlg::zero(ring);
    for (sign, t) in &kn.terms {
        out = out.add(&boundary(ring, t).scale_int(*sign));
    }
    out
}

/// `μ_n` on generator arguments, with the vanishing bound short-circuit.
pub fn mu_of_gens(kt: &KtComplex, gens: &[GenRef]) -> Result<Element> {
    let ring = kt.ring().clone();
    let n = gens.len();
    assert!(n >= 1);
    match n {
        1 => Ok(kt.resolution.d_of_gen(gens[0]).neg()),
        2 => {
            let tree_degree = gens[0].degree + gens[1].degree + 1;
            if tree_degree > kt.psi.vanish_above() {
                return Ok(Element::zero(&ring));
            }
            kt.psi
                .eval_tree(&ring, &DecoratedTree::corolla(vec![gens[0], gens[1]]))
        }
        _ => {
            let total: usize = gens.iter().map(|g| g.degree).sum();
            if total + n - 1 > kt.psi.vanish_above() {
                return Ok(Element::zero(&ring));
            }
            let mut out = Element::zero(&ring);
            // Extra prefactor Σ_i (n−i)|a_i| on top of the left weight.
            let eta: usize = gens
                .iter()
                .enumerate()
                .map(|(i0, g)| (n - (i0 + 1)) * g.degree)
                .sum();
            for t in binary_trees(gens) {
                let p = left_weight_p(&t)?;
                let sign: i64 = if (p + eta) % 2 == 0 { 1 } else { -1 };
                out = out.add(&kt.psi.eval_tree(&ring, &t)?.scale_int(sign));
            }
            Ok(out)
        }
    }
}

/// `μ_n` on homogeneous elements of `O ⊕ M`: scalars act through the
/// binary product and are annihilated by the higher products.
pub fn mu(kt: &KtComplex, args: &[Element]) -> Result<Element> {
    let ring = kt.ring().clone();
    let n = args.len();
    assert!(n >= 1);
    match n {
        1 => Ok(kt.resolution.apply_d(&args[0]).neg()),
        2 => {
            let (x, y) = (&args[0], &args[1]);
            // F1·a2 + F2·a1 + ψ(a1, a2) + F1·F2.
            let mut out = Element::from_scalar(x.scalar().mul(y.scalar()));
            for (g, p) in y.comps() {
                out = out.add(&Element::from_gen_scaled(&ring, g, p.mul(x.scalar())));
            }
            for (g, p) in x.comps() {
                out = out.add(&Element::from_gen_scaled(&ring, g, p.mul(y.scalar())));
            }
            for (g, p) in x.comps() {
                for (h, q) in y.comps() {
                    out = out.add(&mu_of_gens(kt, &[g, h])?.scale_poly(&p.mul(q)));
                }
            }
            Ok(out)
        }
        _ => {
            // Multilinear over the module components; scalar parts die.
            let mut out = Element::zero(&ring);
            let comps: Vec<Vec<(GenRef, Poly)>> = args
                .iter()
                .map(|a| a.comps().map(|(g, p)| (g, p.clone())).collect())
                .collect();
            let mut idx = vec![0usize; n];
            'outer: loop {
                if comps.iter().zip(&idx).all(|(c, &i)| i < c.len()) {
                    let gens: Vec<GenRef> = comps.iter().zip(&idx).map(|(c, &i)| c[i].0).collect();
                    let mut coeff = Poly::one(&ring);
                    for (c, &i) in comps.iter().zip(&idx) {
                        coeff = coeff.mul(&c[i].1);
                    }
                    out = out.add(&mu_of_gens(kt, &gens)?.scale_poly(&coeff));
                }
                // Odometer.
                for pos in (0..n).rev() {
                    idx[pos] += 1;
                    if idx[pos] < comps[pos].len().max(1) {
                        continue 'outer;
                    }
                    idx[pos] = 0;
                }
                break;
            }
            Ok(out)
        }
    }
}

fn degree_of_arg(e: &Element) -> Result<usize> {
    if e.comps().next().is_none() {
        return Ok(0);
    }
    if !e.scalar().is_zero() {
        return Err(Error::Invalid(
            "relation arguments must be homogeneous".into(),
        ));
    }
    e.homogeneous_degree()
        .ok_or_else(|| Error::Invalid("relation arguments must be homogeneous".into()))
}

/// The higher-associativity sum
/// `Σ_{i+j+k=n} (−1)^{i+jk} μ_{n−j+1}(id^i ⊗ μ_j ⊗ id^k)` applied to the
/// arguments; zero for every `n` when the structure maps form the induced
/// algebra.
pub fn ainfty_residual(kt: &KtComplex, args: &[Element]) -> Result<Element> {
    let ring = kt.ring().clone();
    let n = args.len();
    let degs: Result<Vec<usize>> = args.iter().map(degree_of_arg).collect();
    let degs = degs?;
    let mut out = Element::zero(&ring);
    for j in 1..=n {
        for i in 0..=(n - j) {
            let k = n - i - j;
            let inner = mu(kt, &args[i..i + j])?;
            let mut outer_args: Vec<Element> = Vec::with_capacity(n - j + 1);
            outer_args.extend(args[..i].iter().cloned());
            outer_args.push(inner);
            outer_args.extend(args[i + j..].iter().cloned());
            let term = mu(kt, &outer_args)?;
            // (−1)^{i+jk}, and the Koszul sign of moving μ_j (degree j−2)
            // past the first i arguments.
            let koszul: usize = (j + 2) * degs[..i].iter().sum::<usize>();
            let sign: i64 = if (i + j * k + koszul) % 2 == 0 { 1 } else { -1 };
            out = out.add(&term.scale_int(sign));
        }
    }
    Ok(out)
}

/// The shuffle sum `Σ_{σ ∈ Sh(i,n)} e(σ) θ(σ,a) μ_n(a_σ)`; zero for every
/// split point when the structure is graded-commutative up to homotopy.
///
/// A shuffle distributes the first `split` arguments and the rest over the
/// positions, each block keeping its relative order.
pub fn shuffle_residual(kt: &KtComplex, split: usize, args: &[Element]) -> Result<Element> {
    let ring = kt.ring().clone();
    let n = args.len();
    assert!(split >= 1 && split < n);
    let degs: Result<Vec<usize>> = args.iter().map(degree_of_arg).collect();
    let degs = degs?;
    let mut out = Element::zero(&ring);
    for subset in subsets(n, split) {
        // `arrangement[p]` is the original index of the argument placed at
        // position `p`: the first block goes to the subset positions.
        let mut arrangement = vec![usize::MAX; n];
        for (k, &pos) in subset.iter().enumerate() {
            arrangement[pos] = k;
        }
        let mut next = split;
        for slot in arrangement.iter_mut() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
            }
        }
        let e_sign = permutation_sign(&arrangement);
        let theta = koszul_sign(&arrangement, &degs);
        let tuple: Vec<Element> = arrangement.iter().map(|&p| args[p].clone()).collect();
        let term = mu(kt, &tuple)?;
        out = out.add(&term.scale_int(e_sign * theta));
    }
    Ok(out)
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, size, 0, &mut cur, &mut out);
    out
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Sign θ with `a_{perm(1)} ⊙ ... ⊙ a_{perm(n)} = θ · a_1 ⊙ ... ⊙ a_n`.
fn koszul_sign(perm: &[usize], degs: &[usize]) -> i64 {
    let mut sign = 1i64;
    let mut items: Vec<usize> = perm.to_vec();
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && items[j - 1] > items[j] {
            if degs[items[j - 1]] % 2 == 1 && degs[items[j]] % 2 == 1 {
                sign = -sign;
            }
            items.swap(j - 1, j);
            j -= 1;
        }
    }
    sign
}

/// Per-arity relation results.
#[derive(Debug, Clone)]
pub struct RelationRow {
    pub n: usize,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AInftyReport {
    pub rows: Vec<RelationRow>,
}

impl AInftyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.failures.is_empty())
    }
}

/// Every generator tuple whose would-be tree degree stays within the
/// truncation.
fn gen_tuples_within(kt: &KtComplex, n: usize) -> Vec<Vec<GenRef>> {
    let gens = kt.resolution.all_gens();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        gens: &[GenRef],
        n: usize,
        budget: usize,
        cur: &mut Vec<GenRef>,
        out: &mut Vec<Vec<GenRef>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for g in gens {
            if g.degree <= budget {
                cur.push(*g);
                rec(gens, n, budget - g.degree, cur, out);
                cur.pop();
            }
        }
    }
    let budget = kt.max_degree.saturating_sub(n.saturating_sub(1));
    rec(&gens, n, budget, &mut cur, &mut out);
    out
}

fn random_poly(ring: &Arc<Ring>, rng: &mut StdRng) -> Poly {
    let nv = ring.num_vars();
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..=2) {
        let exps: Vec<u32> = (0..nv).map(|_| rng.random_range(0..=1)).collect();
        let c: i64 = rng.random_range(-3..=3);
        if c != 0 {
            terms.push((
                Monomial::new(exps),
                num_rational::BigRational::from_integer(c.into()),
            ));
        }
    }
    let p = Poly::from_terms(ring, terms);
    if p.is_zero() {
        Poly::one(ring)
    } else {
        p
    }
}

/// Check the higher-associativity relations for every arity up to `n_max`,
/// on all generator tuples within the truncation plus seeded random tuples
/// mixing in scalars.
pub fn verify_ainfty(kt: &KtComplex, n_max: usize, seed: u64) -> Result<AInftyReport> {
    let ring = kt.ring().clone();
    let mut rng = StdRng::seed_from_u64(seed);
    let all_gens = kt.resolution.all_gens();
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mut checked = 0usize;
        let mut failures = Vec::new();
        for tuple in gen_tuples_within(kt, n) {
            let args: Vec<Element> = tuple.iter().map(|g| Element::from_gen(&ring, *g)).collect();
            let r = ainfty_residual(kt, &args)?;
            checked += 1;
            if !r.is_zero() {
                failures.push(format!(
                    "({}) -> {}",
                    tuple
                        .iter()
                        .map(|g| kt.resolution.gen_name(*g).to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    r
                ));
            }
        }
        // Random tuples with scalar entries mixed in.
        for _ in 0..20 {
            let args: Vec<Element> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.4) || all_gens.is_empty() {
                        Element::from_scalar(random_poly(&ring, &mut rng))
                    } else {
                        let g = all_gens[rng.random_range(0..all_gens.len())];
                        Element::from_gen(&ring, g)
                    }
                })
                .collect();
            let total: usize = args.iter().map(|a| degree_of_arg(a).unwrap_or(0)).sum();
            if total + n > kt.max_degree + 1 {
                continue;
            }
            let r = ainfty_residual(kt, &args)?;
            checked += 1;
            if !r.is_zero() {
                failures.push(format!("random tuple -> {}", r));
            }
        }
        rows.push(RelationRow {
            n,
            checked,
            failures,
        });
    }
    Ok(AInftyReport { rows })
}

/// Check the shuffle relations for every arity up to `n_max` and every
/// split point.
pub fn verify_cinfty(kt: &KtComplex, n_max: usize) -> Result<AInftyReport> {
    let ring = kt.ring().clone();
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let mut checked = 0usize;
        let mut failures = Vec::new();
        for split in 1..n {
            for tuple in gen_tuples_within(kt, n) {
                let args: Vec<Element> =
                    tuple.iter().map(|g| Element::from_gen(&ring, *g)).collect();
                let r = shuffle_residual(kt, split, &args)?;
                checked += 1;
                if !r.is_zero() {
                    failures.push(format!(
                        "split {} on ({}) -> {}",
                        split,
                        tuple
                            .iter()
                            .map(|g| kt.resolution.gen_name(*g).to_string())
                            .collect::<Vec<_>>()
                            .join(", "),
                        r
                    ));
                }
            }
        }
        rows.push(RelationRow {
            n,
            checked,
            failures,
        });
    }
    Ok(AInftyReport { rows })
}

/// Independent route to `μ_n`: evaluate ψ on the projected `k_n` element
/// and fix the sign with `η = (−1)^{Σ |a_i| (n−i)}`.
pub fn mu_via_kn(kt: &KtComplex, gens: &[GenRef]) -> Result<Element> {
    let ring = kt.ring().clone();
    let n = gens.len();
    assert!(n >= 2);
    let kn = kn_recursive(gens);
    let mut out = Element::zero(&ring);
    for (sign, t) in &kn.terms {
        out = out.add(&kt.psi.eval_tree(&ring, t)?.scale_int(*sign));
    }
    let eta: usize = gens
        .iter()
        .enumerate()
        .map(|(i0, g)| g.degree * (n - (i0 + 1)))
        .sum();
    Ok(if eta % 2 == 0 { out } else { out.neg() })
}

/// All nonzero `μ_n` values on module-generator tuples (used in reports).
pub fn nonzero_mu_table(kt: &KtComplex, n: usize) -> Result<Vec<(Vec<GenRef>, Element)>> {
    let gens = kt.resolution.all_gens();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let tuple: Vec<GenRef> = idx.iter().map(|&i| gens[i]).collect();
        let v = mu_of_gens(kt, &tuple)?;
        if !v.is_zero() {
            out.push((tuple, v));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < gens.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// True when `μ_n` vanishes on every module-generator tuple.
pub fn mu_vanishes_on_gens(kt: &KtComplex, n: usize) -> Result<bool> {
    Ok(nonzero_mu_table(kt, n)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::treealg::canonicalize;

    fn g(d: usize, i: usize) -> GenRef {
        GenRef::new(d, i)
    }

    #[test]
    fn k2_has_the_displayed_sign() {
        for d in 1..=3 {
            let kn = kn_recursive(&[g(d, 0), g(1, 1)]);
            assert_eq!(kn.terms.len(), 1);
            let (sign, t) = &kn.terms[0];
            assert_eq!(*sign, if d % 2 == 0 { 1 } else { -1 });
            assert_eq!(t, &DecoratedTree::corolla(vec![g(d, 0), g(1, 1)]));
        }
    }

    #[test]
    fn k3_matches_display() {
        // k3 = (−1)^{|a1|+|a2|}·[a1,(a2,a3)] + (−1)^{|a2|+1}·[(a1,a2),a3].
        let (a1, a2, a3) = (g(1, 0), g(2, 1), g(1, 2));
        let kn = kn_recursive(&[a1, a2, a3]);
        assert_eq!(kn.terms.len(), 2);
        let right = DecoratedTree::branch(vec![
            Node::Leaf(a1),
            Node::Branch(vec![Node::Leaf(a2), Node::Leaf(a3)]),
        ]);
        let left = DecoratedTree::branch(vec![
            Node::Branch(vec![Node::Leaf(a1), Node::Leaf(a2)]),
            Node::Leaf(a3),
        ]);
        let find = |t: &DecoratedTree| kn.terms.iter().find(|(_, u)| u == t).unwrap().0;
        assert_eq!(find(&right), if (1 + 2) % 2 == 0 { 1 } else { -1 });
        assert_eq!(find(&left), if (2 + 1) % 2 == 0 { 1 } else { -1 });
    }

    #[test]
    fn recursion_matches_closed_form() {
        let pools = [
            vec![g(1, 0), g(1, 1)],
            vec![g(1, 0), g(2, 1), g(1, 2)],
            vec![g(2, 0), g(1, 1), g(1, 2), g(3, 3)],
            vec![g(1, 0), g(1, 1), g(2, 2), g(1, 3), g(1, 4)],
            vec![g(1, 0), g(2, 1), g(1, 2), g(2, 3), g(1, 4), g(1, 5)],
        ];
        for decs in pools {
            let a = kn_recursive(&decs);
            let b = kn_closed(&decs);
            assert_eq!(a, b, "mismatch for {:?}", decs);
            // Catalan count and unit coefficients.
            let catalan = [1usize, 1, 2, 5, 14, 42][decs.len() - 1];
            assert_eq!(a.terms.len(), catalan);
            assert!(a.terms.iter().all(|(s, _)| s.abs() == 1));
        }
    }

    #[test]
    fn kn_is_a_boundary_cycle() {
        let ring = Ring::from_names("x");
        for decs in [
            vec![g(1, 0), g(1, 1)],
            vec![g(1, 0), g(2, 1), g(1, 2)],
            vec![g(2, 0), g(1, 1), g(1, 2), g(3, 3)],
            vec![g(1, 0), g(1, 1), g(2, 2), g(1, 3), g(2, 4)],
            vec![g(1, 0), g(2, 1), g(1, 2), g(2, 3), g(1, 4), g(1, 5)],
        ] {
            let kn = kn_recursive(&decs);
            assert!(kn_boundary(&ring, &kn).is_zero(), "∂k ≠ 0 for {:?}", decs);
        }
    }

    fn quadratic_kt() -> KtComplex {
        let res = fixtures::quadratic_resolution().unwrap();
        KtComplex::construct(res, 6).unwrap()
    }

    #[test]
    fn mu2_formula_with_scalars() {
        let kt = quadratic_kt();
        let ring = kt.ring().clone();
        let res = &kt.resolution;
        let a = Element::from_gen(&ring, res.gen_by_name("pixx").unwrap());
        let f = Element::from_scalar(Poly::parse(&ring, "x+2").unwrap());
        // μ2(F, a) = F·a and μ2(a, F) = F·a.
        let fa = a.scale_poly(&Poly::parse(&ring, "x+2").unwrap());
        assert_eq!(mu(&kt, &[f.clone(), a.clone()]).unwrap(), fa);
        assert_eq!(mu(&kt, &[a.clone(), f.clone()]).unwrap(), fa);
        // μ2(F, G) = F·G.
        let g2 = Element::from_scalar(Poly::parse(&ring, "y").unwrap());
        assert_eq!(
            mu(&kt, &[f.clone(), g2]).unwrap(),
            Element::from_scalar(Poly::parse(&ring, "x*y+2*y").unwrap())
        );
        // Higher products kill scalars.
        assert!(mu(&kt, &[f.clone(), a.clone(), a]).unwrap().is_zero());
    }

    #[test]
    fn mu3_is_the_signed_tree_sum() {
        let kt = quadratic_kt();
        let ring = kt.ring().clone();
        let res = &kt.resolution;
        let gens: Vec<GenRef> = ["pixx", "pixy", "piyy"]
            .iter()
            .map(|n| res.gen_by_name(n).unwrap())
            .collect();
        let (a1, a2, a3) = (gens[0], gens[1], gens[2]);
        let ltree = DecoratedTree::branch(vec![
            Node::Branch(vec![Node::Leaf(a1), Node::Leaf(a2)]),
            Node::Leaf(a3),
        ]);
        let rtree = DecoratedTree::branch(vec![
            Node::Leaf(a1),
            Node::Branch(vec![Node::Leaf(a2), Node::Leaf(a3)]),
        ]);
        let psi_l = kt.psi.eval_tree(&ring, &ltree).unwrap();
        let psi_r = kt.psi.eval_tree(&ring, &rtree).unwrap();
        let sign_r: i64 = if a1.degree % 2 == 0 { 1 } else { -1 };
        let expected = psi_l.neg().add(&psi_r.scale_int(sign_r));
        assert_eq!(mu_of_gens(&kt, &[a1, a2, a3]).unwrap(), expected);
    }

    #[test]
    fn mu_agrees_with_kn_route() {
        let kt = quadratic_kt();
        let res = &kt.resolution;
        let gens = res.all_gens();
        for n in 2..=4 {
            let mut idx = vec![0usize; n];
            loop {
                let tuple: Vec<GenRef> = idx.iter().map(|&i| gens[i]).collect();
                let total: usize = tuple.iter().map(|g| g.degree).sum();
                if total + n - 1 <= kt.max_degree {
                    let direct = mu_of_gens(&kt, &tuple).unwrap();
                    let via_kn = mu_via_kn(&kt, &tuple).unwrap();
                    assert_eq!(direct, via_kn, "mismatch on {:?}", tuple);
                }
                let mut pos = n;
                let mut done = false;
                loop {
                    if pos == 0 {
                        done = true;
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < gens.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }

    #[test]
    fn ainfty_relations_on_quadratic_example() {
        let kt = quadratic_kt();
        let report = verify_ainfty(&kt, 4, 7).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
    }

    #[test]
    fn relations_hold_on_every_fixture() {
        // Associativity to arity five and shuffles to arity four, on each
        // of the three example complexes.
        let kts = vec![
            KtComplex::construct(fixtures::quadratic_resolution().unwrap(), 6).unwrap(),
            KtComplex::construct(fixtures::cube_corner_resolution().unwrap(), 7).unwrap(),
            KtComplex::new(
                fixtures::katthan_resolution().unwrap(),
                fixtures::katthan_psi_completed(6).unwrap(),
                6,
            ),
        ];
        for kt in &kts {
            let rel = verify_ainfty(kt, 5, 11).unwrap();
            assert!(rel.passed(), "{:?}", rel.rows);
            let shuf = verify_cinfty(kt, 4).unwrap();
            assert!(shuf.passed(), "{:?}", shuf.rows);
        }
    }

    #[test]
    fn cinfty_relations_on_quadratic_example() {
        let kt = quadratic_kt();
        let report = verify_cinfty(&kt, 3).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
        // The split-1 case of arity two is graded commutativity of ψ_∨.
        let ring = kt.ring().clone();
        let res = &kt.resolution;
        let a = Element::from_gen(&ring, res.gen_by_name("pixx").unwrap());
        let b = Element::from_gen(&ring, res.gen_by_name("pixy").unwrap());
        assert!(shuffle_residual(&kt, 1, &[a, b]).unwrap().is_zero());
    }

    #[test]
    fn kn_projection_sees_the_symmetry() {
        // pr(k_2[a,a]) = 0 for odd a.
        let ring = Ring::from_names("x");
        let kn = kn_recursive(&[g(1, 0), g(1, 0)]);
        assert!(kn.to_alg(&ring).is_zero());
        // Projection of k_3 lands on canonical classes.
        let kn = kn_recursive(&[g(1, 0), g(1, 1), g(2, 0)]);
        let alg = kn.to_alg(&ring);
        for (f, _) in alg.terms() {
            assert_eq!(f.len(), 1);
            assert!(canonicalize(f[0].tree()).unwrap().1 == 1);
        }
    }
}
