//! The reduced complex of a Koszul-Tate resolution at the maximal ideal of
//! the origin: drop products of two or more generators, kill positive-degree
//! coefficients, and take field-linear homology. Its dimensions `b_i` bound
//! the generator counts of any Koszul-Tate resolution from below.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ktcore::KtComplex;
use crate::polyring::Poly;
use crate::treealg::{canonicalize, CanonicalTree, DecoratedTree, GenRef, Node};
use crate::{Error, Result};

/// Field coefficients of the reduced complex, stored dense.
type Matrix = Vec<Vec<BigRational>>;

/// The reduced complex: per-degree bases of generator classes and the
/// induced field-linear differential.
pub struct ReducedComplex {
    pub max_degree: usize,
    /// Basis labels per degree `0..=max_degree`; degree 0 is the unit class.
    bases: Vec<Vec<String>>,
    /// Canonical-tree index per degree (empty for non-tree bases).
    tree_index: Vec<Vec<Option<CanonicalTree>>>,
    /// `matrices[i]` maps degree `i+1` into degree `i`:
    /// rows = dim(degree i), cols = dim(degree i+1).
    matrices: Vec<Matrix>,
}

impl ReducedComplex {
    pub fn dim(&self, degree: usize) -> usize {
        self.bases[degree].len()
    }

    pub fn basis(&self, degree: usize) -> &[String] {
        &self.bases[degree]
    }

    /// Matrix of the differential from `degree` into `degree − 1`.
    pub fn matrix_from(&self, degree: usize) -> &Matrix {
        &self.matrices[degree - 1]
    }

    fn tree_position(&self, degree: usize, ct: &CanonicalTree) -> Option<usize> {
        self.tree_index[degree]
            .iter()
            .position(|t| t.as_ref() == Some(ct))
    }
}

/// Evaluate a polynomial at the origin.
fn at_origin(p: &Poly) -> BigRational {
    p.constant_term()
}

/// Reduce an arborescent Koszul-Tate complex at the origin. The composition
/// of consecutive matrices is re-checked to be zero.
pub fn reduce_at_origin(kt: &KtComplex, max_degree: usize) -> Result<ReducedComplex> {
    for g in kt.resolution.ideal_gens() {
        if !g.in_maximal_ideal() {
            return Err(Error::Invalid(format!(
                "ideal generator `{}` does not vanish at the origin",
                g
            )));
        }
    }
    if max_degree > kt.max_degree {
        return Err(Error::DegreeOverflow(max_degree, kt.max_degree));
    }
    let res = &kt.resolution;
    let en = kt.enumerator();
    let mut bases: Vec<Vec<String>> = vec![vec!["1".to_string()]];
    let mut tree_index: Vec<Vec<Option<CanonicalTree>>> = vec![vec![None]];
    let mut trees_by_degree: Vec<Vec<CanonicalTree>> = vec![Vec::new()];
    for deg in 1..=max_degree {
        let trees = en.trees_of_degree(deg);
        bases.push(
            trees
                .iter()
                .map(|t| {
                    crate::treealg::tree_to_text(t.tree(), &|g: GenRef| res.gen_name(g).to_string())
                })
                .collect(),
        );
        tree_index.push(trees.iter().cloned().map(Some).collect());
        trees_by_degree.push(trees);
    }

    let mut matrices: Vec<Matrix> = Vec::new();
    for deg in 1..=max_degree {
        let sources = &trees_by_degree[deg];
        let rows = bases[deg - 1].len();
        let mut m: Matrix = vec![vec![BigRational::zero(); sources.len()]; rows];
        for (j, src) in sources.iter().enumerate() {
            let image = kt.delta_tree_closed(src)?;
            if deg == 1 {
                m[0][j] = at_origin(&image.scalar_part());
            } else {
                for (forest, coeff) in image.terms() {
                    if forest.len() != 1 {
                        continue;
                    }
                    let c = at_origin(coeff);
                    if c.is_zero() {
                        continue;
                    }
                    let i = trees_by_degree[deg - 1]
                        .iter()
                        .position(|t| t == &forest[0])
                        .expect("image tree within truncation");
                    m[i][j] = c;
                }
            }
        }
        matrices.push(m);
    }

    let rc = ReducedComplex {
        max_degree,
        bases,
        tree_index,
        matrices,
    };
    // Consecutive matrices must compose to zero.
    for deg in 2..=max_degree {
        let a = rc.matrix_from(deg - 1);
        let b = rc.matrix_from(deg);
        for i in 0..rc.dim(deg - 2) {
            for k in 0..rc.dim(deg) {
                let mut acc = BigRational::zero();
                for j in 0..rc.dim(deg - 1) {
                    acc += &a[i][j] * &b[j][k];
                }
                if !acc.is_zero() {
                    return Err(Error::Invalid(format!(
                        "reduced matrices do not compose to zero between degrees {} and {}",
                        deg,
                        deg - 2
                    )));
                }
            }
        }
    }
    Ok(rc)
}

/// Reduce the Koszul complex viewed directly as a Koszul-Tate resolution:
/// its generator module lives entirely in degree one.
pub fn reduce_koszul_direct(gens: &[Poly], max_degree: usize) -> Result<ReducedComplex> {
    if gens.is_empty() {
        return Err(Error::Invalid("need at least one generator".into()));
    }
    for g in gens {
        if !g.in_maximal_ideal() {
            return Err(Error::Invalid(format!(
                "ideal generator `{}` does not vanish at the origin",
                g
            )));
        }
    }
    let mut bases = vec![vec!["1".to_string()]];
    let mut tree_index: Vec<Vec<Option<CanonicalTree>>> = vec![vec![None]];
    bases.push((1..=gens.len()).map(|i| format!("th{{{}}}", i)).collect());
    tree_index.push(vec![None; gens.len()]);
    for _ in 2..=max_degree {
        bases.push(Vec::new());
        tree_index.push(Vec::new());
    }
    let mut matrices: Vec<Matrix> = Vec::new();
    // Degree 1 -> 0: generators map to ideal elements, all vanishing at 0.
    matrices.push(vec![vec![BigRational::zero(); gens.len()]]);
    for deg in 2..=max_degree {
        matrices.push(vec![Vec::new(); bases[deg - 1].len()]);
    }
    Ok(ReducedComplex {
        max_degree,
        bases,
        tree_index,
        matrices,
    })
}

/// Homology dimensions of the reduced complex. `b[0]` is not defined;
/// `b[i]` is reported for `1 <= i <= max_degree − 1` (the truncation caps
/// what can be claimed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    pub truncation_degree: usize,
    pub b: Vec<Option<usize>>,
}

/// Rank over the rationals by fraction-free (Bareiss) elimination on a
/// denominator-cleared integer matrix.
pub fn rank_fraction_free(matrix: &Matrix) -> usize {
    let rows = matrix.len();
    if rows == 0 {
        return 0;
    }
    let cols = matrix[0].len();
    if cols == 0 {
        return 0;
    }
    // Clear denominators row by row; row scaling preserves rank.
    let mut m: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for e in row {
                let d = e.denom();
                let g = num_integer::gcd(lcm.clone(), d.clone());
                lcm = lcm / g * d;
            }
            row.iter().map(|e| e.numer() * (&lcm / e.denom())).collect()
        })
        .collect();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    let mut row = 0usize;
    for col in 0..cols {
        // Find a pivot in this column.
        let pivot = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        for r in 0..rows {
            if r == row {
                continue;
            }
            for c in (col + 1)..cols {
                let val = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = &val / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        if prev.is_negative() {
            // Bareiss divisions stay exact up to sign.
            prev = -prev;
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Exact homology dimensions from the reduced matrices.
pub fn betti(rc: &ReducedComplex) -> BettiVector {
    let mut b: Vec<Option<usize>> = vec![None];
    for i in 1..=rc.max_degree.saturating_sub(1) {
        let rank_in = rank_fraction_free(rc.matrix_from(i + 1));
        let rank_out = rank_fraction_free(rc.matrix_from(i));
        let dim = rc.dim(i);
        let bi = dim - rank_out - rank_in;
        debug_assert!(bi <= dim);
        b.push(Some(bi));
    }
    BettiVector {
        truncation_degree: rc.max_degree,
        b: b.clone(),
    }
}

/// A minimality violation: the differential of `source` hits `target` with
/// an invertible coefficient, so `target` is a redundant generator.
#[derive(Debug, Clone)]
pub struct Violation {
    pub degree: usize,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// All violations in (degree, source, target) order; the named
    /// `first_violation` is the target of the first one.
    pub violations: Vec<Violation>,
}

impl MinimalityReport {
    pub fn first_violation(&self) -> Option<&str> {
        self.violations.first().map(|v| v.target.as_str())
    }
}

/// Minimality through the reduced matrices: the resolution is minimal at
/// the origin exactly when every matrix above degree one vanishes.
pub fn is_minimal_reduced(rc: &ReducedComplex) -> MinimalityReport {
    let mut violations = Vec::new();
    for deg in 2..=rc.max_degree {
        let m = rc.matrix_from(deg);
        for j in 0..rc.dim(deg) {
            for (i, row) in m.iter().enumerate() {
                if !row[j].is_zero() {
                    violations.push(Violation {
                        degree: deg,
                        source: rc.basis(deg)[j].clone(),
                        target: rc.basis(deg - 1)[i].clone(),
                    });
                }
            }
        }
    }
    MinimalityReport {
        minimal: violations.is_empty(),
        violations,
    }
}

/// Minimality checked directly on the generators: `δ` of every generator
/// of degree at least two must land in `J·E ⊕ S^{≥2}(E)`.
pub fn is_minimal_direct(kt: &KtComplex, max_degree: usize) -> Result<MinimalityReport> {
    let res = &kt.resolution;
    let en = kt.enumerator();
    let name = |g: GenRef| res.gen_name(g).to_string();
    let mut violations = Vec::new();
    for deg in 2..=max_degree {
        for ct in en.trees_of_degree(deg) {
            let image = kt.delta_tree_closed(&ct)?;
            for (forest, coeff) in image.terms() {
                if forest.len() == 1 && !at_origin(coeff).is_zero() {
                    violations.push(Violation {
                        degree: deg,
                        source: crate::treealg::tree_to_text(ct.tree(), &name),
                        target: crate::treealg::tree_to_text(forest[0].tree(), &name),
                    });
                }
            }
        }
    }
    Ok(MinimalityReport {
        minimal: violations.is_empty(),
        violations,
    })
}

/// A witness class certifying `b_{2m+1} ≠ 0` for a monomial ideal whose
/// generators are not a regular sequence: the left comb of depth `m` on a
/// non-coprime pair.
#[derive(Debug)]
pub struct Witness {
    pub pair: (usize, usize),
    pub degree: usize,
    pub tree: String,
    pub closed: bool,
    pub exact: bool,
}

impl Witness {
    pub fn certified(&self) -> bool {
        self.closed && !self.exact
    }
}

/// Build and certify the comb witness `T_m` over a Taylor-backed complex.
pub fn witness_comb(kt: &KtComplex, rc: &ReducedComplex, m: usize) -> Result<Witness> {
    let res = &kt.resolution;
    // A pair of generating monomials whose lcm is smaller than the product.
    let mut pair = None;
    'search: for i in 0..res.ideal_gens().len() {
        for j in (i + 1)..res.ideal_gens().len() {
            let a = &res.ideal_gens()[i];
            let b = &res.ideal_gens()[j];
            let (ma, mb) = match (a.terms(), b.terms()) {
                ([(ma, _)], [(mb, _)]) => (ma, mb),
                _ => {
                    return Err(Error::Invalid(
                        "witness construction needs monomial generators".into(),
                    ))
                }
            };
            if !ma.is_coprime(mb) {
                pair = Some((i, j));
                break 'search;
            }
        }
    }
    let (i, j) = pair.ok_or_else(|| {
        Error::Invalid("no witness pair: the generators form a regular sequence".into())
    })?;

    let gi = GenRef::new(1, i);
    let gj = GenRef::new(1, j);
    let degree = 2 * m + 1;
    if degree + 1 > rc.max_degree {
        return Err(Error::DegreeOverflow(degree + 1, rc.max_degree));
    }

    let tree = if m == 0 {
        DecoratedTree::trivial(gi)
    } else {
        let mut t = DecoratedTree::corolla(vec![gi, gj]);
        for _ in 1..m {
            t = DecoratedTree::branch(vec![t.root, Node::Leaf(gj)]);
        }
        t
    };
    let (ct, _) = canonicalize(&tree)
        .ok_or_else(|| Error::Invalid("comb witness canonicalizes to zero".into()))?;
    let name = |g: GenRef| res.gen_name(g).to_string();
    let label = crate::treealg::tree_to_text(ct.tree(), &name);

    let idx = rc
        .tree_position(degree, &ct)
        .ok_or_else(|| Error::Invalid("witness tree missing from the reduced basis".into()))?;

    // Closed: its column in the reduced differential vanishes.
    let closed = rc.matrix_from(degree).iter().all(|row| row[idx].is_zero());

    // Exact: lies in the image of the next matrix. Compare ranks with and
    // without the witness column appended.
    let next = rc.matrix_from(degree + 1);
    let rank_plain = rank_fraction_free(next);
    let mut augmented: Matrix = next.clone();
    for (r, row) in augmented.iter_mut().enumerate() {
        row.push(if r == idx {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    if augmented.is_empty() {
        // Zero-dimensional target cannot happen: the witness lives there.
        return Err(Error::Invalid("empty degree in reduced complex".into()));
    }
    let exact = rank_fraction_free(&augmented) == rank_plain;

    Ok(Witness {
        pair: (i, j),
        degree,
        tree: label,
        closed,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ktcore::KtComplex;
    use crate::polyring::{Poly, Ring};
    use crate::resolution::{build_taylor, resolve_ideal};
    use std::sync::Arc;

    fn q(ring: &Arc<crate::polyring::Ring>, s: &str) -> Poly {
        Poly::parse(ring, s).unwrap()
    }

    #[test]
    fn rank_of_small_matrices() {
        let r = |n: i64| BigRational::from_integer(n.into());
        let m = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        assert_eq!(rank_fraction_free(&m), 1);
        let m = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        assert_eq!(rank_fraction_free(&m), 2);
        let m = vec![vec![r(0), r(0)]];
        assert_eq!(rank_fraction_free(&m), 0);
        let m = vec![
            vec![r(2), r(3), r(5)],
            vec![r(4), r(6), r(10)],
            vec![r(1), r(1), r(1)],
        ];
        assert_eq!(rank_fraction_free(&m), 2);
    }

    #[test]
    fn koszul_direct_regular_sequence() {
        let ring = Ring::from_names("x,y");
        let gens = vec![q(&ring, "x^2"), q(&ring, "y^3")];
        let rc = reduce_koszul_direct(&gens, 7).unwrap();
        let bv = betti(&rc);
        assert_eq!(bv.b[1], Some(2));
        for i in 2..=6 {
            assert_eq!(bv.b[i], Some(0), "b_{} should vanish", i);
        }
        let min = is_minimal_reduced(&rc);
        assert!(min.minimal);
    }

    #[test]
    fn koszul_direct_principal() {
        let ring = Ring::from_names("x");
        let rc = reduce_koszul_direct(&[q(&ring, "x^2")], 5).unwrap();
        let bv = betti(&rc);
        assert_eq!(bv.b[1], Some(1));
        assert_eq!(bv.b[2], Some(0));
        assert!(is_minimal_reduced(&rc).minimal);
    }

    #[test]
    fn quadratic_example_not_minimal_at_the_corolla() {
        let res = fixtures::quadratic_resolution().unwrap();
        let kt = KtComplex::construct(res, 6).unwrap();
        let rc = reduce_at_origin(&kt, 6).unwrap();
        let report = is_minimal_reduced(&rc);
        assert!(!report.minimal);
        // The first violation names the three-corolla as redundant.
        assert_eq!(report.first_violation(), Some("(pixx pixy piyy)"));
        // Direct and reduced checks agree.
        let direct = is_minimal_direct(&kt, 6).unwrap();
        assert_eq!(direct.minimal, report.minimal);
        assert_eq!(
            direct.violations.first().map(|v| v.target.clone()),
            report.violations.first().map(|v| v.target.clone())
        );
    }

    #[test]
    fn betti_of_quadratic_example() {
        let res = fixtures::quadratic_resolution().unwrap();
        let kt = KtComplex::construct(res, 6).unwrap();
        let rc = reduce_at_origin(&kt, 6).unwrap();
        let bv = betti(&rc);
        assert_eq!(bv.b[1], Some(3));
        // Odd-degree homology persists for this non-complete-intersection.
        assert!(bv.b[3].unwrap() >= 1);
        assert!(bv.b[5].unwrap() >= 1);
    }

    #[test]
    fn betti_is_independent_of_the_resolution() {
        // The same ideal through the generic pipeline and the Taylor
        // product route; the homology dimensions agree.
        let ring = Ring::from_names("x,y");
        let gens = vec![q(&ring, "x^2"), q(&ring, "x*y"), q(&ring, "y^2")];
        let max = 5;

        let generic = Arc::new(resolve_ideal(&ring, &gens, None, 8).unwrap());
        let kt1 = KtComplex::construct(generic, max).unwrap();
        let b1 = betti(&reduce_at_origin(&kt1, max).unwrap());

        let taylor = Arc::new(build_taylor(&ring, &gens).unwrap());
        let kt2 = KtComplex::from_dga(taylor, max).unwrap();
        let b2 = betti(&reduce_at_origin(&kt2, max).unwrap());

        assert_eq!(b1.b, b2.b);
    }

    #[test]
    fn betti_is_independent_of_lift_tie_breaking() {
        // Permuting the generators changes the deterministic lift choices
        // throughout the construction; the homology dimensions must not.
        let ring = Ring::from_names("x,y");
        let max = 5;
        let orders = [
            ["x^2", "x*y", "y^2"],
            ["y^2", "x^2", "x*y"],
            ["x*y", "y^2", "x^2"],
        ];
        let mut results = Vec::new();
        for order in orders {
            let gens: Vec<Poly> = order.iter().map(|s| q(&ring, s)).collect();
            let res = Arc::new(resolve_ideal(&ring, &gens, None, 8).unwrap());
            let kt = KtComplex::construct(res, max).unwrap();
            results.push(betti(&reduce_at_origin(&kt, max).unwrap()).b);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[0], results[2]);
    }

    #[test]
    fn taylor_witness_combs() {
        let ring = Ring::from_names("x,y");
        let gens = vec![q(&ring, "x^2"), q(&ring, "x*y"), q(&ring, "y^2")];
        let taylor = Arc::new(build_taylor(&ring, &gens).unwrap());
        let kt = KtComplex::from_dga(taylor, 6).unwrap();
        let rc = reduce_at_origin(&kt, 6).unwrap();
        // m = 0: the trivial generator class.
        let w0 = witness_comb(&kt, &rc, 0).unwrap();
        assert!(w0.certified(), "{:?}", w0);
        assert_eq!(w0.degree, 1);
        // m = 1: the two-leaf comb of degree three.
        let w1 = witness_comb(&kt, &rc, 1).unwrap();
        assert!(w1.certified(), "{:?}", w1);
        assert_eq!(w1.degree, 3);
        assert_eq!(w1.pair, (0, 1));
    }

    #[test]
    fn witness_requires_non_coprime_pair() {
        let ring = Ring::from_names("x,y");
        let gens = vec![q(&ring, "x^2"), q(&ring, "y^3")];
        let taylor = Arc::new(build_taylor(&ring, &gens).unwrap());
        let kt = KtComplex::from_dga(taylor, 5).unwrap();
        let rc = reduce_at_origin(&kt, 5).unwrap();
        assert!(witness_comb(&kt, &rc, 1).is_err());
    }

    #[test]
    fn minimality_matches_betti_counts() {
        // Minimal ⇔ b_i equals the generator count in every reported degree.
        let ring = Ring::from_names("x");
        let rc = reduce_koszul_direct(&[q(&ring, "x^3")], 5).unwrap();
        let bv = betti(&rc);
        let min = is_minimal_reduced(&rc);
        let counts_match = (1..=4).all(|i| bv.b[i] == Some(rc.dim(i)));
        assert_eq!(min.minimal, counts_match);
        assert!(min.minimal);

        let res = fixtures::quadratic_resolution().unwrap();
        let kt = KtComplex::construct(res, 5).unwrap();
        let rc = reduce_at_origin(&kt, 5).unwrap();
        let bv = betti(&rc);
        let min = is_minimal_reduced(&rc);
        let counts_match = (1..=4).all(|i| bv.b[i] == Some(rc.dim(i)));
        assert_eq!(min.minimal, counts_match);
        assert!(!min.minimal);
    }
}
