//! Planar rooted trees with decorated leaves, considered up to child
//! permutations weighted by Koszul signs, and the free graded-commutative
//! algebra generated by them.
//!
//! Every inner vertex has at least two children; the one-leaf tree with no
//! vertices is the trivial tree. A decorated tree of shape `t` with leaf
//! decorations `a_1..a_n` has degree `|a_1| + .. + |a_n| + #vertices`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::polyring::{Poly, Ring};
use crate::{Error, Result};

/// Reference to a basis generator of the underlying resolution: homological
/// degree and index within that degree's free module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenRef {
    pub degree: usize,
    pub index: usize,
}

impl GenRef {
    pub fn new(degree: usize, index: usize) -> GenRef {
        GenRef { degree, index }
    }
}

/// A node of an ordered decorated tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(GenRef),
    /// A fresh leaf slot of known degree, produced by `up_down`; it must be
    /// substituted away before canonicalization.
    Hole(usize),
    Branch(Vec<Node>),
}

impl Node {
    pub fn degree(&self) -> usize {
        match self {
            Node::Leaf(g) => g.degree,
            Node::Hole(d) => *d,
            Node::Branch(ch) => 1 + ch.iter().map(|c| c.degree()).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) | Node::Hole(_) => 1,
            Node::Branch(ch) => ch.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Node::Leaf(_) | Node::Hole(_) => 0,
            Node::Branch(ch) => 1 + ch.iter().map(|c| c.vertex_count()).sum::<usize>(),
        }
    }

    fn has_hole(&self) -> bool {
        match self {
            Node::Leaf(_) => false,
            Node::Hole(_) => true,
            Node::Branch(ch) => ch.iter().any(|c| c.has_hole()),
        }
    }
}

/// Total order on decorated subtrees: degree, then leaf count, then shape
/// and decorations recursively. Two subtrees compare equal exactly when
/// they are identical.
pub fn cmp_subtree(a: &Node, b: &Node) -> Ordering {
    (a.degree(), a.leaf_count())
        .cmp(&(b.degree(), b.leaf_count()))
        .then_with(|| match (a, b) {
            (Node::Leaf(x), Node::Leaf(y)) => x.cmp(y),
            (Node::Leaf(_), _) => Ordering::Less,
            (_, Node::Leaf(_)) => Ordering::Greater,
            (Node::Hole(x), Node::Hole(y)) => x.cmp(y),
            (Node::Hole(_), _) => Ordering::Less,
            (_, Node::Hole(_)) => Ordering::Greater,
            (Node::Branch(xs), Node::Branch(ys)) => {
                for (x, y) in xs.iter().zip(ys.iter()) {
                    match cmp_subtree(x, y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                xs.len().cmp(&ys.len())
            }
        })
}

/// An ordered (planar) decorated tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedTree {
    pub root: Node,
}

impl DecoratedTree {
    pub fn trivial(g: GenRef) -> DecoratedTree {
        DecoratedTree {
            root: Node::Leaf(g),
        }
    }

    pub fn branch(children: Vec<Node>) -> DecoratedTree {
        assert!(
            children.len() >= 2,
            "every vertex needs at least two children"
        );
        DecoratedTree {
            root: Node::Branch(children),
        }
    }

    /// Corolla: one root with `n >= 2` leaf children.
    pub fn corolla(decorations: Vec<GenRef>) -> DecoratedTree {
        DecoratedTree::branch(decorations.into_iter().map(Node::Leaf).collect())
    }

    pub fn degree(&self) -> usize {
        self.root.degree()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.root.vertex_count()
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.root, Node::Leaf(_) | Node::Hole(_))
    }

    /// Leaf decorations in planar (left-to-right) order.
    pub fn decorations(&self) -> Vec<GenRef> {
        let mut out = Vec::new();
        fn walk(n: &Node, out: &mut Vec<GenRef>) {
            match n {
                Node::Leaf(g) => out.push(*g),
                Node::Hole(_) => panic!("decorations() on a tree with a hole"),
                Node::Branch(ch) => ch.iter().for_each(|c| walk(c, out)),
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Replace the leaf in slot `i` (planar order) by an arbitrary node.
    pub fn replace_leaf(&self, slot: usize, replacement: Node) -> DecoratedTree {
        fn walk(
            n: &Node,
            slot: usize,
            counter: &mut usize,
            replacement: &mut Option<Node>,
        ) -> Node {
            match n {
                Node::Leaf(g) => {
                    let here = *counter;
                    *counter += 1;
                    if here == slot {
                        replacement.take().expect("slot visited once")
                    } else {
                        Node::Leaf(*g)
                    }
                }
                Node::Hole(d) => {
                    let here = *counter;
                    *counter += 1;
                    if here == slot {
                        replacement.take().expect("slot visited once")
                    } else {
                        Node::Hole(*d)
                    }
                }
                Node::Branch(ch) => Node::Branch(
                    ch.iter()
                        .map(|c| walk(c, slot, counter, replacement))
                        .collect(),
                ),
            }
        }
        let mut counter = 0;
        let mut replacement = Some(replacement);
        let root = walk(&self.root, slot, &mut counter, &mut replacement);
        assert!(replacement.is_none(), "slot {} out of range", slot);
        DecoratedTree { root }
    }

    pub fn node_at(&self, path: &[usize]) -> Result<&Node> {
        let mut cur = &self.root;
        for &i in path {
            match cur {
                Node::Branch(ch) => {
                    cur = ch.get(i).ok_or_else(|| {
                        Error::InvalidTree(format!("no child {} at path {:?}", i, path))
                    })?;
                }
                _ => {
                    return Err(Error::InvalidTree(format!(
                        "path {:?} descends into a leaf",
                        path
                    )))
                }
            }
        }
        Ok(cur)
    }

    /// Replace the node at `path` by `replacement`.
    pub fn replace_at(&self, path: &[usize], replacement: Node) -> Result<DecoratedTree> {
        fn walk(n: &Node, path: &[usize], replacement: Node) -> Result<Node> {
            if path.is_empty() {
                return Ok(replacement);
            }
            match n {
                Node::Branch(ch) => {
                    let i = path[0];
                    if i >= ch.len() {
                        return Err(Error::InvalidTree(format!("no child {}", i)));
                    }
                    let mut ch2 = ch.clone();
                    ch2[i] = walk(&ch[i], &path[1..], replacement)?;
                    Ok(Node::Branch(ch2))
                }
                _ => Err(Error::InvalidTree("path descends into a leaf".into())),
            }
        }
        Ok(DecoratedTree {
            root: walk(&self.root, path, replacement)?,
        })
    }

    /// Replace the unique hole by a leaf.
    pub fn fill_hole(&self, g: GenRef) -> DecoratedTree {
        fn walk(n: &Node, g: GenRef) -> Node {
            match n {
                Node::Leaf(x) => Node::Leaf(*x),
                Node::Hole(_) => Node::Leaf(g),
                Node::Branch(ch) => Node::Branch(ch.iter().map(|c| walk(c, g)).collect()),
            }
        }
        DecoratedTree {
            root: walk(&self.root, g),
        }
    }
}

/// A decorated tree whose children are sorted at every vertex by the
/// canonical order. Constructed only through `canonicalize`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalTree(DecoratedTree);

impl CanonicalTree {
    pub fn tree(&self) -> &DecoratedTree {
        &self.0
    }

    pub fn into_tree(self) -> DecoratedTree {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    /// The unique generator of a trivial tree.
    pub fn trivial_gen(&self) -> Option<GenRef> {
        match self.0.root {
            Node::Leaf(g) => Some(g),
            _ => None,
        }
    }

    pub fn trivial(g: GenRef) -> CanonicalTree {
        CanonicalTree(DecoratedTree::trivial(g))
    }
}

impl Ord for CanonicalTree {
    fn cmp(&self, other: &CanonicalTree) -> Ordering {
        cmp_subtree(&self.0.root, &other.0.root)
    }
}

impl PartialOrd for CanonicalTree {
    fn partial_cmp(&self, other: &CanonicalTree) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |g: GenRef| format!("g{}_{}", g.degree, g.index);
        write!(f, "{}", tree_to_text(self.tree(), &name))
    }
}

/// Sort a graded list by adjacent transpositions, accumulating the Koszul
/// sign. Returns `None` when two equal odd-degree items collide.
fn sort_graded<T>(
    items: &mut [T],
    deg: impl Fn(&T) -> usize,
    cmp: impl Fn(&T, &T) -> Ordering,
) -> Option<i32> {
    let mut sign = 1i32;
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && cmp(&items[j - 1], &items[j]) == Ordering::Greater {
            if deg(&items[j - 1]) % 2 == 1 && deg(&items[j]) % 2 == 1 {
                sign = -sign;
            }
            items.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in items.windows(2) {
        if cmp(&w[0], &w[1]) == Ordering::Equal && deg(&w[0]) % 2 == 1 {
            return None;
        }
    }
    Some(sign)
}

/// Canonical representative of the equivalence class of `t`, with the Koszul
/// sign relating them; `None` when the class is zero (two identical
/// odd-degree children at some vertex).
pub fn canonicalize(t: &DecoratedTree) -> Option<(CanonicalTree, i32)> {
    assert!(!t.root.has_hole(), "cannot canonicalize a tree with a hole");
    fn walk(n: &Node) -> Option<(Node, i32)> {
        match n {
            Node::Leaf(g) => Some((Node::Leaf(*g), 1)),
            Node::Hole(_) => unreachable!(),
            Node::Branch(ch) => {
                let mut sign = 1i32;
                let mut canon: Vec<Node> = Vec::with_capacity(ch.len());
                for c in ch {
                    let (cc, s) = walk(c)?;
                    sign *= s;
                    canon.push(cc);
                }
                let s = sort_graded(&mut canon, Node::degree, cmp_subtree)?;
                Some((Node::Branch(canon), sign * s))
            }
        }
    }
    let (root, sign) = walk(&t.root)?;
    Some((CanonicalTree(DecoratedTree { root }), sign))
}

// ---------------------------------------------------------------------------
// Leaf normalization (scalar-decorated leaves)
// ---------------------------------------------------------------------------

/// A tree whose leaves may carry ring elements instead of generators.
#[derive(Debug, Clone)]
pub enum RawNode {
    Gen(GenRef),
    Scalar(Poly),
    Branch(Vec<RawNode>),
}

/// Result of erasing scalar-decorated leaves.
#[derive(Debug, Clone)]
pub enum Normalized {
    Zero,
    Scalar(Poly),
    Tree { factor: Poly, tree: DecoratedTree },
}

/// Erase every scalar-decorated leaf whose parent keeps at least two
/// children, multiplying its value into the coefficient; a scalar leaf
/// under a vertex that would be left with fewer than two children kills
/// the tree.
pub fn normalize_scalar_leaves(ring: &Arc<Ring>, t: &RawNode) -> Normalized {
    enum Out {
        Scalar(Poly),
        Node(Poly, Node),
    }
    fn walk(ring: &Arc<Ring>, n: &RawNode) -> Option<Out> {
        match n {
            RawNode::Gen(g) => Some(Out::Node(Poly::one(ring), Node::Leaf(*g))),
            RawNode::Scalar(p) => Some(Out::Scalar(p.clone())),
            RawNode::Branch(ch) => {
                let mut factor = Poly::one(ring);
                let mut kept: Vec<Node> = Vec::with_capacity(ch.len());
                for c in ch {
                    match walk(ring, c)? {
                        Out::Scalar(p) => factor = factor.mul(&p),
                        Out::Node(f, node) => {
                            factor = factor.mul(&f);
                            kept.push(node);
                        }
                    }
                }
                if kept.len() < 2 {
                    return None;
                }
                Some(Out::Node(factor, Node::Branch(kept)))
            }
        }
    }
    match walk(ring, t) {
        None => Normalized::Zero,
        Some(Out::Scalar(p)) => {
            if p.is_zero() {
                Normalized::Zero
            } else {
                Normalized::Scalar(p)
            }
        }
        Some(Out::Node(factor, root)) => {
            if factor.is_zero() {
                Normalized::Zero
            } else {
                Normalized::Tree {
                    factor,
                    tree: DecoratedTree { root },
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Weights, merges, boundary
// ---------------------------------------------------------------------------

/// Weight of the vertex (or leaf) at `path`: the number of edges from the
/// root plus the degrees of all subtrees hanging strictly to the left of
/// the path. The root has weight zero.
pub fn weight_at(t: &DecoratedTree, path: &[usize]) -> Result<usize> {
    let mut w = 0usize;
    let mut cur = &t.root;
    for &i in path {
        match cur {
            Node::Branch(ch) => {
                if i >= ch.len() {
                    return Err(Error::InvalidTree(format!(
                        "no child {} on path {:?}",
                        i, path
                    )));
                }
                w += 1;
                for c in &ch[..i] {
                    w += c.degree();
                }
                cur = &ch[i];
            }
            _ => {
                return Err(Error::InvalidTree(format!(
                    "path {:?} descends into a leaf",
                    path
                )))
            }
        }
    }
    Ok(w)
}

/// Paths and weights of all inner (non-root, non-leaf) vertices, in
/// depth-first order.
pub fn inner_vertices(t: &DecoratedTree) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    fn walk(n: &Node, path: &mut Vec<usize>, w: usize, out: &mut Vec<(Vec<usize>, usize)>) {
        if let Node::Branch(ch) = n {
            if !path.is_empty() {
                out.push((path.clone(), w));
            }
            let mut acc = 0usize;
            for (i, c) in ch.iter().enumerate() {
                path.push(i);
                walk(c, path, w + 1 + acc, out);
                path.pop();
                acc += c.degree();
            }
        }
    }
    let mut path = Vec::new();
    walk(&t.root, &mut path, 0, &mut out);
    out
}

/// Weights of the leaves, indexed by planar slot.
pub fn leaf_weights(t: &DecoratedTree) -> Vec<usize> {
    let mut out = Vec::new();
    fn walk(n: &Node, w: usize, out: &mut Vec<usize>) {
        match n {
            Node::Leaf(_) | Node::Hole(_) => out.push(w),
            Node::Branch(ch) => {
                let mut acc = 0usize;
                for c in ch {
                    walk(c, w + 1 + acc, out);
                    acc += c.degree();
                }
            }
        }
    }
    walk(&t.root, 0, &mut out);
    out
}

/// Number of vertices `B` such that the vertex at `path` lies in the first
/// (left) child subtree of `B`: the number of left turns on the path.
pub fn left_count_b(t: &DecoratedTree, path: &[usize]) -> Result<usize> {
    t.node_at(path)?;
    Ok(path.iter().filter(|&&i| i == 0).count())
}

/// Merge the inner vertex at `path` with its parent.
pub fn merge_vertex(t: &DecoratedTree, path: &[usize]) -> Result<DecoratedTree> {
    if path.is_empty() {
        return Err(Error::InvalidTree("cannot merge the root".into()));
    }
    let target = t.node_at(path)?;
    let children = match target {
        Node::Branch(ch) => ch.clone(),
        _ => return Err(Error::InvalidTree("can only merge an inner vertex".into())),
    };
    let parent_path = &path[..path.len() - 1];
    let pos = path[path.len() - 1];
    let parent = t.node_at(parent_path)?;
    let mut new_children = match parent {
        Node::Branch(ch) => ch.clone(),
        _ => unreachable!(),
    };
    new_children.splice(pos..=pos, children);
    t.replace_at(parent_path, Node::Branch(new_children))
}

/// The tree differential `∂ = Σ_A (−1)^{W_A} ∂_A` over inner vertices,
/// canonicalized into the quotient.
pub fn boundary(ring: &Arc<Ring>, t: &DecoratedTree) -> TreeAlg {
    let mut out = TreeAlg::zero(ring);
    for (path, w) in inner_vertices(t) {
        let merged = merge_vertex(t, &path).expect("inner vertex");
        let sign = if w % 2 == 0 { 1 } else { -1 };
        out = out.add(&TreeAlg::from_ordered_tree(ring, &merged, sign));
    }
    out
}

/// `t↑A` (subtree rooted at `path`) and `t↓A` (the tree with that subtree
/// replaced by a fresh leaf slot, carrying the degree a ψ-value would have).
pub fn up_down(t: &DecoratedTree, path: &[usize]) -> Result<(DecoratedTree, DecoratedTree)> {
    let sub = t.node_at(path)?.clone();
    let hole_degree = sub.degree().saturating_sub(1);
    let down = t.replace_at(path, Node::Hole(hole_degree))?;
    Ok((DecoratedTree { root: sub }, down))
}

/// Sum of the degrees of the first-child subtree at every vertex (root
/// included) of a binary tree.
pub fn left_weight_p(t: &DecoratedTree) -> Result<usize> {
    fn walk(n: &Node) -> Result<usize> {
        match n {
            Node::Leaf(_) | Node::Hole(_) => Ok(0),
            Node::Branch(ch) => {
                if ch.len() != 2 {
                    return Err(Error::InvalidTree(
                        "left weight is defined for binary trees".into(),
                    ));
                }
                Ok(ch[0].degree() + walk(&ch[0])? + walk(&ch[1])?)
            }
        }
    }
    walk(&t.root)
}

// ---------------------------------------------------------------------------
// Forests and the symmetric algebra
// ---------------------------------------------------------------------------

/// A multiset of canonical trees in canonical order; the empty forest is
/// the slot for pure scalars.
pub type Forest = Vec<CanonicalTree>;

pub fn forest_degree(f: &Forest) -> usize {
    f.iter().map(|t| t.degree()).sum()
}

/// Sort a forest, returning the Koszul sign, or `None` when it contains two
/// identical odd-degree trees.
pub fn normalize_forest(mut trees: Vec<CanonicalTree>) -> Option<(Forest, i32)> {
    let sign = sort_graded(&mut trees, CanonicalTree::degree, |a, b| a.cmp(b))?;
    Some((trees, sign))
}

/// An element of the free graded-commutative algebra on decorated trees:
/// an `O`-linear combination of forests (the empty forest carries the
/// scalar part).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAlg {
    ring: Arc<Ring>,
    terms: BTreeMap<Forest, Poly>,
}

impl TreeAlg {
    pub fn zero(ring: &Arc<Ring>) -> TreeAlg {
        TreeAlg {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(ring: &Arc<Ring>, p: Poly) -> TreeAlg {
        let mut out = TreeAlg::zero(ring);
        out.add_term(Vec::new(), p);
        out
    }

    pub fn one(ring: &Arc<Ring>) -> TreeAlg {
        TreeAlg::scalar(ring, Poly::one(ring))
    }

    pub fn tree(ring: &Arc<Ring>, t: CanonicalTree) -> TreeAlg {
        TreeAlg::tree_scaled(ring, t, Poly::one(ring))
    }

    pub fn tree_scaled(ring: &Arc<Ring>, t: CanonicalTree, p: Poly) -> TreeAlg {
        let mut out = TreeAlg::zero(ring);
        out.add_term(vec![t], p);
        out
    }

    /// Inject an ordered tree, canonicalizing with sign.
    pub fn from_ordered_tree(ring: &Arc<Ring>, t: &DecoratedTree, sign: i32) -> TreeAlg {
        match canonicalize(t) {
            None => TreeAlg::zero(ring),
            Some((ct, s)) => {
                TreeAlg::tree_scaled(ring, ct, Poly::from_int(ring, (sign * s) as i64))
            }
        }
    }

    /// Inject a forest term, normalizing order and sign.
    pub fn from_forest(ring: &Arc<Ring>, trees: Vec<CanonicalTree>, coeff: Poly) -> TreeAlg {
        match normalize_forest(trees) {
            None => TreeAlg::zero(ring),
            Some((f, s)) => {
                let mut out = TreeAlg::zero(ring);
                let c = if s < 0 { coeff.neg() } else { coeff };
                out.add_term(f, c);
                out
            }
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scalar_part(&self) -> Poly {
        static EMPTY: &[CanonicalTree] = &[];
        self.terms
            .get(EMPTY)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    pub fn coefficient(&self, f: &Forest) -> Poly {
        self.terms
            .get(f)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    fn add_term(&mut self, f: Forest, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&f) {
            Some(entry) => {
                *entry = entry.add(&p);
                if entry.is_zero() {
                    self.terms.remove(&f);
                }
            }
            None => {
                self.terms.insert(f, p);
            }
        }
    }

    pub fn add(&self, other: &TreeAlg) -> TreeAlg {
        let mut out = self.clone();
        for (f, p) in &other.terms {
            out.add_term(f.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &TreeAlg) -> TreeAlg {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TreeAlg {
        self.scale_int(-1)
    }

    pub fn scale_int(&self, k: i64) -> TreeAlg {
        self.scale_poly(&Poly::from_int(&self.ring, k))
    }

    pub fn scale_poly(&self, p: &Poly) -> TreeAlg {
        let mut out = TreeAlg::zero(&self.ring);
        for (f, q) in &self.terms {
            out.add_term(f.clone(), q.mul(p));
        }
        out
    }

    /// Graded-commutative product of forests.
    pub fn sym_product(&self, other: &TreeAlg) -> TreeAlg {
        let mut out = TreeAlg::zero(&self.ring);
        for (f1, p1) in &self.terms {
            for (f2, p2) in &other.terms {
                let mut joined = f1.clone();
                joined.extend(f2.iter().cloned());
                if let Some((forest, sign)) = normalize_forest(joined) {
                    let c = p1.mul(p2);
                    out.add_term(forest, if sign < 0 { c.neg() } else { c });
                }
            }
        }
        out
    }

    fn filter(&self, pred: impl Fn(&Forest) -> bool) -> TreeAlg {
        let mut out = TreeAlg::zero(&self.ring);
        for (f, p) in &self.terms {
            if pred(f) {
                out.add_term(f.clone(), p.clone());
            }
        }
        out
    }

    /// Projection onto scalars and single trivial trees (the `M ⊕ O` part).
    pub fn p1_trivial(&self) -> TreeAlg {
        self.filter(|f| f.is_empty() || (f.len() == 1 && f[0].is_trivial()))
    }

    /// Projection onto single non-trivial trees.
    pub fn p1_tree(&self) -> TreeAlg {
        self.filter(|f| f.len() == 1 && !f[0].is_trivial())
    }

    /// Projection onto products of two or more trees.
    pub fn p_ge2(&self) -> TreeAlg {
        self.filter(|f| f.len() >= 2)
    }

    /// Extend a degree-odd map on single trees to a derivation of the
    /// symmetric algebra (signs follow the leading factors).
    pub fn derive(&self, mut f: impl FnMut(&CanonicalTree) -> TreeAlg) -> TreeAlg {
        let ring = self.ring.clone();
        let mut out = TreeAlg::zero(&ring);
        for (forest, coeff) in &self.terms {
            let mut left_degree = 0usize;
            for i in 0..forest.len() {
                let image = f(&forest[i]);
                if !image.is_zero() {
                    let sign = if left_degree % 2 == 0 { 1i64 } else { -1 };
                    let mut left = TreeAlg::zero(&ring);
                    left.add_term(forest[..i].to_vec(), coeff.clone());
                    let mut right = TreeAlg::zero(&ring);
                    right.add_term(forest[i + 1..].to_vec(), Poly::one(&ring));
                    let term = left.sym_product(&image).sym_product(&right);
                    out = out.add(&term.scale_int(sign));
                }
                left_degree += forest[i].degree();
            }
        }
        out
    }

    /// Total degree when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for (f, _) in &self.terms {
            let d = forest_degree(f);
            match deg {
                None => deg = Some(d),
                Some(e) if e == d => {}
                _ => return None,
            }
        }
        deg
    }
}

/// Join `k >= 2` trees under a new root. The forest must already be
/// normalized; the result is canonical with no extra sign.
pub fn root_forest(forest: &Forest) -> Result<CanonicalTree> {
    if forest.len() < 2 {
        return Err(Error::InvalidTree(
            "root map needs at least two trees".into(),
        ));
    }
    let children: Vec<Node> = forest.iter().map(|t| t.tree().root.clone()).collect();
    let t = DecoratedTree {
        root: Node::Branch(children),
    };
    let (ct, sign) = canonicalize(&t)
        .ok_or_else(|| Error::InvalidTree("normalized forest cannot root to zero".into()))?;
    debug_assert_eq!(sign, 1, "normalized forest must root with sign +1");
    Ok(ct)
}

/// Children of the root as a forest; inverse of `root_forest`.
pub fn unroot_tree(t: &CanonicalTree) -> Result<Forest> {
    match &t.tree().root {
        Node::Branch(ch) => Ok(ch
            .iter()
            .map(|c| CanonicalTree(DecoratedTree { root: c.clone() }))
            .collect()),
        _ => Err(Error::InvalidTree("cannot unroot a trivial tree".into())),
    }
}

/// Root map on algebra elements: forests of length >= 2 become single trees.
pub fn root_on_alg(x: &TreeAlg) -> TreeAlg {
    let ring = x.ring().clone();
    let mut out = TreeAlg::zero(&ring);
    for (f, p) in x.terms() {
        if f.len() >= 2 {
            let t = root_forest(f).expect("forest of length >= 2");
            out = out.add(&TreeAlg::tree_scaled(&ring, t, p.clone()));
        }
    }
    out
}

/// Unroot map on algebra elements: single non-trivial trees become forests.
pub fn unroot_on_alg(x: &TreeAlg) -> TreeAlg {
    let ring = x.ring().clone();
    let mut out = TreeAlg::zero(&ring);
    for (f, p) in x.terms() {
        if f.len() == 1 && !f[0].is_trivial() {
            let forest = unroot_tree(&f[0]).expect("non-trivial tree");
            out = out.add(&TreeAlg::from_forest(&ring, forest, p.clone()));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Enumerates canonical trees and forests over a fixed supply of
/// generators: `ranks[d-1]` generators in each homological degree `d`.
pub struct TreeEnumerator {
    ranks: Vec<usize>,
    cache: std::cell::RefCell<BTreeMap<usize, Vec<CanonicalTree>>>,
}

impl TreeEnumerator {
    pub fn new(ranks: Vec<usize>) -> TreeEnumerator {
        TreeEnumerator {
            ranks,
            cache: std::cell::RefCell::new(BTreeMap::new()),
        }
    }

    /// All canonical trees of the given degree, ascending in the canonical
    /// order. Includes trivial trees.
    pub fn trees_of_degree(&self, degree: usize) -> Vec<CanonicalTree> {
        if degree == 0 {
            return Vec::new();
        }
        if let Some(hit) = self.cache.borrow().get(&degree) {
            return hit.clone();
        }
        let mut out: Vec<CanonicalTree> = Vec::new();
        if degree >= 1 && degree <= self.ranks.len() {
            for i in 0..self.ranks[degree - 1] {
                out.push(CanonicalTree::trivial(GenRef::new(degree, i)));
            }
        }
        // Rooted trees: children form a normalized multiset of total degree
        // `degree − 1` with at least two entries.
        if degree >= 3 {
            let pool = self.pool_up_to(degree - 2);
            let mut children: Vec<CanonicalTree> = Vec::new();
            multisets(&pool, 0, degree - 1, 2, &mut children, &mut |ch| {
                let nodes: Vec<Node> = ch.iter().map(|t| t.tree().root.clone()).collect();
                let t = DecoratedTree {
                    root: Node::Branch(nodes),
                };
                out.push(CanonicalTree(t));
            });
        }
        out.sort();
        self.cache.borrow_mut().insert(degree, out.clone());
        out
    }

    /// Canonical trees with at least two leaves of the given degree.
    pub fn nontrivial_of_degree(&self, degree: usize) -> Vec<CanonicalTree> {
        self.trees_of_degree(degree)
            .into_iter()
            .filter(|t| !t.is_trivial())
            .collect()
    }

    /// All normalized forests of the given total degree with at least
    /// `min_len` trees, ascending.
    pub fn forests_of_degree(&self, degree: usize, min_len: usize) -> Vec<Forest> {
        if degree == 0 {
            return if min_len == 0 {
                vec![Vec::new()]
            } else {
                Vec::new()
            };
        }
        let pool = self.pool_up_to(degree);
        let mut out = Vec::new();
        let mut acc: Vec<CanonicalTree> = Vec::new();
        multisets(&pool, 0, degree, min_len.max(1), &mut acc, &mut |f| {
            out.push(f.to_vec());
        });
        out.sort();
        out
    }

    /// Trees of every degree up to `max`, ascending in the canonical order.
    fn pool_up_to(&self, max: usize) -> Vec<CanonicalTree> {
        let mut pool = Vec::new();
        for d in 1..=max {
            pool.extend(self.trees_of_degree(d));
        }
        pool
    }
}

/// All planar shapes with the given number of leaves (every vertex has at
/// least two children). Leaves are `Hole(0)` placeholders in slot order;
/// decorate with `decorate_shape`.
pub fn shapes_with_leaves(leaves: usize) -> Vec<Node> {
    if leaves == 1 {
        return vec![Node::Hole(0)];
    }
    fn compositions(
        total: usize,
        parts_left: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts_left == 1 {
            acc.push(total);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for first in 1..=(total - parts_left + 1) {
            acc.push(first);
            compositions(total - first, parts_left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    for k in 2..=leaves {
        let mut comps = Vec::new();
        compositions(leaves, k, &mut Vec::new(), &mut comps);
        for comp in comps {
            let child_choices: Vec<Vec<Node>> =
                comp.iter().map(|&c| shapes_with_leaves(c)).collect();
            let mut stack: Vec<Vec<Node>> = vec![Vec::new()];
            for choices in &child_choices {
                let mut next = Vec::new();
                for prefix in &stack {
                    for c in choices {
                        let mut p = prefix.clone();
                        p.push(c.clone());
                        next.push(p);
                    }
                }
                stack = next;
            }
            for children in stack {
                out.push(Node::Branch(children));
            }
        }
    }
    out
}

/// Decorate a shape's leaf slots with the cyclically repeated degree
/// pattern, giving every slot a distinct generator index.
pub fn decorate_shape(shape: &Node, degrees: &[usize]) -> DecoratedTree {
    fn walk(n: &Node, degrees: &[usize], next: &mut usize) -> Node {
        match n {
            Node::Hole(_) | Node::Leaf(_) => {
                let slot = *next;
                *next += 1;
                Node::Leaf(GenRef::new(degrees[slot % degrees.len()], slot))
            }
            Node::Branch(ch) => Node::Branch(ch.iter().map(|c| walk(c, degrees, next)).collect()),
        }
    }
    let mut next = 0;
    DecoratedTree {
        root: walk(shape, degrees, &mut next),
    }
}

/// Enumerate nondecreasing sequences from the ordered `pool` (repeats
/// allowed only in even degree) with total degree exactly `remaining` and
/// length at least `min_len`.
fn multisets(
    pool: &[CanonicalTree],
    start: usize,
    remaining: usize,
    min_len: usize,
    acc: &mut Vec<CanonicalTree>,
    emit: &mut impl FnMut(&[CanonicalTree]),
) {
    if remaining == 0 {
        if acc.len() >= min_len {
            emit(acc);
        }
        return;
    }
    for i in start..pool.len() {
        let d = pool[i].degree();
        if d > remaining {
            continue;
        }
        acc.push(pool[i].clone());
        let next_start = if d % 2 == 1 { i + 1 } else { i };
        multisets(pool, next_start, remaining - d, min_len, acc, emit);
        acc.pop();
    }
}

// ---------------------------------------------------------------------------
// Text encoding
// ---------------------------------------------------------------------------

/// Render a tree in the exchange syntax: `|a|` for the trivial tree with
/// decoration `a`, nested `(x y ...)` otherwise.
pub fn tree_to_text(t: &DecoratedTree, name_of: &dyn Fn(GenRef) -> String) -> String {
    fn walk(n: &Node, name_of: &dyn Fn(GenRef) -> String, out: &mut String) {
        match n {
            Node::Leaf(g) => out.push_str(&name_of(*g)),
            Node::Hole(_) => out.push('_'),
            Node::Branch(ch) => {
                out.push('(');
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    walk(c, name_of, out);
                }
                out.push(')');
            }
        }
    }
    match &t.root {
        Node::Leaf(g) => format!("|{}|", name_of(*g)),
        root => {
            let mut s = String::new();
            walk(root, name_of, &mut s);
            s
        }
    }
}

/// Parse the exchange syntax back into an ordered tree.
pub fn tree_from_text(
    input: &str,
    gen_of: &dyn Fn(&str) -> Option<GenRef>,
) -> Result<DecoratedTree> {
    let s = input.trim();
    if let Some(stripped) = s.strip_prefix('|') {
        let name = stripped
            .strip_suffix('|')
            .ok_or_else(|| Error::Parse(format!("unterminated trivial tree `{}`", input)))?
            .trim();
        let g = gen_of(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        return Ok(DecoratedTree::trivial(g));
    }
    let mut tokens: Vec<String> = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    fn parse_node(
        tokens: &[String],
        pos: &mut usize,
        gen_of: &dyn Fn(&str) -> Option<GenRef>,
    ) -> Result<Node> {
        match tokens.get(*pos) {
            Some(t) if t == "(" => {
                *pos += 1;
                let mut children = Vec::new();
                loop {
                    match tokens.get(*pos) {
                        Some(t) if t == ")" => {
                            *pos += 1;
                            break;
                        }
                        Some(_) => children.push(parse_node(tokens, pos, gen_of)?),
                        None => return Err(Error::Parse("missing `)` in tree".into())),
                    }
                }
                if children.len() < 2 {
                    return Err(Error::InvalidTree(
                        "a vertex needs at least two children".into(),
                    ));
                }
                Ok(Node::Branch(children))
            }
            Some(name) if name != ")" => {
                let g = gen_of(name).ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                *pos += 1;
                Ok(Node::Leaf(g))
            }
            other => Err(Error::Parse(format!(
                "unexpected token {:?} in tree",
                other
            ))),
        }
    }
    let mut pos = 0;
    let root = parse_node(&tokens, &mut pos, gen_of)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!("trailing input in tree `{}`", input)));
    }
    Ok(DecoratedTree { root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Ring;

    fn g(d: usize, i: usize) -> GenRef {
        GenRef::new(d, i)
    }

    fn leaf(d: usize, i: usize) -> Node {
        Node::Leaf(g(d, i))
    }

    #[test]
    fn degree_counts_vertices() {
        let t = DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]);
        assert_eq!(t.degree(), 3);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(DecoratedTree::trivial(g(4, 0)).degree(), 4);
    }

    #[test]
    fn canonicalize_odd_swap_gives_minus() {
        let t = DecoratedTree::corolla(vec![g(1, 1), g(1, 0)]);
        let (ct, sign) = canonicalize(&t).unwrap();
        assert_eq!(sign, -1);
        assert_eq!(ct.tree(), &DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]));
    }

    #[test]
    fn equal_odd_children_vanish() {
        let t = DecoratedTree::corolla(vec![g(1, 0), g(1, 0)]);
        assert!(canonicalize(&t).is_none());
    }

    #[test]
    fn equal_even_children_survive() {
        let t = DecoratedTree::corolla(vec![g(2, 0), g(2, 0)]);
        let (_, sign) = canonicalize(&t).unwrap();
        assert_eq!(sign, 1);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let t = DecoratedTree::branch(vec![Node::Branch(vec![leaf(1, 0), leaf(2, 1)]), leaf(1, 2)]);
        let (ct, _) = canonicalize(&t).unwrap();
        let (ct2, sign2) = canonicalize(ct.tree()).unwrap();
        assert_eq!(ct, ct2);
        assert_eq!(sign2, 1);
    }

    #[test]
    fn five_leaf_root_permutation_sign() {
        // Moving a three-leaf child of degree d2 left past a1 multiplies by
        // (−1)^{|a1|·d2}.
        for (a1, rest) in [(1usize, [1usize, 1, 1]), (2, [1, 2, 1]), (1, [2, 2, 1])] {
            let sub = Node::Branch(vec![leaf(rest[0], 1), leaf(rest[1], 2), leaf(rest[2], 3)]);
            let d2 = 1 + rest.iter().sum::<usize>();
            let t1 = DecoratedTree::branch(vec![leaf(a1, 0), sub.clone(), leaf(1, 4)]);
            let t2 = DecoratedTree::branch(vec![sub, leaf(a1, 0), leaf(1, 4)]);
            let (c1, s1) = canonicalize(&t1).unwrap();
            let (c2, s2) = canonicalize(&t2).unwrap();
            assert_eq!(c1, c2);
            let expected = if (a1 * d2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(s1 * s2, expected, "a1={} rest={:?}", a1, rest);
        }
    }

    #[test]
    fn weight_of_nested_vertex() {
        // Root children: a1 (leaf), B = branch(A, a5), A = branch(a2, branch(a3, a4)).
        for a1 in 1..=3usize {
            let a_vertex =
                Node::Branch(vec![leaf(1, 1), Node::Branch(vec![leaf(1, 2), leaf(1, 3)])]);
            let b_vertex = Node::Branch(vec![a_vertex, leaf(1, 4)]);
            let t = DecoratedTree::branch(vec![leaf(a1, 0), b_vertex]);
            assert_eq!(weight_at(&t, &[1, 0]).unwrap(), 2 + a1);
            assert_eq!(weight_at(&t, &[]).unwrap(), 0);
        }
    }

    #[test]
    fn boundary_of_five_leaf_example() {
        let ring = Ring::from_names("x");
        let (a, b, c, d, e) = (g(2, 0), g(1, 1), g(1, 2), g(2, 3), g(1, 4));
        let inner = Node::Branch(vec![Node::Leaf(b), Node::Leaf(c), Node::Leaf(d)]);
        let t = DecoratedTree::branch(vec![
            Node::Leaf(a),
            Node::Branch(vec![inner.clone(), Node::Leaf(e)]),
        ]);
        let bd = boundary(&ring, &t);
        let t1 = DecoratedTree::branch(vec![Node::Leaf(a), inner.clone(), Node::Leaf(e)]);
        let t2 = DecoratedTree::branch(vec![
            Node::Leaf(a),
            Node::Branch(vec![
                Node::Leaf(b),
                Node::Leaf(c),
                Node::Leaf(d),
                Node::Leaf(e),
            ]),
        ]);
        let sign1 = if (a.degree + 1) % 2 == 0 { 1 } else { -1 };
        let sign2 = if a.degree % 2 == 0 { 1 } else { -1 };
        let expected = TreeAlg::from_ordered_tree(&ring, &t1, sign1)
            .add(&TreeAlg::from_ordered_tree(&ring, &t2, sign2));
        assert_eq!(bd, expected);
    }

    #[test]
    fn boundary_of_trivial_and_corolla_is_zero() {
        let ring = Ring::from_names("x");
        assert!(boundary(&ring, &DecoratedTree::trivial(g(1, 0))).is_zero());
        assert!(boundary(&ring, &DecoratedTree::corolla(vec![g(1, 0), g(1, 1)])).is_zero());
    }

    #[test]
    fn boundary_squares_to_zero_small() {
        let ring = Ring::from_names("x");
        let en = TreeEnumerator::new(vec![2, 1]);
        for deg in 1..=6 {
            for t in en.trees_of_degree(deg) {
                let b = boundary(&ring, t.tree());
                let bb = b.derive(|ct| boundary(&ring, ct.tree()));
                assert!(bb.is_zero(), "∂² ≠ 0 on {}", t);
            }
        }
    }

    #[test]
    fn merge_root_fails() {
        let t = DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]);
        assert!(merge_vertex(&t, &[]).is_err());
    }

    #[test]
    fn up_down_at_root_and_leaf() {
        let t = DecoratedTree::branch(vec![
            Node::Branch(vec![leaf(1, 0), leaf(1, 1)]),
            leaf(1, 2),
            leaf(1, 3),
        ]);
        let (up, down) = up_down(&t, &[]).unwrap();
        assert_eq!(up, t);
        assert!(down.is_trivial());
        let (up, down) = up_down(&t, &[1]).unwrap();
        assert_eq!(up, DecoratedTree::trivial(g(1, 2)));
        assert_eq!(down.leaf_count(), t.leaf_count());
        let (up, down) = up_down(&t, &[0]).unwrap();
        assert_eq!(up, DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]));
        assert_eq!(down.leaf_count(), 3);
        assert_eq!(down.vertex_count(), 1);
    }

    #[test]
    fn root_unroot_inverse() {
        let f1 = CanonicalTree::trivial(g(1, 0));
        let f2 = canonicalize(&DecoratedTree::corolla(vec![g(1, 1), g(2, 0)]))
            .unwrap()
            .0;
        let (forest, sign) = normalize_forest(vec![f1.clone(), f2.clone()]).unwrap();
        assert_eq!(sign, 1);
        let rooted = root_forest(&forest).unwrap();
        assert_eq!(rooted.degree(), forest_degree(&forest) + 1);
        assert_eq!(unroot_tree(&rooted).unwrap(), forest);
    }

    #[test]
    fn root_of_two_trivial_trees_is_corolla() {
        let f = vec![
            CanonicalTree::trivial(g(1, 0)),
            CanonicalTree::trivial(g(1, 1)),
        ];
        let rooted = root_forest(&f).unwrap();
        assert_eq!(
            rooted.tree(),
            &DecoratedTree::corolla(vec![g(1, 0), g(1, 1)])
        );
    }

    #[test]
    fn scalar_leaf_normalization() {
        let ring = Ring::from_names("x,y");
        let fpoly = Poly::parse(&ring, "x+1").unwrap();
        let t = RawNode::Branch(vec![
            RawNode::Branch(vec![RawNode::Gen(g(1, 0)), RawNode::Gen(g(1, 1))]),
            RawNode::Scalar(fpoly.clone()),
            RawNode::Gen(g(1, 2)),
        ]);
        match normalize_scalar_leaves(&ring, &t) {
            Normalized::Tree { factor, tree } => {
                assert_eq!(factor, fpoly);
                assert_eq!(tree.leaf_count(), 3);
            }
            other => panic!("unexpected {:?}", other),
        }
        let t = RawNode::Branch(vec![
            RawNode::Branch(vec![RawNode::Gen(g(1, 0)), RawNode::Scalar(fpoly)]),
            RawNode::Gen(g(1, 1)),
            RawNode::Gen(g(1, 2)),
        ]);
        assert!(matches!(
            normalize_scalar_leaves(&ring, &t),
            Normalized::Zero
        ));
        let t = RawNode::Branch(vec![RawNode::Gen(g(1, 0)), RawNode::Gen(g(1, 1))]);
        match normalize_scalar_leaves(&ring, &t) {
            Normalized::Tree { factor, tree } => {
                assert_eq!(factor, Poly::one(&ring));
                assert_eq!(tree, DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn projections_decompose_identity() {
        let ring = Ring::from_names("x");
        let t1 = CanonicalTree::trivial(g(1, 0));
        let t2 = canonicalize(&DecoratedTree::corolla(vec![g(1, 0), g(1, 1)]))
            .unwrap()
            .0;
        let x = TreeAlg::scalar(&ring, Poly::parse(&ring, "x").unwrap())
            .add(&TreeAlg::tree(&ring, t1.clone()))
            .add(&TreeAlg::tree(&ring, t2.clone()))
            .add(&TreeAlg::tree(&ring, t1.clone()).sym_product(&TreeAlg::tree(&ring, t2)));
        let sum = x.p1_trivial().add(&x.p1_tree()).add(&x.p_ge2());
        assert_eq!(sum, x);
        assert!(x
            .p1_trivial()
            .terms()
            .all(|(f, _)| f.is_empty() || (f.len() == 1 && f[0].is_trivial())));
        assert!(x.p1_trivial().p_ge2().is_zero());
    }

    #[test]
    fn sym_product_graded_commutative() {
        let ring = Ring::from_names("x");
        for (da, db) in [(1, 1), (1, 2), (2, 2), (3, 2)] {
            let a = TreeAlg::tree(&ring, CanonicalTree::trivial(g(da, 0)));
            let b = TreeAlg::tree(&ring, CanonicalTree::trivial(g(db, 1)));
            let ab = a.sym_product(&b);
            let ba = b.sym_product(&a);
            let sign = if (da * db) % 2 == 0 { 1 } else { -1 };
            assert_eq!(ab, ba.scale_int(sign));
        }
    }

    #[test]
    fn left_weight_examples() {
        for (d1, d2, d3) in [(1usize, 1usize, 1usize), (2, 1, 3), (1, 2, 1)] {
            let l = DecoratedTree::branch(vec![
                Node::Branch(vec![leaf(d1, 0), leaf(d2, 1)]),
                leaf(d3, 2),
            ]);
            assert_eq!(left_weight_p(&l).unwrap(), 2 * d1 + d2 + 1);
            let r = DecoratedTree::branch(vec![
                leaf(d1, 0),
                Node::Branch(vec![leaf(d2, 1), leaf(d3, 2)]),
            ]);
            assert_eq!(left_weight_p(&r).unwrap(), d1 + d2);
        }
        let v = DecoratedTree::corolla(vec![g(3, 0), g(1, 1)]);
        assert_eq!(left_weight_p(&v).unwrap(), 3);
        let c3 = DecoratedTree::corolla(vec![g(1, 0), g(1, 1), g(1, 2)]);
        assert!(left_weight_p(&c3).is_err());
    }

    #[test]
    fn binary_weight_lemma() {
        // W_A = i + Σ_{r≤i}|a_r| + b_A on binary trees.
        let en = TreeEnumerator::new(vec![2, 1]);
        fn is_binary(n: &Node) -> bool {
            match n {
                Node::Leaf(_) | Node::Hole(_) => true,
                Node::Branch(ch) => ch.len() == 2 && ch.iter().all(is_binary),
            }
        }
        fn leaves_left_of(root: &Node, path: &[usize]) -> usize {
            let mut count = 0;
            let mut cur = root;
            for &i in path {
                if let Node::Branch(ch) = cur {
                    for c in &ch[..i] {
                        count += c.leaf_count();
                    }
                    cur = &ch[i];
                }
            }
            count
        }
        let check = |t: &DecoratedTree| {
            let decs = t.decorations();
            for (path, w) in inner_vertices(t) {
                let i = leaves_left_of(&t.root, &path);
                let sum: usize = decs[..i].iter().map(|g| g.degree).sum();
                let b = left_count_b(t, &path).unwrap();
                assert_eq!(w, i + sum + b, "tree {:?} path {:?}", t, path);
            }
        };
        for deg in 3..=7 {
            for t in en.trees_of_degree(deg) {
                if t.is_trivial() || !is_binary(&t.tree().root) {
                    continue;
                }
                check(t.tree());
            }
        }
        // Exhaustive over binary shapes up to five leaves with a mixed
        // degree pattern.
        for leaves in 2..=5 {
            for shape in shapes_with_leaves(leaves) {
                if !is_binary(&shape) {
                    continue;
                }
                check(&decorate_shape(&shape, &[1, 2, 1, 3]));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let names = ["pixx", "pixy", "piyy", "pixxy", "pixyy"];
        let name_of = |g: GenRef| -> String {
            match g.degree {
                1 => names[g.index].to_string(),
                _ => names[3 + g.index].to_string(),
            }
        };
        let gen_of = |s: &str| -> Option<GenRef> {
            names.iter().position(|n| *n == s).map(|i| {
                if i < 3 {
                    GenRef::new(1, i)
                } else {
                    GenRef::new(2, i - 3)
                }
            })
        };
        let t = DecoratedTree::branch(vec![Node::Branch(vec![leaf(1, 0), leaf(1, 1)]), leaf(1, 2)]);
        let s = tree_to_text(&t, &name_of);
        assert_eq!(s, "((pixx pixy) piyy)");
        assert_eq!(tree_from_text(&s, &gen_of).unwrap(), t);
        let triv = DecoratedTree::trivial(g(2, 1));
        let s = tree_to_text(&triv, &name_of);
        assert_eq!(s, "|pixyy|");
        assert_eq!(tree_from_text(&s, &gen_of).unwrap(), triv);
    }

    #[test]
    fn enumerator_counts() {
        let en = TreeEnumerator::new(vec![2, 1]);
        assert_eq!(en.trees_of_degree(1).len(), 2);
        assert_eq!(en.trees_of_degree(2).len(), 1);
        let d3 = en.trees_of_degree(3);
        assert_eq!(d3.len(), 1);
        assert!(!d3[0].is_trivial());
        let f2 = en.forests_of_degree(2, 1);
        assert_eq!(f2.len(), 2);
    }
}
