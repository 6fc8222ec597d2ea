//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `cargo test -- --nocapture`). Every tolerance is
//! exact — all identities are checked with exact rational arithmetic.

use std::sync::Arc;
use std::time::Instant;

use arborkt::ainfty::{
    kn_boundary, kn_closed, kn_recursive, mu_of_gens, mu_vanishes_on_gens, mu_via_kn,
    verify_ainfty, verify_cinfty,
};
use arborkt::fixtures;
use arborkt::ktcore::{audit_table, verify_delta_squared, verify_retract, KtComplex, PsiTable};
use arborkt::polyring::{Poly, Ring};
use arborkt::reduced::{
    betti, is_minimal_direct, is_minimal_reduced, reduce_at_origin, reduce_koszul_direct,
};
use arborkt::resolution::{build_taylor, validate, Element, Resolution};
use arborkt::treealg::{canonicalize, DecoratedTree, GenRef, Node, TreeEnumerator};

fn gen(res: &Resolution, name: &str) -> GenRef {
    res.gen_by_name(name).unwrap()
}

fn poly(res: &Resolution, s: &str) -> Poly {
    Poly::parse(res.ring(), s).unwrap()
}

fn report(criterion: usize, detail: &str, started: Instant) {
    println!(
        "acceptance criterion {}: PASS ({}; {:.2}s)",
        criterion,
        detail,
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_1_quadratic_pipeline() {
    let started = Instant::now();
    let res = fixtures::quadratic_resolution().unwrap();
    assert!(validate(&res).passed(), "fixture resolution must validate");
    let kt = KtComplex::construct(res.clone(), 6).unwrap();

    let ds = verify_delta_squared(&kt).unwrap();
    assert!(ds.passed(), "square-zero failures: {:?}", ds.failures);

    for (ct, entry) in kt.psi.entries() {
        if ct.degree() >= 4 {
            assert!(
                entry.value.is_zero(),
                "ψ must vanish on {} (degree ≥ 4)",
                ct
            );
        }
    }

    let ring = res.ring().clone();
    let t = DecoratedTree::corolla(vec![gen(&res, "pixx"), gen(&res, "pixy")]);
    let v = kt.psi.eval_tree(&ring, &t).unwrap();
    let d_psi = res.apply_d(&v);
    let expected = Element::from_gen_scaled(&ring, gen(&res, "pixy"), poly(&res, "x^2")).add(
        &Element::from_gen_scaled(&ring, gen(&res, "pixx"), poly(&res, "-x*y")),
    );
    assert_eq!(d_psi, expected, "d∘ψ on the first pair");

    assert!(started.elapsed().as_secs() < 30, "runtime bound");
    report(
        1,
        &format!("δ²=0 on {} generators to degree 6", ds.checked),
        started,
    );
}

#[test]
fn criterion_2_fixture_audit() {
    let started = Instant::now();
    let res = fixtures::quadratic_resolution().unwrap();
    let table = PsiTable::from_json(&res, &fixtures::quadratic_psi_reference()).unwrap();
    let rows = audit_table(&res, &table).unwrap();
    assert_eq!(rows.len(), 3);
    let row = |t: &str| rows.iter().find(|r| r.tree == t).unwrap();
    assert!(row("(pixx pixy)").ok);
    assert!(row("(pixy piyy)").ok);
    // The third entry's status is recorded either way; under this sign
    // convention it deviates, and the run completes regardless.
    let third = row("(pixx piyy)");
    assert!(!third.detail.is_empty() || third.ok);
    report(
        2,
        &format!(
            "2/3 reference entries satisfy the recursion; (pixx piyy) recorded as {}",
            if third.ok { "pass" } else { "sign deviation" }
        ),
        started,
    );
}

#[test]
fn criterion_3_cube_corner_pipeline() {
    let started = Instant::now();
    let res = fixtures::cube_corner_resolution().unwrap();
    assert!(validate(&res).passed());
    let kt = KtComplex::construct(res.clone(), 7).unwrap();
    let ds = verify_delta_squared(&kt).unwrap();
    assert!(ds.passed(), "square-zero failures: {:?}", ds.failures);

    for (ct, entry) in kt.psi.entries() {
        if ct.degree() > 4 {
            assert!(
                entry.value.is_zero(),
                "ψ must vanish on {} above degree 4",
                ct
            );
        }
    }

    // Audit the reference table; its degree-2-valued entries (two-leaf
    // trees on degree-one decorations) must all satisfy the recursion.
    let table = PsiTable::from_json(&res, &fixtures::cube_corner_psi_reference()).unwrap();
    let rows = audit_table(&res, &table).unwrap();
    let degree_two = [
        "(pixx pixy)",
        "(pixx pixz)",
        "(pixx piyy)",
        "(pixy pixz)",
        "(pixz piyy)",
        "(pixy piyy)",
    ];
    for t in degree_two {
        assert!(
            rows.iter().find(|r| r.tree == t).unwrap().ok,
            "entry {} must audit",
            t
        );
    }
    assert!(rows.iter().all(|r| r.ok), "all reference entries audit");

    assert!(started.elapsed().as_secs() < 180, "runtime bound");
    report(
        3,
        &format!("δ²=0 on {} generators to degree 7", ds.checked),
        started,
    );
}

#[test]
fn criterion_4_katthan_structure() {
    let started = Instant::now();
    let res = fixtures::katthan_resolution().unwrap();
    let table = fixtures::katthan_psi_completed(6).unwrap();
    let kt = KtComplex::new(res.clone(), table, 6);
    let ring = res.ring().clone();

    // The two associator identities, exactly.
    let psi_pair = |x: &Element, y: &Element| -> Element {
        let mut out = Element::zero(&ring);
        for (g, p) in x.comps() {
            for (h, q) in y.comps() {
                let t = DecoratedTree::corolla(vec![g, h]);
                out = out.add(&kt.psi.eval_tree(&ring, &t).unwrap().scale_poly(&p.mul(q)));
            }
        }
        out
    };
    let e = |n: &str| Element::from_gen(&ring, gen(&res, n));
    let d_top = res.d_of_gen(gen(&res, "piabde"));
    let yz = poly(&res, "y*z");
    let assoc1 = psi_pair(&e("pia"), &psi_pair(&e("pie"), &e("pic")))
        .sub(&psi_pair(&psi_pair(&e("pia"), &e("pie")), &e("pic")));
    assert_eq!(assoc1, d_top.scale_poly(&yz), "first associator identity");
    let assoc2 = psi_pair(&e("pia"), &psi_pair(&e("pic"), &e("pie")))
        .sub(&psi_pair(&psi_pair(&e("pia"), &e("pic")), &e("pie")));
    assert_eq!(
        assoc2,
        d_top.scale_poly(&yz).neg(),
        "second associator identity"
    );

    // The defect is cancelled by d∘ψ of the nested three-leaf entries.
    let ltree = DecoratedTree::branch(vec![
        Node::Branch(vec![
            Node::Leaf(gen(&res, "pia")),
            Node::Leaf(gen(&res, "pie")),
        ]),
        Node::Leaf(gen(&res, "pic")),
    ]);
    let rtree = DecoratedTree::branch(vec![
        Node::Leaf(gen(&res, "pia")),
        Node::Branch(vec![
            Node::Leaf(gen(&res, "pie")),
            Node::Leaf(gen(&res, "pic")),
        ]),
    ]);
    let sum = kt
        .psi
        .eval_tree(&ring, &ltree)
        .unwrap()
        .add(&kt.psi.eval_tree(&ring, &rtree).unwrap());
    assert_eq!(
        res.apply_d(&sum),
        d_top.scale_poly(&yz),
        "cancellation through d∘ψ"
    );

    let rel = verify_ainfty(&kt, 5, 17).unwrap();
    assert!(rel.passed(), "relations: {:?}", rel.rows);

    let m3 = mu_of_gens(&kt, &[gen(&res, "pia"), gen(&res, "pie"), gen(&res, "pic")]).unwrap();
    assert!(!m3.is_zero(), "μ₃ must not vanish on (a, e, c)");

    assert!(
        mu_vanishes_on_gens(&kt, 4).unwrap(),
        "μ₄ vanishes on generators"
    );
    assert!(
        mu_vanishes_on_gens(&kt, 5).unwrap(),
        "μ₅ vanishes on generators"
    );

    assert!(started.elapsed().as_secs() < 180, "runtime bound");
    report(
        4,
        "associators exact, relations to n=5, μ₃ ≠ 0, μ₄ = μ₅ = 0",
        started,
    );
}

#[test]
fn criterion_5_taylor_dga_path() {
    let started = Instant::now();
    let ring = Ring::from_names("x,y");
    let gens = vec![
        Poly::parse(&ring, "x^2").unwrap(),
        Poly::parse(&ring, "x*y").unwrap(),
        Poly::parse(&ring, "y^2").unwrap(),
    ];
    let res = Arc::new(build_taylor(&ring, &gens).unwrap());
    let v = validate(&res);
    assert!(v.passed(), "Taylor validation: {:?}", v);
    assert!(v.dgca.as_ref().unwrap().passed());

    let kt = KtComplex::from_dga(res, 7).unwrap();
    let ds = verify_delta_squared(&kt).unwrap();
    assert!(ds.passed(), "square-zero failures: {:?}", ds.failures);

    assert!(started.elapsed().as_secs() < 120, "runtime bound");
    report(
        5,
        &format!(
            "Taylor validated; δ²=0 on {} generators to degree 7",
            ds.checked
        ),
        started,
    );
}

#[test]
fn criterion_6_betti_bounds() {
    let started = Instant::now();
    // Koszul complex of a regular sequence, taken directly as the
    // Koszul-Tate resolution.
    let ring = Ring::from_names("x,y");
    let regular = vec![
        Poly::parse(&ring, "x^2").unwrap(),
        Poly::parse(&ring, "y^3").unwrap(),
    ];
    let rc = reduce_koszul_direct(&regular, 7).unwrap();
    let bv = betti(&rc);
    assert_eq!(bv.b[1], Some(2), "b₁ of the complete intersection");
    for i in 2..=6 {
        assert_eq!(bv.b[i], Some(0), "b_{} of the complete intersection", i);
    }
    assert!(is_minimal_reduced(&rc).minimal);

    // Taylor-backed arborescent resolution of the quadratic monomial ideal.
    let gens = vec![
        Poly::parse(&ring, "x^2").unwrap(),
        Poly::parse(&ring, "x*y").unwrap(),
        Poly::parse(&ring, "y^2").unwrap(),
    ];
    let res = Arc::new(build_taylor(&ring, &gens).unwrap());
    let kt = KtComplex::from_dga(res, 6).unwrap();
    let rc = reduce_at_origin(&kt, 6).unwrap();
    let bv = betti(&rc);
    assert_eq!(bv.b[1], Some(3), "b₁ counts the ideal generators");
    assert!(
        bv.b[3].unwrap() >= 1,
        "odd-degree homology persists (degree 3)"
    );
    assert!(
        bv.b[5].unwrap() >= 1,
        "odd-degree homology persists (degree 5)"
    );
    let min = is_minimal_reduced(&rc);
    assert!(!min.minimal);
    assert!(
        min.violations
            .iter()
            .any(|v| v.target == "(e{1} e{2} e{3})"),
        "the three-corolla is a named violation: {:?}",
        min.violations.iter().take(4).collect::<Vec<_>>()
    );
    // The direct generator-level check agrees with the reduced matrices.
    let direct = is_minimal_direct(&kt, 6).unwrap();
    assert_eq!(direct.minimal, min.minimal);

    assert!(started.elapsed().as_secs() < 120, "runtime bound");
    report(
        6,
        "b₁=2, b_{2..6}=0 minimal; b₁=3, b₃≥1, b₅≥1 non-minimal at the corolla",
        started,
    );
}

#[test]
fn criterion_7_property_suites() {
    let started = Instant::now();
    let ring = Ring::from_names("x,y");

    // Tree boundary squares to zero, exhaustively over every planar shape
    // with up to six leaves and mixed-degree decorations.
    let mut shapes_checked = 0usize;
    for degrees in [vec![1usize], vec![1, 2], vec![2, 1, 3]] {
        for leaves in 2..=6 {
            for shape in arborkt::treealg::shapes_with_leaves(leaves) {
                let t = arborkt::treealg::decorate_shape(&shape, &degrees);
                let b = arborkt::treealg::boundary(&ring, &t);
                let bb = b.derive(|ct| arborkt::treealg::boundary(&ring, ct.tree()));
                assert!(bb.is_zero(), "∂² ≠ 0 on {:?}", t);
                shapes_checked += 1;
            }
        }
    }
    assert!(shapes_checked > 500);

    // Canonicalization idempotence and sign coherence for every shape up
    // to five leaves: permuting adjacent children multiplies the class by
    // the Koszul sign of the transposition.
    for degrees in [vec![1usize, 2], vec![1, 1, 1]] {
        for leaves in 2..=5 {
            for shape in arborkt::treealg::shapes_with_leaves(leaves) {
                let t = arborkt::treealg::decorate_shape(&shape, &degrees);
                let Some((ct, _)) = canonicalize(&t) else {
                    continue;
                };
                let (ct2, s2) = canonicalize(ct.tree()).unwrap();
                assert_eq!(ct, ct2);
                assert_eq!(s2, 1);
                if let Node::Branch(ch) = &t.root {
                    for i in 0..ch.len() - 1 {
                        let mut swapped = ch.clone();
                        swapped.swap(i, i + 1);
                        let t2 = DecoratedTree {
                            root: Node::Branch(swapped),
                        };
                        let koszul: i32 = if ch[i].degree() % 2 == 1 && ch[i + 1].degree() % 2 == 1
                        {
                            -1
                        } else {
                            1
                        };
                        let (c2, s2) = canonicalize(&t2).unwrap();
                        assert_eq!(c2, ct);
                        let (_, s1) = canonicalize(&t).unwrap();
                        assert_eq!(s1, s2 * koszul);
                    }
                }
            }
        }
    }

    // Root/unroot inverse pair on 500 random normalized forests.
    {
        let en = TreeEnumerator::new(vec![3, 2, 1]);
        let mut pool = Vec::new();
        for d in 1..=5 {
            pool.extend(en.trees_of_degree(d));
        }
        let mut state = 0xabcdef12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 500 {
            let len = 2 + (next() % 3) as usize;
            let picks: Vec<_> = (0..len)
                .map(|_| pool[(next() as usize) % pool.len()].clone())
                .collect();
            let Some((forest, _)) = arborkt::treealg::normalize_forest(picks) else {
                continue;
            };
            let rooted = arborkt::treealg::root_forest(&forest).unwrap();
            assert_eq!(arborkt::treealg::unroot_tree(&rooted).unwrap(), forest);
            done += 1;
        }
    }

    // Closed and recursive differentials agree on 200 random basis trees
    // of the quadratic example.
    let res = fixtures::quadratic_resolution().unwrap();
    let kt = KtComplex::construct(res.clone(), 6).unwrap();
    {
        let en = kt.enumerator();
        let mut pool = Vec::new();
        for d in 1..=6 {
            pool.extend(en.trees_of_degree(d));
        }
        let mut state = 0x5a5a5a5au64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let t = &pool[(next() as usize) % pool.len()];
            assert_eq!(
                kt.delta_tree_closed(t).unwrap(),
                kt.delta_tree_recursive(t).unwrap(),
                "differential mismatch on {}",
                t
            );
        }
    }

    // Retract identities on every basis element of degree ≤ 5.
    let kt5 = KtComplex::construct(res.clone(), 5).unwrap();
    let retract = verify_retract(&kt5).unwrap();
    assert!(retract.passed(), "{:?}", retract.failures);

    // k_n: recursion equals the closed form and ∂k_n = 0 for n ≤ 6.
    {
        let decs: Vec<GenRef> = vec![
            GenRef::new(1, 0),
            GenRef::new(2, 1),
            GenRef::new(1, 2),
            GenRef::new(3, 3),
            GenRef::new(1, 4),
            GenRef::new(2, 5),
        ];
        for n in 1..=6 {
            let a = kn_recursive(&decs[..n]);
            let b = kn_closed(&decs[..n]);
            assert_eq!(a, b, "k_{} recursion vs closed form", n);
            assert!(kn_boundary(&ring, &a).is_zero(), "∂k_{} ≠ 0", n);
        }
    }

    // μ_n agrees with the independent route through k_n for n ≤ 4.
    {
        let gens = res.all_gens();
        for n in 2..=4 {
            let mut idx = vec![0usize; n];
            'outer: loop {
                let tuple: Vec<GenRef> = idx.iter().map(|&i| gens[i]).collect();
                let total: usize = tuple.iter().map(|g| g.degree).sum();
                if total + n - 1 <= kt.max_degree {
                    assert_eq!(
                        mu_of_gens(&kt, &tuple).unwrap(),
                        mu_via_kn(&kt, &tuple).unwrap(),
                        "μ routes disagree on {:?}",
                        tuple
                    );
                }
                for pos in (0..n).rev() {
                    idx[pos] += 1;
                    if idx[pos] < gens.len() {
                        continue 'outer;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
    }

    // Shuffle relations for n ≤ 4.
    let shuffles = verify_cinfty(&kt, 4).unwrap();
    assert!(shuffles.passed(), "{:?}", shuffles.rows);

    assert!(started.elapsed().as_secs() < 600, "runtime bound");
    report(7, "all exact-identity suites green", started);
}

#[test]
fn criterion_8_determinism() {
    let started = Instant::now();
    let res = fixtures::quadratic_resolution().unwrap();
    let kt_a = KtComplex::construct(res.clone(), 6).unwrap();
    let kt_b = KtComplex::construct(res.clone(), 6).unwrap();
    let json_a = kt_a.psi.to_json_string(&res);
    let json_b = kt_b.psi.to_json_string(&res);
    assert_eq!(json_a, json_b, "ψ-table bytes identical across runs");
    assert_eq!(res.to_json_string(), res.to_json_string());

    // Reduced invariants are byte-stable too.
    let rc_a = reduce_at_origin(&kt_a, 5).unwrap();
    let rc_b = reduce_at_origin(&kt_b, 5).unwrap();
    assert_eq!(format!("{:?}", betti(&rc_a)), format!("{:?}", betti(&rc_b)));
    report(8, "byte-identical tables and reports across runs", started);
}
