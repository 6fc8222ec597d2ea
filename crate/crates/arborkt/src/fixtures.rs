//! Built-in example data: three resolutions with known arborescent
//! operation tables, used by the verification suites and as CLI demos.
//!
//! The tables are audited against the recursion equation rather than
//! asserted blindly; see `ktcore::audit_table`.

use std::sync::Arc;

use crate::ktcore::{PsiEntryJson, PsiTableJson};
use crate::polyring::{Poly, Ring};
use crate::resolution::Resolution;
use crate::Result;

fn polys(ring: &Arc<Ring>, strs: &[&str]) -> Vec<Poly> {
    strs.iter().map(|s| Poly::parse(ring, s).unwrap()).collect()
}

fn matrix(ring: &Arc<Ring>, rows: &[&[&str]]) -> Vec<Vec<Poly>> {
    rows.iter().map(|r| polys(ring, r)).collect()
}

/// Length-two resolution of the ideal of quadratic monomials in two
/// variables, with the generator names and differentials used throughout
/// the examples.
pub fn quadratic_resolution() -> Result<Arc<Resolution>> {
    let ring = Ring::from_names("x,y");
    let res = Resolution::from_parts(
        &ring,
        polys(&ring, &["x^2", "x*y", "y^2"]),
        vec![
            vec!["pixx".into(), "pixy".into(), "piyy".into()],
            vec!["pixxy".into(), "pixyy".into()],
        ],
        vec![
            // d1
            matrix(&ring, &[&["x^2", "x*y", "y^2"]]),
            // d(pixxy) = x*pixy - y*pixx, d(pixyy) = x*piyy - y*pixy
            matrix(&ring, &[&["-y", "0"], &["x", "-y"], &["0", "x"]]),
        ],
        None,
    )?;
    Ok(Arc::new(res))
}

/// The three reference two-leaf operation values for the quadratic
/// example. The `(pixx, piyy)` entry is reproduced verbatim from the
/// reference even though it does not satisfy the recursion equation under
/// this implementation's sign conventions; the audit records its status
/// instead of silently rewriting it.
pub fn quadratic_psi_reference() -> PsiTableJson {
    PsiTableJson {
        max_degree: 6,
        entries: vec![
            PsiEntryJson {
                tree: "(pixx pixy)".into(),
                decorations: vec!["pixx".into(), "pixy".into()],
                value: [("pixxy".to_string(), "x".to_string())]
                    .into_iter()
                    .collect(),
            },
            PsiEntryJson {
                tree: "(pixy piyy)".into(),
                decorations: vec!["pixy".into(), "piyy".into()],
                value: [("pixyy".to_string(), "y".to_string())]
                    .into_iter()
                    .collect(),
            },
            PsiEntryJson {
                tree: "(pixx piyy)".into(),
                decorations: vec!["pixx".into(), "piyy".into()],
                value: [
                    ("pixyy".to_string(), "x".to_string()),
                    ("pixxy".to_string(), "-y".to_string()),
                ]
                .into_iter()
                .collect(),
            },
        ],
    }
}

/// Length-three resolution of `<x^2, x*y, y^2, x*z>` in three variables.
pub fn cube_corner_resolution() -> Result<Arc<Resolution>> {
    let ring = Ring::from_names("x,y,z");
    let res = Resolution::from_parts(
        &ring,
        polys(&ring, &["x^2", "x*y", "x*z", "y^2"]),
        vec![
            vec!["pixx".into(), "pixy".into(), "pixz".into(), "piyy".into()],
            vec![
                "pixyy".into(),
                "piyxx".into(),
                "pizxx".into(),
                "pizxy".into(),
            ],
            vec!["pi".into()],
        ],
        vec![
            matrix(&ring, &[&["x^2", "x*y", "x*z", "y^2"]]),
            // columns: d(pixyy) = x*piyy - y*pixy, d(piyxx) = y*pixx - x*pixy,
            //          d(pizxx) = z*pixx - x*pixz, d(pizxy) = z*pixy - y*pixz
            matrix(
                &ring,
                &[
                    &["0", "y", "z", "0"],
                    &["-y", "-x", "0", "z"],
                    &["0", "0", "-x", "-y"],
                    &["x", "0", "0", "0"],
                ],
            ),
            // d(pi) = z*piyxx - y*pizxx + x*pizxy
            matrix(&ring, &[&["0"], &["z"], &["-y"], &["x"]]),
        ],
        None,
    )?;
    Ok(Arc::new(res))
}

/// The reference operation table for the cube-corner example: twelve
/// two-leaf entries and two three-leaf corolla entries.
pub fn cube_corner_psi_reference() -> PsiTableJson {
    let pair = |a: &str, b: &str, value: &[(&str, &str)]| PsiEntryJson {
        tree: format!("({} {})", a, b),
        decorations: vec![a.to_string(), b.to_string()],
        value: value
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    };
    let corolla = |a: &str, b: &str, c: &str, value: &[(&str, &str)]| PsiEntryJson {
        tree: format!("({} {} {})", a, b, c),
        decorations: vec![a.to_string(), b.to_string(), c.to_string()],
        value: value
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    };
    PsiTableJson {
        max_degree: 7,
        entries: vec![
            pair("pixx", "pixy", &[("piyxx", "-x")]),
            pair("pixx", "pixz", &[("pizxx", "-x")]),
            pair("pixx", "piyy", &[("pixyy", "x"), ("piyxx", "-y")]),
            pair("pixy", "pixz", &[("pizxy", "-x")]),
            pair("pixz", "piyy", &[("pixyy", "z"), ("pizxy", "y")]),
            pair("pixy", "piyy", &[("pixyy", "y")]),
            pair("pixx", "pizxy", &[("pi", "x")]),
            pair("pixy", "pizxx", &[("pi", "-x")]),
            pair("pixz", "piyxx", &[("pi", "x")]),
            pair("piyy", "pizxx", &[("pi", "-y")]),
            corolla("pixx", "pixy", "pixz", &[("pi", "-x^2")]),
            corolla("pixx", "pixz", "piyy", &[("pi", "x*y")]),
        ],
    }
}

/// Length-four resolution of `<x^2, x*y, y^2*z^2, z*w, w^2>` in four
/// variables, whose quotient admits no multiplicative structure on this
/// resolution; the induced three-ary product is genuinely nonzero.
pub fn katthan_resolution() -> Result<Arc<Resolution>> {
    let ring = Ring::from_names("x,y,z,w");
    let res = Resolution::from_parts(
        &ring,
        polys(&ring, &["x^2", "x*y", "y^2*z^2", "z*w", "w^2"]),
        vec![
            vec![
                "pia".into(),
                "pib".into(),
                "pic".into(),
                "pid".into(),
                "pie".into(),
            ],
            vec![
                "piab".into(),
                "piad".into(),
                "piae".into(),
                "pibc".into(),
                "pibd".into(),
                "pibe".into(),
                "picd".into(),
                "pide".into(),
            ],
            vec![
                "piabd".into(),
                "piabe".into(),
                "piade".into(),
                "pibde".into(),
                "pibcd".into(),
            ],
            vec!["piabde".into()],
        ],
        vec![
            matrix(&ring, &[&["x^2", "x*y", "y^2*z^2", "z*w", "w^2"]]),
            // d(piab) = x*pib - y*pia            d(piad) = x^2*pid - w*z*pia
            // d(piae) = x^2*pie - w^2*pia        d(pibc) = x*pic - y*z^2*pib
            // d(pibd) = x*y*pid - w*z*pib        d(pibe) = x*y*pie - w^2*pib
            // d(picd) = y^2*z*pid - w*pic        d(pide) = z*pie - w*pid
            matrix(
                &ring,
                &[
                    &["-y", "-w*z", "-w^2", "0", "0", "0", "0", "0"],
                    &["x", "0", "0", "-y*z^2", "-w*z", "-w^2", "0", "0"],
                    &["0", "0", "0", "x", "0", "0", "-w", "0"],
                    &["0", "x^2", "0", "0", "x*y", "0", "y^2*z", "-w"],
                    &["0", "0", "x^2", "0", "0", "x*y", "0", "z"],
                ],
            ),
            // d(piabd) = w*z*piab + x*pibd - y*piad
            // d(piabe) = w^2*piab + x*pibe - y*piae
            // d(piade) = x^2*pide + w*piad - z*piae
            // d(pibde) = x*y*pide + w*pibd - z*pibe
            // d(pibcd) = w*pibc + x*picd - y*z*pibd
            matrix(
                &ring,
                &[
                    &["w*z", "w^2", "0", "0", "0"],
                    &["-y", "0", "w", "0", "0"],
                    &["0", "-y", "-z", "0", "0"],
                    &["0", "0", "0", "0", "w"],
                    &["x", "0", "0", "w", "-y*z"],
                    &["0", "x", "0", "-z", "0"],
                    &["0", "0", "0", "0", "x"],
                    &["0", "0", "x^2", "x*y", "0"],
                ],
            ),
            // d(piabde) = -w*piabd + z*piabe - y*piade + x*pibde
            matrix(&ring, &[&["-w"], &["z"], &["-y"], &["x"], &["0"]]),
        ],
        None,
    )?;
    Ok(Arc::new(res))
}

/// The reference operation table for the Katthan example: all two-leaf
/// values, the three- and four-leaf corolla values, and the one
/// exceptional nested binary entry. Every entry satisfies the recursion
/// equation against the rest of the table (the audit re-derives each one;
/// values landing in the top module are unique because the top
/// differential is injective).
pub fn katthan_psi_reference() -> PsiTableJson {
    let entry = |tree: &str, decorations: &[&str], value: &[(&str, &str)]| PsiEntryJson {
        tree: tree.to_string(),
        decorations: decorations.iter().map(|s| s.to_string()).collect(),
        value: value
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    };
    let pair =
        |a: &str, b: &str, value: &[(&str, &str)]| entry(&format!("({} {})", a, b), &[a, b], value);
    let corolla3 = |a: &str, b: &str, c: &str, value: &[(&str, &str)]| {
        entry(&format!("({} {} {})", a, b, c), &[a, b, c], value)
    };
    let corolla4 = |a: &str, b: &str, c: &str, d: &str, value: &[(&str, &str)]| {
        entry(&format!("({} {} {} {})", a, b, c, d), &[a, b, c, d], value)
    };
    PsiTableJson {
        max_degree: 7,
        entries: vec![
            // Degree-one pairs.
            pair("pia", "pib", &[("piab", "x")]),
            pair("pia", "pic", &[("piab", "y*z^2"), ("pibc", "x")]),
            pair("pia", "pid", &[("piad", "1")]),
            pair("pia", "pie", &[("piae", "1")]),
            pair("pib", "pic", &[("pibc", "y")]),
            pair("pib", "pid", &[("pibd", "1")]),
            pair("pib", "pie", &[("pibe", "1")]),
            pair("pic", "pid", &[("picd", "z")]),
            pair("pic", "pie", &[("picd", "w"), ("pide", "y^2*z")]),
            pair("pid", "pie", &[("pide", "w")]),
            // Mixed-degree pairs.
            pair("piab", "pid", &[("piabd", "1")]),
            pair("piab", "pie", &[("piabe", "1")]),
            pair("piad", "pib", &[("piabd", "-x")]),
            pair("piad", "pic", &[("piabd", "-y*z^2"), ("pibcd", "-x*z")]),
            pair("piad", "pie", &[("piade", "w")]),
            pair("piae", "pib", &[("piabe", "-x")]),
            pair(
                "piae",
                "pic",
                &[("pibcd", "-w*x"), ("piabe", "-y*z^2"), ("pibde", "-x*y*z")],
            ),
            pair("piae", "pid", &[("piade", "-w")]),
            pair("pibc", "pid", &[("pibcd", "z")]),
            pair("pibc", "pie", &[("pibcd", "w"), ("pibde", "y*z")]),
            pair("pibd", "pia", &[("piabd", "x")]),
            pair("pibd", "pic", &[("pibcd", "-y*z")]),
            pair("pibd", "pie", &[("pibde", "w")]),
            pair("pibe", "pia", &[("piabe", "x")]),
            pair("pibe", "pic", &[("pibcd", "-w*y"), ("pibde", "-y^2*z")]),
            pair("pibe", "pid", &[("pibde", "-w")]),
            pair("picd", "pia", &[("piabd", "y*z"), ("pibcd", "x")]),
            pair("picd", "pib", &[("pibcd", "y")]),
            pair("pide", "pia", &[("piade", "1")]),
            pair("pide", "pib", &[("pibde", "1")]),
            // Degree-five pairs.
            pair("piab", "pide", &[("piabde", "1")]),
            pair("piad", "pibe", &[("piabde", "-w*x")]),
            pair("piae", "pibd", &[("piabde", "w*x")]),
            pair("piabd", "pie", &[("piabde", "w")]),
            pair("piabe", "pid", &[("piabde", "-w")]),
            pair("piade", "pib", &[("piabde", "x")]),
            pair("piade", "pic", &[("piabde", "y*z^2")]),
            pair("pibde", "pia", &[("piabde", "-x")]),
            // Three-leaf corollas on degree-one decorations.
            corolla3("pia", "pib", "pid", &[("piabd", "x")]),
            corolla3("pia", "pib", "pie", &[("piabe", "x")]),
            corolla3("pia", "pic", "pid", &[("piabd", "y*z^2"), ("pibcd", "x*z")]),
            corolla3(
                "pia",
                "pic",
                "pie",
                &[("piabe", "y*z^2"), ("pibcd", "w*x"), ("pibde", "x*y*z")],
            ),
            corolla3("pia", "pid", "pie", &[("piade", "w")]),
            corolla3("pib", "pic", "pid", &[("pibcd", "y*z")]),
            corolla3("pib", "pic", "pie", &[("pibcd", "w*y"), ("pibde", "y^2*z")]),
            corolla3("pib", "pid", "pie", &[("pibde", "w")]),
            // Three-leaf corollas with one degree-two decoration.
            corolla3("piab", "pid", "pie", &[("piabde", "w")]),
            corolla3("piad", "pib", "pie", &[("piabde", "-w*x")]),
            corolla3("piad", "pic", "pie", &[("piabde", "-w*y*z^2")]),
            corolla3("pibd", "pia", "pie", &[("piabde", "w*x")]),
            corolla3("picd", "pia", "pie", &[("piabde", "w*y*z")]),
            corolla3("pide", "pia", "pib", &[("piabde", "x")]),
            corolla3("pide", "pia", "pic", &[("piabde", "y*z^2")]),
            // The exceptional nested binary entry.
            entry(
                "(pia (pie pic))",
                &["pia", "pie", "pic"],
                &[("piabde", "y*z")],
            ),
            // Four-leaf corollas.
            corolla4("pia", "pib", "pid", "pie", &[("piabde", "w*x")]),
            corolla4("pia", "pic", "pid", "pie", &[("piabde", "w*y*z^2")]),
        ],
    }
}

/// The Katthan reference table extended to a complete differential: the
/// reference entries are kept verbatim and every remaining key up to the
/// vanishing bound is lifted from its obstruction. Adds four forced
/// nonzero values the sparse reference leaves implicit.
pub fn katthan_psi_completed(max_degree: usize) -> Result<crate::ktcore::PsiTable> {
    let res = katthan_resolution()?;
    let seed = crate::ktcore::PsiTable::from_json(&res, &katthan_psi_reference())?;
    crate::ktcore::complete_table(&res, &seed, max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::validate;

    #[test]
    fn fixture_resolutions_validate() {
        for res in [
            quadratic_resolution().unwrap(),
            cube_corner_resolution().unwrap(),
            katthan_resolution().unwrap(),
        ] {
            let report = validate(&res);
            assert!(report.passed(), "fixture failed validation: {:?}", report);
        }
    }

    #[test]
    fn fixture_ranks() {
        assert_eq!(quadratic_resolution().unwrap().ranks(), vec![3, 2]);
        assert_eq!(cube_corner_resolution().unwrap().ranks(), vec![4, 4, 1]);
        assert_eq!(katthan_resolution().unwrap().ranks(), vec![5, 8, 5, 1]);
    }
}
