//! JSON wire formats. Rationals travel as `"p/q"` strings; bare integers are accepted
//! on input.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{parse_rat, rat, Mat, Rat, Subspace};
use crate::poly::MultiPoly;
use crate::snarl::Snarl;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatStr(pub Rat);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatStr;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatStr, E> {
                parse_rat(v).map(RatStr).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(rat(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(Rat::from_integer(v.into())))
            }
        }
        d.deserialize_any(V)
    }
}

pub type RowsJson = Vec<Vec<RatStr>>;

pub fn rows_to_json(m: &Mat) -> RowsJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().cloned().map(RatStr).collect())
        .collect()
}

pub fn rows_from_json(cols: usize, rows: &RowsJson) -> Result<Mat> {
    for r in rows {
        if r.len() != cols {
            return Err(Error::InvalidInput(format!(
                "row of length {} where {cols} entries were expected",
                r.len()
            )));
        }
    }
    Ok(Mat::from_rows(
        cols,
        rows.iter()
            .map(|r| r.iter().map(|x| x.0.clone()).collect())
            .collect(),
    ))
}

pub fn subspace_to_json(s: &Subspace) -> RowsJson {
    rows_to_json(s.basis())
}

/// Basis vectors must be linearly independent.
pub fn subspace_from_json(m: usize, basis: &RowsJson) -> Result<Subspace> {
    let mat = rows_from_json(m, basis)?;
    Subspace::from_independent(m, mat.row_vecs())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelledBasis {
    pub label: String,
    pub basis: RowsJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnarlJson {
    pub m: usize,
    pub subspaces: Vec<LabelledBasis>,
}

impl TryFrom<SnarlJson> for Snarl {
    type Error = Error;

    fn try_from(j: SnarlJson) -> Result<Snarl> {
        let entries = j
            .subspaces
            .iter()
            .map(|e| {
                subspace_from_json(j.m, &e.basis)
                    .map(|s| (e.label.clone(), s))
                    .map_err(|err| Error::InvalidSnarl(format!("subspace `{}`: {err}", e.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        Snarl::new(j.m, entries)
    }
}

impl From<Snarl> for SnarlJson {
    fn from(s: Snarl) -> SnarlJson {
        SnarlJson {
            m: s.ambient_dim(),
            subspaces: s
                .entries()
                .iter()
                .map(|(l, v)| LabelledBasis {
                    label: l.clone(),
                    basis: subspace_to_json(v),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: RatStr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

impl TryFrom<PolyJson> for MultiPoly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<MultiPoly> {
        MultiPoly::from_terms(j.vars, j.terms.into_iter().map(|t| (t.exps, t.coeff.0)))
    }
}

impl From<MultiPoly> for PolyJson {
    fn from(p: MultiPoly) -> PolyJson {
        PolyJson {
            vars: p.num_vars(),
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exps: e.0.clone(),
                    coeff: RatStr(c.clone()),
                })
                .collect(),
        }
    }
}

/// `#[serde(with = ...)]` adapter for `MultiPoly` fields.
pub mod poly_serde {
    use super::*;

    pub fn serialize<S: Serializer>(p: &MultiPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(p.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<MultiPoly, D::Error> {
        MultiPoly::try_from(PolyJson::deserialize(d)?).map_err(de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelledMap {
    pub label: String,
    pub rows: RowsJson,
}

/// `{"m": 4, "maps": [{"label": "pi0", "rows": [["1","0","0","0"], ...]}]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapsJson {
    pub m: usize,
    pub maps: Vec<LabelledMap>,
}

impl MapsJson {
    pub fn to_maps(&self) -> Result<Vec<(String, Mat)>> {
        self.maps
            .iter()
            .map(|e| Ok((e.label.clone(), rows_from_json(self.m, &e.rows)?)))
            .collect()
    }

    pub fn from_maps(m: usize, maps: &[(String, Mat)]) -> MapsJson {
        MapsJson {
            m,
            maps: maps
                .iter()
                .map(|(l, a)| LabelledMap {
                    label: l.clone(),
                    rows: rows_to_json(a),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;
    use proptest::prelude::*;

    #[test]
    fn snarl_json_accepts_bare_integers_and_fractions() {
        let text = r#"{"m": 4, "subspaces": [
            {"label": "pi0", "basis": [["0","1","0","0"],["0","0","0","1"]]},
            {"label": "pi1", "basis": [[1, 0, 0, 0], [0, 0, "2/2", 0]]}
        ]}"#;
        let s: Snarl = serde_json::from_str(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.codim_profile()[1].1, 2);
        let out = serde_json::to_value(&s).unwrap();
        assert_eq!(out["subspaces"][1]["basis"][1][2], "1");
    }

    #[test]
    fn snarl_json_rejects_bad_input() {
        let dependent = r#"{"m": 3, "subspaces": [{"label": "a", "basis": [[1,0,0],[2,0,0]]}]}"#;
        assert!(serde_json::from_str::<Snarl>(dependent).is_err());
        let ragged = r#"{"m": 3, "subspaces": [{"label": "a", "basis": [[1,0]]}]}"#;
        assert!(serde_json::from_str::<Snarl>(ragged).is_err());
        let bad_rat = r#"{"m": 3, "subspaces": [{"label": "a", "basis": [["1/0",0,0]]}]}"#;
        assert!(serde_json::from_str::<Snarl>(bad_rat).is_err());
    }

    #[test]
    fn poly_json_shape() {
        let p: MultiPoly =
            serde_json::from_str(r#"{"vars": 4, "terms": [{"exps":[1,0,0,1], "coeff":"1"}, {"exps":[0,0,0,0], "coeff": "-3/6"}]}"#)
                .unwrap();
        assert_eq!(p.coeff(&[0, 0, 0, 0]), ratio(-1, 2));
        let v = serde_json::to_value(&p).unwrap();
        // graded-lex order: the constant comes first
        assert_eq!(v["terms"][0]["coeff"], "-1/2");
        assert_eq!(v["terms"][1]["exps"], serde_json::json!([1, 0, 0, 1]));
        assert!(serde_json::from_str::<MultiPoly>(
            r#"{"vars": 2, "terms": [{"exps":[1], "coeff":"1"}]}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn poly_json_round_trip(cs in proptest::collection::vec((-5i64..=5, 1i64..=4), 10)) {
            let basis = crate::poly::monomials(3, 2);
            let coeffs: Vec<Rat> = cs.iter().map(|&(p, q)| ratio(p, q)).collect();
            let p = MultiPoly::from_coefficients(3, &basis, &coeffs);
            let back: MultiPoly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
