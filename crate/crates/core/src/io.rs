//! Text formats for polyhedra and finite metric spaces.
//!
//! Polyhedron format (`.kpoly`): a header `kpoly <kappa> <num_triangles>`,
//! one `tri <id> <a> <b> <c>` line per triangle, and one
//! `glue <t1> <e1> <t2> <e2>` line per edge pair (a trailing `f` marks a
//! forward, start-to-start identification; the default is reversed).
//! Finite metric space format (`.fms`): a header `fms <n>` followed by
//! `n` rows of `n` decimal entries. `#` starts a comment. Floats are
//! written with 17 significant digits, so writing then reading is exact,
//! and a written file re-emits byte-for-byte.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gh::{FiniteMetricSpace, GhError};
use crate::model::Curvature;
use crate::polyhedron::{BuildError, GluingMap, GluingPair, KPolyhedron};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected}, got `{got}`")]
    Unexpected {
        line: usize,
        expected: &'static str,
        got: String,
    },
    #[error("line {line}: cannot parse `{token}` as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: number `{value}` is not finite")]
    NonFinite { line: usize, value: f64 },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("triangle id {0} out of range or duplicated")]
    BadTriangleId(usize),
    #[error("expected {expected} triangles, found {found}")]
    TriangleCount { expected: usize, found: usize },
    #[error("expected {expected} matrix rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Metric(#[from] GhError),
}

/// Formats a float with 17 significant digits (round-trips exactly).
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(token: &str, line: usize) -> Result<f64, ParseError> {
    let v: f64 = token.parse().map_err(|_| ParseError::BadNumber {
        line,
        token: token.to_string(),
    })?;
    if !v.is_finite() {
        return Err(ParseError::NonFinite { line, value: v });
    }
    Ok(v)
}

fn parse_usize(token: &str, line: usize) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::BadNumber {
        line,
        token: token.to_string(),
    })
}

// Lines as token vectors, comments and blanks stripped; keeps the
// 1-based source line number for diagnostics.
fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect()
}

/// Serializes a polyhedron; the output is in normal form (triangles by
/// id, gluing pairs sorted with the lower slot first).
pub fn write_kpoly(p: &KPolyhedron) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "kpoly {} {}",
        format_f64(p.kappa().get()),
        p.num_triangles()
    );
    for (i, t) in p.triangles().iter().enumerate() {
        let [a, b, c] = t.sides();
        let _ = writeln!(
            out,
            "tri {i} {} {} {}",
            format_f64(a),
            format_f64(b),
            format_f64(c)
        );
    }
    let mut pairs: Vec<GluingPair> = p
        .gluing()
        .pairs
        .iter()
        .map(|&pr| {
            if pr.second < pr.first {
                GluingPair::oriented(pr.second, pr.first, pr.reversed)
            } else {
                pr
            }
        })
        .collect();
    pairs.sort_unstable_by_key(|pr| (pr.first, pr.second));
    for pr in pairs {
        let ((t1, e1), (t2, e2)) = (pr.first, pr.second);
        if pr.reversed {
            let _ = writeln!(out, "glue {t1} {e1} {t2} {e2}");
        } else {
            let _ = writeln!(out, "glue {t1} {e1} {t2} {e2} f");
        }
    }
    out
}

/// Parses and builds a polyhedron (all gluing invariants re-checked).
pub fn parse_kpoly(text: &str) -> Result<KPolyhedron, ParseError> {
    let lines = tokenize(text);
    let mut iter = lines.into_iter();
    let (line, header) = iter.next().ok_or(ParseError::MissingHeader("kpoly"))?;
    if header.len() != 3 || header[0] != "kpoly" {
        return Err(ParseError::Unexpected {
            line,
            expected: "kpoly <kappa> <num_triangles>",
            got: header.join(" "),
        });
    }
    let kappa = Curvature::new(parse_f64(header[1], line)?).map_err(|_| ParseError::NonFinite {
        line,
        value: f64::NAN,
    })?;
    let count = parse_usize(header[2], line)?;

    let mut sides: Vec<Option<[f64; 3]>> = vec![None; count];
    let mut pairs = Vec::new();
    let mut found = 0usize;
    for (line, tokens) in iter {
        match tokens[0] {
            "tri" => {
                if tokens.len() != 5 {
                    return Err(ParseError::Unexpected {
                        line,
                        expected: "tri <id> <a> <b> <c>",
                        got: tokens.join(" "),
                    });
                }
                let id = parse_usize(tokens[1], line)?;
                if id >= count || sides[id].is_some() {
                    return Err(ParseError::BadTriangleId(id));
                }
                sides[id] = Some([
                    parse_f64(tokens[2], line)?,
                    parse_f64(tokens[3], line)?,
                    parse_f64(tokens[4], line)?,
                ]);
                found += 1;
            }
            "glue" => {
                if tokens.len() != 5 && tokens.len() != 6 {
                    return Err(ParseError::Unexpected {
                        line,
                        expected: "glue <t1> <e1> <t2> <e2> [f]",
                        got: tokens.join(" "),
                    });
                }
                let reversed = if tokens.len() == 6 {
                    match tokens[5] {
                        "f" => false,
                        "r" => true,
                        other => {
                            return Err(ParseError::Unexpected {
                                line,
                                expected: "orientation flag `f` or `r`",
                                got: other.to_string(),
                            })
                        }
                    }
                } else {
                    true
                };
                pairs.push(GluingPair::oriented(
                    (parse_usize(tokens[1], line)?, parse_usize(tokens[2], line)?),
                    (parse_usize(tokens[3], line)?, parse_usize(tokens[4], line)?),
                    reversed,
                ));
            }
            other => {
                return Err(ParseError::Unexpected {
                    line,
                    expected: "tri or glue",
                    got: other.to_string(),
                })
            }
        }
    }
    if found != count {
        return Err(ParseError::TriangleCount {
            expected: count,
            found,
        });
    }
    let sides: Vec<[f64; 3]> = sides.into_iter().map(|s| s.unwrap()).collect();
    Ok(KPolyhedron::build(kappa, &sides, GluingMap::new(pairs))?)
}

/// Serializes a finite metric space.
pub fn write_fms(space: &FiniteMetricSpace) -> String {
    let n = space.len();
    let mut out = String::new();
    let _ = writeln!(out, "fms {n}");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_f64(space.dist(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses a finite metric space (all metric invariants re-checked).
pub fn parse_fms(text: &str) -> Result<FiniteMetricSpace, ParseError> {
    let lines = tokenize(text);
    let mut iter = lines.into_iter();
    let (line, header) = iter.next().ok_or(ParseError::MissingHeader("fms"))?;
    if header.len() != 2 || header[0] != "fms" {
        return Err(ParseError::Unexpected {
            line,
            expected: "fms <n>",
            got: header.join(" "),
        });
    }
    let n = parse_usize(header[1], line)?;
    let mut d = Vec::with_capacity(n * n);
    let mut rows = 0usize;
    for (line, tokens) in iter {
        if tokens.len() != n {
            return Err(ParseError::Unexpected {
                line,
                expected: "a row of n entries",
                got: tokens.join(" "),
            });
        }
        for t in tokens {
            d.push(parse_f64(t, line)?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(ParseError::RowCount {
            expected: n,
            found: rows,
        });
    }
    Ok(FiniteMetricSpace::new(n, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kpoly_round_trip_is_idempotent() {
        for p in [
            fixtures::cube(),
            fixtures::flat_torus(1),
            fixtures::octant_sphere(Curvature::new(1.0).unwrap()),
        ] {
            let once = write_kpoly(&p);
            let parsed = parse_kpoly(&once).unwrap();
            let twice = write_kpoly(&parsed);
            assert_eq!(once, twice);
            assert_eq!(parsed.num_vertices(), p.num_vertices());
            assert_eq!(parsed.euler_characteristic(), p.euler_characteristic());
        }
    }

    #[test]
    fn kpoly_parses_comments_and_decimals() {
        let text = "# a torus\nkpoly 0 2\ntri 0 1 1.4142135623730951 1\ntri 1 1 1 1.4142135623730951\nglue 0 2 1 0 # diagonal\nglue 0 0 1 1\nglue 0 1 1 2\n";
        let p = parse_kpoly(text).unwrap();
        assert_eq!(p.num_vertices(), 1);
        assert_eq!(p.euler_characteristic(), 0);
    }

    #[test]
    fn kpoly_parse_errors() {
        assert!(matches!(parse_kpoly(""), Err(ParseError::MissingHeader(_))));
        assert!(matches!(
            parse_kpoly("kpoly 0 1\ntri 0 1 1 1\ntri 0 1 1 1\n"),
            Err(ParseError::BadTriangleId(0))
        ));
        assert!(matches!(
            parse_kpoly("kpoly 0 2\ntri 0 1 1 1\n"),
            Err(ParseError::TriangleCount { .. })
        ));
        assert!(matches!(
            parse_kpoly("kpoly 0 1\ntri 0 1 1 x\n"),
            Err(ParseError::BadNumber { .. })
        ));
        // an unglued edge is a build error, surfaced through parsing
        assert!(matches!(
            parse_kpoly("kpoly 0 1\ntri 0 1 1 1\n"),
            Err(ParseError::Build(_))
        ));
    }

    #[test]
    fn fms_round_trip_is_idempotent() {
        let space =
            FiniteMetricSpace::new(3, vec![0.0, 1.0, 0.3, 1.0, 0.0, 1.1, 0.3, 1.1, 0.0]).unwrap();
        let once = write_fms(&space);
        let parsed = parse_fms(&once).unwrap();
        assert_eq!(write_fms(&parsed), once);
        assert_eq!(parsed, space);
    }

    #[test]
    fn fms_rejects_bad_metrics() {
        assert!(parse_fms("fms 2\n0 1\n1 0\n").is_ok());
        assert!(matches!(
            parse_fms("fms 2\n0 1\n2 0\n"),
            Err(ParseError::Metric(_))
        ));
        assert!(matches!(
            parse_fms("fms 2\n0 1\n"),
            Err(ParseError::RowCount { .. })
        ));
    }

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17] {
            let s = format_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
