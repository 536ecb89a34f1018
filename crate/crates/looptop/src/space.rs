//! Text forms of spaces and integer matrices.
//!
//! Grammar: `manifold:n:r`, `csum:p1xq1,p2xq2[:signs=+,-]`,
//! `cw:n:"g11,g12;g21,g22"`, `betti1:n:m`. Matrices are rows separated by
//! `;`, entries by `,`.

use looptop_core::linalg::ZMatrix;
use looptop_core::spaces::SpaceModel;
use num_bigint::BigInt;

pub fn parse_matrix(s: &str) -> Result<ZMatrix, String> {
    let s = s.trim().trim_matches(|c| c == '"' || c == '\'');
    if s.is_empty() {
        return Err("empty matrix".into());
    }
    let rows = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| e.trim().parse::<BigInt>().map_err(|_| format!("matrix entry {:?} is not an integer", e.trim())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    ZMatrix::from_rows(rows).map_err(|e| e.to_string())
}

pub fn format_matrix(m: &ZMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_u32(s: &str, what: &str) -> Result<u32, String> {
    s.trim().parse().map_err(|_| format!("{what} must be a non-negative integer, got {s:?}"))
}

pub fn parse_factors(s: &str) -> Result<Vec<(u32, u32)>, String> {
    s.split(',')
        .map(|f| {
            let (p, q) = f.split_once('x').ok_or_else(|| format!("factor {f:?} is not of the form PxQ"))?;
            Ok((parse_u32(p, "sphere dimension")?, parse_u32(q, "sphere dimension")?))
        })
        .collect()
}

pub fn parse_signs(s: &str) -> Result<Vec<i8>, String> {
    s.split(',')
        .map(|e| match e.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(format!("orientation sign {other:?} is not + or -")),
        })
        .collect()
}

pub fn parse_space(s: &str) -> Result<SpaceModel, String> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("space {s:?} has no parameters"))?;
    let space = match kind {
        "manifold" => {
            let (n, r) = rest.split_once(':').ok_or("expected manifold:n:r")?;
            SpaceModel::manifold(parse_u32(n, "n")?, parse_u32(r, "r")?, None)
        }
        "csum" => {
            let (factors, signs) = match rest.split_once(':') {
                Some((f, tail)) => {
                    let signs = tail.strip_prefix("signs=").ok_or("expected csum:...:signs=+,-,...")?;
                    (parse_factors(f)?, parse_signs(signs)?)
                }
                None => {
                    let f = parse_factors(rest)?;
                    let k = f.len();
                    (f, vec![1; k])
                }
            };
            SpaceModel::connected_sum(factors, signs)
        }
        "cw" => {
            let (n, m) = rest.split_once(':').ok_or("expected cw:n:\"matrix\"")?;
            SpaceModel::two_cell(parse_u32(n, "n")?, parse_matrix(m)?)
        }
        "betti1" => {
            let (n, m) = rest.split_once(':').ok_or("expected betti1:n:m")?;
            let m: i64 = m.trim().parse().map_err(|_| format!("m must be an integer, got {m:?}"))?;
            SpaceModel::betti_one(parse_u32(n, "n")?, m)
        }
        other => return Err(format!("unknown space kind {other:?}; expected manifold, csum, cw or betti1")),
    };
    space.map_err(|e| e.to_string())
}

/// Canonical grammar string, accepted back by `parse_space` for every
/// model without an explicit manifold matrix.
pub fn space_string(s: &SpaceModel) -> String {
    match s {
        SpaceModel::Manifold { n, r, matrix: None } => format!("manifold:{n}:{r}"),
        SpaceModel::Manifold { n, r, matrix: Some(m) } => format!("manifold:{n}:{r} with form {}", format_matrix(m)),
        SpaceModel::ConnectedSum { factors, signs } => {
            let f: Vec<String> = factors.iter().map(|(p, q)| format!("{p}x{q}")).collect();
            let e: Vec<&str> = signs.iter().map(|&e| if e > 0 { "+" } else { "-" }).collect();
            format!("csum:{}:signs={}", f.join(","), e.join(","))
        }
        SpaceModel::TwoCellComplex { n, q, .. } => format!("cw:{n}:\"{}\"", format_matrix(q)),
        SpaceModel::BettiOne { n, m } => format!("betti1:{n}:{m}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_round_trip() {
        let m = parse_matrix("0,2;2,0").unwrap();
        assert_eq!(m, ZMatrix::from_i64(&[&[0, 2], &[2, 0]]));
        assert_eq!(format_matrix(&m), "0,2;2,0");
        assert!(parse_matrix("1,2;3").is_err());
        assert!(parse_matrix("1,x").is_err());
    }

    #[test]
    fn grammar_round_trips() {
        for s in ["manifold:2:3", "csum:2x3,2x3:signs=+,-", "cw:2:\"0,7;7,0\"", "betti1:4:4"] {
            assert_eq!(space_string(&parse_space(s).unwrap()), s);
        }
        assert_eq!(space_string(&parse_space("csum:2x3").unwrap()), "csum:2x3:signs=+");
        assert_eq!(space_string(&parse_space("betti1:4:-1").unwrap()), "betti1:4:11");
    }

    #[test]
    fn grammar_rejects_bad_input() {
        for s in ["manifold:2", "manifold:3:3", "torus:2", "csum:2y3", "csum:2x3:signs=+,+", "cw:2:\"0,1\"", "betti1:3:0"] {
            assert!(parse_space(s).is_err(), "{s}");
        }
    }
}
