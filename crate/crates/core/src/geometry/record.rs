//! Plain-text domain records: `rect a b [x0 y0]`, `poly x1 y1 x2 y2 ...`,
//! `disk r [cx cy]`, and `random k seed` for a random convex polygon with `k`
//! vertices inscribed in the circle of radius 1/2 about (1/2, 1/2).

use super::{ConvexPolygon, Domain, Point};
use crate::error::{Error, Result};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

// Whitespace-separated tokens with their 1-based character columns.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = 0;
    for (byte, ch) in text.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push((c, &text[b..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        out.push((c, &text[b..]));
    }
    out
}

/// Parses one record; `line` is only used for diagnostics.
pub fn parse_domain_at(text: &str, line: usize) -> Result<Domain> {
    let toks = tokens(text);
    let Some(&(kcol, keyword)) = toks.first() else {
        return Err(parse_error(line, 1, "empty domain record"));
    };
    let mut nums = Vec::with_capacity(toks.len() - 1);
    for &(col, tok) in &toks[1..] {
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => nums.push(v),
            _ => return Err(parse_error(line, col, format!("expected a finite number, found `{tok}`"))),
        }
    }
    let arity = |ok: &[usize]| -> Result<()> {
        if ok.contains(&nums.len()) {
            Ok(())
        } else {
            let col = toks.get(ok.iter().max().unwrap() + 1).map_or(
                text.chars().count() + 1,
                |t| t.0,
            );
            Err(parse_error(
                line,
                col,
                format!("`{keyword}` takes {ok:?} numbers, found {}", nums.len()),
            ))
        }
    };
    let built = match keyword {
        "rect" => {
            arity(&[2, 4])?;
            let origin = if nums.len() == 4 { Point::new(nums[2], nums[3]) } else { Point::zeros() };
            Domain::rectangle_at(nums[0], nums[1], origin)
        }
        "disk" => {
            arity(&[1, 3])?;
            let center = if nums.len() == 3 { Point::new(nums[1], nums[2]) } else { Point::zeros() };
            Domain::disk_at(nums[0], center)
        }
        "poly" => {
            if nums.len() < 6 || nums.len() % 2 == 1 {
                let col = toks.last().map_or(kcol, |t| t.0);
                return Err(parse_error(
                    line,
                    col,
                    format!("`poly` needs an even count of at least 6 coordinates, found {}", nums.len()),
                ));
            }
            Domain::polygon(nums.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
        }
        "random" => {
            arity(&[2])?;
            for (k, &v) in nums.iter().enumerate() {
                if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(parse_error(line, toks[k + 1].0, format!("expected a nonnegative integer, found `{}`", toks[k + 1].1)));
                }
            }
            ConvexPolygon::random_inscribed(nums[0] as usize, nums[1] as u64).map(Domain::ConvexPolygon)
        }
        other => {
            return Err(parse_error(
                line,
                kcol,
                format!("unknown domain kind `{other}` (expected rect, poly, disk or random)"),
            ))
        }
    };
    built.map_err(|e| match e {
        Error::Validation(m) => parse_error(line, kcol, m),
        other => other,
    })
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    parse_domain_at(text, 1)
}

/// Parses one record per line, skipping blank lines and `#` comments.
pub fn parse_domain_records(text: &str) -> Result<Vec<Domain>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| parse_domain_at(l, i + 1))
        .collect()
}

/// Record text with shortest round-trip floats.
pub fn format_domain(domain: &Domain) -> String {
    match domain {
        Domain::Rectangle { a, b, origin } if *origin == Point::zeros() => format!("rect {a:?} {b:?}"),
        Domain::Rectangle { a, b, origin } => format!("rect {a:?} {b:?} {:?} {:?}", origin.x, origin.y),
        Domain::Disk { radius, center } if *center == Point::zeros() => format!("disk {radius:?}"),
        Domain::Disk { radius, center } => format!("disk {radius:?} {:?} {:?}", center.x, center.y),
        Domain::ConvexPolygon(p) => {
            let mut s = String::from("poly");
            for v in p.vertices() {
                s.push_str(&format!(" {:?} {:?}", v.x, v.y));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for rec in [
            "rect 1.0 1.0",
            "rect 2.0 0.5 -1.0 0.25",
            "disk 1.0",
            "disk 0.3 1.0 2.0",
            "poly 0.0 0.0 1.0 0.0 0.1 0.7",
        ] {
            let d = parse_domain(rec).unwrap();
            assert_eq!(format_domain(&d), rec);
        }
        let third = Domain::disk(1.0 / 3.0).unwrap();
        assert_eq!(parse_domain(&format_domain(&third)).unwrap(), third);
    }

    #[test]
    fn diagnostics_point_at_the_offending_token() {
        let err = parse_domain_records("rect 1 1\n\n  disk 1 x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 10,
                message: "expected a finite number, found `x`".into()
            }
        );
        let Error::Parse { line, column, .. } = parse_domain("circle 1").unwrap_err() else {
            panic!()
        };
        assert_eq!((line, column), (1, 1));
        assert!(matches!(parse_domain("rect 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_domain("rect -1 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_domain("poly 0 0 0 1 1 0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let ds = parse_domain_records("# unit square\nrect 1 1\n\ndisk 2\n").unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn random_polygon_records() {
        let d = parse_domain("random 5 7").unwrap();
        assert_eq!(d, Domain::ConvexPolygon(ConvexPolygon::random_inscribed(5, 7).unwrap()));
        let Error::Parse { column, .. } = parse_domain("random 5 1.5").unwrap_err() else {
            panic!()
        };
        assert_eq!(column, 10);
        assert!(parse_domain("random 2 1").is_err());
    }
}
