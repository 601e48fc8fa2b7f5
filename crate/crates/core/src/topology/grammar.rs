//! Textual topology specs:
//!
//! ```text
//! circulant:<n>:<j1,j2,...> | ring:<n> | complete:<n> | hypercube:<d>
//! torus:<d1,d2,...>         | product:<spec>*<spec>[*<spec>...]
//! ```

use super::{JumpSet, Topology};
use crate::error::{Error, Result};

fn err(spec: &str, reason: impl Into<String>) -> Error {
    Error::SpecParse { spec: spec.to_string(), reason: reason.into() }
}

fn int(spec: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| err(spec, format!("expected a non-negative integer, found {s:?}")))
}

fn int_list(spec: &str, s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|p| int(spec, p)).collect()
}

pub fn parse_spec(spec: &str) -> Result<Topology> {
    let spec = spec.trim();
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| err(spec, "missing ':' after topology kind"))?;
    match head {
        "product" => {
            let parts: Vec<&str> = rest.split('*').collect();
            if parts.len() < 2 {
                return Err(err(spec, "product needs at least two '*'-separated factors"));
            }
            let mut acc = parse_spec(parts[0])?;
            for p in &parts[1..] {
                acc = Topology::cartesian_product(&acc, &parse_spec(p)?);
            }
            Ok(acc)
        }
        "circulant" => {
            let (n, jumps) = rest
                .split_once(':')
                .ok_or_else(|| err(spec, "expected circulant:<n>:<jumps>"))?;
            let js = JumpSet::new(int(spec, n)?, int_list(spec, jumps)?)
                .map_err(|e| err(spec, e.to_string()))?;
            Ok(Topology::circulant(&js))
        }
        "ring" => Topology::ring(int(spec, rest)?),
        "complete" => Topology::complete(int(spec, rest)?),
        "hypercube" => Topology::hypercube(int(spec, rest)?),
        "torus" => Topology::torus(&int_list(spec, rest)?),
        other => Err(err(spec, format!("unknown topology kind {other:?}"))),
    }
    .map_err(|e| match e {
        Error::SpecParse { .. } => e,
        other => err(spec, other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "circulant:32:1,7",
            "ring:8",
            "complete:4",
            "hypercube:5",
            "torus:8,8,4,4",
            "product:ring:8*complete:4",
            "product:circulant:256:1,13,33,128*complete:4",
            "product:torus:8,4*complete:4*hypercube:2",
        ] {
            let t = parse_spec(s).unwrap();
            assert_eq!(t.spec().as_deref(), Some(s));
            assert_eq!(parse_spec(&t.spec().unwrap()).unwrap(), t);
        }
    }

    #[test]
    fn product_of_products_flattens() {
        let t = parse_spec("product:product:ring:3*ring:4*ring:5").unwrap_err();
        // nested product text is ambiguous and rejected
        assert!(matches!(t, Error::SpecParse { .. }));
        let ab = parse_spec("product:ring:3*ring:4").unwrap();
        let abc = Topology::cartesian_product(&ab, &parse_spec("ring:5").unwrap());
        assert_eq!(abc.spec().unwrap(), "product:ring:3*ring:4*ring:5");
        assert_eq!(abc.factors().len(), 3);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "ring", "ring:x", "ring:2", "circulant:8", "circulant:8:9", "blob:3", "product:ring:8"] {
            assert!(matches!(parse_spec(s), Err(Error::SpecParse { .. })), "{s}");
        }
    }
}
