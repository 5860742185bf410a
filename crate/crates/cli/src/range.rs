/// Parses a size list: `a..b` (doubling from `a` while `≤ b`), `a-b`
/// (every integer), or `a,b,c`. Sizes must be positive.
pub fn parse_sizes(input: &str) -> Result<Vec<usize>, String> {
    let input = input.trim();
    let num = |s: &str| -> Result<usize, String> {
        let v: usize = s.trim().parse().map_err(|_| format!("invalid size {s:?}"))?;
        if v == 0 {
            return Err("sizes must be positive".into());
        }
        Ok(v)
    };
    let out = if let Some((a, b)) = input.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty range {input:?}"));
        }
        std::iter::successors(Some(a), |&x| x.checked_mul(2)).take_while(|&x| x <= b).collect()
    } else if let Some((a, b)) = input.split_once('-') {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty range {input:?}"));
        }
        (a..=b).collect()
    } else {
        input.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if out.is_empty() {
        return Err(format!("no sizes in {input:?}"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_sizes("4..32").unwrap(), vec![4, 8, 16, 32]);
        assert_eq!(parse_sizes("3..20").unwrap(), vec![3, 6, 12]);
        assert_eq!(parse_sizes("2-5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_sizes("1").unwrap(), vec![1]);
        assert_eq!(parse_sizes("2, 3,7").unwrap(), vec![2, 3, 7]);
    }

    #[test]
    fn rejects() {
        for bad in ["", "0", "8..4", "5-2", "a,b", "2..x", "0..4"] {
            assert!(parse_sizes(bad).is_err(), "{bad}");
        }
    }
}
