//! Single-field mutations of certificate text.

use rand::seq::SliceRandom;
use rand::Rng;

/// Byte ranges of the atoms of an s-expression text.
fn atoms(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        let delim = c.is_whitespace() || c == '(' || c == ')';
        match (delim, start) {
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, text.len()));
    }
    out
}

/// Replace one atom of `text`: integers move by a small nonzero amount,
/// other atoms become a different atom of the same text.
pub fn mutate(text: &str, rng: &mut impl Rng) -> String {
    let spans = atoms(text);
    let vocabulary: Vec<&str> = {
        let mut v: Vec<&str> = spans.iter().map(|&(a, b)| &text[a..b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (a, b) = *spans.choose(rng).expect("non-empty certificate");
    let old = &text[a..b];
    let new = match old.parse::<i64>() {
        Ok(n) => {
            let d = *[-2i64, -1, 1, 2].choose(rng).unwrap();
            (n + d).to_string()
        }
        Err(_) => loop {
            let cand = *vocabulary.choose(rng).unwrap();
            if cand != old || vocabulary.len() == 1 {
                break cand.to_string();
            }
        },
    };
    format!("{}{}{}", &text[..a], new, &text[b..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn changes_exactly_one_atom() {
        let text = "(step 0 trans 1 2)\n(step 0 sym 3)";
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = mutate(text, &mut rng);
            assert_ne!(m, text);
            let diff = atoms(&m).iter().zip(atoms(text)).filter(|((a, b), (c, d))| m[*a..*b] != text[*c..*d]).count();
            assert_eq!(diff, 1);
        }
    }
}
