use super::{ext_symbol, Conjunct, CraspError, CraspProgram, LineRef, Op, ProgramBuilder};

pub const DEFAULT_EXPANSION_BUDGET: usize = 200_000;

/// Value pairs `(a, b)` with `a` read at the query side, `b = a + shift` at
/// the counted side, both inside `alphabet`.
pub fn pair_branches(conj: &Conjunct, alphabet: &[u64]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &a in alphabet {
        let b = a as i128 + conj.shift as i128;
        if b >= 0 && alphabet.contains(&(b as u64)) {
            out.push((a, b as u64));
        }
    }
    out
}

/// Rewrites every match line into plain counting over a finite alphabet:
/// each extended value `v` becomes the Σ symbol `#v`, and a match becomes a
/// sum, over all admissible value assignments, of "the counted side shows
/// these values" counts gated on "the query side shows the paired values".
///
/// Inputs must only carry extended values from `alphabet`; bind them with
/// [`CraspProgram::bind`], which maps `Ext(v)` to `#v`. Programs without
/// match lines come back unchanged.
pub fn lower_match_to_finite(
    program: &CraspProgram,
    alphabet: &[u64],
    budget: usize,
) -> Result<CraspProgram, CraspError> {
    if program.count_matches() == 0 {
        return Ok(program.clone());
    }
    let mut alphabet = alphabet.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();

    let mut needed: u128 = 0;
    for op in program.ops() {
        if let Op::Match(m) = op {
            let branches = m
                .conjuncts
                .iter()
                .map(|c| pair_branches(c, &alphabet).len() as u128)
                .product::<u128>();
            needed = needed.saturating_add(branches);
        }
    }
    if needed > budget as u128 {
        return Err(CraspError::AlphabetTooLarge { needed, budget });
    }

    let mut b = ProgramBuilder::with_sigma(program.sigma());
    for &v in &alphabet {
        b.sigma_symbol(&ext_symbol(v));
    }
    let mut map: Vec<LineRef> = Vec::with_capacity(program.len());
    for (line, op) in program.ops().iter().enumerate() {
        b.set_label(program.names()[line].clone());
        let m = |i: usize| map[i].0;
        let new = match op {
            Op::Match(spec) => {
                let pairs: Vec<Vec<(u64, u64)>> = spec
                    .conjuncts
                    .iter()
                    .map(|c| pair_branches(c, &alphabet))
                    .collect();
                let filter = spec.filter.map(|f| map[f]);
                let zero = b.zero();
                let mut terms = Vec::new();
                for combo in cartesian(&pairs) {
                    let mut past: Vec<LineRef> = filter.into_iter().collect();
                    let mut current = Vec::new();
                    for (c, &(a, v)) in spec.conjuncts.iter().zip(&combo) {
                        past.push(b.look(&ext_symbol(v), c.past));
                        current.push(b.look(&ext_symbol(a), c.current));
                    }
                    let p_past = b.and_all(past);
                    let p_cur = b.and_all(current);
                    let mut cnt = b.count_top(p_past);
                    if spec.strict {
                        let here = b.count_offset(p_past, 0);
                        cnt = b.sub(cnt, here);
                    }
                    terms.push(b.cond(p_cur, cnt, zero));
                }
                b.sum(terms)
            }
            Op::Initial(s) => {
                let name = program.sigma()[*s as usize].clone();
                b.initial(&name)
            }
            Op::Not(a) => b.op(Op::Not(m(*a))),
            Op::And(x, y) => b.op(Op::And(m(*x), m(*y))),
            Op::True => b.truth(),
            Op::Leq(x, y) => b.op(Op::Leq(m(*x), m(*y))),
            Op::Count { filter, rel } => b.op(Op::Count {
                filter: m(*filter),
                rel: *rel,
            }),
            Op::Cond(p, x, y) => b.op(Op::Cond(m(*p), m(*x), m(*y))),
            Op::Add(x, y) => b.op(Op::Add(m(*x), m(*y))),
            Op::Sub(x, y) => b.op(Op::Sub(m(*x), m(*y))),
            Op::One => b.one(),
        };
        b.name(new, program.names()[line].clone());
        map.push(new);
    }
    let out = map[program.output()];
    Ok(b.finish(out).0)
}

fn cartesian(lists: &[Vec<(u64, u64)>]) -> Vec<Vec<(u64, u64)>> {
    let mut acc: Vec<Vec<(u64, u64)>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(acc.len() * l.len());
        for prefix in &acc {
            for &p in l {
                let mut v = prefix.clone();
                v.push(p);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::super::{accepts, Symbol};
    use super::*;

    fn single_match(shift: i64, strict: bool) -> CraspProgram {
        let mut b = ProgramBuilder::new();
        let m = b.match_count(vec![Conjunct::new(1, 0, shift)], None, strict);
        let out = b.ge_const(m, 1);
        b.finish(out).0
    }

    #[test]
    fn shifted_pairs() {
        assert_eq!(
            pair_branches(&Conjunct::new(0, 0, 1), &[1, 2, 3]),
            vec![(1, 2), (2, 3)]
        );
        assert_eq!(pair_branches(&Conjunct::new(0, 0, 0), &[1, 2]).len(), 2);
    }

    #[test]
    fn match_free_program_is_unchanged() {
        let mut b = ProgramBuilder::new();
        let t = b.truth();
        let (p, _) = b.finish(t);
        assert_eq!(lower_match_to_finite(&p, &[1, 2], 10).unwrap(), p);
    }

    #[test]
    fn lowered_has_no_match_and_agrees() {
        let alphabet = [1u64, 2];
        for shift in [0, 1, -1] {
            for strict in [false, true] {
                let p = single_match(shift, strict);
                let low = lower_match_to_finite(&p, &alphabet, 100).unwrap();
                assert_eq!(low.count_matches(), 0);
                for len in 1..=6u32 {
                    for code in 0..2u32.pow(len) {
                        let w: Vec<Symbol> = (0..len)
                            .map(|k| Symbol::Ext(alphabet[((code >> k) & 1) as usize]))
                            .collect();
                        let orig = accepts(&p, &p.bind(&w).unwrap()).unwrap();
                        let lowered = accepts(&low, &low.bind(&w).unwrap()).unwrap();
                        assert_eq!(orig, lowered, "shift {shift} strict {strict} {w:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn budget_enforced() {
        let p = single_match(0, false);
        let err = lower_match_to_finite(&p, &[1, 2, 3], 2).unwrap_err();
        assert_eq!(err, CraspError::AlphabetTooLarge { needed: 3, budget: 2 });
    }
}
