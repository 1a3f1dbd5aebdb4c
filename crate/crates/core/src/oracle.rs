//! Brute-force reference computations, independent of the word and ball code.

use std::collections::HashSet;

use crate::raag::{diagonal_elements, DefiningGraph};
use crate::word::{letter_gen, letter_sign, Letter};

/// Piling of a word: one stack per generator. A letter is pushed on its own
/// stack and a blocker on every non-commuting stack; cancellation pops them.
/// Two words are equal in the group exactly when their pilings agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piling(Vec<Vec<i8>>);

impl Piling {
    pub fn identity(graph: &DefiningGraph) -> Self {
        Self(vec![Vec::new(); graph.rank()])
    }

    pub fn push(&mut self, graph: &DefiningGraph, gen: usize, sign: i8) {
        let blocked: Vec<usize> = (0..graph.rank()).filter(|&y| y != gen && !graph.commute(gen, y)).collect();
        if self.0[gen].last() == Some(&-sign) {
            self.0[gen].pop();
            for y in blocked {
                let top = self.0[y].pop();
                debug_assert_eq!(top, Some(0));
            }
        } else {
            self.0[gen].push(sign);
            for y in blocked {
                self.0[y].push(0);
            }
        }
    }

    pub fn of_letters(graph: &DefiningGraph, word: &[Letter]) -> Self {
        let mut p = Self::identity(graph);
        for &l in word {
            p.push(graph, letter_gen(l), letter_sign(l));
        }
        p
    }

    /// Letters in the piling, the length of a reduced word.
    pub fn length(&self) -> usize {
        self.0.iter().flatten().filter(|&&s| s != 0).count()
    }
}

/// Sphere sizes `|S(0)| .. |S(depth)|` for the diagonal generating set, by
/// breadth-first search over pilings.
pub fn sphere_sizes(graph: &DefiningGraph, depth: usize, cap: usize) -> Option<Vec<usize>> {
    let moves = diagonal_elements(graph);
    let start = Piling::identity(graph);
    let mut seen: HashSet<Piling> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut sizes = vec![1];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for m in &moves {
                let mut q = p.clone();
                for (g, s) in m.entries() {
                    q.push(graph, g, s);
                }
                if !seen.contains(&q) {
                    seen.insert(q.clone());
                    next.push(q);
                }
            }
        }
        if seen.len() > cap {
            return None;
        }
        sizes.push(next.len());
        frontier = next;
    }
    Some(sizes)
}

/// `|S(n)|` of `Z^d`: `(2n+1)^d - (2n-1)^d`.
pub fn lattice_sphere(d: u32, n: u64) -> u128 {
    if n == 0 {
        return 1;
    }
    (2 * n as u128 + 1).pow(d) - (2 * n as u128 - 1).pow(d)
}

/// `|S(n)|` of the free group of rank `d`.
pub fn free_sphere(d: u32, n: u32) -> u128 {
    if n == 0 {
        return 1;
    }
    let d = d as u128;
    2 * d * (2 * d - 1).pow(n - 1)
}

/// `|S(n)|` of `F_2 x Z`: an element `(w, k)` has length `max(|w|, |k|)`.
pub fn free2_times_z_sphere(n: u32) -> u128 {
    let ball = |m: i64| -> i128 {
        if m < 0 {
            0
        } else {
            (2 * 3i128.pow(m as u32) - 1) * (2 * m as i128 + 1)
        }
    };
    (ball(n as i64) - ball(n as i64 - 1)) as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::letter;

    #[test]
    fn piling_cancels_through_commuting_letters() {
        let g = DefiningGraph::new(vec!["a", "b", "c"], &[(0, 1)]).unwrap();
        let w = [letter(0, 1), letter(1, 1), letter(0, -1)];
        assert_eq!(Piling::of_letters(&g, &w), Piling::of_letters(&g, &[letter(1, 1)]));
        let w = [letter(0, 1), letter(2, 1), letter(0, -1)];
        assert_eq!(Piling::of_letters(&g, &w).length(), 3);
    }

    #[test]
    fn closed_forms_agree_with_search() {
        let z3 = sphere_sizes(&DefiningGraph::complete(3), 3, 1 << 20).unwrap();
        assert_eq!(z3, (0..4).map(|n| lattice_sphere(3, n) as usize).collect::<Vec<_>>());
        let f3 = sphere_sizes(&DefiningGraph::edgeless(3), 4, 1 << 20).unwrap();
        assert_eq!(f3, (0..5).map(|n| free_sphere(3, n) as usize).collect::<Vec<_>>());
        let p = DefiningGraph::new(vec!["a", "b", "z"], &[(0, 2), (1, 2)]).unwrap();
        let s = sphere_sizes(&p, 3, 1 << 20).unwrap();
        assert_eq!(s, (0..4).map(|n| free2_times_z_sphere(n) as usize).collect::<Vec<_>>());
        assert_eq!(s[2], 70);
    }
}
