//! Ordered tree edit distance (Zhang-Shasha) with unit costs, and TEDS.

use alloc::vec;
use alloc::vec::Vec;

use super::table::TableTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree<L> {
    pub label: L,
    pub children: Vec<Tree<L>>,
}

impl<L> Tree<L> {
    pub fn leaf(label: L) -> Self {
        Tree {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: L, children: Vec<Tree<L>>) -> Self {
        Tree { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

/// Postorder arrays, 1-based: `labels[i]` and leftmost-leaf `lld[i]`.
struct Flat<'a, L> {
    labels: Vec<&'a L>,
    lld: Vec<usize>,
}

impl<'a, L> Flat<'a, L> {
    fn new(t: &'a Tree<L>) -> Self {
        let n = t.size();
        let mut flat = Flat {
            labels: Vec::with_capacity(n + 1),
            lld: Vec::with_capacity(n + 1),
        };
        // index 0 is a sentinel so that node ids start at 1.
        flat.labels.push(&t.label);
        flat.lld.push(0);
        flat.visit(t);
        flat
    }

    fn visit(&mut self, t: &'a Tree<L>) -> usize {
        let mut leftmost = None;
        for c in &t.children {
            let l = self.visit(c);
            leftmost.get_or_insert(l);
        }
        self.labels.push(&t.label);
        let id = self.labels.len() - 1;
        self.lld.push(leftmost.unwrap_or(id));
        self.lld[id]
    }

    fn len(&self) -> usize {
        self.labels.len() - 1
    }

    fn keyroots(&self) -> Vec<usize> {
        let n = self.len();
        let mut seen = vec![false; n + 1];
        let mut roots = Vec::new();
        for i in (1..=n).rev() {
            if !seen[self.lld[i]] {
                seen[self.lld[i]] = true;
                roots.push(i);
            }
        }
        roots.sort_unstable();
        roots
    }
}

/// Minimum number of node insertions, deletions and relabelings turning `a`
/// into `b`.
pub fn tree_edit_distance<L: PartialEq>(a: &Tree<L>, b: &Tree<L>) -> usize {
    let fa = Flat::new(a);
    let fb = Flat::new(b);
    let (n, m) = (fa.len(), fb.len());
    let mut td = vec![vec![0usize; m + 1]; n + 1];
    let mut fd = vec![vec![0usize; m + 2]; n + 2];

    for &i in &fa.keyroots() {
        for &j in &fb.keyroots() {
            let (li, lj) = (fa.lld[i], fb.lld[j]);
            // fd is indexed with an offset so that li-1 and lj-1 map to 0.
            let (oi, oj) = (li - 1, lj - 1);
            fd[0][0] = 0;
            for di in li..=i {
                fd[di - oi][0] = fd[di - 1 - oi][0] + 1;
            }
            for dj in lj..=j {
                fd[0][dj - oj] = fd[0][dj - 1 - oj] + 1;
            }
            for di in li..=i {
                for dj in lj..=j {
                    let del = fd[di - 1 - oi][dj - oj] + 1;
                    let ins = fd[di - oi][dj - 1 - oj] + 1;
                    if fa.lld[di] == li && fb.lld[dj] == lj {
                        let sub = fd[di - 1 - oi][dj - 1 - oj] + usize::from(fa.labels[di] != fb.labels[dj]);
                        let v = del.min(ins).min(sub);
                        fd[di - oi][dj - oj] = v;
                        td[di][dj] = v;
                    } else {
                        let pi = fa.lld[di] - 1 - oi;
                        let pj = fb.lld[dj] - 1 - oj;
                        fd[di - oi][dj - oj] = del.min(ins).min(fd[pi][pj] + td[di][dj]);
                    }
                }
            }
        }
    }
    td[n][m]
}

/// Tree-edit-distance similarity, `1 - TED / max(|a|, |b|)`.
pub fn teds(reference: &TableTree, hypothesis: &TableTree) -> f64 {
    let (a, b) = (reference.to_tree(), hypothesis.to_tree());
    let longest = a.size().max(b.size());
    1.0 - tree_edit_distance(&a, &b) as f64 / longest as f64
}
