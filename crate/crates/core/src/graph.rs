//! Small digraph utilities: Tarjan SCC, reachability, undirected components.
//!
//! Graphs are adjacency lists over `0..n`. Component lists are canonical:
//! each component sorted ascending, components ordered by their least member.

/// Strongly connected components, canonically ordered.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut state = Tarjan {
        counter: 0,
        index: vec![usize::MAX; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.index[v] == usize::MAX {
            state.visit(v, adj);
        }
    }
    canonical(state.comps)
}

struct Tarjan {
    counter: usize,
    index: Vec<usize>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

impl Tarjan {
    // Iterative to stay safe on long chains.
    fn visit(&mut self, root: usize, adj: &[Vec<usize>]) {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        self.open(root);
        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if self.index[w] == usize::MAX {
                    self.open(w);
                    frames.push((w, 0));
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                self.low[parent] = self.low[parent].min(self.low[v]);
            }
            if self.low[v] == self.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().expect("tarjan stack underflow");
                    self.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                self.comps.push(comp);
            }
        }
    }

    fn open(&mut self, v: usize) {
        self.index[v] = self.counter;
        self.low[v] = self.counter;
        self.counter += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
    }
}

/// Vertices reachable from `start` (including `start`).
pub fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub fn is_strongly_connected(adj: &[Vec<usize>]) -> bool {
    if adj.is_empty() {
        return true;
    }
    if !reachable_from(adj, 0).iter().all(|&b| b) {
        return false;
    }
    let rev = reverse(adj);
    reachable_from(&rev, 0).iter().all(|&b| b)
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            rev[w].push(v);
        }
    }
    rev
}

/// Connected components of the undirected graph with the given edge list.
pub fn undirected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = find(&mut parent, v);
        groups[r].push(v);
    }
    canonical(groups.into_iter().filter(|g| !g.is_empty()).collect())
}

pub fn canonical(mut comps: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_by_key(|c| c[0]);
    comps
}
