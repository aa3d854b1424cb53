//! Positive-form transform and local-stratification checking.
//!
//! The positive form replaces every classically negated literal `-P(args)`
//! by a fresh atom over a primed predicate, turning an extended program
//! into a general one. A finite ground general program is locally
//! stratified exactly when its atom dependency graph has no cycle through
//! a negation-as-failure edge; the checker returns a level mapping or such
//! a cycle.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Literal, Program, Rule, Sign};

/// Maps primed predicate names back to the original negated predicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositiveFormMap {
    pub primed_to_original: BTreeMap<String, String>,
}

impl PositiveFormMap {
    /// Invert the transform on a single atom.
    pub fn invert(&self, atom: &Literal) -> Literal {
        match self.primed_to_original.get(&atom.predicate) {
            Some(orig) => Literal::neg(orig, atom.args.clone()),
            None => atom.clone(),
        }
    }
}

/// Replace each negative literal by its positive form everywhere.
pub fn positive_form(program: &Program) -> (Program, PositiveFormMap) {
    let predicates: BTreeSet<String> = program
        .iter()
        .flat_map(|r| r.literals())
        .map(|l| l.predicate.clone())
        .collect();
    let negated: BTreeSet<String> = program
        .iter()
        .flat_map(|r| r.literals())
        .filter(|l| l.sign == Sign::Neg)
        .map(|l| l.predicate.clone())
        .collect();

    let mut map = PositiveFormMap::default();
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for pred in negated {
        let mut fresh = format!("{pred}'");
        while predicates.contains(&fresh) || rename.values().any(|v| *v == fresh) {
            fresh.push('\'');
        }
        rename.insert(pred.clone(), fresh.clone());
        map.primed_to_original.insert(fresh, pred);
    }

    let transform = |lit: &Literal| -> Literal {
        match lit.sign {
            Sign::Pos => lit.clone(),
            Sign::Neg => Literal::pos(&rename[&lit.predicate], lit.args.clone()),
        }
    };
    let rules: Vec<Rule> = program
        .iter()
        .map(|r| Rule {
            name: r.name.clone(),
            head: r.head.as_ref().map(&transform),
            pos: r.pos.iter().map(&transform).collect(),
            naf: r.naf.iter().map(&transform).collect(),
        })
        .collect();
    (Program::new(rules).unwrap(), map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratification {
    /// A witnessing level mapping on the atoms of the program.
    Stratified(BTreeMap<Literal, u64>),
    /// A dependency cycle that crosses a negation-as-failure edge. The
    /// cycle lists atoms in dependency order, first atom repeated last.
    Unstratified { cycle: Vec<Literal> },
}

impl Stratification {
    pub fn is_stratified(&self) -> bool {
        matches!(self, Stratification::Stratified(_))
    }
}

/// Check local stratification of a ground general (atoms-only) program.
///
/// Panics if the program still contains classical negation; run
/// `positive_form` first.
pub fn is_locally_stratified(program: &Program) -> Stratification {
    assert!(
        program
            .iter()
            .flat_map(|r| r.literals())
            .all(|l| l.sign == Sign::Pos),
        "local stratification is defined on general programs; apply positive_form first"
    );

    let mut atoms: Vec<Literal> = Vec::new();
    let mut index: BTreeMap<Literal, usize> = BTreeMap::new();
    let mut intern = |lit: &Literal, atoms: &mut Vec<Literal>, index: &mut BTreeMap<Literal, usize>| {
        *index.entry(lit.clone()).or_insert_with(|| {
            atoms.push(lit.clone());
            atoms.len() - 1
        })
    };

    // dependency edges head -> body atom, weight 1 through naf
    let mut edges: Vec<Vec<(usize, bool)>> = Vec::new();
    for rule in program.iter() {
        let Some(head) = &rule.head else { continue };
        let h = intern(head, &mut atoms, &mut index);
        if edges.len() <= h {
            edges.resize(atoms.len(), Vec::new());
        }
        for (lit, naf) in rule
            .pos
            .iter()
            .map(|l| (l, false))
            .chain(rule.naf.iter().map(|l| (l, true)))
        {
            let b = intern(lit, &mut atoms, &mut index);
            if edges.len() < atoms.len() {
                edges.resize(atoms.len(), Vec::new());
            }
            edges[h].push((b, naf));
        }
    }
    edges.resize(atoms.len(), Vec::new());

    let scc = tarjan(&edges);

    // a naf edge inside one component witnesses an unstratifiable cycle
    for (u, outs) in edges.iter().enumerate() {
        for (v, naf) in outs {
            if *naf && scc.component[u] == scc.component[*v] {
                let cycle = cycle_through(&edges, *v, u, &scc.component);
                let mut lits: Vec<Literal> = cycle.into_iter().map(|i| atoms[i].clone()).collect();
                lits.push(lits[0].clone());
                return Stratification::Unstratified { cycle: lits };
            }
        }
    }

    // level of a component = longest weighted dependency path below it;
    // Tarjan emits components in dependency-first order
    let mut comp_level = vec![0u64; scc.count];
    for comp in 0..scc.count {
        for &u in &scc.members[comp] {
            for (v, naf) in &edges[u] {
                let cv = scc.component[*v];
                if cv != comp {
                    let need = comp_level[cv] + u64::from(*naf);
                    comp_level[comp] = comp_level[comp].max(need);
                }
            }
        }
    }
    let levels = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), comp_level[scc.component[i]]))
        .collect();
    Stratification::Stratified(levels)
}

struct Sccs {
    component: Vec<usize>,
    members: Vec<Vec<usize>>,
    count: usize,
}

fn tarjan(edges: &[Vec<(usize, bool)>]) -> Sccs {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;

    // iterative DFS to avoid recursion limits on long chains
    enum Frame {
        Enter(usize),
        Resume(usize, usize),
    }
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut frames = vec![Frame::Enter(start)];
        while let Some(frame) = frames.pop() {
            match frame {
                Frame::Enter(u) => {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    frames.push(Frame::Resume(u, 0));
                }
                Frame::Resume(u, mut e) => {
                    let mut descended = false;
                    while e < edges[u].len() {
                        let (v, _) = edges[u][e];
                        e += 1;
                        if index[v] == usize::MAX {
                            frames.push(Frame::Resume(u, e));
                            frames.push(Frame::Enter(v));
                            descended = true;
                            break;
                        } else if on_stack[v] {
                            low[u] = low[u].min(index[v]);
                        }
                    }
                    if descended {
                        continue;
                    }
                    if low[u] == index[u] {
                        let comp = members.len();
                        let mut comp_members = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            component[w] = comp;
                            comp_members.push(w);
                            if w == u {
                                break;
                            }
                        }
                        members.push(comp_members);
                    }
                    if let Some(Frame::Resume(p, _)) = frames.last() {
                        let p = *p;
                        low[p] = low[p].min(low[u]);
                    }
                }
            }
        }
    }
    let count = members.len();
    Sccs {
        component,
        members,
        count,
    }
}

/// Path from `from` to `to` staying inside one strongly connected
/// component.
fn cycle_through(
    edges: &[Vec<(usize, bool)>],
    from: usize,
    to: usize,
    component: &[usize],
) -> Vec<usize> {
    if from == to {
        return vec![from];
    }
    let comp = component[from];
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for (v, _) in &edges[u] {
            if component[*v] != comp || prev.contains_key(v) || *v == from {
                continue;
            }
            prev.insert(*v, u);
            if *v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[&cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            queue.push_back(*v);
        }
    }
    vec![from, to]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    fn program(text: &str) -> Program {
        parse_program(text).unwrap().program
    }

    #[test]
    fn single_negative_fact_becomes_primed_atom() {
        let (p, map) = positive_form(&program("N1: -A.\n"));
        let head = p.rules()[0].head.clone().unwrap();
        assert_eq!(head.sign, Sign::Pos);
        assert_eq!(head.predicate, "A'");
        assert_eq!(map.invert(&head), Literal::neg("A", vec![]));
    }

    #[test]
    fn positive_program_is_unchanged() {
        let p = program("N1: A.\nN2: B <- A, not C.\n");
        let (q, map) = positive_form(&p);
        assert_eq!(p, q);
        assert!(map.primed_to_original.is_empty());
    }

    #[test]
    fn acyclic_program_is_stratified() {
        let verdict = is_locally_stratified(&program("N1: A <- not B.\nN2: B.\n"));
        match verdict {
            Stratification::Stratified(levels) => {
                let a = Literal::pos("A", vec![]);
                let b = Literal::pos("B", vec![]);
                assert!(levels[&a] >= levels[&b] + 1);
            }
            other => panic!("expected stratified, got {other:?}"),
        }
    }

    #[test]
    fn self_naf_loop_is_not_stratified() {
        let verdict = is_locally_stratified(&program("N1: A <- not A.\n"));
        match verdict {
            Stratification::Unstratified { cycle } => {
                assert_eq!(cycle.first(), cycle.last());
                assert!(cycle.iter().any(|l| l.predicate == "A"));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn even_loop_is_not_stratified() {
        let verdict =
            is_locally_stratified(&program("N1: A <- not B.\nN2: B <- not A.\n"));
        assert!(!verdict.is_stratified());
    }

    #[test]
    fn positive_cycle_alone_is_fine() {
        let verdict = is_locally_stratified(&program("N1: A <- B.\nN2: B <- A.\n"));
        assert!(verdict.is_stratified());
    }
}
