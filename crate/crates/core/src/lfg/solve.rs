use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde_json::{Map, Value as Json};

use super::{dnf, var_order, EqKind, Equation, FDescription, PathExpr, Value};

/// A node of a solved f-structure. A complex node without entries is an
/// element the description says nothing about beyond its existence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FNode {
    Const(String),
    /// A value demanded by a constraining equation but never defined.
    /// Only relaxed candidates contain these.
    Checked(String),
    Complex(Vec<(String, usize)>),
}

/// A rooted attribute-value graph with f-variable bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FStructure {
    nodes: Vec<FNode>,
    bindings: BTreeMap<String, usize>,
}

impl FStructure {
    pub fn nodes(&self) -> &[FNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &FNode {
        &self.nodes[id]
    }

    pub fn bindings(&self) -> &BTreeMap<String, usize> {
        &self.bindings
    }

    /// The lowest-numbered f-variable, which names the sentence node.
    pub fn root_var(&self) -> Option<&str> {
        self.bindings
            .keys()
            .min_by(|a, b| var_order(a, b))
            .map(String::as_str)
    }

    pub fn root(&self) -> Option<usize> {
        self.root_var().map(|v| self.bindings[v])
    }

    /// Entries of `node` labelled `attr`.
    pub fn entries(&self, node: usize, attr: &str) -> Vec<usize> {
        match &self.nodes[node] {
            FNode::Complex(es) => es
                .iter()
                .filter(|(a, _)| a == attr)
                .map(|(_, c)| *c)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Follows `path`, taking the first entry at each step.
    pub fn get(&self, path: &PathExpr) -> Option<usize> {
        let mut cur = *self.bindings.get(&path.var)?;
        for attr in &path.attrs {
            cur = *self.entries(cur, attr).first()?;
        }
        Some(cur)
    }

    /// True when some node carries two entries with the same attribute.
    pub fn has_repeated_attribute(&self) -> bool {
        self.nodes.iter().any(|n| match n {
            FNode::Complex(es) => es.windows(2).any(|w| w[0].0 == w[1].0),
            _ => false,
        })
    }

    /// Nested attribute-value JSON for the root. Repeated attributes become
    /// arrays, constants strings, unresolved checks `"=c VALUE"`, and a
    /// back edge on the current path `{"$cycle": depth}`.
    pub fn to_json(&self) -> Json {
        match self.root() {
            Some(r) => self.node_json(r, &mut Vec::new()),
            None => Json::Object(Map::new()),
        }
    }

    fn node_json(&self, id: usize, path: &mut Vec<usize>) -> Json {
        if let Some(depth) = path.iter().position(|&n| n == id) {
            let mut m = Map::new();
            m.insert("$cycle".into(), Json::from(depth));
            return Json::Object(m);
        }
        match &self.nodes[id] {
            FNode::Const(c) => Json::String(c.clone()),
            FNode::Checked(c) => Json::String(format!("=c {c}")),
            FNode::Complex(entries) => {
                path.push(id);
                let mut grouped: BTreeMap<&str, Vec<Json>> = BTreeMap::new();
                for (attr, child) in entries {
                    let v = self.node_json(*child, path);
                    grouped.entry(attr).or_default().push(v);
                }
                path.pop();
                let mut m = Map::new();
                for (attr, mut vs) in grouped {
                    let v = if vs.len() == 1 {
                        vs.pop().unwrap()
                    } else {
                        Json::Array(vs)
                    };
                    m.insert(attr.to_string(), v);
                }
                Json::Object(m)
            }
        }
    }

    /// A string that is equal for two structures iff they are isomorphic
    /// with the same variable bindings.
    pub fn canonical_key(&self) -> String {
        let mut vars: Vec<&String> = self.bindings.keys().collect();
        vars.sort_by(|a, b| var_order(a, b));
        let mut ids = HashMap::new();
        let mut out = String::new();
        for v in vars {
            out.push_str(v);
            out.push('=');
            self.render_key(self.bindings[v], &mut ids, &mut out);
            out.push(';');
        }
        out
    }

    fn render_key(&self, id: usize, ids: &mut HashMap<usize, usize>, out: &mut String) {
        // constants are identified by name, not by node
        match &self.nodes[id] {
            FNode::Const(c) => return out.push_str(&format!("'{c}'")),
            FNode::Checked(c) => return out.push_str(&format!("=c'{c}'")),
            FNode::Complex(_) => {}
        }
        if let Some(n) = ids.get(&id) {
            out.push_str(&format!("#{n}"));
            return;
        }
        let n = ids.len();
        ids.insert(id, n);
        let FNode::Complex(entries) = &self.nodes[id] else {
            return;
        };
        let mut sorted: Vec<&(String, usize)> = entries.iter().collect();
        sorted.sort_by_cached_key(|(a, c)| (a.clone(), self.unfold(*c, 6)));
        out.push('{');
        for (attr, child) in sorted {
            out.push_str(attr);
            out.push(':');
            self.render_key(*child, ids, out);
            out.push(',');
        }
        out.push('}');
    }

    fn unfold(&self, id: usize, depth: usize) -> String {
        match &self.nodes[id] {
            FNode::Const(c) => c.clone(),
            FNode::Checked(c) => format!("=c {c}"),
            FNode::Complex(_) if depth == 0 => "…".into(),
            FNode::Complex(entries) => {
                let mut parts: Vec<String> = entries
                    .iter()
                    .map(|(a, c)| format!("{a}:{}", self.unfold(*c, depth - 1)))
                    .collect();
                parts.sort();
                format!("[{}]", parts.join(","))
            }
        }
    }

    /// Number of complex nodes.
    pub fn complex_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, FNode::Complex(_)))
            .count()
    }

    pub(crate) fn from_parts(nodes: Vec<FNode>, bindings: BTreeMap<String, usize>) -> Self {
        FStructure { nodes, bindings }
    }
}

impl fmt::Display for FStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(
            s: &FStructure,
            id: usize,
            path: &mut Vec<usize>,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            if path.contains(&id) {
                return f.write_str("<cycle>");
            }
            match &s.nodes[id] {
                FNode::Const(c) => f.write_str(c),
                FNode::Checked(c) => write!(f, "=c {c}"),
                FNode::Complex(entries) => {
                    path.push(id);
                    f.write_str("[")?;
                    for (i, (attr, child)) in entries.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{attr} ")?;
                        write_node(s, *child, path, f)?;
                    }
                    path.pop();
                    f.write_str("]")
                }
            }
        }
        match self.root() {
            Some(r) => write_node(self, r, &mut Vec::new(), f),
            None => f.write_str("[]"),
        }
    }
}

/// The functionality axiom or constant-constant clash was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Clash;

#[derive(Debug, Clone)]
pub(crate) enum Content {
    Unknown,
    Const(String),
    Checked(String),
    /// Entries keyed by (attribute, label). Standard solving uses a single
    /// label so attributes are functional; relaxed solving uses one label
    /// per group of annotation sites.
    Complex(BTreeMap<(String, usize), usize>),
}

/// Union-find over f-structure elements.
#[derive(Debug, Clone, Default)]
pub(crate) struct Graph {
    parent: Vec<usize>,
    content: Vec<Content>,
    vars: BTreeMap<String, usize>,
}

impl Graph {
    fn add(&mut self, content: Content) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.content.push(content);
        id
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn var(&mut self, name: &str) -> usize {
        if let Some(&n) = self.vars.get(name) {
            return n;
        }
        let n = self.add(Content::Unknown);
        self.vars.insert(name.to_string(), n);
        n
    }

    pub(crate) fn content(&mut self, x: usize) -> &mut Content {
        let r = self.find(x);
        &mut self.content[r]
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> Result<(), Clash> {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let ca = std::mem::replace(&mut self.content[ra], Content::Unknown);
            let cb = std::mem::replace(&mut self.content[rb], Content::Unknown);
            let merged = match (ca, cb) {
                (Content::Unknown, c) | (c, Content::Unknown) => c,
                (Content::Const(x), Content::Const(y)) if x == y => Content::Const(x),
                (Content::Complex(mut big), Content::Complex(mut small)) => {
                    if big.len() < small.len() {
                        std::mem::swap(&mut big, &mut small);
                    }
                    for (key, child) in small {
                        match big.get(&key) {
                            Some(&other) => pending.push((other, child)),
                            None => {
                                big.insert(key, child);
                            }
                        }
                    }
                    Content::Complex(big)
                }
                _ => return Err(Clash),
            };
            self.parent[rb] = ra;
            self.content[ra] = merged;
        }
        Ok(())
    }

    /// Follows one attribute entry, creating it when `create` is set.
    pub(crate) fn step(
        &mut self,
        node: usize,
        attr: &str,
        label: usize,
        create: bool,
    ) -> Result<Option<usize>, Clash> {
        let r = self.find(node);
        let key = (attr.to_string(), label);
        match &self.content[r] {
            Content::Complex(m) => {
                if let Some(&c) = m.get(&key) {
                    return Ok(Some(c));
                }
            }
            Content::Unknown => {}
            Content::Const(_) | Content::Checked(_) => {
                return if create { Err(Clash) } else { Ok(None) };
            }
        }
        if !create {
            return Ok(None);
        }
        let child = self.add(Content::Unknown);
        match &mut self.content[r] {
            Content::Complex(m) => {
                m.insert(key, child);
            }
            slot => *slot = Content::Complex(BTreeMap::from([(key, child)])),
        }
        Ok(Some(child))
    }

    pub(crate) fn resolve(
        &mut self,
        path: &PathExpr,
        label: usize,
        create: bool,
    ) -> Result<Option<usize>, Clash> {
        let mut cur = self.var(&path.var);
        for attr in &path.attrs {
            match self.step(cur, attr, label, create)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    pub(crate) fn add_defining(&mut self, eq: &Equation, label: usize) -> Result<(), Clash> {
        let lhs = self.resolve(&eq.lhs, label, true)?.expect("created");
        let rhs = match &eq.rhs {
            Value::Path(p) => self.resolve(p, label, true)?.expect("created"),
            Value::Const(c) => self.add(Content::Const(c.clone())),
        };
        self.union(lhs, rhs)
    }

    pub(crate) fn extract(&mut self) -> FStructure {
        let mut vars: Vec<(String, usize)> =
            self.vars.iter().map(|(k, v)| (k.clone(), *v)).collect();
        vars.sort_by(|a, b| var_order(&a.0, &b.0));
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut order: Vec<usize> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut bindings = BTreeMap::new();
        for (name, node) in vars {
            let r = self.find(node);
            let id = *ids.entry(r).or_insert_with(|| {
                order.push(r);
                stack.push(r);
                order.len() - 1
            });
            bindings.insert(name, id);
            while let Some(n) = stack.pop() {
                let children: Vec<usize> = match &self.content[n] {
                    Content::Complex(m) => m.values().copied().collect(),
                    _ => Vec::new(),
                };
                for c in children {
                    let rc = self.find(c);
                    if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(rc) {
                        e.insert(order.len());
                        order.push(rc);
                        stack.push(rc);
                    }
                }
            }
        }
        let mut nodes = Vec::with_capacity(order.len());
        for &r in &order {
            let node = match self.content[r].clone() {
                Content::Unknown => FNode::Complex(Vec::new()),
                Content::Const(c) => FNode::Const(c),
                Content::Checked(c) => FNode::Checked(c),
                Content::Complex(m) => {
                    let mut entries: Vec<(String, usize)> = m
                        .into_iter()
                        .map(|((attr, _), c)| {
                            let rc = self.find(c);
                            (attr, ids[&rc])
                        })
                        .collect();
                    entries.sort_by(|a, b| a.0.cmp(&b.0));
                    FNode::Complex(entries)
                }
            };
            nodes.push(node);
        }
        FStructure::from_parts(nodes, bindings)
    }
}

/// Minimal model of the defining equations of a conjunct; constraining
/// equations are ignored. `None` when the equations are inconsistent.
pub fn solve_conjunct(eqs: &[Equation]) -> Option<FStructure> {
    let mut g = Graph::default();
    for eq in eqs.iter().filter(|e| e.kind == EqKind::Defining) {
        g.add_defining(eq, 0).ok()?;
    }
    Some(g.extract())
}

/// Every constraining equation's path is defined in `model` and carries
/// the demanded value.
pub fn verify_constraints(model: &FStructure, eqs: &[Equation]) -> bool {
    eqs.iter()
        .filter(|e| e.kind == EqKind::Constraining)
        .all(|e| {
            let Some(node) = model.get(&e.lhs) else {
                return false;
            };
            match &e.rhs {
                Value::Const(c) => matches!(model.node(node), FNode::Const(v) if v == c),
                Value::Path(p) => model.get(p) == Some(node),
            }
        })
}

/// Solutions of a description: for each DNF conjunct, the minimal model of
/// its defining equations when it exists and satisfies the constraints.
pub fn solve(d: &FDescription) -> Vec<FStructure> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for conj in dnf(d) {
        if let Some(model) = solve_conjunct(&conj) {
            if verify_constraints(&model, &conj) && seen.insert(model.canonical_key()) {
                out.push(model);
            }
        }
    }
    out
}

/// True when there is a homomorphism from `general` into `specific` that
/// respects every variable binding of `general`.
pub fn subsumes(general: &FStructure, specific: &FStructure) -> bool {
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for (var, &g) in &general.bindings {
        match specific.bindings.get(var) {
            Some(&s) => pending.push((g, s)),
            None => return false,
        }
    }
    while let Some((g, s)) = pending.pop() {
        if let Some(&prev) = map.get(&g) {
            if prev != s {
                return false;
            }
            continue;
        }
        map.insert(g, s);
        match &general.nodes[g] {
            FNode::Const(c) => {
                if !matches!(&specific.nodes[s], FNode::Const(d) if d == c) {
                    return false;
                }
            }
            FNode::Checked(_) => {}
            FNode::Complex(entries) => {
                if entries.is_empty() {
                    continue;
                }
                if !matches!(specific.nodes[s], FNode::Complex(_)) {
                    return false;
                }
                for (attr, child) in entries {
                    match specific.entries(s, attr).first() {
                        Some(&sc) => pending.push((*child, sc)),
                        None => return false,
                    }
                }
            }
        }
    }
    true
}
