//! Bottom-up chart parsing over rules with their optional elements
//! compiled away.

use std::collections::BTreeMap;

use super::{CStructure, Child, Grammar, GrammarError, NodeKind};

/// A rule with a fixed choice of which optional elements are present.
struct Variant {
    rule: usize,
    elements: Vec<usize>,
}

fn variants(g: &Grammar) -> Vec<Variant> {
    let mut out = Vec::new();
    for (r, rule) in g.rules.iter().enumerate() {
        let optional: Vec<usize> = (0..rule.rhs.len())
            .filter(|&i| rule.rhs[i].optional)
            .collect();
        for mask in 0u64..(1 << optional.len()) {
            let elements: Vec<usize> = (0..rule.rhs.len())
                .filter(|i| match optional.iter().position(|o| o == i) {
                    Some(bit) => mask & (1 << bit) != 0,
                    None => true,
                })
                .collect();
            if !elements.is_empty() {
                out.push(Variant { rule: r, elements });
            }
        }
    }
    out
}

type Cell = BTreeMap<String, Vec<CStructure>>;

struct Chart<'g> {
    g: &'g Grammar,
    /// `cells[i][len]` covers tokens `i .. i + len`.
    cells: Vec<Vec<Cell>>,
}

impl Chart<'_> {
    fn build(&self, v: &Variant, children: Vec<CStructure>) -> CStructure {
        let rule = &self.g.rules[v.rule];
        CStructure {
            category: rule.lhs.clone(),
            kind: NodeKind::Internal {
                rule: v.rule,
                children: v
                    .elements
                    .iter()
                    .zip(children)
                    .map(|(&e, node)| Child {
                        annotation: rule.rhs[e].annotation.clone(),
                        node,
                    })
                    .collect(),
            },
        }
    }

    /// All ways to cover `from .. end` with the categories `cats`, each
    /// daughter taking at least one token.
    fn sequences(&self, cats: &[&str], from: usize, end: usize) -> Vec<Vec<CStructure>> {
        let Some((first, rest)) = cats.split_first() else {
            return if from == end {
                vec![Vec::new()]
            } else {
                Vec::new()
            };
        };
        let mut out = Vec::new();
        let max_len = end - from - rest.len();
        for len in 1..=max_len {
            let Some(trees) = self.cells[from][len].get(*first) else {
                continue;
            };
            let tails = self.sequences(rest, from + len, end);
            for t in trees {
                for tail in &tails {
                    let mut seq = Vec::with_capacity(cats.len());
                    seq.push(t.clone());
                    seq.extend(tail.iter().cloned());
                    out.push(seq);
                }
            }
        }
        out
    }

    fn add(cell: &mut Cell, tree: CStructure) -> bool {
        let slot = cell.entry(tree.category.clone()).or_default();
        if slot.contains(&tree) {
            return false;
        }
        slot.push(tree);
        true
    }

    fn fill(&mut self, i: usize, len: usize, variants: &[Variant]) {
        let mut cell = std::mem::take(&mut self.cells[i][len]);
        for v in variants
            .iter()
            .filter(|v| v.elements.len() >= 2 && v.elements.len() <= len)
        {
            let rule = &self.g.rules[v.rule];
            let cats: Vec<&str> = v
                .elements
                .iter()
                .map(|&e| rule.rhs[e].category.as_str())
                .collect();
            for seq in self.sequences(&cats, i, i + len) {
                Self::add(&mut cell, self.build(v, seq));
            }
        }
        // unary closure; a category may not repeat along a unary spine
        loop {
            let mut grown = false;
            for v in variants.iter().filter(|v| v.elements.len() == 1) {
                let rule = &self.g.rules[v.rule];
                let daughter = &rule.rhs[v.elements[0]].category;
                let Some(trees) = cell.get(daughter).cloned() else {
                    continue;
                };
                for t in trees {
                    if t.unary_spine().contains(&rule.lhs.as_str()) {
                        continue;
                    }
                    grown |= Self::add(&mut cell, self.build(v, vec![t]));
                }
            }
            if !grown {
                break;
            }
        }
        self.cells[i][len] = cell;
    }
}

/// Every c-structure of the start category whose yield is `tokens`.
pub fn parse_sentence(g: &Grammar, tokens: &[&str]) -> Result<Vec<CStructure>, GrammarError> {
    if tokens.is_empty() {
        return Err(GrammarError::EmptySentence);
    }
    let n = tokens.len();
    let mut chart = Chart {
        g,
        cells: (0..n).map(|i| vec![Cell::new(); n - i + 1]).collect(),
    };
    for (i, tok) in tokens.iter().enumerate() {
        let entries = g
            .lexicon
            .get(*tok)
            .ok_or_else(|| GrammarError::UnknownWord(tok.to_string()))?;
        for e in entries {
            Chart::add(
                &mut chart.cells[i][1],
                CStructure {
                    category: e.category.clone(),
                    kind: NodeKind::Leaf {
                        word: e.word.clone(),
                        payload: e.payload.clone(),
                    },
                },
            );
        }
    }
    let vs = variants(g);
    for len in 1..=n {
        for i in 0..=n - len {
            chart.fill(i, len, &vs);
        }
    }
    Ok(chart.cells[0][n].remove(&g.start).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::super::load_grammar;
    use super::*;

    fn grammar(rules: &str) -> Grammar {
        load_grammar(&format!(
            "mode rlfg\nstart S\ntype t contentful\ntype e contentful\nattr OBJ XCOMP\ncat S NP VP V\n{rules}\
             lex a NP {{e}}\nlex b V {{e -o t}}\nlex c V {{t -o t}}\n"
        ))
        .unwrap()
    }

    #[test]
    fn optional_elements_expand() {
        let g = grammar("S -> NP VP\nVP -> V [ NP:{OBJ v} ] [ VP:{XCOMP v} ]\n");
        let trees = g.parse(&["a", "b", "a"]).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "(S (NP a) (VP (V b) (NP a)))");
        let trees = g.parse(&["a", "c", "b"]).unwrap();
        assert_eq!(trees[0].to_string(), "(S (NP a) (VP (V c) (VP (V b))))");
        assert!(g.parse(&["a"]).unwrap().is_empty());
    }

    #[test]
    fn unary_cycles_terminate() {
        let g = grammar("S -> VP\nVP -> S\nVP -> V\n");
        let trees = g.parse(&["b"]).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "(S (VP (V b)))");
    }

    #[test]
    fn ambiguity_is_enumerated_in_order() {
        let g = grammar("S -> NP VP\nVP -> V [ VP:{XCOMP v} ]\nVP -> VP VP\n");
        let trees = g.parse(&["a", "c", "c", "b"]).unwrap();
        let shown: Vec<String> = trees.iter().map(ToString::to_string).collect();
        assert!(shown.len() >= 2, "{shown:?}");
        let again: Vec<String> = g
            .parse(&["a", "c", "c", "b"])
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(shown, again);
        for t in &trees {
            assert_eq!(t.leaves(), ["a", "c", "c", "b"]);
        }
    }

    #[test]
    fn unknown_words_are_named() {
        let g = grammar("S -> NP VP\nVP -> V\n");
        assert_eq!(
            g.parse(&["a", "zz"]).unwrap_err(),
            GrammarError::UnknownWord("zz".into())
        );
        assert_eq!(g.parse(&[]).unwrap_err(), GrammarError::EmptySentence);
    }
}
