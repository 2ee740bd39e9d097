//! Forbidden-pattern descriptions: paths, subdivided claws, and forests of
//! those, with the `P<t>` / `S(<a>,<b>,<c>)` / `+` text syntax used on the
//! command line.

use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

/// One forest component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternComponent {
    /// Path on `t >= 1` vertices.
    Path(usize),
    /// Subdivided claw `S_{a,b,c}`: a tree with a single degree-3 vertex and
    /// leaves at distances `a, b, c >= 1` from it.
    SubdividedClaw(usize, usize, usize),
}

impl PatternComponent {
    pub fn vertex_count(&self) -> usize {
        match *self {
            PatternComponent::Path(t) => t,
            PatternComponent::SubdividedClaw(a, b, c) => a + b + c + 1,
        }
    }
}

impl fmt::Display for PatternComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PatternComponent::Path(t) => write!(f, "P{t}"),
            PatternComponent::SubdividedClaw(a, b, c) => write!(f, "S({a},{b},{c})"),
        }
    }
}

/// A forest of paths and subdivided claws (the class `S`). A single path or
/// claw is a one-component forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    components: Vec<PatternComponent>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternParseError {
    #[error("empty pattern")]
    Empty,
    #[error("bad pattern component `{0}`")]
    BadComponent(String),
    #[error("pattern parameters must be >= 1 in `{0}`")]
    BadParameter(String),
}

impl PatternGraph {
    pub fn path(t: usize) -> Self {
        assert!(t >= 1, "path needs t >= 1");
        PatternGraph {
            components: vec![PatternComponent::Path(t)],
        }
    }

    pub fn subdivided_claw(a: usize, b: usize, c: usize) -> Self {
        assert!(a >= 1 && b >= 1 && c >= 1, "claw arms need a,b,c >= 1");
        PatternGraph {
            components: vec![PatternComponent::SubdividedClaw(a, b, c)],
        }
    }

    pub fn forest(components: Vec<PatternComponent>) -> Self {
        assert!(!components.is_empty(), "forest needs at least one component");
        for c in &components {
            match *c {
                PatternComponent::Path(t) => assert!(t >= 1),
                PatternComponent::SubdividedClaw(a, b, c) => assert!(a >= 1 && b >= 1 && c >= 1),
            }
        }
        PatternGraph { components }
    }

    pub fn components(&self) -> &[PatternComponent] {
        &self.components
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(|c| c.vertex_count()).sum()
    }

    /// Components reordered by vertex count descending (stable).
    pub fn sorted_desc(&self) -> PatternGraph {
        let mut components = self.components.clone();
        components.sort_by(|a, b| b.vertex_count().cmp(&a.vertex_count()));
        PatternGraph { components }
    }

    /// Materializes the pattern. Component vertices are laid out in order;
    /// a path runs `0 - 1 - ...`, a claw places its central vertex first and
    /// then each arm from the center outward.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.vertex_count());
        let mut base = 0;
        for comp in &self.components {
            match *comp {
                PatternComponent::Path(t) => {
                    for i in 1..t {
                        g.add_edge(base + i - 1, base + i);
                    }
                    base += t;
                }
                PatternComponent::SubdividedClaw(a, b, c) => {
                    let center = base;
                    let mut next = base + 1;
                    for arm in [a, b, c] {
                        let mut prev = center;
                        for _ in 0..arm {
                            g.add_edge(prev, next);
                            prev = next;
                            next += 1;
                        }
                    }
                    base = next;
                }
            }
        }
        g
    }

    /// Parses `P<t>`, `S(<a>,<b>,<c>)`, and `+`-joined forests thereof.
    pub fn parse(s: &str) -> Result<Self, PatternParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PatternParseError::Empty);
        }
        let mut components = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if let Some(t) = part.strip_prefix('P') {
                let t: usize = t
                    .parse()
                    .map_err(|_| PatternParseError::BadComponent(part.to_string()))?;
                if t < 1 {
                    return Err(PatternParseError::BadParameter(part.to_string()));
                }
                components.push(PatternComponent::Path(t));
            } else if let Some(rest) = part.strip_prefix('S') {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| PatternParseError::BadComponent(part.to_string()))?;
                let nums: Vec<&str> = inner.split(',').map(str::trim).collect();
                if nums.len() != 3 {
                    return Err(PatternParseError::BadComponent(part.to_string()));
                }
                let mut vals = [0usize; 3];
                for (i, n) in nums.iter().enumerate() {
                    vals[i] = n
                        .parse()
                        .map_err(|_| PatternParseError::BadComponent(part.to_string()))?;
                    if vals[i] < 1 {
                        return Err(PatternParseError::BadParameter(part.to_string()));
                    }
                }
                components.push(PatternComponent::SubdividedClaw(vals[0], vals[1], vals[2]));
            } else {
                return Err(PatternParseError::BadComponent(part.to_string()));
            }
        }
        Ok(PatternGraph { components })
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claw_has_one_degree_three_vertex() {
        let g = PatternGraph::subdivided_claw(2, 3, 1).to_graph();
        assert_eq!(g.n(), 7);
        let deg3: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 3).collect();
        assert_eq!(deg3, vec![0]);
        let leaves: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 1).collect();
        assert_eq!(leaves.len(), 3);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["P4", "S(2,2,2)", "S(1,2,3)+P5+P1"] {
            let p = PatternGraph::parse(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(PatternGraph::parse("").is_err());
        assert!(PatternGraph::parse("Q3").is_err());
        assert!(PatternGraph::parse("S(1,2)").is_err());
        assert!(PatternGraph::parse("S(0,1,1)").is_err());
        assert!(PatternGraph::parse("P0").is_err());
    }

    #[test]
    fn sorted_desc_orders_by_size() {
        let p = PatternGraph::parse("P2+S(2,2,2)+P4").unwrap();
        let s = p.sorted_desc();
        let sizes: Vec<usize> = s.components().iter().map(|c| c.vertex_count()).collect();
        assert_eq!(sizes, vec![7, 4, 2]);
    }

    #[test]
    fn forest_graph_is_disjoint_union() {
        let g = PatternGraph::parse("P3+P3").unwrap().to_graph();
        assert_eq!(g.n(), 6);
        assert_eq!(g.connected_components().len(), 2);
    }
}
