//! The expandable planning tree over future states.
//!
//! Planning grows a tree of belief states reachable from the current root.
//! One planning iteration is select / expand / backpropagate:
//!
//! * selection walks down from the root, at each step picking the child with
//!   the highest UCT score `-Ḡ_j + c_explore sqrt(ln n / n_j)`, until it
//!   reaches a leaf;
//! * expansion creates one child per action, with beliefs predicted through
//!   the transition model and a cost given by the expected free energy of
//!   those beliefs;
//! * backpropagation adds the cheapest new child's cost to the expanded node
//!   and every ancestor, and increments their visit counts.
//!
//! There are no rollouts: a node's quality is its expected free energy, the
//! divergence of its predicted observations from the preferred ones plus the
//! expected observation entropy.
//!
//! Nodes live in an arena owned by [`Tree`] and are addressed by [`NodeId`],
//! so the whole tree is dropped in one go when the next cycle replaces it.

use std::fmt::Write as _;

use crate::categorical::{kl_divergence, Categorical, LikelihoodMatrix, TransitionTensor};
use crate::error::{Error, Result};

/// Knobs of the planning loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// UCT exploration constant; larger values favor under-visited children.
    pub exploration_constant: f64,
    /// Number of select/expand/backpropagate iterations per cycle.
    pub planning_iterations: usize,
}

/// Index of a node in its [`Tree`]'s arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One node of the planning tree: beliefs over the state reached by the
/// action path from the root, plus the search statistics UCT needs.
#[derive(Debug, Clone)]
pub struct TreeNode {
    beliefs: Categorical,
    action: Option<usize>,
    cost_aggregate: f64,
    visits: u64,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

impl TreeNode {
    /// Beliefs over the hidden state at this node.
    pub fn beliefs(&self) -> &Categorical {
        &self.beliefs
    }

    /// The action that led here; `None` for a root created from perception.
    pub fn action(&self) -> Option<usize> {
        self.action
    }

    /// Running sum of backpropagated best-child costs, in nats.
    pub fn cost_aggregate(&self) -> f64 {
        self.cost_aggregate
    }

    /// Visit count; at least 1 from creation onward.
    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    /// Children ordered by action index; empty until expanded.
    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Average cost `Ḡ = cost_aggregate / visits`.
    pub fn average_cost(&self) -> f64 {
        self.cost_aggregate / self.visits as f64
    }
}

/// UCT selection score of a child: `-avg_cost + c sqrt(ln(parent)/child)`.
///
/// Cost is negated because lower expected free energy is better while UCT
/// maximizes. Strictly decreasing in `avg_cost`, and in `child_visits`
/// whenever `parent_visits >= 2` and `c_explore > 0`.
pub fn uct_score(avg_cost: f64, parent_visits: u64, child_visits: u64, c_explore: f64) -> f64 {
    debug_assert!(parent_visits >= 1 && child_visits >= 1);
    -avg_cost + c_explore * ((parent_visits as f64).ln() / child_visits as f64).sqrt()
}

/// Expected free energy of holding `beliefs`: risk plus ambiguity.
///
/// Risk is the KL divergence from the predicted observation distribution to
/// the preferred one; ambiguity is the expected entropy of the observation
/// model under the beliefs. Fails with [`Error::InfiniteDivergence`] when the
/// preferences assign zero mass to a reachable observation.
pub fn expected_free_energy(
    beliefs: &Categorical,
    likelihood: &LikelihoodMatrix,
    preferences: &Categorical,
) -> Result<f64> {
    let predicted = likelihood.predict_observation(beliefs);
    let risk = kl_divergence(&predicted, preferences)?;
    Ok(risk + likelihood.ambiguity(beliefs))
}

/// The planning tree for one action-perception cycle.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Creates a tree holding only a root with the given beliefs. The root
    /// starts with zero aggregated cost and one visit.
    pub fn new(beliefs: Categorical, action: Option<usize>) -> Self {
        Self {
            nodes: vec![TreeNode {
                beliefs,
                action,
                cost_aggregate: 0.0,
                visits: 1,
                parent: None,
                children: Vec::new(),
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    /// Descends from the root, moving to the child with the highest UCT
    /// score at every step, and returns the first leaf reached. Ties go to
    /// the lowest action index.
    pub fn select(&self, exploration_constant: f64) -> NodeId {
        let mut current = self.root();
        loop {
            let node = &self.nodes[current.0];
            if node.children.is_empty() {
                return current;
            }
            let parent_visits = node.visits;
            let mut best = node.children[0];
            let mut best_score = self.child_uct(best, parent_visits, exploration_constant);
            for &child in &node.children[1..] {
                let score = self.child_uct(child, parent_visits, exploration_constant);
                if score > best_score {
                    best = child;
                    best_score = score;
                }
            }
            current = best;
        }
    }

    fn child_uct(&self, child: NodeId, parent_visits: u64, exploration_constant: f64) -> f64 {
        let node = &self.nodes[child.0];
        uct_score(
            node.average_cost(),
            parent_visits,
            node.visits,
            exploration_constant,
        )
    }

    /// Expands a leaf: creates one child per action, with beliefs predicted
    /// through `transitions` and an aggregated cost initialized to the
    /// child's expected free energy (so its average cost is defined from the
    /// first visit).
    ///
    /// Panics when called on a node that already has children.
    pub fn expand(
        &mut self,
        id: NodeId,
        transitions: &TransitionTensor,
        likelihood: &LikelihoodMatrix,
        preferences: &Categorical,
    ) -> Result<()> {
        assert!(
            self.nodes[id.0].children.is_empty(),
            "expand called on an already-expanded node"
        );
        let n_actions = transitions.n_actions();
        // evaluate everything before touching the arena, so a failed
        // evaluation leaves the tree unchanged
        let mut prepared = Vec::with_capacity(n_actions);
        for action in 0..n_actions {
            let beliefs = transitions.predict_state(action, &self.nodes[id.0].beliefs);
            let cost = expected_free_energy(&beliefs, likelihood, preferences)?;
            prepared.push((beliefs, cost));
        }
        let mut children = Vec::with_capacity(n_actions);
        for (action, (beliefs, cost)) in prepared.into_iter().enumerate() {
            children.push(NodeId(self.nodes.len()));
            self.nodes.push(TreeNode {
                beliefs,
                action: Some(action),
                cost_aggregate: cost,
                visits: 1,
                parent: Some(id),
                children: Vec::new(),
            });
        }
        self.nodes[id.0].children = children;
        Ok(())
    }

    /// Propagates the cheapest fresh child's cost from a just-expanded node
    /// up to the root: the expanded node and every ancestor gain the minimum
    /// child cost and one visit. The children themselves are left untouched.
    pub fn backpropagate(&mut self, expanded: NodeId) {
        let node = &self.nodes[expanded.0];
        assert!(
            !node.children.is_empty(),
            "backpropagate needs an expanded node"
        );
        let best_child_cost = node
            .children
            .iter()
            .map(|c| self.nodes[c.0].cost_aggregate)
            .fold(f64::INFINITY, f64::min);
        let mut current = Some(expanded);
        while let Some(id) = current {
            let node = &mut self.nodes[id.0];
            node.cost_aggregate += best_child_cost;
            node.visits += 1;
            current = node.parent;
        }
    }

    /// The action of the root child with the lowest average cost, ties going
    /// to the lowest action index. Fails when planning never expanded the
    /// root.
    pub fn best_action(&self) -> Result<usize> {
        let root = &self.nodes[0];
        let mut best: Option<(usize, f64)> = None;
        for &child in &root.children {
            let node = &self.nodes[child.0];
            let avg = node.average_cost();
            let action = node.action.expect("non-root nodes record their action");
            if best.is_none_or(|(_, best_avg)| avg < best_avg) {
                best = Some((action, avg));
            }
        }
        best.map(|(action, _)| action)
            .ok_or(Error::PlanningNeverRan)
    }

    /// Renders the tree as DOT graph text, one node per tree node with the
    /// label `a=<action> n=<visits> Ḡ=<average cost>`. The root's missing
    /// action is rendered as -1.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph planning_tree {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let action = node.action.map_or(-1, |a| a as i64);
            writeln!(
                out,
                "  n{i} [label=\"a={action} n={} Ḡ={:.4}\"];",
                node.visits,
                node.average_cost()
            )
            .expect("writing to a string cannot fail");
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for child in &node.children {
                writeln!(out, "  n{i} -> n{};", child.0).expect("writing to a string cannot fail");
            }
        }
        out.push_str("}\n");
        out
    }
}
