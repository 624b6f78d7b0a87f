//! Anytime RRT* over the lifted `(x, y, psi)` space.
//!
//! Each iteration samples a free configuration, steers a Dubins edge toward
//! it from the nearest tree node, collision-checks that edge against the
//! engagement-zone obstacles and the domain, picks the cheapest parent among
//! the neighbors, and rewires the neighborhood through the new node. Edge
//! cost is transit time. The best solution found so far is kept and only
//! ever improves.

mod index;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap_pi;
use crate::dubins::{shortest_path, Configuration, DubinsPath};
use crate::geometry::{config_free, segment_free, Domain, EngagementZone};
use crate::scenario::Scenario;

use index::GridIndex;

/// Draws allowed before [`sample_free`] gives up.
pub const SAMPLE_REJECTION_CAP: u64 = 1_000_000;

// Reparenting must beat the current cost by more than this, so rounding in
// propagated costs never triggers churn.
const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start configuration {0} is not collision-free")]
    StartInCollision(Configuration),
    #[error("goal configuration {0} is not collision-free")]
    GoalInCollision(Configuration),
    #[error("invalid planner parameter: {0}")]
    InvalidParams(String),
    #[error("no free configuration found in {0} draws")]
    NoFreeSpace(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalTolerance {
    /// LU
    pub position: f64,
    /// rad
    pub heading: f64,
}

impl Default for GoalTolerance {
    fn default() -> Self {
        Self {
            position: 0.01,
            heading: 0.05,
        }
    }
}

impl GoalTolerance {
    pub fn accepts(&self, q: &Configuration, goal: &Configuration) -> bool {
        q.planar_distance(goal) <= self.position && wrap_pi(q.psi - goal.psi).abs() <= self.heading
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// Arc length of one steering hop (LU).
    pub steer_step: f64,
    pub goal_tolerance: GoalTolerance,
    /// Probability of sampling the goal itself.
    pub goal_bias: f64,
    /// Scale of the shrinking neighborhood radius.
    pub near_radius_gamma: f64,
    pub max_iterations: u64,
    /// Wall-clock budget in seconds. When set, progress is reported in
    /// seconds instead of iterations.
    pub time_budget: Option<f64>,
    /// Collision sampling spacing along edges (LU).
    pub check_step: f64,
    /// Converts heading differences to length in the lifted metric (LU/rad).
    pub heading_weight: f64,
    pub rng_seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            steer_step: 0.2,
            goal_tolerance: GoalTolerance::default(),
            goal_bias: 0.05,
            near_radius_gamma: 1.0,
            max_iterations: 10_000,
            time_budget: None,
            check_step: 0.005,
            heading_weight: 0.1,
            rng_seed: 0,
        }
    }
}

impl PlannerParams {
    /// Defaults with the heading weight set to the vehicle's turn radius.
    pub fn for_turn_radius(turn_radius: f64) -> Self {
        Self {
            heading_weight: turn_radius,
            ..Self::default()
        }
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Neighborhood radius cap.
    pub fn near_radius_cap(&self) -> f64 {
        2.0 * self.steer_step
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let positive = [
            ("steer_step", self.steer_step),
            ("goal_tolerance.position", self.goal_tolerance.position),
            ("goal_tolerance.heading", self.goal_tolerance.heading),
            ("near_radius_gamma", self.near_radius_gamma),
            ("check_step", self.check_step),
            ("heading_weight", self.heading_weight),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PlanError::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.goal_bias) {
            return Err(PlanError::InvalidParams(format!(
                "goal_bias must be in [0, 1), got {}",
                self.goal_bias
            )));
        }
        if let Some(t) = self.time_budget {
            if !(t > 0.0) {
                return Err(PlanError::InvalidParams(format!("time_budget must be positive, got {t}")));
            }
        }
        if self.max_iterations == 0 && self.time_budget.is_none() {
            return Err(PlanError::InvalidParams("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Solved,
    InfeasibleBudgetExhausted,
}

/// Unit of the `time` coordinates in a [`PlanResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Iterations,
    Seconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstSolution {
    pub time: f64,
    pub iteration: u64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub schema: u32,
    pub status: PlanStatus,
    /// Transit time of the best path (TU).
    pub cost: Option<f64>,
    pub iterations: u64,
    pub nodes: usize,
    pub time_unit: TimeUnit,
    pub first_solution: Option<FirstSolution>,
    /// `(time, cost)` each time the best cost dropped.
    pub cost_history: Vec<(f64, f64)>,
    /// Root-to-goal edges.
    pub edges: Vec<DubinsPath>,
}

impl PlanResult {
    pub fn is_solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }

    pub fn path_length(&self) -> f64 {
        self.edges.iter().map(|e| e.total_length).sum()
    }
}

/// Lifted distance `sqrt(dx^2 + dy^2 + (w * wrap(dpsi))^2)`.
#[inline]
pub fn lifted_distance(a: &Configuration, b: &Configuration, heading_weight: f64) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dpsi = heading_weight * wrap_pi(a.psi - b.psi);
    (dx * dx + dy * dy + dpsi * dpsi).sqrt()
}

#[derive(Debug, Clone)]
pub struct Node {
    pub parent: Option<usize>,
    /// Edge from the parent; `None` for the root.
    pub edge: Option<DubinsPath>,
    /// Transit time from the root (TU).
    pub cost: f64,
    children: Vec<usize>,
}

/// The search tree. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct Tree {
    configs: Vec<Configuration>,
    nodes: Vec<Node>,
    index: GridIndex,
    speed: f64,
}

impl Tree {
    pub fn new(root: Configuration, domain: &Domain, speed: f64) -> Self {
        let mut index = GridIndex::new(domain);
        index.insert(0, &root);
        Self {
            configs: vec![root],
            nodes: vec![Node {
                parent: None,
                edge: None,
                cost: 0.0,
                children: Vec::new(),
            }],
            index,
            speed,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn config(&self, i: usize) -> &Configuration {
        &self.configs[i]
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.nodes[i].cost
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Insert `config` as a child of `parent` along `edge`.
    pub fn add(&mut self, config: Configuration, parent: usize, edge: DubinsPath) -> usize {
        let idx = self.nodes.len();
        let cost = self.nodes[parent].cost + edge.duration(self.speed);
        self.nodes.push(Node {
            parent: Some(parent),
            edge: Some(edge),
            cost,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(idx);
        self.configs.push(config);
        self.index.insert(idx, &config);
        idx
    }

    /// Whether `ancestor` lies on the root path of `node` (inclusive).
    pub fn is_ancestor(&self, ancestor: usize, node: usize) -> bool {
        let mut cur = Some(node);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Move `child` under `new_parent` and refresh costs in its subtree.
    pub fn reparent(&mut self, child: usize, new_parent: usize, edge: DubinsPath) {
        debug_assert!(!self.is_ancestor(child, new_parent), "reparenting would create a cycle");
        if let Some(old) = self.nodes[child].parent {
            self.nodes[old].children.retain(|&c| c != child);
        }
        self.nodes[new_parent].children.push(child);
        self.nodes[child].parent = Some(new_parent);
        self.nodes[child].edge = Some(edge);
        let mut stack = vec![child];
        while let Some(n) = stack.pop() {
            let parent = self.nodes[n].parent.expect("non-root");
            let dur = self.nodes[n].edge.as_ref().expect("non-root edge").duration(self.speed);
            self.nodes[n].cost = self.nodes[parent].cost + dur;
            stack.extend(self.nodes[n].children.iter().copied());
        }
    }

    /// Edges from the root to node `i`.
    pub fn path_to(&self, i: usize) -> Vec<DubinsPath> {
        let mut edges = Vec::new();
        let mut cur = i;
        while let Some(p) = self.nodes[cur].parent {
            edges.push(self.nodes[cur].edge.expect("non-root edge"));
            cur = p;
        }
        edges.reverse();
        edges
    }

    /// Check the structural invariants: single root, acyclic parent links,
    /// consistent children lists, cost recursion, and (when `zones` is given)
    /// collision-free edges.
    pub fn audit(&self, obstacles: Option<(&[EngagementZone], &Domain, f64)>) -> Result<(), String> {
        if self.nodes[0].parent.is_some() || self.nodes[0].cost != 0.0 {
            return Err("root must have no parent and zero cost".into());
        }
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            let parent = node.parent.ok_or_else(|| format!("node {i} has no parent"))?;
            if !self.nodes[parent].children.contains(&i) {
                return Err(format!("node {i} missing from children of {parent}"));
            }
            let edge = node.edge.ok_or_else(|| format!("node {i} has no edge"))?;
            let expected = self.nodes[parent].cost + edge.duration(self.speed);
            if (node.cost - expected).abs() > 1e-9 {
                return Err(format!("node {i}: cost {} but parent recursion gives {expected}", node.cost));
            }
            if edge.start.planar_distance(&self.configs[parent]) > 1e-9 {
                return Err(format!("node {i}: edge does not start at its parent"));
            }
            let end = edge.endpoint();
            if end.planar_distance(&self.configs[i]) > 1e-9 || wrap_pi(end.psi - self.configs[i].psi).abs() > 1e-9 {
                return Err(format!("node {i}: edge does not end at the node"));
            }
            if let Some((zones, domain, step)) = obstacles {
                if !segment_free(&edge, zones, domain, step) {
                    return Err(format!("node {i}: edge is in collision"));
                }
            }
            // walk to the root; more than len steps means a cycle
            let mut cur = i;
            let mut steps = 0;
            while let Some(p) = self.nodes[cur].parent {
                cur = p;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(format!("cycle through node {i}"));
                }
            }
        }
        Ok(())
    }
}

/// Obstacle context shared by the planner's subroutines.
#[derive(Debug, Clone, Copy)]
pub struct Obstacles<'a> {
    pub zones: &'a [EngagementZone],
    pub domain: &'a Domain,
    pub check_step: f64,
}

impl Obstacles<'_> {
    pub fn edge_free(&self, edge: &DubinsPath) -> bool {
        segment_free(edge, self.zones, self.domain, self.check_step)
    }
}

/// Uniform draw over `domain x [0, 2pi)` rejected until collision-free.
pub fn sample_free<R: Rng>(zones: &[EngagementZone], domain: &Domain, rng: &mut R) -> Result<Configuration, PlanError> {
    for _ in 0..SAMPLE_REJECTION_CAP {
        let q = Configuration::new(
            rng.random_range(domain.xmin..=domain.xmax),
            rng.random_range(domain.ymin..=domain.ymax),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        if config_free(&q, zones, domain) {
            return Ok(q);
        }
    }
    Err(PlanError::NoFreeSpace(SAMPLE_REJECTION_CAP))
}

/// Node closest to `q` in the lifted metric; ties go to the lowest index.
pub fn nearest(tree: &Tree, q: &Configuration, heading_weight: f64) -> usize {
    tree.index.nearest(&tree.configs, q, heading_weight)
}

/// Dubins path toward `to`, cut off after `steer_step` of arc length.
pub fn steer(from: Configuration, to: Configuration, turn_radius: f64, steer_step: f64) -> (Configuration, DubinsPath) {
    cut(shortest_path(from, to, turn_radius), to, steer_step)
}

fn cut(full: DubinsPath, to: Configuration, steer_step: f64) -> (Configuration, DubinsPath) {
    if full.total_length <= steer_step {
        return (to, full);
    }
    let edge = full.truncated(steer_step);
    (edge.endpoint(), edge)
}

/// `min(gamma (ln n / n)^(1/3), cap)`.
pub fn near_radius(n: usize, gamma: f64, cap: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    (gamma * (n.ln() / n).cbrt()).min(cap)
}

/// Nodes within `radius` of `q`, plus `nearest_idx`, ascending.
pub fn near(tree: &Tree, q: &Configuration, heading_weight: f64, radius: f64, nearest_idx: usize) -> Vec<usize> {
    let mut set = tree.index.within(&tree.configs, q, heading_weight, radius);
    if let Err(pos) = set.binary_search(&nearest_idx) {
        set.insert(pos, nearest_idx);
    }
    set
}

/// Extension toward the goal: the goal's neighbors are tried in order of
/// Dubins distance to the goal (ties to the lowest index) and the first one
/// whose steered edge is collision-free is the source. Returns the source
/// and the new configuration.
pub fn goal_extension(
    tree: &Tree,
    goal: &Configuration,
    heading_weight: f64,
    radius: f64,
    turn_radius: f64,
    steer_step: f64,
    obstacles: &Obstacles<'_>,
) -> Option<(usize, Configuration)> {
    let nearest_idx = nearest(tree, goal, heading_weight);
    let mut sources: Vec<(DubinsPath, usize)> = near(tree, goal, heading_weight, radius, nearest_idx)
        .into_iter()
        .map(|i| (shortest_path(tree.configs[i], *goal, turn_radius), i))
        .collect();
    sources.sort_by(|a, b| a.0.total_length.total_cmp(&b.0.total_length).then(a.1.cmp(&b.1)));
    sources.into_iter().find_map(|(full, i)| {
        let (q_new, edge) = cut(full, *goal, steer_step);
        obstacles.edge_free(&edge).then_some((i, q_new))
    })
}

/// Cheapest collision-free parent for `q_new` among `candidates`. Ties go to
/// the lowest index. Exact costs are computed lazily in order of the planar
/// lower bound, and only the current minimum is collision-checked.
pub fn opt_parent(
    tree: &Tree,
    candidates: &[usize],
    q_new: &Configuration,
    turn_radius: f64,
    obstacles: &Obstacles<'_>,
) -> Option<(usize, DubinsPath)> {
    let mut bounds: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&c| (tree.cost(c) + tree.configs[c].planar_distance(q_new) / tree.speed, c))
        .collect();
    bounds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut bounds = bounds.into_iter().peekable();
    // exact (cost, index, edge) entries not yet collision-checked
    let mut open: Vec<(f64, usize, DubinsPath)> = Vec::new();
    let key = |e: &(f64, usize, DubinsPath)| (e.0, e.1);
    loop {
        let frontier = open
            .iter()
            .map(key)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // refine while some lower bound could still beat or tie the frontier
        let refine = match (bounds.peek(), frontier) {
            (Some(&(lb, _)), Some((best, _))) => lb <= best + IMPROVEMENT_EPS,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if refine {
            let (_, c) = bounds.next().expect("peeked");
            let edge = shortest_path(tree.configs[c], *q_new, turn_radius);
            open.push((tree.cost(c) + edge.duration(tree.speed), c, edge));
            continue;
        }
        let (best, idx) = frontier?;
        let pos = open.iter().position(|e| key(e) == (best, idx)).expect("entry present");
        let (_, c, edge) = open.swap_remove(pos);
        if obstacles.edge_free(&edge) {
            return Some((c, edge));
        }
    }
}

/// Reparent members of `near_set` through `new_idx` wherever that strictly
/// lowers their cost. Returns how many nodes were rewired.
pub fn rewire(tree: &mut Tree, near_set: &[usize], new_idx: usize, turn_radius: f64, obstacles: &Obstacles<'_>) -> usize {
    let q_new = tree.configs[new_idx];
    let mut rewired = 0;
    for &q in near_set {
        if q == new_idx || tree.nodes[new_idx].parent == Some(q) {
            continue;
        }
        let bound = tree.cost(new_idx) + q_new.planar_distance(&tree.configs[q]) / tree.speed;
        if bound >= tree.cost(q) {
            continue;
        }
        let edge = shortest_path(q_new, tree.configs[q], turn_radius);
        let candidate = tree.cost(new_idx) + edge.duration(tree.speed);
        if candidate < tree.cost(q) - IMPROVEMENT_EPS
            && !tree.is_ancestor(q, new_idx)
            && obstacles.edge_free(&edge)
        {
            tree.reparent(q, new_idx, edge);
            rewired += 1;
        }
    }
    rewired
}

/// Stepwise planner state. [`plan`] drives it to completion; callers that
/// need intermediate snapshots (nested budgets) step it themselves.
pub struct Planner<'a> {
    scenario: &'a Scenario,
    params: PlannerParams,
    turn_radius: f64,
    tree: Tree,
    rng: ChaCha8Rng,
    goal_nodes: Vec<usize>,
    best: Option<(usize, f64)>,
    iterations: u64,
    first_solution: Option<FirstSolution>,
    history: Vec<(f64, f64)>,
    started: Instant,
}

impl<'a> Planner<'a> {
    pub fn new(scenario: &'a Scenario, params: PlannerParams) -> Result<Self, PlanError> {
        params.validate()?;
        if !config_free(&scenario.start, &scenario.zones, &scenario.domain) {
            return Err(PlanError::StartInCollision(scenario.start));
        }
        if !config_free(&scenario.goal, &scenario.zones, &scenario.domain) {
            return Err(PlanError::GoalInCollision(scenario.goal));
        }
        let mut planner = Self {
            scenario,
            params,
            turn_radius: scenario.vehicle.turn_radius(),
            tree: Tree::new(scenario.start, &scenario.domain, scenario.vehicle.v),
            rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
            goal_nodes: Vec::new(),
            best: None,
            iterations: 0,
            first_solution: None,
            history: Vec::new(),
            started: Instant::now(),
        };
        if params.goal_tolerance.accepts(&scenario.start, &scenario.goal) {
            planner.goal_nodes.push(0);
            planner.refresh_best();
        }
        Ok(planner)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub fn best_cost(&self) -> Option<f64> {
        self.best.map(|(_, c)| c)
    }

    pub fn time_unit(&self) -> TimeUnit {
        if self.params.time_budget.is_some() {
            TimeUnit::Seconds
        } else {
            TimeUnit::Iterations
        }
    }

    fn progress(&self) -> f64 {
        match self.time_unit() {
            TimeUnit::Seconds => self.elapsed_secs(),
            TimeUnit::Iterations => self.iterations as f64,
        }
    }

    /// Whether the iteration or wall-clock budget is spent.
    pub fn exhausted(&self) -> bool {
        match self.params.time_budget {
            Some(t) => self.elapsed_secs() >= t || self.iterations >= self.params.max_iterations,
            None => self.iterations >= self.params.max_iterations,
        }
    }

    fn obstacles(&self) -> Obstacles<'a> {
        Obstacles {
            zones: &self.scenario.zones,
            domain: &self.scenario.domain,
            check_step: self.params.check_step,
        }
    }

    fn refresh_best(&mut self) {
        let candidate = self
            .goal_nodes
            .iter()
            .map(|&g| (g, self.tree.cost(g)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((node, cost)) = candidate else { return };
        if self.best.is_some_and(|(_, c)| cost >= c) {
            return;
        }
        let t = self.progress();
        if self.first_solution.is_none() {
            self.first_solution = Some(FirstSolution {
                time: t,
                iteration: self.iterations,
                cost,
            });
        }
        self.history.push((t, cost));
        self.best = Some((node, cost));
    }

    /// One iteration: sample, steer, check, choose parent, insert, rewire.
    pub fn step(&mut self) -> Result<(), PlanError> {
        self.iterations += 1;
        let params = self.params;
        let goal = self.scenario.goal;
        let toward_goal = params.goal_bias > 0.0 && self.rng.random_bool(params.goal_bias);
        let obstacles = self.obstacles();
        let w = params.heading_weight;
        let radius = near_radius(self.tree.len(), params.near_radius_gamma, params.near_radius_cap());
        let extension = if toward_goal {
            goal_extension(&self.tree, &goal, w, radius, self.turn_radius, params.steer_step, &obstacles)
        } else {
            let q_rand = sample_free(&self.scenario.zones, &self.scenario.domain, &mut self.rng)?;
            let nearest_idx = nearest(&self.tree, &q_rand, w);
            let (q_new, edge) = steer(self.tree.configs[nearest_idx], q_rand, self.turn_radius, params.steer_step);
            obstacles.edge_free(&edge).then_some((nearest_idx, q_new))
        };
        let Some((source, q_new)) = extension else {
            return Ok(());
        };
        let near_set = near(&self.tree, &q_new, w, radius, source);

        let duplicate = near_set
            .iter()
            .copied()
            .find(|&i| lifted_distance(&q_new, &self.tree.configs[i], w) == 0.0);
        if let Some(existing) = duplicate {
            // q_new duplicates an existing node: offer that node a better parent
            let candidates: Vec<usize> = near_set
                .iter()
                .copied()
                .filter(|&c| !self.tree.is_ancestor(existing, c))
                .collect();
            if let Some((parent, edge)) = opt_parent(&self.tree, &candidates, &q_new, self.turn_radius, &obstacles) {
                let cost = self.tree.cost(parent) + edge.duration(self.tree.speed);
                if cost < self.tree.cost(existing) - IMPROVEMENT_EPS {
                    self.tree.reparent(existing, parent, edge);
                    self.refresh_best();
                }
            }
            return Ok(());
        }

        let Some((parent, parent_edge)) = opt_parent(&self.tree, &near_set, &q_new, self.turn_radius, &obstacles) else {
            return Ok(());
        };
        let new_idx = self.tree.add(q_new, parent, parent_edge);
        if params.goal_tolerance.accepts(&q_new, &goal) {
            self.goal_nodes.push(new_idx);
        }
        let rewired = rewire(&mut self.tree, &near_set, new_idx, self.turn_radius, &obstacles);
        if rewired > 0 || self.goal_nodes.last() == Some(&new_idx) {
            self.refresh_best();
        }
        Ok(())
    }

    /// Snapshot of the current best solution.
    pub fn result(&self) -> PlanResult {
        let (status, cost, edges) = match self.best {
            Some((node, cost)) => (PlanStatus::Solved, Some(cost), self.tree.path_to(node)),
            None => (PlanStatus::InfeasibleBudgetExhausted, None, Vec::new()),
        };
        PlanResult {
            schema: crate::SCHEMA_VERSION,
            status,
            cost,
            iterations: self.iterations,
            nodes: self.tree.len(),
            time_unit: self.time_unit(),
            first_solution: self.first_solution,
            cost_history: self.history.clone(),
            edges,
        }
    }

    /// Step until the budget is spent.
    pub fn run(mut self) -> Result<PlanResult, PlanError> {
        while !self.exhausted() {
            self.step()?;
        }
        Ok(self.result())
    }
}

/// Run the planner on `scenario` until the budget in `params` is spent.
pub fn plan(scenario: &Scenario, params: PlannerParams) -> Result<PlanResult, PlanError> {
    Planner::new(scenario, params)?.run()
}
