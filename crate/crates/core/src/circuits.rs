//! Feed-forward Boolean gate arrays encoded as integer genotypes, and the
//! even-parity task defined over them.
//!
//! The array is a grid of two-input gates arranged in layers. Node indices
//! are 1-based: indices `1..=n_inputs` name the circuit inputs, gate nodes
//! follow from `n_inputs + 1` upward, layer by layer. A gate in layer `L`
//! may read any input or any gate from layers `1..L`, but not from its own
//! layer, so the genotype bounds themselves rule out cycles.
//!
//! Each gate occupies three genes `(function, source_a, source_b)`, laid out
//! node-major in index order; one trailing gene selects which gate drives
//! the circuit output (an input cannot be selected).

use std::fmt::Write as _;
use std::sync::Arc;

use crate::genome::{GeneBounds, IntGenotype};
use crate::rng::Rng;
use crate::task::{EvalOutcome, Task};

/// Grid shape of a gate array. The default is the shape used by all parity
/// experiments in this crate: 5 inputs and 400 gates in 20 layers of 20.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitLayout {
    pub n_inputs: usize,
    pub n_layers: usize,
    pub nodes_per_layer: usize,
}

impl Default for CircuitLayout {
    fn default() -> Self {
        CircuitLayout {
            n_inputs: 5,
            n_layers: 20,
            nodes_per_layer: 20,
        }
    }
}

impl CircuitLayout {
    /// Panics unless the shape is usable: at least one input and one gate,
    /// and few enough inputs that a truth table fits in a `u32`.
    pub fn new(n_inputs: usize, n_layers: usize, nodes_per_layer: usize) -> Self {
        assert!((1..=5).contains(&n_inputs), "need 1..=5 inputs, got {n_inputs}");
        assert!(n_layers >= 1 && nodes_per_layer >= 1, "empty gate grid");
        CircuitLayout {
            n_inputs,
            n_layers,
            nodes_per_layer,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_layers * self.nodes_per_layer
    }

    /// Total gene count: three per gate plus the output selector.
    pub fn genes_len(&self) -> usize {
        3 * self.n_nodes() + 1
    }

    pub fn n_patterns(&self) -> usize {
        1 << self.n_inputs
    }

    /// Index of the first gate node (inputs occupy `1..=n_inputs`).
    pub fn first_node(&self) -> usize {
        self.n_inputs + 1
    }

    /// Index of the last gate node.
    pub fn last_node(&self) -> usize {
        self.n_inputs + self.n_nodes()
    }

    /// 1-based layer of a gate node index.
    pub fn layer_of(&self, node_index: usize) -> usize {
        assert!(
            (self.first_node()..=self.last_node()).contains(&node_index),
            "index {node_index} is not a gate node"
        );
        (node_index - self.first_node()) / self.nodes_per_layer + 1
    }

    /// Highest node index a gate in `layer` may read from: all inputs plus
    /// every gate in strictly earlier layers.
    pub fn max_source(&self, layer: usize) -> usize {
        assert!((1..=self.n_layers).contains(&layer), "layer {layer} out of range");
        self.n_inputs + (layer - 1) * self.nodes_per_layer
    }

    /// Per-gene bounds for this shape. For the default layout this is 1201
    /// genes: function genes in [1, 4], source genes in [1, max_source(L)],
    /// and the output selector in [first_node, last_node].
    pub fn bounds(&self) -> GeneBounds {
        let mut ranges = Vec::with_capacity(self.genes_len());
        for layer in 1..=self.n_layers {
            let hi = self.max_source(layer) as i32;
            for _ in 0..self.nodes_per_layer {
                ranges.push((1, 4));
                ranges.push((1, hi));
                ranges.push((1, hi));
            }
        }
        ranges.push((self.first_node() as i32, self.last_node() as i32));
        GeneBounds::new(ranges)
    }
}

/// The four gate types, numbered as they appear in function genes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Or = 1,
    And = 2,
    Nand = 3,
    Nor = 4,
}

impl Gate {
    pub fn from_gene(gene: i32) -> Gate {
        match gene {
            1 => Gate::Or,
            2 => Gate::And,
            3 => Gate::Nand,
            4 => Gate::Nor,
            _ => panic!("function gene {gene} outside [1, 4]"),
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Gate::Or => a | b,
            Gate::And => a & b,
            Gate::Nand => !(a & b),
            Gate::Nor => !(a | b),
        }
    }

    /// Same gate applied bitwise, one truth-table pattern per bit position.
    fn apply_mask(self, a: u32, b: u32) -> u32 {
        match self {
            Gate::Or => a | b,
            Gate::And => a & b,
            Gate::Nand => !(a & b),
            Gate::Nor => !(a | b),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gate::Or => "OR",
            Gate::And => "AND",
            Gate::Nand => "NAND",
            Gate::Nor => "NOR",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct GateNode {
    gate: Gate,
    a: u16,
    b: u16,
}

/// A decoded gate array, ready to evaluate.
#[derive(Clone, Debug)]
pub struct Circuit {
    layout: CircuitLayout,
    nodes: Vec<GateNode>,
    output: u16,
}

impl Circuit {
    /// Decodes a genotype against `layout`, validating every gene on the way
    /// (function opcode known, sources restricted to earlier layers, output
    /// selector naming a gate).
    pub fn decode(genotype: &IntGenotype, layout: &CircuitLayout) -> Circuit {
        let genes = genotype.genes();
        assert_eq!(
            genes.len(),
            layout.genes_len(),
            "genotype length does not match layout"
        );
        let mut nodes = Vec::with_capacity(layout.n_nodes());
        for layer in 1..=layout.n_layers {
            let max_source = layout.max_source(layer) as i32;
            for _ in 0..layout.nodes_per_layer {
                let at = nodes.len() * 3;
                let gate = Gate::from_gene(genes[at]);
                let (a, b) = (genes[at + 1], genes[at + 2]);
                assert!(
                    (1..=max_source).contains(&a) && (1..=max_source).contains(&b),
                    "layer {layer} gate reads from ({a}, {b}), allowed [1, {max_source}]"
                );
                nodes.push(GateNode {
                    gate,
                    a: a as u16,
                    b: b as u16,
                });
            }
        }
        let output = genes[genes.len() - 1];
        assert!(
            (layout.first_node() as i32..=layout.last_node() as i32).contains(&output),
            "output selector {output} is not a gate node"
        );
        Circuit {
            layout: *layout,
            nodes,
            output: output as u16,
        }
    }

    pub fn layout(&self) -> &CircuitLayout {
        &self.layout
    }

    /// Index of the gate driving the circuit output.
    pub fn output_node(&self) -> usize {
        self.output as usize
    }

    /// Evaluates one input pattern; bit `i - 1` of `pattern` feeds input `i`.
    pub fn eval(&self, pattern: u32) -> bool {
        assert!(pattern < self.layout.n_patterns() as u32, "pattern out of range");
        let mut values = vec![false; self.layout.last_node() + 1];
        // indices are 1-based node ids, so a plain range loop is clearest
        #[allow(clippy::needless_range_loop)]
        for i in 1..=self.layout.n_inputs {
            values[i] = (pattern >> (i - 1)) & 1 == 1;
        }
        for (k, node) in self.nodes.iter().enumerate() {
            let idx = self.layout.first_node() + k;
            values[idx] = node.gate.apply(values[node.a as usize], values[node.b as usize]);
        }
        values[self.output as usize]
    }

    /// Evaluates all `2^n_inputs` patterns in one pass by carrying each
    /// node's value for every pattern in one machine word: bit `j` of the
    /// result is the circuit output on pattern `j`.
    pub fn truth_table(&self) -> u32 {
        let mut values = vec![0u32; self.layout.last_node() + 1];
        // indices are 1-based node ids, so a plain range loop is clearest
        #[allow(clippy::needless_range_loop)]
        for i in 1..=self.layout.n_inputs {
            values[i] = input_mask(i, self.layout.n_patterns());
        }
        for (k, node) in self.nodes.iter().enumerate() {
            let idx = self.layout.first_node() + k;
            values[idx] = node
                .gate
                .apply_mask(values[node.a as usize], values[node.b as usize]);
        }
        // Bits at or above n_patterns carry phantom patterns introduced by
        // the negating gates; only the real ones leave this function.
        let full = values[self.output as usize];
        match self.layout.n_patterns() {
            32 => full,
            n => full & ((1u32 << n) - 1),
        }
    }

    /// Human-readable netlist, one gate per line, for debugging evolved
    /// solutions.
    pub fn netlist(&self) -> String {
        let mut out = String::new();
        for (k, node) in self.nodes.iter().enumerate() {
            let idx = self.layout.first_node() + k;
            let _ = writeln!(
                out,
                "n{idx} = {}({}, {})",
                node.gate.name(),
                source_name(node.a as usize, &self.layout),
                source_name(node.b as usize, &self.layout)
            );
        }
        let _ = writeln!(out, "out = n{}", self.output);
        out
    }
}

fn source_name(idx: usize, layout: &CircuitLayout) -> String {
    if idx <= layout.n_inputs {
        format!("x{idx}")
    } else {
        format!("n{idx}")
    }
}

/// Truth-table word for input `i`: bit `j` is bit `i - 1` of pattern `j`.
fn input_mask(i: usize, n_patterns: usize) -> u32 {
    let mut mask = 0u32;
    for j in 0..n_patterns {
        mask |= (((j >> (i - 1)) & 1) as u32) << j;
    }
    mask
}

/// Truth-table word for even parity: bit `j` is 1 when pattern `j` has an
/// even number of set input bits (zero counts as even).
pub fn even_parity_mask(n_inputs: usize) -> u32 {
    assert!((1..=5).contains(&n_inputs));
    let mut mask = 0u32;
    for j in 0..(1usize << n_inputs) {
        mask |= ((j.count_ones() + 1) % 2) << j;
    }
    mask
}

/// Incremental builder for hand-written circuits in tests and examples.
/// Starts from a neutral configuration (every gate computes `AND(x1, x1)`,
/// output pointing at the first gate) and overrides individual gates.
pub struct CircuitBuilder {
    layout: CircuitLayout,
    genes: Vec<i32>,
}

impl CircuitBuilder {
    pub fn new(layout: &CircuitLayout) -> Self {
        let mut genes = Vec::with_capacity(layout.genes_len());
        for _ in 0..layout.n_nodes() {
            genes.extend_from_slice(&[Gate::And as i32, 1, 1]);
        }
        genes.push(layout.first_node() as i32);
        CircuitBuilder {
            layout: *layout,
            genes,
        }
    }

    /// Makes gate `index` compute `gate(a, b)`. Sources must come from
    /// earlier layers or the inputs, as the genotype bounds require.
    pub fn gate(mut self, index: usize, gate: Gate, a: usize, b: usize) -> Self {
        let layer = self.layout.layer_of(index);
        let max = self.layout.max_source(layer);
        assert!(
            (1..=max).contains(&a) && (1..=max).contains(&b),
            "gate n{index} (layer {layer}) cannot read from ({a}, {b})"
        );
        let at = 3 * (index - self.layout.first_node());
        self.genes[at] = gate as i32;
        self.genes[at + 1] = a as i32;
        self.genes[at + 2] = b as i32;
        self
    }

    pub fn output(mut self, index: usize) -> Self {
        let len = self.genes.len();
        self.genes[len - 1] = index as i32;
        self
    }

    pub fn genes(self) -> Vec<i32> {
        self.genes
    }

    pub fn build(self, bounds: &Arc<GeneBounds>) -> IntGenotype {
        IntGenotype::from_genes(bounds, self.genes)
    }
}

/// Even-parity fitness over a gate array: the fraction of the 32 input
/// patterns on which the circuit agrees with the parity target. Each
/// evaluation is charged one simulator step per pattern.
pub struct ParityTask {
    layout: CircuitLayout,
    bounds: Arc<GeneBounds>,
    target: u32,
}

impl ParityTask {
    pub fn new() -> Self {
        Self::with_layout(CircuitLayout::default())
    }

    pub fn with_layout(layout: CircuitLayout) -> Self {
        ParityTask {
            layout,
            bounds: Arc::new(layout.bounds()),
            target: even_parity_mask(layout.n_inputs),
        }
    }

    pub fn layout(&self) -> &CircuitLayout {
        &self.layout
    }

    /// Fitness of a decoded circuit: `1 - wrong_patterns / n_patterns`.
    pub fn fitness_of(&self, circuit: &Circuit) -> f64 {
        let wrong = (circuit.truth_table() ^ self.target).count_ones();
        1.0 - wrong as f64 / self.layout.n_patterns() as f64
    }
}

impl Default for ParityTask {
    fn default() -> Self {
        Self::new()
    }
}

impl Task for ParityTask {
    fn bounds(&self) -> Arc<GeneBounds> {
        Arc::clone(&self.bounds)
    }

    fn evaluate(&self, genotype: &IntGenotype, _rng: &mut Rng) -> EvalOutcome {
        let circuit = Circuit::decode(genotype, &self.layout);
        EvalOutcome {
            fitness: self.fitness_of(&circuit),
            steps: self.layout.n_patterns() as u64,
        }
    }
}

/// Gene vector computing 5-bit even parity exactly, via a chain of XOR
/// stages (`a XOR b = AND(OR(a, b), NAND(a, b))`) and a final negation.
/// Used by tests as a known-perfect solution.
pub fn perfect_parity_genes(layout: &CircuitLayout) -> Vec<i32> {
    assert_eq!(
        (layout.n_inputs, layout.n_layers, layout.nodes_per_layer),
        (5, 20, 20),
        "hand-built parity circuit assumes the default layout"
    );
    // Stage k combines the running XOR with input x_{k+2}; stages sit in
    // layer pairs so each AND can see its own OR/NAND pair.
    let mut b = CircuitBuilder::new(layout);
    let (mut acc, mut next) = (1, 6); // acc: running XOR source; next: first free index
    for k in 2..=5 {
        b = b
            .gate(next, Gate::Or, acc, k)
            .gate(next + 1, Gate::Nand, acc, k)
            .gate(next + 20, Gate::And, next, next + 1);
        acc = next + 20;
        next += 40;
    }
    // acc now holds odd parity; even parity is its negation.
    b.gate(acc + 20, Gate::Nor, acc, acc).output(acc + 20).genes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::IntGenotype;
    use crate::rng;

    #[test]
    fn gate_truth_tables() {
        let cases = [(false, false), (false, true), (true, false), (true, true)];
        for (a, b) in cases {
            assert_eq!(Gate::Or.apply(a, b), a || b);
            assert_eq!(Gate::And.apply(a, b), a && b);
            assert_eq!(Gate::Nand.apply(a, b), !(a && b));
            assert_eq!(Gate::Nor.apply(a, b), !(a || b));
        }
    }

    #[test]
    fn default_layout_shape() {
        let l = CircuitLayout::default();
        assert_eq!(l.n_nodes(), 400);
        assert_eq!(l.genes_len(), 1201);
        assert_eq!(l.first_node(), 6);
        assert_eq!(l.last_node(), 405);
        assert_eq!(l.n_patterns(), 32);
    }

    #[test]
    fn layer_bookkeeping() {
        let l = CircuitLayout::default();
        assert_eq!(l.layer_of(6), 1);
        assert_eq!(l.layer_of(25), 1);
        assert_eq!(l.layer_of(26), 2);
        assert_eq!(l.layer_of(405), 20);
        assert_eq!(l.max_source(1), 5);
        assert_eq!(l.max_source(2), 25);
        assert_eq!(l.max_source(20), 385);
    }

    #[test]
    fn bounds_match_layout() {
        let l = CircuitLayout::default();
        let b = l.bounds();
        assert_eq!(b.len(), 1201);
        assert_eq!(b.range(0), (1, 4)); // first gate's function
        assert_eq!(b.range(1), (1, 5)); // layer 1 sources: inputs only
        assert_eq!(b.range(3 * 20 + 1), (1, 25)); // layer 2 sources
        assert_eq!(b.range(3 * 380 + 1), (1, 385)); // layer 20 sources
        assert_eq!(b.range(1200), (6, 405)); // output selector
    }

    #[test]
    fn identity_gate_copies_input() {
        // AND(x1, x1) = x1.
        let layout = CircuitLayout::default();
        let genes = CircuitBuilder::new(&layout).genes();
        let bounds = Arc::new(layout.bounds());
        let circuit = Circuit::decode(&IntGenotype::from_genes(&bounds, genes), &layout);
        for pattern in 0..32 {
            assert_eq!(circuit.eval(pattern), pattern & 1 == 1);
        }
    }

    #[test]
    fn truth_table_agrees_with_per_pattern_eval() {
        let layout = CircuitLayout::default();
        let bounds = Arc::new(layout.bounds());
        let mut rng = rng::from_seed(11);
        for _ in 0..50 {
            let g = IntGenotype::random(&bounds, &mut rng);
            let circuit = Circuit::decode(&g, &layout);
            let tt = circuit.truth_table();
            for pattern in 0..32 {
                assert_eq!(circuit.eval(pattern), (tt >> pattern) & 1 == 1);
            }
        }
    }

    #[test]
    fn parity_mask_is_the_thue_morse_word() {
        assert_eq!(even_parity_mask(5), 0x6996_9669);
        assert_eq!(even_parity_mask(5).count_ones(), 16);
        assert_eq!(even_parity_mask(1), 0b01);
        assert_eq!(even_parity_mask(2), 0b1001);
    }

    #[test]
    fn perfect_circuit_scores_one() {
        let task = ParityTask::new();
        let g = IntGenotype::from_genes(&task.bounds(), perfect_parity_genes(task.layout()));
        let out = task.evaluate(&g, &mut rng::from_seed(0));
        assert_eq!(out.fitness, 1.0);
        assert_eq!(out.steps, 32);
    }

    #[test]
    fn constant_circuits_score_half() {
        // Exactly 16 of the 32 patterns have even parity, so a constant
        // output matches half the targets either way.
        let layout = CircuitLayout::default();
        let task = ParityTask::new();
        let mut rng = rng::from_seed(0);

        // NAND(x1, x1) = !x1, then AND(x1, !x1) = 0.
        let zero = CircuitBuilder::new(&layout)
            .gate(6, Gate::Nand, 1, 1)
            .gate(26, Gate::And, 1, 6)
            .output(26)
            .build(&task.bounds());
        assert_eq!(task.evaluate(&zero, &mut rng).fitness, 0.5);

        // OR(x1, !x1) = 1.
        let one = CircuitBuilder::new(&layout)
            .gate(6, Gate::Nand, 1, 1)
            .gate(26, Gate::Or, 1, 6)
            .output(26)
            .build(&task.bounds());
        assert_eq!(task.evaluate(&one, &mut rng).fitness, 0.5);
    }

    #[test]
    fn three_quarter_circuit_scores_exactly() {
        // Parity XOR (x1 AND x2) is wrong on precisely the 8 patterns with
        // x1 = x2 = 1, so 24 of 32 answers are right. The perfect circuit
        // leaves its answer on n166 (layer 9); the spoiler sits above it.
        let layout = CircuitLayout::default();
        let task = ParityTask::new();
        let parity = perfect_parity_genes(&layout);
        let mut b = CircuitBuilder::new(&layout);
        b.genes[..parity.len() - 1].copy_from_slice(&parity[..parity.len() - 1]);
        let g = b
            .gate(8, Gate::And, 1, 2)
            .gate(186, Gate::Or, 166, 8)
            .gate(187, Gate::Nand, 166, 8)
            .gate(206, Gate::And, 186, 187)
            .output(206)
            .build(&task.bounds());
        assert_eq!(task.evaluate(&g, &mut rng::from_seed(0)).fitness, 0.75);
    }

    #[test]
    fn netlist_mentions_output() {
        let layout = CircuitLayout::default();
        let task = ParityTask::new();
        let g = IntGenotype::from_genes(&task.bounds(), perfect_parity_genes(&layout));
        let netlist = Circuit::decode(&g, &layout).netlist();
        assert!(netlist.contains("out = n166"));
        assert!(netlist.contains("n146 = AND(n126, n127)"));
        assert!(netlist.contains("n166 = NOR(n146, n146)"));
    }

    #[test]
    #[should_panic(expected = "not a gate node")]
    fn decode_rejects_input_as_output() {
        let layout = CircuitLayout::default();
        let mut genes = CircuitBuilder::new(&layout).genes();
        let len = genes.len();
        genes[len - 1] = 3; // an input index
        let loose = Arc::new(GeneBounds::uniform(0, 500, len));
        Circuit::decode(&IntGenotype::from_genes(&loose, genes), &layout);
    }
}
