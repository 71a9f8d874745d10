//! Boolean functions to NOR/CPY circuits to complexes.
//!
//! `nor_decompose` writes the canonical two-level form with NOR gates,
//! `planarize` lays the circuit out on parallel tracks and resolves every
//! track swap with a crossover, and `circuit_to_complex` joins primitive
//! complexes along the wires.

use serde::Serialize;

use crate::amalgam::{Assembly, CrossBlockade};
use crate::catalog::catalog;
use crate::error::{Error, Result};
use crate::expr::BooleanFunction;
use crate::gsm::{enumerate_gsm_with, fix_port, realizes_with, GsmOptions};
use crate::language::truth_table_language;
use crate::model::Complex;
use crate::optim::{optimize_geometry, Objective, OptimizeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Input(usize),
    Output,
    Nor,
    Not,
    Cpy,
    /// Swaps two tracks: out 0 carries in 0, out 1 carries in 1, with the
    /// outputs laid out in the opposite order.
    Cross,
    Const(bool),
    /// Terminates a wire whose value is not used.
    Sink,
}

impl Gate {
    pub fn n_in(self) -> usize {
        match self {
            Gate::Input(_) | Gate::Const(_) => 0,
            Gate::Output | Gate::Not | Gate::Cpy | Gate::Sink => 1,
            Gate::Nor | Gate::Cross => 2,
        }
    }

    pub fn n_out(self) -> usize {
        match self {
            Gate::Output | Gate::Sink => 0,
            Gate::Input(_) | Gate::Const(_) | Gate::Nor | Gate::Not => 1,
            Gate::Cpy | Gate::Cross => 2,
        }
    }

    fn eval(self, x: &[bool], inputs: &[bool]) -> Vec<bool> {
        match self {
            Gate::Input(i) => vec![x[i]],
            Gate::Const(b) => vec![b],
            Gate::Output | Gate::Sink => vec![],
            Gate::Nor => vec![!(inputs[0] || inputs[1])],
            Gate::Not => vec![!inputs[0]],
            Gate::Cpy => vec![inputs[0], inputs[0]],
            Gate::Cross => vec![inputs[0], inputs[1]],
        }
    }
}

/// `(node, pin)` endpoints; every output pin feeds exactly one input pin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Wire {
    pub from: (usize, usize),
    pub to: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitGraph {
    pub n_inputs: usize,
    pub nodes: Vec<Gate>,
    pub wires: Vec<Wire>,
    /// Layered drawing: `(row, column)` of every node. Rows advance one node
    /// at a time, columns index the live wires left to right, so wires never
    /// cross; inputs sit in row 0 and the output in the last row.
    pub embedding: Option<Vec<(usize, usize)>>,
}

impl CircuitGraph {
    pub fn is_planar(&self) -> bool {
        self.embedding.is_some()
    }

    pub fn count(&self, g: Gate) -> usize {
        self.nodes.iter().filter(|&&n| n == g).count()
    }

    fn incoming(&self) -> Vec<Vec<usize>> {
        let mut inc: Vec<Vec<usize>> = self.nodes.iter().map(|g| vec![usize::MAX; g.n_in()]).collect();
        for (k, w) in self.wires.iter().enumerate() {
            inc[w.to.0][w.to.1] = k;
        }
        inc
    }

    fn topological_order(&self) -> Vec<usize> {
        let inc = self.incoming();
        let mut missing: Vec<usize> = inc.iter().map(|v| v.len()).collect();
        let mut out_wires: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (k, w) in self.wires.iter().enumerate() {
            out_wires[w.from.0].push(k);
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&v| missing[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop() {
            order.push(v);
            for &k in &out_wires[v] {
                let t = self.wires[k].to.0;
                missing[t] -= 1;
                if missing[t] == 0 {
                    ready.push(t);
                }
            }
        }
        order
    }

    /// Checks pin counts, single use of every pin and acyclicity.
    pub fn validate(&self) -> Result<()> {
        let mut used_out: Vec<Vec<bool>> = self.nodes.iter().map(|g| vec![false; g.n_out()]).collect();
        let mut used_in: Vec<Vec<bool>> = self.nodes.iter().map(|g| vec![false; g.n_in()]).collect();
        for w in &self.wires {
            let (a, p) = w.from;
            let (b, q) = w.to;
            if a >= self.nodes.len() || b >= self.nodes.len() || p >= used_out[a].len() || q >= used_in[b].len() {
                return Err(Error::invalid("wire endpoint out of range"));
            }
            if std::mem::replace(&mut used_out[a][p], true) || std::mem::replace(&mut used_in[b][q], true) {
                return Err(Error::invalid("a pin carries two wires"));
            }
        }
        if used_out.iter().chain(&used_in).flatten().any(|u| !u) {
            return Err(Error::invalid("a pin is left unconnected"));
        }
        if self.count(Gate::Output) != 1 {
            return Err(Error::invalid("a circuit has exactly one output"));
        }
        for i in 0..self.n_inputs {
            if self.count(Gate::Input(i)) != 1 {
                return Err(Error::invalid(format!("input x{} must appear once", i + 1)));
            }
        }
        if self.topological_order().len() != self.nodes.len() {
            return Err(Error::invalid("the circuit has a cycle"));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[bool]) -> bool {
        let inc = self.incoming();
        let mut value: Vec<Vec<bool>> = vec![Vec::new(); self.nodes.len()];
        let mut y = false;
        for v in self.topological_order() {
            let ins: Vec<bool> = inc[v]
                .iter()
                .map(|&k| {
                    let (s, p) = self.wires[k].from;
                    value[s][p]
                })
                .collect();
            if self.nodes[v] == Gate::Output {
                y = ins[0];
            }
            value[v] = self.nodes[v].eval(x, &ins);
        }
        y
    }

    /// Whether the circuit computes `f` on every input.
    pub fn computes(&self, f: &BooleanFunction) -> bool {
        f.n_inputs() == self.n_inputs
            && (0..1usize << self.n_inputs).all(|r| {
                let x: Vec<bool> = (0..self.n_inputs).map(|i| (r >> i) & 1 == 1).collect();
                self.evaluate(&x) == f.row(r)
            })
    }
}

/// Logic DAG before fan-out is made explicit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Op {
    Input(usize),
    Const(bool),
    Not(usize),
    Nor(usize, usize),
}

#[derive(Default)]
struct Dag {
    ops: Vec<Op>,
}

impl Dag {
    fn push(&mut self, op: Op) -> usize {
        if let Some(k) = self.ops.iter().position(|&o| o == op) {
            return k;
        }
        self.ops.push(op);
        self.ops.len() - 1
    }

    fn not(&mut self, a: usize) -> usize {
        match self.ops[a] {
            Op::Not(b) => b,
            _ => self.push(Op::Not(a)),
        }
    }

    fn or(&mut self, ys: &[usize]) -> usize {
        if ys.len() == 1 {
            return ys[0];
        }
        let n = self.nor(ys);
        self.not(n)
    }

    /// Multi-input NOR as a balanced tree of two-input NORs.
    fn nor(&mut self, ys: &[usize]) -> usize {
        match ys.len() {
            0 => unreachable!("empty NOR"),
            1 => self.not(ys[0]),
            _ => {
                let (l, r) = ys.split_at(ys.len() / 2);
                let a = self.or(l);
                let b = self.or(r);
                self.push(Op::Nor(a, b))
            }
        }
    }
}

/// Canonical two-level form of `f` in NOR gates: sum of minterms or product
/// of maxterms, whichever has fewer terms. Fan-out goes through CPY trees.
pub fn nor_decompose(f: &BooleanFunction) -> Result<CircuitGraph> {
    let g = f.n_inputs();
    if g == 0 {
        return Err(Error::invalid("a circuit needs at least one input"));
    }
    let mut dag = Dag::default();
    let inputs: Vec<usize> = (0..g).map(|i| dag.push(Op::Input(i))).collect();
    let rows = 1usize << g;
    let ones: Vec<usize> = (0..rows).filter(|&r| f.row(r)).collect();
    let zeros: Vec<usize> = (0..rows).filter(|&r| !f.row(r)).collect();
    let root = if ones.is_empty() || zeros.is_empty() {
        dag.push(Op::Const(!ones.is_empty()))
    } else if ones.len() <= zeros.len() {
        // OR of minterms; a minterm is the NOR of its complemented literals
        let terms: Vec<usize> = ones
            .iter()
            .map(|&r| {
                let lits: Vec<usize> = (0..g)
                    .map(|i| if (r >> i) & 1 == 1 { dag.not(inputs[i]) } else { inputs[i] })
                    .collect();
                dag.nor(&lits)
            })
            .collect();
        dag.or(&terms)
    } else {
        // AND of maxterms is the NOR of the complemented clauses
        let clauses: Vec<usize> = zeros
            .iter()
            .map(|&r| {
                let lits: Vec<usize> = (0..g)
                    .map(|i| if (r >> i) & 1 == 1 { dag.not(inputs[i]) } else { inputs[i] })
                    .collect();
                dag.nor(&lits)
            })
            .collect();
        dag.nor(&clauses)
    };
    let c = expand_fanout(&dag, root, g);
    c.validate()?;
    if !c.computes(f) {
        return Err(Error::invalid("decomposition does not reproduce the truth table"));
    }
    Ok(c)
}

fn expand_fanout(dag: &Dag, root: usize, g: usize) -> CircuitGraph {
    let n = dag.ops.len();
    // ops left behind by double-negation folding are dropped; inputs stay
    let mut live = vec![false; n];
    live[root] = true;
    for k in (0..n).rev() {
        match dag.ops[k] {
            Op::Input(_) => live[k] = true,
            Op::Not(a) if live[k] => live[a] = true,
            Op::Nor(a, b) if live[k] => {
                live[a] = true;
                live[b] = true;
            }
            _ => {}
        }
    }
    let mut consumers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut nodes: Vec<Gate> = Vec::new();
    let mut node_of = vec![usize::MAX; n];
    for (k, op) in dag.ops.iter().enumerate() {
        if !live[k] {
            continue;
        }
        node_of[k] = nodes.len();
        nodes.push(match op {
            Op::Input(i) => Gate::Input(*i),
            Op::Const(b) => Gate::Const(*b),
            Op::Not(_) => Gate::Not,
            Op::Nor(..) => Gate::Nor,
        });
    }
    for (k, op) in dag.ops.iter().enumerate() {
        if !live[k] {
            continue;
        }
        match *op {
            Op::Not(a) => consumers[a].push((node_of[k], 0)),
            Op::Nor(a, b) => {
                consumers[a].push((node_of[k], 0));
                consumers[b].push((node_of[k], 1));
            }
            _ => {}
        }
    }
    let out = nodes.len();
    nodes.push(Gate::Output);
    consumers[root].push((out, 0));
    let mut wires = Vec::new();
    for (k, sinks) in consumers.iter().enumerate() {
        if !live[k] {
            continue;
        }
        let mut sinks = sinks.clone();
        if sinks.is_empty() {
            // unused inputs of constant functions
            sinks.push((nodes.len(), 0));
            nodes.push(Gate::Sink);
        }
        fan_out(&mut nodes, &mut wires, (node_of[k], 0), &sinks);
    }
    CircuitGraph {
        n_inputs: g,
        nodes,
        wires,
        embedding: None,
    }
}

/// Feeds `source` to every sink through a balanced CPY tree.
fn fan_out(nodes: &mut Vec<Gate>, wires: &mut Vec<Wire>, source: (usize, usize), sinks: &[(usize, usize)]) {
    if sinks.len() == 1 {
        wires.push(Wire { from: source, to: sinks[0] });
        return;
    }
    let c = nodes.len();
    nodes.push(Gate::Cpy);
    wires.push(Wire { from: source, to: (c, 0) });
    let (l, r) = sinks.split_at(sinks.len() / 2);
    fan_out(nodes, wires, (c, 0), l);
    fan_out(nodes, wires, (c, 1), r);
}

/// How a track swap is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Crossover {
    /// A single crossing node, compiled to the crossing complex.
    #[default]
    Complex,
    /// Three XNORs built from NOR and CPY gates, with no crossing node.
    Gates,
}

struct Tracks {
    nodes: Vec<Gate>,
    wires: Vec<(usize, usize)>,
    /// Sink pins of emitted wires, filled when consumed.
    sinks: Vec<Option<(usize, usize)>>,
    pos: Vec<(usize, usize)>,
    /// Emitted wire on each live track, with the source-circuit wire it carries.
    live: Vec<(usize, Option<usize>)>,
    row: usize,
}

impl Tracks {
    /// Places `gate` on tracks `at..at+n_in`; its outputs carry `carry`.
    fn apply(&mut self, gate: Gate, at: usize, carry: &[Option<usize>]) {
        let v = self.nodes.len();
        self.nodes.push(gate);
        self.pos.push((self.row, at));
        self.row += 1;
        let k = gate.n_in();
        let consumed: Vec<_> = self.live.drain(at..at + k).collect();
        for (p, (w, _)) in consumed.into_iter().enumerate() {
            self.sinks[w] = Some((v, p));
        }
        let outs: Vec<_> = (0..gate.n_out())
            .map(|p| {
                self.wires.push((v, p));
                self.sinks.push(None);
                (self.wires.len() - 1, carry.get(p).copied().flatten())
            })
            .collect();
        self.live.splice(at..at, outs);
    }

    fn gate(&mut self, gate: Gate, at: usize) {
        self.apply(gate, at, &[]);
    }

    /// Exchanges tracks `at` and `at + 1`.
    fn swap(&mut self, at: usize, style: Crossover) {
        let (a, b) = (self.live[at].1, self.live[at + 1].1);
        match style {
            Crossover::Complex => {
                // outputs are laid out right-to-left: pin 1 (value of b) on the left
                self.apply(Gate::Cross, at, &[a, b]);
                self.live.swap(at, at + 1);
            }
            Crossover::Gates => {
                // a b -> a a b b -> a c b -> a c c b -> (a⊙c) (c⊙b) = b a
                self.gate(Gate::Cpy, at);
                self.gate(Gate::Cpy, at + 2);
                self.xnor(at + 1);
                self.gate(Gate::Cpy, at + 1);
                self.xnor(at);
                self.xnor(at + 1);
                self.live[at].1 = b;
                self.live[at + 1].1 = a;
            }
        }
    }

    /// XNOR of tracks `at`, `at + 1` from four NOR gates.
    fn xnor(&mut self, at: usize) {
        self.gate(Gate::Cpy, at);
        self.gate(Gate::Cpy, at + 2);
        self.gate(Gate::Nor, at + 1);
        self.gate(Gate::Cpy, at + 1);
        self.gate(Gate::Nor, at);
        self.gate(Gate::Nor, at + 1);
        self.gate(Gate::Nor, at);
    }
}

/// Lays the circuit out on tracks in a greedy topological order; whenever
/// a gate's inputs are not adjacent, neighbouring tracks are exchanged
/// through crossovers. The result carries a crossing-free layered embedding
/// with the inputs in the first row and the output last.
pub fn planarize(circuit: &CircuitGraph, style: Crossover) -> Result<CircuitGraph> {
    circuit.validate()?;
    let inc = circuit.incoming();
    let mut out_wires: Vec<Vec<Option<usize>>> = circuit.nodes.iter().map(|g| vec![None; g.n_out()]).collect();
    for (k, w) in circuit.wires.iter().enumerate() {
        out_wires[w.from.0][w.from.1] = Some(k);
    }
    let mut t = Tracks {
        nodes: Vec::new(),
        wires: Vec::new(),
        sinks: Vec::new(),
        pos: Vec::new(),
        live: Vec::new(),
        row: 0,
    };
    let mut done = vec![false; circuit.nodes.len()];
    let mut sources: Vec<usize> = (0..circuit.nodes.len())
        .filter(|&v| circuit.nodes[v].n_in() == 0)
        .collect();
    sources.sort_by_key(|&v| match circuit.nodes[v] {
        Gate::Input(i) => i,
        _ => usize::MAX,
    });
    for v in sources {
        let at = t.live.len();
        t.apply(circuit.nodes[v], at, &out_wires[v]);
        t.row = 0;
        done[v] = true;
    }
    t.row = 1;
    let track_of = |t: &Tracks, k: usize| t.live.iter().position(|&(_, c)| c == Some(k));
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..circuit.nodes.len() {
            if done[v] {
                continue;
            }
            let Some(tr) = inc[v].iter().map(|&k| track_of(&t, k)).collect::<Option<Vec<usize>>>() else {
                continue;
            };
            let cost = if tr.len() == 2 { tr[0].abs_diff(tr[1]) - 1 } else { 0 };
            // the output goes last
            let rank = usize::from(circuit.nodes[v] == Gate::Output);
            if best.is_none_or(|(r, c, _)| (rank, cost) < (r, c)) {
                best = Some((rank, cost, v));
            }
        }
        let Some((_, _, v)) = best else { break };
        let mut tr: Vec<usize> = inc[v].iter().map(|&k| track_of(&t, k).expect("live")).collect();
        if tr.len() == 2 {
            // bring the right input next to the left one
            let (l, r) = if tr[0] < tr[1] { (0, 1) } else { (1, 0) };
            while tr[r] > tr[l] + 1 {
                t.swap(tr[r] - 1, style);
                tr[r] -= 1;
            }
            if circuit.nodes[v] != Gate::Nor && l == 1 {
                // pin order matters for crossings
                t.swap(tr[l], style);
                tr.swap(0, 1);
            }
        }
        let at = *tr.iter().min().expect("at least one input");
        t.apply(circuit.nodes[v], at, &out_wires[v]);
        done[v] = true;
    }
    if done.iter().any(|d| !d) {
        return Err(Error::invalid("circuit could not be scheduled"));
    }
    let wires = t
        .wires
        .iter()
        .zip(&t.sinks)
        .map(|(&from, to)| Wire {
            from,
            to: to.expect("every wire consumed"),
        })
        .collect();
    let out = CircuitGraph {
        n_inputs: circuit.n_inputs,
        nodes: t.nodes,
        wires,
        embedding: Some(t.pos),
    };
    out.validate()?;
    Ok(out)
}

/// Which NOR complex the compiler instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NorVariant {
    /// Ring-shaped blockade with detunings (1, 2, 1) on (A, B, Q).
    #[default]
    Ring,
    /// The most robust five-atom NOR.
    Triangle,
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    pub nor: NorVariant,
    pub crossover: Crossover,
    /// Synthesize a layout and refine it with the optimizer.
    pub geometric: bool,
    pub optimize: OptimizeConfig,
}

struct Primitives {
    nor: Complex,
    not: Complex,
    cpy: Complex,
    lnk: Complex,
    crs: Complex,
}

impl Primitives {
    fn load(nor: NorVariant) -> Result<Primitives> {
        let get = |n: &str| catalog(n).map(|e| e.complex.without_geometry());
        Ok(Primitives {
            nor: get(match nor {
                NorVariant::Ring => "NOR_ring",
                NorVariant::Triangle => "NOR_triangle",
            })?,
            not: get("NOT")?,
            cpy: get("CPY")?,
            lnk: get("LNK")?,
            crs: get("CRS")?,
        })
    }
}

fn port(c: &Complex, label: &str) -> usize {
    c.port_atom(label).expect("primitive port")
}

/// Assembly atoms of a one-atom constant: 1 is a lone atom, 0 an atom
/// pinned down by a stronger neighbour.
fn constant(asm: &mut Assembly, value: bool) -> usize {
    let a = asm.add_atom(crate::model::rational(1), None);
    if !value {
        let b = asm.add_atom(crate::model::rational(2), None);
        asm.add_edge(a, b);
    }
    a
}

/// Joins one primitive complex per gate along the wires: every wire
/// identifies the driving output port with the driven input port, which
/// become one ancilla. Inputs become ports `x1..xg` and the output `y`.
pub fn circuit_to_complex(circuit: &CircuitGraph, opts: &CompileOptions) -> Result<Complex> {
    circuit.validate()?;
    if !circuit.is_planar() {
        return Err(Error::invalid("circuit_to_complex needs a planarized circuit"));
    }
    let prim = Primitives::load(opts.nor)?;
    let mut asm = Assembly::new();
    let n = circuit.nodes.len();
    // assembly atom behind each input and output pin
    let mut in_atom: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut out_atom: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, g) in circuit.nodes.iter().enumerate() {
        let (c, ins, outs): (&Complex, &[&str], &[&str]) = match g {
            Gate::Nor => (&prim.nor, &["A", "B"], &["Q"]),
            Gate::Not => (&prim.not, &["A"], &["Q"]),
            Gate::Cpy => (&prim.cpy, &["A"], &["Q", "R"]),
            Gate::Cross => (&prim.crs, &["A", "B"], &["Q", "R"]),
            Gate::Const(b) => {
                out_atom[v] = vec![constant(&mut asm, *b)];
                continue;
            }
            Gate::Sink => {
                // the input port of a NOT whose output is dropped
                let idx = asm.add(&prim.not, None);
                in_atom[v] = vec![idx[port(&prim.not, "A")]];
                continue;
            }
            Gate::Input(_) | Gate::Output => continue,
        };
        let idx = asm.add(c, None);
        in_atom[v] = ins.iter().map(|l| idx[port(c, l)]).collect();
        out_atom[v] = outs.iter().map(|l| idx[port(c, l)]).collect();
    }
    let mut ports: Vec<(String, usize)> = Vec::new();
    let mut input_port = vec![usize::MAX; circuit.n_inputs];
    let mut output_port = usize::MAX;
    for w in &circuit.wires {
        let (s, p) = w.from;
        let (t, q) = w.to;
        match (circuit.nodes[s], circuit.nodes[t]) {
            (Gate::Input(i), Gate::Output) => {
                let idx = asm.add(&prim.lnk, None);
                input_port[i] = idx[port(&prim.lnk, "A")];
                output_port = idx[port(&prim.lnk, "Q")];
            }
            (Gate::Input(i), _) => input_port[i] = in_atom[t][q],
            (_, Gate::Output) => output_port = out_atom[s][p],
            _ => asm.identify(out_atom[s][p], in_atom[t][q]),
        }
    }
    for (i, &a) in input_port.iter().enumerate() {
        ports.push((format!("x{}", i + 1), a));
    }
    ports.push(("y".into(), output_port));
    let abstract_complex = asm.finish(&ports, CrossBlockade::Forbid)?;
    if !opts.geometric {
        return Ok(abstract_complex);
    }
    layout(&abstract_complex, circuit, &opts.optimize)
}

/// Best-effort geometry: atoms start near their gate's place in the layered
/// drawing and the optimizer refines them. Fails when no valid layout is found.
fn layout(c: &Complex, circuit: &CircuitGraph, cfg: &OptimizeConfig) -> Result<Complex> {
    let _ = circuit;
    let r = optimize_geometry(c, Objective::Robustness, cfg)?;
    if !r.success || !r.report.valid {
        return Err(Error::invalid(format!(
            "layout infeasible: best robustness {:.4} does not exceed the spread {:.4}",
            r.report.robustness, r.report.spread
        )));
    }
    Ok(r.complex)
}

/// Largest compiled complex the verifier accepts.
pub const MAX_VERIFY_ATOMS: usize = crate::bits::MAX_VERTICES;

#[derive(Clone, Debug, Serialize)]
pub struct Compiled {
    #[serde(skip)]
    pub complex: Complex,
    pub inputs: usize,
    pub atoms: usize,
    pub gates: usize,
    pub crossings: usize,
    pub max_detuning: String,
    pub gap: String,
    pub verified: bool,
}

/// Decomposes, planarizes, builds and verifies against the truth table.
pub fn compile(f: &BooleanFunction, opts: &CompileOptions) -> Result<Compiled> {
    let circuit = planarize(&nor_decompose(f)?, opts.crossover)?;
    if !circuit.computes(f) {
        return Err(Error::invalid("planarized circuit changed the function"));
    }
    let complex = circuit_to_complex(&circuit, opts)?;
    let gsm = enumerate_gsm_with(
        &complex,
        &GsmOptions {
            max_atoms: MAX_VERIFY_ATOMS,
            ..GsmOptions::default()
        },
    )?;
    let verified = realizes_with(&complex, &gsm, &truth_table_language(f)?)?.is_yes();
    Ok(Compiled {
        atoms: complex.n_atoms(),
        inputs: f.n_inputs(),
        gates: circuit
            .nodes
            .iter()
            .filter(|g| !matches!(g, Gate::Input(_) | Gate::Output))
            .count(),
        crossings: circuit.count(Gate::Cross),
        max_detuning: crate::model::format_rational(&complex.max_detuning()),
        gap: crate::model::format_rational(&gsm.gap),
        verified,
        complex,
    })
}

/// Complex whose ground manifold projects onto the inputs with `f = 1`.
/// An output port free of blockades with other ports is fixed directly;
/// otherwise it is demoted to an ancilla with extra detuning of twice the gap.
pub fn constrain_output(complex: &Complex, output: &str) -> Result<Complex> {
    let p = complex
        .port_atom(output)
        .ok_or_else(|| Error::invalid(format!("no port labelled `{output}`")))?;
    let gsm = enumerate_gsm_with(
        complex,
        &GsmOptions {
            max_atoms: MAX_VERIFY_ATOMS,
            ..GsmOptions::default()
        },
    )?;
    if !gsm.configurations.iter().any(|c| c.is_occupied(p)) {
        return Err(Error::EmptyLanguage(format!("output `{output}` is never 1: the constraint is unsatisfiable")));
    }
    let nb = complex.graph().neighbors(p);
    if complex.ports().iter().all(|q| !nb.contains(q.index)) && complex.n_atoms() <= GsmOptions::default().max_atoms {
        if let Ok(c) = fix_port(complex, output) {
            return Ok(c);
        }
    }
    let mut det = complex.detunings().to_vec();
    det[p] += gsm.gap * crate::model::rational(2);
    let ports = complex.ports().iter().filter(|q| q.index != p).cloned().collect();
    complex.with_detunings(det)?.with_ports(ports)
}

/// Joins two compiled complexes at their outputs, so the ground manifold
/// holds the input pairs with `f1(x) = f2(x')`.
pub fn equality_split(c1: &Complex, out1: &str, c2: &Complex, out2: &str) -> Result<Complex> {
    let opts = crate::amalgam::AmalgamOptions {
        abstract_only: true,
        demotion: crate::amalgam::Demotion::Always,
        ..Default::default()
    };
    // keep labels distinct: the second complex's other ports get a prime
    let ports = c2
        .ports()
        .iter()
        .map(|p| {
            let label = if p.label == out2 { p.label.clone() } else { format!("{}'", p.label) };
            crate::model::Port::new(label, p.index)
        })
        .collect();
    let c2 = &c2.with_ports(ports)?;
    let (l1, _) = crate::amalgam::language_of(c1)?;
    let (l2, _) = crate::amalgam::language_of(c2)?;
    Ok(crate::amalgam::amalgamate_with_languages(c1, &l1, c2, &l2, &[(out1.into(), out2.into())], &opts)?.complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::f_z2;
    use crate::gsm::realizes_language;
    use crate::language::{named, satisfying_language};
    use crate::model::Language;

    fn f(src: &str) -> BooleanFunction {
        BooleanFunction::parse(src).unwrap()
    }

    #[test]
    fn and_is_nor_of_inverted_inputs() {
        let c = nor_decompose(&f("x1 & x2")).unwrap();
        assert_eq!(c.count(Gate::Nor), 1);
        assert_eq!(c.count(Gate::Not), 2);
        assert_eq!(c.count(Gate::Cpy), 0);
        assert!(c.computes(&f("x1 & x2")));
    }

    #[test]
    fn identity_is_a_wire() {
        let c = nor_decompose(&f("x1")).unwrap();
        assert_eq!(c.nodes.len(), 2);
        let p = planarize(&c, Crossover::Complex).unwrap();
        let k = circuit_to_complex(&p, &CompileOptions::default()).unwrap();
        assert_eq!(k.n_atoms(), 3);
        assert!(realizes_language(&k, &named::lnk()).unwrap().is_yes());
    }

    #[test]
    fn parity_on_four_inputs() {
        let g = f_z2(4);
        let c = nor_decompose(&g).unwrap();
        assert!(c.computes(&g));
        let p = planarize(&c, Crossover::Complex).unwrap();
        assert!(p.computes(&g));
        assert!(p.is_planar());
    }

    fn swap_circuit() -> CircuitGraph {
        // x1 → CPY(0, 1), x2 → CPY(2, 3); NOR(0, 3), NOR(1, 2), NOR of both
        let nodes = vec![
            Gate::Input(0),
            Gate::Input(1),
            Gate::Cpy,
            Gate::Cpy,
            Gate::Nor,
            Gate::Nor,
            Gate::Nor,
            Gate::Output,
        ];
        let w = |a, p, b, q| Wire { from: (a, p), to: (b, q) };
        CircuitGraph {
            n_inputs: 2,
            nodes,
            wires: vec![
                w(0, 0, 2, 0),
                w(1, 0, 3, 0),
                w(2, 0, 4, 0),
                w(3, 1, 4, 1),
                w(2, 1, 5, 0),
                w(3, 0, 5, 1),
                w(4, 0, 6, 0),
                w(5, 0, 6, 1),
                w(6, 0, 7, 0),
            ],
            embedding: None,
        }
    }

    #[test]
    fn one_swap_one_crossover() {
        let c = swap_circuit();
        c.validate().unwrap();
        let table = BooleanFunction::from_fn(2, |x| c.evaluate(x)).unwrap();
        let p = planarize(&c, Crossover::Complex).unwrap();
        assert_eq!(p.count(Gate::Cross), 1);
        assert!(p.computes(&table));
        let gates = planarize(&c, Crossover::Gates).unwrap();
        assert_eq!(gates.count(Gate::Cross), 0);
        assert!(gates.computes(&table));
    }

    #[test]
    fn planar_circuit_is_kept() {
        let c = nor_decompose(&f("x1 nor x2")).unwrap();
        let p = planarize(&c, Crossover::Complex).unwrap();
        assert_eq!(p.nodes.len(), c.nodes.len());
        assert_eq!(p.count(Gate::Cross), 0);
    }

    #[test]
    fn crossover_gates_swap_values() {
        // a lone swap realized with gates: Q = B on the left, R = A on the right
        let mut t = Tracks {
            nodes: vec![],
            wires: vec![],
            sinks: vec![],
            pos: vec![],
            live: vec![],
            row: 0,
        };
        t.apply(Gate::Input(0), 0, &[]);
        t.apply(Gate::Input(1), 1, &[]);
        t.swap(0, Crossover::Gates);
        t.apply(Gate::Nor, 0, &[]);
        t.apply(Gate::Output, 0, &[]);
        let wires = t
            .wires
            .iter()
            .zip(&t.sinks)
            .map(|(&from, to)| Wire { from, to: to.unwrap() })
            .collect();
        let c = CircuitGraph {
            n_inputs: 2,
            nodes: t.nodes,
            wires,
            embedding: Some(t.pos),
        };
        c.validate().unwrap();
        assert!(c.computes(&f("x1 nor x2")));
        // read the left and right tracks separately through the drawing order
        let before_nor = c.nodes.len() - 2;
        let inc = c.incoming();
        let left = c.wires[inc[before_nor][0]].from;
        let right = c.wires[inc[before_nor][1]].from;
        let probe = |x: &[bool], src: (usize, usize)| {
            let mut vals: Vec<Vec<bool>> = vec![vec![]; c.nodes.len()];
            for v in c.topological_order() {
                let ins: Vec<bool> = inc[v].iter().map(|&k| vals[c.wires[k].from.0][c.wires[k].from.1]).collect();
                vals[v] = c.nodes[v].eval(x, &ins);
            }
            vals[src.0][src.1]
        };
        for r in 0..4 {
            let x = [r & 1 == 1, r & 2 == 2];
            assert_eq!(probe(&x, left), x[1]);
            assert_eq!(probe(&x, right), x[0]);
        }
    }

    #[test]
    fn nor_compiles_to_five_atoms() {
        let c = compile(&f("x1 nor x2"), &CompileOptions::default()).unwrap();
        assert_eq!(c.atoms, 5);
        assert!(c.verified);
    }

    #[test]
    fn or_compiles_to_six_atoms() {
        let c = compile(&f("x1 | x2"), &CompileOptions::default()).unwrap();
        assert_eq!(c.atoms, 6);
        assert!(c.verified);
        assert!(realizes_language(&c.complex, &named::or()).unwrap().is_yes());
    }

    #[test]
    fn detunings_stay_small() {
        for src in ["x1 ^ x2", "x1 == x2", "(x1 & x2) | x3", "x1 ^ x2 ^ x3", "0", "x2 | 1"] {
            for nor in [NorVariant::Ring, NorVariant::Triangle] {
                let g = f(src);
                let g = if g.n_inputs() == 0 { BooleanFunction::from_fn(1, |_| g.row(0)).unwrap() } else { g };
                let opts = CompileOptions { nor, ..Default::default() };
                let c = compile(&g, &opts).unwrap();
                assert!(c.verified, "{src}");
                let max = c.complex.max_detuning();
                assert!(max <= crate::model::rational(3), "{src}: {max}");
                assert!(c.complex.detunings().iter().all(|d| d.is_integer()));
                let gsm = enumerate_gsm_with(&c.complex, &GsmOptions { max_atoms: 256, ..Default::default() }).unwrap();
                assert!(gsm.gap >= crate::model::rational(1), "{src}");
            }
        }
    }

    #[test]
    fn constrained_xnor() {
        let c = compile(&f("x1 == x2"), &CompileOptions::default()).unwrap();
        let k = constrain_output(&c.complex, "y").unwrap();
        assert!(realizes_language(&k, &Language::from_strs(2, &["00", "11"]).unwrap()).unwrap().is_yes());
    }

    #[test]
    fn constrained_parity() {
        let g = f_z2(3);
        let c = compile(&g, &CompileOptions::default()).unwrap();
        assert!(c.verified);
        let k = constrain_output(&c.complex, "y").unwrap();
        let gsm = enumerate_gsm_with(&k, &GsmOptions { max_atoms: 256, ..Default::default() }).unwrap();
        let v = realizes_with(&k, &gsm, &satisfying_language(&g).unwrap()).unwrap();
        assert!(v.is_yes());
        assert_eq!(gsm.len(), 4);
    }

    #[test]
    fn unsatisfiable_constraint() {
        let g = BooleanFunction::from_fn(1, |_| false).unwrap();
        let c = compile(&g, &CompileOptions::default()).unwrap();
        assert!(matches!(constrain_output(&c.complex, "y"), Err(Error::EmptyLanguage(_))));
    }

    #[test]
    fn equality_of_two_gates() {
        let a = compile(&f("x1 & x2"), &CompileOptions::default()).unwrap().complex;
        let b = compile(&f("x1 | x2"), &CompileOptions::default()).unwrap().complex;
        let e = equality_split(&a, "y", &b, "y").unwrap();
        let expect = BooleanFunction::from_fn(4, |x| (x[0] && x[1]) == (x[2] || x[3])).unwrap();
        assert!(realizes_language(&e, &satisfying_language(&expect).unwrap()).unwrap().is_yes());
    }
}
