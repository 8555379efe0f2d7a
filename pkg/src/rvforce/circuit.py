"""Boolean circuits with n inputs and m output bits.

Text format::

    inputs <n> outputs <m>
    g0 = XOR x0 x1
    g1 = NOT g0
    out = g1 g0          # first operand is the least significant output bit

Input ``x<i>`` is bit ``i`` (least significant first) of the sample point.
Simulation is bit-parallel: every wire carries a mask over all samples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import CircuitError

ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1, "CONST0": 0, "CONST1": 0}

_REF = re.compile(r"^([xg])(\d+)$")


@dataclass(frozen=True)
class Circuit:
    """Gate list over wire refs: ``0..n-1`` are inputs, ``n + j`` is gate ``j``."""

    n_inputs: int
    gates: tuple[tuple[str, tuple[int, ...]], ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.n_inputs < 1:
            raise CircuitError("circuit needs at least one input")
        for j, (op, args) in enumerate(self.gates):
            if op not in ARITY:
                raise CircuitError(f"g{j}: unknown gate {op!r}")
            if len(args) != ARITY[op]:
                raise CircuitError(f"g{j}: {op} takes {ARITY[op]} operand(s)")
            for a in args:
                if not 0 <= a < self.n_inputs + j:
                    raise CircuitError(f"g{j}: operand refers to a later or missing wire")
        for o in self.outputs:
            if not 0 <= o < self.n_inputs + len(self.gates):
                raise CircuitError("output refers to a missing wire")

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def max_output_length(self) -> int:
        return len(self.outputs)

    def ref_name(self, ref: int) -> str:
        return f"x{ref}" if ref < self.n_inputs else f"g{ref - self.n_inputs}"

    def simulate(self, input_masks: list[int], full: int) -> list[int]:
        """Propagate per-input sample masks; returns one mask per output bit."""
        if len(input_masks) != self.n_inputs:
            raise CircuitError("wrong number of input masks")
        wires = list(input_masks)
        for op, args in self.gates:
            if op == "AND":
                v = wires[args[0]] & wires[args[1]]
            elif op == "OR":
                v = wires[args[0]] | wires[args[1]]
            elif op == "XOR":
                v = wires[args[0]] ^ wires[args[1]]
            elif op == "NOT":
                v = full & ~wires[args[0]]
            elif op == "CONST0":
                v = 0
            else:
                v = full
            wires.append(v)
        return [wires[o] for o in self.outputs]

    def evaluate(self, point: int) -> int:
        """Output value (little-endian bits) on a single input point."""
        masks = [(point >> i) & 1 for i in range(self.n_inputs)]
        out = self.simulate(masks, 1)
        return sum(bit << b for b, bit in enumerate(out))

    def pruned(self) -> "Circuit":
        """Drop gates that no output depends on."""
        live = set(self.outputs)
        for j in range(len(self.gates) - 1, -1, -1):
            if self.n_inputs + j in live:
                live.update(self.gates[j][1])
        keep = [j for j in range(len(self.gates)) if self.n_inputs + j in live]
        remap = {i: i for i in range(self.n_inputs)}
        gates = []
        for new_j, j in enumerate(keep):
            op, args = self.gates[j]
            gates.append((op, tuple(remap[a] for a in args)))
            remap[self.n_inputs + j] = self.n_inputs + new_j
        return Circuit(self.n_inputs, tuple(gates), tuple(remap[o] for o in self.outputs))

    def with_outputs(self, outputs) -> "Circuit":
        return Circuit(self.n_inputs, self.gates, tuple(outputs))

    def render(self) -> str:
        lines = [f"inputs {self.n_inputs} outputs {len(self.outputs)}"]
        for j, (op, args) in enumerate(self.gates):
            lines.append(" ".join([f"g{j} =", op, *(self.ref_name(a) for a in args)]))
        lines.append("out = " + " ".join(self.ref_name(o) for o in self.outputs))
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise CircuitError("empty circuit file")
    lineno, head = lines[0]
    m = re.fullmatch(r"inputs\s+(\d+)\s+outputs\s+(\d+)", head)
    if not m:
        raise CircuitError(f"line {lineno}: expected 'inputs <n> outputs <m>'")
    n, m_out = int(m.group(1)), int(m.group(2))

    def ref(tok: str, j: int, lineno: int) -> int:
        r = _REF.match(tok)
        if not r:
            raise CircuitError(f"line {lineno}: bad operand {tok!r}")
        k = int(r.group(2))
        if r.group(1) == "x":
            if k >= n:
                raise CircuitError(f"line {lineno}: input x{k} out of range")
            return k
        if k >= j:
            raise CircuitError(f"line {lineno}: g{k} used before definition")
        return n + k

    gates: list[tuple[str, tuple[int, ...]]] = []
    outputs = None
    for lineno, line in lines[1:]:
        if outputs is not None:
            raise CircuitError(f"line {lineno}: content after the 'out' line")
        lhs, sep, rhs = line.partition("=")
        if not sep:
            raise CircuitError(f"line {lineno}: expected '='")
        lhs = lhs.strip()
        toks = rhs.replace(",", " ").split()
        if lhs == "out":
            outputs = tuple(ref(t, len(gates), lineno) for t in toks)
            continue
        if lhs != f"g{len(gates)}":
            raise CircuitError(f"line {lineno}: expected gate g{len(gates)}, got {lhs!r}")
        if not toks or toks[0] not in ARITY:
            raise CircuitError(f"line {lineno}: unknown gate operation")
        op, operands = toks[0], toks[1:]
        if len(operands) != ARITY[op]:
            raise CircuitError(f"line {lineno}: {op} takes {ARITY[op]} operand(s)")
        gates.append((op, tuple(ref(t, len(gates), lineno) for t in operands)))
    if outputs is None:
        raise CircuitError("missing 'out = ...' line")
    if len(outputs) != m_out:
        raise CircuitError(f"header declares {m_out} outputs, 'out' lists {len(outputs)}")
    return Circuit(n, tuple(gates), outputs)


def load_circuit(path) -> Circuit:
    return parse_circuit(Path(path).read_text())
