# stability.py
"""Types, contradictory pairs, splitting ranks and instability trees over
finite structures.

Formulas are quantifier-free. Variables whose names start with `x` range over
the tuple being typed (`x` or `x0` is its first entry, `x1` the second, ...);
every other variable is a parameter and is filled from the parameter set.

The rank here uses only the splitting clause: rk(B) >= b+1 when some
contradictory pair cuts B into two parts of rank >= b. The clause about
unions of large families has no finite content and is left out.
"""
import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from workbench.errors import DepthError, InputError

RANK_HEADER = "rank: splitting clause only (finite structures)"

Point = Tuple[int, ...]


@dataclass
class FinModel:
    size: int
    relations: Dict[str, FrozenSet[Tuple[int, ...]]] = field(default_factory=dict)
    arities: Dict[str, int] = field(default_factory=dict)
    functions: Dict[str, Dict[Tuple[int, ...], int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise InputError("a model needs at least one element")
        for name, tuples in self.relations.items():
            arity = self.arities.setdefault(name, len(next(iter(tuples))) if tuples else 0)
            for t in tuples:
                if len(t) != arity or any(not 0 <= a < self.size for a in t):
                    raise InputError(f"relation {name}: bad tuple {t}")
        for name, table in self.functions.items():
            arity = self.arities.setdefault(name, len(next(iter(table))) if table else 0)
            expected = set(itertools.product(range(self.size), repeat=arity))
            if set(table) != expected:
                raise InputError(f"function {name} is not total on the universe")
            if any(not 0 <= v < self.size for v in table.values()):
                raise InputError(f"function {name} leaves the universe")

    @property
    def universe(self) -> range:
        return range(self.size)

    def relabel(self, perm: Sequence[int]) -> "FinModel":
        """The isomorphic copy in which element a is renamed perm[a]."""
        relations = {name: frozenset(tuple(perm[a] for a in t) for t in tuples) for name, tuples in self.relations.items()}
        functions = {
            name: {tuple(perm[a] for a in args): perm[v] for args, v in table.items()}
            for name, table in self.functions.items()
        }
        return FinModel(self.size, relations, dict(self.arities), functions)


def chain_model(size: int) -> FinModel:
    return FinModel(size, {"<": frozenset((a, b) for a in range(size) for b in range(size) if a < b)}, {"<": 2})


def complete_graph(size: int) -> FinModel:
    return FinModel(size, {"E": frozenset((a, b) for a in range(size) for b in range(size) if a != b)}, {"E": 2})


# --- formulas ---

@dataclass(frozen=True)
class Var:
    name: str

    def value(self, model: FinModel, env: Mapping[str, int]) -> int:
        if self.name not in env:
            raise InputError(f"unassigned variable {self.name!r}")
        return env[self.name]

    def names(self) -> Set[str]:
        return {self.name}

    def render(self, env: Mapping[str, int]) -> str:
        return str(env[self.name]) if self.name in env else self.name


@dataclass(frozen=True)
class Const:
    value_: int

    def value(self, model: FinModel, env: Mapping[str, int]) -> int:
        return self.value_

    def names(self) -> Set[str]:
        return set()

    def render(self, env: Mapping[str, int]) -> str:
        return str(self.value_)


@dataclass(frozen=True)
class Apply:
    name: str
    args: Tuple["Term", ...]

    def value(self, model: FinModel, env: Mapping[str, int]) -> int:
        if self.name not in model.functions:
            raise InputError(f"unknown function {self.name!r}")
        return model.functions[self.name][tuple(a.value(model, env) for a in self.args)]

    def names(self) -> Set[str]:
        return set().union(*(a.names() for a in self.args))

    def render(self, env: Mapping[str, int]) -> str:
        return f"{self.name}(" + ",".join(a.render(env) for a in self.args) + ")"


Term = object


@dataclass(frozen=True)
class Formula:
    op: str
    parts: Tuple = ()
    name: str = ""

    def holds(self, model: FinModel, env: Mapping[str, int]) -> bool:
        if self.op == "rel":
            if self.name not in model.relations:
                raise InputError(f"unknown relation {self.name!r}")
            return tuple(t.value(model, env) for t in self.parts) in model.relations[self.name]
        if self.op in ("<", "=", "!="):
            a, b = (t.value(model, env) for t in self.parts)
            if self.op == "<":
                if "<" not in model.relations:
                    raise InputError("model has no < relation")
                return (a, b) in model.relations["<"]
            return (a == b) if self.op == "=" else (a != b)
        if self.op == "!":
            return not self.parts[0].holds(model, env)
        if self.op == "&":
            return all(p.holds(model, env) for p in self.parts)
        if self.op == "|":
            return any(p.holds(model, env) for p in self.parts)
        raise AssertionError(self.op)

    def names(self) -> Set[str]:
        return set().union(*(p.names() for p in self.parts)) if self.parts else set()

    def render(self, env: Mapping[str, int]) -> str:
        if self.op == "rel":
            return f"{self.name}(" + ",".join(t.render(env) for t in self.parts) + ")"
        if self.op in ("<", "=", "!="):
            return f"{self.parts[0].render(env)}{self.op}{self.parts[1].render(env)}"
        if self.op == "!":
            return "!" + _wrap(self.parts[0], env)
        return self.op.join(_wrap(p, env) for p in self.parts)

    def __str__(self) -> str:
        return self.render({})

    def object_names(self) -> List[str]:
        return sorted(n for n in self.names() if n.startswith("x"))

    def parameters(self) -> List[str]:
        return sorted(n for n in self.names() if not n.startswith("x"))


def _wrap(f: Formula, env: Mapping[str, int]) -> str:
    text = f.render(env)
    return f"({text})" if f.op in ("&", "|") else text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(!=|[<=!&|(),]))")


def _tokenize(text: str) -> List[str]:
    tokens, pos = [], 0
    source = text.rstrip()
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None:
            raise InputError(f"unexpected character in formula {text!r}", line=1, column=pos + 1)
        tokens.append(match.group(match.lastindex))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise InputError(f"malformed formula {self.text!r}: expected {expected or 'more input'}")
        self.pos += 1
        return token

    def formula(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Formula("|", tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else Formula("&", tuple(parts))

    def unary(self) -> Formula:
        if self.peek() == "!":
            self.take()
            return Formula("!", (self.unary(),))
        if self.peek() == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def arguments(self) -> Tuple:
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return tuple(args)

    def term(self):
        token = self.take()
        if token.isdigit():
            return Const(int(token))
        if not re.match(r"[A-Za-z_]", token):
            raise InputError(f"malformed formula {self.text!r}: unexpected {token!r}")
        if self.peek() == "(":
            return Apply(token, self.arguments())
        return Var(token)

    def atom(self) -> Formula:
        start = self.pos
        token = self.take()
        if re.match(r"[A-Za-z_]", token) and self.peek() == "(":
            args = self.arguments()
            if self.peek() not in ("<", "=", "!="):
                return Formula("rel", args, token)
        self.pos = start
        left = self.term()
        op = self.take()
        if op not in ("<", "=", "!="):
            raise InputError(f"malformed formula {self.text!r}: expected a comparison, got {op!r}")
        return Formula(op, (left, self.term()))


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    out = parser.formula()
    if parser.peek() is not None:
        raise InputError(f"malformed formula {text!r}: trailing {parser.peek()!r}")
    return out


# --- types ---

def _object_env(formula: Formula, a: Point) -> Dict[str, int]:
    env = {}
    for name in formula.object_names():
        index = 0 if name == "x" else int(name[1:]) if name[1:].isdigit() else -1
        if not 0 <= index < len(a):
            raise InputError(f"object variable {name!r} does not fit tuples of length {len(a)}")
        env[name] = a[index]
    return env


@dataclass(frozen=True, order=True)
class Instance:
    formula: int
    params: Tuple[int, ...]


@dataclass(frozen=True)
class TypeRecord:
    instances: FrozenSet[Instance]
    rendered: Tuple[str, ...]

    def __str__(self) -> str:
        return "{" + ", ".join(self.rendered) + "}"


def instances(delta: Sequence[Formula], A: Sequence[int]) -> Iterator[Instance]:
    pool = sorted(set(A))
    for i, formula in enumerate(delta):
        for params in itertools.product(pool, repeat=len(formula.parameters())):
            yield Instance(i, params)


def satisfies(M: FinModel, delta: Sequence[Formula], inst: Instance, a: Point) -> bool:
    formula = delta[inst.formula]
    env = dict(zip(formula.parameters(), inst.params))
    env.update(_object_env(formula, a))
    return formula.holds(M, env)


def render_instance(delta: Sequence[Formula], inst: Instance) -> str:
    formula = delta[inst.formula]
    return formula.render(dict(zip(formula.parameters(), inst.params)))


def tpDelta(a: Point, A: Sequence[int], M: FinModel, delta: Sequence[Formula]) -> TypeRecord:
    chosen = sorted(i for i in instances(delta, A) if satisfies(M, delta, i, a))
    return TypeRecord(frozenset(chosen), tuple(render_instance(delta, i) for i in chosen))


def typeCount(m: int, A: Sequence[int], M: FinModel, delta: Sequence[Formula]) -> int:
    return len({tpDelta(a, A, M, delta).instances for a in itertools.product(M.universe, repeat=m)})


# --- contradictory pairs and ranks ---

@dataclass(frozen=True)
class FormulaPair:
    first: Instance
    second: Instance
    left: FrozenSet[Point]
    right: FrozenSet[Point]

    def describe(self, delta: Sequence[Formula]) -> str:
        return f"{render_instance(delta, self.first)} / {render_instance(delta, self.second)}"


def extension(M: FinModel, delta: Sequence[Formula], inst: Instance, m: int) -> FrozenSet[Point]:
    return frozenset(a for a in itertools.product(M.universe, repeat=m) if satisfies(M, delta, inst, a))


def contradictory_pairs(M: FinModel, delta: Sequence[Formula], m: int) -> List[FormulaPair]:
    """Pairs of instances no m-tuple satisfies together; parameters range over the whole model."""
    pool = [(i, extension(M, delta, i, m)) for i in instances(delta, list(M.universe))]
    out = []
    for (i, left), (j, right) in itertools.combinations(pool, 2):
        if left and right and not left & right:
            out.append(FormulaPair(i, j, left, right))
    return out


class RankTable:
    """Splitting ranks of subsets of M^m, memoized per instance."""

    def __init__(self, M: FinModel, delta: Sequence[Formula], m: int):
        self.model = M
        self.delta = list(delta)
        self.m = m
        self.pairs = contradictory_pairs(M, delta, m)
        self.memo: Dict[FrozenSet[Point], int] = {}

    def rank(self, B: FrozenSet[Point]) -> int:
        B = frozenset(B)
        if not B:
            return -1
        if B in self.memo:
            return self.memo[B]
        best = 0
        for pair in self.pairs:
            left, right = B & pair.left, B & pair.right
            if left and right:
                best = max(best, 1 + min(self.rank(left), self.rank(right)))
        self.memo[B] = best
        return best


def splitRank(B: Sequence[Point], M: FinModel, delta: Sequence[Formula], m: int = 1) -> int:
    return RankTable(M, delta, m).rank(frozenset(tuple(b) for b in B))


def all_tuples(M: FinModel, m: int) -> FrozenSet[Point]:
    return frozenset(itertools.product(M.universe, repeat=m))


# --- trees ---

@dataclass
class TreeNode:
    pair: Optional[FormulaPair] = None
    children: Tuple["TreeNode", ...] = ()
    leaf: Optional[Point] = None

    def depth(self) -> int:
        return 0 if self.pair is None else 1 + min(c.depth() for c in self.children)

    def preorder(self, delta: Sequence[Formula], path: str = "") -> List[str]:
        if self.pair is None:
            return [f"{path or '<>'}: leaf {self.leaf}"]
        lines = [f"{path or '<>'}: {self.pair.describe(delta)}"]
        for bit, child in enumerate(self.children):
            lines.extend(child.preorder(delta, path + str(bit)))
        return lines


def instabilityTree(M: FinModel, delta: Sequence[Formula], m: int, h: int,
                    budget: int = 200000) -> Optional[TreeNode]:
    """A binary tree of contradictory pairs of height h with a leaf tuple under
    every branch, each leaf satisfying the pair sides along its path."""
    table = RankTable(M, delta, m)
    failed: Set[Tuple[FrozenSet[Point], int]] = set()
    spent = [0]

    def grow(B: FrozenSet[Point], height: int) -> Optional[TreeNode]:
        if not B:
            return None
        if height == 0:
            return TreeNode(leaf=min(B))
        if (B, height) in failed:
            return None
        for pair in table.pairs:
            spent[0] += 1
            if spent[0] > budget:
                raise DepthError(f"search budget exceeded after {budget} pair checks")
            left, right = B & pair.left, B & pair.right
            if not left or not right:
                continue
            first = grow(left, height - 1)
            if first is None:
                continue
            second = grow(right, height - 1)
            if second is not None:
                return TreeNode(pair, (first, second))
        failed.add((B, height))
        return None

    tree = grow(all_tuples(M, m), h)
    if tree is not None:
        assert table.rank(all_tuples(M, m)) >= h
    return tree


def check_tree(tree: TreeNode, M: FinModel, delta: Sequence[Formula]) -> bool:
    """Every leaf satisfies the side of each pair chosen along its path."""

    def walk(node: TreeNode, sides: List[Instance]) -> bool:
        if node.pair is None:
            return node.leaf is not None and all(satisfies(M, delta, s, node.leaf) for s in sides)
        return all(
            walk(child, sides + [side])
            for child, side in zip(node.children, (node.pair.first, node.pair.second))
        )

    return walk(tree, [])


# --- ranks of types ---

def _realizations(M: FinModel, delta: Sequence[Formula], insts: Sequence[Instance], m: int) -> FrozenSet[Point]:
    return frozenset(a for a in all_tuples(M, m) if all(satisfies(M, delta, i, a) for i in insts))


def type_rank(p: TypeRecord, M: FinModel, delta: Sequence[Formula], m: int = 1) -> int:
    """Least rank of the set defined by a finite part of p; for a finite p that is p itself."""
    return RankTable(M, delta, m).rank(_realizations(M, delta, sorted(p.instances), m))


def minimal_subtype(p: TypeRecord, M: FinModel, delta: Sequence[Formula], m: int = 1) -> List[Instance]:
    """A smallest part of p already defining a set of rank type_rank(p)."""
    table = RankTable(M, delta, m)
    target = table.rank(_realizations(M, delta, sorted(p.instances), m))
    members = sorted(p.instances)
    for size in range(len(members) + 1):
        for part in itertools.combinations(members, size):
            if table.rank(_realizations(M, delta, part, m)) == target:
                return list(part)
    raise AssertionError("the whole type attains its own rank")
