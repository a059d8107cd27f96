# specker.py
"""Embedding G_k into products of copies of Z.

h_n zeroes every branch from position n on. Applied to all branches and
prefixes of a generator it respects the relations, so it extends to an
endomorphism of G whose image lives over the finite set h_n(U). The image
has the free basis of buildBasisCountable, and the coordinates in that basis
at levels n = n_0, n_0 + 1, ... give the embedding.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Sequence, Tuple

import pandas as pd

from workbench.errors import DepthError, InputError
from workbench.freeness import FreeBasisCert, buildBasisCountable, expressInBasis
from workbench.lattice import quotient_invariants
from workbench.shygroup import (
    Branch,
    BranchSet,
    BranchTuple,
    Generator,
    GroupElement,
    XGen,
    YGen,
    generator_key,
    integral_form,
    raiseLevel,
)

Vector = Dict[Tuple[int, int], int]


def hTrunc(eta: Branch, n: int) -> Branch:
    return Branch.make(eta.restrict(n), 0)


def truncate_prefix(nu: str, n: int) -> str:
    return nu[:n] + "0" * max(len(nu) - n, 0)


def _map_generator(g: Generator, n: int) -> Generator:
    branches = tuple(hTrunc(b, n) for b in g.tuple.branches)
    if isinstance(g, XGen):
        return XGen(g.m, BranchTuple(branches, g.m), truncate_prefix(g.nu, n))
    return YGen(BranchTuple(branches), g.n)


def fnHat(e: GroupElement, n: int) -> GroupElement:
    terms: Dict[Generator, Fraction] = {}
    for g, c in e.terms.items():
        image = _map_generator(g, n)
        terms[image] = terms.get(image, Fraction(0)) + c
    return GroupElement(e.kstar, terms).normal_form()


@dataclass
class EmbeddingSpec:
    n: int
    cert: FreeBasisCert
    index: Dict[Generator, int]

    @property
    def coordinateCount(self) -> int:
        return len(self.index)


def embedding_spec(U: BranchSet, kstar: int, n: int, depth: int) -> EmbeddingSpec:
    image = BranchSet(frozenset(hTrunc(b, n) for b in U.branches))
    cert = buildBasisCountable(image, kstar, max(depth, n))
    return EmbeddingSpec(n, cert, {g: i for i, g in enumerate(cert.basis())})


def coordinates(e: GroupElement, spec: EmbeddingSpec) -> Dict[int, int]:
    image = fnHat(e, spec.n)
    try:
        form = integral_form(image, spec.cert.depth + 1)
    except (DepthError, InputError):
        raise DepthError(f"basis does not cover image: {image} has no integral form in scope")
    out: Dict[int, int] = {}
    for g, c in form.terms.items():
        if not spec.cert.in_scope(g):
            raise DepthError(f"basis does not cover image: {g} lies beyond depth {spec.cert.depth}")
        for b, k in expressInBasis(g, spec.cert).items():
            position = spec.index[b]
            value = out.get(position, 0) + int(c) * k
            if value:
                out[position] = value
            else:
                out.pop(position)
    return out


def embed(e: GroupElement, levels: Sequence[int], specs: Dict[int, EmbeddingSpec]) -> Vector:
    vector: Vector = {}
    for n in levels:
        for i, value in coordinates(e, specs[n]).items():
            vector[(n, i)] = value
    return vector


def injectivity_level(elements: Sequence[GroupElement]) -> int:
    """A level from which h_n keeps every branch and prefix of the elements apart.

    Sufficient, not least: the rank-two pair y[*0;0], y[1*0;0] gets 2 here
    but is already embedded injectively at 1.
    """
    branches = sorted({b for e in elements for b in e.branches()}, key=str)
    widest = max((a.split_depth(b) for a, b in itertools.combinations(branches, 2)), default=0)
    prefixes = [len(b.prefix) for b in branches]
    prefixes += [len(g.nu) for e in elements for g in e.terms if isinstance(g, XGen)]
    return widest + max(prefixes, default=0) + 1


def _rank(rows: List[List[Fraction]], width: int) -> int:
    if width == 0:
        return 0
    scaled = []
    for row in rows:
        denominator = lcm(*[v.denominator for v in row]) if row else 1
        scaled.append([int(v * denominator) for v in row])
    return quotient_invariants(scaled, width)[0]


def source_rank(elements: Sequence[GroupElement]) -> int:
    """Rank of the subgroup generated by `elements`, read off level coordinates."""
    if not elements:
        return 0
    level = max(e.level for e in elements)
    forms = [raiseLevel(e, level) for e in elements]
    columns = sorted({g for f in forms for g in f.terms}, key=generator_key)
    rows = [[f.terms.get(g, Fraction(0)) for g in columns] for f in forms]
    return _rank(rows, len(columns))


def kernel_rank_check(elements: Sequence[GroupElement], levels: Sequence[int],
                      specs: Dict[int, EmbeddingSpec]) -> Tuple[int, int]:
    """(rank of the embedded vectors, rank of the elements); equal means the
    embedding is injective on the subgroup they generate."""
    vectors = [embed(e, levels, specs) for e in elements]
    keys = sorted({k for v in vectors for k in v})
    rows = [[Fraction(v.get(k, 0)) for k in keys] for v in vectors]
    return _rank(rows, len(keys)), source_rank(elements)


def format_vector(vector: Vector) -> str:
    return " ".join(f"{n}:{i}={v}" for (n, i), v in sorted(vector.items())) or "0"


def vector_frame(vector: Vector) -> pd.DataFrame:
    rows = [{"level": n, "index": i, "value": v} for (n, i), v in sorted(vector.items())]
    return pd.DataFrame(rows, columns=["level", "index", "value"])
