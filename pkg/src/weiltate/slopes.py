"""Slope vectors: the torsion-free shadow of a Weil number.

A slope vector assigns to each of the 2g indices the normalized p-adic
valuation of the corresponding Frobenius conjugate at one anchored
valuation (v(q) = 1); every other valuation is reached through the
group action, so the function g -> s[g(1)] carries all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .galois import CMGaloisModel, blocks_of_subgroup, compose


@dataclass(frozen=True)
class SlopeVector:
    """Exact slopes s_i = v(pi_i) with v(q) = 1, indexed 0-based."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def multiset(self):
        return sorted(self.values)

    def serialize(self) -> str:
        return " ".join(f"{v.numerator}/{v.denominator}" for v in self.values)


def validate_slopes(model: CMGaloisModel, s: SlopeVector) -> None:
    """Check the slope axioms; block constancy only when D is present."""
    n = model.group.degree
    if len(s) != n:
        raise ValueError(f"slope vector has length {len(s)}, expected {n}")
    for i, v in enumerate(s.values):
        if not 0 <= v <= 1:
            raise ValueError(f"slope s_{i + 1} = {v} outside [0, 1]")
        if v + s[model.tau[i]] != 1:
            raise ValueError(f"s_{i + 1} + s_tau({i + 1}) != 1")
    if model.D is not None:
        for block in blocks_of_subgroup(model, model.D).blocks:
            vals = {s[i] for i in block}
            if len(vals) != 1:
                raise ValueError(f"slopes not constant on D-block {tuple(b + 1 for b in block)}")
            total = vals.pop() * len(block)
            if total.denominator != 1:
                raise ValueError(f"block {tuple(b + 1 for b in block)}: |B| * s is not an integer")


def slopes_from_cm_type(model: CMGaloisModel, phi) -> SlopeVector:
    """Shimura-Taniyama: s_i = #(phi ∩ B) / #B on the D-block B of i."""
    if model.D is None:
        raise ValueError("model has no decomposition subgroup D")
    phi_set = set(phi)
    values = [None] * model.group.degree
    for block in blocks_of_subgroup(model, model.D).blocks:
        v = Fraction(len(phi_set & set(block)), len(block))
        for i in block:
            values[i] = v
    s = SlopeVector(tuple(values))
    validate_slopes(model, s)
    return s


def _point_signature_classes(model: CMGaloisModel, s: SlopeVector):
    """Partition indices by x ~ y iff s[g(x)] = s[g(y)] for every g."""
    sigs = {}
    for x in range(model.group.degree):
        sig = tuple(s[g[x]] for g in model.group.elements)
        sigs.setdefault(sig, []).append(x)
    return sigs


def fix_of_slope(model: CMGaloisModel, s: SlopeVector) -> frozenset:
    """Subgroup fixing the valuation vector of pi: {sigma : s[g sigma(1)] = s[g(1)] for all g}.

    Only sigma(1) matters, so the fixer is the preimage of the
    signature class of index 1 under sigma -> sigma(1).  Always a
    subgroup containing H.
    """
    validate_slopes(model, s)
    base_sig = tuple(s[g[0]] for g in model.group.elements)
    same = set()
    for x in range(model.group.degree):
        if tuple(s[g[x]] for g in model.group.elements) == base_sig:
            same.add(x)
    fix = frozenset(sigma for sigma in model.group.elements if sigma[0] in same)
    assert model.H <= fix
    return fix


def is_p_potentially_in(model: CMGaloisModel, s: SlopeVector, Z) -> bool:
    """Whether some power of pi lies in the subfield fixed by Z (H <= Z)."""
    Z = frozenset(tuple(z) for z in Z)
    if not model.H <= Z:
        raise ValueError("Z does not contain H, so it fixes no subfield of L")
    for z in Z:
        if z not in model.group:
            raise ValueError("Z is not a subset of the group")
    return Z <= fix_of_slope(model, s)


def minimal_field_index(model: CMGaloisModel, s: SlopeVector) -> int:
    """[G : Fix] = degree of the smallest field containing a power of pi."""
    return model.group.order // len(fix_of_slope(model, s))


def frobenius_rank(model: CMGaloisModel, s: SlopeVector) -> int:
    """Dimension of the span of the 2g slope functions, minus one."""
    validate_slopes(model, s)
    n = model.group.degree
    # columns indexed by group elements; identical columns do not change rank
    columns = sorted({tuple(s[g[x]] for x in range(n)) for g in model.group.elements})
    matrix = [[col[x] for col in columns] for x in range(n)]
    return _rational_rank(matrix) - 1


def _rational_rank(matrix) -> int:
    rows = [list(map(Fraction, row)) for row in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col]
        rows[rank] = [v / inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


# --- reference oracles (the definitional brute-force route) ---------------


def fixer_by_definition(model: CMGaloisModel, s: SlopeVector) -> frozenset:
    """Fix computed straight from the definition, one double loop over G."""
    out = []
    for sigma in model.group.elements:
        if all(s[compose(g, sigma)[0]] == s[g[0]] for g in model.group.elements):
            out.append(sigma)
    return frozenset(out)


def potential_by_valuation_grouping(model: CMGaloisModel, s: SlopeVector, Z) -> bool:
    """p-potential membership by grouping valuations over the subfield.

    Partitions G into the double cosets D g Z (valuations of the closure
    refining a fixed valuation of the subfield cut out by Z) and demands
    the slope function g -> s[g(1)] be constant on each class.  Without
    a decomposition subgroup the classes degenerate to the cosets g Z,
    which tests the same condition since slopes are block-constant.
    """
    Z = frozenset(tuple(z) for z in Z)
    D = model.D if model.D is not None else frozenset({tuple(range(model.group.degree))})
    anchors = sorted({z[0] for z in Z})
    for g in model.group.elements:
        base = s[g[0]]
        for d in D:
            dg = compose(d, g)
            for x in anchors:
                if s[dg[x]] != base:
                    return False
    return True
