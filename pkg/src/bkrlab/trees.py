"""Full binary trees describing how a product of r factors is bracketed.

A tree is a nested pair of tuples whose leaves are 0-based factor indices,
e.g. ``((0, 1), 2)`` for (A1 A2) A3. Commutative (single-factor) shapes use
the leaf ``0`` everywhere and are kept in a canonical form where the two
children of every node are sorted, larger subtree on the left, so the
left comb of four factors reads ((AA)A)A.
"""

from __future__ import annotations

import ast
import itertools
from functools import lru_cache
from typing import Union

from .config import BKRInputError

BracketTree = Union[int, tuple]

MAX_LEAVES = 10


def leaves(tree: BracketTree) -> list[int]:
    if isinstance(tree, tuple):
        return leaves(tree[0]) + leaves(tree[1])
    return [tree]


def n_leaves(tree: BracketTree) -> int:
    if isinstance(tree, tuple):
        return n_leaves(tree[0]) + n_leaves(tree[1])
    return 1


def check_tree(tree: BracketTree, n_events: int) -> None:
    if isinstance(tree, tuple):
        if len(tree) != 2:
            raise BKRInputError(f"tree node {tree!r} must have exactly two children")
        check_tree(tree[0], n_events)
        check_tree(tree[1], n_events)
    elif not isinstance(tree, int) or isinstance(tree, bool) or not 0 <= tree < n_events:
        raise BKRInputError(f"leaf {tree!r} is not an event index in [0, {n_events})")


def left_comb(r: int) -> BracketTree:
    """(...((A1 A2) A3) ... ) Ar."""
    tree: BracketTree = 0
    for i in range(1, r):
        tree = (tree, i)
    return tree


def render(tree: BracketTree, labels=None) -> str:
    """Juxtaposition notation: ``((0,1),2)`` -> "(A1A2)A3", unlabeled "(AA)A"."""
    def name(leaf):
        if labels is None:
            return f"A{leaf + 1}"
        return labels(leaf) if callable(labels) else labels[leaf]

    def go(node, top):
        if isinstance(node, tuple):
            s = go(node[0], False) + go(node[1], False)
            return s if top else f"({s})"
        return name(node)

    return go(tree, True)


def render_shape(tree: BracketTree) -> str:
    return render(tree, labels=lambda leaf: "A")


def parse_tree(text: str) -> BracketTree:
    """Parse a nested-tuple literal such as ``"((0,1),(2,3))"``."""
    try:
        tree = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise BKRInputError(f"cannot parse tree {text!r}") from None
    if not isinstance(tree, (tuple, int)):
        raise BKRInputError(f"cannot parse tree {text!r}")
    check_tree(tree, 1 << 30)
    return tree


def _check_r(r: int, lo: int) -> None:
    if not lo <= r <= MAX_LEAVES:
        raise BKRInputError(f"r={r} outside supported range [{lo}, {MAX_LEAVES}]")


# -- ordered shapes (Catalan) --------------------------------------------------

def _split_trees(lo: int, hi: int) -> list[BracketTree]:
    if hi - lo == 1:
        return [lo]
    out = []
    for mid in range(lo + 1, hi):
        for left in _split_trees(lo, mid):
            for right in _split_trees(mid, hi):
                out.append((left, right))
    return out


def enumerate_parenthesizations(r: int) -> list[BracketTree]:
    """All bracketings of A1...Ar, ordered by the position of the top split."""
    _check_r(r, 2)
    return _split_trees(0, r)


def parenthesizations_from_words(r: int) -> list[BracketTree]:
    """Same set as `enumerate_parenthesizations`, built from preorder words.

    Each tree corresponds to a word over {node, leaf} of length 2r-1 read in
    preorder; every placement of the r-1 node symbols is tried and the valid
    words are decoded. Used as an independent cross-check.
    """
    _check_r(r, 2)
    length = 2 * r - 1
    out = []
    for node_pos in itertools.combinations(range(length), r - 1):
        word = ["L"] * length
        for p in node_pos:
            word[p] = "N"
        need = 1
        ok = True
        for sym in word:
            if need == 0:
                ok = False
                break
            need += 1 if sym == "N" else -1
        if not ok or need != 0:
            continue
        counter = itertools.count()
        pos = iter(word)

        def build():
            if next(pos) == "N":
                left = build()
                return (left, build())
            return next(counter)

        out.append(build())
    return out


# -- commutative shapes (Wedderburn-Etherington) --------------------------------

def _key(tree: BracketTree) -> tuple:
    if isinstance(tree, tuple):
        return (n_leaves(tree), _key(tree[0]), _key(tree[1]))
    return (1,)


def canonical(tree: BracketTree) -> BracketTree:
    """Forget leaf labels and sort children; one representative per class."""
    if not isinstance(tree, tuple):
        return 0
    a, b = canonical(tree[0]), canonical(tree[1])
    if _key(a) < _key(b):
        a, b = b, a
    return (a, b)


def same_commutative_class(t1: BracketTree, t2: BracketTree) -> bool:
    return canonical(t1) == canonical(t2)


def enumerate_commutative_shapes(r: int) -> list[BracketTree]:
    """Canonical representatives of bracketings of A^r up to child swaps."""
    _check_r(r, 1)
    if r == 1:
        return [0]
    seen = {canonical(t) for t in _split_trees(0, r)}
    return sorted(seen, key=_key)


@lru_cache(maxsize=None)
def _direct_shapes(n: int) -> tuple:
    if n == 1:
        return (0,)
    out = []
    for a in range(1, n // 2 + 1):
        for x in _direct_shapes(a):
            for y in _direct_shapes(n - a):
                if a == n - a and _key(y) < _key(x):
                    continue
                out.append((y, x))
    return tuple(out)


def commutative_shapes_direct(r: int) -> list[BracketTree]:
    """Canonical classes generated size-split first, without any dedup step."""
    _check_r(r, 1)
    return list(_direct_shapes(r))
