"""Shared test helper: random disjoint cylinder decompositions."""

from normlab import Block


def extend(block: Block, h: int, bit: int) -> Block:
    sup = list(block.support)
    bits = list(block.bits)
    i = 0
    while i < len(sup) and sup[i] < h:
        i += 1
    sup.insert(i, h)
    bits.insert(i, bit)
    return Block(tuple(sup), tuple(bits))


def random_decomposition(rng, B0: Block, fresh_pool, max_splits: int = 3):
    """Split the cylinder of B0 into disjoint cylinders of refined blocks.

    Repeatedly picks a leaf and a support element it does not use yet,
    and replaces the leaf with its two one-bit refinements.  The leaves
    always partition [B0] exactly.
    """
    leaves = [B0]
    for _ in range(int(rng.integers(1, max_splits + 1))):
        i = int(rng.integers(0, len(leaves)))
        leaf = leaves[i]
        options = [h for h in fresh_pool if h not in leaf.support]
        if not options:
            continue
        h = int(options[int(rng.integers(0, len(options)))])
        leaves[i : i + 1] = [extend(leaf, h, 0), extend(leaf, h, 1)]
    return leaves
