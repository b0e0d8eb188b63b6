"""
Disjoint sets with union by rank and path compression.

Used to merge signatures that are images of each other under subsystem permutations.
"""

from typing import Callable, Dict, Generic, Hashable, Iterable, List, TypeVar

ELEMENT = TypeVar('ELEMENT', bound=Hashable)
GENERATOR = TypeVar('GENERATOR')


class UnionFind(Generic[ELEMENT]):
    """
    Partition of a finite set.

    Args:
        elements (Iterable[ELEMENT]): the elements, each in its own block
    """

    def __init__(self, elements: Iterable[ELEMENT]) -> None:
        """Union find constructor."""
        self.parent: Dict[ELEMENT, ELEMENT] = {x: x for x in elements}
        self.rank: Dict[ELEMENT, int] = {x: 0 for x in self.parent}

    def find(self, x: ELEMENT) -> ELEMENT:
        """Return the representative of the block holding `x`."""
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: ELEMENT, y: ELEMENT) -> None:
        """Merge the blocks of `x` and `y`."""
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def __len__(self) -> int:
        """Number of blocks."""
        return sum(1 for x, parent in self.parent.items() if x == parent)


def find_orbits(
    generators: Iterable[GENERATOR],
    space: Iterable[ELEMENT],
    action: Callable[[GENERATOR, ELEMENT], ELEMENT],
) -> List[List[ELEMENT]]:
    """
    Orbits of a group action on a finite invariant set.

    Images that fall outside `space` are ignored.

    Args:
        generators: group generators
        space: the elements
        action: `action(g, x)` is the image of `x` under `g`

    Returns:
        List[List[ELEMENT]]: the orbits, ordered by first occurrence in `space`, members in `space` order
    """
    space = list(space)
    blocks = UnionFind(space)
    for g in generators:
        for x in space:
            y = action(g, x)
            if y in blocks.parent:
                blocks.union(x, y)
    orbits: Dict[ELEMENT, List[ELEMENT]] = {}
    for x in space:
        orbits.setdefault(blocks.find(x), []).append(x)
    return list(orbits.values())
