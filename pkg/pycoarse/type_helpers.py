from typing import Callable, Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

IndexSet = Union[FrozenSet[int], Iterable[int]]
PhiTable = Dict[int, Iterable[int]]
IndexMap = Union[Callable[[int], int], Sequence[int]]
Ladder = Union[List[int], Tuple[int, ...]]
