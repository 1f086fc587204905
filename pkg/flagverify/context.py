"""
Verification context: the flag manifold G_q/K_{S,q} fixed by a root datum and
a node set S, plus the truncation used to realize it in theta_w.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

import numpy as np

from algebra.rootdata import (
    RootDatum,
    WeylElt,
    bar_node,
    build_root_datum,
    shortest_coset_rep,
    weyl_from_word,
)
from catalog.run_config import Gates, RunConfig
from polalg.tensorop import SafeBlock


class FlagVerificationError(RuntimeError):
    """Raised when two constructions of the same operator disagree or a k operator is degenerate."""
    pass


@dataclass
class FlagContext:
    datum: RootDatum
    subset: FrozenSet[int]
    w: WeylElt
    N: int
    M: int
    gates: Gates = field(default_factory=Gates)
    battery_depth: int = 4
    samples: int = 20
    seed: int = 0
    case_id: str = ""
    _operators: Dict = field(default_factory=dict, repr=False)

    @property
    def legs(self) -> int:
        return self.w.length

    @property
    def word(self) -> Tuple[int, ...]:
        return self.w.word

    @property
    def eps_target(self) -> Tuple[int, ...]:
        """epsilon_r = 1 exactly when bar(alpha_r) lies in S."""
        return tuple(int(bar_node(self.datum, r) in self.subset) for r in self.datum.nodes)

    @property
    def block(self) -> SafeBlock:
        return SafeBlock(self.legs, self.N, self.M)

    def rng(self, salt: int = 0) -> np.random.Generator:
        """Independent, reproducible generator for one check."""
        return np.random.default_rng([self.seed, salt])

    def summary(self) -> dict:
        return {
            "case_id": self.case_id,
            "lie_type": self.datum.lie_type,
            "rank": self.datum.rank,
            "q": self.datum.q,
            "subset": [s + 1 for s in sorted(self.subset)],
            "word": [i + 1 for i in self.word],
            "N": self.N,
            "M": self.M,
            "eps_target": list(self.eps_target),
        }


def build_context(datum: RootDatum, subset: Sequence[int], N: int, M: int,
                  word: Optional[Sequence[int]] = None, gates: Optional[Gates] = None,
                  battery_depth: int = 4, samples: int = 20, seed: int = 0,
                  case_id: str = "") -> FlagContext:
    """Context for 0-based ``subset``; ``word`` optionally picks another reduced word of the same w."""
    subset = datum.validate_nodes(subset)
    w = shortest_coset_rep(datum, subset)
    if word is not None:
        alt = weyl_from_word(datum, word)
        if alt.action != w.action:
            raise FlagVerificationError(
                f"word {[i + 1 for i in word]} does not represent the shortest element of w_0 W_S"
            )
        w = alt
    return FlagContext(
        datum=datum,
        subset=subset,
        w=w,
        N=N,
        M=M,
        gates=gates or Gates(),
        battery_depth=battery_depth,
        samples=samples,
        seed=seed,
        case_id=case_id or f"{datum.label}-S{''.join(str(s + 1) for s in sorted(subset))}",
    )


def context_from_config(config: RunConfig) -> FlagContext:
    datum = build_root_datum(config.lie_type, config.rank, config.q)
    word = None if config.word is None else [i - 1 for i in config.word]
    return build_context(
        datum,
        [s - 1 for s in config.subset],
        config.N,
        config.M,
        word=word,
        gates=config.gates,
        battery_depth=config.battery_depth,
        samples=config.samples,
        seed=config.seed,
        case_id=config.case_id,
    )
