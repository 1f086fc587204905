from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .run_config import Gates, RunConfig


@dataclass(frozen=True)
class CasePreset:
    key: str
    title: str
    lie_type: str
    rank: int
    subset: Tuple[int, ...]  # 1-based nodes
    optional: bool = False   # excluded from the default catalog run

    def to_config(self, q: float = 0.5, N: int = 16, M: int = 8, gates: Gates = None, **kwargs) -> RunConfig:
        return RunConfig(
            lie_type=self.lie_type,
            rank=self.rank,
            q=q,
            subset=list(self.subset),
            N=N,
            M=M,
            gates=gates or Gates(),
            **kwargs,
        )


DEFAULT_CATALOG: List[CasePreset] = [
    CasePreset(
        key="a1_full",
        title="A1, full flag (quantum Podles sphere as G_q/T)",
        lie_type="A",
        rank=1,
        subset=(),
    ),
    CasePreset(
        key="a1_group",
        title="A1, S = {1}: K = G, zero legs",
        lie_type="A",
        rank=1,
        subset=(1,),
    ),
    CasePreset(
        key="a2_full",
        title="A2, full flag",
        lie_type="A",
        rank=2,
        subset=(),
    ),
    CasePreset(
        key="a2_projective",
        title="A2, S = {1}: quantum projective plane",
        lie_type="A",
        rank=2,
        subset=(1,),
    ),
    CasePreset(
        key="a2_group",
        title="A2, S = {1, 2}: K = G",
        lie_type="A",
        rank=2,
        subset=(1, 2),
    ),
    CasePreset(
        key="b2_full",
        title="B2, full flag",
        lie_type="B",
        rank=2,
        subset=(),
    ),
    CasePreset(
        key="b2_long",
        title="B2, S = {1}",
        lie_type="B",
        rank=2,
        subset=(1,),
    ),
    CasePreset(
        key="b2_short",
        title="B2, S = {2}",
        lie_type="B",
        rank=2,
        subset=(2,),
    ),
    CasePreset(
        key="a3_ends",
        title="A3, S = {1, 3}",
        lie_type="A",
        rank=3,
        subset=(1, 3),
        optional=True,
    ),
]

PRESETS: Dict[str, CasePreset] = {p.key: p for p in DEFAULT_CATALOG}
