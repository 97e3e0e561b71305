# service/pipeline.py
from dataclasses import dataclass
from typing import Optional
import numpy as np
from core.entities import BZGrid, JetFrameField, ModularParameter, OrthoFrameField, ThetaBasis
from core.harmonic import gram_schmidt_frames
from core.theta import embedding_lift, make_basis
from util.errors import stage


@dataclass
class ThetaPipeline:
    basis: ThetaBasis
    grid: BZGrid
    jets: JetFrameField
    frames: OrthoFrameField


def build_theta_pipeline(
    tau: ModularParameter,
    n_bands: int,
    n: int,
    twist: Optional[np.ndarray] = None,
) -> ThetaPipeline:
    """lift → frames, the shared front half of every theta command."""
    with stage("lift"):
        grid = BZGrid(n)
        basis = make_basis(tau, n_bands)
        jets = embedding_lift(basis, grid, twist=twist)
    with stage("frames"):
        frames = gram_schmidt_frames(jets)
    return ThetaPipeline(basis=basis, grid=grid, jets=jets, frames=frames)
