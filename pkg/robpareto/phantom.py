"""
One-dimensional dose phantom under rigid shifts.

Spots deposit Gaussian dose profiles along a grid of voxels. A scenario
shifts every spot center by an integer number of voxels. The two objectives
are the weighted squared target under/overdose and the weighted squared dose
outside the target:

    f_1(x;s) = w_T sum_{v in T} (d(v;s) . x - dhat)^2
    f_2(x;s) = w_R sum_{v in R} (d(v;s) . x)^2 + w_U sum_{v in U} (d(v;s) . x)^2

with U every voxel outside the target and the rectum.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .core import Candidate, Instance, ScenarioSet, TableMap, simplex_lattice
from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhantomConfig:
    grid_points: int = 60
    spots: int = 12
    target: tuple = (24, 36)
    rectum: tuple = (38, 46)
    prescribed_dose: float = 1.0
    weights: tuple = (1e3, 1e2, 1.0)
    shifts: tuple = (-3, 0, 3)
    sigma: float = 2.0
    levels: int = 6

    def __post_init__(self):
        object.__setattr__(self, "target", tuple(int(v) for v in self.target))
        object.__setattr__(self, "rectum", tuple(int(v) for v in self.rectum))
        object.__setattr__(self, "weights", tuple(float(v) for v in self.weights))
        object.__setattr__(self, "shifts", tuple(int(v) for v in self.shifts))
        if self.grid_points < 2 or self.spots < 1 or self.levels < 1:
            raise ConfigError("phantom needs at least 2 grid points, 1 spot and 1 lattice level")
        for name, (lo, hi) in (("target", self.target), ("rectum", self.rectum)):
            if not (0 <= lo < hi <= self.grid_points):
                raise ConfigError(f"{name} span {lo}..{hi} is not inside the grid of {self.grid_points} voxels")
        if self.target[0] < self.rectum[1] and self.rectum[0] < self.target[1]:
            raise ConfigError("target and rectum spans overlap")
        if len(self.weights) != 3 or min(self.weights) <= 0.0:
            raise ConfigError(f"phantom weights (w_T, w_R, w_U) must be three positive numbers, got {self.weights}")
        if not self.shifts or len(set(self.shifts)) != len(self.shifts):
            raise ConfigError(f"shifts must be distinct and nonempty, got {self.shifts}")
        if self.sigma <= 0.0 or self.prescribed_dose <= 0.0:
            raise ConfigError("kernel width and prescribed dose must be positive")

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"invalid phantom configuration: {err}")

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    def masks(self):
        voxels = np.arange(self.grid_points)
        target = (voxels >= self.target[0]) & (voxels < self.target[1])
        rectum = (voxels >= self.rectum[0]) & (voxels < self.rectum[1])
        return target, rectum, ~(target | rectum)


def scenario_id(shift):
    return f"{shift:+d}"


def spot_centers(cfg):
    # Spots cover the target plus a margin on both sides
    lo, hi = cfg.target
    return np.linspace(lo - 3.0, hi - 1.0 + 3.0, cfg.spots)


def dose_matrix(cfg, shift=0):
    """Deposition d(v;s) for every voxel v (rows) and spot (columns)."""
    voxels = np.arange(cfg.grid_points, dtype=float)[:, None]
    centers = spot_centers(cfg)[None, :] + shift
    return np.exp(-((voxels - centers) ** 2) / (2.0 * cfg.sigma ** 2))


def fluence_scale(cfg):
    """Total spot weight whose uniform split gives the prescribed mean target dose in the nominal scenario."""
    target, _, _ = cfg.masks()
    kernel_sum = dose_matrix(cfg, 0)[target].sum(axis=1).mean()
    return cfg.spots * cfg.prescribed_dose / kernel_sum


def _objectives(cfg, X, shift):
    target, rectum, other = cfg.masks()
    w_t, w_r, w_u = cfg.weights
    dose = np.atleast_2d(X) @ dose_matrix(cfg, shift).T
    f1 = w_t * np.sum((dose[:, target] - cfg.prescribed_dose) ** 2, axis=1)
    f2 = w_r * np.sum(dose[:, rectum] ** 2, axis=1) + w_u * np.sum(dose[:, other] ** 2, axis=1)
    return np.stack([f1, f2], axis=-1)


def evaluate_weights(cfg, x, shift=None):
    """Objective vectors of spot weights x: one per shift in cfg order, or the single requested shift."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != cfg.spots or np.any(x < 0.0):
        raise ConfigError(f"spot weights must be {cfg.spots} nonnegative numbers")
    if shift is not None:
        return _objectives(cfg, x, shift)[0]
    return np.stack([_objectives(cfg, x, s)[0] for s in cfg.shifts])


def spot_lattice(cfg):
    """Counts c in Z^k_+ with sum(c) <= levels, lexicographic."""
    counts = simplex_lattice(cfg.spots + 1, cfg.levels) * cfg.levels
    return np.rint(counts[:, :-1]).astype(int)


def generate(cfg=None, name="phantom"):
    cfg = cfg or PhantomConfig()
    scale = fluence_scale(cfg)
    counts = spot_lattice(cfg)
    X = counts * (scale / cfg.levels)
    images = {scenario_id(s): _objectives(cfg, X, s) for s in cfg.shifts}
    candidates, table = [], {}
    for k, (c, x) in enumerate(zip(counts, X)):
        label = "-".join(str(v) for v in c)
        candidates.append(Candidate(label, tuple(float(v) for v in x)))
        table[label] = {sid: vals[k] for sid, vals in images.items()}
    logger.info("phantom %s: %d candidates, %d scenarios, fluence scale %.6g",
                name, len(candidates), len(cfg.shifts), scale)
    scenarios = ScenarioSet(tuple(scenario_id(s) for s in cfg.shifts))
    metadata = {"phantom": cfg.to_dict(), "fluence_scale": scale}
    return Instance(scenarios, TableMap(table), tuple(candidates), name=name, metadata=metadata)
