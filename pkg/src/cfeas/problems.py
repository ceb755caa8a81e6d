"""Seeded generators for benchmark instances, plus instance (de)serialization.

All randomness flows through a counter-based Philox bit generator keyed by the
instance seed, so regenerating with the same parameters is bit-identical and
reproducible across platforms (integers map to floats via numpy's standard
53-bit mantissa fill).
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InvalidSpec
from .geometry import (
    Ball,
    Box,
    Ellipsoid,
    EntryMask,
    Halfspace,
    ProblemPair,
    PsdCone,
    SetDescriptor,
)

DEFAULT_TANGENCY_GAP = 1e-3


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def gen_matrix_completion(n: int, r: int, obs_frac: float, seed: int) -> ProblemPair:
    """PSD matrix completion: X = PSD cone, Y = entries pinned on a mask.

    The ground truth A = B B^T (B n x r standard normal) is feasible by
    construction and serves as s_ref.  The mask is sampled symmetrically until
    it covers at least ceil(obs_frac * n^2) entries.  z0 is the masked matrix
    (A on the mask, zero elsewhere).

    The PSD cone plays the role of X because the mask projection is the cheap
    one and kernels end in P_Y, keeping eigendecompositions to one per X token.
    """
    if not 0 < r < n:
        raise InvalidSpec(f"need 0 < rank < n, got rank={r}, n={n}")
    if not 0.0 < obs_frac <= 1.0:
        raise InvalidSpec(f"obs_frac must lie in (0, 1], got {obs_frac}")
    rng = _rng(seed)
    b = rng.standard_normal((n, r))
    a = b @ b.T
    target = math.ceil(obs_frac * n * n)
    chosen = set()
    for flat in rng.permutation(n * n):
        if len(chosen) >= target:
            break
        i, j = divmod(int(flat), n)
        chosen.add((i, j))
        chosen.add((j, i))
    idx = sorted(chosen)
    rows = np.array([i for i, _ in idx], dtype=int)
    cols = np.array([j for _, j in idx], dtype=int)
    values = a[rows, cols]
    z0 = np.zeros((n, n))
    z0[rows, cols] = values
    pair = ProblemPair(
        X=PsdCone(n),
        Y=EntryMask(n, rows, cols, values),
        z0=z0.reshape(-1),
        s_ref=a.reshape(-1),
        metadata={
            "family": "matrix_completion",
            "n": n,
            "rank": r,
            "obs_frac": obs_frac,
            "seed": int(seed),
        },
    )
    return pair


def gen_ellipsoids(
    n: int, cond: float, tangency_gap: float = DEFAULT_TANGENCY_GAP, seed: int = 0
) -> ProblemPair:
    """Two nearly tangent anisotropic ellipsoids sharing an interior point.

    Axis scales are log-uniform on [1, cond].  The centers sit symmetrically
    about the origin along coordinate axis 1, placed so the origin lies inside
    both ellipsoids with quadratic-form margin exactly tangency_gap; the
    intersection therefore has nonempty interior and s_ref = 0 is feasible.
    z0 is a seeded random point at roughly the ellipsoid diameter from s_ref.
    """
    if cond < 1.0:
        raise InvalidSpec(f"condition number must be >= 1, got {cond}")
    if not 0.0 < tangency_gap < 1.0:
        raise InvalidSpec(f"tangency_gap must lie in (0, 1), got {tangency_gap}")
    if n < 1:
        raise InvalidSpec("dimension must be >= 1")
    rng = _rng(seed)
    d1 = np.exp(rng.uniform(0.0, math.log(cond), n)) if cond > 1.0 else np.ones(n)
    d2 = np.exp(rng.uniform(0.0, math.log(cond), n)) if cond > 1.0 else np.ones(n)
    c1 = np.zeros(n)
    c1[0] = math.sqrt((1.0 - tangency_gap) / d1[0])
    c2 = np.zeros(n)
    c2[0] = -math.sqrt((1.0 - tangency_gap) / d2[0])
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    radius = 2.0 / math.sqrt(min(float(d1.min()), float(d2.min())))
    z0 = radius * direction
    return ProblemPair(
        X=Ellipsoid(c1, d1),
        Y=Ellipsoid(c2, d2),
        z0=z0,
        s_ref=np.zeros(n),
        metadata={
            "family": "ellipsoids",
            "n": n,
            "cond": cond,
            "tangency_gap": tangency_gap,
            "seed": int(seed),
        },
    )


def gen_halfspace_wedge(n: int, theta: float, seed: int = 0) -> ProblemPair:
    """Two halfspaces through the origin whose normals meet at angle pi - theta.

    Their intersection is a wedge of opening angle theta, and the local error
    bound holds globally with constant omega = sin(theta / 2) in the plane
    spanned by the normals; omega is recorded in the metadata for rate tests.
    """
    if not 0.0 < theta < math.pi / 2:
        raise InvalidSpec(f"theta must lie in (0, pi/2), got {theta}")
    if n < 2:
        raise InvalidSpec("wedge needs dimension >= 2")
    rng = _rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    u1, u2 = basis[:, 0], basis[:, 1]
    s, c = math.sin(theta / 2.0), math.cos(theta / 2.0)
    n1 = s * u1 + c * u2
    n2 = s * u1 - c * u2
    z0 = rng.standard_normal(n)
    return ProblemPair(
        X=Halfspace(n1, 0.0),
        Y=Halfspace(n2, 0.0),
        z0=z0,
        s_ref=np.zeros(n),
        metadata={
            "family": "halfspace_wedge",
            "n": n,
            "theta": theta,
            "omega": s,
            "seed": int(seed),
        },
    )


def generate(family: str, seed: int, **params) -> ProblemPair:
    if family in ("matrix_completion", "matrix-completion"):
        return gen_matrix_completion(
            params["n"], params["rank"], params["obs_frac"], seed
        )
    if family == "ellipsoids":
        return gen_ellipsoids(
            params["n"],
            params["cond"],
            params.get("tangency_gap", DEFAULT_TANGENCY_GAP),
            seed,
        )
    if family in ("halfspace_wedge", "wedge"):
        return gen_halfspace_wedge(params["n"], params["theta"], seed)
    raise InvalidSpec(f"unknown family {family!r}")


def _set_to_json(set_: SetDescriptor) -> dict:
    if isinstance(set_, Halfspace):
        return {"variant": "halfspace", "normal": set_.normal.tolist(), "offset": set_.offset}
    if isinstance(set_, Box):
        return {"variant": "box", "lo": set_.lo.tolist(), "hi": set_.hi.tolist()}
    if isinstance(set_, Ball):
        return {"variant": "ball", "center": set_.center.tolist(), "radius": set_.radius}
    if isinstance(set_, Ellipsoid):
        return {"variant": "ellipsoid", "center": set_.center.tolist(), "diag": set_.diag.tolist()}
    if isinstance(set_, PsdCone):
        return {"variant": "psd_cone", "order": set_.order}
    if isinstance(set_, EntryMask):
        return {
            "variant": "entry_mask",
            "order": set_.order,
            "rows": set_.rows.tolist(),
            "cols": set_.cols.tolist(),
            "values": set_.values.tolist(),
        }
    raise TypeError(f"unsupported set descriptor {type(set_).__name__}")


def _set_from_json(doc: dict) -> SetDescriptor:
    variant = doc["variant"]
    if variant == "halfspace":
        return Halfspace(doc["normal"], doc["offset"])
    if variant == "box":
        return Box(doc["lo"], doc["hi"])
    if variant == "ball":
        return Ball(doc["center"], doc["radius"])
    if variant == "ellipsoid":
        return Ellipsoid(doc["center"], doc["diag"])
    if variant == "psd_cone":
        return PsdCone(doc["order"])
    if variant == "entry_mask":
        return EntryMask(doc["order"], doc["rows"], doc["cols"], doc["values"])
    raise InvalidSpec(f"unknown set variant {variant!r}")


def pair_to_json(pair: ProblemPair) -> dict:
    """Self-describing instance document for cross-implementation replay."""
    return {
        "metadata": dict(pair.metadata),
        "X": _set_to_json(pair.X),
        "Y": _set_to_json(pair.Y),
        "z0": pair.z0.tolist(),
        "s_ref": pair.s_ref.tolist() if pair.s_ref is not None else None,
    }


def pair_from_json(doc: dict) -> ProblemPair:
    return ProblemPair(
        X=_set_from_json(doc["X"]),
        Y=_set_from_json(doc["Y"]),
        z0=np.asarray(doc["z0"], dtype=float),
        s_ref=np.asarray(doc["s_ref"], dtype=float) if doc.get("s_ref") is not None else None,
        metadata=doc.get("metadata", {}),
    )


def save_pair(pair: ProblemPair, path) -> None:
    with open(path, "w") as fh:
        json.dump(pair_to_json(pair), fh)


def load_pair(path) -> ProblemPair:
    with open(path) as fh:
        return pair_from_json(json.load(fh))
