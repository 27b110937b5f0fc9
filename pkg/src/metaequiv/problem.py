"""JSON problem files.

Schema::

    {
      "dim": K,
      "v1": [[...], ...], "v2": [[...], ...], "c": [[...], ...],   # K x K, row-major
      "omega": [[...], ...],          # optional, identity by default
      "b1": [...], "b2": [...],        # optional, zero by default
      "seed": S                        # optional
    }
"""

import json
from dataclasses import dataclass

import numpy as np

from . import harness, model
from .errors import MetaEquivError


class ProblemError(MetaEquivError, ValueError):
    """A problem file that does not parse or fails validation.

    ``path`` is a JSON-path style pointer to the offending field.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True, eq=False)
class ProblemFile:
    dim: int
    v1: np.ndarray
    v2: np.ndarray
    c: np.ndarray
    omega: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    seed: int = None

    def to_spec(self):
        """Build and validate the risk specification."""
        return model.make_spec(self.v1, self.v2, self.c, self.b1, self.b2, self.omega)

    def to_dict(self):
        out = {
            "dim": self.dim,
            "v1": self.v1.tolist(),
            "v2": self.v2.tolist(),
            "c": self.c.tolist(),
            "omega": self.omega.tolist(),
            "b1": self.b1.tolist(),
            "b2": self.b2.tolist(),
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _matrix(data, key, k):
    path = f"$.{key}"
    try:
        a = np.array(data[key], dtype=float)
    except KeyError:
        raise ProblemError("missing required field", path) from None
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"not a numeric matrix ({exc})", path) from None
    if a.shape != (k, k):
        raise ProblemError(f"expected shape ({k}, {k}), got {a.shape}", path)
    if not np.all(np.isfinite(a)):
        raise ProblemError("non-finite entry", path)
    return a


def _vector(data, key, k):
    path = f"$.{key}"
    if key not in data:
        return np.zeros(k)
    try:
        a = np.array(data[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"not a numeric vector ({exc})", path) from None
    if a.shape != (k,):
        raise ProblemError(f"expected length {k}, got shape {a.shape}", path)
    if not np.all(np.isfinite(a)):
        raise ProblemError("non-finite entry", path)
    return a


def from_dict(data):
    if not isinstance(data, dict):
        raise ProblemError("top level must be an object")
    k = data.get("dim")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ProblemError("must be a positive integer", "$.dim")
    omega = _matrix(data, "omega", k) if "omega" in data else np.eye(k)
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ProblemError("must be an integer", "$.seed")
    return ProblemFile(
        dim=k,
        v1=_matrix(data, "v1", k),
        v2=_matrix(data, "v2", k),
        c=_matrix(data, "c", k),
        omega=omega,
        b1=_vector(data, "b1", k),
        b2=_vector(data, "b2", k),
        seed=seed,
    )


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON ({exc})") from None
    return from_dict(data)


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def dumps(problem):
    return json.dumps(problem.to_dict(), indent=2) + "\n"


def dump(problem, path):
    with open(path, "w") as fh:
        fh.write(dumps(problem))


def generate(dim, seed):
    """Random problem with the harness's covariance recipe."""
    spec = harness.random_spec(dim, seed)
    m = spec.model
    return ProblemFile(
        dim=dim, v1=np.array(m.v1), v2=np.array(m.v2), c=np.array(m.c),
        omega=np.eye(dim), b1=np.zeros(dim), b2=np.zeros(dim), seed=seed,
    )
