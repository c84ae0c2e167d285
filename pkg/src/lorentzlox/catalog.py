"""Built-in unit-speed profiles and ready-made loxodrome problems.

Component keys may be integers or the strings ``"n"`` / ``"n-1"`` so the
same profile works in any dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .loxodrome import LoxodromeProblem
from .profile import ProfileCurve
from .surfaces import HelicoidalSurface


@dataclass(frozen=True)
class ProfileSpec:
    kind: str
    components: Mapping
    epsilon: int
    constants: Mapping[str, float]
    right: bool

    def build(self, n: int = 4) -> ProfileCurve:
        comps = {resolve_index(k, n): src for k, src in self.components.items()}
        return ProfileCurve.from_strings(self.kind, n, comps, self.epsilon, self.constants)


def resolve_index(key, n: int) -> int:
    if isinstance(key, int):
        return key
    key = str(key).replace(" ", "")
    if key == "n":
        return n
    if key.startswith("n-"):
        return n - int(key[2:])
    return int(key)


PROFILES: dict[str, ProfileSpec] = {
    # type I
    "type1_line": ProfileSpec("I", {1: "u"}, 1, {}, True),
    "type1_boosted": ProfileSpec("I", {1: "cosh(a)*u", "n": "sinh(a)*u"}, 1, {"a": 0.3}, False),
    "type1_circle": ProfileSpec("I", {1: "R + sin(u)", 3: "cos(u)"}, 1, {"R": 3.0}, True),
    "type1_axial": ProfileSpec("I", {1: "r", "n": "u"}, -1, {"r": 2.0}, False),
    # type II
    "type2_axial": ProfileSpec("II", {1: "u", "n": "r"}, 1, {"r": 2.0}, False),
    "type2_boosted": ProfileSpec("II", {1: "cosh(a)*u", "n": "r + sinh(a)*u"}, 1,
                                 {"a": 0.4, "r": 2.0}, False),
    "type2_planar": ProfileSpec("II", {2: "u", "n": "r"}, 1, {"r": 2.0}, True),
    "type2_hyperbolic": ProfileSpec("II", {"n": "u"}, -1, {}, True),
    # type III (last two indices are xi_{n-1}, xi_n coefficients)
    "type3_line": ProfileSpec("III", {1: "u", "n": "r"}, 1, {"r": 2.0}, True),
    "type3_drift": ProfileSpec("III", {1: "sqrt(2)*u", "n-1": "u", "n": "1 + u/2"}, 1, {}, False),
    "type3_timelike": ProfileSpec("III", {"n-1": "u", "n": "2 + u/2"}, -1, {}, False),
}


@dataclass(frozen=True)
class ProblemSpec:
    profile: str
    c: float
    theta0: float
    u0: float
    u1: float
    branch: int = 1
    v0: float = 0.0

    def build(self, n: int = 4) -> LoxodromeProblem:
        surface = HelicoidalSurface(PROFILES[self.profile].build(n), self.c)
        return LoxodromeProblem.on(surface, self.theta0, self.u0, branch=self.branch, v0=self.v0)


# admissible ranges: no degeneracy, no vanishing denominator on [u0, u1]
PROBLEMS: dict[str, ProblemSpec] = {
    "type1_right": ProblemSpec("type1_line", 1.0, math.pi / 4, 2.0, 3.0),
    "type1_boosted": ProblemSpec("type1_boosted", 0.5, 0.7, 1.0, 2.0),
    "type1_circle": ProblemSpec("type1_circle", 1.0, 1.1, 0.0, 6.0, branch=-1),
    "type1_timelike_spacelike_meridian": ProblemSpec("type1_line", 1.0, 0.5, 0.2, 0.8),
    "type1_timelike_timelike_meridian": ProblemSpec("type1_axial", 1.0, 1.0, 0.0, 2.0, branch=-1),
    "type2_spacelike": ProblemSpec("type2_boosted", 1.0, 0.6, 0.0, 2.0),
    "type2_timelike": ProblemSpec("type2_hyperbolic", 1.0, 0.8, 1.0, 2.0),
    "type3_spacelike": ProblemSpec("type3_drift", 1.0, 0.9, 0.0, 2.0, branch=-1),
    "type3_right": ProblemSpec("type3_line", 1.0, math.pi / 3, 0.0, 1.0),
    "type3_timelike": ProblemSpec("type3_timelike", 1.0, 1.0, 0.0, 2.0),
}
