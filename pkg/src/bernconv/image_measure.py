"""Pushforward of measures on finite spaces and the relation-transfer laws.

On a finite space with the full power-set sigma-algebra, absolute continuity
is support inclusion and mutual singularity is support disjointness, so the
transfer laws for image measures are decidable and falsifiable:

* absolute continuity always pushes forward;
* singularity of the images always pulls back;
* a bijection transfers both relations in both directions, and it is enough
  for the map to be a bijection off a set that is null for both measures.

The converse of the first law fails in general: merging two disjoint
supports makes the images equal.  ``singular_pair_with_equivalent_images``
stores that witness.  ``run_law_suite`` drives seeded randomized instances
(including forced degenerate shapes) through every law and tallies
hypothesis hits; any violation would be a counterexample and fails the run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional

from .errors import SpaceMismatchError, SpecValidationError

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMeasureSpace:
    points: tuple[Hashable, ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise SpecValidationError("space points must be distinct")


@dataclass(frozen=True)
class FiniteMeasure:
    space: FiniteMeasureSpace
    mass: Mapping[Hashable, float]

    def __post_init__(self):
        extra = set(self.mass) - set(self.space.points)
        if extra:
            raise SpecValidationError(f"mass assigned outside the space: {extra}")
        if any(v < 0.0 for v in self.mass.values()):
            raise SpecValidationError("point masses must be nonnegative")
        total = sum(self.mass.values())
        if abs(total - 1.0) > _MASS_TOL:
            raise SpecValidationError(f"total mass {total} differs from 1")

    def at(self, p: Hashable) -> float:
        return float(self.mass.get(p, 0.0))

    def support(self) -> frozenset:
        return frozenset(p for p in self.space.points if self.at(p) > 0.0)


@dataclass(frozen=True)
class PointMap:
    domain: FiniteMeasureSpace
    codomain: FiniteMeasureSpace
    image: Mapping[Hashable, Hashable]

    def __post_init__(self):
        if set(self.image) != set(self.domain.points):
            raise SpecValidationError("map must be total on the domain")
        stray = set(self.image.values()) - set(self.codomain.points)
        if stray:
            raise SpecValidationError(f"map sends points outside the codomain: {stray}")

    def is_bijective(self) -> bool:
        return (
            len(self.domain.points) == len(self.codomain.points)
            and len(set(self.image.values())) == len(self.codomain.points)
        )


def pushforward(m: FiniteMeasure, f: PointMap) -> FiniteMeasure:
    """Image measure: mass of q is the m-mass of the preimage of q."""
    if m.space != f.domain:
        raise SpaceMismatchError("measure lives on a different space than the map domain")
    out = {q: 0.0 for q in f.codomain.points}
    for p in f.domain.points:
        out[f.image[p]] += m.at(p)
    return FiniteMeasure(f.codomain, out)


def abs_continuous(m1: FiniteMeasure, m2: FiniteMeasure) -> bool:
    """m1 << m2 on a finite space: every m2-null point is m1-null."""
    if m1.space != m2.space:
        raise SpaceMismatchError("measures live on different spaces")
    return all(m1.at(p) == 0.0 for p in m1.space.points if m2.at(p) == 0.0)


def mutually_singular(m1: FiniteMeasure, m2: FiniteMeasure) -> bool:
    """m1 and m2 concentrate on disjoint sets of points."""
    if m1.space != m2.space:
        raise SpaceMismatchError("measures live on different spaces")
    return not (m1.support() & m2.support())


def bijective_off_null(f: PointMap, eta: FiniteMeasure, tau: FiniteMeasure) -> bool:
    """Is there a set that is null for both measures off which f is a bijection
    onto the codomain?  Decidable: keep exactly one preimage per codomain
    point, and everything dropped must carry zero eta- and tau-mass."""
    if eta.space != f.domain or tau.space != f.domain:
        raise SpaceMismatchError("measures must live on the map domain")
    preimages: dict[Hashable, list[Hashable]] = {q: [] for q in f.codomain.points}
    for p in f.domain.points:
        preimages[f.image[p]].append(p)
    for q, pts in preimages.items():
        if not pts:
            return False  # not surjective even after dropping a null set
        carrying = [p for p in pts if eta.at(p) > 0.0 or tau.at(p) > 0.0]
        if len(carrying) > 1:
            return False
    return True


@dataclass(frozen=True)
class LawCheck:
    hypothesis_held: bool
    conclusion_held: Optional[bool]  # None when the hypothesis fails

    @property
    def violated(self) -> bool:
        return self.hypothesis_held and self.conclusion_held is False


@dataclass(frozen=True)
class PreservationReport:
    """Evaluation of all four transfer laws on one (eta, tau, f) instance."""

    abs_continuity_pushes_forward: LawCheck
    image_singularity_pulls_back: LawCheck
    bijection_transfers_both: LawCheck
    null_exception_transfers_both: LawCheck

    def violations(self) -> list[str]:
        out = []
        for name in (
            "abs_continuity_pushes_forward",
            "image_singularity_pulls_back",
            "bijection_transfers_both",
            "null_exception_transfers_both",
        ):
            if getattr(self, name).violated:
                out.append(name)
        return out


def check_preservation_laws(
    eta: FiniteMeasure, tau: FiniteMeasure, f: PointMap
) -> PreservationReport:
    if eta.space != f.domain or tau.space != f.domain:
        raise SpaceMismatchError("measures must live on the map domain")
    eta_img = pushforward(eta, f)
    tau_img = pushforward(tau, f)

    ac, ac_img = abs_continuous(eta, tau), abs_continuous(eta_img, tau_img)
    sg, sg_img = mutually_singular(eta, tau), mutually_singular(eta_img, tau_img)
    ac_rev, ac_img_rev = abs_continuous(tau, eta), abs_continuous(tau_img, eta_img)

    push = LawCheck(ac, ac_img if ac else None)
    pull = LawCheck(sg_img, sg if sg_img else None)

    both_transfer = (
        ac == ac_img and sg == sg_img and ac_rev == ac_img_rev
    )
    bij = f.is_bijective()
    bijection = LawCheck(bij, both_transfer if bij else None)
    off_null = bijective_off_null(f, eta, tau)
    null_exc = LawCheck(off_null, both_transfer if off_null else None)

    return PreservationReport(push, pull, bijection, null_exc)


def singular_pair_with_equivalent_images():
    """Stored witness: eta and tau mutually singular, images equal.

    A constant map merges the two one-point supports, so the image measures
    coincide (hence are mutually absolutely continuous) while the originals
    are mutually singular.  This is the failure of the converse of the
    push-forward law at finite scale.
    """
    dom = FiniteMeasureSpace(("a", "b"))
    cod = FiniteMeasureSpace(("q",))
    eta = FiniteMeasure(dom, {"a": 1.0, "b": 0.0})
    tau = FiniteMeasure(dom, {"a": 0.0, "b": 1.0})
    f = PointMap(dom, cod, {"a": "q", "b": "q"})
    return eta, tau, f


# ---------------------------------------------------------------------------
# Randomized suite
# ---------------------------------------------------------------------------


@dataclass
class LawSuiteResult:
    instances: int
    seed: int
    hypothesis_counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    witness_passed: bool = False


def _random_masses(rng: random.Random, n: int) -> list[float]:
    # normalized uniform draws; point masses are forced separately
    draws = [rng.random() for _ in range(n)]
    if rng.random() < 0.35:
        # sparsify to exercise null points
        keep = rng.randrange(1, n + 1)
        idx = rng.sample(range(n), keep)
        draws = [d if i in idx else 0.0 for i, d in enumerate(draws)]
    total = sum(draws)
    if total == 0.0:
        draws[rng.randrange(n)] = 1.0
        total = 1.0
    masses = [d / total for d in draws]
    # renormalize the largest entry to absorb rounding
    k = masses.index(max(masses))
    masses[k] += 1.0 - sum(masses)
    return masses


def _random_instance(rng: random.Random):
    n = rng.randrange(1, 9)
    dom = FiniteMeasureSpace(tuple(range(n)))
    shape = rng.random()
    if shape < 0.25:
        m = rng.randrange(1, 9)
        cod = FiniteMeasureSpace(tuple(range(m)))
        image = {p: rng.randrange(m) for p in range(n)}
    elif shape < 0.5:
        cod = FiniteMeasureSpace(tuple(range(n)))
        perm = list(range(n))
        rng.shuffle(perm)
        image = {p: perm[p] for p in range(n)}
    elif shape < 0.65:
        cod = FiniteMeasureSpace((0,))
        image = {p: 0 for p in range(n)}
    else:
        m = rng.randrange(1, n + 1)
        cod = FiniteMeasureSpace(tuple(range(m)))
        image = {p: rng.randrange(m) for p in range(n)}

    def measure() -> FiniteMeasure:
        r = rng.random()
        if r < 0.15:
            masses = [0.0] * n
            masses[rng.randrange(n)] = 1.0
        else:
            masses = _random_masses(rng, n)
        return FiniteMeasure(dom, dict(zip(range(n), masses)))

    eta = measure()
    tau = measure()
    if rng.random() < 0.25:
        # force eta << tau by zeroing eta outside tau's support
        masses = {p: (eta.at(p) if tau.at(p) > 0.0 else 0.0) for p in range(n)}
        total = sum(masses.values())
        if total > 0.0:
            masses = {p: v / total for p, v in masses.items()}
            top = max(masses, key=masses.get)
            masses[top] += 1.0 - sum(masses.values())
            eta = FiniteMeasure(dom, masses)
    f = PointMap(dom, cod, image)
    return eta, tau, f


def run_law_suite(count: int = 10_000, seed: int = 0) -> LawSuiteResult:
    """Seeded randomized law checks; every violation is recorded (expected none)."""
    rng = random.Random(seed)
    result = LawSuiteResult(instances=count, seed=seed)
    counts = {
        "abs_continuity_pushes_forward": 0,
        "image_singularity_pulls_back": 0,
        "bijection_transfers_both": 0,
        "null_exception_transfers_both": 0,
    }
    for i in range(count):
        eta, tau, f = _random_instance(rng)
        report = check_preservation_laws(eta, tau, f)
        for name in counts:
            check: LawCheck = getattr(report, name)
            if check.hypothesis_held:
                counts[name] += 1
            if check.violated:
                result.violations.append(
                    {"instance": i, "law": name, "eta": dict(eta.mass),
                     "tau": dict(tau.mass), "map": dict(f.image)}
                )
    result.hypothesis_counts = counts
    eta, tau, f = singular_pair_with_equivalent_images()
    eta_img, tau_img = pushforward(eta, f), pushforward(tau, f)
    result.witness_passed = (
        mutually_singular(eta, tau)
        and abs_continuous(eta_img, tau_img)
        and not mutually_singular(eta_img, tau_img)
    )
    return result
