import numpy as np
import pytest

from deform import (
    AffineDeformation,
    coboundary,
    cohomology_complement_basis,
    cyclic_rep,
    genus2_rep,
    random_cocycle,
    schottky_rep,
    translation_cocycle,
)
from models import CocycleDocument, GroupDocument, dump_document


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(20240601))


@pytest.fixture()
def cyclic():
    return cyclic_rep(0.5)


@pytest.fixture()
def cyclic_deformation(cyclic):
    # u = psi(log a), so alpha(a) = -log mu = log 2
    return AffineDeformation(cyclic, translation_cocycle(cyclic))


@pytest.fixture()
def schottky():
    return schottky_rep(1.0)


@pytest.fixture()
def schottky_translation(schottky):
    return AffineDeformation(schottky, translation_cocycle(schottky))


@pytest.fixture(scope="session")
def genus2():
    """The octagon surface group is calibrated once per test run."""
    return genus2_rep()


@pytest.fixture(scope="session")
def genus2_complement(genus2):
    return cohomology_complement_basis(genus2)


@pytest.fixture()
def genus2_deformation(genus2, genus2_complement):
    return AffineDeformation(genus2, random_cocycle(genus2_complement, 7))


@pytest.fixture()
def genus2_coboundary(genus2):
    return AffineDeformation(genus2, coboundary(genus2, [0.3, -1.1, 0.7]))


@pytest.fixture()
def write_documents(tmp_path):
    """Write a deformation as group.json / cocycle.json and return both paths."""

    def _write(d: AffineDeformation):
        group = tmp_path / "group.json"
        cocycle = tmp_path / "cocycle.json"
        group.write_text(dump_document(GroupDocument.from_representation(d.rep)))
        cocycle.write_text(dump_document(CocycleDocument.from_cocycle(d.cocycle)))
        return str(group), str(cocycle)

    return _write


@pytest.fixture()
def random_sl2(rng):
    def _draw():
        while True:
            m = rng.normal(size=(2, 2))
            det = np.linalg.det(m)
            if abs(det) > 0.1:
                break
        if det < 0:
            m[:, 0] = -m[:, 0]
            det = -det
        return m / np.sqrt(det)

    return _draw


@pytest.fixture()
def random_hyperbolic(rng, random_sl2):
    """Conjugates of diag(mu, 1/mu) with random mu and trace sign."""

    def _draw():
        f = random_sl2()
        mu = rng.uniform(0.1, 0.8)
        g = f @ np.diag([mu, 1.0 / mu]) @ np.linalg.inv(f)
        return -g if rng.random() < 0.5 else g

    return _draw
