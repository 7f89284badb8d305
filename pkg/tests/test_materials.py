import math

import pytest

from starlattice.errors import ConfigError
from starlattice.materials import ALUMINIUM, INVAR, WEAK, Material, MaterialTable


def test_table_values_at_end_points():
    assert ALUMINIUM.youngs_modulus(20.0) == 71e9
    assert ALUMINIUM.youngs_modulus(200.0) == 66e9
    assert ALUMINIUM.alpha(200.0) == pytest.approx(24.3e-6, rel=1e-15)
    assert INVAR.youngs_modulus(200.0) == 135e9
    assert INVAR.alpha(20.0) == pytest.approx(1.1e-6, rel=1e-15)
    assert INVAR.alpha(200.0) == pytest.approx(2.5e-6, rel=1e-15)
    assert WEAK.youngs_modulus(200.0) == 1e3


def test_linear_interpolation_and_clamping():
    assert ALUMINIUM.youngs_modulus(110.0) == pytest.approx(68.5e9)
    assert ALUMINIUM.youngs_modulus(-50.0) == 71e9
    assert ALUMINIUM.youngs_modulus(900.0) == 66e9


def test_shear_modulus():
    assert INVAR.shear_modulus(20.0) == pytest.approx(144e9 / (2 * 1.29))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(e_points=(), alpha_points=((20, 1e-6),), nu=0.3),
        dict(e_points=((20, 1e9), (20, 2e9)), alpha_points=((20, 1e-6),), nu=0.3),
        dict(e_points=((20, -1.0),), alpha_points=((20, 1e-6),), nu=0.3),
        dict(e_points=((20, 1e9),), alpha_points=((20, 1e-6),), nu=0.5),
        dict(e_points=((20, math.nan),), alpha_points=((20, 1e-6),), nu=0.3),
    ],
)
def test_invalid_materials_rejected(kwargs):
    with pytest.raises(ConfigError):
        Material("bad", **kwargs)


def test_material_table_round_trip_and_overrides():
    table = MaterialTable()
    again = MaterialTable.from_dict(table.to_dict())
    assert again == table
    assert table.uniform(INVAR)["aluminium"] == INVAR
    assert table.with_weak_scaled(10)["weak"].youngs_modulus(20) == pytest.approx(1e4)
    with pytest.raises(ConfigError):
        table["steel"]
