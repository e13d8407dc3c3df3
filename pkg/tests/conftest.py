import pytest

from config import AppConfig
from data.design import DesignParams
from data.loader import load_database, load_system
from data.packaging import PackagingParams
from data.techdb import FabProfile, ProcessParams, TechDatabase, TechnologyNode


def make_params(
    d0: float = 0.1,
    dt: float = 100.0,
    eta_eq: float = 1.0,
    epa: float = 2.0,
    c_gas: float = 300.0,
    c_material: float = 500.0,
    eta_eda: float = 0.8,
) -> ProcessParams:
    return ProcessParams(
        d0=d0,
        alpha=3.0,
        dt={"logic": dt, "memory": dt, "analog": dt},
        eta_eq=eta_eq,
        epa=epa,
        c_gas=c_gas,
        c_material=c_material,
        eta_eda=eta_eda,
    )


def make_db(params: ProcessParams, c_src: float = 700.0, name: str = "7nm") -> TechDatabase:
    return TechDatabase(
        nodes={TechnologyNode(feature_index=0, name=name): params},
        fab=FabProfile(c_mfg_src=c_src, c_pkg_src=c_src, c_des_src=c_src),
        packaging_defaults=PackagingParams(node=name),
        design_defaults=DesignParams(),
    )


@pytest.fixture(scope="session")
def default_db() -> TechDatabase:
    return load_database(AppConfig.DEFAULT_DB_PATH)


@pytest.fixture(scope="session")
def shipped(default_db):
    def load(name: str):
        return load_system(AppConfig.SYSTEMS_DIR / f"{name}.json", default_db)

    return load
