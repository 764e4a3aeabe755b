"""
p2hsched Preset Factory.

This module builds the named scenarios shipped with the package: a toy
instance small enough for exhaustive enumeration, the base off-grid system,
a stress variant of it and a large system on the 69-bus radial feeder.

Published parameter tables come from ``p2hsched.config.constants``. Forecast
shapes, sample sets, network line data and unit placements on the 69-bus
feeder are synthetic and generated from a seed.
"""

import math
from dataclasses import replace

import numpy as np

from p2hsched.config import constants
from p2hsched.exceptions.errors import UnknownPresetError
from p2hsched.models.network import Branch, Bus, NetworkModel
from p2hsched.models.scenario import (
    ContingencyConfig,
    LoadBasis,
    PriceConfig,
    SampleSet,
    SchedulingMode,
    SystemScenario,
)
from p2hsched.models.units import (
    AfgUnit,
    BesUnit,
    DownstreamLoad,
    ElectrolyzerUnit,
    HydrogenPlant,
    PvUnit,
    Technology,
    WtUnit,
)
from p2hsched.services.device_models import (
    calibrate_edl_capacitance,
    pemel_virtual_inertia,
    stack_power,
)
from p2hsched.services.drcc import JOINT_SOURCE, WIND_SOURCE
from p2hsched.services.production_fit import fit_production_models
from p2hsched.utils.logging_config import logger

PRESETS = ("toy", "base_system", "base_system_stress", "ieee69_large")

# synthetic operating data not covered by the published tables
AWE_RATED_POWER = 5.0  # MW
PEMEL_RATED_POWER = 1.25  # MW
STANDBY_SHARE = 0.01  # of rated power
PUMP_POWER = 0.05  # kW per kg/h
PFR_SHARE_AWE = 0.2
REGULATION_SHARE_EL = 0.1
PEMEL_INERTIAL_POWER = 0.25  # MW
COMPRESSOR_POWER = 0.002  # MW per kg/h
PLANT_THROUGHPUT = 800.0  # kg/h
AFG_DAMPING = 0.5  # MW/Hz
AFG_RAMP_SHARE = 0.5  # of p_max per hour
BES_DAMPING = 0.1  # MW/Hz
# grid-forming inertia per MW of battery rating (MW·s/Hz per MW); sized so the
# 15% total-load step stays within the RoCoF limit
BES_GFM_INERTIA = 0.8
BES_SELF_DISCHARGE = 0.001  # per hour
LOAD_DAMPING = 0.03  # per Hz
LINE_FLOW_LIMIT = 80.0  # MW

# 69-bus feeder: (parent, first child, last child) of each chain of consecutive buses
IEEE69_CHAINS = (
    (1, 2, 27),
    (3, 28, 35),
    (3, 36, 46),
    (4, 47, 50),
    (8, 51, 52),
    (9, 53, 65),
    (11, 66, 67),
    (12, 68, 69),
)


def _electrolyzer_template(tech: Technology, rocof_lim: float, f_n: float) -> ElectrolyzerUnit:
    """Return a fitted and calibrated electrolyzer of a technology, with placeholder identity."""
    if tech is Technology.AWE:
        table, chemistry, rise = constants.AWE_TABLE, constants.AWE_ELECTROCHEMISTRY, constants.AWE_RISE_TIMES
        rated, pfr, h_virtual = AWE_RATED_POWER, PFR_SHARE_AWE * AWE_RATED_POWER, 0.0
    else:
        table, chemistry, rise = (
            constants.PEMEL_TABLE,
            constants.PEMEL_ELECTROCHEMISTRY,
            constants.PEMEL_RISE_TIMES,
        )
        rated, pfr = PEMEL_RATED_POWER, 0.0
        h_virtual = pemel_virtual_inertia(PEMEL_INERTIAL_POWER, rocof_lim, f_n)

    unit = ElectrolyzerUnit(
        id=tech.value,
        tech=tech,
        c_edl=1.0,
        k_pump=PUMP_POWER,
        p_sb=STANDBY_SHARE * rated,
        p_min=0.0,
        p_max=rated,
        h_virtual=h_virtual,
        r_pfr_lim=pfr,
        r_up_lim=REGULATION_SHARE_EL * rated,
        r_dn_lim=REGULATION_SHARE_EL * rated,
        cost_h2=constants.PRICE_TABLE["cost_h2"],
        cost_up_cold=constants.PRICE_TABLE["cost_up_cold"],
        cost_down=constants.PRICE_TABLE["cost_down"],
        **table,
        **chemistry,
    )
    fraction = constants.EDL_CALIBRATION_FRACTION
    c_edl = calibrate_edl_capacitance(unit, rise[fraction], fraction)
    p_min = round(stack_power(unit.i_min, unit.t_max, unit), 4)
    unit = replace(unit, c_edl=c_edl, p_min=max(p_min, unit.p_sb))
    power_fit, h2_fit = fit_production_models(unit)
    return replace(unit, power_fit=power_fit, h2_fit=h2_fit)


def electrolyzers(
    tech: Technology,
    count: int,
    *,
    prefix: str,
    bus: str,
    rocof_lim: float = constants.ROCOF_LIMIT,
    f_n: float = constants.NOMINAL_FREQUENCY,
    **overrides: object,
) -> tuple[ElectrolyzerUnit, ...]:
    """
    Build ``count`` identical electrolyzers sharing one calibration and fit.

    Parameters
    ----------
    tech : Technology
        AWE or PEMEL.
    count : int
        Number of units.
    prefix : str
        Identifier prefix; units are numbered from 1.
    bus : str
        Attachment bus.
    rocof_lim, f_n : float
        Frequency limits used to size PEMEL virtual inertia.
    **overrides
        Field values replacing the defaults of every unit.

    Returns
    -------
    tuple[ElectrolyzerUnit, ...]
        The units.
    """
    template = replace(_electrolyzer_template(tech, rocof_lim, f_n), bus=bus, **overrides)
    return tuple(replace(template, id=f"{prefix}{k}") for k in range(1, count + 1))


def afg(unit_id: str, *, large: bool, bus: str, initial_on: bool = False, **overrides: object) -> AfgUnit:
    """Build an ammonia-fueled generator from the published table."""
    table = constants.AFG_TABLE
    size = "large" if large else "small"
    p_max = table[f"p_max_{size}"]
    unit = AfgUnit(
        id=unit_id,
        h_g=table["h_g"],
        d_g=AFG_DAMPING,
        p_min=table[f"p_min_{size}"],
        p_max=p_max,
        ramp_up=AFG_RAMP_SHARE * p_max,
        ramp_dn=AFG_RAMP_SHARE * p_max,
        t_on=table["t_on"],
        t_off=table["t_off"],
        r_pfr_lim=table["pfr_share"] * p_max,
        r_up_lim=table["regulation_share"] * p_max,
        r_dn_lim=table["regulation_share"] * p_max,
        eta_comb=table["eta_comb"],
        eta_steam=table["eta_steam"],
        lhv_nh3=constants.LHV_NH3,
        cost_nh3=table["cost_nh3"],
        cost_start=table["cost_start"],
        cost_reserve=constants.RESERVE_COST_AFG,
        bus=bus,
        initial_on=initial_on,
    )
    return replace(unit, **overrides)


def bes(
    unit_id: str, *, power: float, energy: float, bus: str, h_b: float | None = None
) -> BesUnit:
    """
    Build a grid-forming battery with the published efficiencies and SOC window.

    The inertia constant defaults to the published value; presets pass a
    larger grid-forming gain.
    """
    table = constants.BES_TABLE
    return BesUnit(
        id=unit_id,
        h_b=table["h_b"] if h_b is None else h_b,
        d_b=BES_DAMPING,
        p_lim=power,
        e_min=table["soc_min_share"] * energy,
        e_max=table["soc_max_share"] * energy,
        e_init=0.5 * energy,
        eta_c=table["eta_c"],
        eta_d=table["eta_d"],
        self_discharge=BES_SELF_DISCHARGE,
        t_deliver=constants.DELIVERY_TIME_BES,
        cost_reserve=constants.RESERVE_COST_BES,
        bus=bus,
    )


def wind_profile(periods: int, capacity: float, rng: np.random.Generator, level: float = 0.55) -> tuple[float, ...]:
    """Return a diurnal wind forecast (MW) with seeded noise, clipped to [5%, 95%] of capacity."""
    hours = np.arange(periods)
    shape = level + 0.25 * np.cos(2 * np.pi * hours / 24) + 0.05 * rng.standard_normal(periods)
    return tuple(float(v) for v in np.round(capacity * np.clip(shape, 0.05, 0.95), 4))


def solar_profile(periods: int, capacity: float) -> tuple[float, ...]:
    """Return a clear-sky PV forecast (MW) between 06:00 and 18:00."""
    return tuple(
        round(capacity * max(0.0, math.sin(math.pi * (hour % 24 - 6) / 12)), 4) for hour in range(periods)
    )


def load_profile(periods: int, mean: float, swing: float) -> tuple[float, ...]:
    """Return a smooth downstream load (MW) peaking in the afternoon."""
    return tuple(
        round(mean + swing * math.sin(2 * math.pi * (hour % 24 - 9) / 24), 4) for hour in range(periods)
    )


def forecast_samples(
    forecasts: np.ndarray,
    std_share: float,
    rng: np.random.Generator,
    count: int = constants.SAMPLE_COUNT,
) -> np.ndarray:
    """
    Draw Gaussian forecast errors (MW) proportional to a forecast.

    Parameters
    ----------
    forecasts : np.ndarray
        Shape (periods,) or (periods, dim).
    std_share : float
        Error standard deviation as a share of the forecast.
    rng : np.random.Generator
        Seeded generator.
    count : int
        Samples per period.

    Returns
    -------
    np.ndarray
        Shape (periods, count) or (periods, count, dim).
    """
    forecasts = np.asarray(forecasts, dtype=float)
    scale = std_share * forecasts[:, None, ...]
    draws = rng.standard_normal((forecasts.shape[0], count, *forecasts.shape[1:]))
    return np.round(scale * draws, 6)


def _sample_sets(
    wts: tuple[WtUnit, ...],
    pvs: tuple[PvUnit, ...],
    periods: int,
    rng: np.random.Generator,
    theta: float,
) -> dict[str, SampleSet]:
    wind = np.array([sum(unit.forecast[t] for unit in wts) for t in range(periods)])
    solar = np.array([sum(unit.forecast[t] for unit in pvs) for t in range(periods)])
    rho = constants.VIOLATION_PROBABILITY
    return {
        WIND_SOURCE: SampleSet(
            WIND_SOURCE, forecast_samples(wind, constants.WIND_ERROR_STD, rng), theta, rho
        ),
        JOINT_SOURCE: SampleSet(
            JOINT_SOURCE,
            np.concatenate(
                [
                    forecast_samples(wind, constants.WIND_ERROR_STD, rng)[..., None],
                    forecast_samples(solar, constants.SOLAR_ERROR_STD, rng)[..., None],
                ],
                axis=2,
            ),
            theta,
            rho,
        ),
    }


def _wind_farm(
    count: int,
    periods: int,
    bus: str | list[str],
    rng: np.random.Generator,
    level: float,
) -> tuple[WtUnit, ...]:
    capacity = constants.WT_TABLE["capacity"]
    buses = [bus] * count if isinstance(bus, str) else bus
    return tuple(
        WtUnit(
            id=f"WT{k}",
            capacity=capacity,
            forecast=wind_profile(periods, capacity, rng, level),
            k_deload_max=constants.WT_TABLE["k_deload_max"],
            t_deliver=constants.DELIVERY_TIME_WT,
            bus=buses[k - 1],
            cost_reserve=constants.RESERVE_COST_WT,
        )
        for k in range(1, count + 1)
    )


def toy(seed: int = 0) -> SystemScenario:
    """
    Return the enumeration instance: one AWE and one AFG over six hours.

    The AWE has no standby state and the load is damping-rich enough that
    both nadir stages hold without reserve, leaving twelve free binaries: the
    AWE run state and the AFG commitment of each hour. Ammonia is priced low
    enough that running the AWE on generator power is profitable. The step
    is a share of the downstream load only, which the single small generator
    can secure.
    """
    del seed
    periods = 6
    network = NetworkModel(buses=(Bus("b0"),), branches=(), root="b0")
    return SystemScenario(
        name="toy",
        periods=periods,
        network=network,
        load=DownstreamLoad(p_d=(2.5, 2.4, 2.2, 2.6, 3.0, 3.2), d_d=0.15),
        electrolyzers=electrolyzers(Technology.AWE, 1, prefix="AWE", bus="b0", allow_standby=False),
        afgs=(afg("AFG1", large=False, bus="b0", initial_on=True, cost_nh3=0.5),),
        contingency=ContingencyConfig(load_step_fraction=0.1, basis=LoadBasis.DOWNSTREAM),
        mode=SchedulingMode.PM,
    )


def base_system(seed: int = 0) -> SystemScenario:
    """
    Return the 24-hour base system.

    Eight 6.25 MW WTs, a 10 MW PV plant, a 40 MW hydrogen plant of six 5 MW
    AWEs and eight 1.25 MW PEMELs, an 8 MW/8 MWh BES and three 12 MW AFGs on
    a four-bus radial feeder.
    """
    rng = np.random.default_rng(seed)
    periods = 24
    buses = ("b0", "b1", "b2", "b3")
    network = NetworkModel(
        buses=tuple(Bus(bus, constants.NETWORK_TABLE["v_min"], constants.NETWORK_TABLE["v_max"]) for bus in buses),
        branches=tuple(
            Branch("b0", child, 0.002, -LINE_FLOW_LIMIT, LINE_FLOW_LIMIT) for child in buses[1:]
        ),
        root="b0",
    )
    wts = _wind_farm(8, periods, "b1", rng, level=0.55)
    pvs = (PvUnit(id="PV1", capacity=10.0, forecast=solar_profile(periods, 10.0), bus="b2"),)
    awes = electrolyzers(Technology.AWE, 6, prefix="AWE", bus="b3")
    pemels = electrolyzers(Technology.PEMEL, 8, prefix="PEMEL", bus="b3")
    plant = HydrogenPlant(
        id="HP1",
        electrolyzers=tuple(unit.id for unit in (*awes, *pemels)),
        bus="b3",
        q_lim=PLANT_THROUGHPUT,
        k_comp=COMPRESSOR_POWER,
    )
    return SystemScenario(
        name="base_system",
        periods=periods,
        network=network,
        load=DownstreamLoad(p_d=load_profile(periods, 11.0, 2.5), d_d=LOAD_DAMPING),
        electrolyzers=(*awes, *pemels),
        plants=(plant,),
        afgs=tuple(afg(f"AFG{k}", large=True, bus="b0", initial_on=k == 1) for k in range(1, 4)),
        wts=wts,
        pvs=pvs,
        bess=(bes("BES1", power=8.0, energy=8.0, bus="b0", h_b=BES_GFM_INERTIA * 8.0),),
        samples=_sample_sets(wts, pvs, periods, rng, constants.WASSERSTEIN_RADII[0]),
        prices=PriceConfig(),
        mode=SchedulingMode.PM,
        seed=seed,
    )


def base_system_stress(seed: int = 0) -> SystemScenario:
    """
    Return the base system under high wind and a heavier downstream load, in CM1 mode.

    The extra wind lets the unconstrained schedule decommit the generators
    while the hydrogen plant runs at full load, leaving too little inertia
    and reserve for the load-step contingency.
    """
    scenario = base_system(seed)
    rng = np.random.default_rng(seed + 1)
    wts = _wind_farm(8, scenario.periods, "b1", rng, level=0.75)
    return scenario.with_changes(
        name="base_system_stress",
        wts=wts,
        load=replace(scenario.load, p_d=load_profile(scenario.periods, 16.0, 2.0)),
        afgs=tuple(replace(unit, initial_on=False) for unit in scenario.afgs),
        samples=_sample_sets(wts, scenario.pvs, scenario.periods, rng, constants.WASSERSTEIN_RADII[0]),
        mode=SchedulingMode.CM1,
    )


def ieee69_network(rng: np.random.Generator) -> NetworkModel:
    """Return the 69-bus radial feeder with synthetic line resistances (p.u.)."""
    branches = []
    for parent, first, last in IEEE69_CHAINS:
        previous = parent
        for bus in range(first, last + 1):
            resistance = round(float(rng.uniform(2e-4, 1e-3)), 6)
            branches.append(Branch(f"n{previous}", f"n{bus}", resistance, -LINE_FLOW_LIMIT, LINE_FLOW_LIMIT))
            previous = bus
    buses = tuple(
        Bus(f"n{k}", constants.NETWORK_TABLE["v_min"], constants.NETWORK_TABLE["v_max"]) for k in range(1, 70)
    )
    return NetworkModel(buses=buses, branches=tuple(branches), root="n1")


def ieee69_large(seed: int = 0) -> SystemScenario:
    """
    Return the large system on the 69-bus feeder.

    Twelve WTs, a 25 MW PV plant, two hydrogen plants (each six AWEs and
    eight PEMELs), a 20 MW/20 MWh BES and five 6 MW AFGs. Placements follow
    the lateral ends of the feeder and are synthetic.
    """
    rng = np.random.default_rng(seed)
    periods = 24
    network = ieee69_network(rng)
    wind_buses = ["n27", "n35", "n46", "n50", "n52", "n65"] * 2
    wts = _wind_farm(12, periods, wind_buses, rng, level=0.55)
    pvs = (PvUnit(id="PV1", capacity=25.0, forecast=solar_profile(periods, 25.0), bus="n67"),)
    fleets, plants = [], []
    for k, bus in ((1, "n2"), (2, "n3")):
        awes = electrolyzers(Technology.AWE, 6, prefix=f"HP{k}_AWE", bus=bus)
        pemels = electrolyzers(Technology.PEMEL, 8, prefix=f"HP{k}_PEMEL", bus=bus)
        fleets.extend((*awes, *pemels))
        plants.append(
            HydrogenPlant(
                id=f"HP{k}",
                electrolyzers=tuple(unit.id for unit in (*awes, *pemels)),
                bus=bus,
                q_lim=PLANT_THROUGHPUT,
                k_comp=COMPRESSOR_POWER,
            )
        )
    return SystemScenario(
        name="ieee69_large",
        periods=periods,
        network=network,
        load=DownstreamLoad(
            p_d=load_profile(periods, 22.0, 4.0),
            d_d=LOAD_DAMPING,
            bus_shares=(("n1", 0.5), ("n12", 0.25), ("n69", 0.25)),
        ),
        electrolyzers=tuple(fleets),
        plants=tuple(plants),
        afgs=tuple(afg(f"AFG{k}", large=False, bus="n1", initial_on=k <= 2) for k in range(1, 6)),
        wts=wts,
        pvs=pvs,
        bess=(bes("BES1", power=20.0, energy=20.0, bus="n1", h_b=BES_GFM_INERTIA * 20.0),),
        samples=_sample_sets(wts, pvs, periods, rng, constants.WASSERSTEIN_RADII[0]),
        mode=SchedulingMode.PM,
        seed=seed,
    )


BUILDERS = {
    "toy": toy,
    "base_system": base_system,
    "base_system_stress": base_system_stress,
    "ieee69_large": ieee69_large,
}


def build_preset(name: str, *, seed: int = 0) -> SystemScenario:
    """
    Build a named preset.

    Parameters
    ----------
    name : str
        One of ``PRESETS``.
    seed : int
        Seed of the synthetic forecasts, samples and line data.

    Returns
    -------
    SystemScenario
        The scenario, not yet validated.

    Raises
    ------
    UnknownPresetError
        If the name is not a shipped preset.

    Examples
    --------
    >>> build_preset("toy").unit_count
    2
    """
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise UnknownPresetError(name, PRESETS) from None
    scenario = builder(seed)
    logger.debug("Built preset %s (seed %d)", name, seed)
    return scenario
