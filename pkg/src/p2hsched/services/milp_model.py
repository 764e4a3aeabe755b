"""
MILP Model.

Assembles the frequency-constrained, chance-constrained scheduling model of
an off-grid power-to-hydrogen system as a pyomo ``ConcreteModel``:
electrolyzer state machine, production surrogates and thermal balance,
hydrogen-plant compressors, ammonia-fueled generators, battery storage,
deloaded wind and PV, linearized DistFlow, Wasserstein chance constraints
and the compiled frequency-security rows. The objective maximizes net profit.

Reserve signs follow the system: "up" reserve raises net generation, so an
electrolyzer provides it by lowering its consumption.

Component names follow ``<kind>_<quantity>`` and are indexed by
``(unit, hour)``; with symbolic labels the LP writer emits them as
``<kind>_<quantity>(<unit>_<hour>)``.
"""

from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import pyomo.environ as pyo

from p2hsched.exceptions.errors import (
    ContractViolationError,
    DomainError,
    EmptyFleetError,
    NetworkTopologyError,
    ScenarioValidationError,
)
from p2hsched.models.envelope import SecurityEnvelope
from p2hsched.models.scenario import LoadBasis, SchedulingMode, SystemScenario
from p2hsched.models.units import ElectrolyzerUnit, HydrogenFit, PowerFit, Technology
from p2hsched.services.device_models import JOULES_PER_MWH, SECONDS_PER_HOUR
from p2hsched.services.drcc import (
    JOINT_COORDINATES,
    JOINT_SOURCE,
    RESERVE_CLASSES,
    WIND_SOURCE,
    AffineForm,
    DrccBlock,
    affine_policy_constraints,
    check_regime,
    reformulate,
)
from p2hsched.services.production_fit import fit_production_models
from p2hsched.services.security_compiler import (
    SecurityTerms,
    compile_envelopes,
    compile_security_rows,
    reserve_rate_bounds,
)
from p2hsched.utils.logging_config import logger

__all__ = [
    "HourSecurity",
    "ModelCensus",
    "ModelInstance",
    "ObjectiveTerms",
    "ScheduleModelBuilder",
    "build",
    "census",
    "fit_production_models",
    "linearize_bilinear",
    "linearize_state_products",
    "objective_terms",
]

INITIAL_STATES = {"on": (1, 0, 0), "standby": (0, 1, 0), "off": (0, 0, 1)}


@dataclass(frozen=True)
class ModelCensus:
    """Size of a built model; ``binaries`` counts binary variables that are not fixed."""

    variables: int
    binaries: int
    constraints: int


@dataclass(frozen=True)
class ObjectiveTerms:
    """Objective components (CNY): production profit, generator cost and reserve cost."""

    c_ps: object
    c_op: object
    c_res: object


@dataclass(frozen=True)
class HourSecurity:
    """
    Frequency-response expressions of one hour.

    ``switched`` lists the committed inertia sources as (label, inertia,
    binary); ``constant_inertia`` is the always-connected storage inertia.
    """

    constant_inertia: float
    switched: tuple[tuple[str, float, object], ...]
    stage1_rate: object
    stage2_rate: object
    total_reserve: object

    @property
    def inertia(self) -> object:
        """Aggregate inertia expression (MW·s/Hz)."""
        return self.constant_inertia + sum(h * x for _, h, x in self.switched)


@dataclass
class ModelInstance:
    """A built scheduling model with the data needed to read its solution back."""

    model: pyo.ConcreteModel
    scenario: SystemScenario
    envelopes: dict[int, SecurityEnvelope]
    drcc_blocks: tuple[DrccBlock, ...] = ()
    security_terms: dict[int, SecurityTerms] = field(default_factory=dict)
    fits: dict[str, tuple[PowerFit, HydrogenFit]] = field(default_factory=dict)

    def census(self) -> ModelCensus:
        """Count variables, binaries and constraint rows."""
        return census(self.model)


def census(model: pyo.Block) -> ModelCensus:
    """Count the variables, binary variables and active constraint rows of a model."""
    variables = list(model.component_data_objects(pyo.Var, descend_into=True))
    constraints = list(model.component_data_objects(pyo.Constraint, active=True, descend_into=True))
    return ModelCensus(
        variables=len(variables),
        binaries=sum(1 for var in variables if var.is_binary() and not var.fixed),
        constraints=len(constraints),
    )


def linearize_bilinear(
    block: pyo.Block,
    name: str,
    x: pyo.Var,
    r: object,
    r_max: float | None = None,
) -> pyo.Var:
    """
    Add ``y = x·r`` for a binary ``x`` and a continuous ``r`` in [0, r_max].

    Four rows are added: y ≤ r_max·x, y ≤ r, y ≥ r − r_max·(1 − x), y ≥ 0.
    ``r`` may be a variable or a linear expression; ``r_max`` defaults to the
    variable's upper bound.

    Returns
    -------
    pyo.Var
        The product variable, named ``name`` inside ``block``.
    """
    if r_max is None:
        r_max = getattr(r, "ub", None)
        lower = getattr(r, "lb", None)
        if r_max is None or lower is None or lower < 0:
            raise DomainError(name, (lower, r_max), "finite nonnegative bounds")
    if r_max < 0:
        raise DomainError(name, r_max, ">= 0")
    y = pyo.Var(domain=pyo.NonNegativeReals)
    block.add_component(name, y)
    block.add_component(f"{name}_on", pyo.Constraint(expr=y <= r_max * x))
    block.add_component(f"{name}_value", pyo.Constraint(expr=y <= r))
    block.add_component(f"{name}_floor", pyo.Constraint(expr=y >= r - r_max * (1 - x)))
    block.add_component(f"{name}_nonneg", pyo.Constraint(expr=y >= 0))
    return y


def linearize_state_products(block: pyo.Block, name: str, z: object, a: object, b: object) -> None:
    """
    Add the binary-product rows ``z ≤ a``, ``z ≤ b``, ``z ≥ a + b − 1``, ``z ≥ 0``.

    ``a`` may be a constant state (0 or 1) at the first period.
    """
    if isinstance(a, int | float) and isinstance(b, int | float):
        raise DomainError(name, (a, b), "at least one variable operand")
    block.add_component(f"{name}_first", pyo.Constraint(expr=z <= a))
    block.add_component(f"{name}_second", pyo.Constraint(expr=z <= b))
    block.add_component(f"{name}_both", pyo.Constraint(expr=z >= a + b - 1))
    block.add_component(f"{name}_nonneg", pyo.Constraint(expr=z >= 0))


def objective_terms(model: pyo.ConcreteModel, scenario: SystemScenario) -> ObjectiveTerms:
    """
    Return the objective components of a built model.

    Production profit is hydrogen revenue minus electrolyzer cold-start,
    shutdown and standby costs; generator cost is ammonia fuel plus AFG
    start-ups; reserve cost prices the held primary reserve of AFGs, WTs and
    storage.
    """
    dt = scenario.dt_h
    c_ps = sum(
        scenario.hydrogen_price(unit) * model.el_q[unit.id, t] * dt
        - unit.cost_up_cold * model.el_z_upc[unit.id, t]
        - unit.cost_down * model.el_z_dn[unit.id, t]
        - unit.cost_sb * model.el_x_sb[unit.id, t]
        for unit in scenario.electrolyzers
        for t in scenario.hours
    )
    c_op = sum(
        unit.cost_nh3 * model.afg_q[unit.id, t] * SECONDS_PER_HOUR * dt
        + unit.cost_start * model.afg_z_up[unit.id, t]
        for unit in scenario.afgs
        for t in scenario.hours
    )
    c_res = sum(
        unit.cost_reserve * reserve[unit.id, t] * dt
        for fleet, reserve in (
            (scenario.afgs, model.afg_r_pfr),
            (scenario.wts, model.wt_r_pfr),
            (scenario.bess, model.bes_r_pfr),
        )
        for unit in fleet
        for t in scenario.hours
    )
    return ObjectiveTerms(c_ps=c_ps, c_op=c_op, c_res=c_res)


class ScheduleModelBuilder:
    """
    Build the scheduling MILP of one scenario.

    Parameters
    ----------
    scenario : SystemScenario
        Validated scenario.
    envelopes : dict[int, SecurityEnvelope]
        Compiled security envelopes for every hour; ignored in CM1.
    strict_drcc : bool
        Raise instead of warning when a sample set has ρ > 1/N.
    """

    def __init__(
        self,
        scenario: SystemScenario,
        envelopes: Mapping[int, SecurityEnvelope],
        *,
        strict_drcc: bool = False,
    ) -> None:
        self.scenario = scenario
        self.envelopes = dict(envelopes)
        self.strict_drcc = strict_drcc
        self.freq = scenario.frequency
        self.fits: dict[str, tuple[PowerFit, HydrogenFit]] = {}
        self.drcc_blocks: list[DrccBlock] = []
        self.security_terms: dict[int, SecurityTerms] = {}
        self.el = {unit.id: unit for unit in scenario.electrolyzers}
        self.afg = {unit.id: unit for unit in scenario.afgs}
        self.wt = {unit.id: unit for unit in scenario.wts}
        self.pv = {unit.id: unit for unit in scenario.pvs}
        self.bes = {unit.id: unit for unit in scenario.bess}
        self.plant = {plant.id: plant for plant in scenario.plants}
        self.supports_el = scenario.mode is not SchedulingMode.CM2

    def build(self) -> ModelInstance:
        """Assemble and return the model."""
        self._check_structure()
        m = pyo.ConcreteModel(name=self.scenario.name)
        self.define_sets(m)
        self.define_electrolyzers(m)
        self.define_plants(m)
        self.define_generators(m)
        self.define_storage(m)
        self.define_renewables(m)
        self.define_network(m)
        self.define_chance_constraints(m)
        self.define_security(m)
        self.define_objective(m)
        instance = ModelInstance(
            model=m,
            scenario=self.scenario,
            envelopes=self.envelopes,
            drcc_blocks=tuple(self.drcc_blocks),
            security_terms=self.security_terms,
            fits=self.fits,
        )
        size = instance.census()
        logger.info(
            "Built %s (%s): %d variables (%d binary), %d constraints",
            self.scenario.name,
            self.scenario.mode.value,
            size.variables,
            size.binaries,
            size.constraints,
        )
        return instance

    def _check_structure(self) -> None:
        scenario = self.scenario
        if scenario.unit_count == 0:
            raise EmptyFleetError
        issues = scenario.network.issues()
        if issues:
            raise NetworkTopologyError("; ".join(issues))
        buses = set(scenario.network.bus_ids)
        for unit in (*scenario.electrolyzers, *scenario.afgs, *scenario.wts, *scenario.pvs, *scenario.bess):
            if unit.bus and unit.bus not in buses:
                raise NetworkTopologyError(f"unit {unit.id} is attached to unknown bus {unit.bus!r}")
        short = [
            unit_id
            for unit_id, forecast in scenario.forecasts.items()
            if len(forecast) < scenario.periods
        ]
        if len(scenario.load.p_d) < scenario.periods:
            short.append("load")
        if short:
            raise ScenarioValidationError([f"{name}: missing forecast hours" for name in short])
        if scenario.mode is not SchedulingMode.CM1:
            missing = [t for t in scenario.hours if t not in self.envelopes]
            if missing:
                msg = f"Security envelopes missing for hours {missing}."
                raise ContractViolationError(msg)

    def _bus(self, bus: str) -> str:
        return bus or self.scenario.network.root

    # sets ------------------------------------------------------------------

    def define_sets(self, m: pyo.ConcreteModel) -> None:
        """Define the index sets."""
        scenario = self.scenario
        m.T = pyo.Set(initialize=list(scenario.hours), ordered=True)
        m.EL = pyo.Set(initialize=list(self.el), ordered=True)
        m.AFG = pyo.Set(initialize=list(self.afg), ordered=True)
        m.WT = pyo.Set(initialize=list(self.wt), ordered=True)
        m.PV = pyo.Set(initialize=list(self.pv), ordered=True)
        m.BES = pyo.Set(initialize=list(self.bes), ordered=True)
        m.PLANT = pyo.Set(initialize=list(self.plant), ordered=True)
        m.BUS = pyo.Set(initialize=list(scenario.network.bus_ids), ordered=True)
        m.LINE = pyo.Set(
            initialize=[branch.key for branch in scenario.network.branches], dimen=2, ordered=True
        )

    # electrolyzers -----------------------------------------------------------

    def _fit(self, unit: ElectrolyzerUnit) -> tuple[PowerFit, HydrogenFit]:
        if unit.id not in self.fits:
            if unit.power_fit is not None and unit.h2_fit is not None:
                self.fits[unit.id] = (unit.power_fit, unit.h2_fit)
            else:
                self.fits[unit.id] = fit_production_models(unit)
        return self.fits[unit.id]

    def define_electrolyzers(self, m: pyo.ConcreteModel) -> None:  # noqa: PLR0915
        """Define electrolyzer states, production, thermal balance and reserves."""
        el = self.el
        freq = self.freq
        dt = self.scenario.dt_h
        hours = list(self.scenario.hours)

        m.el_x_st = pyo.Var(m.EL, m.T, domain=pyo.Binary)
        m.el_x_sb = pyo.Var(m.EL, m.T, domain=pyo.Binary)
        m.el_x_sd = pyo.Var(m.EL, m.T, bounds=(0, 1))
        m.el_z_upc = pyo.Var(m.EL, m.T, bounds=(0, 1))
        m.el_z_uph = pyo.Var(m.EL, m.T, bounds=(0, 1))
        m.el_z_dn = pyo.Var(m.EL, m.T, bounds=(0, 1))
        m.el_i = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (0, el[e].i_max))
        m.el_temp = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (el[e].t_min, el[e].t_max))
        m.el_p_stack = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (0, el[e].p_max))
        m.el_d_sb = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (-el[e].p_max, el[e].p_max))
        m.el_d_sd = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (-el[e].p_max, el[e].p_max))
        m.el_h_cool = pyo.Var(m.EL, m.T, domain=pyo.NonNegativeReals)
        m.el_q = pyo.Var(m.EL, m.T, domain=pyo.NonNegativeReals)
        m.el_p = pyo.Var(m.EL, m.T, domain=pyo.NonNegativeReals)
        m.el_r_pfr = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (0, el[e].r_pfr_lim))
        m.el_r_up = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (0, el[e].r_up_lim))
        m.el_r_dn = pyo.Var(m.EL, m.T, bounds=lambda _m, e, t: (0, el[e].r_dn_lim))
        m.el_r_vi = pyo.Var(m.EL, m.T, domain=pyo.NonNegativeReals)

        for e, unit in el.items():
            for t in hours:
                if not unit.allow_standby:
                    m.el_x_sb[e, t].fix(0)
                if unit.tech is Technology.AWE or not self.supports_el:
                    m.el_r_vi[e, t].fix(0)
                if not self.supports_el:
                    for reserve in (m.el_r_pfr, m.el_r_up, m.el_r_dn):
                        reserve[e, t].fix(0)
            m.el_temp[e, hours[0]].fix(
                min(max(unit.initial_temp if unit.initial_temp is not None else unit.t_min, unit.t_min), unit.t_max)
            )

        def state_sum_rule(_m, e, t):
            """Exactly one of running, standby and shut down"""
            return _m.el_x_st[e, t] + _m.el_x_sb[e, t] + _m.el_x_sd[e, t] == 1

        m.el_state_sum = pyo.Constraint(m.EL, m.T, rule=state_sum_rule)

        m.el_transition = pyo.Block(m.EL, m.T)
        for e, unit in el.items():
            before = INITIAL_STATES[unit.initial_state]
            for t in hours:
                if t == hours[0]:
                    prev_st, prev_sb, prev_sd = before
                else:
                    prev_st, prev_sb, prev_sd = m.el_x_st[e, t - 1], m.el_x_sb[e, t - 1], m.el_x_sd[e, t - 1]
                block = m.el_transition[e, t]
                linearize_state_products(block, "cold_start", m.el_z_upc[e, t], prev_sd, m.el_x_st[e, t])
                linearize_state_products(block, "hot_start", m.el_z_uph[e, t], prev_sb, m.el_x_st[e, t])
                linearize_state_products(block, "shutdown", m.el_z_dn[e, t], prev_st, m.el_x_sd[e, t])

        m.el_current_min = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_i[e, t] >= el[e].i_min * _m.el_x_st[e, t]
        )
        m.el_current_max = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_i[e, t] <= el[e].i_max * _m.el_x_st[e, t]
        )

        def power_fit_rule(_m, e, t):
            """Affine stack power, offset absorbed by the standby and shutdown auxiliaries"""
            fit, _ = self._fit(el[e])
            return _m.el_p_stack[e, t] == (
                fit.a1 * _m.el_i[e, t] + fit.a2 * _m.el_temp[e, t] + fit.a3
                + _m.el_d_sb[e, t] + _m.el_d_sd[e, t]
            )

        m.el_power_fit = pyo.Constraint(m.EL, m.T, rule=power_fit_rule)
        m.el_stack_cap = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_p_stack[e, t] <= el[e].p_max * _m.el_x_st[e, t]
        )
        m.el_standby_aux_upper = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_d_sb[e, t] <= el[e].p_max * _m.el_x_sb[e, t]
        )
        m.el_standby_aux_lower = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_d_sb[e, t] >= -el[e].p_max * _m.el_x_sb[e, t]
        )
        m.el_shutdown_aux_upper = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_d_sd[e, t] <= el[e].p_max * _m.el_x_sd[e, t]
        )
        m.el_shutdown_aux_lower = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_d_sd[e, t] >= -el[e].p_max * _m.el_x_sd[e, t]
        )

        m.EL_SEG = pyo.Set(
            initialize=[(e, k) for e, unit in el.items() for k in range(len(self._fit(unit)[1].slopes))],
            dimen=2,
            ordered=True,
        )

        def hydrogen_rule(_m, e, k, t):
            """Concave piecewise upper bound of production"""
            _, h2 = self._fit(el[e])
            return _m.el_q[e, t] <= h2.slopes[k] * _m.el_i[e, t] + h2.intercepts[k] * _m.el_x_st[e, t]

        m.el_hydrogen = pyo.Constraint(m.EL_SEG, m.T, rule=hydrogen_rule)
        m.el_cooling_cap = pyo.Constraint(
            m.EL,
            m.T,
            rule=lambda _m, e, t: _m.el_h_cool[e, t]
            <= el[e].a_cool * (_m.el_temp[e, t] - el[e].t_cool) / 1e3,
        )

        def thermal_rule(_m, e, t):
            """Lumped heat balance carried to the next hour"""
            if t == hours[0]:
                return pyo.Constraint.Skip
            unit = el[e]
            heat = (
                _m.el_p_stack[e, t - 1]
                - unit.n_c * unit.v_tn * _m.el_i[e, t - 1] / 1e3
                - _m.el_h_cool[e, t - 1]
            )
            return _m.el_temp[e, t] == _m.el_temp[e, t - 1] + heat * JOULES_PER_MWH * dt / unit.c_heat

        m.el_thermal = pyo.Constraint(m.EL, m.T, rule=thermal_rule)

        def total_power_rule(_m, e, t):
            """Stack, cooling, pump and standby consumption"""
            unit = el[e]
            return _m.el_p[e, t] == (
                _m.el_p_stack[e, t]
                + _m.el_h_cool[e, t] / unit.eta_cool
                + unit.k_pump * _m.el_q[e, t] / 1e3
                + unit.p_sb * _m.el_x_sb[e, t]
            )

        m.el_total_power = pyo.Constraint(m.EL, m.T, rule=total_power_rule)

        def headroom_lower_rule(_m, e, t):
            """Room to cut consumption for up, primary and inertial reserve"""
            unit = el[e]
            return (
                _m.el_p[e, t] - _m.el_r_up[e, t] - _m.el_r_pfr[e, t] - _m.el_r_vi[e, t]
                >= unit.p_sb * _m.el_x_sb[e, t] + unit.p_min * _m.el_x_st[e, t]
            )

        def headroom_upper_rule(_m, e, t):
            """Room to raise consumption for down, primary and inertial reserve"""
            unit = el[e]
            return (
                _m.el_p[e, t] + _m.el_r_dn[e, t] + _m.el_r_pfr[e, t] + _m.el_r_vi[e, t]
                <= unit.p_max * _m.el_x_st[e, t] + unit.p_sb * _m.el_x_sb[e, t]
            )

        m.el_headroom_lower = pyo.Constraint(m.EL, m.T, rule=headroom_lower_rule)
        m.el_headroom_upper = pyo.Constraint(m.EL, m.T, rule=headroom_upper_rule)
        m.el_pfr_cap = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_r_pfr[e, t] <= el[e].r_pfr_lim * _m.el_x_st[e, t]
        )
        m.el_up_cap = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_r_up[e, t] <= el[e].r_up_lim * _m.el_x_st[e, t]
        )
        m.el_dn_cap = pyo.Constraint(
            m.EL, m.T, rule=lambda _m, e, t: _m.el_r_dn[e, t] <= el[e].r_dn_lim * _m.el_x_st[e, t]
        )

        def virtual_inertia_rule(_m, e, t):
            """Inertial response power of a running PEMEL"""
            unit = el[e]
            if unit.tech is not Technology.PEMEL or not self.supports_el:
                return pyo.Constraint.Skip
            response = unit.h_virtual * freq.rocof_lim * freq.f_n
            return _m.el_r_vi[e, t] == response * _m.el_x_st[e, t]

        m.el_virtual_inertia = pyo.Constraint(m.EL, m.T, rule=virtual_inertia_rule)

    def define_plants(self, m: pyo.ConcreteModel) -> None:
        """Define compressor power and throughput of every hydrogen plant."""
        plant = self.plant
        m.plant_p_comp = pyo.Var(m.PLANT, m.T, domain=pyo.NonNegativeReals)
        m.plant_compressor = pyo.Constraint(
            m.PLANT,
            m.T,
            rule=lambda _m, p, t: _m.plant_p_comp[p, t]
            == plant[p].k_comp * sum(_m.el_q[e, t] for e in plant[p].electrolyzers),
        )
        m.plant_throughput = pyo.Constraint(
            m.PLANT,
            m.T,
            rule=lambda _m, p, t: sum(_m.el_q[e, t] for e in plant[p].electrolyzers) <= plant[p].q_lim,
        )

    # generators --------------------------------------------------------------

    def define_generators(self, m: pyo.ConcreteModel) -> None:  # noqa: PLR0915
        """Define AFG commitment, output, ramping, fuel and reserves."""
        afg = self.afg
        dt = self.scenario.dt_h
        first = self.scenario.hours[0]

        m.afg_x = pyo.Var(m.AFG, m.T, domain=pyo.Binary)
        m.afg_z_up = pyo.Var(m.AFG, m.T, bounds=(0, 1))
        m.afg_z_dn = pyo.Var(m.AFG, m.T, bounds=(0, 1))
        m.afg_p = pyo.Var(m.AFG, m.T, bounds=lambda _m, g, t: (0, afg[g].p_max))
        m.afg_q = pyo.Var(m.AFG, m.T, domain=pyo.NonNegativeReals)
        m.afg_r_pfr = pyo.Var(m.AFG, m.T, bounds=lambda _m, g, t: (0, afg[g].r_pfr_lim))
        m.afg_r_up = pyo.Var(m.AFG, m.T, bounds=lambda _m, g, t: (0, afg[g].r_up_lim))
        m.afg_r_dn = pyo.Var(m.AFG, m.T, bounds=lambda _m, g, t: (0, afg[g].r_dn_lim))

        def previous(_m, g, t):
            return float(afg[g].initial_on) if t == first else _m.afg_x[g, t - 1]

        m.afg_logic = pyo.Constraint(
            m.AFG,
            m.T,
            rule=lambda _m, g, t: _m.afg_x[g, t] - previous(_m, g, t)
            == _m.afg_z_up[g, t] - _m.afg_z_dn[g, t],
        )
        m.afg_single_transition = pyo.Constraint(
            m.AFG, m.T, rule=lambda _m, g, t: _m.afg_z_up[g, t] + _m.afg_z_dn[g, t] <= 1
        )

        def min_up_rule(_m, g, t):
            """Started units stay on for the minimum up time"""
            window = range(max(first, t - afg[g].t_on + 1), t + 1)
            return sum(_m.afg_z_up[g, k] for k in window) <= _m.afg_x[g, t]

        def min_down_rule(_m, g, t):
            """Stopped units stay off for the minimum down time"""
            window = range(max(first, t - afg[g].t_off + 1), t + 1)
            return sum(_m.afg_z_dn[g, k] for k in window) <= 1 - _m.afg_x[g, t]

        m.afg_min_up = pyo.Constraint(m.AFG, m.T, rule=min_up_rule)
        m.afg_min_down = pyo.Constraint(m.AFG, m.T, rule=min_down_rule)

        m.afg_output_lower = pyo.Constraint(
            m.AFG,
            m.T,
            rule=lambda _m, g, t: _m.afg_p[g, t] - _m.afg_r_pfr[g, t] - _m.afg_r_dn[g, t]
            >= afg[g].p_min * _m.afg_x[g, t],
        )
        m.afg_output_upper = pyo.Constraint(
            m.AFG,
            m.T,
            rule=lambda _m, g, t: _m.afg_p[g, t] + _m.afg_r_pfr[g, t] + _m.afg_r_up[g, t]
            <= afg[g].p_max * _m.afg_x[g, t],
        )
        m.afg_pfr_cap = pyo.Constraint(
            m.AFG, m.T, rule=lambda _m, g, t: _m.afg_r_pfr[g, t] <= afg[g].r_pfr_lim * _m.afg_x[g, t]
        )
        m.afg_up_cap = pyo.Constraint(
            m.AFG, m.T, rule=lambda _m, g, t: _m.afg_r_up[g, t] <= afg[g].r_up_lim * _m.afg_x[g, t]
        )
        m.afg_dn_cap = pyo.Constraint(
            m.AFG, m.T, rule=lambda _m, g, t: _m.afg_r_dn[g, t] <= afg[g].r_dn_lim * _m.afg_x[g, t]
        )

        def ramp_up_rule(_m, g, t):
            if t == first:
                return pyo.Constraint.Skip
            unit = afg[g]
            return _m.afg_p[g, t] - _m.afg_p[g, t - 1] <= unit.ramp_up * dt + unit.p_max * (
                1 - _m.afg_x[g, t - 1]
            )

        def ramp_down_rule(_m, g, t):
            if t == first:
                return pyo.Constraint.Skip
            unit = afg[g]
            return _m.afg_p[g, t - 1] - _m.afg_p[g, t] <= unit.ramp_dn * dt + unit.p_max * (
                1 - _m.afg_x[g, t]
            )

        m.afg_ramp_up = pyo.Constraint(m.AFG, m.T, rule=ramp_up_rule)
        m.afg_ramp_down = pyo.Constraint(m.AFG, m.T, rule=ramp_down_rule)
        m.afg_fuel = pyo.Constraint(
            m.AFG,
            m.T,
            rule=lambda _m, g, t: _m.afg_p[g, t]
            == afg[g].eta_comb * afg[g].eta_steam * afg[g].lhv_nh3 * _m.afg_q[g, t],
        )

    # storage -----------------------------------------------------------------

    def define_storage(self, m: pyo.ConcreteModel) -> None:
        """Define battery charge, state of charge, swing and energy headroom."""
        bes = self.bes
        freq = self.freq
        dt = self.scenario.dt_h
        duration = self.scenario.reserve_duration_h
        hours = list(self.scenario.hours)

        m.bes_x_c = pyo.Var(m.BES, m.T, domain=pyo.Binary)
        m.bes_p_c = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (0, bes[b].p_lim))
        m.bes_p_d = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (0, bes[b].p_lim))
        m.bes_e = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (bes[b].e_min, bes[b].e_max))
        m.bes_r_pfr = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (0, bes[b].p_lim))
        m.bes_r_up = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (0, bes[b].p_lim))
        m.bes_r_dn = pyo.Var(m.BES, m.T, bounds=lambda _m, b, t: (0, bes[b].p_lim))

        def grid_forming(b: str) -> float:
            return bes[b].h_b * freq.rocof_lim

        m.bes_charge_cap = pyo.Constraint(
            m.BES, m.T, rule=lambda _m, b, t: _m.bes_p_c[b, t] <= bes[b].p_lim * _m.bes_x_c[b, t]
        )
        m.bes_discharge_cap = pyo.Constraint(
            m.BES,
            m.T,
            rule=lambda _m, b, t: _m.bes_p_d[b, t] <= bes[b].p_lim * (1 - _m.bes_x_c[b, t]),
        )
        m.bes_swing_up = pyo.Constraint(
            m.BES,
            m.T,
            rule=lambda _m, b, t: _m.bes_p_d[b, t] - _m.bes_p_c[b, t] + _m.bes_r_up[b, t]
            + _m.bes_r_pfr[b, t] + grid_forming(b)
            <= bes[b].p_lim,
        )
        m.bes_swing_down = pyo.Constraint(
            m.BES,
            m.T,
            rule=lambda _m, b, t: _m.bes_p_c[b, t] - _m.bes_p_d[b, t] + _m.bes_r_dn[b, t]
            + _m.bes_r_pfr[b, t] + grid_forming(b)
            <= bes[b].p_lim,
        )

        def soc_rule(_m, b, t):
            """Energy balance over the hour"""
            unit = bes[b]
            before = unit.e_init if t == hours[0] else _m.bes_e[b, t - 1]
            flow = unit.eta_c * _m.bes_p_c[b, t] - _m.bes_p_d[b, t] / unit.eta_d
            return _m.bes_e[b, t] == before * (1 - unit.self_discharge * dt) + flow * dt

        m.bes_soc = pyo.Constraint(m.BES, m.T, rule=soc_rule)
        m.bes_cyclic = pyo.Constraint(m.BES, rule=lambda _m, b: _m.bes_e[b, hours[-1]] == bes[b].e_init)
        m.bes_energy_up = pyo.Constraint(
            m.BES,
            m.T,
            rule=lambda _m, b, t: _m.bes_e[b, t]
            - (_m.bes_r_up[b, t] + _m.bes_r_pfr[b, t] + grid_forming(b)) * duration / bes[b].eta_d
            >= bes[b].e_min,
        )
        m.bes_energy_down = pyo.Constraint(
            m.BES,
            m.T,
            rule=lambda _m, b, t: _m.bes_e[b, t]
            + (_m.bes_r_dn[b, t] + _m.bes_r_pfr[b, t] + grid_forming(b)) * duration * bes[b].eta_c
            <= bes[b].e_max,
        )

    # renewables ----------------------------------------------------------------

    def define_renewables(self, m: pyo.ConcreteModel) -> None:
        """Define deloaded wind with primary reserve and forecast-following PV with spill."""
        wt = self.wt
        pv = self.pv

        m.wt_p = pyo.Var(m.WT, m.T, bounds=lambda _m, w, t: (0, wt[w].capacity))
        m.wt_k = pyo.Var(m.WT, m.T, bounds=lambda _m, w, t: (0, wt[w].k_deload_max))
        m.wt_r_pfr = pyo.Var(
            m.WT, m.T, bounds=lambda _m, w, t: (0, wt[w].k_deload_max * wt[w].capacity)
        )
        m.pv_p = pyo.Var(m.PV, m.T, bounds=lambda _m, s, t: (0, pv[s].forecast[t]))

        for w, unit in wt.items():
            if unit.pin_deload:
                for t in self.scenario.hours:
                    m.wt_k[w, t].fix(unit.k_deload_max)

        m.wt_available = pyo.Constraint(
            m.WT,
            m.T,
            rule=lambda _m, w, t: _m.wt_p[w, t] + wt[w].forecast[t] * _m.wt_k[w, t]
            <= wt[w].forecast[t],
        )

    # network -----------------------------------------------------------------

    def _attachments(self) -> dict[str, dict[str, list[str]]]:
        by_bus: dict[str, dict[str, list[str]]] = defaultdict(lambda: defaultdict(list))
        for kind, fleet in (
            ("el", self.el),
            ("afg", self.afg),
            ("wt", self.wt),
            ("pv", self.pv),
            ("bes", self.bes),
            ("plant", self.plant),
        ):
            for unit_id, unit in fleet.items():
                by_bus[self._bus(unit.bus)][kind].append(unit_id)
        return by_bus

    def define_network(self, m: pyo.ConcreteModel) -> None:
        """Define lossless linearized DistFlow on the radial network (per unit)."""
        network = self.scenario.network
        base = self.scenario.base_mva
        load = self.scenario.load
        branch = {b.key: b for b in network.branches}
        buses = {bus.id: bus for bus in network.buses}
        shares = dict(load.bus_shares) or {network.root: 1.0}
        attached = self._attachments()

        m.net_flow = pyo.Var(
            m.LINE,
            m.T,
            bounds=lambda _m, i, j, t: (branch[i, j].flow_min / base, branch[i, j].flow_max / base),
        )
        m.net_v2 = pyo.Var(
            m.BUS, m.T, bounds=lambda _m, n, t: (buses[n].v_min ** 2, buses[n].v_max ** 2)
        )
        for t in self.scenario.hours:
            m.net_v2[network.root, t].fix(1.0)

        def balance_rule(_m, n, t):
            """Nodal active-power balance"""
            units = attached.get(n, {})
            generation = (
                sum(_m.wt_p[w, t] for w in units.get("wt", ()))
                + sum(_m.pv_p[s, t] for s in units.get("pv", ()))
                + sum(_m.afg_p[g, t] for g in units.get("afg", ()))
                + sum(_m.bes_p_d[b, t] for b in units.get("bes", ()))
            )
            consumption = (
                load.p_d[t] * shares.get(n, 0.0)
                + sum(_m.el_p[e, t] for e in units.get("el", ()))
                + sum(_m.plant_p_comp[p, t] for p in units.get("plant", ()))
                + sum(_m.bes_p_c[b, t] for b in units.get("bes", ()))
            )
            parent = network.parent[n]
            inflow = _m.net_flow[parent, n, t] if parent is not None else 0.0
            outflow = sum(_m.net_flow[n, c, t] for c in network.children[n])
            return inflow - outflow == (consumption - generation) / base

        m.net_balance = pyo.Constraint(m.BUS, m.T, rule=balance_rule)
        m.net_voltage = pyo.Constraint(
            m.LINE,
            m.T,
            rule=lambda _m, i, j, t: _m.net_v2[j, t]
            == _m.net_v2[i, t] - 2 * branch[i, j].resistance * _m.net_flow[i, j, t],
        )

    # chance constraints -------------------------------------------------------

    def reserve_classes(self) -> tuple[str, ...]:
        """Reserve classes that carry regulation reserve in this scenario."""
        present = {"afg": bool(self.afg), "el": bool(self.el) and self.supports_el, "bes": bool(self.bes)}
        return tuple(name for name in RESERVE_CLASSES if present[name])

    def _regulation(self, m: pyo.ConcreteModel, direction: str, t: int, classes: tuple[str, ...]) -> object:
        terms = {
            "afg": lambda: sum(getattr(m, f"afg_r_{direction}")[g, t] for g in self.afg),
            "el": lambda: sum(getattr(m, f"el_r_{direction}")[e, t] for e in self.el),
            "bes": lambda: sum(getattr(m, f"bes_r_{direction}")[b, t] for b in self.bes),
        }
        return sum(terms[name]() for name in classes)

    def define_chance_constraints(self, m: pyo.ConcreteModel) -> None:
        """Define the wind-reserve and joint regulation chance constraints."""
        scenario = self.scenario
        wind = scenario.samples.get(WIND_SOURCE)
        if self.wt and wind is not None:
            check_regime(wind, strict=self.strict_drcc)
            capacity = np.array([unit.capacity for unit in self.wt.values()])
            shares = capacity / capacity.sum()
            m.drcc_wind = pyo.Block(m.T)
            for t in scenario.hours:
                form = AffineForm(
                    a_terms=tuple(-m.wt_k[w, t] for w in self.wt),
                    b_term=sum(
                        unit.forecast[t] * m.wt_k[w, t] - m.wt_r_pfr[w, t] for w, unit in self.wt.items()
                    ),
                )
                points = np.outer(wind.points(t)[:, 0], shares)
                self.drcc_blocks.append(
                    reformulate(
                        m.drcc_wind[t], form, points, wind.theta, wind.rho,
                        label=f"wind[{t}]", hour=t, strict=self.strict_drcc,
                    )
                )
        elif self.wt:
            m.wt_reserve_cover = pyo.Constraint(
                m.WT,
                m.T,
                rule=lambda _m, w, t: _m.wt_r_pfr[w, t] <= self.wt[w].forecast[t] * _m.wt_k[w, t],
            )

        joint = scenario.samples.get(JOINT_SOURCE)
        classes = self.reserve_classes()
        if joint is None or not classes:
            return
        check_regime(joint, strict=self.strict_drcc)
        m.CLASS = pyo.Set(initialize=list(classes), ordered=True)
        m.SOURCE = pyo.Set(initialize=list(JOINT_COORDINATES), ordered=True)
        m.alpha = pyo.Var(m.CLASS, m.T, m.SOURCE)
        m.alpha_policy = pyo.Block(m.T, m.SOURCE)
        for t in scenario.hours:
            for source in JOINT_COORDINATES:
                affine_policy_constraints(
                    m.alpha_policy[t, source], {c: m.alpha[c, t, source] for c in classes}, classes
                )
        m.drcc_up = pyo.Block(m.T)
        m.drcc_down = pyo.Block(m.T)
        half = joint.rho / 2.0
        for t in scenario.hours:
            participation = [sum(m.alpha[c, t, s] for c in classes) for s in JOINT_COORDINATES]
            points = joint.points(t)
            up = AffineForm(
                a_terms=tuple(-share for share in participation),
                b_term=self._regulation(m, "up", t, classes),
            )
            down = AffineForm(
                a_terms=tuple(participation),
                b_term=self._regulation(m, "dn", t, classes),
            )
            self.drcc_blocks.append(
                reformulate(
                    m.drcc_up[t], up, points, joint.theta, half,
                    label=f"joint_up[{t}]", hour=t, strict=self.strict_drcc,
                )
            )
            self.drcc_blocks.append(
                reformulate(
                    m.drcc_down[t], down, points, joint.theta, half,
                    label=f"joint_down[{t}]", hour=t, strict=self.strict_drcc,
                )
            )

    # security ----------------------------------------------------------------

    def security_expressions(self, m: pyo.ConcreteModel, t: int) -> HourSecurity:
        """Return the inertia, reserve-rate and total-reserve expressions of one hour."""
        freq = self.freq
        switched = [
            (f"afg_{g}", unit.inertia(freq.f_n), m.afg_x[g, t]) for g, unit in self.afg.items()
        ]
        if self.supports_el:
            switched.extend(
                (f"el_{e}", unit.h_virtual, m.el_x_st[e, t])
                for e, unit in self.el.items()
                if unit.tech is Technology.PEMEL and unit.h_virtual > 0
            )
        stage1 = sum(m.el_r_pfr[e, t] / freq.t_e for e in self.el) + sum(
            m.bes_r_pfr[b, t] / freq.t_b for b in self.bes
        )
        stage2 = (
            stage1
            + sum(m.afg_r_pfr[g, t] / freq.t_g for g in self.afg)
            + sum(m.wt_r_pfr[w, t] / freq.t_w for w in self.wt)
        )
        total = (
            sum(m.el_r_pfr[e, t] for e in self.el)
            + sum(m.bes_r_pfr[b, t] for b in self.bes)
            + sum(m.afg_r_pfr[g, t] for g in self.afg)
            + sum(m.wt_r_pfr[w, t] for w in self.wt)
        )
        return HourSecurity(
            constant_inertia=sum(unit.h_b for unit in self.bes.values()),
            switched=tuple(switched),
            stage1_rate=stage1,
            stage2_rate=stage2,
            total_reserve=total,
        )

    def _cap_total_load(
        self, m: pyo.ConcreteModel, block: pyo.Block, t: int, envelope: SecurityEnvelope
    ) -> None:
        """Keep the hour's total load within the load its disturbance was sized for."""
        contingency = self.scenario.contingency
        if contingency.basis is not LoadBasis.TOTAL or contingency.load_step_fraction <= 0:
            return
        basis = envelope.dp_dis / contingency.load_step_fraction
        block.load_basis = pyo.Constraint(
            expr=self.scenario.load.p_d[t] + sum(m.el_p[e, t] for e in self.el) <= basis
        )

    def define_security(self, m: pyo.ConcreteModel) -> None:
        """Define the RoCoF, quasi-steady-state and nadir rows of every hour."""
        if self.scenario.mode is SchedulingMode.CM1:
            return
        stage1_max, stage2_max = reserve_rate_bounds(self.scenario)
        m.security = pyo.Block(m.T)
        for t in self.scenario.hours:
            envelope = self.envelopes[t]
            if envelope.dp_dis <= 0:
                continue
            block = m.security[t]
            self._cap_total_load(m, block, t, envelope)
            hour = self.security_expressions(m, t)
            product1 = hour.constant_inertia * hour.stage1_rate
            product2 = hour.constant_inertia * hour.stage2_rate
            if envelope.needs_nadir_rows:
                for label, h, x in hour.switched:
                    product1 += h * linearize_bilinear(block, f"y1_{label}", x, hour.stage1_rate, stage1_max)
                    product2 += h * linearize_bilinear(block, f"y2_{label}", x, hour.stage2_rate, stage2_max)
            terms = SecurityTerms(
                inertia=hour.inertia,
                stage1_rate=hour.stage1_rate,
                total_reserve=hour.total_reserve,
                inertia_rate1=product1,
                inertia_rate2=product2,
            )
            compile_security_rows(block, envelope, terms)
            self.security_terms[t] = terms

    # objective ---------------------------------------------------------------

    def define_objective(self, m: pyo.ConcreteModel) -> None:
        """Maximize production profit minus generator and reserve costs."""
        terms = objective_terms(m, self.scenario)
        m.c_ps = pyo.Expression(expr=terms.c_ps)
        m.c_op = pyo.Expression(expr=terms.c_op)
        m.c_res = pyo.Expression(expr=terms.c_res)
        m.objective = pyo.Objective(expr=m.c_ps - m.c_op - m.c_res, sense=pyo.maximize)


def build(
    scenario: SystemScenario,
    envelopes: Mapping[int, SecurityEnvelope] | None = None,
    *,
    strict_drcc: bool = False,
) -> ModelInstance:
    """
    Build the scheduling MILP of a scenario.

    Envelopes are compiled from the scenario when not given. The chance
    constraint blocks are generated from the scenario's sample sets.

    Raises
    ------
    EmptyFleetError
        If the scenario has no schedulable units.
    NetworkTopologyError
        If the network is not radial or a unit sits on an unknown bus.
    ScenarioValidationError
        If forecasts do not cover every period.
    """
    if envelopes is None:
        if scenario.unit_count == 0:
            raise EmptyFleetError
        envelopes = {} if scenario.mode is SchedulingMode.CM1 else compile_envelopes(scenario)
    return ScheduleModelBuilder(scenario, envelopes, strict_drcc=strict_drcc).build()
