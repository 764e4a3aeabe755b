"""
p2hsched constants.

Physical constants, frequency-security defaults and the published parameter
tables shipped with the presets. Units follow the package conventions: power in
MW, energy in MWh, inertia in MW·s/Hz, damping in MW/Hz, currents in kA and
temperatures in °C.
"""

# physical constants
FARADAY = 96485.3  # C/mol
M_H2 = 2.016  # g/mol
LHV_NH3 = 18.6  # MJ/kg, not published with the tables
H2_PER_NH3 = 0.176  # kg H2 per kg NH3 (stoichiometric)

# current density for the Faraday efficiency fit is expressed in mA/cm²
CURRENT_DENSITY_UNIT = "mA/cm²"

# frequency security
NOMINAL_FREQUENCY = 50.0
NADIR_LIMIT = 1.0
ROCOF_LIMIT = 0.5
QSS_LIMIT = 0.5
DEADBAND_STAGE1 = 0.03
DEADBAND_STAGE2 = 0.2
TIME_DEADBAND_STAGE1 = 0.06
TIME_DEADBAND_STAGE2 = 0.4
DELIVERY_TIME_BES = 2.0
DELIVERY_TIME_AWE = 3.0
DELIVERY_TIME_WT = 4.0
DELIVERY_TIME_AFG = 6.0
LOAD_STEP_FRACTION = 0.15
VERIFICATION_TOLERANCE = 1e-3

# integration
DEFAULT_STEP = 1e-3
DEFAULT_HORIZON = 60.0
DEADBAND_MISMATCH_WARNING = 0.2

# security compilation
ROOT_RESIDUAL_TOLERANCE = 1e-9
BIG_M_SAFETY = 1.05
FIXED_POINT_MAX_ITERATIONS = 5
FIXED_POINT_TOLERANCE = 0.01

# chance constraints
VIOLATION_PROBABILITY = 0.05
SAMPLE_COUNT = 500
WASSERSTEIN_RADII = (0.0248, 0.0171, 0.0149, 0.0131)
WIND_ERROR_STD = 0.05  # fraction of forecast
SOLAR_ERROR_STD = 0.04  # fraction of forecast

# scheduling
PERIOD_HOURS = 1.0
BINARY_TOLERANCE = 1e-6
RESERVE_DURATION_HOURS = 0.25
PER_UNIT_BASE_MVA = 10.0
FIT_ERROR_LIMIT = 0.03

# nominal reserve-holding costs (CNY per MW·h), electrolyzers carry none
RESERVE_COST_AFG = 0.5
RESERVE_COST_WT = 1.0
RESERVE_COST_BES = 2.0

# published AFG, BES, WT and cost parameters
AFG_TABLE = {
    "eta_comb": 0.88,
    "eta_steam": 0.40,
    "t_on": 3,
    "t_off": 3,
    "p_min_large": 4.5,
    "p_max_large": 12.0,
    "p_min_small": 2.0,
    "p_max_small": 6.0,
    "pfr_share": 0.25,
    "regulation_share": 0.05,
    "h_g": 3.0,
    "cost_nh3": 5.0,
    "cost_start": 1250.0,
}
BES_TABLE = {
    "eta_c": 0.9,
    "eta_d": 0.95,
    "h_b": 1.0,
    "soc_min_share": 0.1,
    "soc_max_share": 0.9,
}
NETWORK_TABLE = {"v_min": 0.95, "v_max": 1.05}
WT_TABLE = {"k_deload_max": 0.1, "capacity": 6.25}
PRICE_TABLE = {
    "cost_h2": 32.9,
    "cost_h2_unit": "CNY/MWh",
    "cost_up_cold": 800.0,
    "cost_down": 0.0,
}

# published electrolyzer parameters
AWE_TABLE = {
    "c_heat": 7.8e7,
    "a_cool": 17.0,
    "n_c": 313,
    "area": 4.0,
    "t_min": 25.0,
    "t_max": 80.0,
    "t_cool": 5.0,
    "eta_cool": 4.0,
    "i_min": 2.30,
    "i_max": 7.99,
    "v_tn": 1.23,
}
PEMEL_TABLE = {
    "c_heat": 2.0e7,
    "a_cool": 17.0,
    "n_c": 273,
    "area": 1.0,
    "t_min": 25.0,
    "t_max": 80.0,
    "t_cool": 5.0,
    "eta_cool": 4.0,
    "i_min": 0.55,
    "i_max": 2.29,
    "v_tn": 1.23,
}

# step-response rise times used to calibrate the EDL capacitance
AWE_RISE_TIMES = {0.5: 1.0, 0.95: 2.8}
PEMEL_RISE_TIMES = {0.5: 0.04, 0.95: 0.55}
EDL_CALIBRATION_FRACTION = 0.95

# electrochemical model defaults (per cell, resistances in Ω)
AWE_ELECTROCHEMISTRY = {
    "v_re": 1.18,
    "v_act": 0.38,
    "v_temp_coeff": 0.0015,
    "r_ohm": 1.5e-5,
    "r_edl1": 1.0e-5,
    "r_edl2": 1.0e-5,
}
PEMEL_ELECTROCHEMISTRY = {
    "v_re": 1.18,
    "v_act": 0.47,
    "v_temp_coeff": 0.0015,
    "r_ohm": 5.0e-5,
    "r_edl1": 4.0e-5,
    "r_edl2": 4.0e-5,
}

# run artefacts
SCHEMA_VERSION = "1.0"
SOLUTION_FILE = "solution.json"
ENVELOPES_FILE = "envelopes.json"
DRCC_AUDIT_FILE = "drcc_audit.json"
UNIT_SCHEDULE_FILE = "schedule_units.csv"
FREQUENCY_METRICS_FILE = "frequency_metrics.csv"
TRAJECTORY_FILE = "trajectory.csv"
TRAJECTORY_HOUR_FILE = "trajectory_hour_{hour:02d}.csv"
RESERVE_REPORT_FILE = "reserve_allocation.csv"
OBJECTIVE_REPORT_FILE = "objective.csv"
YIELD_REPORT_FILE = "hydrogen_yield.csv"
MANIFEST_FILE = "manifest.json"
MODEL_FILE = "model.lp"

UNIT_SCHEDULE_COLUMNS = (
    "hour",
    "unit_id",
    "kind",
    "state",
    "power_mw",
    "current_ka",
    "temperature_c",
    "hydrogen_kg_h",
    "r_pfr_mw",
    "r_up_mw",
    "r_dn_mw",
    "r_vi_mw",
    "deload",
)
FREQUENCY_METRICS_COLUMNS = (
    "hour",
    "dp_dis_mw",
    "inertia_mws_hz",
    "damping_mw_hz",
    "nadir_hz",
    "nadir_time_s",
    "rocof_hz_s",
    "qss_hz",
    "passed",
)
TRAJECTORY_COLUMNS = ("time_s", "deviation_hz")
RESERVE_REPORT_COLUMNS = ("hour", "resource_class", "r_pfr_mw", "share")
OBJECTIVE_REPORT_COLUMNS = ("component", "value_cny")
YIELD_REPORT_COLUMNS = ("hour", "hydrogen_kg", "ammonia_kg", "net_hydrogen_kg")
