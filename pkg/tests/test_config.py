import numpy as np
import pytest
from hypothesis import given, strategies as st

from cribsim.config import (
    MediumSpec,
    OutputSpec,
    QubitSpec,
    RunConfig,
    ScheduleSpec,
    SweepAxis,
    SweepSpec,
    parse_config,
    parse_config_file,
    write_config,
)
from cribsim.dynamics import ProtocolSchedule
from cribsim.errors import ConfigError
from cribsim.medium import MediumConfig
from cribsim.qubit import TimeBinQubit

MINIMAL = """\
[qubit]
alpha = 0.6
beta = 0.8

[medium]
kind = transverse
delta_inh = 10 /dt
alpha_o_L = 2

[schedule]
t1 = 12 dt
eta = 1
"""

FULL = """\
[qubit]
alpha = 0.6
beta = 0.8
phi = 0.3 rad
tau_o = 5 dt
omega_eg_tau_o = 0.25 rad

[medium]
kind = longitudinal
delta_inh = 10 /dt
zeta_over_chi = 1.5
gamma_eg = 0.01 /dt
delta_k_L = 2.0

[schedule]
t1 = 20 dt
eta = 3
t_max = 40 dt
nt = 2048
nz = 128
n_nodes = 301
span_factor = 60
carrier_detuning = 0.1 /dt

[sweep]
axis1 = eta 0.5 4 7 log
axis2 = tau_o 2 6 3 linear
metric = phase_diff

[output]
path = results
format = csv
"""


class TestParsing:
    def test_minimal_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.qubit == QubitSpec(alpha=0.6, beta=0.8)
        assert cfg.qubit.tau_o == 8.0
        assert cfg.medium.kind == "transverse"
        assert cfg.medium.gamma_eg == 0.0
        assert cfg.schedule.nt == 4096
        assert cfg.schedule.t_max is None
        assert cfg.sweep is None
        assert cfg.output == OutputSpec()

    def test_full_config(self):
        cfg = parse_config(FULL)
        assert cfg.medium.zeta_over_chi == 1.5
        assert cfg.medium.alpha_o_L is None
        assert cfg.schedule.t_max == 40.0
        assert cfg.schedule.nt == 2048
        assert cfg.sweep.axis1 == SweepAxis("eta", 0.5, 4.0, 7, "log")
        assert cfg.sweep.axis2 == SweepAxis("tau_o", 2.0, 6.0, 3, "linear")
        assert cfg.sweep.metric == "phase_diff"
        assert cfg.output.path == "results"

    def test_comments_and_blank_lines_ignored(self):
        text = MINIMAL.replace("alpha = 0.6", "alpha = 0.6  # leading bin\n\n")
        assert parse_config(text) == parse_config(MINIMAL)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(FULL)
        assert parse_config_file(path) == parse_config(FULL)


class TestRoundTrip:
    def test_canonical_write_parse_identity(self):
        for text in (MINIMAL, FULL):
            cfg = parse_config(text)
            assert parse_config(write_config(cfg)) == cfg

    @given(
        alpha=st.floats(0.0, 1.0),
        tau_o=st.floats(4.0, 50.0),
        eta=st.floats(0.01, 100.0),
        t_max=st.one_of(st.none(), st.floats(10.0, 1e6)),
        gamma=st.floats(0.0, 1.0),
        count=st.integers(1, 40),
        scale=st.sampled_from(["linear", "log"]),
        lo=st.floats(0.1, 10.0),
        span=st.floats(0.1, 100.0),
    )
    def test_any_config_survives_round_trip(
        self, alpha, tau_o, eta, t_max, gamma, count, scale, lo, span
    ):
        cfg = RunConfig(
            qubit=QubitSpec(alpha=alpha, beta=np.sqrt(max(0.0, 1 - alpha**2)), tau_o=tau_o),
            medium=MediumSpec(kind="transverse", delta_inh=10.0, alpha_o_L=2.0, gamma_eg=gamma),
            schedule=ScheduleSpec(t1=20.0, eta=eta, t_max=t_max),
            sweep=SweepSpec(axis1=SweepAxis("eta", lo, lo + span, count, scale)),
            output=OutputSpec(path="sweep_out"),
        )
        assert parse_config(write_config(cfg)) == cfg


class TestErrors:
    @pytest.mark.parametrize(
        "mangle, fragment",
        [
            (lambda t: "[qubits]\n" + t, "unknown section"),
            (lambda t: t + "\n[qubit]\nphi = 1 rad\n", "duplicate section"),
            (lambda t: "alpha = 1\n" + t, "outside of any"),
            (lambda t: t.replace("alpha = 0.6", "alpha 0.6"), "expected 'key = value'"),
            (lambda t: t.replace("alpha = 0.6", "amp = 0.6"), "unknown key"),
            (
                lambda t: t.replace("alpha = 0.6", "alpha = 0.6\nalpha = 0.7"),
                "duplicate key",
            ),
            (lambda t: t.replace("t1 = 12 dt", "t1 = 12 s"), "expected unit 'dt'"),
            (lambda t: t.replace("eta = 1", "eta = 1 dt"), "dimensionless"),
            (lambda t: t.replace("alpha = 0.6", "alpha = fast"), "expected a number"),
            (lambda t: t + "nt = 10.5\n", "expected an integer"),
            (lambda t: t.replace("beta = 0.8\n", ""), "missing required key 'beta'"),
            (
                lambda t: t.replace("kind = transverse", "kind = diagonal"),
                "kind must be",
            ),
            (
                lambda t: t.replace("alpha_o_L = 2", "alpha_o_L = 2\nzeta_over_chi = 1"),
                "does not apply to transverse",
            ),
            (lambda t: t + "\n[output]\nformat = json\n", "format must be csv"),
            (lambda t: t + "\n[sweep]\nmetric = gain\n", "missing required key 'axis1'"),
            (
                lambda t: t + "\n[sweep]\naxis1 = eta 1 4 5 linear\nmetric = speed\n",
                "metric must be one of",
            ),
            (
                lambda t: t + "\n[sweep]\naxis1 = eta 1 4\n",
                "expected '<name> <min> <max> <count> <linear|log>'",
            ),
            (
                lambda t: t + "\n[sweep]\naxis1 = knob 1 4 5 linear\n",
                "unknown sweep axis parameter 'knob'",
            ),
            (lambda t: t + "\n[sweep]\naxis1 = eta 1 4 0 linear\n", "count must be >= 1"),
            (lambda t: t + "\n[sweep]\naxis1 = eta 1 4 5 cubic\n", "linear or log"),
            (
                lambda t: t + "\n[sweep]\naxis1 = eta -1 4 5 log\n",
                "log scale requires positive",
            ),
            (
                lambda t: t + "\n[sweep]\naxis1 = zeta_over_chi 1 4 5 linear\n",
                "does not apply to transverse",
            ),
            (
                lambda t: t + "\n[sweep]\naxis1 = eta 1 4 5 linear\nmetric = phase_diff\n",
                "requires a longitudinal",
            ),
        ],
    )
    def test_rejected_with_message(self, mangle, fragment):
        with pytest.raises(ConfigError) as err:
            parse_config(mangle(MINIMAL))
        assert fragment in str(err.value)

    def test_line_number_reported(self):
        with pytest.raises(ConfigError) as err:
            parse_config(MINIMAL.replace("t1 = 12 dt", "t1 = 12 husks"))
        assert str(err.value).startswith("line 11:")

    def test_missing_section(self):
        text = MINIMAL.split("[schedule]")[0]
        with pytest.raises(ConfigError, match="missing required section"):
            parse_config(text)


class TestSweepAxis:
    def test_linear_values(self):
        ax = SweepAxis("eta", 1.0, 3.0, 5, "linear")
        assert np.allclose(ax.values(), [1.0, 1.5, 2.0, 2.5, 3.0])

    def test_log_values(self):
        ax = SweepAxis("eta", 1.0, 100.0, 3, "log")
        assert np.allclose(ax.values(), [1.0, 10.0, 100.0])

    def test_single_point(self):
        ax = SweepAxis("eta", 2.5, 9.0, 1)
        assert ax.values().tolist() == [2.5]


class TestWithParameter:
    def test_replaces_each_block(self):
        cfg = parse_config(MINIMAL)
        assert cfg.with_parameter("eta", 2.0).schedule.eta == 2.0
        assert cfg.with_parameter("tau_o", 6.0).qubit.tau_o == 6.0
        assert cfg.with_parameter("alpha_o_L", 4.0).medium.alpha_o_L == 4.0
        assert cfg.with_parameter("eta", 2.0).qubit == cfg.qubit

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ConfigError, match="unknown sweep axis parameter"):
            parse_config(MINIMAL).with_parameter("knob", 1.0)


class TestBuildBridge:
    def test_specs_build_core_objects(self):
        cfg = parse_config(FULL)
        qubit = cfg.qubit.build()
        medium = cfg.medium.build()
        schedule = cfg.schedule.build()
        assert isinstance(qubit, TimeBinQubit)
        assert qubit.alpha**2 + qubit.beta**2 == pytest.approx(1.0)
        assert isinstance(medium, MediumConfig)
        assert medium.zeta_over_chi == 1.5
        assert isinstance(schedule, ProtocolSchedule)
        assert schedule.nt == 2048
