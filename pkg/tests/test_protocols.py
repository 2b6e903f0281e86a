import math

import numpy as np
import pytest

from cavity_hardy import quantum_core as qc
from cavity_hardy.errors import ConfigError, DegenerateState, UndefinedConditional
from cavity_hardy.nonlocality import Verdict, hardy_stats, hardy_verdict
from cavity_hardy.protocols import (
    ExperimentConfig,
    Setting,
    analytic_prepared_state,
    analytic_bob_conditional,
    analytic_alice_conditional,
    auxiliary_check,
    conditional_implication,
    direct_check,
    idealized_transits,
    reference_transits,
    prepare_state,
    alice_norm_balanced,
    run_all,
    run_experiment,
    total_probability,
    transit_amplitudes,
)
from cavity_hardy.pulse_model import Amplitudes, CouplingParams

SWAP = Amplitudes.from_theta(math.pi / 2)
R2 = 1 / math.sqrt(2)


def random_amps(rng, n):
    return [Amplitudes.from_theta(x) for x in rng.uniform(-math.pi, math.pi, n)]


def branch(branches, outcome):
    return next(b for b in branches if b.outcome == outcome)


def bob_side_state(a11, a12, a23, detection="e"):
    """Alice's direct check finds nothing, then Bob runs his auxiliary check."""
    _, psi = prepare_state(a11, a12)
    alice_none = branch(direct_check(psi, "C1", None, path="fock"), "none")
    return auxiliary_check(alice_none.state, "C2", "C3", a23, SWAP, detection)


def alice_side_state(a11, a12, a34):
    _, psi = prepare_state(a11, a12)
    bob_none = branch(direct_check(psi, "C2", None, path="fock"), "none")
    return bob_none, auxiliary_check(bob_none.state, "C1", "C4", a34, SWAP, "e")


class TestPrepareState:
    def test_matches_closed_form_random(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a11, a12 = random_amps(rng, 2)
            p, state = prepare_state(a11, a12)
            assert p == pytest.approx(0.5, abs=1e-12)
            for (n1, n2), c in analytic_prepared_state(a11, a12).items():
                assert abs(state.amplitude({"C1": n1, "C2": n2}) - c) < 1e-12

    def test_reference_parameters(self):
        tr = reference_transits()
        p, state = prepare_state(tr["a1_C1"], tr["a1_C2"])
        assert p == pytest.approx(0.5, abs=1e-12)
        ideal = {(0, 0): -math.sqrt(2 / 3) * R2, (1, 0): math.sqrt(1 / 3), (0, 1): math.sqrt(2 / 3) * R2}
        for (n1, n2), c in ideal.items():
            assert state.amplitude({"C1": n1, "C2": n2}).real == pytest.approx(c, abs=0.03)

    def test_from_coupling_params(self):
        a11 = CouplingParams.reference(150.0, 0.7)
        a12 = CouplingParams.reference(200.0, 0.9)
        _, state = prepare_state(a11, a12)
        for (n1, n2), c in analytic_prepared_state(a11, a12).items():
            assert abs(state.amplitude({"C1": n1, "C2": n2}) - c) < 1e-12

    @pytest.mark.parametrize("mode", ["paper", "exact"])
    def test_zero_coupling(self, mode):
        idle = CouplingParams.reference(179.0, 0.0)
        p, state = prepare_state(idle, idle, mode)
        assert p == pytest.approx(0.5)
        assert state.amplitude({"C1": 0, "C2": 0}) == pytest.approx(-1)

    def test_analytic_prepared_state_certain_photon(self):
        assert analytic_prepared_state((0.0, 1.0), (R2, R2)) == {(0, 0): -0.0, (1, 0): 1.0, (0, 1): 0.0}

    def test_unnormalized_pair_rejected(self):
        with pytest.raises(ConfigError):
            analytic_prepared_state((0.5, 0.5), (R2, R2))


class TestDirectCheck:
    def one_photon(self):
        return qc.make_state([qc.cavity("C1")], {"C1": 1})

    def test_photon_present(self):
        (b,) = direct_check(self.one_photon(), "C1", SWAP)
        assert b.outcome == "photon" and b.probability == pytest.approx(1)
        assert b.state.amplitude({"C1": 0, "probe_C1": "e"}) == pytest.approx(-1)

    def test_photon_absent(self):
        (b,) = direct_check(qc.make_state([qc.cavity("C1")], {"C1": 0}), "C1", SWAP)
        assert b.outcome == "none" and b.probability == 1
        assert b.state.amplitude({"C1": 0, "probe_C1": "g"}) == 1

    def test_probe_and_fock_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            _, psi = prepare_state(*random_amps(rng, 2))
            for cav in ("C1", "C2"):
                probe = {b.outcome: b.probability for b in direct_check(psi, cav, SWAP)}
                fock = {b.outcome: b.probability for b in direct_check(psi, cav, None, path="fock")}
                assert probe.keys() == fock.keys()
                for k in probe:
                    assert probe[k] == pytest.approx(fock[k], abs=1e-14)

    def test_reference_probe_is_near_swap(self):
        _, psi = prepare_state(SWAP, SWAP)  # photon certainly in C1
        b = branch(direct_check(psi, "C1", reference_transits()["probe_C1"]), "photon")
        assert b.probability == pytest.approx(1, abs=1e-3)

    def test_bad_probe_rejected(self):
        with pytest.raises(ConfigError):
            direct_check(self.one_photon(), "C1", Amplitudes.from_theta(0.3))

    def test_not_a_cavity(self):
        s = qc.make_state([qc.atom("a"), qc.cavity("C1")], {"a": "g", "C1": 0})
        with pytest.raises(ConfigError):
            direct_check(s, "a", SWAP)


class TestAuxiliaryCheck:
    @pytest.mark.parametrize("detection", ["e", "g"])
    def test_bob_side_matches_closed_form(self, detection):
        rng = np.random.default_rng(8)
        for _ in range(100):
            a11, a12, a23 = random_amps(rng, 3)
            try:
                an = analytic_bob_conditional(a12, a23, detection)
            except DegenerateState:
                continue
            res = bob_side_state(a11, a12, a23, detection)
            # renormalizing after Alice's null result keeps the sign of alpha1(t11)
            sign = math.copysign(1.0, a11.alpha1)
            for (n2, n3), c in an.coefficients.items():
                assert abs(res.state.amplitude({"C1": 0, "C2": n2, "C3": n3}) - sign * c) < 1e-12
            assert res.branch_probability == pytest.approx(1 / (2 * an.normalization**2), abs=1e-12)
            assert res.outcome_probabilities["none"] == pytest.approx(0, abs=1e-12)

    def test_alice_side_matches_closed_form(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            a11, a12, a34 = random_amps(rng, 3)
            try:
                an = analytic_alice_conditional(a11, a12, a34)
            except DegenerateState:
                continue
            bob_none, res = alice_side_state(a11, a12, a34)
            for (n4, n1), c in an.coefficients.items():
                assert abs(res.state.amplitude({"C1": n1, "C2": 0, "C4": n4}) - c) < 1e-12
            # the normalization is defined against the unnormalized no-photon-at-Bob state
            unnormalized = a11.alpha1**2 * a12.alpha1**2 + a11.alpha2**2
            assert res.branch_probability == pytest.approx(1 / (2 * an.normalization**2 * unnormalized), abs=1e-12)

    def test_idealized_first_terms_vanish(self):
        # the aux transit must move some amplitude, otherwise the e branch is empty
        ideal = idealized_transits()
        aux = Amplitudes.from_alphas(0.6, 0.8)
        res = bob_side_state(ideal["a1_C1"], ideal["a1_C2"], aux)
        assert abs(res.state.amplitude({"C1": 0, "C2": 1, "C3": 0})) < 1e-12
        assert res.outcome_probabilities["aux"] == pytest.approx(1, abs=1e-12)
        _, res = alice_side_state(ideal["a1_C1"], ideal["a1_C2"], aux)
        assert abs(res.state.amplitude({"C1": 1, "C2": 0, "C4": 0})) < 1e-12
        assert res.outcome_probabilities["aux"] == pytest.approx(1, abs=1e-12)

    def test_g_branch_velocity(self):
        # at 146 m/s alpha1 = -alpha2 (approximately), killing the |1,0> term of the g branch
        a12 = CouplingParams.reference(146.0, 1.0)
        amps = transit_amplitudes(a12)
        assert amps.alpha1 == pytest.approx(-amps.alpha2, abs=0.03)
        a11 = idealized_transits()["a1_C1"]
        aux = Amplitudes.from_alphas(0.6, 0.8)
        res = bob_side_state(a11, a12, aux, "g")
        assert abs(res.state.amplitude({"C1": 0, "C2": 1, "C3": 0})) < 0.03
        exact = Amplitudes.from_alphas(-R2, R2)
        res = bob_side_state(a11, exact, aux, "g")
        assert abs(res.state.amplitude({"C1": 0, "C2": 1, "C3": 0})) < 1e-12
        coeff = analytic_bob_conditional(exact, aux, "g").coefficients[(1, 0)]
        assert coeff == pytest.approx(0, abs=1e-15)

    def test_zero_coupling_aux_is_direct_check(self):
        # aux transit does nothing: a |e> atom swapped into the own cavity, then Ramsey
        state = qc.from_amplitudes([qc.cavity("C2")], {(0,): 0.6, (1,): 0.8})
        res = auxiliary_check(state, "C2", "C3", CouplingParams.reference(161.0, 0.0), SWAP, "e")
        assert res.outcome_probabilities["aux"] == 0
        assert qc.outcome_distribution(res.state, "C3") == {0: 1.0, 1: 0.0}
        # |e,0> swaps to |g,1> while |e,1> is blocked; the Ramsey pulse then maps both
        # onto |e,1>, so the e branch interferes constructively: (0.6 + 0.8)^2 / 2
        assert res.branch_probability == pytest.approx(0.98)
        assert res.outcome_probabilities["own"] == pytest.approx(1)

    def test_occupied_aux_rejected(self):
        state = qc.make_state([qc.cavity("C2"), qc.cavity("C3")], {"C2": 0, "C3": 1})
        with pytest.raises(ConfigError):
            auxiliary_check(state, "C2", "C3", SWAP, SWAP)


class TestAnalyticForms:
    def test_bob_first_term_vanishes(self):
        an = analytic_bob_conditional((R2, R2), (0.6, 0.8))
        assert an.coefficients[(1, 0)] == 0
        assert an.normalization == pytest.approx(1 / math.sqrt(1 - 2 * 0.5 * (0.36 - 0.64)))

    def test_alice_first_term_vanishes(self):
        a11 = (math.sqrt(2 / 3), math.sqrt(1 / 3))
        an = analytic_alice_conditional(a11, (R2, R2), (0.6, 0.8))
        assert an.coefficients[(0, 1)] == pytest.approx(0, abs=1e-16)

    def test_alice_norm_balanced_is_special_case(self):
        rng = np.random.default_rng(2)
        for a11, a34 in zip(*[random_amps(rng, 30)] * 2):
            try:
                general = analytic_alice_conditional(a11, (R2, R2), a34).normalization
            except DegenerateState:
                continue
            assert alice_norm_balanced(a11, a34) == pytest.approx(general, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateState):
            analytic_bob_conditional((R2, R2), (1.0, 0.0))  # 1 - 2 * 1/2 * 1 = 0

    def test_bad_branch(self):
        with pytest.raises(ConfigError):
            analytic_bob_conditional((R2, R2), (1.0, 0.0), "x")


def experiment4_amplitude(tr):
    """Hand-composed amplitude of |1>C1 |1>C2 |0>C3 |0>C4 with both atoms in |e>.

    a1 = alpha1, a2 = alpha2 of each transit; derived by following the single
    excitation from each of the three prepared components through both
    auxiliary checks.
    """
    a = {k: transit_amplitudes(v) for k, v in tr.items()}
    return 0.5 * a["a2_C3"].alpha1 * a["a3_C4"].alpha1 * (
        -a["a1_C1"].alpha1 * a["a1_C2"].alpha1 * a["a3_C1"].alpha2 * a["a2_C2"].alpha2
        + a["a1_C1"].alpha2 * a["a2_C2"].alpha2
        + a["a1_C1"].alpha1 * a["a1_C2"].alpha2 * a["a3_C1"].alpha2
    )


class TestExperiments:
    def test_joint_direct_never(self, reference_records, exact_records, ideal_records):
        for records in (reference_records, exact_records, ideal_records):
            assert records[1].events["joint_direct_photon"] < 1e-12

    def test_experiment4_reference(self, reference_records):
        p4 = reference_records[4].events["p4_joint"]
        assert 0.080 <= p4 <= 0.090
        assert p4 == pytest.approx(experiment4_amplitude(reference_transits()) ** 2, abs=1e-12)

    def test_experiment4_idealized(self, ideal_records):
        assert ideal_records[4].events["p4_joint"] == pytest.approx(1 / 12, abs=1e-10)

    def test_experiment4_random_amplitudes(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            tr = dict(zip(["a1_C1", "a1_C2", "a2_C3", "a2_C2", "a3_C4", "a3_C1"], random_amps(rng, 6)))
            tr.update(probe_C1=SWAP, probe_C2=SWAP)
            rec = run_experiment(ExperimentConfig.for_experiment(4, transits=tr))
            assert rec.events["p4_joint"] == pytest.approx(experiment4_amplitude(tr) ** 2, abs=1e-12)

    def test_conditionals(self, reference_records, ideal_records):
        c2, c3 = conditional_implication(ideal_records[2], ideal_records[3])
        assert c2 == pytest.approx(1, abs=1e-12) and c3 == pytest.approx(1, abs=1e-12)
        c2, c3 = conditional_implication(reference_records[2], reference_records[3])
        assert c2 >= 0.995 and c3 >= 0.995
        assert reference_records[2].events["c_alice_given_e2"] == c2

    def test_detuned_breaks_chain(self):
        tr = {**reference_transits(), "a1_C2": Amplitudes.from_alphas(0.6, 0.8)}
        records = run_all(ExperimentConfig(transits=tr))
        c2, _ = conditional_implication(records[2], records[3])
        assert c2 < 0.95
        assert hardy_verdict(hardy_stats(records)) is Verdict.INCONCLUSIVE

    def test_records_are_complete(self, reference_records, exact_records):
        for records in (reference_records, exact_records):
            for rec in records.values():
                assert total_probability(rec) == pytest.approx(1, abs=1e-10)
                assert sum(rec.outcomes.values()) == pytest.approx(1, abs=1e-10)
                assert rec.preparation_probability == pytest.approx(0.5, abs=1e-12)

    def test_settings(self, reference_records):
        assert reference_records[2].alice_setting is Setting.DIRECT
        assert reference_records[2].bob_setting is Setting.AUXILIARY
        assert set(reference_records[4].postselection) == {"a2", "a3"}

    def test_multi_photon_only_in_exact_mode(self, reference_records, exact_records):
        assert reference_records[2].multi_photon["C2"] == 0
        assert exact_records[2].multi_photon["C2"] > 0
        assert exact_records[2].leakage == ()  # cutoff 2 holds the whole two-excitation space

    def test_probe_and_fock_paths_agree(self):
        tr = idealized_transits()
        probe = run_all(ExperimentConfig(transits=tr))
        fock = run_all(ExperimentConfig(transits=tr, direct_path="fock"))
        for eid in (1, 2, 3, 4):
            for key, p in fock[eid].outcomes.items():
                assert probe[eid].outcomes.get(key, 0) == pytest.approx(p, abs=1e-12)

    def test_undefined_conditional(self):
        # a2 never interacts and Bob's own cavity is left alone: C2-only event impossible
        idle = Amplitudes.from_theta(0.0)
        tr = {**idealized_transits(), "a1_C1": SWAP, "a2_C2": idle}
        records = run_all(ExperimentConfig(transits=tr))
        with pytest.raises(UndefinedConditional):
            conditional_implication(records[2], records[3])
        assert records[2].events["c_alice_given_e2"] is None

    def test_config_validation(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig(transits={}, direct_path="x", detection_branch={"a2": "q"})
        assert len(err.value.problems) == 3
        with pytest.raises(ConfigError):
            ExperimentConfig.for_experiment(5)
