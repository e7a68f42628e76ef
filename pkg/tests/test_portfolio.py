"""Tests for the parallel-branch workflows and the taxonomy registry."""

from dataclasses import replace

import numpy as np
import pytest

from qubokit.backends import ExactBackend, SamplerBackend, exact_solve
from qubokit.errors import PortfolioError
from qubokit.heuristics import SaConfig, TabuConfig, sa_sample, tabu_search
from qubokit.portfolio import (
    BranchKind,
    BranchSpec,
    Classification,
    PortfolioConfig,
    Role,
    SolverTag,
    _hss_thread,
    default_branches,
    hss_solve,
    kerberos_solve,
    registry_lookup,
    run_episode,
)
from qubokit.qubo import QuboModel, SampleRecord
from qubokit.rng import make_rng, random_bits

from oracles import random_model


class FailingBackend(SamplerBackend):
    name = "failing"
    exact = False
    max_vars = None

    def sample(self, model, num_reads=1):
        raise RuntimeError("backend down")


class TestKerberos:
    def test_single_tabu_branch_degenerates_to_plain_tabu(self, small_models):
        m = small_models[5]
        tabu_cfg = TabuConfig(max_sweeps=100)
        cfg = PortfolioConfig(
            branches=(BranchSpec(kind=BranchKind.TABU, tabu=tabu_cfg),),
            iterations=1,
            seed=8,
        )
        rec = kerberos_solve(m, cfg)
        init = random_bits(make_rng(cfg.seed), m.n)
        assert rec == tabu_search(m, init, tabu_cfg)

    def test_beats_or_matches_standalone_branches(self):
        rng = np.random.default_rng(51)
        for _ in range(200):
            m = random_model(rng, max_n=16)
            branches = default_branches(ExactBackend(), seed=3)
            cfg = PortfolioConfig(branches=branches, iterations=5, seed=0)
            rec = kerberos_solve(m, cfg)
            init = random_bits(make_rng(cfg.seed), m.n)
            for spec in branches:
                standalone = run_episode(m, spec, init, 0)
                assert rec.energy <= standalone.energy + 1e-9

    def test_failing_branch_is_isolated(self, small_models):
        m = small_models[6]
        good = (
            BranchSpec.tabu_branch(seed=1),
            BranchSpec.sa_branch(seed=2),
        )
        bad = BranchSpec.quantum_branch(FailingBackend(), seed=3)
        cfg_with = PortfolioConfig(branches=good + (bad,), iterations=3, seed=5)
        cfg_without = PortfolioConfig(branches=good, iterations=3, seed=5)
        assert kerberos_solve(m, cfg_with) == kerberos_solve(m, cfg_without)

    def test_all_branches_failing_raises(self, small_models):
        m = small_models[7]
        cfg = PortfolioConfig(
            branches=(BranchSpec.quantum_branch(FailingBackend()),),
            iterations=2,
        )
        with pytest.raises(PortfolioError):
            kerberos_solve(m, cfg)

    def test_deterministic_across_runs(self, small_models):
        m = small_models[8]
        cfg = PortfolioConfig(
            branches=default_branches(ExactBackend(), seed=7), iterations=4, seed=2
        )
        assert kerberos_solve(m, cfg) == kerberos_solve(m, cfg)

    def test_incumbent_monotone_in_iterations(self, small_models):
        m = small_models[9]
        branches = default_branches(ExactBackend(), seed=4)
        energies = []
        for its in (1, 2, 4, 8):
            cfg = PortfolioConfig(branches=branches, iterations=its, seed=6)
            energies.append(kerberos_solve(m, cfg).energy)
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))

    def test_zero_variable_model(self):
        m = QuboModel(n=0, offset=1.0)
        cfg = PortfolioConfig(branches=(BranchSpec.tabu_branch(),), iterations=1)
        assert kerberos_solve(m, cfg).energy == 1.0


class TestHss:
    def test_single_thread_without_exploiter_is_one_sa_read(self, small_models):
        m = small_models[10]
        explorer = SaConfig.for_model(m, sweeps=120, num_reads=1, seed=31)
        cfg = PortfolioConfig(threads=1, explorer=explorer, exploiter_backend=None)
        rec = hss_solve(m, cfg)
        assert rec == sa_sample(m, explorer).best

    def test_pool_minimum_contract(self, small_models):
        m = small_models[11]
        explorer = SaConfig.for_model(m, sweeps=60, seed=13)
        cfg = PortfolioConfig(
            threads=4,
            explorer=explorer,
            exploiter_backend=ExactBackend(),
            exploiter_fraction=0.2,
        )
        rec = hss_solve(m, cfg)
        pool = [_hss_thread(m, cfg, t) for t in range(cfg.threads)]
        assert rec == min(pool, key=SampleRecord.sort_key)

    def test_reaches_optimum_on_most_models(self):
        rng = np.random.default_rng(61)
        hits = 0
        total = 200
        for _ in range(total):
            m = random_model(rng, max_n=16)
            explorer = SaConfig.for_model(m, sweeps=80, seed=17)
            cfg = PortfolioConfig(
                threads=4, explorer=explorer, exploiter_backend=ExactBackend()
            )
            hits += hss_solve(m, cfg).energy <= exact_solve(m).energy + 1e-9
        assert hits / total >= 0.90

    def test_exploiter_never_hurts(self, small_models):
        m = small_models[12]
        explorer = SaConfig.for_model(m, sweeps=80, seed=19)
        base = PortfolioConfig(threads=2, explorer=explorer)
        boosted = replace(base, exploiter_backend=ExactBackend())
        assert hss_solve(m, boosted).energy <= hss_solve(m, base).energy + 1e-9

    def test_deterministic(self, small_models):
        m = small_models[13]
        explorer = SaConfig.for_model(m, sweeps=50, seed=23)
        cfg = PortfolioConfig(
            threads=3, explorer=explorer, exploiter_backend=ExactBackend()
        )
        assert hss_solve(m, cfg) == hss_solve(m, cfg)


class TestBranchSpec:
    def test_quantum_branch_requires_backend(self):
        with pytest.raises(ValueError):
            BranchSpec(kind=BranchKind.QUANTUM_DECOMPOSED)

    def test_default_trio(self):
        branches = default_branches(ExactBackend(), seed=0)
        assert [b.kind for b in branches] == [
            BranchKind.TABU,
            BranchKind.SA,
            BranchKind.QUANTUM_DECOMPOSED,
        ]


class TestRegistry:
    def test_hss_row(self):
        assert registry_lookup("hss") == SolverTag(
            "hss",
            Classification.COOPERATIVE_IMBRICATION,
            exploration=Role.CLASSICAL,
            exploitation=Role.QUANTUM,
        )

    def test_qhs_row_swaps_roles(self):
        tag = registry_lookup("qhs")
        assert tag.classification is Classification.COOPERATIVE_IMBRICATION
        assert tag.exploration is Role.QUANTUM
        assert tag.exploitation is Role.CLASSICAL

    def test_qbsolv_row(self):
        tag = registry_lookup("qbsolv")
        assert tag.classification is Classification.COOPERATIVE_IMBRICATION
        assert tag.exploration is Role.CLASSICAL
        assert tag.exploitation is Role.QUANTUM

    def test_kerberos_row_shares_responsibility(self):
        tag = registry_lookup("kerberos")
        assert tag.exploration is Role.SHARED
        assert tag.exploitation is Role.SHARED

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            registry_lookup("vqe")
