"""
Tests for the hyperspherical-cap comparison
"""
import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError

from sepca.core.geometry import (
    CapParams, cap_angle, geometry_compare, hyperplane_distance, sphere_radius, theta_v,
)
from sepca.core.row_stats import C2, threshold_constants
from sepca.core.theory import beta_crit, rho
from sepca.errors import DomainError
from sepca.models.schemas import (
    ELL2_FAMILY, SUM_FAMILY, Algorithm, BoundarySpec, VProfile, VProfileKind,
)
from sepca.simulators.profiles import make_v


class TestAngles:
    """Test theta(v) and theta_lim"""

    def test_uniform_v(self):
        assert theta_v(np.ones(50) / math.sqrt(50)) == pytest.approx(0.0, abs=1e-7)

    def test_basis_vector(self):
        v = np.zeros(16)
        v[3] = 1.0
        assert theta_v(v) == pytest.approx(math.acos(0.25))

    def test_cap_angle(self):
        assert cap_angle(2.0, 2.0) == pytest.approx(math.pi / 2)
        assert cap_angle(2.0, 0.0) == 0.0
        assert cap_angle(1.0, -0.5) is None
        with pytest.raises(DomainError):
            cap_angle(0.0, 0.0)


class TestGeometryCompare:
    """Test cross-family and same-family comparisons"""

    def test_sum_vs_ell2_substitution(self):
        n, p = 400, 1000
        report = geometry_compare("sum", "ell2", n, p)
        c_u = threshold_constants(p).C_U
        r = math.sqrt(C2 * math.log(math.e * p) / math.sqrt(n))
        assert report.r == pytest.approx(r)
        assert report.r_minus_h == pytest.approx(c_u * math.sqrt(math.log(p) / n))
        assert report.cos_theta_lim == pytest.approx(
            c_u * math.sqrt(math.log(p)) / (math.sqrt(C2 * math.log(math.e * p)) * n ** 0.25))
        assert report.ratio == report.cos_theta_lim
        assert report.cap_exists
        assert report.theta_lim == pytest.approx(math.acos(report.cos_theta_lim))

    def test_hc_pair_cosine(self):
        p, beta = 1000, 0.7
        report = geometry_compare("hc-sum", "hc-ell2", 500, p, beta_sparsity=beta)
        assert report.cos_theta_lim == pytest.approx(1 / math.sqrt(2 * rho(beta) * math.log(p)))

    def test_argument_order(self):
        first = geometry_compare("ell2", "fdr", 300, 200)
        second = geometry_compare("fdr", "ell2", 300, 200)
        assert first.r == second.r
        assert first.cos_theta_lim == second.cos_theta_lim
        assert first.table_condition is None

    def test_table_condition_implies_cap(self):
        pairs = [(a, b) for a in SUM_FAMILY for b in ELL2_FAMILY if a != Algorithm.FDR]
        for (sum_alg, norm_alg), n, p, beta in itertools.product(
                pairs, (1, 10, 100, 10 ** 4), (20, 1000, 10 ** 6), (0.55, 0.8, 0.95)):
            report = geometry_compare(sum_alg, norm_alg, n, p, beta_sparsity=beta)
            if report.table_condition:
                assert report.cap_exists

    def test_no_cap_prefers_norm_statistic(self):
        report = geometry_compare("sum", "ell2", 1, 2)
        assert not report.cap_exists
        assert report.theta_lim is None
        assert report.preferred == Algorithm.ELL2

    def test_same_family_ratios(self):
        n, p, beta = 400, 1000, 0.8
        report = geometry_compare("hc-sum", "sum", n, p, beta_sparsity=beta)
        assert report.ratio == pytest.approx(math.sqrt(2 * rho(beta)) / threshold_constants(p).C_U)
        assert report.preferred == Algorithm.HC_SUM
        assert report.r is None
        ell2 = geometry_compare("ell2", "hc-ell2", n, p, beta_sparsity=beta)
        expected = math.sqrt(C2 * math.log(math.e * p) / math.sqrt(n)) / (2 * rho(beta) * math.log(p) / math.sqrt(n))
        assert ell2.ratio == pytest.approx(expected)

    @pytest.mark.parametrize("kind", [VProfileKind.UNIFORM, VProfileKind.RISE_FALL,
                                      VProfileKind.POWER_DECAY])
    def test_preferred_matches_lower_boundary(self, kind):
        beta = 0.7
        algorithms = list(SUM_FAMILY + ELL2_FAMILY)
        for n in (50, 500, 5000):
            v = make_v(VProfile(kind=kind, n=n))
            for alg_a, alg_b in itertools.combinations(algorithms, 2):
                report = geometry_compare(alg_a, alg_b, n, 1000, beta_sparsity=beta, v=v)
                bounds = {alg: beta_crit(BoundarySpec(algorithm=alg, n=n, p=1000, v=v,
                                                      beta_sparsity=beta))
                          for alg in (alg_a, alg_b)}
                assert report.preferred == min(bounds, key=bounds.get)

    def test_rejects(self):
        with pytest.raises(DomainError):
            geometry_compare("ell1", "sum", 100, 100)
        with pytest.raises(DomainError):
            geometry_compare("svd-baseline", "ell2", 100, 100)
        with pytest.raises(DomainError):
            geometry_compare("sum", "sum", 100, 100)
        with pytest.raises(DomainError):
            geometry_compare("hc-sum", "ell2", 100, 100)
        with pytest.raises(DomainError):
            geometry_compare("fdr", "ell2", 100, 100, k_hat=101)
        with pytest.raises(DomainError):
            geometry_compare("sum", "ell2", 100, 100, v=np.ones(3))


class TestCapParams:
    """Test the parameter model behind the cap formulas"""

    def test_defaults_and_distances(self):
        params = CapParams(n=400, p=1000)
        assert params.k_hat == 1
        assert hyperplane_distance(Algorithm.SUM, params) == pytest.approx(
            threshold_constants(1000).C_U * math.sqrt(math.log(1000) / 400))
        assert sphere_radius(Algorithm.ELL2, params) == pytest.approx(
            math.sqrt(C2 * math.log(math.e * 1000) / 20))

    def test_hc_needs_sparsity(self):
        with pytest.raises(DomainError):
            hyperplane_distance(Algorithm.HC_SUM, CapParams(n=100, p=1000))
        params = CapParams(n=100, p=1000, beta_sparsity=0.7)
        assert params.rho(Algorithm.HC_SUM) == pytest.approx(rho(0.7))

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValidationError):
            CapParams(n=0, p=1000)
        with pytest.raises(ValidationError):
            CapParams(n=10, p=1)
        with pytest.raises(ValidationError):
            CapParams(n=10, p=100, nu=0.0)
