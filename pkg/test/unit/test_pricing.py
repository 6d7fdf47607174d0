import math

import numpy as np
import pytest
from pydantic import ValidationError

from surgesim.market import (
    PricingConfig,
    driver_split,
    movers_mask,
    price_gap,
    rider_moves,
    zone_prices,
)


class TestPricingConfig:
    def test_defaults(self):
        cfg = PricingConfig()
        assert cfg.logit_sensitivity == 0.25
        assert cfg.base_price == 1.0
        assert cfg.cap == 10.0
        assert cfg.max_gap == 9.0

    def test_cap_below_base_price(self):
        with pytest.raises(ValidationError, match='requires cap >= base_price'):
            PricingConfig(base_price=2.0, cap=1.5)


class TestPriceGap:
    def test_equilibrium_gap(self):
        gap = price_gap(2000, 250, PricingConfig(), 90)
        assert gap == pytest.approx(4 * math.log(8))
        assert gap == pytest.approx(8.317766, abs=1e-6)

    def test_equalizes_demand_to_supply_ratios(self):
        cfg = PricingConfig()
        d_s, d_ns = 1200, 400
        p_s, p_ns = zone_prices(price_gap(d_s, d_ns, cfg, 90), cfg)
        gamma_s, gamma_ns = driver_split(p_s, p_ns, cfg.logit_sensitivity)
        assert d_s / gamma_s == pytest.approx(d_ns / gamma_ns, rel=1e-12)

    @pytest.mark.parametrize('d_s, d_ns', [(40, 10), (0, 0), (100, 100), (80, 120)])
    def test_zero_gap(self, d_s, d_ns):
        # cleared markets and markets without a surge are not priced
        assert price_gap(d_s, d_ns, PricingConfig(), 90) == 0.0

    def test_capped(self):
        cfg = PricingConfig()
        assert price_gap(10 ** 6, 1, cfg, 90) == cfg.max_gap
        assert price_gap(500, 0, cfg, 90) == cfg.max_gap

    def test_insensitive_drivers(self):
        cfg = PricingConfig(logit_sensitivity=0.0)
        assert price_gap(500, 100, cfg, 90) == cfg.max_gap
        assert driver_split(10.0, 1.0, 0.0) == (0.5, 0.5)


class TestChoices:
    def test_zone_prices(self):
        cfg = PricingConfig()
        assert zone_prices(0.0, cfg) == (1.0, 1.0)
        assert zone_prices(4.5, cfg) == (5.5, 1.0)
        assert zone_prices(20.0, cfg) == (10.0, 1.0)

    def test_driver_split(self):
        gamma_s, gamma_ns = driver_split(1.0 + 4 * math.log(8), 1.0, 0.25)
        assert gamma_s == pytest.approx(8 / 9)
        assert gamma_ns == pytest.approx(1 / 9)
        assert gamma_s + gamma_ns == pytest.approx(1.0)
        assert driver_split(1.0, 1.0, 0.25) == (0.5, 0.5)

    def test_rider_moves(self):
        assert rider_moves(3.0, 3.0)
        assert not rider_moves(3.5, 3.0)
        assert not rider_moves(0.0, 3.0, strategic=False)

    def test_movers_mask(self):
        costs = np.array([0.5, 4.0, 2.0, 9.0])
        assert movers_mask(costs, 2.0).tolist() == [True, False, True, False]
        assert movers_mask(costs, 2.0, strategic=False).tolist() == [False] * 4
        assert movers_mask(np.empty(0), 2.0).tolist() == []
