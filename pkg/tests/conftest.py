from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from gaudin.rational import RationalFunction

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, max_deg: int = 3):
    return draw(st.lists(small_fracs, min_size=1, max_size=max_deg + 1))


@st.composite
def rational_functions(draw, max_deg: int = 2):
    num = draw(polys(max_deg))
    den = draw(polys(max_deg))
    if not any(den):
        den = [Fraction(1)]
    return RationalFunction.from_poly(num, den)
