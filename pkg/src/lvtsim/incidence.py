"""Partial-equilibrium tax incidence under linearized supply and demand.

Around the pre-tax price P0, demand and supply respond with local
slopes D' < 0 and S' > 0 (quantity per unit price). A per-unit tax tau
wedged between buyer and seller prices shifts the buyer price by

    delta_P = S' tau / (S' - D'),

so the buyer bears delta_P and the seller bears tau - delta_P; the two
shares always add to tau and each lies strictly inside (0, tau). An ad
valorem rate t is the same calculation with tau = t * P0.

A pure land value tax is different in kind: land supply is fixed, so
the levy cannot move quantities and is instead fully capitalized into
the asset price, V = R / (r + tau_v). That is why lvt_capitalization
takes no quantity argument at all.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IncidenceInputs:
    d_prime: float  # demand slope at P0, quantity/price, < 0
    s_prime: float  # supply slope at P0, > 0
    p0: float = 1.0
    tau_unit: float = 0.0
    t_adval: float = 0.0

    def __post_init__(self) -> None:
        if not self.d_prime < 0:
            raise ValueError("d_prime must be < 0 (demand slopes down)")
        if not self.s_prime > 0:
            raise ValueError("s_prime must be > 0 (supply slopes up)")
        if not self.p0 > 0:
            raise ValueError("p0 must be > 0")
        if self.tau_unit < 0:
            raise ValueError("tau_unit must be >= 0")
        if not 0.0 <= self.t_adval < 1.0:
            raise ValueError("t_adval must lie in [0, 1)")


def unit_tax_incidence(inp: IncidenceInputs) -> tuple[float, float]:
    """(buyer price change, seller net price change) for a per-unit tax.

    With signed slopes the market-clearing condition for the wedge,
    D' dP = S' (dP - tau), solves to dP = S' tau / (S' - D'). The
    denominator S' - D' > 0 by the sign invariants, the buyer and
    seller burdens sum to tau exactly, and pass-through dP / tau lies
    in (0, 1) whenever tau > 0.
    """
    tau = inp.tau_unit
    dp = inp.s_prime * tau / (inp.s_prime - inp.d_prime)
    seller_burden = tau - dp
    # dp + (tau - dp) must reproduce tau bit for bit. The subtraction
    # above is exact only when dp >= tau/2 (Sterbenz); below that, take
    # the buyer share as the exact complement of the seller share
    # instead, moving dp by at most half an ulp of tau in absolute terms.
    if 0.0 < dp < 0.5 * tau:
        paired = tau - seller_burden
        if paired > 0.0:
            dp = paired
    return dp, dp - tau


def advalorem_incidence(inp: IncidenceInputs) -> tuple[float, float]:
    """(buyer price change, net-of-tax price change) for an ad valorem rate.

    Identical mechanics with the shock scaled by the price level:
    the per-unit equivalent is tau = t * P0.
    """
    return unit_tax_incidence(
        IncidenceInputs(
            d_prime=inp.d_prime,
            s_prime=inp.s_prime,
            p0=inp.p0,
            tau_unit=inp.t_adval * inp.p0,
            t_adval=0.0,
        )
    )


def pass_through(inp: IncidenceInputs) -> float:
    """Share of a marginal unit tax borne by the buyer, in (0, 1)."""
    return inp.s_prime / (inp.s_prime - inp.d_prime)


def deadweight_loss(inp: IncidenceInputs, tau: float | None = None) -> float:
    """Harberger triangle 0.5 * tau * |dQ| with dQ = D' * dP.

    tau defaults to the per-unit tax on inp. The quantity response is
    negative (demand falls when the buyer price rises); the triangle is
    reported as a nonnegative loss.
    """
    if tau is None:
        tau = inp.tau_unit
    if tau < 0:
        raise ValueError("tau must be >= 0")
    dp = inp.s_prime * tau / (inp.s_prime - inp.d_prime)
    dq = inp.d_prime * dp
    return 0.5 * tau * abs(dq)


def lvt_capitalization(r_rent: float, r: float, tau_v: float) -> float:
    """Asset value of a site paying annual rent under an LVT: R/(r + tau_v).

    Fixed land supply means the tax cannot shift quantities; the entire
    burden capitalizes into the price the moment the rate is announced.
    No quantity argument exists because there is no quantity margin.
    """
    if r_rent < 0:
        raise ValueError("rent must be >= 0")
    if r + tau_v <= 0:
        raise ValueError("r + tau_v must be > 0")
    return r_rent / (r + tau_v)
