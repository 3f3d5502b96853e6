"""Builders shared by several test modules."""

from app.autodiff import engine as ge
from app.models import RewardPack


def make_pack(
    r_w: float,
    r_l: float,
    logp_w: float = -3.0,
    logp_l: float = -4.0,
    len_w: int = 4,
    len_l: int = 4,
    tau: float = 0.8,
) -> RewardPack:
    """Reward pack with trainable scalar leaves in place of policy rewards."""
    return RewardPack(
        r_w=ge.parameter(r_w),
        r_l=ge.parameter(r_l),
        logp_w=ge.parameter(logp_w),
        logp_l=ge.parameter(logp_l),
        logp_w_ref=0.0,
        logp_l_ref=0.0,
        len_w=len_w,
        len_l=len_l,
        tau=tau,
    )
