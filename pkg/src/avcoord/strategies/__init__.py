from .auction import CentralAuction
from .dauction import DecentralAuction
from .eb import EmergentBehavior


def make_strategy(cfg):
    """Strategy instance for an :class:`~avcoord.config.ExperimentConfig`."""
    if cfg.approach == "eb":
        return EmergentBehavior(cfg.eb)
    if cfg.approach in ("coop", "comp"):
        return CentralAuction(cfg.approach, cfg.auction)
    if cfg.approach == "dauction":
        return DecentralAuction(cfg.dauction)
    raise ValueError(f"unknown approach {cfg.approach!r}")


__all__ = ["CentralAuction", "DecentralAuction", "EmergentBehavior", "make_strategy"]
