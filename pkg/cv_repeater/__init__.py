from cv_repeater.client import RepeaterClient

__all__ = ["RepeaterClient"]
