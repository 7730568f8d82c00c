"""Hairs, non-landing hairs and the immediate basin boundary of f_a(z) = a(z - (1 - a)) e^(z + a), a >= 3."""
from .mapcore import Params, eval_f, eval_df, real_fixed_points
from .symbolic import ASeq, Generator, Literal, Sym, angle_of, itinerary_of_angle, lift, parse_bseq

__all__ = ["Params", "eval_f", "eval_df", "real_fixed_points", "ASeq", "Generator", "Literal", "Sym",
           "angle_of", "itinerary_of_angle", "lift", "parse_bseq"]
