"""Exception hierarchy. Every class carries a distinct CLI exit code."""


class GlsmError(Exception):
    exit_code = 1


class SingularBasis(GlsmError):
    exit_code = 10


class DivisionByZero(GlsmError):
    exit_code = 11


class RankDeficient(GlsmError):
    exit_code = 12


class BadRCharge(GlsmError):
    exit_code = 13


class OnWall(GlsmError):
    exit_code = 14


class AtPole(GlsmError):
    exit_code = 15


class OutsideStrip(GlsmError):
    exit_code = 16


class Resonant(GlsmError):
    exit_code = 17


class NotConverging(GlsmError):
    exit_code = 18


class Inconclusive(GlsmError):
    exit_code = 19


class ZeroZ(GlsmError):
    exit_code = 20


class UnitCircleQ(GlsmError):
    exit_code = 21


class VanishingFactor(GlsmError):
    exit_code = 22


class NoDecay(GlsmError):
    exit_code = 23


class BadDelta(GlsmError):
    exit_code = 24


class NotAdjacent(GlsmError):
    exit_code = 25


class GradeRestrictionViolated(GlsmError):
    exit_code = 26


class Unsupported(GlsmError):
    exit_code = 27


class ParseError(GlsmError):
    exit_code = 28


ALL_ERRORS = (
    SingularBasis, DivisionByZero, RankDeficient, BadRCharge, OnWall, AtPole,
    OutsideStrip, Resonant, NotConverging, Inconclusive, ZeroZ, UnitCircleQ,
    VanishingFactor, NoDecay, BadDelta, NotAdjacent, GradeRestrictionViolated,
    Unsupported, ParseError,
)
