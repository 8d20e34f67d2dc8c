"""Two small hand-checkable instances used throughout the tests and docs."""

from fractions import Fraction

from .model import UNBOUNDED, Instance, Municipality, ODPair, Segment


def five_station_line(shares=(Fraction(1, 2), Fraction(1, 2))) -> Instance:
    """Five stations, two municipalities, three OD pairs.

    Upgrading segments 2 and 3 costs 12 + 4 and attracts 375 (linear) or
    300 (threshold) passengers.
    """
    segs = [Segment(1, 5, Fraction(4)), Segment(2, 12, Fraction(11)),
            Segment(3, 4, Fraction(4)), Segment(4, 6, Fraction(5))]
    if len(shares) == 1:
        munis = [Municipality("m1", 1, 4, Fraction(shares[0]))]
    else:
        munis = [Municipality("m1", 1, 2, Fraction(shares[0])),
                 Municipality("m2", 3, 4, Fraction(shares[1]))]
    ods = [ODPair(3, 4, 100, Fraction(3)), ODPair(2, 5, 200, Fraction(15)),
           ODPair(1, 5, 200, Fraction(18))]
    return Instance(5, segs, munis, ods, UNBOUNDED)


def two_segment_line() -> Instance:
    """Budget and cost fronts differ here: shares 2/3 and 1/3 on one segment each."""
    segs = [Segment(1, 2, Fraction(1)), Segment(2, 1, Fraction(1))]
    munis = [Municipality("m1", 1, 1, Fraction(2, 3)), Municipality("m2", 2, 2, Fraction(1, 3))]
    ods = [ODPair(1, 2, 1, Fraction(1)), ODPair(1, 3, 2, Fraction(1))]
    return Instance(3, segs, munis, ods, UNBOUNDED)
