"""Application conventions for the coproduct restriction tables."""

def ALPHA(r):
    return -1


def EPS(r):
    return 1


MINUS_BASE_SIGN = 1
