from inline import itest

LIMIT = 3


def double(x):
    y = x * 2
    itest(timeout=LIMIT).given(x, 1).check_eq(y, 2)
    return y
