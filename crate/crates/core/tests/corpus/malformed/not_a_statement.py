from inline import itest


def double(x):
    y = x * 2
    t = itest().given(x, 1).check_eq(y, 2)
    return y
