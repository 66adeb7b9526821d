from inline import itest


def double(x):
    y = x * 2
    itest().given(x, 1).check_eq(y)
    return y
