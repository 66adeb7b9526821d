from inline import itest


def scaled(x):
    k = 3
    y = x * k
    itest().given(x, 1).check_eq(y, 3)
    return y
