from inline import itest


def ratio(a, b):
    r = a / b
    itest().given(a, 1).given(b, 0).check_eq(r, 0)
    return r
