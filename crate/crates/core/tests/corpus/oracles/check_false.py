from inline import itest


def evens(xs):
    picked = [x for x in xs if x % 2 == 0]
    itest().given(xs, [1, 3]).check_false(picked)
    itest().given(xs, [2]).check_false(picked)
    return picked
