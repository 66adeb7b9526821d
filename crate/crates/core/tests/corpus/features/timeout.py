from inline import itest


def count_forever(n):
    while True:
        n += 1
    itest(timeout=1).given(n, 0).check_eq(n, 1)
    return n


def count_to(n):
    total = sum(range(n))
    itest(timeout=5).given(n, 4).check_eq(total, 6)
    return total
