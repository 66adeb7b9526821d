from inline import itest


def pick(items, copy):
    chosen = list(items) if copy else items
    itest().given(items, [1]).given(copy, True).check_not_same(chosen, items)
    itest().given(items, [1]).given(copy, False).check_not_same(chosen, items)
    return chosen
