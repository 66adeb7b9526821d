import re
from inline import itest


def suffix_base(name):
    m = re.match("^(.+):\\d+$", name)
    itest().given(name, "a:0").check_eq(m.group(1), "a")
    itest().given(name, "a:0").check_eq(m.group(1), "aa")
    return m
