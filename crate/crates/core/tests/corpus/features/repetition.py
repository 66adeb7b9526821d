import re
from inline import itest


def strip_suffix(name):
    m = re.match("^(.+):\\d+$", name)
    itest(repeated=2).given(name, "a:0").check_eq(m.group(1), "a")
    return m.group(1) if m else name
