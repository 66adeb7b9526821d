import re
from inline import itest


def get_assignment_map(init_vars):
    assignment_map = {}
    for x in init_vars:
        (name, var) = (x[0], x[1])
        m = re.match("^(.+):\\d+$", name)
        itest().given(name, "a:0").check_eq(m.group(1), "a")
        if m is not None:
            name = m.group(1)
        assignment_map[name] = var
    return assignment_map
