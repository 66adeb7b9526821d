from inline import itest

BASE = 40
ANSWER = BASE + 2
itest().check_eq(ANSWER, 42)
itest().given(BASE, 0).check_eq(ANSWER, 2)
BASE = 1000
