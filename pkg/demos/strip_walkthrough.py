"""Watch a template edge climb toward a single evidence pixel on a 1x24 strip.

    python3 demos/strip_walkthrough.py
"""

from roadstretch.dbs import DbsConfig, external_rule_step, internal_rule_step
from roadstretch.dt import distance_transform
from roadstretch.imgcore import BinaryImage

W, EV = 24, 15


def show(s: BinaryImage) -> str:
    return "".join("E" if x == EV else "#" if s.mask[0, x] else "." for x in range(W))


ev = BinaryImage.from_positions(W, 1, [(EV, 0)])
s = BinaryImage.from_positions(W, 1, [(x, 0) for x in range(4)])
dt = distance_transform(ev)
print("potential:", " ".join(str(255 - int(v)) for v in dt.value[0]), "(as 255 - value)")
print(f"{0:3d} {show(s)}")
for i in range(1, 20):
    grown = external_rule_step(s, dt, ev, flat=DbsConfig().flat_handling)
    new = internal_rule_step(grown, dt)
    print(f"{i:3d} {show(new)}  +{(grown - s).count()} -{(grown - new).count()}")
    if new == s:
        print("fixed point")
        break
    s = new
