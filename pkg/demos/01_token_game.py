"""Walkthrough: nets, the token game, and bounded reachability graphs.

Run from the repository root with:  PYTHONPATH=src python demos/01_token_game.py
"""
from pneq import enabled, fire, parse_marking, parse_net, reach_lts, lts_to_dot

NET = """
net choice
place s1 s2 s3 s4
trans grab  : s1+s2 -> a -> s3      # needs one token on each input
trans tidy  : s3 -> tau -> s4       # a silent local step
marking m0 = s1+s2
"""

net = parse_net(NET)
m0 = net.named_markings["m0"]
grab = net.transition_index["grab"]

print("initial marking:", net.format_marking(m0))
print("grab enabled?  ", enabled(net, m0, grab))

# Two tokens on the same place do not help: the pre-set is a multiset.
print("grab at 2*s1?  ", enabled(net, parse_marking("2*s1", net), grab))

m1 = fire(net, m0, grab)
print("after grab:    ", net.format_marking(m1))

# The reachability graph deduplicates markings and keeps silent labels raw.
lts = reach_lts(net, [m0])
print(f"\nreachable: {len(lts.states)} markings, {len(lts.edges)} moves")
for src, label, dst in lts.edges:
    print(f"  {net.format_marking(lts.states[src])} --{label}--> "
          f"{net.format_marking(lts.states[dst])}")

# DOT output draws silent moves dashed; paste into graphviz to render.
print("\n" + lts_to_dot(lts, net))
