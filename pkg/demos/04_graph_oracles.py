"""Walkthrough: graph-level bisimilarity as an independent cross-check.

Interleaving bisimilarity on the bounded reachability graph ignores token
structure entirely, so it is coarser than every place-based equivalence:
whenever the place-based checker says related, the graph oracle must
agree. The converse can fail, which is the whole point.

Run with:  PYTHONPATH=src python demos/04_graph_oracles.py
"""
from pneq import Marking, corpus, decide, decide_interleaving, parse_marking

net = corpus.load_net("latent_sync.pn")

# One token per side: the branches never meet, and both views agree.
eq, _ = decide_interleaving(net, Marking(["s1"]), Marking(["s4"]), branching=False)
print("graph view, single tokens:  ", eq)
print("place view, single tokens:  ",
      decide(net, Marking(["s1"]), Marking(["s4"]), "place", "exhaustive").status)

# Two tokens per side: only the left system can fire the synchronization,
# and the graph view now separates them too.
eq2, _ = decide_interleaving(
    net, parse_marking("2*s1", net), parse_marking("2*s4", net), branching=False
)
print("graph view, doubled tokens: ", eq2)

# A place-based verdict is per-place, so it scales to any token count;
# that is why the single-token pair is already not place bisimilar above.

# Branching graph bisimilarity abstracts every silent step, even the
# token-consuming one that the branching place game treats as observable.
cells = corpus.load_net("silent_cells.pn")
beq, _ = decide_interleaving(cells, Marking(["s2"]), Marking(["s5"]), branching=True)
print("\nbranching graph view: ", beq)
print("branching place view: ",
      decide(cells, Marking(["s2"]), Marking(["s5"]), "bplace", "exhaustive").status)
