import pytest

from pneq import corpus


@pytest.fixture(scope="session")
def nets():
    names = [
        "handshake",
        "triple_sync",
        "silent_cells",
        "tau_loops",
        "producer_consumer",
        "dead_partner",
        "spawn_deadlock",
        "stuck_sync",
        "tau_chain",
        "token_pump",
        "latent_sync",
        "silent_sync",
        "bare_places",
    ]
    return {name: corpus.load_net(f"{name}.pn") for name in names}


@pytest.fixture(scope="session")
def relations(nets):
    return {
        "permute": corpus.load_relation("permute.rel", nets["bare_places"]),
        "tau_loops_r1": corpus.load_relation("tau_loops_r1.rel", nets["tau_loops"]),
        "tau_loops_r2": corpus.load_relation("tau_loops_r2.rel", nets["tau_loops"]),
        "producer_consumer": corpus.load_relation(
            "producer_consumer.rel", nets["producer_consumer"]
        ),
        "spawn_deadlock": corpus.load_relation(
            "spawn_deadlock.rel", nets["spawn_deadlock"]
        ),
        "stuck_sync": corpus.load_relation("stuck_sync.rel", nets["stuck_sync"]),
        "tau_chain": corpus.load_relation("tau_chain.rel", nets["tau_chain"]),
    }
