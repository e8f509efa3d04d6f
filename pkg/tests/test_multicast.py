from ccngram.gram import SELF
from ccngram.messages import MulticastData, MulticastInterest, MulticastReply, ReplyCode
from ccngram.multicast import MartEntry, handle_multicast_data, handle_multicast_pull, is_group_name, push_next
from ccngram.names import ContentName, NamePrefix
from netkit import Pump, gram_routers

G = ContentName.parse("/mcast/g")


def hub(route=True):
    r = gram_routers([("i", "u"), ("i", "q"), ("i", "r")])["i"]
    if route:
        r.add_route(NamePrefix(G.components), "u", 1)
    return r


def test_group_names():
    assert is_group_name(G) and not is_group_name(ContentName.parse("/p0/s0/o1"))


def test_first_join_from_consumer():
    r = hub()
    out = r.receive(MulticastInterest(G, None, 0), "c")
    assert out == [("u", MulticastInterest(G, 1, 0))]
    assert r.mcast.gmt[G].local_receivers == {"c"}
    e = r.mcast.mart[G]
    assert e.mc == 0 and e.next_hops == {SELF}


def test_second_join_from_neighbor_is_absorbed():
    r = hub()
    r.receive(MulticastInterest(G, None, 0), "c")
    assert r.receive(MulticastInterest(G, 3, 0), "q") == []
    assert r.mcast.mart[G].next_hops == {SELF, "q"}


def test_join_without_route():
    r = hub(route=False)
    assert r.receive(MulticastInterest(G, None, 0), "c") == [("c", MulticastReply(G, ReplyCode.NO_ROUTE, 0))]
    assert G not in r.mcast.mart


def test_data_fan_out_and_counter_update():
    r = hub()
    r.mcast.mart[G] = MartEntry(G, 0, {"q", "r", SELF})
    r.receive(MulticastInterest(G, None, 0), "c")
    out = handle_multicast_data(r, MulticastData(G, b"", 3, b"x"), "u")
    assert sorted(d for d, _ in out) == ["c", "q", "r"]
    assert r.mcast.mart[G].mc == 3


def test_data_without_state_dropped():
    r = hub()
    assert r.receive(MulticastData(G, b"", 1, b""), "u") == []
    assert r.mcast.counters["mp_dropped"] == 1


def _joined(v):
    r = hub()
    r.receive(MulticastInterest(G, None, 0), "c")
    r.receive(MulticastInterest(G, 3, 0), "q")
    r.mcast.mart[G].mc = v
    return r


def test_pull_forwards_single_copy():
    r = _joined(4)
    first = handle_multicast_pull(r, MulticastInterest(G, None, 5), "c")
    second = handle_multicast_pull(r, MulticastInterest(G, 3, 5), "q")
    assert first == [("u", MulticastInterest(G, 1, 5))] and second == []
    assert r.mcast.mart[G].mc == 5


def test_pull_duplicates_stale_and_gaps_dropped():
    for v, m in ((5, 5), (4, 4), (4, 6)):
        r = _joined(v)
        assert handle_multicast_pull(r, MulticastInterest(G, None, m), "c") == []
        assert r.mcast.mart[G].mc == v


def test_pull_respects_loop_rule():
    r = _joined(0)
    assert r.receive(MulticastInterest(G, 1, 1), "q") == [("q", MulticastReply(G, ReplyCode.LOOP, 0))]


def test_tree_pacing_and_state():
    edges = [("s", "a"), ("a", "b"), ("a", "c"), ("b", "d"), ("b", "e")]
    routers = gram_routers(edges)
    prefix = NamePrefix(G.components)
    routers["s"].produce(prefix, ())
    hops = {"a": ("s", 1), "b": ("a", 2), "c": ("a", 2), "d": ("b", 3), "e": ("b", 3)}
    for r, (up, d) in hops.items():
        routers[r].add_route(prefix, up, d)
    receivers = {"c": ["c.0"], "d": ["d.0", "d.1"], "e": ["e.0", "e.1", "e.2"]}
    pump = Pump(routers)
    for r, ids in receivers.items():
        for rid in ids:
            pump.inject(r, MulticastInterest(G, None, 0), rid)
    pump.run()
    got = {rid: [] for ids in receivers.values() for rid in ids}
    for mc in range(1, 11):
        p = Pump(routers)
        for r, ids in receivers.items():
            for rid in ids:
                p.inject(r, MulticastInterest(G, None, mc), rid)
        p.run()
        for _, rid, msg, _ in p.delivered:
            got[rid].append(msg.mc)
        upstream = [(src, dst) for _, src, dst, m in p.log
                    if type(m) is MulticastInterest and src in routers]
        assert len(upstream) == len(set(upstream)) == 5
    assert all(v == list(range(1, 11)) for v in got.values())
    assert all(len(routers[r].mcast.mart) == 1 for r in routers)


def test_push_next_increments():
    r = gram_routers([("s", "a")])["s"]
    r.mcast.mart[G] = MartEntry(G, 0, {"a"})
    assert push_next(r, G)[0][1].mc == 1
    assert push_next(r, G)[0][1].mc == 2
