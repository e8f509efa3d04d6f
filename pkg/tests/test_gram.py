import pytest
from hypothesis import given, settings, strategies as st

from ccngram.aid import ListTable, LocalInterval
from ccngram.gram import DEFAULT_SP, SELF, ArtEntry, GramRouter, NoRoute
from ccngram.messages import DataPacket, Interest, Reply, ReplyCode
from ccngram.names import ContentName, NamePrefix
from ccngram.store import CachingPolicy
from netkit import Pump, gram_routers

N = ContentName.parse
PFX = NamePrefix.parse("/n")
NAME = N("/n/j")


def collision_router():
    table = ListTable(LocalInterval(0, 64), {
        "p": LocalInterval(128, 64), "q": LocalInterval(256, 64), "s": LocalInterval(512, 64)})
    r = GramRouter("i", ["p", "q", "s"], table, 62)
    r.add_route(PFX, "s", 2)
    r.add_route(PFX, "q", 4)
    r._add_art(15, "q", 15)
    # occupy every smaller identifier so the allocator's choice is pinned
    for a in range(40):
        if a != 15:
            r._add_art(a, "q", 300 + a)
    return r


class TestConsumerInterest:
    def test_served_from_store(self):
        r = gram_routers([("a", "b")], store_capacity=4)["a"]
        r.store.insert(NAME, b"obj")
        assert r.receive(Interest(NAME, "c1"), "c1") == [("c1", DataPacket(NAME, "c1", DEFAULT_SP, b"obj"))]
        assert not r.light

    def test_forward_then_aggregate(self):
        r = gram_routers([("a", "b")])["a"]
        r.add_route(PFX, "b", 1)
        out = r.receive(Interest(NAME, "c1"), "c1")
        assert len(out) == 1 and out[0][0] == "b"
        fwd = out[0][1]
        assert fwd.distance == 1
        assert fwd.aid == r.mapper.map_forward(r.self_aid, "b")
        assert r.art[r.self_aid].next_hop is SELF
        assert r.receive(Interest(NAME, "c2"), "c2") == []
        assert list(r.light[NAME].local_consumers) == ["c1", "c2"]
        assert r.counters["interests_aggregated"] == 1

    def test_no_route(self):
        r = gram_routers([("a", "b")])["a"]
        assert r.receive(Interest(NAME, "c1"), "c1") == [("c1", Reply(NAME, "c1", ReplyCode.NO_ROUTE))]
        assert not r.light and not r.art

    def test_producer_without_object(self):
        r = gram_routers([("a", "b")])["a"]
        r.produce(PFX, {N("/n/other")})
        assert r.receive(Interest(NAME, "c1"), "c1")[0][1].code is ReplyCode.NO_CONTENT
        assert r.distance_to(PFX) == 0
        assert r.light_entry(N("/n/other")).content_ref is not None

    def test_one_self_aid_for_all_requests(self):
        r = gram_routers([("a", "b")])["a"]
        r.add_route(PFX, "b", 1)
        for k in range(20):
            r.receive(Interest(N(f"/n/{k}"), f"c{k}"), f"c{k}")
        assert len(r.art) == 1

    def test_lfr_admits_raises_without_route(self):
        r = gram_routers([("a", "b")])["a"]
        with pytest.raises(NoRoute):
            r.lfr_admits(PFX, 3)


class TestNeighborInterest:
    def test_collision_creates_fresh_entry(self):
        r = collision_router()
        out = r.receive(Interest(NAME, 15, 3), "p")
        assert out == [("s", Interest(NAME, 550, 2))]
        e = r.art[40]
        assert (e.aid, e.next_hop, e.map) == (40, "p", 15)
        assert (r.art[15].next_hop, r.art[15].map) == ("q", 15)
        assert r.counters["aid_collisions"] == 1

    def test_same_flow_reuses_entry(self):
        r = collision_router()
        r.receive(Interest(NAME, 15, 3), "p")
        before = dict(r.art)
        assert r.receive(Interest(N("/n/k"), 15, 3), "p") == [("s", Interest(N("/n/k"), 550, 2))]
        assert r.art.keys() == before.keys()

    def test_no_collision_uses_incoming_aid(self):
        r = gram_routers([("p", "i"), ("i", "s")])["i"]
        r.add_route(PFX, "s", 1)
        out = r.receive(Interest(NAME, r.list.own.start + 15, 4), "p")
        e = r.art[r.list.own.start + 15]
        assert (e.next_hop, e.map) == ("p", r.list.own.start + 15)
        assert out == [("s", Interest(NAME, r.mapper.map_forward(e.aid, "s"), 1))]

    def test_key_naming_other_flow_is_not_reused(self):
        # AID 40 arriving from r must not be read as the p-flow stored under key 40
        table = ListTable(LocalInterval(0, 64), {v: LocalInterval(128 * (k + 1), 64)
                                                  for k, v in enumerate("pqrs")})
        i = GramRouter("i", "pqrs", table, 62)
        i.add_route(PFX, "s", 2)
        i._add_art(15, "q", 15)
        i.receive(Interest(NAME, 15, 3), "p")
        key_p = next(k for k, e in i.art.items() if e.next_hop == "p")
        out = i.receive(Interest(NAME, key_p, 3), "r")
        key_r = next(k for k, e in i.art.items() if e.next_hop == "r")
        assert key_r != key_p and i.art[key_r].map == key_p
        assert i.mapper.map_inverse(out[0][1].aid, "s") == key_r

    def test_key_owned_by_same_neighbor_other_flow(self):
        # p's flow 15 sits under key 40; a later p flow with AID 40 gets its own key
        r = collision_router()
        r.receive(Interest(NAME, 15, 3), "p")
        out = r.receive(Interest(NAME, 40, 3), "p")
        key = r.mapper.map_inverse(out[0][1].aid, "s")
        assert key not in (15, 40)
        assert (r.art[key].next_hop, r.art[key].map) == ("p", 40)
        assert (r.art[40].next_hop, r.art[40].map) == ("p", 15)
        back = r.receive(DataPacket(NAME, out[0][1].aid, b"", b""), "s")
        assert back == [("p", DataPacket(NAME, 40, b"", b""))]

    def test_loop_reply(self):
        r = collision_router()
        assert r.receive(Interest(NAME, 15, 2), "p") == [("p", Reply(NAME, 15, ReplyCode.LOOP))]
        assert 40 not in r.art

    def test_served_from_store_with_incoming_aid(self):
        r = collision_router()
        r.store = type(r.store)(4)
        r.store.insert(NAME, b"x")
        assert r.receive(Interest(NAME, 15, 3), "p") == [("p", DataPacket(NAME, 15, DEFAULT_SP, b"x"))]

    def test_bad_aid_dropped(self):
        r = collision_router()
        assert r.receive(Interest(NAME, 9999, 3), "p") == []
        assert r.counters["dropped_bad_aid"] == 1

    def test_relay_never_aggregates(self):
        r = collision_router()
        r.receive(Interest(NAME, 15, 3), "p")
        assert len(r.receive(Interest(NAME, 15, 3), "p")) == 1
        assert r.counters["interests_aggregated"] == 0

    def test_no_per_interest_state(self):
        r = collision_router()
        before = len(r.art)
        for k in range(200):
            r.receive(Interest(N(f"/n/{k}"), 15, 3), "p")
        assert len(r.art) - before == 1
        assert not r.light


class TestResponses:
    def test_data_reverse_mapping(self):
        r = collision_router()
        r.receive(Interest(NAME, 15, 3), "p")
        assert r.receive(DataPacket(NAME, 550, b"sp", b"x"), "s") == [("p", DataPacket(NAME, 15, b"sp", b"x"))]

    def test_data_without_entry_dropped(self):
        r = collision_router()
        assert r.receive(DataPacket(NAME, 560, b"", b""), "s") == []
        assert r.counters["dropped_data_no_art"] == 1

    def test_data_fans_out_to_local_consumers(self):
        r = gram_routers([("a", "b")], store_capacity=2, caching=CachingPolicy.EDGE)["a"]
        r.add_route(PFX, "b", 1)
        aid = r.receive(Interest(NAME, "c1"), "c1")[0][1].aid
        r.receive(Interest(NAME, "c2"), "c2")
        out = r.receive(DataPacket(NAME, aid, b"", b"x"), "b")
        assert sorted(dst for dst, _ in out) == ["c1", "c2"]
        assert all(m.aid == dst for dst, m in out)
        assert NAME not in r.light and NAME in r.store

    def test_reply_at_origin(self):
        r = gram_routers([("a", "b")])["a"]
        r.add_route(PFX, "b", 1)
        aid = r.receive(Interest(NAME, "c1"), "c1")[0][1].aid
        assert r.receive(Reply(NAME, aid, ReplyCode.LOOP), "b") == [("c1", Reply(NAME, "c1", ReplyCode.LOOP))]
        assert NAME not in r.light

    def test_reply_relayed_with_map(self):
        r = collision_router()
        r.receive(Interest(NAME, 15, 3), "p")
        assert r.receive(Reply(NAME, 550, ReplyCode.NO_ROUTE), "s") == [("p", Reply(NAME, 15, ReplyCode.NO_ROUTE))]

    def test_reply_unknown_aid_dropped(self):
        r = collision_router()
        assert r.receive(Reply(NAME, 560, ReplyCode.LOOP), "s") == []


def line(n, **kw):
    ids = [f"r{i}" for i in range(n)]
    routers = gram_routers(list(zip(ids, ids[1:])), **kw)
    routers[ids[-1]].produce(PFX, {NAME})
    for k, r in enumerate(ids[:-1]):
        routers[r].add_route(PFX, ids[k + 1], n - 1 - k)
        if k:
            routers[r].add_route(PFX, ids[k - 1], n - k + 1)
    return ids, routers


def test_line_end_to_end_and_reverse_path():
    ids, routers = line(5)
    pump = Pump(routers)
    pump.inject("r0", Interest(NAME, "c"), "c", "t")
    pump.run()
    assert [(r, c, type(m)) for r, c, m, _ in pump.delivered] == [("r0", "c", DataPacket)]
    interest_path = [dst for _, src, dst, m in pump.log if type(m) is Interest]
    data_path = [dst for _, src, dst, m in pump.log if type(m) is DataPacket]
    assert interest_path == ids
    assert data_path == ids[::-1][1:]
    distances = [m.distance for _, src, dst, m in pump.log if type(m) is Interest]
    assert distances[0] is None
    assert all(b < a for a, b in zip(distances[1:], distances[2:]))


def test_on_path_caching_serves_second_request():
    ids, routers = line(4, store_capacity=8, caching=CachingPolicy.ON_PATH)
    p = Pump(routers)
    p.inject("r0", Interest(NAME, "c"), "c")
    p.run()
    assert all(NAME in routers[r].store for r in ids[:-1])
    p2 = Pump(routers)
    p2.inject("r0", Interest(NAME, "d"), "d")
    p2.run()
    assert [dst for _, _, dst, _ in p2.log] == ["r0"]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 5)), min_size=1, max_size=40))
def test_art_bound_independent_of_rate(flows):
    # flows: (upstream neighbor index, AID offset) pairs, repeated arbitrarily
    table = ListTable(LocalInterval(0, 64), {f"u{k}": LocalInterval(100 * (k + 1), 64) for k in range(4)}
                      | {"s": LocalInterval(1000, 64)})
    r = GramRouter("i", [f"u{k}" for k in range(4)] + ["s"], table, 5)
    r.add_route(PFX, "s", 1)
    for k, (u, off) in enumerate(flows):
        r.receive(Interest(N(f"/n/{k}"), off, 9), f"u{u}")
    assert len(r.art) <= min(64, 1 + len(set(flows)))
    assert len(r.art) == len(set(flows))
    assert all(isinstance(e, ArtEntry) and e.next_hop in r.neighbors for e in r.art.values())
