import pytest
from hypothesis import given, settings, strategies as st

from ccngram.aid import AidError, AidMapper, ListTable, LocalInterval, allocate_aid, map_forward, map_inverse
from ccngram.messages import Interest, to_record
from ccngram.names import ContentName


def mapper(eps, own, nbr_start, length, nbr="n"):
    table = ListTable(LocalInterval(own, length), {nbr: LocalInterval(nbr_start, length)})
    return AidMapper(eps, table)


def rotation_oracle(eps, own, target, length):
    """Independent model: list the own interval, rotate it by eps, lay it over
    the target interval."""
    src = list(range(own, own + length))
    dst = list(range(target, target + length))
    return {src[i]: dst[(i + eps) % length] for i in range(length)}


def test_identity_when_eps_zero():
    m = mapper(0, 0, 0, 16)
    assert map_forward(m, 7, "n") == 7
    assert map_inverse(m, 7, "n") == 7


def test_eps5_example():
    m = mapper(5, 0, 16, 16)
    images = [m.map_forward(a, "n") for a in range(16)]
    assert sorted(images) == list(range(16, 32))
    assert m.map_forward(3, "n") == 24
    assert m.map_inverse(24, "n") == 3
    assert images == [rotation_oracle(5, 0, 16, 16)[a] for a in range(16)]


def test_far_interval_example():
    # own [0,64), neighbor [512,576), eps 62
    m = mapper(62, 0, 512, 64, "s")
    assert m.map_forward(40, "s") == 550
    assert m.map_inverse(550, "s") == 40


def test_exhaustive_round_trip_64():
    m = mapper(37, 128, 4096, 64)
    for a in range(128, 192):
        b = m.map_forward(a, "n")
        assert 4096 <= b < 4160
        assert m.map_inverse(b, "n") == a


def test_out_of_range_rejected():
    m = mapper(1, 0, 16, 16)
    with pytest.raises(AidError):
        m.map_forward(16, "n")
    with pytest.raises(AidError):
        m.map_inverse(3, "n")
    with pytest.raises(AidError):
        m.map_forward(3, "nobody")


def test_intervals_must_share_length():
    with pytest.raises(AidError):
        ListTable(LocalInterval(0, 16), {"n": LocalInterval(16, 8)})


@pytest.mark.parametrize("keys,expected", [(set(), 0), ({0, 1, 2}, 3), ({0, 2}, 1), ({0, 1, 2, 3}, None)])
def test_allocate(keys, expected):
    assert allocate_aid(dict.fromkeys(keys), LocalInterval(0, 4)) == expected


def test_epsilon_not_exposed():
    m = mapper(12345, 0, 100000, 65536)
    assert "12345" not in repr(m)
    assert not hasattr(m, "__dict__")
    msg = Interest(ContentName.parse("/a"), m.map_forward(7, "n"), 3)
    assert set(to_record(msg)) == {"type", "name", "aid", "distance"}


configs = st.integers(1, 1024).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n - 1), st.integers(0, 10**6), st.integers(0, 10**6)))


@settings(max_examples=200, deadline=None)
@given(configs)
def test_bijection_property(cfg):
    length, eps, own, target = cfg
    m = mapper(eps, own, target, length)
    image = [m.map_forward(a, "n") for a in range(own, own + length)]
    assert sorted(image) == list(range(target, target + length))
    assert all(m.map_inverse(b, "n") == a for a, b in zip(range(own, own + length), image))
    oracle = rotation_oracle(eps, own, target, length)
    assert image == [oracle[a] for a in range(own, own + length)]
