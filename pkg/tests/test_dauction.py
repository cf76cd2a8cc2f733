
import pytest
from hypothesis import given, settings, strategies as st

from avcoord.config import DAuctionConfig
from avcoord.strategies.dauction import ContentionList, DecentralAuction, broadcast_join

from helpers import crossing_order, small_world, straight_route


def test_join_inserts_in_bid_order():
    lst = ContentionList()
    broadcast_join(lst, 0, 9.0)
    broadcast_join(lst, 1, 5.0)
    broadcast_join(lst, 2, 7.0)
    assert lst.entries() == [(0, 9.0), (2, 7.0), (1, 5.0)]


def test_join_empty_list():
    assert broadcast_join(ContentionList(), 0, 3.0).entries() == [(0, 3.0)]


def test_equal_bids_ordered_by_id():
    lst = ContentionList()
    lst.join(3, 5.0)
    lst.join(7, 5.0)
    lst.join(1, 5.0)
    assert [v for v, _ in lst] == [1, 3, 7]


def test_duplicate_join_is_an_error():
    lst = ContentionList()
    lst.join(1, 2.0)
    with pytest.raises(ValueError):
        lst.join(1, 4.0)


def test_remove_returns_bid():
    lst = ContentionList()
    lst.join(1, 2.0)
    assert lst.remove(1) == 2.0 and len(lst) == 0
    with pytest.raises(KeyError):
        lst.remove(1)


ops = st.lists(st.tuples(st.booleans(), st.integers(0, 15), st.integers(0, 10)), max_size=60)


@settings(max_examples=200)
@given(ops=ops)
def test_list_stays_sorted_and_never_reorders(ops):
    lst = ContentionList()
    ref: dict[int, float] = {}
    for is_join, vid, bid in ops:
        before = [v for v, _ in lst]
        if is_join and vid not in ref:
            lst.join(vid, float(bid))
            ref[vid] = float(bid)
        elif not is_join and vid in ref:
            lst.remove(vid)
            del ref[vid]
        else:
            continue
        after = [v for v, _ in lst]
        assert lst.entries() == sorted(ref.items(), key=lambda kv: (-kv[1], kv[0]))
        # relative order of survivors is unchanged
        survivors = [v for v in before if v in ref]
        assert [v for v in after if v in survivors] == survivors


def test_head_not_at_stop_line_blocks_the_box():
    world = small_world(3, 3)
    g = world.grid
    near = g.edge_between(3, 4)
    far = g.edge_between(1, 4)
    ready = world.add_vehicle(near, 100.0, straight_route(world, near), budget=12.0)
    ranked = world.add_vehicle(far, 60.0, straight_route(world, far), budget=120.0)
    strategy = DecentralAuction(DAuctionConfig(bidding="balanced"))
    strategy.attach(world)
    world.step(strategy)
    assert world.intersections[4].inside is None
    assert [v for v, _ in strategy.lists[4]] == [ranked.id, ready.id]
    for _ in range(4):
        world.step(strategy)
    assert world.intersections[4].inside is ranked


def test_skip_absent_head_serves_ready_vehicle():
    world = small_world(3, 3)
    g = world.grid
    near, far = g.edge_between(3, 4), g.edge_between(1, 4)
    ready = world.add_vehicle(near, 100.0, straight_route(world, near), budget=12.0)
    world.add_vehicle(far, 60.0, straight_route(world, far), budget=120.0)
    strategy = DecentralAuction(DAuctionConfig(bidding="balanced", skip_absent_head=True))
    strategy.attach(world)
    world.step(strategy)
    assert world.intersections[4].inside is ready


def test_grant_charges_broadcast_bid_once():
    world = small_world(3, 3)
    e = world.grid.edge_between(3, 4)
    route = straight_route(world, e)
    v = world.add_vehicle(e, 100.0, route, budget=24.0)
    strategy = DecentralAuction(DAuctionConfig(bidding="balanced"))
    strategy.attach(world)
    strategy.keep_log = True
    world.step(strategy)
    assert strategy.grant_log == [(0, 4, v.id, 2.0)]
    assert v.budget == pytest.approx(22.0)
    assert v.id not in strategy.lists[4]


def test_empty_list_idles():
    world = small_world(3, 3)
    strategy = DecentralAuction()
    strategy.attach(world)
    world.step(strategy)
    assert all(not i.occupied for i in world.intersections)


@pytest.mark.parametrize("bids", [[9, 5], [5, 5, 1], [0, 3, 3, 2], [4], [1, 2, 3, 4]])
def test_grant_sequence_matches_cooperative_schedule(bids):
    assert crossing_order(bids, "dauction") == crossing_order(bids, "coop")
    assert len(crossing_order(bids, "dauction")) == len(bids)
