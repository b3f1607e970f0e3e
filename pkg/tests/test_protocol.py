"""Tests for the per-node RPL state machine."""

import pytest

from src.config import TrickleConfig
from src.models import Mode, TraceKind
from src.simulator.actions import (
    DeliverData,
    DropDao,
    DropData,
    ForwardDao,
    ForwardData,
    RecordRoute,
    ResetTrickle,
    ScheduleDao,
    SendDio,
    StateChange,
)
from src.simulator.messages import Dao, DataPacket, Dio
from src.simulator.protocol import (
    NodeState,
    NoRouteError,
    RplParams,
    emit_dao,
    handle_dao,
    handle_data,
    handle_dio,
    handle_dis,
    route_downward,
    select_dao_parents,
    select_preferred_parent,
    trickle_tick,
)
from src.simulator.trickle import TrickleState

NON_STORING = RplParams(mode=Mode.NON_STORING)
STORING = RplParams(mode=Mode.STORING)


def node(node_id: int) -> NodeState:
    return NodeState(id=node_id, trickle=TrickleState.from_config(TrickleConfig()))


def joined_node(node_id: int, params: RplParams = NON_STORING) -> NodeState:
    """Node 3 with candidates 1 (preferred) and 2, both at rank 512."""
    s = node(node_id)
    handle_dio(s, Dio(sender=1, rank=512, dtsn=240), params)
    handle_dio(s, Dio(sender=2, rank=512, dtsn=240), params)
    return s


def kinds(actions) -> list:
    return [a.kind for a in actions if isinstance(a, StateChange)]


class TestParentSelection:
    """Objective function and parent choice"""

    def test_lowest_rank_then_lowest_id(self):
        assert select_preferred_parent({5: 512, 2: 768, 3: 512}) == 3

    def test_no_candidates(self):
        with pytest.raises(ValueError):
            select_preferred_parent({})

    def test_dao_parents(self):
        candidates = {1: 512, 2: 512, 6: 768, 4: 512}
        assert select_dao_parents(candidates, 1, 0) == [1]
        assert select_dao_parents(candidates, 1, 2) == [1, 2, 4]
        assert select_dao_parents(candidates, 1, 10) == [1, 2, 4, 6]

    def test_dao_parents_need_preferred_candidate(self):
        with pytest.raises(ValueError):
            select_dao_parents({1: 512}, 2, 1)


class TestHandleDio:
    """DIO processing"""

    def test_join(self):
        s = node(3)
        actions = handle_dio(s, Dio(sender=1, rank=512, dtsn=240), NON_STORING)
        assert s.joined
        assert s.rank == 768
        assert s.preferred_parent == 1
        assert kinds(actions) == [TraceKind.JOIN]
        assert ResetTrickle() in actions
        assert ScheduleDao(trigger_bit=False) in actions

    def test_better_parent(self):
        s = node(5)
        handle_dio(s, Dio(sender=4, rank=1024, dtsn=240), NON_STORING)
        assert s.rank == 1280
        actions = handle_dio(s, Dio(sender=2, rank=768, dtsn=240), NON_STORING)
        assert s.preferred_parent == 2
        assert s.rank == 1024
        assert kinds(actions) == [TraceKind.PARENT]
        assert ScheduleDao(trigger_bit=False) in actions
        # The old parent now has the same rank and is no longer a candidate.
        assert 4 not in s.candidate_parents

    def test_tie_keeps_lowest_id(self):
        s = joined_node(3)
        assert s.preferred_parent == 1
        assert set(s.candidate_parents) == {1, 2}

    def test_same_rank_neighbour_is_consistent(self):
        s = joined_node(3)
        counter = s.trickle.counter
        actions = handle_dio(s, Dio(sender=4, rank=768, dtsn=240), NON_STORING)
        assert actions == []
        assert 4 not in s.candidate_parents
        assert s.trickle.counter == counter + 1

    def test_root_ignores_dios(self):
        root = NodeState.root(TrickleState.from_config(TrickleConfig()))
        assert handle_dio(root, Dio(sender=1, rank=512, dtsn=241), NON_STORING) == []
        assert root.rank == 256

    def test_preferred_parent_increment_non_storing(self):
        s = joined_node(3)
        actions = handle_dio(s, Dio(sender=1, rank=512, dtsn=241), NON_STORING)
        assert ScheduleDao(trigger_bit=True) in actions
        assert ResetTrickle() in actions
        assert kinds(actions) == [TraceKind.DTSN]
        assert s.dtsn == 241

    def test_preferred_parent_increment_storing(self):
        s = joined_node(3, STORING)
        actions = handle_dio(s, Dio(sender=1, rank=512, dtsn=241), STORING)
        assert actions == [ScheduleDao(trigger_bit=True)]
        assert s.dtsn == 240

    def test_first_dio_is_not_an_increment(self):
        s = node(3)
        actions = handle_dio(s, Dio(sender=1, rank=512, dtsn=7), NON_STORING)
        assert ScheduleDao(trigger_bit=True) not in actions

    def test_stale_dtsn_ignored(self):
        s = joined_node(3)
        assert handle_dio(s, Dio(sender=1, rank=512, dtsn=240), NON_STORING) == []

    def test_non_preferred_increment_with_detection(self):
        params = RplParams(mode=Mode.NON_STORING, k=1, detection=True)
        s = joined_node(3, params)
        assert s.dao_parents == [1, 2]
        actions = handle_dio(s, Dio(sender=2, rank=512, dtsn=241), params)
        assert actions == [ScheduleDao(trigger_bit=True)]
        assert s.dtsn == 240

    def test_non_preferred_increment_without_detection(self):
        params = RplParams(mode=Mode.NON_STORING, k=1, detection=False)
        s = joined_node(3, params)
        assert handle_dio(s, Dio(sender=2, rank=512, dtsn=241), params) == []

    def test_increment_from_plain_candidate_ignored(self):
        params = RplParams(mode=Mode.NON_STORING, k=0, detection=True)
        s = joined_node(3, params)
        assert s.dao_parents == [1]
        assert handle_dio(s, Dio(sender=2, rank=512, dtsn=241), params) == []


class TestHandleDis:
    def test_joined_answers(self):
        assert handle_dis(joined_node(3)) == [SendDio()]

    def test_unjoined_stays_silent(self):
        assert handle_dis(node(3)) == []


class TestDao:
    """DAO origination and forwarding"""

    def test_emit_clears_pending(self):
        s = joined_node(3)
        s.dao_pending = True
        s.dao_trigger = True
        s.dao_due_us = 10
        dao = emit_dao(s, 1, True)
        assert dao.origin == 3
        assert dao.parent_of_origin == 1
        assert dao.dtsn_trigger_bit
        assert not s.dao_pending
        assert s.dao_due_us is None

    def test_emit_requires_join(self):
        with pytest.raises(ValueError):
            emit_dao(node(3), 1, False)

    def test_emit_requires_dao_parent(self):
        with pytest.raises(ValueError):
            emit_dao(joined_node(3), 2, False)

    def test_forward_toward_root(self):
        s = joined_node(3)
        dao = Dao(origin=4, forwarder=4, parent_of_origin=3, dtsn_trigger_bit=True)
        [action] = handle_dao(s, dao, NON_STORING)
        assert isinstance(action, ForwardDao)
        assert action.via == 1
        assert action.dao.hop_trail == (4, 3)
        assert action.dao.dtsn_trigger_bit

    def test_storing_nodes_learn_routes(self):
        s = joined_node(3, STORING)
        handle_dao(s, Dao(origin=4, forwarder=4, parent_of_origin=3), STORING)
        assert s.routing_table == {4: 4}

    def test_unjoined_drops(self):
        dao = Dao(origin=4, forwarder=4, parent_of_origin=3)
        [action] = handle_dao(node(3), dao, NON_STORING)
        assert isinstance(action, DropDao)

    def test_root_records_source_route(self):
        root = NodeState.root(TrickleState.from_config(TrickleConfig()))
        dao = Dao(origin=4, forwarder=4, parent_of_origin=3).forwarded_by(3)
        actions = handle_dao(root, dao, NON_STORING)
        assert actions == [RecordRoute(dao)]
        assert root.source_routes == {4: 3}

    def test_root_records_next_hop_when_storing(self):
        root = NodeState.root(TrickleState.from_config(TrickleConfig()))
        handle_dao(root, Dao(origin=4, forwarder=4, parent_of_origin=3).forwarded_by(3), STORING)
        assert root.routing_table == {4: 3}


class TestData:
    def test_forward(self):
        s = joined_node(3)
        [action] = handle_data(s, DataPacket(origin=3, destination=0, created_at=0))
        assert isinstance(action, ForwardData)
        assert action.via == 1

    def test_deliver_at_root(self):
        root = NodeState.root(TrickleState.from_config(TrickleConfig()))
        packet = DataPacket(origin=3, destination=0, created_at=0)
        assert handle_data(root, packet) == [DeliverData(packet)]

    def test_unjoined_drops(self):
        [action] = handle_data(node(3), DataPacket(origin=3, destination=0, created_at=0))
        assert isinstance(action, DropData)


class TestTrickleTick:
    def test_unjoined_sends_nothing(self):
        assert trickle_tick(node(3)) is None

    def test_joined_sends_current_dio(self):
        s = joined_node(3)
        assert trickle_tick(s) == Dio(sender=3, rank=768, dtsn=240)


class TestRouteDownward:
    """Root routes toward a destination"""

    def root(self) -> NodeState:
        return NodeState.root(TrickleState.from_config(TrickleConfig()))

    def test_source_route(self):
        root = self.root()
        root.source_routes = {1: 0, 2: 1, 4: 2}
        assert route_downward(root, 4, Mode.NON_STORING) == [0, 1, 2, 4]

    def test_next_hop(self):
        root = self.root()
        root.routing_table = {4: 1}
        assert route_downward(root, 4, Mode.STORING) == [0, 1]

    def test_root_itself(self):
        assert route_downward(self.root(), 0, Mode.NON_STORING) == [0]

    def test_unknown_destination(self):
        with pytest.raises(NoRouteError):
            route_downward(self.root(), 4, Mode.NON_STORING)
        with pytest.raises(NoRouteError):
            route_downward(self.root(), 4, Mode.STORING)

    def test_loop(self):
        root = self.root()
        root.source_routes = {2: 3, 3: 2}
        with pytest.raises(NoRouteError):
            route_downward(root, 2, Mode.NON_STORING)
