import dataclasses

import pytest
from hypothesis import given, strategies as st

from evrange.route import DiscretizedRoute, GeoPoint, RoadFeatures, RouteStep
from evrange.rules import (
    LimitType,
    ReferencePoint,
    RuleThresholds,
    build_reference_profile,
    classify_node,
    coalesce_stop_events,
    curve_events,
)

T = RuleThresholds()


class TestClassifyNode:
    def test_traffic_signal_forces_stop(self):
        f = RoadFeatures(speed_limit=13.9, traffic_signal=True)
        assert classify_node(f, T) == (0.0, LimitType.STOP)

    def test_stop_and_yield_signs_force_stop(self):
        assert classify_node(RoadFeatures(stop_sign=True), T)[1] is LimitType.STOP
        assert classify_node(RoadFeatures(yield_sign=True), T)[1] is LimitType.STOP

    def test_edge_entry_with_sharp_heading_change(self):
        f = RoadFeatures(speed_limit=13.9, edge_position=0.0, heading_change=70.0)
        assert classify_node(f, T) == (0.0, LimitType.STOP)

    def test_edge_exit_with_sharp_heading_change(self):
        f = RoadFeatures(speed_limit=13.9, edge_position=1.0, heading_change=70.0)
        assert classify_node(f, T) == (0.0, LimitType.STOP)

    def test_sharp_heading_change_mid_edge_is_not_a_stop(self):
        f = RoadFeatures(speed_limit=13.9, edge_position=0.5, heading_change=70.0)
        assert classify_node(f, T)[1] is LimitType.DEFAULT

    def test_heading_change_at_threshold_is_not_a_stop(self):
        f = RoadFeatures(speed_limit=13.9, edge_position=0.0, heading_change=60.0)
        assert classify_node(f, T)[1] is LimitType.DEFAULT

    def test_high_curvature_limits_to_avg_edge_speed(self):
        f = RoadFeatures(speed_limit=13.9, avg_edge_speed=9.7, curvature=T.curvature_threshold + 1)
        assert classify_node(f, T) == (9.7, LimitType.CURVE)

    def test_plain_node_uses_posted_limit(self):
        f = RoadFeatures(speed_limit=13.9)
        assert classify_node(f, T) == (13.9, LimitType.DEFAULT)

    def test_signal_outranks_curvature(self):
        f = RoadFeatures(speed_limit=13.9, avg_edge_speed=9.7, curvature=99.0,
                         traffic_signal=True)
        assert classify_node(f, T) == (0.0, LimitType.STOP)

    @given(
        st.floats(0, 40), st.floats(0, 40), st.floats(0, 10),
        st.floats(0, 180), st.sampled_from([0.0, 0.5, 1.0]),
        st.booleans(), st.booleans(), st.booleans(),
    )
    def test_adding_a_signal_always_yields_stop(
        self, limit, avg, curv, change, pos, stop_sign, yield_sign, roundabout
    ):
        f = RoadFeatures(
            speed_limit=limit, avg_edge_speed=avg, curvature=curv,
            heading_change=change, edge_position=pos,
            stop_sign=stop_sign, yield_sign=yield_sign, roundabout=roundabout,
        )
        with_signal = dataclasses.replace(f, traffic_signal=True)
        assert classify_node(with_signal, T) == (0.0, LimitType.STOP)
        # and the bound invariants hold for any input
        v_ref, kind = classify_node(f, T)
        if kind is LimitType.DEFAULT:
            assert v_ref <= f.speed_limit
        elif kind is LimitType.CURVE:
            assert v_ref <= f.avg_edge_speed
        else:
            assert v_ref == 0.0


def _route_with(features: list[RoadFeatures]) -> DiscretizedRoute:
    steps = [
        RouteStep(GeoPoint(0, 0), float(i), features=f) for i, f in enumerate(features)
    ]
    return DiscretizedRoute(steps=steps, total_length=float(len(features) - 1))


class TestReferenceProfile:
    def test_uniform_route_gives_constant_profile(self):
        route = _route_with([RoadFeatures(speed_limit=13.9)] * 20)
        profile = build_reference_profile(route, T)
        assert len(profile) == 20
        assert all(p.v_ref == 13.9 and p.limit_type is LimitType.DEFAULT for p in profile)

    def test_single_signal_gives_one_stop_event(self):
        feats = [RoadFeatures(speed_limit=13.9) for _ in range(21)]
        feats[10] = RoadFeatures(speed_limit=13.9, traffic_signal=True)
        profile = build_reference_profile(_route_with(feats), T)
        events = coalesce_stop_events(profile, T.stop_coalesce_window_m)
        assert len(events) == 1
        assert events[0].arc_length == 10.0

    def test_adjacent_stops_coalesce(self):
        feats = [RoadFeatures(speed_limit=13.9) for _ in range(21)]
        for i in (9, 10, 11):
            feats[i] = RoadFeatures(speed_limit=13.9, stop_sign=True)
        profile = build_reference_profile(_route_with(feats), T)
        events = coalesce_stop_events(profile, 2.0)
        assert len(events) == 1
        assert events[0].arc_length == pytest.approx(10.0)

    def test_distant_stops_stay_separate(self):
        feats = [RoadFeatures(speed_limit=13.9) for _ in range(31)]
        feats[5] = RoadFeatures(speed_limit=13.9, stop_sign=True)
        feats[25] = RoadFeatures(speed_limit=13.9, stop_sign=True)
        profile = build_reference_profile(_route_with(feats), T)
        assert len(coalesce_stop_events(profile, 2.0)) == 2

    def test_profile_matches_per_node_classification(self):
        # mixed fixture: signal + curve + plain segments
        feats = []
        for i in range(60):
            if i == 20:
                feats.append(RoadFeatures(speed_limit=13.9, traffic_signal=True))
            elif 35 <= i <= 45:
                feats.append(
                    RoadFeatures(speed_limit=13.9, avg_edge_speed=7.0, curvature=3.0)
                )
            else:
                feats.append(RoadFeatures(speed_limit=13.9))
        route = _route_with(feats)
        profile = build_reference_profile(route, T)
        for point, f in zip(profile, feats):
            v_ref, kind = classify_node(f, T)  # brute-force per-node oracle
            assert point.v_ref == v_ref
            assert point.limit_type is kind

    def test_curve_events_take_run_minimum(self):
        profile = (
            [ReferencePoint(float(i), 13.9, LimitType.DEFAULT) for i in range(5)]
            + [ReferencePoint(5.0, 8.0, LimitType.CURVE),
               ReferencePoint(6.0, 6.5, LimitType.CURVE),
               ReferencePoint(7.0, 7.5, LimitType.CURVE)]
            + [ReferencePoint(8.0, 13.9, LimitType.DEFAULT)]
        )
        events = curve_events(profile)
        assert len(events) == 1
        assert events[0].arc_length == 5.0
        assert events[0].v_ref == 6.5

    def test_route_without_features_rejected(self):
        steps = [RouteStep(GeoPoint(0, 0), 0.0), RouteStep(GeoPoint(0, 0), 1.0)]
        route = DiscretizedRoute(steps=steps, total_length=1.0)
        with pytest.raises(ValueError, match="features"):
            build_reference_profile(route, T)
