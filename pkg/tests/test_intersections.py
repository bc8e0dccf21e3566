import numpy as np
import pytest

from macrotrack.Functions import SegmentCrossings
from macrotrack.Trajectories import Trajectory,DiscreteCurve,Resample
from macrotrack.Segments import SegmentLedger
from macrotrack.Intersections import DetectSelfIntersections,MergeSpans
from macrotrack.Intersections import ThinPoints,AdaptiveParams
from conftest import random_walk


def spans_cover(spans,a,b):
	'''
	Elements a<b cross: points a-1..b must lie in one span.
	'''
	return any(i1 <= a - 1 and b <= i2 for i1,i2 in spans)

def test_convex_arc_is_clean():
	angle = np.arange(0.0,np.pi,1.0/20.0)
	arc   = 20.0*np.column_stack((np.cos(angle),np.sin(angle)))
	assert DetectSelfIntersections(arc,1.0) == []

def test_figure_eight_has_one_span(figure_eight):
	curve,_ = Resample(figure_eight,1.0)
	spans   = DetectSelfIntersections(curve.points,1.0)
	crossings = SegmentCrossings(curve.points)
	assert len(crossings) == 1
	assert len(spans) == 1
	assert spans_cover(spans,*crossings[0])

def test_close_indices_are_not_reported():
	cluster = [[0.0,0.0],[0.3,0.0],[0.3,0.3],[0.0,0.3],[0.1,0.1]]
	tail    = [[1.0 + i,0.1] for i in range(10)]
	assert DetectSelfIntersections(np.array(cluster + tail),1.0) == []

def test_hairpin_is_reported():
	xy = [[0.0,0.0],[10.0,0.0],[10.0,0.5],[0.0,0.5]]
	curve,_ = Resample(Trajectory(0,xy),1.0)
	assert SegmentCrossings(curve.points) == []
	spans = DetectSelfIntersections(curve.points,1.0)
	assert len(spans) == 1
	i1,i2 = spans[0]
	assert i1 <= 2 and i2 >= len(curve) - 3

def test_parallel_strands_far_apart_are_clean():
	xy = [[0.0,0.0],[10.0,0.0],[10.0,5.0],[0.0,5.0]]
	curve,_ = Resample(Trajectory(0,xy),1.0)
	assert DetectSelfIntersections(curve.points,1.0) == []

def test_merge_is_transitive():
	assert MergeSpans([(10,20),(1,5),(18,30),(4,8)]) == [(1,8),(10,30)]
	assert MergeSpans([]) == []

def check_recall(rng,n_curves):
	found = 0
	for _ in range(n_curves):
		curve,_ = Resample(Trajectory(0,random_walk(rng,int(rng.integers(20,80)))),1.0)
		crossings = [(a,b) for a,b in SegmentCrossings(curve.points) if b - a > 4]
		spans = DetectSelfIntersections(curve.points,1.0)
		for a,b in crossings:
			assert spans_cover(spans,a,b)
		found += len(crossings)
	assert found > 0

def test_every_crossing_is_inside_a_span(rng):
	check_recall(rng,40)

@pytest.mark.slow
def test_every_crossing_is_inside_a_span_many(rng):
	check_recall(rng,500)

def test_detection_is_linear(rng):
	ratios = []
	for n in [1000,10000,100000]:
		curve,_ = Resample(Trajectory(0,random_walk(rng,n)),1.0)
		_,ops = DetectSelfIntersections(curve.points,1.0,return_ops=True)
		ratios.append(ops/len(curve))
	assert max(ratios)/min(ratios) <= 1.25


#================== Thinning =================================
def ledger_for(curve,knots):
	M = len(knots) - 1
	return SegmentLedger(original=curve.points[knots],knots=knots,time_budget=np.full(M,2.5))

def test_thinning_not_needed():
	curve  = DiscreteCurve(np.column_stack((np.arange(11.0),np.zeros(11))),1.0)
	ledger = ledger_for(curve,[0,10])
	thin,same = ThinPoints(curve,ledger,1.0)
	assert thin is curve and same is ledger

def test_thinning_halves_dense_curve():
	x      = np.arange(101)*0.25
	curve  = DiscreteCurve(np.column_stack((x,np.zeros(101))),1.0)
	ledger = ledger_for(curve,[0,40,100])
	thin,new = ThinPoints(curve,ledger,1.0)
	assert len(thin) == 51
	assert np.mean(thin.element_lengths) == pytest.approx(0.5)
	assert np.array_equal(thin.points[new.knots],curve.points[ledger.knots])

def test_thinning_keeps_odd_knots():
	x      = np.arange(101)*0.25
	curve  = DiscreteCurve(np.column_stack((x,np.zeros(101))),1.0)
	ledger = ledger_for(curve,[0,33,67,100])
	thin,new = ThinPoints(curve,ledger,1.0)
	assert np.array_equal(thin.points[new.knots],curve.points[ledger.knots])
	assert np.all(np.diff(new.knots) > 0)


#================== Adaptive weights ==========================
def test_no_spans_no_smoothing():
	delta,lam = AdaptiveParams([],30,0.003,0.01,20.0)
	assert np.all(delta == 0.0) and np.all(lam == 0.0)

def test_ramps_around_a_span():
	delta,lam = AdaptiveParams([(10,20)],40,0.003,0.01,20.0)
	assert np.all(delta[10:21] == 0.01)
	assert np.all(lam[10:21] == 20.0)
	for k in range(5):
		assert delta[5 + k] == pytest.approx((k + 1)*0.01/6.0)
		assert delta[25 - k] == pytest.approx((k + 1)*0.01/6.0)
	assert np.all(delta[:5] == 0.0) and np.all(delta[26:] == 0.0)

def test_overlapping_ramps_take_the_maximum():
	delta,_ = AdaptiveParams([(5,10),(18,25)],40,0.003,0.01,20.0)
	one,_   = AdaptiveParams([(5,10)],40,0.003,0.01,20.0)
	two,_   = AdaptiveParams([(18,25)],40,0.003,0.01,20.0)
	assert np.array_equal(delta,np.maximum(one,two))

def test_ramps_are_clipped():
	delta,_ = AdaptiveParams([(2,8)],12,0.003,0.01,20.0)
	assert len(delta) == 12
	assert delta[0] == pytest.approx(0.01*4.0/6.0)
	assert delta[11] == pytest.approx(0.01*3.0/6.0)
