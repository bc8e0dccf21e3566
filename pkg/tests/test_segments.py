import numpy as np
import pytest

from macrotrack.Functions import Perp
from macrotrack.Trajectories import Trajectory,DiscreteCurve,Resample
from macrotrack.Segments import SegmentLedger,DisappearedRuns
from macrotrack.Segments import EvolveSegmentLengths,NormalizeDiscreteLengths
from macrotrack.Segments import RelocateEndpoints,BuildAttractingField
from macrotrack.Evolution import ComputeCurvature
from conftest import random_walk


def line_curve(n,hbar=1.0):
	x = np.arange(n + 1,dtype=np.float64)
	return DiscreteCurve(np.column_stack((x,np.zeros(n + 1))),hbar)


#================== Model lengths ===========================
def test_flat_curve_keeps_lengths():
	curve,ledger = Resample(Trajectory(0,[[0.0,0.0],[2.0,0.0],[4.0,0.0],[6.0,0.0]]),1.0)
	k    = ComputeCurvature(curve.points)
	new  = EvolveSegmentLengths(ledger,curve,k,-0.003*k,1e-3)
	assert np.array_equal(new.lengths,ledger.lengths)
	assert not np.any(new.disappeared)

def test_curvature_flow_shortens_segments(rng):
	curve,ledger = Resample(Trajectory(0,random_walk(rng,15)),1.0)
	k   = ComputeCurvature(curve.points)
	new = EvolveSegmentLengths(ledger,curve,k,-0.01*k,1e-2)
	alive = ~new.disappeared
	assert np.all(new.lengths[alive] <= ledger.lengths[alive])

def test_hairpin_segment_disappears_for_good(rng):
	xy = [[0.0,0.0],[10.0,0.0],[10.0,0.5],[0.0,0.5]]
	curve,ledger = Resample(Trajectory(0,xy),1.0)
	k      = ComputeCurvature(curve.points)
	ledger = EvolveSegmentLengths(ledger,curve,k,-0.003*k,1e-6)
	assert list(ledger.disappeared) == [False,True,False]
	for _ in range(10):
		k    = rng.normal(size=curve.n + 1)
		beta = rng.normal(size=curve.n + 1)
		ledger = EvolveSegmentLengths(ledger,curve,k,beta,1.0)
		assert ledger.disappeared[1]
		assert ledger.lengths[1] == 0.0

def test_disappeared_runs():
	assert DisappearedRuns([False,True,True,False,True]) == [(1,2),(4,4)]
	assert DisappearedRuns([False,False]) == []


#================== Discrete lengths ========================
def test_single_segment_takes_the_whole_curve(rng):
	curve,ledger = Resample(Trajectory(0,[[0.0,0.0],[5.0,0.0]]),1.0)
	ledger.lengths = np.array([3.0])
	new = NormalizeDiscreteLengths(ledger,curve)
	assert new.discrete[0] == curve.length

def test_discrete_lengths_keep_ratios():
	ledger = SegmentLedger(original=[[0.0,0.0],[1.0,0.0],[2.0,0.0]],knots=[0,1,2],
				time_budget=[2.5,2.5],lengths=[3.0,1.0])
	curve = DiscreteCurve(np.array([[0.0,0.0],[4.0,0.0],[8.0,0.0]]),1.0)
	new   = NormalizeDiscreteLengths(ledger,curve)
	assert np.allclose(new.discrete,[6.0,2.0])

def test_discrete_lengths_sum_to_curve_length(rng):
	for _ in range(20):
		curve,ledger = Resample(Trajectory(0,random_walk(rng,12)),1.0)
		ledger.lengths = rng.uniform(0.5,3.0,ledger.M)
		new = NormalizeDiscreteLengths(ledger,curve)
		assert abs(np.sum(new.discrete) - curve.length) <= 1e-12*curve.length


#================== Endpoint relocation ======================
def test_endpoint_lands_on_grid_point():
	curve  = line_curve(10)
	ledger = SegmentLedger(original=[[0.0,0.0],[4.0,0.0],[10.0,0.0]],knots=[0,4,10],
				time_budget=[2.5,2.5],discrete=[4.0,6.0])
	new,moved = RelocateEndpoints(ledger,curve)
	assert list(new.knots) == [0,4,10]
	assert np.array_equal(moved.points,curve.points)

def test_endpoint_inside_element_moves_one_point(rng):
	xy     = random_walk(rng,10,0.9,1.0)
	curve  = DiscreteCurve(xy,1.0)
	h      = curve.element_lengths
	s      = np.sum(h[:4]) + 0.3*h[4]
	ledger = SegmentLedger(original=xy[[0,4,10]],knots=[0,4,10],
				time_budget=[2.5,2.5],discrete=[s,curve.length - s])
	new,moved = RelocateEndpoints(ledger,curve)
	changed = np.where(np.any(moved.points != curve.points,axis=1))[0]
	assert list(changed) == [4]
	assert new.knots[1] == 4
	assert abs(moved.length - curve.length) <= np.max(h)
	assert np.allclose(moved.points[4],xy[4] + 0.3*(xy[5] - xy[4]))

def test_each_segment_is_measured_from_its_own_start():
	curve  = line_curve(10)
	ledger = SegmentLedger(original=[[0.0,0.0],[3.0,0.0],[6.0,0.0],[10.0,0.0]],knots=[0,3,6,10],
				time_budget=[2.5,2.5,2.5],discrete=[3.4,2.6,4.0])
	new,moved = RelocateEndpoints(ledger,curve)
	changed = np.where(np.any(moved.points != curve.points,axis=1))[0]
	assert list(changed) == [3]
	assert moved.points[3,0] == pytest.approx(3.4)
	assert list(new.knots) == [0,3,6,10]
	assert np.allclose(new.lengths,[3.4,2.6,4.0])
	assert np.array_equal(new.lengths,new.discrete)

def test_relocation_keeps_a_resampled_curve(rng):
	curve,ledger = Resample(Trajectory(0,random_walk(rng,30)),1.0)
	new,moved = RelocateEndpoints(ledger,curve)
	assert np.array_equal(new.knots,ledger.knots)
	assert np.allclose(moved.points,curve.points,atol=1e-12)
	assert not np.any(new.disappeared)

def test_disappeared_segment_shares_its_endpoint():
	curve  = line_curve(10)
	ledger = SegmentLedger(original=[[0.0,0.0],[3.0,0.0],[6.0,0.0],[10.0,0.0]],
				knots=[0,3,6,10],time_budget=[2.5,2.5,2.5],
				lengths=[3.0,0.0,7.0],disappeared=[False,True,False])
	ledger = NormalizeDiscreteLengths(ledger,curve)
	new,_  = RelocateEndpoints(ledger,curve)
	assert list(new.knots) == [0,3,3,10]
	assert np.all(np.diff(new.knots) >= 0)


#================== Attracting field =========================
def test_field_vanishes_after_resampling(rng):
	curve,ledger = Resample(Trajectory(0,random_walk(rng,10)),1.0)
	field = BuildAttractingField(ledger,curve)
	assert np.allclose(field.w,0.0,atol=1e-12)
	assert field.w[0] == 0.0 and field.w[-1] == 0.0

def test_tangential_shift_has_no_normal_part():
	curve  = line_curve(10)
	ledger = SegmentLedger(original=[[0.0,0.0],[10.0,0.0]],knots=[0,10],time_budget=[2.5])
	shifted = curve.points.copy()
	shifted[1:-1,0] += 0.1
	field = BuildAttractingField(ledger,curve.with_points(shifted))
	assert np.allclose(field.vectors[1:-1],[-0.1,0.0])
	assert np.allclose(field.w,0.0)

def test_disappeared_segment_attracts_to_its_centre():
	points = np.array([[-2.0,0.0],[-1.0,0.0],[0.5,0.3],[2.0,0.0],[3.0,0.0]])
	curve  = DiscreteCurve(points,1.0)
	ledger = SegmentLedger(original=[[-2.0,0.0],[0.0,0.0],[1.0,0.0],[3.0,0.0]],
				knots=[0,2,2,4],time_budget=[2.5,2.5,2.5],
				lengths=[2.0,0.0,2.0],disappeared=[False,True,False])
	field = BuildAttractingField(ledger,curve)
	assert np.allclose(field.vectors[2],[0.0,-0.3])
	h      = curve.element_lengths
	normal = Perp((points[3] - points[1])/(h[1] + h[2]))
	assert field.w[2] == pytest.approx(np.dot([0.0,-0.3],normal))
