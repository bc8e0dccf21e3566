import numpy as np
import pytest

from macrotrack.Functions import InsufficientDataError
from macrotrack.Trajectories import Trajectory
from macrotrack.Segments import SegmentLedger
from macrotrack.Fixtures import BrownianWalkers,BallisticWalkers,BoxWalkers
from macrotrack.Diffusion import RandomSubTrajectory,MsdSeries,Regime
from macrotrack.Diffusion import ExtractRandomByDisappearance,ExtractRandomBySelfIntersection
from macrotrack.Diffusion import SpanToSegments,Eamsd,Tamsd,Eatamsd,IsValidLag,FitHurst


def whole(trajectory):
	return RandomSubTrajectory(trajectory,0,len(trajectory)-1,"test")

def line_track(n,dT=2.5):
	return Trajectory(0,np.column_stack((np.arange(n,dtype=np.float64),np.zeros(n))),dT=dT)

def dead_ledger(M,dead):
	disappeared = np.zeros(M,dtype=bool)
	disappeared[dead] = True
	return SegmentLedger(original=np.zeros((M+1,2)) + np.arange(M+1)[:,None],
			knots=np.arange(M+1),time_budget=np.full(M,2.5),disappeared=disappeared)


#================== Extraction ===============================
def test_dead_run_is_extended_by_one_point():
	trajectory = line_track(21)
	subs = ExtractRandomByDisappearance(dead_ledger(20,slice(3,7)),trajectory)
	assert len(subs) == 1
	assert subs[0].first == 2
	assert len(subs[0]) == 7
	assert subs[0].method == "disappeared-segments"

def test_short_dead_run_is_dropped():
	subs = ExtractRandomByDisappearance(dead_ledger(20,[5]),line_track(21))
	assert subs == []

def test_no_dead_run():
	assert ExtractRandomByDisappearance(dead_ledger(20,[]),line_track(21)) == []

def test_span_strictly_inside_segments():
	knots = np.arange(0,61,3)
	assert SpanToSegments(knots,16,31) == (5,10)

def test_span_on_shared_points():
	knots = np.arange(0,61,3)
	assert SpanToSegments(knots,15,33) == (5,10)

def test_self_intersection_extraction(figure_eight,straight):
	assert ExtractRandomBySelfIntersection(straight,1.0) == []
	subs = ExtractRandomBySelfIntersection(figure_eight,1.0)
	assert len(subs) == 1
	assert subs[0].method == "self-intersections"
	assert len(subs[0]) >= 5


#================== EAMSD ====================================
def test_eamsd_of_stationary_walkers():
	still = Trajectory(0,np.zeros((5,2)),frames=np.arange(5))
	series = Eamsd([whole(still),whole(still)])
	assert np.all(series.values == 0.0)

def test_eamsd_first_lag():
	a = Trajectory(0,[[0.0,0.0],[1.0,0.0]])
	b = Trajectory(1,[[0.0,0.0],[0.0,3.0]])
	series = Eamsd([whole(a),whole(b)])
	assert series.abscissae[0] == 2.5
	assert series.values[0] == pytest.approx(5.0)

def test_eamsd_of_ballistic_walkers(rng):
	walkers = BallisticWalkers(rng,n_walkers=5,n_steps=20,speed=2.0)
	series  = Eamsd([whole(w) for w in walkers])
	assert np.allclose(series.values,(2.0*series.abscissae)**2)

def test_eamsd_needs_data():
	with pytest.raises(InsufficientDataError):
		Eamsd([])


#================== TAMSD ====================================
def test_tamsd_of_ballistic_track():
	track = Trajectory(0,np.column_stack((np.arange(41)*0.5,np.zeros(41))))
	for n in range(1,11):
		assert Tamsd(whole(track),n) == pytest.approx((0.5*n)**2)

def test_tamsd_on_five_points(rng):
	xy  = np.cumsum(rng.normal(size=(5,2)),axis=0)
	sub = whole(Trajectory(0,xy))
	assert Tamsd(sub,1) == pytest.approx(np.mean(np.sum(np.diff(xy,axis=0)**2,axis=1)))
	assert Tamsd(sub,2) is None

def test_lag_validity():
	assert IsValidLag(2,7)
	assert not IsValidLag(2,6)
	assert IsValidLag(1,4)
	assert not IsValidLag(0,10)

def test_tamsd_of_brownian_walker(rng):
	walker = BrownianWalkers(rng,n_walkers=1,n_steps=10000,D=1.0,dT=1.0)[0]
	for n in range(1,6):
		assert Tamsd(whole(walker),n) == pytest.approx(4.0*n,rel=0.15)


#================== EATAMSD ==================================
def test_eatamsd_of_identical_tracks(rng):
	walker = BrownianWalkers(rng,n_walkers=1,n_steps=100)[0]
	series = Eatamsd([whole(walker)]*3)
	assert series.values[0] == pytest.approx(Tamsd(whole(walker),1))
	assert len(series) == 25

def test_rare_lags_are_excluded():
	short = [whole(line_track(5)) for _ in range(7)]
	long  = [whole(line_track(41))]
	series = Eatamsd(short + long)
	assert list(series.abscissae) == [2.5]
	assert series.counts[0] == 8

def test_lag_in_a_quarter_of_the_tracks_is_kept():
	short = [whole(line_track(5)) for _ in range(6)]
	long  = [whole(line_track(41)) for _ in range(2)]
	series = Eatamsd(short + long)
	assert list(series.counts[:2]) == [8,2]

def test_brownian_ensemble(rng):
	walkers = BrownianWalkers(rng,n_walkers=50,n_steps=400,D=1.0,dT=2.5)
	series  = Eatamsd([whole(w) for w in walkers])
	alpha,hurst = FitHurst(series)
	assert 0.9 <= alpha <= 1.1
	assert series.values[0] == pytest.approx(4.0*2.5,rel=0.1)
	assert series.diffusion_coefficient == pytest.approx(1.0,rel=0.1)
	assert series.regime == "diffusive"

def test_ballistic_ensemble(rng):
	series = Eatamsd([whole(w) for w in BallisticWalkers(rng)])
	alpha,_ = FitHurst(series)
	assert alpha == pytest.approx(2.0,abs=1e-3)
	assert series.regime == "ballistic"

def test_confined_ensemble(rng):
	series = Eatamsd([whole(w) for w in BoxWalkers(rng,n_walkers=50)])
	alpha,_ = FitHurst(series)
	assert alpha < 0.8
	assert series.regime == "subdiffusive"

def test_rigid_motions_and_scaling(rng):
	walkers = BrownianWalkers(rng,n_walkers=10,n_steps=100)
	base    = Eatamsd([whole(w) for w in walkers])
	FitHurst(base)

	theta = 0.7
	R = np.array([[np.cos(theta),-np.sin(theta)],[np.sin(theta),np.cos(theta)]])
	moved = [Trajectory(w.id,w.points @ R.T + [3.0,-4.0]) for w in walkers]
	assert np.allclose(Eatamsd([whole(w) for w in moved]).values,base.values)

	scaled = Eatamsd([whole(Trajectory(w.id,2.0*w.points)) for w in walkers])
	FitHurst(scaled)
	assert np.allclose(scaled.values,4.0*base.values)
	assert scaled.alpha == pytest.approx(base.alpha)


#================== Fit ======================================
def test_fit_of_a_power_law():
	t = np.arange(1,11)*2.5
	series = MsdSeries(t,3.0*t**1.7,np.ones(10))
	alpha,hurst = FitHurst(series)
	assert abs(alpha - 1.7) <= 1e-10
	assert hurst == pytest.approx(0.85)

def test_fit_drops_zeros():
	series = MsdSeries([1.0,2.0,3.0],[0.0,2.0,3.0],[1,1,1])
	alpha,_ = FitHurst(series)
	assert alpha == pytest.approx(1.0)

def test_fit_needs_two_points():
	with pytest.raises(InsufficientDataError):
		FitHurst(MsdSeries([1.0,2.0],[0.0,1.0],[1,1]))

def test_regimes():
	assert Regime(0.5) == "diffusive"
	assert Regime(0.3) == "subdiffusive"
	assert Regime(0.75) == "superdiffusive"
	assert Regime(np.nan) == "undetermined"
