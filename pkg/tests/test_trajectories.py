import numpy as np
import pytest

from macrotrack.Functions import InputError,MacrotrackWarning
from macrotrack.Trajectories import Trajectory,Resample,LoadTrajectories
from conftest import random_walk


def test_segment_is_split_evenly():
	curve,ledger = Resample(Trajectory(1,[[0.0,0.0],[10.0,0.0]]),3.0)
	assert len(curve) == 5
	assert np.allclose(curve.element_lengths,2.5)
	assert list(ledger.knots) == [0,4]

def test_segment_of_length_hbar_is_kept():
	curve,ledger = Resample(Trajectory(1,[[0.0,0.0],[1.0,0.0]]),1.0)
	assert len(curve) == 2
	assert np.array_equal(curve.points,[[0.0,0.0],[1.0,0.0]])

def test_corner_polyline():
	curve,ledger = Resample(Trajectory(1,[[0.0,0.0],[1.0,0.0],[1.0,1.0]]),0.4)
	assert len(curve) == 7
	assert list(ledger.knots) == [0,3,6]
	assert np.allclose(curve.element_lengths,1.0/3.0)

def test_length_and_knots_preserved(rng):
	for _ in range(20):
		xy = random_walk(rng,30,0.1,5.0)
		trajectory = Trajectory(0,xy)
		curve,ledger = Resample(trajectory,0.7)
		assert abs(curve.length - trajectory.length) <= 1e-9*trajectory.length
		assert np.array_equal(curve.points[ledger.knots],xy)
		assert np.all(curve.element_lengths <= 0.7*(1.0 + 1e-9))

def test_resampling_is_idempotent(rng):
	curve,_ = Resample(Trajectory(0,random_walk(rng,20)),1.0)
	again,ledger = Resample(Trajectory(0,curve.points),1.0)
	assert np.array_equal(again.points,curve.points)
	assert list(ledger.knots) == list(range(len(curve)))

def test_duplicates_are_collapsed():
	trajectory = Trajectory(7,[[0.0,0.0],[1.0,0.0],[1.0,0.0],[2.0,0.0]],dT=2.5)
	with pytest.warns(MacrotrackWarning):
		curve,ledger = Resample(trajectory,1.0)
	assert ledger.M == 2
	assert np.allclose(ledger.time_budget,[2.5,5.0])
	assert list(ledger.source_index) == [0,1,3]
	assert np.all(curve.element_lengths > 0.0)

def test_time_budget_follows_frame_gaps():
	trajectory = Trajectory(0,[[0.0,0.0],[1.0,0.0],[2.0,0.0]],frames=[3,4,7],dT=2.5)
	_,ledger = Resample(trajectory,1.0)
	assert np.allclose(ledger.time_budget,[2.5,7.5])

def test_trajectory_validation():
	with pytest.raises(AssertionError):
		Trajectory(0,[[0.0,0.0]])
	with pytest.raises(AssertionError):
		Trajectory(0,[[0.0,0.0],[1.0,1.0]],times=[1.0,1.0])


#================== CSV input ==================================
def test_load_converts_pixels(tmp_path):
	file_csv = tmp_path / "tracks.csv"
	file_csv.write_text("track_id,frame,x,y\na,1,10,0\na,0,0,0\nb,0,5,5\nb,1,5,6\n")
	trajectories = LoadTrajectories(str(file_csv),scale=0.5,dT=2.0)
	assert [t.id for t in trajectories] == ["a","b"]
	assert np.allclose(trajectories[0].points,[[0.0,0.0],[5.0,0.0]])
	assert np.allclose(trajectories[0].times,[0.0,2.0])

def test_load_empty_file(tmp_path):
	file_csv = tmp_path / "tracks.csv"
	file_csv.write_text("track_id,frame,x,y\n")
	with pytest.raises(InputError,match="no trajectories"):
		LoadTrajectories(str(file_csv))

def test_load_reports_line(tmp_path):
	file_csv = tmp_path / "tracks.csv"
	file_csv.write_text("track_id,frame,x,y\na,0,0,0\na,1,oops,0\n")
	with pytest.raises(InputError,match="line 3"):
		LoadTrajectories(str(file_csv))

def test_load_missing_file(tmp_path):
	with pytest.raises(InputError):
		LoadTrajectories(str(tmp_path / "nothing.csv"))
