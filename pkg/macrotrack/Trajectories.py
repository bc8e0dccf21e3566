'''
This file is part of Macrotrack.

	Macrotrack is free software: you can redistribute it and/or modify
	it under the terms of the GNU General Public License as published by
	the Free Software Foundation, either version 3 of the License, or
	(at your option) any later version.

	Macrotrack is distributed in the hope that it will be useful,
	but WITHOUT ANY WARRANTY; without even the implied warranty of
	MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
	GNU General Public License for more details.

	You should have received a copy of the GNU General Public License
	along with Macrotrack.  If not, see <http://www.gnu.org/licenses/>.
'''
import os
import warnings
import numpy as np
import pandas as pn

from macrotrack.Functions import InputError,MacrotrackWarning
from macrotrack.Segments import SegmentLedger

class Trajectory(object):
	'''
	Recorded track: ordered positions (micrometres) and acquisition times (minutes).
	Consecutive recorded points define the segments.
	'''
	def __init__(self,id,points,frames=None,times=None,dT=2.5):
		points = np.asarray(points,dtype=np.float64)
		assert points.ndim == 2 and points.shape[1] == 2, "Points must be an array of shape (K,2)"
		assert len(points) >= 2, "A trajectory needs at least 2 points"
		assert dT > 0.0, "Frame interval must be positive"

		if frames is None and times is None:
			frames = np.arange(len(points))
		if times is None:
			times = np.asarray(frames,dtype=np.float64)*dT
		if frames is None:
			frames = np.rint(np.asarray(times)/dT).astype(int)

		times  = np.asarray(times,dtype=np.float64)
		frames = np.asarray(frames,dtype=int)

		assert len(times) == len(points) == len(frames), "Points and times must have equal length"
		assert np.all(np.diff(times) > 0.0), "Times must be strictly increasing"

		self.id     = id
		self.points = points
		self.frames = frames
		self.times  = times
		self.dT     = dT

	def __len__(self):
		return len(self.points)

	@property
	def segment_lengths(self):
		return np.sqrt(np.sum(np.diff(self.points,axis=0)**2,axis=1))

	@property
	def length(self):
		return float(np.sum(self.segment_lengths))


class DiscreteCurve(object):
	"""Evolving polyline. Grid points 0..n+1, the two endpoints are fixed."""
	def __init__(self,points,hbar):
		assert hbar > 0.0, "hbar must be positive"
		self.points = np.asarray(points,dtype=np.float64)
		self.hbar   = hbar

	def __len__(self):
		return len(self.points)

	@property
	def n(self):
		"""Number of interior grid points."""
		return len(self.points) - 2

	@property
	def elements(self):
		return np.diff(self.points,axis=0)

	@property
	def element_lengths(self):
		return np.sqrt(np.sum(self.elements**2,axis=1))

	@property
	def length(self):
		return float(np.sum(self.element_lengths))

	def with_points(self,points):
		return DiscreteCurve(points,self.hbar)

	def copy(self):
		return DiscreteCurve(self.points.copy(),self.hbar)


def CollapseDuplicates(trajectory):
	'''
	Indices of the recorded points that survive after merging
	consecutive duplicates, and the time budget of every resulting segment.
	'''
	keep = [0]
	for i in range(1,len(trajectory)):
		if np.all(trajectory.points[i] == trajectory.points[keep[-1]]):
			continue
		keep.append(i)
	keep = np.array(keep,dtype=int)

	if len(keep) < len(trajectory):
		warnings.warn("Track {0}: {1} duplicated point(s) collapsed".format(
			trajectory.id,len(trajectory)-len(keep)),MacrotrackWarning)

	if len(keep) < 2:
		raise InputError("Track {0} collapses to a single point".format(trajectory.id))

	#------ The final interval goes to the last surviving segment --------
	times = np.append(trajectory.times[keep[:-1]],trajectory.times[-1])
	return keep,np.diff(times)


def Resample(trajectory,hbar):
	'''
	Subdivides every recorded segment into ceil(length/hbar) equal elements.
	Returns the discrete curve and the segment ledger.
	'''
	assert hbar > 0.0, "hbar must be positive"

	keep,budget = CollapseDuplicates(trajectory)
	original = trajectory.points[keep]

	d       = np.diff(original,axis=0)
	lengths = np.sqrt(np.sum(d**2,axis=1))
	counts  = np.maximum(np.ceil(lengths/hbar*(1.0 - 1e-12)),1).astype(int)

	pieces = []
	for j in range(len(d)):
		t = np.arange(counts[j])/counts[j]
		pieces.append(original[j] + t[:,None]*d[j])
	pieces.append(original[-1:])
	points = np.concatenate(pieces)

	#------ Recorded points are kept bitwise -----
	knots = np.concatenate([[0],np.cumsum(counts)])
	points[knots] = original

	ledger = SegmentLedger(original=original,
				knots=knots,
				time_budget=budget,
				source_index=keep)

	return DiscreteCurve(points,hbar),ledger


def LoadTrajectories(file_data,scale=0.319489,dT=2.5):
	'''
	Reads a CSV with header track_id,frame,x,y (pixels).
	Positions are converted to micrometres here, and only here.
	'''
	if not os.path.isfile(file_data):
		raise InputError("Trajectories file not found: {0}".format(file_data))

	try:
		data = pn.read_csv(file_data,dtype={"track_id":str})
	except pn.errors.EmptyDataError:
		raise InputError("no trajectories: {0} is empty".format(file_data))
	except pn.errors.ParserError as error:
		raise InputError("Could not parse {0}: {1}".format(file_data,error))

	columns = ["track_id","frame","x","y"]
	missing = [c for c in columns if c not in data.columns]
	if len(missing) > 0:
		raise InputError("Missing column(s) {0} in {1}".format(",".join(missing),file_data))

	if len(data) == 0:
		raise InputError("no trajectories in {0}".format(file_data))

	for c in ["frame","x","y"]:
		values = pn.to_numeric(data[c],errors="coerce")
		bad = np.where(~np.isfinite(values.to_numpy(dtype=np.float64)))[0]
		if len(bad) > 0:
			#------ header is line 1 -------
			raise InputError("Invalid value in column {0} at line {1} of {2}".format(
				c,bad[0]+2,file_data))
		data[c] = values

	if np.any(data["frame"] != np.round(data["frame"])):
		line = np.where(data["frame"] != np.round(data["frame"]))[0][0] + 2
		raise InputError("Non integer frame at line {0} of {1}".format(line,file_data))

	trajectories = []
	for track_id,group in data.groupby("track_id",sort=False):
		group = group.sort_values("frame",kind="mergesort")
		frames = group["frame"].to_numpy().astype(int)
		if np.any(np.diff(frames) == 0):
			raise InputError("Track {0} has repeated frames".format(track_id))
		if len(group) < 2:
			warnings.warn("Track {0} has a single point and is skipped".format(track_id),
				MacrotrackWarning)
			continue
		points = scale*group[["x","y"]].to_numpy(dtype=np.float64)
		trajectories.append(Trajectory(track_id,points,frames=frames,dT=dT))

	if len(trajectories) == 0:
		raise InputError("no trajectories in {0}".format(file_data))

	return trajectories
