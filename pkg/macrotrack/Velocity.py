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
import warnings
import numpy as np
import pandas as pn

from macrotrack.Functions import DegenerateCurveError,MacrotrackWarning

class VelocitySamples(object):
	'''
	Velocities (micrometres per minute) at the grid points of smoothed curves.
	'''
	def __init__(self,positions,velocities,source_ids,segment_ids):
		self.positions   = np.asarray(positions,dtype=np.float64).reshape((-1,2))
		self.velocities  = np.asarray(velocities,dtype=np.float64).reshape((-1,2))
		self.source_ids  = np.asarray(source_ids)
		self.segment_ids = np.asarray(segment_ids,dtype=int)

	def __len__(self):
		return len(self.positions)

	@property
	def speeds(self):
		return np.sqrt(np.sum(self.velocities**2,axis=1))

	def to_frame(self):
		return pn.DataFrame({"track_id":self.source_ids,
				"x":self.positions[:,0],
				"y":self.positions[:,1],
				"vx":self.velocities[:,0],
				"vy":self.velocities[:,1]})

	@classmethod
	def from_frame(cls,data):
		return cls(data[["x","y"]].to_numpy(dtype=np.float64),
				data[["vx","vy"]].to_numpy(dtype=np.float64),
				data["track_id"].to_numpy(),
				np.zeros(len(data),dtype=int))

	@classmethod
	def concatenate(cls,samples):
		if len(samples) == 0:
			return cls(np.zeros((0,2)),np.zeros((0,2)),[],[])
		return cls(np.concatenate([s.positions for s in samples]),
				np.concatenate([s.velocities for s in samples]),
				np.concatenate([s.source_ids for s in samples]),
				np.concatenate([s.segment_ids for s in samples]))


def RedistributeTime(ledger):
	'''
	Every disappeared segment gives half of its time budget to the nearest
	live segment before it and half to the nearest live segment after it.
	With a live segment on one side only, that side receives everything.
	'''
	live = np.where(ledger.live)[0]
	if len(live) == 0:
		raise DegenerateCurveError("No live segments: velocity is undefined")

	budget = ledger.time_budget.copy()
	for j in np.where(ledger.disappeared)[0]:
		before = live[live < j]
		after  = live[live > j]
		share  = ledger.time_budget[j]
		if len(before) > 0 and len(after) > 0:
			budget[before[-1]] += 0.5*share
			budget[after[0]]   += 0.5*share
		elif len(before) > 0:
			budget[before[-1]] += share
		else:
			budget[after[0]]   += share
		budget[j] = 0.0

	new = ledger.copy()
	new.time_budget = budget
	return new


def ComputeVelocities(curve,ledger,source_id=0):
	'''
	Constant speed Ld/dt along every live segment, pointing along the
	element that ends at each grid point. The grid points of a live segment
	are knot+1 .. next knot, so a shared point takes the earlier segment.
	'''
	x = curve.points
	e = np.diff(x,axis=0)
	h = np.sqrt(np.sum(e**2,axis=1))

	positions  = []
	velocities = []
	segments   = []
	for j in np.where(ledger.live)[0]:
		a,b   = ledger.knots[j],ledger.knots[j+1]
		speed = ledger.discrete[j]/ledger.time_budget[j]
		idx   = np.arange(a+1,b+1)
		zero  = h[idx-1] <= 0.0
		if np.any(zero):
			warnings.warn("Track {0}: {1} zero length element(s) skipped".format(
				source_id,np.sum(zero)),MacrotrackWarning)
			idx = idx[~zero]
		positions.append(x[idx])
		velocities.append(speed*e[idx-1]/h[idx-1][:,None])
		segments.append(np.full(len(idx),j+1))

	if len(positions) == 0:
		return VelocitySamples(np.zeros((0,2)),np.zeros((0,2)),[],[])

	positions = np.concatenate(positions)
	return VelocitySamples(positions,
			np.concatenate(velocities),
			np.full(len(positions),source_id,dtype=object),
			np.concatenate(segments))
