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
import numpy as np
import pandas as pn
from numba import njit

from macrotrack.Functions import DegenerateCurveError,Perp

class SegmentLedger(object):
	'''
	Per recorded segment state of an evolving curve.

	knots[j] and knots[j+1] are the grid indices of the endpoints of segment j
	(0-based), so a segment owns elements knots[j]+1 .. knots[j+1].
	lengths holds the model length L, discrete the length Ld on the curve.
	'''
	def __init__(self,original,knots,time_budget,source_index=None,
		lengths=None,discrete=None,disappeared=None):

		self.original     = np.asarray(original,dtype=np.float64)
		self.knots        = np.asarray(knots,dtype=np.int64)
		self.time_budget  = np.asarray(time_budget,dtype=np.float64)

		M = len(self.original) - 1
		assert M >= 1, "A ledger needs at least one segment"
		assert len(self.knots) == M + 1, "knots must have M+1 entries"
		assert len(self.time_budget) == M, "One time budget per segment"

		if source_index is None:
			source_index = np.arange(M+1)
		if lengths is None:
			lengths = self.original_lengths
		if discrete is None:
			discrete = np.array(lengths,dtype=np.float64)
		if disappeared is None:
			disappeared = np.zeros(M,dtype=bool)

		self.source_index = np.asarray(source_index,dtype=np.int64)
		self.lengths      = np.asarray(lengths,dtype=np.float64)
		self.discrete     = np.asarray(discrete,dtype=np.float64)
		self.disappeared  = np.asarray(disappeared,dtype=bool)

	@property
	def M(self):
		return len(self.lengths)

	@property
	def live(self):
		return ~self.disappeared

	@property
	def original_lengths(self):
		return np.sqrt(np.sum(np.diff(self.original,axis=0)**2,axis=1))

	@property
	def ratios(self):
		total = np.sum(self.lengths)
		if total <= 0.0:
			return np.zeros_like(self.lengths)
		return self.lengths/total

	def copy(self):
		return SegmentLedger(original=self.original,
				knots=self.knots.copy(),
				time_budget=self.time_budget.copy(),
				source_index=self.source_index,
				lengths=self.lengths.copy(),
				discrete=self.discrete.copy(),
				disappeared=self.disappeared.copy())

	def to_frame(self):
		return pn.DataFrame({
			"segment_id":np.arange(1,self.M+1),
			"L":self.lengths,
			"Ld":self.discrete,
			"start_idx":self.knots[:-1],
			"end_idx":self.knots[1:],
			"disappeared":self.disappeared.astype(int)})


class AttractingField(object):
	def __init__(self,vectors,w,normals):
		self.vectors = vectors
		self.w       = w
		self.normals = normals


def DisappearedRuns(disappeared):
	"""Maximal runs (first,last) of consecutive disappeared segments, inclusive."""
	runs  = []
	start = None
	for j,dead in enumerate(disappeared):
		if dead and start is None:
			start = j
		if not dead and start is not None:
			runs.append((start,j-1))
			start = None
	if start is not None:
		runs.append((start,len(disappeared)-1))
	return runs


def EvolveSegmentLengths(ledger,curve,k,beta,tau):
	'''
	Advances the model length of every segment with the normal motion only.
	Segments shorter than the mean element length disappear for good.
	'''
	h   = curve.element_lengths
	cum = np.concatenate([[0.0],np.cumsum(h*k*beta)])

	new = ledger.copy()
	increment = cum[ledger.knots[1:]] - cum[ledger.knots[:-1]]
	lengths   = ledger.lengths + tau*increment

	dead = ledger.disappeared | (lengths < np.mean(h))
	lengths[dead] = 0.0

	new.lengths     = lengths
	new.disappeared = dead
	return new


def NormalizeDiscreteLengths(ledger,curve):
	total = np.sum(ledger.lengths)
	if not total > 0.0:
		raise DegenerateCurveError("All segments disappeared: the curve degenerated")

	H   = curve.length
	new = ledger.copy()
	Ld  = (ledger.lengths/total)*H
	Ld[ledger.disappeared] = 0.0

	#------ The last live segment absorbs the rounding -----
	last = np.where(ledger.live)[0][-1]
	Ld[last] = H - (np.sum(Ld[:last]) + np.sum(Ld[last+1:]))

	new.discrete = Ld
	return new


@njit(cache=True)
def _distance(points,i):
	return np.sqrt((points[i+1,0]-points[i,0])**2 + (points[i+1,1]-points[i,1])**2)

@njit(cache=True)
def _relocate(points,knots,discrete,live,tol):
	n1 = points.shape[0] - 1
	M  = knots.shape[0] - 1
	collapsed = np.zeros(M,dtype=np.bool_)

	rest = 0
	for j in range(M):
		if live[j]:
			rest += 1

	for j in range(M-1):
		prev = knots[j]
		if not live[j]:
			knots[j+1] = prev
			continue

		rest -= 1
		#------ The last live segment runs to the end of the curve ------
		if rest == 0:
			knots[j+1] = n1
			continue

		lo = prev + 1
		hi = n1 - rest
		if lo > hi:
			knots[j+1] = prev
			collapsed[j] = True
			continue

		#------ Arclength measured from the start of the segment -----
		s = discrete[j]
		i = prev
		C = 0.0
		while i < n1:
			step = _distance(points,i)
			if C + step < s - tol:
				C += step
				i += 1
			else:
				break

		if i == n1:
			k = hi
		else:
			step = _distance(points,i)
			if abs(C + step - s) <= tol:
				k = i + 1
			elif abs(C - s) <= tol:
				k = i
			else:
				t  = (s - C)/step
				xs = points[i,0] + t*(points[i+1,0]-points[i,0])
				ys = points[i,1] + t*(points[i+1,1]-points[i,1])
				if t < 0.5:
					near,far = i,i + 1
				else:
					near,far = i + 1,i
				if lo <= near <= hi:
					k = near
				elif lo <= far <= hi:
					k = far
				else:
					k = -1

				if k >= 0:
					points[k,0] = xs
					points[k,1] = ys
				else:
					k = near
		knots[j+1] = min(max(k,lo),hi)

	return collapsed


def RelocateEndpoints(ledger,curve):
	'''
	Moves the end of every live segment to the arclength Ld measured from its
	start, by shifting the nearer endpoint of the element holding that point.
	Only grid points strictly inside the segment's room may move, so fixed
	endpoints and previously placed endpoints stay put.
	The ledger lengths are then measured on the moved curve.
	'''
	points = curve.points.copy()
	knots  = ledger.knots.copy()
	H      = curve.length

	collapsed = _relocate(points,knots,ledger.discrete,ledger.live.copy(),1e-12*H)
	moved = curve.with_points(points)

	cum      = np.concatenate([[0.0],np.cumsum(moved.element_lengths)])
	measured = cum[knots[1:]] - cum[knots[:-1]]

	new = ledger.copy()
	new.knots       = knots
	new.disappeared = ledger.disappeared | collapsed
	new.lengths     = np.where(new.disappeared,0.0,measured)
	new.discrete    = new.lengths.copy()
	return new,moved


def BuildAttractingField(ledger,curve):
	'''
	Pairs the grid points of every live segment with points spread uniformly
	along its recorded segment. A run of disappeared segments is collapsed
	into one grid point attracted to the length weighted centre of mass of the run.
	'''
	x      = curve.points
	target = x.copy()
	P      = ledger.original
	knots  = ledger.knots

	for j in np.where(ledger.live)[0]:
		a,b = knots[j],knots[j+1]
		t = np.linspace(0.0,1.0,b-a+1)
		target[a:b+1] = P[j] + t[:,None]*(P[j+1]-P[j])

	weights = ledger.original_lengths
	for first,last in DisappearedRuns(ledger.disappeared):
		mids = 0.5*(P[first:last+1] + P[first+1:last+2])
		wts  = weights[first:last+1]
		if np.sum(wts) > 0.0:
			target[knots[first]] = np.average(mids,axis=0,weights=wts)
		else:
			target[knots[first]] = np.mean(mids,axis=0)

	vectors = target - x
	w       = np.zeros(len(x))
	normals = np.zeros_like(x)
	if len(x) > 2:
		h = curve.element_lengths
		d = (x[2:] - x[:-2])/(h[:-1] + h[1:])[:,None]
		normals[1:-1] = Perp(d)
		w[1:-1] = np.sum(vectors[1:-1]*normals[1:-1],axis=1)

	return AttractingField(vectors,w,normals)
