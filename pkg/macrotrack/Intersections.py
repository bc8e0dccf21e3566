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

#------- Minimum index gap of a self-intersection ------
MIN_GAP = 4

@njit(cache=True)
def _orient(ax,ay,bx,by,cx,cy):
	v = (bx - ax)*(cy - ay) - (by - ay)*(cx - ax)
	if v > 0.0:
		return 1
	if v < 0.0:
		return -1
	return 0

@njit(cache=True)
def _touch(points,a,b):
	'''
	Closed intersection test of elements a and b (element e joins points e-1 and e).
	'''
	px,py = points[a-1,0],points[a-1,1]
	qx,qy = points[a,0],points[a,1]
	rx,ry = points[b-1,0],points[b-1,1]
	sx,sy = points[b,0],points[b,1]

	o1 = _orient(px,py,qx,qy,rx,ry)
	o2 = _orient(px,py,qx,qy,sx,sy)
	o3 = _orient(rx,ry,sx,sy,px,py)
	o4 = _orient(rx,ry,sx,sy,qx,qy)
	if o1*o2 > 0 or o3*o4 > 0:
		return False
	if o1 == 0 and o2 == 0:
		#------ collinear: overlap of the projections ------
		return (max(min(px,qx),min(rx,sx)) <= min(max(px,qx),max(rx,sx)) and
				max(min(py,qy),min(ry,sy)) <= min(max(py,qy),max(ry,sy)))
	return True

@njit(cache=True)
def _cell_runs(codes,elements,points,min_gap,fill,first,second):
	'''
	Walks the visits cell by cell in element order. A visit more than min_gap
	indices after the most recent one in the same cell starts a new run, and
	every pair of consecutive runs reports the span from the start of the
	earlier run to the end of the later one. Inside a run, elements more
	than min_gap apart are reported when they touch.

	Returns the number of reports and the operations spent.
	'''
	order = np.argsort(codes,kind="mergesort")
	count = 0
	ops   = 0
	start = 0
	n = order.shape[0]
	while start < n:
		stop = start + 1
		while stop < n and codes[order[stop]] == codes[order[start]]:
			stop += 1

		earlier = -1
		run     = start
		for p in range(start,stop):
			j = elements[order[p]]
			ops += 1
			if p > start and j - elements[order[p-1]] > min_gap:
				if earlier >= 0:
					if fill:
						first[count]  = earlier - 1
						second[count] = elements[order[p-1]]
					count += 1
				earlier = elements[order[run]]
				run = p

			q = run
			while q < p and j - elements[order[q]] > min_gap:
				ops += 1
				i = elements[order[q]]
				if _touch(points,i,j):
					if fill:
						first[count]  = i - 1
						second[count] = j
					count += 1
				q += 1

		if earlier >= 0:
			if fill:
				first[count]  = earlier - 1
				second[count] = elements[order[stop-1]]
			count += 1
		start = stop
	return count,ops


def _grid_pairs(points,cell,offset):
	'''
	Stamps every element into all the cells of one background grid that its
	bounding box overlaps. Returns the reported spans and the operation count.
	'''
	origin = np.min(points,axis=0) - cell + offset
	idx    = np.floor((points - origin)/cell).astype(np.int64)

	lo = np.minimum(idx[:-1],idx[1:])
	hi = np.maximum(idx[:-1],idx[1:])
	nx = hi[:,0] - lo[:,0] + 1
	ny = hi[:,1] - lo[:,1] + 1
	counts = nx*ny

	elements = np.repeat(np.arange(1,len(points)),counts)
	e        = elements - 1
	offs     = np.arange(np.sum(counts)) - np.repeat(np.cumsum(counts) - counts,counts)
	cx       = lo[e,0] + offs % nx[e]
	cy       = lo[e,1] + offs // nx[e]

	keys = cx*(np.max(idx[:,1]) + 2) + cy
	codes,_ = pn.factorize(keys)

	codes = codes.astype(np.int64)
	empty = np.empty(0,dtype=np.int64)
	count,ops = _cell_runs(codes,elements,points,MIN_GAP,False,empty,empty)
	first  = np.empty(count,dtype=np.int64)
	second = np.empty(count,dtype=np.int64)
	_cell_runs(codes,elements,points,MIN_GAP,True,first,second)
	#------ Stamping pass plus the walk -------
	return first,second,len(codes) + ops


def MergeSpans(pairs):
	"""Merges overlapping index intervals transitively into maximal spans."""
	if len(pairs) == 0:
		return []
	pairs = sorted(pairs)
	spans = [list(pairs[0])]
	for i1,i2 in pairs[1:]:
		if i1 <= spans[-1][1]:
			spans[-1][1] = max(spans[-1][1],i2)
		else:
			spans.append([i1,i2])
	return [(int(a),int(b)) for a,b in spans]


def DetectSelfIntersections(points,hbar,return_ops=False):
	'''
	Self-intersecting parts of a polyline as maximal spans (i1,i2) of grid
	point indices. Two background grids of cell 2*hbar, the second one
	shifted by hbar, are stamped in linear time.

	Element e joins points e-1 and e. An element entering a cell more than
	4 indices after the most recent element stamped there reports the
	stretch between the two visits, widened to whole runs of visits, so
	nearly touching strands count as well as crossing ones. Elements of one
	run more than 4 indices apart are reported only when they touch.
	ops counts the cell visits and the touch tests of both grids.
	'''
	points = np.asarray(points,dtype=np.float64)
	ops    = 0
	pairs  = []
	if len(points) > MIN_GAP + 2:
		for offset in [0.0,hbar]:
			first,second,visits = _grid_pairs(points,2.0*hbar,offset)
			ops += visits
			pairs.extend(zip((first - 1).tolist(),second.tolist()))

	spans = MergeSpans(pairs)
	if return_ops:
		return spans,ops
	return spans


def ThinPoints(curve,ledger,hbar):
	'''
	Removes every second interior grid point when the mean element length
	drops below hbar/2. Segment endpoints are never removed.
	'''
	h = curve.element_lengths
	if len(curve) < 3 or np.mean(h) >= 0.5*hbar:
		return curve,ledger

	keep = np.ones(len(curve),dtype=bool)
	keep[1:-1:2] = False
	keep[ledger.knots] = True
	keep[0] = keep[-1] = True

	remap = np.cumsum(keep) - 1

	new = ledger.copy()
	new.knots = remap[ledger.knots]
	return curve.with_points(curve.points[keep]),new


def AdaptiveParams(spans,n_points,delta_min,delta_max,lambda_max):
	'''
	Per point smoothing weights: maximal inside each span, linear six point
	ramps on both sides and zero elsewhere. Overlaps take the maximum.
	delta_min is applied by the caller once the curve is free of loops.
	'''
	assert 0.0 <= delta_min < delta_max, "Need 0 <= delta_min < delta_max"
	shape = np.zeros(n_points)
	index = np.arange(n_points)
	for i1,i2 in spans:
		ramp = np.zeros(n_points)
		up   = (index >= i1 - 5) & (index < i1)
		down = (index > i2) & (index <= i2 + 5)
		ramp[up]   = (6.0 - i1 + index[up])/6.0
		ramp[down] = (6.0 + i2 - index[down])/6.0
		ramp[(index >= i1) & (index <= i2)] = 1.0
		shape = np.maximum(shape,ramp)

	delta = shape*delta_max
	lam   = shape*lambda_max
	delta[shape == 1.0] = delta_max
	lam[shape == 1.0]   = lambda_max
	return delta,lam
