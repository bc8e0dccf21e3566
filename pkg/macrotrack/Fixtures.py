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
import numpy as np
import pandas as pn

from macrotrack.Trajectories import Trajectory
from macrotrack.Reconstruction import WritePGM

#====================== Curves ====================================
def FigureEight(radius=8.0,spacing=1.5,dT=2.5,id="figure-eight"):
	'''
	Open lemniscate crossing itself once at the origin.
	Starts at the tip of the left lobe and stops before closing it.
	'''
	t0,t1 = -0.5*np.pi,1.5*np.pi - 0.6
	n = int(np.ceil(2.8*radius*(t1-t0)/np.pi/spacing)) + 1
	t = np.linspace(t0,t1,n)
	xy = radius*np.column_stack((np.sin(t),np.sin(t)*np.cos(t)))
	return Trajectory(id,xy,dT=dT)

def TripleLoop(loops=3,a=1.0,b=3.0,approach=8.0,spacing=1.0,dT=2.5,id="triple-loop"):
	'''
	Straight approach, a prolate cycloid with the given number of loops
	and a straight exit. b > a makes every arch cross itself.
	'''
	s  = np.linspace(0.0,2.0*np.pi*loops,int(np.ceil(2.0*np.pi*loops*b/spacing)) + 1)
	xy = np.column_stack((a*s - b*np.sin(s),b*(1.0 - np.cos(s))))
	inn = np.column_stack((np.arange(-approach,0.0,spacing),np.zeros(int(np.ceil(approach/spacing)))))
	end = xy[-1] + np.column_stack((np.arange(1,int(approach/spacing)+1)*spacing,
			np.zeros(int(approach/spacing))))
	return Trajectory(id,np.concatenate([inn,xy,end]),dT=dT)

def Straight(length=20.0,n=11,angle=0.0,dT=2.5,id="straight"):
	s = np.linspace(0.0,length,n)
	xy = np.column_stack((s*np.cos(angle),s*np.sin(angle)))
	return Trajectory(id,xy,dT=dT)
#==================================================================


#====================== Walkers ===================================
def BrownianWalkers(rng,n_walkers=200,n_steps=2000,D=1.0,dT=2.5):
	'''
	Free 2D Brownian walkers: rho(t) = 4 D t.
	'''
	steps = rng.normal(scale=np.sqrt(2.0*D*dT),size=(n_walkers,n_steps,2))
	xy = np.concatenate([np.zeros((n_walkers,1,2)),np.cumsum(steps,axis=1)],axis=1)
	return [Trajectory("brownian-{0}".format(k),xy[k],dT=dT) for k in range(n_walkers)]

def BallisticWalkers(rng,n_walkers=20,n_steps=100,speed=1.0,dT=2.5):
	angle = rng.uniform(0.0,2.0*np.pi,size=n_walkers)
	t = np.arange(n_steps+1)*dT
	walkers = []
	for k in range(n_walkers):
		v  = speed*np.array([np.cos(angle[k]),np.sin(angle[k])])
		xy = rng.uniform(-50.0,50.0,size=2) + t[:,None]*v
		walkers.append(Trajectory("ballistic-{0}".format(k),xy,dT=dT))
	return walkers

def Reflect(x,side):
	x = np.mod(x,2.0*side)
	return np.where(x > side,2.0*side - x,x)

def BoxWalkers(rng,n_walkers=100,n_steps=400,D=1.0,side=5.0,dT=2.5):
	'''
	Brownian walkers confined to a square with reflecting walls.
	'''
	steps = rng.normal(scale=np.sqrt(2.0*D*dT),size=(n_walkers,n_steps,2))
	start = rng.uniform(0.0,side,size=(n_walkers,1,2))
	free  = np.concatenate([start,start + np.cumsum(steps,axis=1)],axis=1)
	xy    = Reflect(free,side)
	return [Trajectory("box-{0}".format(k),xy[k],dT=dT) for k in range(n_walkers)]
#==================================================================


#====================== Wound migration ===========================
def WoundDataset(rng,n_tracks=6,n_frames=40,drift=2.5,burst=8,step=3.0,dT=2.5,
	width=200.0,height=120.0):
	'''
	Cells drifting along +x towards the wound, each one with a burst of
	random steps. Returns the tracks (micrometres) and the domain
	extent. The tracks keep away from the domain border and the hole.
	'''
	ys = np.linspace(0.2*height,0.8*height,n_tracks)
	tracks = []
	for k in range(n_tracks):
		start = rng.integers(5,n_frames - burst - 5)
		moves = np.tile([drift,0.0],(n_frames-1,1)) + rng.normal(scale=0.3,size=(n_frames-1,2))
		angle = rng.uniform(0.0,2.0*np.pi,size=burst)
		moves[start:start+burst] = step*np.column_stack((np.cos(angle),np.sin(angle)))
		xy = np.array([rng.uniform(0.1,0.2)*width,ys[k]]) + np.concatenate([[[0.0,0.0]],np.cumsum(moves,axis=0)])
		tracks.append(Trajectory("cell-{0}".format(k+1),xy,dT=dT))
	return tracks

def WoundMask(width=200.0,height=120.0,scale=0.319489,hole=(0.9,0.5,10.0)):
	'''
	Inside everywhere except a disc (fraction of width, fraction of height, radius).
	Image rows run along y.
	'''
	nx = int(width/scale)
	ny = int(height/scale)
	x  = (np.arange(nx) + 0.5)*scale
	y  = (np.arange(ny) + 0.5)*scale
	X,Y = np.meshgrid(x,y)
	image = np.full((ny,nx),255,dtype=int)
	image[(X - hole[0]*width)**2 + (Y - hole[1]*height)**2 < hole[2]**2] = 0
	return image

def IslandMask(nx=40,ny=30):
	'''
	A large rectangle plus a small disconnected island.
	'''
	image = np.zeros((ny,nx),dtype=int)
	image[2:ny-2,2:nx-12] = 255
	image[5:8,nx-6:nx-3]  = 255
	return image
#==================================================================


def SaveTrajectories(trajectories,file_csv,scale=0.319489):
	'''
	Writes the tracks in pixels with header track_id,frame,x,y.
	'''
	frames = []
	for trajectory in trajectories:
		frames.append(pn.DataFrame({
			"track_id":trajectory.id,
			"frame":trajectory.frames,
			"x":trajectory.points[:,0]/scale,
			"y":trajectory.points[:,1]/scale}))
	pn.concat(frames,ignore_index=True).to_csv(file_csv,index=False,float_format="%.10g")


def GenerateFixtures(dir_out,seed=0,scale=0.319489,dT=2.5):
	'''
	Writes every synthetic data set, all drawn from one seed.
	'''
	os.makedirs(dir_out,exist_ok=True)
	rng = np.random.default_rng(seed)

	print("Generating fixtures ...")
	sets = {
		"figure_eight":[FigureEight(dT=dT)],
		"triple_loop" :[TripleLoop(dT=dT)],
		"straight"    :[Straight(dT=dT)],
		"brownian"    :BrownianWalkers(rng,n_walkers=50,n_steps=200,dT=dT),
		"ballistic"   :BallisticWalkers(rng,dT=dT),
		"box"         :BoxWalkers(rng,dT=dT),
		"wound"       :WoundDataset(rng,dT=dT),
		}
	for name,trajectories in sets.items():
		SaveTrajectories(trajectories,os.path.join(dir_out,name + ".csv"),scale=scale)
		print("{0}: {1} track(s)".format(name,len(trajectories)))

	WritePGM(os.path.join(dir_out,"wound_mask.pgm"),WoundMask(scale=scale))
	WritePGM(os.path.join(dir_out,"islands_mask.pgm"),IslandMask())
	print("Fixtures saved in {0}".format(dir_out))
