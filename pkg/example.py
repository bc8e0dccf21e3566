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
#------------ Load libraries -------------------
from __future__ import absolute_import, unicode_literals, print_function
import os
os.environ["NUMBA_NUM_THREADS"] = "1"

#----- Import the module ----------
from macrotrack import Pipeline
from macrotrack.Fixtures import GenerateFixtures


#============ Directory and data =============================
#----- Directory where results and plots will be saved ----
dir_out    = os.getcwd() + "/Example/"
#--------------------------------------

#------- Creates directory if it does not exists -------
os.makedirs(dir_out,exist_ok=True)
#---------------------------------

#----------- Data files --------------------
# The synthetic wound data set is generated on the fly.
# Replace these two lines with your own tracks and mask.
GenerateFixtures(dir_out + "Data/",seed=0)
file_data = dir_out + "Data/wound.csv"
file_mask = dir_out + "Data/wound_mask.pgm"
#-----------------------------------------
#==================================================


#=============== Tuning knobs ============================
#----------------- Acquisition -----------------------------------------------
# Micrometres per pixel of your microscope and minutes between frames.
scale = 0.319489
dT    = 2.5

#----------------- Curve evolution -------------------------------------------
# Target distance between the grid points of the smoothed curves (micrometres).
# Every recorded segment is split into ceil(length/hbar) equal pieces.
hbar = 1.0

# Weight of the curvature term. delta_max is used inside the
# self-intersecting parts when adaptive is True, delta_min elsewhere
# and during the extra steps.
delta_min = 0.003
delta_max = 0.01

# Weight of the attraction towards the recorded positions.
lambda_max = 20.0

# Time step. The scheme is stable for any value, larger steps
# run faster but smooth more coarsely.
tau = 1e-6

# Speed of the tangential redistribution of the grid points.
omega = 50.0

# Steps performed once the curve is free of self-intersections.
extra_steps = 50

# Smooth only around the self-intersections (True) or everywhere (False).
adaptive = True

# Positions are divided by this length (micrometres) before evolving.
# The weights above are tuned for it, change it only with them.
length_unit = 1000.0
#---------------------------------------------------------------------------

#------------ Random motion ----------------------------------------------
# How the random parts of the tracks are identified:
# "disappearance" uses the segments removed during the smoothing,
# "intersections" the self-intersecting parts of the raw tracks.
method = "disappearance"
#----------------------------------------------------------------------

#------------ Reconstruction ------------------------------------------
# Number of mask pixels per reconstruction cell along each axis.
# Large images are slow to solve at full resolution.
downscale = 4

# Tolerance of the Laplace solver, relative to the range of the data.
tol = 1e-8
#----------------------------------------------------------------------

#------------ Run ----------------------------------------------------
# Tracks smoothed concurrently. Results do not depend on it.
threads = 2

# Set it to True to save the segment ledgers and the self-intersections.
debug = False
#==========================================================


#======================= Analysis =====================================================
pipeline = Pipeline(trajectories=file_data,
				mask=file_mask,
				dir_out=dir_out,
				scale=scale,
				dT=dT,
				hbar=hbar,
				delta_min=delta_min,
				delta_max=delta_max,
				lambda_max=lambda_max,
				tau=tau,
				omega=omega,
				extra_steps=extra_steps,
				adaptive=adaptive,
				length_unit=length_unit,
				method=method,
				downscale=downscale,
				tol=tol,
				threads=threads,
				debug=debug)

#-------- Load the tracks --------------------
pipeline.load_data()

#------- Smooth them ---------------------
pipeline.smooth()
pipeline.save_curves()
# Note: to re-analyse a previous run comment the two lines above
# and uncomment the next one.
# pipeline.load_curves()

#------- Random motion statistics -------------
pipeline.analyze()
pipeline.save_msd()
pipeline.plot_msd()
pipeline.plot_curves()

#------- Velocities along the smoothed curves ------
pipeline.velocities()
pipeline.save_velocities()

#=============== Field reconstruction ==============================
# Raises an error if any velocity sample is too close to the
# domain boundary. Increase downscale or crop the tracks.
pipeline.reconstruct()
pipeline.save_field()
pipeline.plot_field(stride=2)
#=======================================================================================
