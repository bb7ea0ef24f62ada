#pragma once

#include "mfsbp/adjacency.hpp"
#include "mfsbp/calculus.hpp"
#include "mfsbp/config.hpp"
#include "mfsbp/delaunay.hpp"
#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/kdtree.hpp"
#include "mfsbp/laplacian.hpp"
#include "mfsbp/norm.hpp"
#include "mfsbp/physics.hpp"
#include "mfsbp/pipeline.hpp"
#include "mfsbp/problems.hpp"
#include "mfsbp/sbp.hpp"
#include "mfsbp/solver.hpp"
