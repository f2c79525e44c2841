#pragma once

#include "biot/errors.hpp"
#include "biot/mesh.hpp"
#include "biot/quadrature.hpp"
#include "biot/permeability.hpp"
#include "biot/spaces.hpp"
#include "biot/assembly.hpp"
#include "biot/linear_solve.hpp"
#include "biot/operators.hpp"
#include "biot/problem.hpp"
#include "biot/solver.hpp"
#include "biot/reduced.hpp"
#include "biot/diagnostics.hpp"
#include "biot/io.hpp"
#include "biot/config.hpp"
