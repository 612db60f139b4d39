#pragma once

#include "gaussmin/audit.hpp"
#include "gaussmin/energy.hpp"
#include "gaussmin/errors.hpp"
#include "gaussmin/figures.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"
#include "gaussmin/montecarlo.hpp"
#include "gaussmin/random.hpp"
#include "gaussmin/solver.hpp"
